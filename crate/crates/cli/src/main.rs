mod args;
mod config;
mod error;
mod render;
mod sweep;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use hmmeb::bounds::{
    bound_report, fast_transitions_deficit, rll_very_noisy_deficit, very_noisy_constant,
    BoundReport,
};
use hmmeb::estimator::{estimate_entropy_rate, EstimateMethod};
use hmmeb::oracle::{sandwich_bounds, ExactEntropyResult};
use hmmeb::verify::{run_suite, Suite};
use hmmeb::{ChainSpec, Probability};
use serde::Serialize;

use crate::args::{
    BoundArgs, ChainArgs, Cli, Command, EstimateArgs, ExpandArgs, Family, Format, SamplingArgs,
    SweepArgs, VerifyArgs,
};
use crate::config::{
    FileConfig, DEFAULT_BURNIN, DEFAULT_CHAINS, DEFAULT_COLUMNS, DEFAULT_SAMPLES, DEFAULT_SEED,
};
use crate::error::CliError;
use crate::render::{format_sig, table};
use crate::sweep::{parse_columns, Param, SweepSpec, SIGNIFICANT_DIGITS};

const THREADS_ENV: &str = "HMMEB_THREADS";

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hmmeb: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Bound(a) => cmd_bound(a, &file),
        Command::Sweep(a) => cmd_sweep(a, &file),
        Command::Estimate(a) => cmd_estimate(a, &file),
        Command::Verify(a) => cmd_verify(a, &file),
        Command::Expand(a) => cmd_expand(a, &file),
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Invalid(format!("{THREADS_ENV} = {raw:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Invalid(format!("{THREADS_ENV}: {e}")))
}

/// Chain parameters after merging flags with the config file.
#[derive(Debug, Clone, Copy)]
struct ChainParams {
    family: Family,
    q: Option<f64>,
    q01: Option<f64>,
    q10: Option<f64>,
}

impl ChainParams {
    fn resolve(args: &ChainArgs, file: &FileConfig) -> Self {
        let q = args.q.or(file.q);
        let q01 = args.q01.or(file.q01);
        let q10 = args.q10.or(file.q10);
        let family = if args.symmetric {
            Family::Symmetric
        } else if args.rll {
            Family::Rll
        } else if args.q01.is_some() || args.q10.is_some() {
            Family::General
        } else if let Some(f) = file.family {
            f
        } else if q01.is_some() || q10.is_some() {
            Family::General
        } else {
            Family::Symmetric
        };
        ChainParams { family, q, q01, q10 }
    }

    fn chain(&self) -> Result<ChainSpec, CliError> {
        let need = |name: &'static str, v: Option<f64>| -> Result<Probability, CliError> {
            let v = v.ok_or_else(|| CliError::Invalid(format!("--{name} is required")))?;
            Ok(Probability::named(name, v)?)
        };
        Ok(match self.family {
            Family::Symmetric => ChainSpec::symmetric(need("q", self.q)?)?,
            Family::Rll => ChainSpec::rll(need("q", self.q)?),
            Family::General => ChainSpec::new(need("q01", self.q01)?, need("q10", self.q10)?)?,
        })
    }
}

fn alpha_of(flag: Option<f64>, file: &FileConfig) -> Result<Probability, CliError> {
    let v = flag
        .or(file.alpha)
        .ok_or_else(|| CliError::Invalid("--alpha is required".into()))?;
    Ok(Probability::named("alpha", v)?)
}

#[derive(Debug, Clone, Copy, Serialize)]
struct Sampling {
    samples: u64,
    burnin: u64,
    chains: usize,
    seed: u64,
}

impl Sampling {
    fn resolve(args: &SamplingArgs, file: &FileConfig) -> Self {
        Sampling {
            samples: args.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES),
            burnin: args.burnin.or(file.burnin).unwrap_or(DEFAULT_BURNIN),
            chains: args.chains.or(file.chains).unwrap_or(DEFAULT_CHAINS),
            seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        }
    }
}

fn print(text: &str) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    print(&(serde_json::to_string_pretty(value)? + "\n"))
}

fn csv_line(fields: &[(String, String)]) -> String {
    let header: Vec<&str> = fields.iter().map(|(k, _)| k.as_str()).collect();
    let values: Vec<&str> = fields.iter().map(|(_, v)| v.as_str()).collect();
    format!("{}\n{}\n", header.join(","), values.join(","))
}

fn emit(format: Format, fields: &[(String, String)], json: impl Serialize) -> Result<(), CliError> {
    match format {
        Format::Table => print(&table(fields)),
        Format::Csv => print(&csv_line(fields)),
        Format::Json => print_json(&json),
    }
}

fn num(v: f64) -> String {
    format_sig(v, SIGNIFICANT_DIGITS)
}

#[derive(Serialize)]
struct BoundOutput {
    #[serde(flatten)]
    report: BoundReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    sandwich: Option<ExactEntropyResult>,
}

fn cmd_bound(args: BoundArgs, file: &FileConfig) -> Result<(), CliError> {
    let chain = ChainParams::resolve(&args.chain, file).chain()?;
    let alpha = alpha_of(args.alpha, file)?;
    let sandwich = match args.n.or(file.n) {
        Some(n) => Some(sandwich_bounds(&chain, alpha, n)?),
        None => None,
    };
    let report = bound_report(&chain, alpha);

    let mut fields = vec![
        ("q01".to_string(), num(report.q01)),
        ("q10".to_string(), num(report.q10)),
        ("alpha".to_string(), num(report.alpha)),
        ("lambda".to_string(), num(report.lambda)),
        ("mgl".to_string(), num(report.mgl.value())),
        ("beta".to_string(), num(report.beta.value())),
        ("new_bound".to_string(), num(report.new_bound.value())),
        ("nonsym_bound".to_string(), num(report.nonsym_bound.value())),
    ];
    if let (Some(g), Some(r)) = (report.gamma, report.rll_bound) {
        fields.push(("gamma".to_string(), num(g.value())));
        fields.push(("rll_bound".to_string(), num(r.value())));
    }
    fields.push(("single_letter_ub".to_string(), num(report.single_letter_ub.value())));
    if let Some(s) = &sandwich {
        fields.push(("sandwich_n".to_string(), s.n.to_string()));
        fields.push(("sandwich_lower".to_string(), num(s.lower.value())));
        fields.push(("sandwich_upper".to_string(), num(s.upper.value())));
    }
    let format = args.format.or(file.format).unwrap_or(Format::Table);
    emit(format, &fields, BoundOutput { report, sandwich })
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

fn cmd_sweep(args: SweepArgs, file: &FileConfig) -> Result<(), CliError> {
    let params = ChainParams::resolve(&args.chain, file);
    let sampling = Sampling::resolve(&args.sampling, file);
    let swept: Param = args
        .sweep
        .as_deref()
        .or(file.sweep.as_deref())
        .ok_or_else(|| CliError::Invalid("sweep: --sweep is required".into()))?
        .parse()?;
    let axis = |name: &str, flag: Option<f64>, cfg: Option<f64>| {
        flag.or(cfg)
            .ok_or_else(|| CliError::Invalid(format!("sweep: --{name} is required")))
    };
    let columns = args
        .columns
        .as_deref()
        .or(file.columns.as_deref())
        .unwrap_or(DEFAULT_COLUMNS);
    let spec = SweepSpec {
        family: params.family,
        swept,
        start: axis("start", args.start, file.start)?,
        stop: axis("stop", args.stop, file.stop)?,
        step: axis("step", args.step, file.step)?,
        alpha: args.alpha.or(file.alpha),
        q: params.q,
        q01: params.q01,
        q10: params.q10,
        columns: parse_columns(columns)?,
        samples: sampling.samples,
        burnin: sampling.burnin,
        chains: sampling.chains,
        seed: sampling.seed,
        significant_digits: SIGNIFICANT_DIGITS,
    };
    spec.validate()?;
    let rows = spec.rows()?;

    match &args.out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            spec.write_csv(&rows, BufWriter::new(file))?;
            let sidecar = sidecar_path(path);
            let text = serde_json::to_string_pretty(&spec)? + "\n";
            std::fs::write(&sidecar, text)
                .map_err(|e| CliError::Io(format!("{}: {e}", sidecar.display())))?;
        }
        None => spec.write_csv(&rows, io::stdout().lock())?,
    }
    Ok(())
}

#[derive(Serialize)]
struct EstimateOutput {
    q01: f64,
    q10: f64,
    alpha: f64,
    estimate: f64,
    ci: f64,
    samples: u64,
    burnin: u64,
    chains: usize,
    seed: u64,
    method: EstimateMethod,
}

fn cmd_estimate(args: EstimateArgs, file: &FileConfig) -> Result<(), CliError> {
    let chain = ChainParams::resolve(&args.chain, file).chain()?;
    let alpha = alpha_of(args.alpha, file)?;
    let s = Sampling::resolve(&args.sampling, file);
    let r = estimate_entropy_rate(&chain, alpha, s.samples, s.burnin, s.chains, s.seed)?;
    let out = EstimateOutput {
        q01: chain.q01(),
        q10: chain.q10(),
        alpha: alpha.value(),
        estimate: r.estimate.value(),
        ci: r.ci_halfwidth.value(),
        samples: r.samples,
        burnin: r.burnin,
        chains: r.chains,
        seed: r.seed,
        method: r.method,
    };
    let fields = vec![
        ("estimate".to_string(), num(out.estimate)),
        ("ci".to_string(), num(out.ci)),
        ("samples".to_string(), out.samples.to_string()),
        ("chains".to_string(), out.chains.to_string()),
        ("seed".to_string(), out.seed.to_string()),
    ];
    emit(args.format.or(file.format).unwrap_or(Format::Json), &fields, out)
}

fn cmd_verify(args: VerifyArgs, file: &FileConfig) -> Result<(), CliError> {
    let suite: Suite = args.suite.parse().map_err(CliError::Invalid)?;
    let report = run_suite(suite)?;
    match args.format.or(file.format).unwrap_or(Format::Json) {
        Format::Json => print_json(&report)?,
        Format::Table | Format::Csv => {
            let failed = report.failures().count();
            let mut text = format!(
                "{}: {} ({} checks, {} failed)\n",
                report.suite,
                if report.pass { "pass" } else { "FAIL" },
                report.checks.len(),
                failed
            );
            for c in report.failures() {
                text.push_str(&format!(
                    "  FAIL {}: slack {} tolerance {}\n",
                    c.name, c.slack, c.tolerance
                ));
            }
            print(&text)?;
        }
    }
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "{} of {} checks in {} failed",
            report.failures().count(),
            report.checks.len(),
            report.suite
        )))
    }
}

#[derive(Serialize)]
struct ExpandOutput {
    #[serde(skip_serializing_if = "Option::is_none")]
    q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    very_noisy_constant: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rll_very_noisy_deficit: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rll_within_stated_range: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fast_transitions_deficit: Option<f64>,
}

fn cmd_expand(args: ExpandArgs, file: &FileConfig) -> Result<(), CliError> {
    let q = args.q.or(file.q).map(|v| Probability::named("q", v)).transpose()?;
    let alpha = args.alpha.or(file.alpha).map(|v| Probability::named("alpha", v)).transpose()?;
    if q.is_none() && alpha.is_none() {
        return Err(CliError::Invalid("expand: give --q and/or --alpha".into()));
    }
    let mut out = ExpandOutput {
        q: q.map(Probability::value),
        very_noisy_constant: None,
        rll_very_noisy_deficit: None,
        rll_within_stated_range: None,
        alpha: alpha.map(Probability::value),
        fast_transitions_deficit: None,
    };
    let mut fields = Vec::new();
    if let Some(q) = q {
        fields.push(("q".to_string(), num(q.value())));
        match very_noisy_constant(q) {
            Ok(c) => {
                out.very_noisy_constant = Some(c);
                fields.push(("very_noisy_constant".to_string(), num(c)));
            }
            Err(e) => fields.push(("very_noisy_constant".to_string(), format!("n/a ({e})"))),
        }
        let d = rll_very_noisy_deficit(q);
        out.rll_very_noisy_deficit = Some(d.coefficient);
        out.rll_within_stated_range = Some(d.within_stated_range);
        let mut text = num(d.coefficient);
        if !d.within_stated_range {
            text.push_str(" (outside 0 <= q < 1)");
        }
        fields.push(("rll_very_noisy_deficit".to_string(), text));
    }
    if let Some(a) = alpha {
        let d = fast_transitions_deficit(a);
        out.fast_transitions_deficit = Some(d);
        fields.push(("alpha".to_string(), num(a.value())));
        fields.push(("fast_transitions_deficit".to_string(), num(d)));
    }
    emit(args.format.or(file.format).unwrap_or(Format::Table), &fields, out)
}
