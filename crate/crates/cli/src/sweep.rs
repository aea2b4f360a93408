//! One-parameter sweeps written as CSV.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use hmmeb::bounds::bound_report;
use hmmeb::estimator::estimate_entropy_rate;
use hmmeb::{ChainSpec, Probability};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::Family;
use crate::error::CliError;
use crate::render::format_sig;

pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    Alpha,
    Q,
    Q01,
    Q10,
}

impl Param {
    fn name(self) -> &'static str {
        match self {
            Param::Alpha => "alpha",
            Param::Q => "q",
            Param::Q01 => "q01",
            Param::Q10 => "q10",
        }
    }
}

impl FromStr for Param {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "alpha" => Ok(Param::Alpha),
            "q" => Ok(Param::Q),
            "q01" => Ok(Param::Q01),
            "q10" => Ok(Param::Q10),
            other => Err(CliError::Invalid(format!(
                "sweep: unknown parameter {other:?} (expected alpha, q, q01 or q10)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Column {
    Alpha,
    Q,
    Q01,
    Q10,
    Mgl,
    NewBound,
    NonsymBound,
    RllBound,
    SingleLetterUb,
    Estimate,
    Ci,
}

impl Column {
    const ALL: [Column; 11] = [
        Column::Alpha,
        Column::Q,
        Column::Q01,
        Column::Q10,
        Column::Mgl,
        Column::NewBound,
        Column::NonsymBound,
        Column::RllBound,
        Column::SingleLetterUb,
        Column::Estimate,
        Column::Ci,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Column::Alpha => "alpha",
            Column::Q => "q",
            Column::Q01 => "q01",
            Column::Q10 => "q10",
            Column::Mgl => "mgl",
            Column::NewBound => "new_bound",
            Column::NonsymBound => "nonsym_bound",
            Column::RllBound => "rll_bound",
            Column::SingleLetterUb => "single_letter_ub",
            Column::Estimate => "estimate",
            Column::Ci => "ci",
        }
    }

    fn needs_estimate(self) -> bool {
        matches!(self, Column::Estimate | Column::Ci)
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn parse_columns(list: &str) -> Result<Vec<Column>, CliError> {
    let names: Vec<&str> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if names.is_empty() {
        return Err(CliError::Invalid("sweep: column list is empty".into()));
    }
    names
        .into_iter()
        .map(|name| {
            Column::ALL
                .into_iter()
                .find(|c| c.name() == name)
                .ok_or_else(|| CliError::Invalid(format!("sweep: unknown column {name:?}")))
        })
        .collect()
}

/// A validated sweep. Serialized verbatim as the sidecar configuration.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSpec {
    pub family: Family,
    pub swept: Param,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    /// Values of the parameters that stay fixed.
    pub alpha: Option<f64>,
    pub q: Option<f64>,
    pub q01: Option<f64>,
    pub q10: Option<f64>,
    pub columns: Vec<Column>,
    pub samples: u64,
    pub burnin: u64,
    pub chains: usize,
    pub seed: u64,
    pub significant_digits: usize,
}

impl SweepSpec {
    /// Checks the axis, the parameter/family pairing, the columns, and that
    /// every grid point builds a valid chain.
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err(CliError::Invalid("sweep: start, stop and step must be finite".into()));
        }
        if self.start >= self.stop {
            return Err(CliError::Invalid(format!(
                "sweep: start = {} must be below stop = {}",
                self.start, self.stop
            )));
        }
        if self.step <= 0.0 {
            return Err(CliError::Invalid(format!("sweep: step = {} must be positive", self.step)));
        }
        let param_ok = matches!(
            (self.family, self.swept),
            (_, Param::Alpha)
                | (Family::Symmetric | Family::Rll, Param::Q)
                | (Family::General, Param::Q01 | Param::Q10)
        );
        if !param_ok {
            return Err(CliError::Invalid(format!(
                "sweep: parameter {} does not apply to the {:?} family",
                self.swept.name(),
                self.family
            )));
        }
        for &c in &self.columns {
            let ok = match c {
                Column::Q => self.family != Family::General,
                Column::Q01 | Column::Q10 => self.family == Family::General,
                Column::RllBound => self.family == Family::Rll,
                _ => true,
            };
            if !ok {
                return Err(CliError::Invalid(format!(
                    "sweep: column {c} does not apply to the {:?} family",
                    self.family
                )));
            }
        }
        for i in 0..self.len() {
            self.point(i)?;
        }
        Ok(())
    }

    /// Points `start + i step` for `i = 0, 1, ...` while not beyond `stop`.
    pub fn len(&self) -> usize {
        let span = (self.stop - self.start) / self.step;
        (span + 1e-9).floor() as usize + 1
    }

    pub fn value(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    fn fixed(&self, name: &'static str, v: Option<f64>) -> Result<f64, CliError> {
        v.ok_or_else(|| CliError::Invalid(format!("sweep: --{name} is required")))
    }

    /// Chain and crossover probability at grid index `i`.
    fn point(&self, i: usize) -> Result<(ChainSpec, Probability), CliError> {
        let x = self.value(i);
        let pick = |param: Param, name: &'static str, v: Option<f64>| -> Result<Probability, CliError> {
            let value = if self.swept == param { x } else { self.fixed(name, v)? };
            Ok(Probability::named(name, value)?)
        };
        let alpha = pick(Param::Alpha, "alpha", self.alpha)?;
        let chain = match self.family {
            Family::Symmetric => ChainSpec::symmetric(pick(Param::Q, "q", self.q)?)?,
            Family::Rll => ChainSpec::rll(pick(Param::Q, "q", self.q)?),
            Family::General => ChainSpec::new(
                pick(Param::Q01, "q01", self.q01)?,
                pick(Param::Q10, "q10", self.q10)?,
            )?,
        };
        Ok((chain, alpha))
    }

    fn row(&self, i: usize) -> Result<Vec<f64>, CliError> {
        let (chain, alpha) = self.point(i)?;
        let report = bound_report(&chain, alpha);
        let estimate = if self.columns.iter().any(|c| c.needs_estimate()) {
            Some(estimate_entropy_rate(
                &chain,
                alpha,
                self.samples,
                self.burnin,
                self.chains,
                self.seed.wrapping_add(i as u64),
            )?)
        } else {
            None
        };
        Ok(self
            .columns
            .iter()
            .map(|c| match c {
                Column::Alpha => alpha.value(),
                Column::Q | Column::Q01 => chain.q01(),
                Column::Q10 => chain.q10(),
                Column::Mgl => report.mgl.value(),
                Column::NewBound => report.new_bound.value(),
                Column::NonsymBound => report.nonsym_bound.value(),
                Column::RllBound => report.rll_bound.map_or(f64::NAN, |v| v.value()),
                Column::SingleLetterUb => report.single_letter_ub.value(),
                Column::Estimate => estimate.map_or(f64::NAN, |e| e.estimate.value()),
                Column::Ci => estimate.map_or(f64::NAN, |e| e.ci_halfwidth.value()),
            })
            .collect())
    }

    /// All rows, computed in parallel and returned in grid order.
    pub fn rows(&self) -> Result<Vec<Vec<f64>>, CliError> {
        (0..self.len()).into_par_iter().map(|i| self.row(i)).collect()
    }

    pub fn write_csv<W: Write>(&self, rows: &[Vec<f64>], out: W) -> Result<(), CliError> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        writer.write_record(self.columns.iter().map(|c| c.name()))?;
        for row in rows {
            writer.write_record(row.iter().map(|&v| format_sig(v, self.significant_digits)))?;
        }
        writer.flush()?;
        Ok(())
    }
}
