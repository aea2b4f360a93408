//! Desk-scale invariant suites with machine-readable reports.
//!
//! Every check is expressed as `slack + tolerance ≥ 0`: one-sided checks use
//! `slack = value - reference`, agreement checks `slack = -|value - reference|`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::bounds::{
    beta_symmetric, fast_transitions_deficit, mgl_bound, samorodnitsky_bound,
    very_noisy_constant, BetaMethod,
};
use crate::entropy::Probability;
use crate::error::Result;
use crate::markov::ChainSpec;
use crate::oracle::{
    exact_output_entropy, mgl_finite_slack, projected_entropy_finite, verify_prop1,
    OutputMethod, ProjectionMethod,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Prop1,
    Prop2,
    Dominance,
    Asymptotics,
    Oracles,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Prop1,
        Suite::Prop2,
        Suite::Dominance,
        Suite::Asymptotics,
        Suite::Oracles,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Prop1 => "prop1",
            Suite::Prop2 => "prop2",
            Suite::Dominance => "dominance",
            Suite::Asymptotics => "asymptotics",
            Suite::Oracles => "oracles",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub reference: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// `value ≥ reference - tolerance`.
    pub fn at_least(name: impl Into<String>, value: f64, reference: f64, tolerance: f64) -> Self {
        let slack = value - reference;
        Check {
            name: name.into(),
            value,
            reference,
            slack,
            tolerance,
            pass: slack + tolerance >= 0.0,
        }
    }

    /// `|value - reference| ≤ tolerance`.
    pub fn close(name: impl Into<String>, value: f64, reference: f64, tolerance: f64) -> Self {
        let slack = -(value - reference).abs();
        Check {
            name: name.into(),
            value,
            reference,
            slack,
            tolerance,
            pass: slack + tolerance >= 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(suite: Suite, checks: Vec<Check>) -> Self {
        SuiteReport {
            suite: suite.name().to_string(),
            pass: checks.iter().all(|c| c.pass),
            checks,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

fn p(v: f64) -> Probability {
    Probability::saturating(v)
}

/// `{0.02, 0.04, ..., 0.48}`.
pub fn default_grid() -> Vec<f64> {
    (1..=24).map(|i| 0.02 * i as f64).collect()
}

/// Nine-point subgrid of [`default_grid`] used by the finite-n suites.
pub fn coarse_grid() -> Vec<(f64, f64)> {
    let axis = [0.06, 0.24, 0.42];
    axis.iter()
        .flat_map(|&q| axis.iter().map(move |&a| (q, a)))
        .collect()
}

pub fn run_suite(suite: Suite) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::Dominance => dominance()?,
        Suite::Prop1 => prop1()?,
        Suite::Prop2 => prop2()?,
        Suite::Asymptotics => asymptotics()?,
        Suite::Oracles => oracles()?,
    };
    Ok(SuiteReport::new(suite, checks))
}

fn dominance() -> Result<Vec<Check>> {
    let grid = default_grid();
    let mut checks = Vec::with_capacity(grid.len() * grid.len());
    for &q in &grid {
        for &a in &grid {
            checks.push(Check::at_least(
                format!("new_bound>=mgl q={q:.2} alpha={a:.2}"),
                samorodnitsky_bound(p(q), p(a)).value(),
                mgl_bound(p(q), p(a)).value(),
                1e-12,
            ));
        }
    }
    Ok(checks)
}

fn prop1() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (q, a) in coarse_grid() {
        let chain = ChainSpec::symmetric(p(q))?;
        for n in [4, 8, 12, 16] {
            let r = verify_prop1(&chain, p(a), n)?;
            checks.push(Check::at_least(
                format!("prop1 q={q:.2} alpha={a:.2} n={n}"),
                r.output_entropy,
                r.rhs,
                1e-9,
            ));
            let slack = mgl_finite_slack(&chain, p(a), n)?;
            checks.push(Check::at_least(
                format!("mgl q={q:.2} alpha={a:.2} n={n}"),
                slack,
                0.0,
                1e-9,
            ));
        }
    }
    Ok(checks)
}

fn prop2() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for q in [0.11, 0.3] {
        let chain = ChainSpec::symmetric(p(q))?;
        for lambda in [0.25, 0.6084] {
            let beta = beta_symmetric(p(q), lambda, BetaMethod::Series)?.value();
            let mut gaps = Vec::new();
            for n in [10, 100, 1000] {
                let r = projected_entropy_finite(&chain, lambda, n, ProjectionMethod::Closed)?;
                gaps.push((r.normalized.value() - beta).abs());
                if n == 1000 {
                    checks.push(Check::close(
                        format!("prop2 q={q} lambda={lambda} n=1000"),
                        r.normalized.value(),
                        beta,
                        1e-2,
                    ));
                }
            }
            for (w, label) in gaps.windows(2).zip(["10->100", "100->1000"]) {
                checks.push(Check::at_least(
                    format!("prop2 gap nonincreasing q={q} lambda={lambda} {label}"),
                    w[0],
                    w[1],
                    0.0,
                ));
            }
        }
    }
    Ok(checks)
}

fn asymptotics() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for q in [0.15, 0.25, 0.35] {
        let constant = very_noisy_constant(p(q))?;
        for eps in [0.05, 0.02, 0.01] {
            let ratio = (1.0 - samorodnitsky_bound(p(q), p(0.5 - eps)).value()) / eps.powi(4);
            if eps == 0.01 {
                checks.push(Check::close(
                    format!("very-noisy ratio q={q} eps={eps}"),
                    ratio / constant,
                    1.0,
                    0.03,
                ));
            }
        }
    }
    for a in [0.11, 0.25] {
        let constant = fast_transitions_deficit(p(a));
        let eps: f64 = 0.01;
        let ratio = (1.0 - samorodnitsky_bound(p(0.5 - eps), p(a)).value()) / (eps * eps);
        checks.push(Check::close(
            format!("fast-transitions ratio alpha={a} eps={eps}"),
            ratio / constant,
            1.0,
            0.03,
        ));
    }
    Ok(checks)
}

fn oracles() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for q01 in [0.1, 0.35, 0.8] {
        for q10 in [0.2, 0.5, 0.9] {
            let chain = ChainSpec::new(p(q01), p(q10))?;
            for a in [0.05, 0.2, 0.4] {
                for n in 1..=10 {
                    let f = exact_output_entropy(&chain, p(a), n, OutputMethod::Forward)?;
                    let b = exact_output_entropy(&chain, p(a), n, OutputMethod::Brute)?;
                    checks.push(Check::close(
                        format!("forward=brute q01={q01} q10={q10} alpha={a} n={n}"),
                        f.value(),
                        b.value(),
                        1e-10,
                    ));
                }
            }
        }
    }
    for (q01, q10) in [(0.11, 0.11), (0.3, 0.6), (0.2, 1.0)] {
        let chain = ChainSpec::new(p(q01), p(q10))?;
        for lambda in [0.25, 0.6084] {
            for n in [1, 4, 8, 12] {
                let c = projected_entropy_finite(&chain, lambda, n, ProjectionMethod::Closed)?;
                let b = projected_entropy_finite(&chain, lambda, n, ProjectionMethod::Brute)?;
                checks.push(Check::close(
                    format!("closed=brute q01={q01} q10={q10} lambda={lambda} n={n}"),
                    c.normalized.value(),
                    b.normalized.value(),
                    1e-10,
                ));
            }
        }
    }
    Ok(checks)
}
