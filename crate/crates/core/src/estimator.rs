//! Monte Carlo estimation of the entropy rate `H̄(Y)`.
//!
//! Each chain simulates `(X_t, Y_t)` and runs the belief recursion
//! `b_t = P(X_t = 1 | Y^t)`, accumulating the log-loss `-log P(Y_{t+1} | Y^t)`
//! after burn-in. Independent chains use separate ChaCha streams of one seed.

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::entropy::{EntropyBits, Probability};
use crate::error::{Error, Result};
use crate::markov::{bernoulli, ChainSpec, PathSampler};

pub const MIN_SAMPLES: u64 = 10_000;
pub const MIN_BURNIN: u64 = 100;
/// Chain count from which the interval uses chain means instead of batch means.
pub const CHAIN_MEANS_THRESHOLD: usize = 8;
pub const BATCHES_PER_CHAIN: usize = 32;

const PROB_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMethod {
    Simulation,
    /// Noiseless or fully inverting channel: the Markov chain's own rate.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateResult {
    pub estimate: EntropyBits,
    /// Half-width of the 95% confidence interval. Zero for the exact route
    /// and whenever the log-loss is constant.
    pub ci_halfwidth: EntropyBits,
    /// Post-burn-in symbols per chain.
    pub samples: u64,
    pub burnin: u64,
    pub chains: usize,
    pub seed: u64,
    pub method: EstimateMethod,
}

/// Two-state forward filter in probability space.
#[derive(Debug, Clone, Copy)]
pub struct BeliefFilter {
    chain: ChainSpec,
    alpha: f64,
    /// `P(X_{t+1} = 1 | Y^t)`
    prior_one: f64,
}

impl BeliefFilter {
    /// Starts from the stationary law of `X_1`.
    pub fn new(chain: ChainSpec, alpha: Probability) -> Self {
        BeliefFilter {
            chain,
            alpha: alpha.value(),
            prior_one: chain.pi1(),
        }
    }

    /// `P(Y_{t+1} = 1 | Y^t)`.
    pub fn predictive_one(&self) -> f64 {
        self.prior_one * (1.0 - self.alpha) + (1.0 - self.prior_one) * self.alpha
    }

    /// Consumes `y`, returning `P(Y_{t+1} = y | Y^t)` clamped away from zero.
    pub fn observe(&mut self, y: u8) -> f64 {
        let p1 = self.predictive_one();
        let (py, emit_one) = if y == 1 {
            (p1, 1.0 - self.alpha)
        } else {
            (1.0 - p1, self.alpha)
        };
        let py = py.clamp(PROB_FLOOR, 1.0);
        let belief = (self.prior_one * emit_one / py).clamp(0.0, 1.0);
        self.prior_one = belief * (1.0 - self.chain.q10()) + (1.0 - belief) * self.chain.q01();
        py
    }
}

struct ChainRun {
    sum: f64,
    batch_means: Vec<f64>,
}

fn run_chain(
    chain: &ChainSpec,
    alpha: Probability,
    samples: u64,
    burnin: u64,
    seed: u64,
    stream: u64,
) -> ChainRun {
    let mut sampler = PathSampler::new(*chain, seed, stream);
    let mut filter = BeliefFilter::new(*chain, alpha);
    let a = alpha.value();
    let mut step = |sampler: &mut PathSampler| {
        let x = sampler.next_state();
        let flip = u8::from(bernoulli(sampler.rng(), a));
        -filter.observe(x ^ flip).log2()
    };
    for _ in 0..burnin {
        step(&mut sampler);
    }
    let batches = BATCHES_PER_CHAIN as u64;
    let mut batch_means = Vec::with_capacity(BATCHES_PER_CHAIN);
    let mut sum = 0.0;
    for b in 0..batches {
        let start = b * samples / batches;
        let end = (b + 1) * samples / batches;
        let mut batch = 0.0;
        for _ in start..end {
            batch += step(&mut sampler);
        }
        sum += batch;
        batch_means.push(batch / (end - start) as f64);
    }
    ChainRun { sum, batch_means }
}

/// Sample mean and 95% t half-width of `values`.
fn t_interval(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0);
    let t = StudentsT::new(0.0, 1.0, m - 1.0)
        .expect("at least two values")
        .inverse_cdf(0.975);
    (mean, t * (var / m).sqrt())
}

/// Monte Carlo estimate of `H̄(Y)` with a 95% confidence interval.
///
/// `samples` counts post-burn-in symbols per chain. With at least
/// [`CHAIN_MEANS_THRESHOLD`] chains the interval is Student-t over chain
/// means; otherwise it pools [`BATCHES_PER_CHAIN`] batch means per chain.
pub fn estimate_entropy_rate(
    chain: &ChainSpec,
    alpha: Probability,
    samples: u64,
    burnin: u64,
    chains: usize,
    seed: u64,
) -> Result<EstimateResult> {
    if samples < MIN_SAMPLES {
        return Err(Error::Config(format!("samples = {samples} must be at least {MIN_SAMPLES}")));
    }
    if burnin < MIN_BURNIN {
        return Err(Error::Config(format!("burnin = {burnin} must be at least {MIN_BURNIN}")));
    }
    if chains == 0 {
        return Err(Error::Config("chains must be at least 1".into()));
    }
    let base = EstimateResult {
        estimate: EntropyBits::ZERO,
        ci_halfwidth: EntropyBits::ZERO,
        samples,
        burnin,
        chains,
        seed,
        method: EstimateMethod::Simulation,
    };
    let a = alpha.value();
    if a == 0.0 || a == 1.0 {
        return Ok(EstimateResult {
            estimate: EntropyBits::raw(chain.entropy_rate()),
            method: EstimateMethod::Exact,
            ..base
        });
    }

    let runs: Vec<ChainRun> = (0..chains as u64)
        .into_par_iter()
        .map(|c| run_chain(chain, alpha, samples, burnin, seed, c))
        .collect();

    let total = samples as f64 * chains as f64;
    let estimate = runs.iter().map(|r| r.sum).sum::<f64>() / total;
    let spread = if chains >= CHAIN_MEANS_THRESHOLD {
        let means: Vec<f64> = runs.iter().map(|r| r.sum / samples as f64).collect();
        t_interval(&means).1
    } else {
        let batches: Vec<f64> = runs.iter().flat_map(|r| r.batch_means.iter().copied()).collect();
        t_interval(&batches).1
    };
    Ok(EstimateResult {
        estimate: EntropyBits::saturating_unit(estimate),
        ci_halfwidth: EntropyBits::raw(spread.max(0.0)),
        ..base
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::h;
    use crate::markov::rll_chain;
    use crate::oracle::{sandwich_bounds, sequence_probability};

    fn p(v: f64) -> Probability {
        Probability::new(v).unwrap()
    }

    fn chain(a: f64, b: f64) -> ChainSpec {
        ChainSpec::new(p(a), p(b)).unwrap()
    }

    #[test]
    fn exact_route_for_noiseless_channel() {
        let r = estimate_entropy_rate(&chain(0.11, 0.11), Probability::ZERO, 10_000, 100, 1, 5)
            .unwrap();
        assert_eq!(r.method, EstimateMethod::Exact);
        assert!((r.estimate.value() - h(0.11)).abs() < 1e-15);
        assert_eq!(r.ci_halfwidth.value(), 0.0);
    }

    #[test]
    fn uniform_input_gives_one_bit() {
        let r = estimate_entropy_rate(&chain(0.5, 0.5), p(0.2), 20_000, 100, 2, 9).unwrap();
        assert!((r.estimate.value() - 1.0).abs() <= r.ci_halfwidth.value() + 1e-12);
    }

    #[test]
    fn noiseless_simulation_matches_chain_rate() {
        // Tiny alpha keeps the simulation path while the answer stays near h(q).
        let r = estimate_entropy_rate(&chain(0.2, 0.2), p(1e-9), 200_000, 200, 4, 1).unwrap();
        assert_eq!(r.method, EstimateMethod::Simulation);
        assert!((r.estimate.value() - h(0.2)).abs() < 3.0 * r.ci_halfwidth.value() + 1e-6);
    }

    #[test]
    fn preconditions() {
        let c = chain(0.1, 0.2);
        assert!(matches!(
            estimate_entropy_rate(&c, p(0.1), 9_999, 100, 1, 0),
            Err(Error::Config(_))
        ));
        assert!(estimate_entropy_rate(&c, p(0.1), 10_000, 99, 1, 0).is_err());
        assert!(estimate_entropy_rate(&c, p(0.1), 10_000, 100, 0, 0).is_err());
    }

    #[test]
    fn seed_determinism() {
        let c = rll_chain(p(0.3));
        let a = estimate_entropy_rate(&c, p(0.15), 50_000, 500, 3, 42).unwrap();
        let b = estimate_entropy_rate(&c, p(0.15), 50_000, 500, 3, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.estimate.value().to_bits(), b.estimate.value().to_bits());
        let other = estimate_entropy_rate(&c, p(0.15), 50_000, 500, 3, 43).unwrap();
        assert_ne!(a.estimate, other.estimate);
    }

    #[test]
    fn belief_product_matches_forward_probability() {
        let c = chain(0.3, 0.55);
        let alpha = p(0.17);
        let mut rng_state = 0x9e37_79b9_7f4a_7c15_u64;
        for n in [1usize, 5, 12, 20] {
            for _ in 0..5 {
                let ys: Vec<u8> = (0..n)
                    .map(|_| {
                        rng_state ^= rng_state << 13;
                        rng_state ^= rng_state >> 7;
                        rng_state ^= rng_state << 17;
                        (rng_state & 1) as u8
                    })
                    .collect();
                let mut filter = BeliefFilter::new(c, alpha);
                let product: f64 = ys.iter().map(|&y| filter.observe(y)).product();
                let oracle = sequence_probability(&c, alpha, &ys);
                assert!(((product - oracle) / oracle).abs() < 1e-10, "n={n}");
            }
        }
    }

    #[test]
    fn estimate_inside_sandwich() {
        let c = chain(0.11, 0.11);
        let alpha = p(0.11);
        let r = estimate_entropy_rate(&c, alpha, 400_000, 1_000, 8, 2016).unwrap();
        let s = sandwich_bounds(&c, alpha, 18).unwrap();
        let ci = r.ci_halfwidth.value();
        assert!(r.estimate.value() >= s.lower.value() - 3.0 * ci);
        assert!(r.estimate.value() <= s.upper.value() + 3.0 * ci);
    }

    #[test]
    fn interval_shrinks_with_samples() {
        let c = chain(0.2, 0.35);
        let alpha = p(0.1);
        let small = estimate_entropy_rate(&c, alpha, 200_000, 1_000, 4, 77).unwrap();
        let large = estimate_entropy_rate(&c, alpha, 400_000, 1_000, 4, 77).unwrap();
        let ratio = large.ci_halfwidth.value() / small.ci_halfwidth.value();
        let expected = std::f64::consts::FRAC_1_SQRT_2;
        assert!((ratio / expected - 1.0).abs() < 0.25, "ratio {ratio}");
    }
}
