//! Closed-form lower bounds on the entropy rate of a binary hidden Markov
//! process, and the asymptotic constants that describe them.
//!
//! Every lower bound has the shape `phi(beta)` with `phi` the MGL function
//! for the channel and `beta` the limiting entropy of the input projected on
//! a random subset that keeps each coordinate with probability
//! `lambda = (1 - 2 alpha)^2`. For a symmetric chain `beta = E h(q^{*G})`
//! with `G ~ Geometric(lambda)`; for a general chain it is
//! `pi0 E h(q01^{#G}) + pi1 E h(q10^{#G})`.
//!
//! At `alpha = 1/2` the subset is empty almost surely. All lower bounds
//! return exactly 1 there, the continuous extension and the true value.

use serde::Serialize;

use crate::entropy::{conv, h, phi, EntropyBits, Probability, LOG2_E};
use crate::error::{Error, Result};
use crate::markov::{k_step_offdiag, one_minus_power, ChainSpec};

/// Terms of the Taylor-type series are added until one drops below this.
pub const SERIES_TERM_CUTOFF: f64 = 1e-15;

/// Direct geometric sums stop once the remaining mass `(1-lambda)^g` is below
/// this. Since `h ≤ 1` it bounds the truncation error; the remaining mass is
/// then credited at the limiting term value.
pub const GEOMETRIC_TAIL_CUTOFF: f64 = 1e-14;

const MAX_SERIES_TERMS: u64 = 200_000_000;

/// BSC crossover together with its subset-sampling rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseLevel {
    pub alpha: Probability,
    pub lambda: f64,
}

impl NoiseLevel {
    pub fn new(alpha: Probability) -> Self {
        let d = 1.0 - 2.0 * alpha.value();
        NoiseLevel {
            alpha,
            lambda: d * d,
        }
    }
}

/// How [`beta_symmetric`] evaluates the geometric expectation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaMethod {
    /// `1 - Σ_k log(e)/(2k(2k-1)) · λ t^k / (1 - (1-λ) t^k)`, `t = (1-2q)^2`.
    Series,
    /// `Σ_g λ(1-λ)^{g-1} h(q^{*g})` truncated on the geometric tail.
    Direct,
}

/// All bounds for one `(chain, alpha)` pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub q01: f64,
    pub q10: f64,
    pub alpha: f64,
    pub lambda: f64,
    /// `phi(H̄(X))`, which is `h(alpha * q)` for a symmetric chain.
    pub mgl: EntropyBits,
    pub beta: EntropyBits,
    /// Symmetric-chain bound for symmetric chains, otherwise the general one.
    pub new_bound: EntropyBits,
    pub nonsym_bound: EntropyBits,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<EntropyBits>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rll_bound: Option<EntropyBits>,
    pub single_letter_ub: EntropyBits,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda == 0.0 {
        return Err(Error::InfiniteNoise);
    }
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::domain("lambda", lambda, 0.0, 1.0));
    }
    Ok(())
}

#[inline]
fn taylor_coefficient(k: u64) -> f64 {
    let k = k as f64;
    LOG2_E / (2.0 * k * (2.0 * k - 1.0))
}

/// The MGL bound `h(alpha * q)` for a symmetric chain.
pub fn mgl_bound(q: Probability, alpha: Probability) -> EntropyBits {
    EntropyBits::raw(h(conv(alpha.value(), q.value())))
}

/// The MGL bound `phi(H̄(X))` for any chain.
pub fn mgl_bound_chain(chain: &ChainSpec, alpha: Probability) -> EntropyBits {
    EntropyBits::raw(phi(chain.entropy_rate(), alpha.value()))
}

/// `1 - beta` for a symmetric chain, by the series.
fn beta_series_deficit(q: f64, lambda: f64) -> f64 {
    let d = 1.0 - 2.0 * q;
    let t = d * d;
    let mut power = 1.0;
    let mut deficit = 0.0;
    for k in 1..=MAX_SERIES_TERMS {
        power *= t;
        let term = taylor_coefficient(k) * lambda * power / (1.0 - (1.0 - lambda) * power);
        deficit += term;
        if term < SERIES_TERM_CUTOFF {
            break;
        }
    }
    deficit
}

fn beta_direct_symmetric(q: f64, lambda: f64) -> f64 {
    let r = 1.0 - 2.0 * q;
    let stay = 1.0 - lambda;
    let mut weight = lambda;
    let mut tail = stay;
    let mut sum = 0.0;
    let mut g = 1u64;
    loop {
        sum += weight * h(0.5 * one_minus_power(r, g));
        if tail < GEOMETRIC_TAIL_CUTOFF {
            // Remaining mass at the limit h(1/2) = 1.
            sum += tail;
            break;
        }
        weight *= stay;
        tail *= stay;
        g += 1;
    }
    sum
}

/// `E h(q^{*G})` with `G ~ Geometric(lambda)`.
pub fn beta_symmetric(q: Probability, lambda: f64, method: BetaMethod) -> Result<EntropyBits> {
    check_lambda(lambda)?;
    let q = q.value();
    let d = 1.0 - 2.0 * q;
    if d == 0.0 {
        return Ok(EntropyBits::ONE);
    }
    if d.abs() == 1.0 {
        // q ∈ {0, 1}: every q^{*g} is 0 or 1.
        return Ok(EntropyBits::ZERO);
    }
    let value = match method {
        BetaMethod::Series => 1.0 - beta_series_deficit(q, lambda),
        BetaMethod::Direct => beta_direct_symmetric(q, lambda),
    };
    Ok(EntropyBits::saturating_unit(value))
}

/// The bound `h(alpha * h^{-1}(E h(q^{*G})))` for a symmetric chain.
pub fn samorodnitsky_bound(q: Probability, alpha: Probability) -> EntropyBits {
    let noise = NoiseLevel::new(alpha);
    if noise.lambda == 0.0 {
        return EntropyBits::ONE;
    }
    let beta = beta_symmetric(q, noise.lambda, BetaMethod::Series)
        .expect("lambda in (0, 1] by construction");
    EntropyBits::raw(phi(beta.value(), alpha.value()))
}

/// `pi0 E h(q01^{#G}) + pi1 E h(q10^{#G})` with `G ~ Geometric(lambda)`.
pub fn beta_nonsymmetric(chain: &ChainSpec, lambda: f64) -> Result<EntropyBits> {
    check_lambda(lambda)?;
    let (pi0, pi1) = (chain.pi0(), chain.pi1());
    let stay = 1.0 - lambda;
    let mut weight = lambda;
    let mut tail = stay;
    let mut sum = 0.0;
    let mut g = 1u64;
    loop {
        let (p01, p10) = k_step_offdiag(chain, g);
        sum += weight * (pi0 * h(p01) + pi1 * h(p10));
        if tail < GEOMETRIC_TAIL_CUTOFF {
            // Remaining mass at the ergodic limit pi0 h(pi1) + pi1 h(pi0).
            // A periodic chain has no limit and its terms vanish.
            if chain.eigenvalue() > -1.0 {
                sum += tail * h(pi1);
            }
            break;
        }
        weight *= stay;
        tail *= stay;
        g += 1;
    }
    Ok(EntropyBits::saturating_unit(sum))
}

/// The bound for a general stationary chain.
pub fn nonsymmetric_bound(chain: &ChainSpec, alpha: Probability) -> EntropyBits {
    let noise = NoiseLevel::new(alpha);
    if noise.lambda == 0.0 {
        return EntropyBits::ONE;
    }
    let beta =
        beta_nonsymmetric(chain, noise.lambda).expect("lambda in (0, 1] by construction");
    EntropyBits::raw(phi(beta.value(), alpha.value()))
}

/// `E q^G = λq / (1 - (1-λ)q)`. At `λ = 0` the gap is infinite, giving 0 for
/// `q < 1`; `q = 1` keeps the value 1 it has for every positive `λ`.
fn geometric_pgf(q: f64, lambda: f64) -> f64 {
    if q >= 1.0 {
        return 1.0;
    }
    lambda * q / (1.0 - (1.0 - lambda) * q)
}

/// The closed-form lower bound `gamma` on `beta` for the RLL chain.
pub fn rll_gamma(q: Probability, alpha: Probability) -> EntropyBits {
    let q = q.value();
    let lambda = NoiseLevel::new(alpha).lambda;
    let h_stay = h(1.0 / (1.0 + q));
    let h_odd = h((1.0 - q) / (1.0 + q));
    let coefficient = geometric_pgf(q, lambda) / (1.0 + q);
    EntropyBits::saturating_unit(h_stay - coefficient * (2.0 * h_stay - h_odd))
}

/// `h(alpha * h^{-1}(gamma))` for the RLL chain `q01 = q, q10 = 1`.
pub fn rll_bound(q: Probability, alpha: Probability) -> EntropyBits {
    if NoiseLevel::new(alpha).lambda == 0.0 {
        return EntropyBits::ONE;
    }
    EntropyBits::raw(phi(rll_gamma(q, alpha).value(), alpha.value()))
}

/// `H(Y_n) = h(alpha * pi1)`, an upper bound on the entropy rate.
pub fn single_letter_ub(chain: &ChainSpec, alpha: Probability) -> EntropyBits {
    EntropyBits::raw(h(conv(alpha.value(), chain.pi1())))
}

/// `C(q)` in `H̄(Y) ≥ 1 - C(q) ε^4 + o(ε^4)` for `alpha = 1/2 - ε`.
pub fn very_noisy_constant(q: Probability) -> Result<f64> {
    let d = 1.0 - 2.0 * q.value();
    let t = d * d;
    if t >= 1.0 {
        return Err(Error::Divergent {
            what: "very-noisy constant",
            name: "q",
            value: q.value(),
        });
    }
    let mut power = 1.0;
    let mut sum = 0.0;
    for k in 1..=MAX_SERIES_TERMS {
        power *= t;
        let term = taylor_coefficient(k) * power / (1.0 - power);
        sum += term;
        if term < SERIES_TERM_CUTOFF {
            break;
        }
    }
    Ok(16.0 * sum)
}

/// `2 log(e) (1-2 alpha)^4`, the `ε^2` coefficient of the deficit
/// `1 - H̄(Y)` when `q = 1/2 - ε`.
pub fn fast_transitions_deficit(alpha: Probability) -> f64 {
    let d = 1.0 - 2.0 * alpha.value();
    2.0 * LOG2_E * d.powi(4)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RllDeficit {
    pub coefficient: f64,
    /// False at `q = 1`, which lies outside `0 ≤ q < 1`.
    pub within_stated_range: bool,
}

/// `2 log(e) ((1-q)/(1+q))^2`, the `ε^2` coefficient of `1 - H̄(Y)` for the
/// RLL chain at `alpha = 1/2 - ε`.
pub fn rll_very_noisy_deficit(q: Probability) -> RllDeficit {
    let q = q.value();
    let ratio = (1.0 - q) / (1.0 + q);
    RllDeficit {
        coefficient: 2.0 * LOG2_E * ratio * ratio,
        within_stated_range: q < 1.0,
    }
}

/// Every applicable bound for `(chain, alpha)`.
pub fn bound_report(chain: &ChainSpec, alpha: Probability) -> BoundReport {
    let noise = NoiseLevel::new(alpha);
    let symmetric = chain.is_symmetric();
    let q = Probability::saturating(chain.q01());

    let (mgl, beta, new_bound) = if noise.lambda == 0.0 {
        (EntropyBits::ONE, EntropyBits::ONE, EntropyBits::ONE)
    } else if symmetric {
        let beta = beta_symmetric(q, noise.lambda, BetaMethod::Series)
            .expect("lambda in (0, 1] by construction");
        (
            mgl_bound(q, alpha),
            beta,
            EntropyBits::raw(phi(beta.value(), alpha.value())),
        )
    } else {
        let beta = beta_nonsymmetric(chain, noise.lambda).expect("lambda in (0, 1]");
        (
            mgl_bound_chain(chain, alpha),
            beta,
            EntropyBits::raw(phi(beta.value(), alpha.value())),
        )
    };
    let nonsym_bound = if symmetric {
        nonsymmetric_bound(chain, alpha)
    } else {
        new_bound
    };
    let (gamma, rll) = if chain.is_rll() {
        (Some(rll_gamma(q, alpha)), Some(rll_bound(q, alpha)))
    } else {
        (None, None)
    };
    BoundReport {
        q01: chain.q01(),
        q10: chain.q10(),
        alpha: alpha.value(),
        lambda: noise.lambda,
        mgl,
        beta,
        new_bound,
        nonsym_bound,
        gamma,
        rll_bound: rll,
        single_letter_ub: single_letter_ub(chain, alpha),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::rll_chain;

    fn p(v: f64) -> Probability {
        Probability::new(v).unwrap()
    }

    fn grid() -> impl Iterator<Item = f64> {
        (1..=24).map(|i| 0.02 * i as f64)
    }

    /// Geometric expectation by explicit 2x2 matrix powers, independent of
    /// the eigenvalue closed form.
    fn beta_by_matrix_powers(q01: f64, q10: f64, lambda: f64) -> f64 {
        let m = [[1.0 - q01, q01], [q10, 1.0 - q10]];
        let (pi0, pi1) = (q10 / (q01 + q10), q01 / (q01 + q10));
        let mut power = m;
        let mut weight = lambda;
        let mut sum = 0.0;
        while weight > 1e-20 {
            sum += weight * (pi0 * h(power[0][1]) + pi1 * h(power[1][0]));
            let mut next = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    next[i][j] = power[i][0] * m[0][j] + power[i][1] * m[1][j];
                }
            }
            power = next;
            weight *= 1.0 - lambda;
        }
        sum
    }

    #[test]
    fn mgl_values() {
        for &q in &[0.0, 0.2, 0.45] {
            assert!((mgl_bound(p(q), Probability::ZERO).value() - h(q)).abs() < 1e-15);
        }
        assert_eq!(mgl_bound(Probability::HALF, p(0.3)).value(), 1.0);
        let v = mgl_bound(p(0.11), p(0.11)).value();
        assert!((v - 0.713_448_143_989_396).abs() < 1e-12);
        for &q in &[0.1, 0.35, 0.7] {
            let c = ChainSpec::symmetric(p(q)).unwrap();
            let a = mgl_bound_chain(&c, p(0.13)).value();
            assert!((a - mgl_bound(p(q), p(0.13)).value()).abs() < 1e-10);
        }
    }

    #[test]
    fn beta_symmetric_values() {
        for &lambda in &[0.1, 0.6084, 1.0] {
            for m in [BetaMethod::Series, BetaMethod::Direct] {
                assert_eq!(beta_symmetric(Probability::HALF, lambda, m).unwrap().value(), 1.0);
            }
        }
        for &q in &[0.03, 0.11, 0.4, 0.8] {
            for m in [BetaMethod::Series, BetaMethod::Direct] {
                let v = beta_symmetric(p(q), 1.0, m).unwrap().value();
                assert!((v - h(q)).abs() < 1e-12, "q={q} {m:?}");
            }
        }
        let s = beta_symmetric(p(0.11), 0.6084, BetaMethod::Series).unwrap().value();
        let d = beta_symmetric(p(0.11), 0.6084, BetaMethod::Direct).unwrap().value();
        assert!((s - d).abs() < 1e-10, "{s} vs {d}");
        // 30-digit direct summation at alpha = 0.11.
        assert!((s - 0.606_852_594_628_959_6).abs() < 1e-12);
    }

    #[test]
    fn beta_methods_agree_on_grid() {
        for q in grid() {
            for a in grid() {
                let lambda = NoiseLevel::new(p(a)).lambda;
                let s = beta_symmetric(p(q), lambda, BetaMethod::Series).unwrap().value();
                let d = beta_symmetric(p(q), lambda, BetaMethod::Direct).unwrap().value();
                assert!((s - d).abs() < 1e-10, "q={q} alpha={a}");
            }
        }
    }

    #[test]
    fn beta_rejects_zero_lambda() {
        assert_eq!(
            beta_symmetric(p(0.2), 0.0, BetaMethod::Series),
            Err(Error::InfiniteNoise)
        );
        assert!(matches!(
            beta_symmetric(p(0.2), 1.5, BetaMethod::Direct),
            Err(Error::Domain { .. })
        ));
        let c = rll_chain(p(0.2));
        assert_eq!(beta_nonsymmetric(&c, 0.0), Err(Error::InfiniteNoise));
    }

    #[test]
    fn samorodnitsky_values() {
        for &q in &[0.05, 0.2, 0.4] {
            let v = samorodnitsky_bound(p(q), Probability::ZERO).value();
            assert!((v - h(q)).abs() < 1e-11);
        }
        for &a in &[0.0, 0.2, 0.5] {
            assert!((samorodnitsky_bound(Probability::HALF, p(a)).value() - 1.0).abs() < 1e-15);
        }
        assert_eq!(samorodnitsky_bound(p(0.2), Probability::HALF).value(), 1.0);
        let v = samorodnitsky_bound(p(0.11), p(0.11)).value();
        assert!(v >= mgl_bound(p(0.11), p(0.11)).value());
        assert!((v - 0.771_099_525_558_433_2).abs() < 1e-11, "{v}");
    }

    #[test]
    fn nonsymmetric_values() {
        for &q in &[0.07, 0.25, 0.44] {
            let c = ChainSpec::symmetric(p(q)).unwrap();
            for &lambda in &[0.3, 0.6084, 1.0] {
                let a = beta_nonsymmetric(&c, lambda).unwrap().value();
                let b = beta_symmetric(p(q), lambda, BetaMethod::Series).unwrap().value();
                assert!((a - b).abs() < 1e-12);
            }
        }
        let periodic = ChainSpec::symmetric(Probability::ONE).unwrap();
        assert_eq!(beta_nonsymmetric(&periodic, 0.4).unwrap().value(), 0.0);
        for &a in &[0.1, 0.2, 0.3] {
            let v = nonsymmetric_bound(&periodic, p(a)).value();
            assert!((v - h(a)).abs() < 1e-12);
        }

        let rll = rll_chain(p(0.2));
        let v = beta_nonsymmetric(&rll, 0.5).unwrap().value();
        let oracle = beta_by_matrix_powers(0.2, 1.0, 0.5);
        assert!((v - oracle).abs() < 1e-12);
        assert!((v - 0.625_531_200_740_295).abs() < 1e-12);
        assert!(nonsymmetric_bound(&rll, p(0.3)).value() >= rll_bound(p(0.2), p(0.3)).value());
    }

    #[test]
    fn nonsymmetric_matches_matrix_power_oracle() {
        for &(a, b) in &[(0.3, 0.6), (0.05, 0.9), (0.8, 0.15), (0.5, 1.0)] {
            let c = ChainSpec::new(p(a), p(b)).unwrap();
            for &lambda in &[0.2, 0.5, 0.9] {
                let v = beta_nonsymmetric(&c, lambda).unwrap().value();
                assert!((v - beta_by_matrix_powers(a, b, lambda)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gamma_values() {
        assert_eq!(rll_gamma(Probability::ZERO, p(0.3)).value(), 0.0);
        for &a in &[0.0, 0.1, 0.3, 0.45, 0.5] {
            assert!(rll_gamma(Probability::ONE, p(a)).value().abs() < 1e-15, "alpha={a}");
        }
        let q: f64 = 0.2;
        let want = h(1.0 / 1.2) - (q / 1.2) * (2.0 * h(1.0 / 1.2) - h(0.8 / 1.2));
        let got = rll_gamma(p(q), Probability::ZERO).value();
        assert!((got - want).abs() < 1e-15);
        assert!((got - 0.586_397_586_774_651).abs() < 1e-12);
    }

    #[test]
    fn rll_bound_values() {
        for &a in &[0.05, 0.3, 0.45] {
            assert!((rll_bound(Probability::ONE, p(a)).value() - h(a)).abs() < 1e-12);
            assert!((rll_bound(Probability::ZERO, p(a)).value() - h(a)).abs() < 1e-12);
        }
        let c = rll_chain(p(0.2));
        let r = rll_bound(p(0.2), p(0.3)).value();
        assert!(r <= nonsymmetric_bound(&c, p(0.3)).value() + 1e-12);
        assert!(r <= single_letter_ub(&c, p(0.3)).value() + 1e-12);
    }

    #[test]
    fn single_letter_values() {
        let c = ChainSpec::symmetric(p(0.3)).unwrap();
        assert_eq!(single_letter_ub(&c, p(0.1)).value(), 1.0);
        let rll = rll_chain(p(0.2));
        let v = single_letter_ub(&rll, Probability::ZERO).value();
        assert!((v - 0.650_022_421_648_354_2).abs() < 1e-12);
        assert_eq!(single_letter_ub(&rll, Probability::HALF).value(), 1.0);
    }

    #[test]
    fn asymptotic_constants() {
        assert_eq!(very_noisy_constant(Probability::HALF).unwrap(), 0.0);
        let c = very_noisy_constant(p(0.25)).unwrap();
        assert!((c - 3.989_559_077_781_571).abs() < 1e-12, "{c}");
        for &q in &[0.1, 0.3, 0.45] {
            let a = very_noisy_constant(p(q)).unwrap();
            let b = very_noisy_constant(p(1.0 - q)).unwrap();
            assert!((a - b).abs() < 1e-9 * a.max(1.0));
        }
        assert!(matches!(very_noisy_constant(Probability::ZERO), Err(Error::Divergent { .. })));
        assert!(matches!(very_noisy_constant(Probability::ONE), Err(Error::Divergent { .. })));

        assert_eq!(fast_transitions_deficit(Probability::HALF), 0.0);
        assert!((fast_transitions_deficit(Probability::ZERO) - 2.0 * LOG2_E).abs() < 1e-15);
        assert!((fast_transitions_deficit(p(0.11)) - 1.068_028_754_588_545).abs() < 1e-12);

        let d = rll_very_noisy_deficit(Probability::ZERO);
        assert!((d.coefficient - 2.0 * LOG2_E).abs() < 1e-15 && d.within_stated_range);
        let d = rll_very_noisy_deficit(p(0.2));
        assert!((d.coefficient - 1.282_395_591_901_301).abs() < 1e-12);
        let d = rll_very_noisy_deficit(Probability::ONE);
        assert_eq!(d.coefficient, 0.0);
        assert!(!d.within_stated_range);
    }

    #[test]
    fn dominance_and_sandwich_on_grid() {
        for q in grid() {
            for a in grid() {
                let new = samorodnitsky_bound(p(q), p(a)).value();
                assert!(new >= mgl_bound(p(q), p(a)).value() - 1e-12, "q={q} a={a}");
                assert!(new <= 1.0 + 1e-12);
                let c = ChainSpec::symmetric(p(q)).unwrap();
                let ns = nonsymmetric_bound(&c, p(a)).value();
                assert!((ns - new).abs() < 1e-12, "q={q} a={a}");
            }
        }
    }

    #[test]
    fn monotone_on_grid() {
        let mut prev_row: Option<Vec<f64>> = None;
        for a in grid() {
            let row: Vec<f64> = grid().map(|q| samorodnitsky_bound(p(q), p(a)).value()).collect();
            for w in row.windows(2) {
                assert!(w[1] >= w[0] - 1e-12);
            }
            if let Some(prev) = &prev_row {
                for (x, y) in prev.iter().zip(&row) {
                    assert!(y >= &(x - 1e-12));
                }
            }
            prev_row = Some(row);
        }
    }

    #[test]
    fn rll_orderings_on_grid() {
        for qi in 1..=19 {
            let q = 0.05 * qi as f64;
            let c = rll_chain(p(q));
            for ai in 1..=9 {
                let a = 0.05 * ai as f64;
                let lambda = NoiseLevel::new(p(a)).lambda;
                let gamma = rll_gamma(p(q), p(a)).value();
                let beta = beta_nonsymmetric(&c, lambda).unwrap().value();
                assert!(gamma <= beta + 1e-12, "q={q} a={a}");
                let ub = single_letter_ub(&c, p(a)).value();
                let rb = rll_bound(p(q), p(a)).value();
                let nb = nonsymmetric_bound(&c, p(a)).value();
                assert!(rb <= nb + 1e-12);
                assert!(rb <= ub + 1e-12 && nb <= ub + 1e-12);
                assert!(mgl_bound_chain(&c, p(a)).value() <= ub + 1e-12);
            }
        }
    }

    #[test]
    fn very_noisy_ratio_converges() {
        for &q in &[0.15, 0.25, 0.35] {
            let c = very_noisy_constant(p(q)).unwrap();
            let mut errors = Vec::new();
            for &eps in &[0.05, 0.02, 0.01] {
                let deficit = 1.0 - samorodnitsky_bound(p(q), p(0.5 - eps)).value();
                errors.push((deficit / eps.powi(4) - c).abs() / c);
            }
            assert!(errors[2] < 0.03, "q={q} {errors:?}");
            assert!(errors[2] <= errors[0]);
        }
    }

    #[test]
    fn fast_transitions_ratio_converges() {
        for &a in &[0.11, 0.25] {
            let c = fast_transitions_deficit(p(a));
            let mut errors = Vec::new();
            for &eps in &[0.05, 0.02, 0.01] {
                let deficit = 1.0 - samorodnitsky_bound(p(0.5 - eps), p(a)).value();
                errors.push((deficit / (eps * eps) - c).abs() / c);
            }
            assert!(errors[2] < 0.03, "alpha={a} {errors:?}");
            assert!(errors[2] <= errors[0]);
        }
    }

    #[test]
    fn report_fields() {
        let c = ChainSpec::symmetric(p(0.11)).unwrap();
        let r = bound_report(&c, p(0.11));
        assert!(r.mgl.value() <= r.new_bound.value() + 1e-12);
        assert!(r.gamma.is_none() && r.rll_bound.is_none());
        assert_eq!(r.single_letter_ub.value(), 1.0);

        let r = bound_report(&rll_chain(p(1.0)), p(0.3));
        assert!((r.rll_bound.unwrap().value() - h(0.3)).abs() < 1e-12);

        let r = bound_report(&ChainSpec::symmetric(p(0.5)).unwrap(), p(0.2));
        for v in [r.mgl, r.new_bound, r.nonsym_bound, r.single_letter_ub] {
            assert!((v.value() - 1.0).abs() < 1e-15);
        }

        let r = bound_report(&rll_chain(p(0.3)), Probability::HALF);
        assert_eq!(r.new_bound.value(), 1.0);
        assert_eq!(r.rll_bound.unwrap().value(), 1.0);
    }
}
