//! Two-state stationary Markov chains.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::entropy::{h, Probability};
use crate::error::{Error, Result};

/// A stationary binary Markov chain with `P = [[1-q01, q01], [q10, 1-q10]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainSpec {
    q01: f64,
    q10: f64,
    pi0: f64,
    pi1: f64,
}

impl ChainSpec {
    pub fn new(q01: Probability, q10: Probability) -> Result<Self> {
        let (a, b) = (q01.value(), q10.value());
        let total = a + b;
        if total <= 0.0 {
            return Err(Error::DegenerateChain);
        }
        Ok(ChainSpec {
            q01: a,
            q10: b,
            pi0: b / total,
            pi1: a / total,
        })
    }

    /// The symmetric chain `X_n = X_{n-1} ⊕ W_n`, `W_n ~ Ber(q)`.
    pub fn symmetric(q: Probability) -> Result<Self> {
        Self::new(q, q)
    }

    /// The (1,∞)-RLL chain: `q01 = q`, `q10 = 1`, so no two ones are adjacent.
    pub fn rll(q: Probability) -> Self {
        rll_chain(q)
    }

    pub fn q01(&self) -> f64 {
        self.q01
    }

    pub fn q10(&self) -> f64 {
        self.q10
    }

    pub fn pi0(&self) -> f64 {
        self.pi0
    }

    pub fn pi1(&self) -> f64 {
        self.pi1
    }

    pub fn is_symmetric(&self) -> bool {
        self.q01 == self.q10
    }

    pub fn is_rll(&self) -> bool {
        self.q10 == 1.0
    }

    /// Second eigenvalue `1 - q01 - q10` of the transition matrix.
    pub fn eigenvalue(&self) -> f64 {
        1.0 - self.q01 - self.q10
    }

    /// One-step matrix, row-stochastic.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[1.0 - self.q01, self.q01], [self.q10, 1.0 - self.q10]]
    }

    /// `P(X_{n+1} = 1 | X_n = x)`.
    #[inline]
    pub fn prob_one_after(&self, x: u8) -> f64 {
        if x == 0 {
            self.q01
        } else {
            1.0 - self.q10
        }
    }

    /// Entropy rate of the chain itself, `pi0 h(q01) + pi1 h(q10)`.
    pub fn entropy_rate(&self) -> f64 {
        self.pi0 * h(self.q01) + self.pi1 * h(self.q10)
    }
}

/// Entries of `P^k` for one `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KStepProb {
    pub k: u64,
    pub matrix: [[f64; 2]; 2],
}

impl KStepProb {
    pub fn p01(&self) -> f64 {
        self.matrix[0][1]
    }

    pub fn p10(&self) -> f64 {
        self.matrix[1][0]
    }

    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.matrix[from][to]
    }
}

/// `1 - r^k`, through `expm1` when `r` is positive and `r^k` near one.
#[inline]
pub(crate) fn one_minus_power(r: f64, k: u64) -> f64 {
    if r > 0.0 && r < 1.0 {
        -((k as f64) * r.ln()).exp_m1()
    } else if k <= i32::MAX as u64 {
        1.0 - r.powi(k as i32)
    } else {
        1.0 - r.powf(k as f64)
    }
}

/// `q^{*k} = (1 - (1-2q)^k) / 2`, the k-fold binary self-convolution.
pub fn k_step_symmetric(q: Probability, k: u64) -> Result<Probability> {
    if k == 0 {
        return Err(Error::Size {
            what: "k_step_symmetric",
            n: 0,
            min: 1,
            max: usize::MAX,
        });
    }
    Ok(Probability::saturating(
        0.5 * one_minus_power(1.0 - 2.0 * q.value(), k),
    ))
}

/// Stationary distribution `(pi0, pi1)`.
pub fn stationary(chain: &ChainSpec) -> (Probability, Probability) {
    (
        Probability::saturating(chain.pi0),
        Probability::saturating(chain.pi1),
    )
}

/// Raw `((P^k)_{01}, (P^k)_{10})` for `k ≥ 1`.
#[inline]
pub(crate) fn k_step_offdiag(chain: &ChainSpec, k: u64) -> (f64, f64) {
    if k == 1 {
        return (chain.q01, chain.q10);
    }
    let decay = one_minus_power(chain.eigenvalue(), k);
    (chain.pi1 * decay, chain.pi0 * decay)
}

/// `P^k` from the eigen-decomposition with eigenvalues `1` and `1 - q01 - q10`.
pub fn k_step_general(chain: &ChainSpec, k: u64) -> Result<KStepProb> {
    if k == 0 {
        return Err(Error::Size {
            what: "k_step_general",
            n: 0,
            min: 1,
            max: usize::MAX,
        });
    }
    let (p01, p10) = k_step_offdiag(chain, k);
    Ok(KStepProb {
        k,
        matrix: [[1.0 - p01, p01], [p10, 1.0 - p10]],
    })
}

pub fn rll_chain(q: Probability) -> ChainSpec {
    let q = q.value();
    ChainSpec {
        q01: q,
        q10: 1.0,
        pi0: 1.0 / (1.0 + q),
        pi1: q / (1.0 + q),
    }
}

/// Caller-owned sampler state for one pseudorandom stream.
///
/// Streams are ChaCha8 keyed by `seed` with the stream index selecting an
/// independent counter sequence, so parallel estimator chains never overlap.
pub struct PathSampler {
    chain: ChainSpec,
    rng: ChaCha8Rng,
    state: Option<u8>,
}

impl PathSampler {
    pub fn new(chain: ChainSpec, seed: u64, stream: u64) -> Self {
        PathSampler {
            chain,
            rng: stream_rng(seed, stream),
            state: None,
        }
    }

    /// Next state; the first draw comes from the stationary distribution.
    pub fn next_state(&mut self) -> u8 {
        let p_one = match self.state {
            None => self.chain.pi1,
            Some(x) => self.chain.prob_one_after(x),
        };
        let x = u8::from(bernoulli(&mut self.rng, p_one));
        self.state = Some(x);
        x
    }

    /// The underlying generator, for drawing channel noise on the same stream.
    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `true` with probability `p`; exact at `p ∈ {0, 1}`.
#[inline]
pub(crate) fn bernoulli<R: Rng>(rng: &mut R, p: f64) -> bool {
    if p <= 0.0 {
        false
    } else if p >= 1.0 {
        true
    } else {
        rng.random::<f64>() < p
    }
}

/// A stationary sample path `X_1..X_n` on stream 0 of `seed`.
pub fn sample_path(chain: &ChainSpec, n: usize, seed: u64) -> Vec<u8> {
    let mut sampler = PathSampler::new(*chain, seed, 0);
    (0..n).map(|_| sampler.next_state()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::conv;
    use proptest::prelude::*;

    fn p(v: f64) -> Probability {
        Probability::new(v).unwrap()
    }

    fn chain(a: f64, b: f64) -> ChainSpec {
        ChainSpec::new(p(a), p(b)).unwrap()
    }

    fn mat_mul(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    }

    #[test]
    fn symmetric_k_step_values() {
        for &q in &[0.0, 0.07, 0.3, 1.0] {
            assert!((k_step_symmetric(p(q), 1).unwrap().value() - q).abs() < 1e-15);
        }
        for k in 1..20 {
            assert_eq!(k_step_symmetric(Probability::HALF, k).unwrap().value(), 0.5);
        }
        let two = k_step_symmetric(p(0.11), 2).unwrap().value();
        assert!((two - conv(0.11, 0.11)).abs() < 1e-15);
        assert!((two - 0.1958).abs() < 1e-15);
        assert!(k_step_symmetric(p(0.1), 0).is_err());
    }

    #[test]
    fn stationary_values() {
        let (a, b) = stationary(&chain(0.37, 0.37));
        assert_eq!((a.value(), b.value()), (0.5, 0.5));
        let (a, b) = stationary(&rll_chain(p(0.2)));
        assert!((a.value() - 1.0 / 1.2).abs() < 1e-15);
        assert!((b.value() - 0.2 / 1.2).abs() < 1e-15);
        let (a, b) = stationary(&chain(0.3, 0.6));
        assert!((a.value() - 2.0 / 3.0).abs() < 1e-15);
        assert!((b.value() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(
            ChainSpec::new(Probability::ZERO, Probability::ZERO),
            Err(Error::DegenerateChain)
        );
    }

    #[test]
    fn stationary_is_invariant() {
        for &(a, b) in &[(0.3, 0.6), (0.01, 0.99), (1.0, 1.0), (0.2, 1.0), (0.0, 0.4)] {
            let c = chain(a, b);
            assert!((c.pi0() + c.pi1() - 1.0).abs() < 1e-14);
            let m = c.matrix();
            let next0 = c.pi0() * m[0][0] + c.pi1() * m[1][0];
            let next1 = c.pi0() * m[0][1] + c.pi1() * m[1][1];
            assert!((next0 - c.pi0()).abs() < 1e-12);
            assert!((next1 - c.pi1()).abs() < 1e-12);
        }
    }

    #[test]
    fn general_k_step_values() {
        let c = chain(0.3, 0.6);
        assert_eq!(k_step_general(&c, 1).unwrap().matrix, c.matrix());

        let rll = rll_chain(p(0.2));
        let two = k_step_general(&rll, 2).unwrap();
        assert!((two.p01() - 0.16).abs() < 1e-15);
        assert!((two.p10() - 0.8).abs() < 1e-15);
        let squared = mat_mul(rll.matrix(), rll.matrix());
        for i in 0..2 {
            for j in 0..2 {
                assert!((two.get(i, j) - squared[i][j]).abs() < 1e-15);
            }
        }
        // RLL closed forms: (q + (-q)^{k+1})/(1+q) and (1 - (-q)^k)/(1+q).
        for k in 1..30u64 {
            let kp = k_step_general(&rll, k).unwrap();
            let q: f64 = 0.2;
            let want01 = (q + (-q).powi(k as i32 + 1)) / (1.0 + q);
            let want10 = (1.0 - (-q).powi(k as i32)) / (1.0 + q);
            assert!((kp.p01() - want01).abs() < 1e-14);
            assert!((kp.p10() - want10).abs() < 1e-14);
        }

        let sym = chain(0.23, 0.23);
        for k in 1..40 {
            let a = k_step_general(&sym, k).unwrap().p01();
            let b = k_step_symmetric(p(0.23), k).unwrap().value();
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn closed_form_matches_matrix_power_on_grid() {
        let grid = [0.0, 0.05, 0.3, 0.5, 0.77, 1.0];
        for &a in &grid {
            for &b in &grid {
                if a + b == 0.0 {
                    continue;
                }
                let c = chain(a, b);
                let mut power = c.matrix();
                for k in 1..=64u64 {
                    if k > 1 {
                        power = mat_mul(power, c.matrix());
                    }
                    let kp = k_step_general(&c, k).unwrap();
                    for i in 0..2 {
                        assert!((kp.get(i, 0) + kp.get(i, 1) - 1.0).abs() < 1e-12);
                        for j in 0..2 {
                            assert!(
                                (kp.get(i, j) - power[i][j]).abs() < 1e-12,
                                "q01={a} q10={b} k={k}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn ergodic_limit_rate() {
        let c = chain(0.3, 0.45);
        let r = c.eigenvalue().abs();
        for k in 1..40u64 {
            let gap = (k_step_general(&c, k).unwrap().p01() - c.pi1()).abs();
            let want = c.pi1() * r.powi(k as i32);
            assert!((gap - want).abs() < 1e-14);
        }
    }

    #[test]
    fn rll_chain_endpoints() {
        let zero = rll_chain(Probability::ZERO);
        assert_eq!((zero.pi0(), zero.pi1()), (1.0, 0.0));
        let one = rll_chain(Probability::ONE);
        assert_eq!((one.pi0(), one.pi1()), (0.5, 0.5));
        assert!(one.is_symmetric() && one.is_rll());
    }

    #[test]
    fn sampler_constant_chain() {
        // q01 = 0 keeps the chain in state 0 once there; pi = (1, 0).
        let c = chain(0.0, 0.5);
        assert!(sample_path(&c, 1000, 7).iter().all(|&x| x == 0));
    }

    #[test]
    fn sampler_rll_has_no_adjacent_ones() {
        let path = sample_path(&rll_chain(p(0.7)), 100_000, 11);
        assert!(path.windows(2).all(|w| !(w[0] == 1 && w[1] == 1)));
        assert!(path.contains(&1));
    }

    #[test]
    fn sampler_transition_frequency() {
        let q = 0.11;
        let n = 1_000_000;
        let path = sample_path(&chain(q, q), n, 2016);
        let flips = path.windows(2).filter(|w| w[0] != w[1]).count() as f64;
        let m = (n - 1) as f64;
        let sigma = (q * (1.0 - q) / m).sqrt();
        assert!((flips / m - q).abs() < 3.0 * sigma, "{}", flips / m);
    }

    #[test]
    fn sampler_is_deterministic_and_streams_differ() {
        let c = chain(0.3, 0.4);
        assert_eq!(sample_path(&c, 500, 3), sample_path(&c, 500, 3));
        let mut s0 = PathSampler::new(c, 3, 0);
        let mut s1 = PathSampler::new(c, 3, 1);
        let a: Vec<u8> = (0..500).map(|_| s0.next_state()).collect();
        let b: Vec<u8> = (0..500).map(|_| s1.next_state()).collect();
        assert_ne!(a, b);
    }

    proptest! {
        #[test]
        fn chapman_kolmogorov(a in 0.0f64..=1.0, b in 0.01f64..=1.0, j in 1u64..40, k in 1u64..40) {
            let c = chain(a, b);
            let composed = mat_mul(
                k_step_general(&c, j).unwrap().matrix,
                k_step_general(&c, k).unwrap().matrix,
            );
            let direct = k_step_general(&c, j + k).unwrap();
            for r in 0..2 {
                for s in 0..2 {
                    prop_assert!((composed[r][s] - direct.get(r, s)).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn symmetric_equals_iterated_convolution(q in 0.0f64..=1.0, k in 1u64..=32) {
            let mut acc = q;
            for _ in 1..k {
                acc = conv(acc, q);
            }
            prop_assert!((k_step_symmetric(p(q), k).unwrap().value() - acc).abs() < 1e-12);
        }
    }
}
