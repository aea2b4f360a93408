//! Exact small-n ground truth.
//!
//! `H(Y^n)` is computed two ways: a forward recursion that walks the tree of
//! output prefixes, and a full enumeration over input/output sequence pairs.
//! The subset-projected input entropy `H(X_S|S)` also has two routes, the
//! gap-count closed form and a sum over all `2^n` subsets with each
//! `H(X_S)` obtained by marginalizing the full joint law of `X^n`.

use rayon::prelude::*;
use serde::Serialize;

use crate::entropy::{h, phi, EntropyBits, Probability, LOG2_E};
use crate::error::{Error, Result};
use crate::markov::{k_step_offdiag, ChainSpec};

pub const FORWARD_MAX_N: usize = 24;
pub const BRUTE_MAX_N: usize = 12;
pub const SANDWICH_MAX_N: usize = 20;
pub const PROJECTION_BRUTE_MAX_N: usize = 14;
pub const PROP1_MAX_N: usize = 20;

/// Levels of the prefix tree expanded serially before the subtrees are
/// handed to the thread pool.
const SPLIT_DEPTH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputMethod {
    Forward,
    Brute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionMethod {
    Closed,
    Brute,
}

/// `H(Y^n)` and the conditional-entropy sandwich at length `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactEntropyResult {
    pub n: usize,
    pub joint_entropy: EntropyBits,
    /// `H(Y_n | Y^{n-1})`
    pub upper: EntropyBits,
    /// `H(Y_n | Y^{n-1}, X_1)`
    pub lower: EntropyBits,
}

impl ExactEntropyResult {
    pub fn gap(&self) -> f64 {
        self.upper.value() - self.lower.value()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectedEntropyResult {
    pub n: usize,
    pub lambda: f64,
    /// `H(X_S|S) / (lambda n)`
    pub normalized: EntropyBits,
}

/// Both sides of the strengthened MGL inequality at finite `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prop1Check {
    pub n: usize,
    pub output_entropy: f64,
    pub projected: f64,
    /// `n phi(H(X_S|S)/(lambda n))`
    pub rhs: f64,
    /// `H(Y^n) - rhs`, nonnegative when the inequality holds.
    pub slack: f64,
}

/// Per-level conditional entropies of the output process.
#[derive(Debug, Clone, PartialEq)]
struct Profile {
    /// `cond[k] = H(Y_{k+1} | Y^k)` in bits.
    cond: Vec<f64>,
    /// `-Σ P(y^n) log P(y^n)` accumulated at the leaves.
    joint: f64,
}

impl Profile {
    fn zeros(n: usize) -> Self {
        Profile {
            cond: vec![0.0; n],
            joint: 0.0,
        }
    }

    fn absorb(&mut self, other: &Profile) {
        for (a, b) in self.cond.iter_mut().zip(&other.cond) {
            *a += b;
        }
        self.joint += other.joint;
    }
}

/// A node of the output-prefix tree: the normalized predictive law of the
/// next hidden state and the log-probability (nats) of the prefix.
#[derive(Debug, Clone, Copy)]
struct Node {
    prior_one: f64,
    log_prob: f64,
}

struct ForwardKernel {
    chain: ChainSpec,
    alpha: f64,
    n: usize,
}

impl ForwardKernel {
    /// `P(Y = 1)` given `P(X = 1) = prior_one`.
    #[inline]
    fn predictive_one(&self, prior_one: f64) -> f64 {
        prior_one * (1.0 - self.alpha) + (1.0 - prior_one) * self.alpha
    }

    /// Children of a node as `(y, p(y | prefix), child)` with zero-probability
    /// branches dropped.
    #[inline]
    fn children(&self, node: Node) -> [Option<Node>; 2] {
        let p1 = self.predictive_one(node.prior_one);
        let mut out = [None, None];
        for (y, slot) in out.iter_mut().enumerate() {
            let py = if y == 1 { p1 } else { 1.0 - p1 };
            if py <= 0.0 {
                continue;
            }
            let emit_one = if y == 1 { 1.0 - self.alpha } else { self.alpha };
            let post_one = node.prior_one * emit_one / py;
            let next_one = post_one * (1.0 - self.chain.q10()) + (1.0 - post_one) * self.chain.q01();
            *slot = Some(Node {
                prior_one: next_one.clamp(0.0, 1.0),
                log_prob: node.log_prob + py.ln(),
            });
        }
        out
    }

    /// Contribution of `node` at `depth` to the level's conditional entropy.
    #[inline]
    fn visit(&self, node: Node, depth: usize, acc: &mut Profile) {
        let prob = node.log_prob.exp();
        if depth == self.n {
            acc.joint -= prob * node.log_prob * LOG2_E;
            return;
        }
        acc.cond[depth] += prob * h(self.predictive_one(node.prior_one));
    }

    fn descend(&self, node: Node, depth: usize, acc: &mut Profile) {
        self.visit(node, depth, acc);
        if depth == self.n {
            return;
        }
        for child in self.children(node).into_iter().flatten() {
            self.descend(child, depth + 1, acc);
        }
    }

    fn run(&self, initial_one: f64) -> Profile {
        let mut total = Profile::zeros(self.n);
        let split = SPLIT_DEPTH.min(self.n);
        let mut frontier = vec![Node {
            prior_one: initial_one,
            log_prob: 0.0,
        }];
        for depth in 0..split {
            let mut next = Vec::with_capacity(frontier.len() * 2);
            for &node in &frontier {
                self.visit(node, depth, &mut total);
                next.extend(self.children(node).into_iter().flatten());
            }
            frontier = next;
        }
        let parts: Vec<Profile> = frontier
            .par_iter()
            .map(|&node| {
                let mut acc = Profile::zeros(self.n);
                self.descend(node, split, &mut acc);
                acc
            })
            .collect();
        for part in &parts {
            total.absorb(part);
        }
        total
    }
}

fn forward_profile(chain: &ChainSpec, alpha: f64, n: usize, initial_one: f64) -> Profile {
    ForwardKernel {
        chain: *chain,
        alpha,
        n,
    }
    .run(initial_one)
}

/// Joint law of `X^n` indexed by the bit pattern, bit `i` holding `X_{i+1}`.
fn input_joint(chain: &ChainSpec, n: usize) -> Vec<f64> {
    let m = chain.matrix();
    (0..1usize << n)
        .map(|x| {
            let first = x & 1;
            let mut prob = if first == 1 { chain.pi1() } else { chain.pi0() };
            let mut prev = first;
            for i in 1..n {
                let bit = (x >> i) & 1;
                prob *= m[prev][bit];
                prev = bit;
            }
            prob
        })
        .collect()
}

fn brute_output_entropy(chain: &ChainSpec, alpha: f64, n: usize) -> f64 {
    let inputs = input_joint(chain, n);
    let flip: Vec<f64> = (0..=n)
        .map(|d| alpha.powi(d as i32) * (1.0 - alpha).powi((n - d) as i32))
        .collect();
    let terms: Vec<f64> = (0..1usize << n)
        .into_par_iter()
        .map(|y| {
            let py: f64 = inputs
                .iter()
                .enumerate()
                .map(|(x, px)| px * flip[(x ^ y).count_ones() as usize])
                .sum();
            if py > 0.0 {
                -py * py.log2()
            } else {
                0.0
            }
        })
        .collect();
    terms.iter().sum()
}

/// `H(Y_1, ..., Y_n)` exactly.
pub fn exact_output_entropy(
    chain: &ChainSpec,
    alpha: Probability,
    n: usize,
    method: OutputMethod,
) -> Result<EntropyBits> {
    let value = match method {
        OutputMethod::Forward => {
            Error::check_size("forward output entropy", n, 1, FORWARD_MAX_N)?;
            forward_profile(chain, alpha.value(), n, chain.pi1()).joint
        }
        OutputMethod::Brute => {
            Error::check_size("brute-force output entropy", n, 1, BRUTE_MAX_N)?;
            brute_output_entropy(chain, alpha.value(), n)
        }
    };
    Ok(EntropyBits::raw(value.max(0.0)))
}

/// Sandwich bounds for every length `2..=n`, index `i` holding length `i + 2`.
pub fn sandwich_profile(
    chain: &ChainSpec,
    alpha: Probability,
    n: usize,
) -> Result<Vec<ExactEntropyResult>> {
    Error::check_size("sandwich bounds", n, 2, SANDWICH_MAX_N)?;
    let a = alpha.value();
    let free = forward_profile(chain, a, n, chain.pi1());
    let mut pinned = Profile::zeros(n);
    for (x, weight) in [(0u8, chain.pi0()), (1u8, chain.pi1())] {
        if weight <= 0.0 {
            continue;
        }
        let part = forward_profile(chain, a, n, f64::from(x));
        for (acc, c) in pinned.cond.iter_mut().zip(&part.cond) {
            *acc += weight * c;
        }
    }
    let mut joint = 0.0;
    let mut out = Vec::with_capacity(n - 1);
    for k in 0..n {
        joint += free.cond[k];
        if k >= 1 {
            out.push(ExactEntropyResult {
                n: k + 1,
                joint_entropy: EntropyBits::raw(joint),
                upper: EntropyBits::raw(free.cond[k]),
                lower: EntropyBits::raw(pinned.cond[k]),
            });
        }
    }
    Ok(out)
}

/// `H(Y_n|Y^{n-1}, X_1) ≤ H̄(Y) ≤ H(Y_n|Y^{n-1})` at length `n`.
///
/// Both sides come from the chain rule over the prefix tree; the lower one
/// pins the initial state and re-weights by the stationary law.
pub fn sandwich_bounds(
    chain: &ChainSpec,
    alpha: Probability,
    n: usize,
) -> Result<ExactEntropyResult> {
    let profile = sandwich_profile(chain, alpha, n)?;
    Ok(*profile.last().expect("n ≥ 2"))
}

/// `P(y^n)` by the unnormalized two-state forward recursion.
pub fn sequence_probability(chain: &ChainSpec, alpha: Probability, ys: &[u8]) -> f64 {
    let a = alpha.value();
    let m = chain.matrix();
    let emit = |x: usize, y: u8| if (x == 1) == (y == 1) { 1.0 - a } else { a };
    let mut f = [chain.pi0(), chain.pi1()];
    for (t, &y) in ys.iter().enumerate() {
        if t > 0 {
            f = [
                f[0] * m[0][0] + f[1] * m[1][0],
                f[0] * m[0][1] + f[1] * m[1][1],
            ];
        }
        f = [f[0] * emit(0, y), f[1] * emit(1, y)];
    }
    f[0] + f[1]
}

fn projected_closed(chain: &ChainSpec, lambda: f64, n: usize) -> f64 {
    let stay = 1.0 - lambda;
    // P(S nonempty) · H(X_1)
    let mut total = -((n as f64) * stay.ln()).exp_m1() * h(chain.pi1());
    if lambda >= 1.0 {
        total = h(chain.pi1());
    }
    let mut gap_weight = lambda * lambda;
    for g in 1..n {
        let (p01, p10) = k_step_offdiag(chain, g as u64);
        let cond = chain.pi0() * h(p01) + chain.pi1() * h(p10);
        total += (n - g) as f64 * gap_weight * cond;
        gap_weight *= stay;
        if gap_weight == 0.0 {
            break;
        }
    }
    total
}

/// `H(X_S)` for the kept coordinates of `mask`, by summing out the others.
fn marginal_entropy(joint: &[f64], n: usize, mask: usize) -> f64 {
    let mut buf = joint.to_vec();
    let mut len = buf.len();
    for j in (0..n).rev() {
        if mask >> j & 1 == 1 {
            continue;
        }
        let low = (1usize << j) - 1;
        let half = len / 2;
        for i in 0..half {
            let base = ((i >> j) << (j + 1)) | (i & low);
            buf[i] = buf[base] + buf[base | (1 << j)];
        }
        len = half;
    }
    buf[..len]
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

fn projected_brute(chain: &ChainSpec, lambda: f64, n: usize) -> f64 {
    let joint = input_joint(chain, n);
    let terms: Vec<f64> = (0..1usize << n)
        .into_par_iter()
        .map(|mask| {
            let kept = mask.count_ones() as i32;
            let weight = lambda.powi(kept) * (1.0 - lambda).powi(n as i32 - kept);
            if weight == 0.0 || mask == 0 {
                0.0
            } else {
                weight * marginal_entropy(&joint, n, mask)
            }
        })
        .collect();
    terms.iter().sum()
}

/// `H(X_S|S) / (lambda n)` with `S` keeping each index independently with
/// probability `lambda`.
pub fn projected_entropy_finite(
    chain: &ChainSpec,
    lambda: f64,
    n: usize,
    method: ProjectionMethod,
) -> Result<ProjectedEntropyResult> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::domain("lambda", lambda, 0.0, 1.0));
    }
    let total = match method {
        ProjectionMethod::Closed => {
            Error::check_size("projected entropy", n, 1, usize::MAX)?;
            projected_closed(chain, lambda, n)
        }
        ProjectionMethod::Brute => {
            Error::check_size("brute-force projected entropy", n, 1, PROJECTION_BRUTE_MAX_N)?;
            projected_brute(chain, lambda, n)
        }
    };
    Ok(ProjectedEntropyResult {
        n,
        lambda,
        normalized: EntropyBits::saturating_unit(total / (lambda * n as f64)),
    })
}

/// Slack of `H(Y^n) ≥ n phi(H(X_S|S)/(lambda n))` at finite `n`.
pub fn verify_prop1(chain: &ChainSpec, alpha: Probability, n: usize) -> Result<Prop1Check> {
    Error::check_size("projected MGL check", n, 1, PROP1_MAX_N)?;
    let output = exact_output_entropy(chain, alpha, n, OutputMethod::Forward)?.value();
    let d = 1.0 - 2.0 * alpha.value();
    let lambda = d * d;
    let (projected, rhs) = if lambda == 0.0 {
        (1.0, n as f64)
    } else {
        let t = projected_entropy_finite(chain, lambda, n, ProjectionMethod::Closed)?
            .normalized
            .value();
        (t, n as f64 * phi(t, alpha.value()))
    };
    Ok(Prop1Check {
        n,
        output_entropy: output,
        projected,
        rhs,
        slack: output - rhs,
    })
}

/// `H(X^n) = h(pi1) + (n-1) H̄(X)`.
pub fn input_entropy(chain: &ChainSpec, n: usize) -> f64 {
    h(chain.pi1()) + (n.saturating_sub(1)) as f64 * chain.entropy_rate()
}

/// Slack of the classical MGL inequality `H(Y^n) ≥ n phi(H(X^n)/n)`.
pub fn mgl_finite_slack(chain: &ChainSpec, alpha: Probability, n: usize) -> Result<f64> {
    Error::check_size("MGL check", n, 1, FORWARD_MAX_N)?;
    let output = exact_output_entropy(chain, alpha, n, OutputMethod::Forward)?.value();
    let t = input_entropy(chain, n) / n as f64;
    Ok(output - n as f64 * phi(t, alpha.value()))
}
