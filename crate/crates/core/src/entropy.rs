//! Scalar information-theoretic primitives.
//!
//! All entropies are in bits. The binary entropy inverse is taken on the
//! branch `[0, 1/2]`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// `log2(e)`, the factor converting nats to bits.
pub const LOG2_E: f64 = std::f64::consts::LOG2_E;

/// Absolute bisection tolerance for [`binary_entropy_inv`].
pub const INV_TOLERANCE: f64 = 1e-12;

const INV_MAX_ITERATIONS: usize = 50;

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const HALF: Probability = Probability(0.5);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(value: f64) -> Result<Self> {
        Self::named("p", value)
    }

    /// Like [`Probability::new`], but a domain error names the parameter.
    pub fn named(name: &'static str, value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(Error::domain(name, value, 0.0, 1.0))
        }
    }

    /// Clamps into `[0, 1]`. NaN maps to zero.
    pub(crate) fn saturating(value: f64) -> Self {
        if value.is_nan() {
            Probability(0.0)
        } else {
            Probability(value.clamp(0.0, 1.0))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn complement(self) -> Self {
        Probability(1.0 - self.0)
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// An entropy in bits.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct EntropyBits(f64);

impl EntropyBits {
    pub const ZERO: EntropyBits = EntropyBits(0.0);
    pub const ONE: EntropyBits = EntropyBits(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if value >= 0.0 {
            Ok(EntropyBits(value))
        } else {
            Err(Error::domain("entropy", value, 0.0, f64::INFINITY))
        }
    }

    /// A per-symbol entropy, which must lie in `[0, 1]`.
    pub fn normalized(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(EntropyBits(value))
        } else {
            Err(Error::domain("t", value, 0.0, 1.0))
        }
    }

    /// Clamps a per-symbol value computed by summation into `[0, 1]`.
    pub(crate) fn saturating_unit(value: f64) -> Self {
        if value.is_nan() {
            EntropyBits(0.0)
        } else {
            EntropyBits(value.clamp(0.0, 1.0))
        }
    }

    pub(crate) fn raw(value: f64) -> Self {
        EntropyBits(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for EntropyBits {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `h(p)` on raw floats, with `0 log 0 = 0`. Callers guarantee `p ∈ [0, 1]`.
#[inline]
pub(crate) fn h(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    // ln(1 - p) through ln_1p keeps precision for small p.
    let nats = -p * p.ln() - (1.0 - p) * (-p).ln_1p();
    nats * LOG2_E
}

/// Binary convolution `a(1-b) + b(1-a)` on raw floats.
#[inline]
pub(crate) fn conv(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + b * (1.0 - a)
}

/// Inverse of `h` on `[0, 1/2]` by bracketed bisection.
pub(crate) fn h_inv(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 0.5;
    }
    let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
    for _ in 0..INV_MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) < t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Both ends bracket t; return whichever is closer in entropy.
    if (h(hi) - t).abs() < (t - h(lo)).abs() {
        hi
    } else {
        lo
    }
}

/// The binary entropy function `h(p) = -p log p - (1-p) log(1-p)`.
pub fn binary_entropy(p: Probability) -> EntropyBits {
    EntropyBits(h(p.0))
}

/// The unique `p ∈ [0, 1/2]` with `h(p) = t`.
pub fn binary_entropy_inv(t: EntropyBits) -> Result<Probability> {
    let t = EntropyBits::normalized(t.0)?;
    Ok(Probability(h_inv(t.0)))
}

/// Binary convolution `a * b`, the crossover probability of two cascaded BSCs.
pub fn convolve(a: Probability, b: Probability) -> Probability {
    Probability::saturating(conv(a.0, b.0))
}

/// The MGL function `phi(t) = h(alpha * h^{-1}(t))`.
pub fn mgl_phi(t: EntropyBits, alpha: Probability) -> Result<EntropyBits> {
    let p = binary_entropy_inv(t)?;
    Ok(EntropyBits(h(conv(alpha.0, p.0))))
}

/// `phi` on raw floats; `t` is clamped into `[0, 1]`.
pub(crate) fn phi(t: f64, alpha: f64) -> f64 {
    h(conv(alpha, h_inv(t.clamp(0.0, 1.0))))
}
