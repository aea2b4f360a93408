use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A scalar argument fell outside its admissible range.
    #[error("{name} = {value} is outside [{min}, {max}]")]
    Domain {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    /// Both transition probabilities are zero, so the stationary law is not unique.
    #[error("degenerate chain: q01 = q10 = 0 has no unique stationary distribution")]
    DegenerateChain,

    /// lambda = 0 (alpha = 1/2): the geometric gap variable is infinite.
    #[error("infinite-noise case: lambda = 0 leaves the geometric expectation undefined")]
    InfiniteNoise,

    /// A series whose sum diverges at the requested argument.
    #[error("{what} diverges at {name} = {value}")]
    Divergent {
        what: &'static str,
        name: &'static str,
        value: f64,
    },

    /// An exact enumeration was asked for a length beyond its cap.
    #[error("{what}: n = {n} is outside the supported range [{min}, {max}]")]
    Size {
        what: &'static str,
        n: usize,
        min: usize,
        max: usize,
    },

    /// Estimator preconditions.
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, min: f64, max: f64) -> Self {
        Error::Domain {
            name,
            value,
            min,
            max,
        }
    }

    pub(crate) fn check_size(what: &'static str, n: usize, min: usize, max: usize) -> Result<()> {
        if (min..=max).contains(&n) {
            Ok(())
        } else {
            Err(Error::Size { what, n, min, max })
        }
    }
}
