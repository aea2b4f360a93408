//! Lower bounds, exact oracles and Monte Carlo estimates for the entropy
//! rate of a binary Markov chain observed through a binary symmetric channel.

pub mod bounds;
pub mod entropy;
pub mod error;
pub mod estimator;
pub mod markov;
pub mod oracle;
pub mod verify;

pub use entropy::{EntropyBits, Probability};
pub use error::{Error, Result};
pub use markov::ChainSpec;
