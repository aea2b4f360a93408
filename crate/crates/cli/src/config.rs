//! Config file support.
//!
//! The file is TOML with one key per flag, using the flag's long name with
//! `-` replaced by `_`:
//!
//! ```toml
//! family = "symmetric"   # symmetric | rll | general
//! q = 0.11
//! alpha = 0.11
//! samples = 1000000
//! chains = 8
//! seed = 2016
//! sweep = "q"
//! start = 0.01
//! stop = 0.49
//! step = 0.02
//! columns = "q,mgl,new_bound,estimate,ci"
//! ```
//!
//! Values given on the command line win over the file, which wins over the
//! built-in defaults.

use std::path::Path;

use serde::Deserialize;

use crate::args::{Family, Format};
use crate::error::CliError;

pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_BURNIN: u64 = 1_000;
pub const DEFAULT_CHAINS: usize = 8;
pub const DEFAULT_SEED: u64 = 2016;
pub const DEFAULT_COLUMNS: &str = "alpha,q,mgl,new_bound,single_letter_ub";

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub family: Option<Family>,
    pub q: Option<f64>,
    pub q01: Option<f64>,
    pub q10: Option<f64>,
    pub alpha: Option<f64>,
    pub n: Option<usize>,
    pub samples: Option<u64>,
    pub burnin: Option<u64>,
    pub chains: Option<usize>,
    pub seed: Option<u64>,
    pub sweep: Option<String>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub step: Option<f64>,
    pub columns: Option<String>,
    pub format: Option<Format>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Invalid(format!("config {}: {e}", path.display())))
    }
}
