//! Run configuration shared by the CLI and library callers.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelConvention;
use crate::quadrature::QuadConfig;
use crate::search::SearchConfig;
use crate::table::{BobSign, WeylParams};

/// `start:end:n`, `n` equally spaced values including both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRange {
    pub start: f64,
    pub end: f64,
    pub n: usize,
}

impl GridRange {
    pub fn new(start: f64, end: f64, n: usize) -> Result<Self> {
        let r = GridRange { start, end, n };
        if n == 0 || !start.is_finite() || !end.is_finite() || (n > 1 && start > end) {
            return Err(Error::invalid("grid range", format!("{r} needs finite start <= end and n >= 1")));
        }
        Ok(r)
    }

    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.start];
        }
        let step = (self.end - self.start) / (self.n - 1) as f64;
        (0..self.n)
            .map(|i| if i + 1 == self.n { self.end } else { self.start + step * i as f64 })
            .collect()
    }
}

impl fmt::Display for GridRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.end, self.n)
    }
}

impl FromStr for GridRange {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::invalid("grid range", format!("expected start:end:n, got `{s}`"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let start = parts[0].trim().parse().map_err(|_| bad())?;
        let end = parts[1].trim().parse().map_err(|_| bad())?;
        let n = parts[2].trim().parse().map_err(|_| bad())?;
        GridRange::new(start, end, n)
    }
}

/// Everything a run needs besides the subcommand's own flags. Every field
/// has a default, so `{}` is a valid config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub convention: KernelConvention,
    pub quad: QuadConfig,
    /// Explicit bump parameters for `weyl-numeric`.
    pub weyl: Option<WeylParams>,
    pub bob: BobSign,
    pub search: SearchConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            convention: KernelConvention::Paper,
            quad: QuadConfig {
                max_evals: 1 << 23,
                ..QuadConfig::default()
            },
            weyl: None,
            bob: BobSign::Direct,
            search: SearchConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid("config", e.to_string()))
    }

    /// Every violated invariant across all blocks.
    pub fn violations(&self) -> Vec<String> {
        let mut v = self.quad.violations();
        if let Some(w) = &self.weyl {
            if let Err(e) = w.bumps(self.bob) {
                v.push(e.to_string());
            }
        }
        v.extend(self.search.violations());
        v
    }
}
