use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::derive;

/// Sensing scheme family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// One dense row-orthonormal Gaussian matrix over the whole signal.
    #[serde(alias = "full", alias = "cs", alias = "grm", alias = "kcs")]
    FullGrm,
    /// Block-diagonal sensing of contiguous blocks.
    #[serde(alias = "bkcs")]
    Bcs,
    /// Block sensing of a uniformly permuted signal with unequal per-block measurement counts.
    Bsrm,
    /// Restricted structural random matrix: random low-resolution sub-samplings, shared orthogonal blocks.
    Rsrm,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::FullGrm => "fullgrm",
            Scheme::Bcs => "bcs",
            Scheme::Bsrm => "bsrm",
            Scheme::Rsrm => "rsrm",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fullgrm" | "full" | "cs" | "grm" | "kcs" => Ok(Scheme::FullGrm),
            "bcs" | "bkcs" => Ok(Scheme::Bcs),
            "bsrm" => Ok(Scheme::Bsrm),
            "rsrm" => Ok(Scheme::Rsrm),
            other => Err(Error::InvalidConfig(format!("unknown scheme `{other}`"))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Measurement scaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// Rows of the orthonormal blocks, unscaled.
    Raw,
    /// Per sub-signal factor `sqrt(n_B / m_i)` times a global `1 / sqrt(b)`, so `E‖y‖² = ‖x‖²`.
    #[default]
    Unbiased,
}

impl std::str::FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "raw" => Ok(Normalization::Raw),
            "unbiased" => Ok(Normalization::Unbiased),
            other => Err(Error::InvalidConfig(format!("unknown normalization `{other}`"))),
        }
    }
}

/// The three independent keys of a scheme: sub-sampling `R`, row selection `D`, blocks `Φ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedTriple {
    pub seed_r: u64,
    pub seed_d: u64,
    pub seed_phi: u64,
}

impl SeedTriple {
    pub fn from_master(master: u64) -> Self {
        SeedTriple {
            seed_r: derive(master, 0x52),
            seed_d: derive(master, 0x44),
            seed_phi: derive(master, 0x50),
        }
    }
}

/// Full parameterization of a sensing scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub n: usize,
    pub block_size: usize,
    pub subrate: f64,
    /// Number of restricted-permutation passes (`p = q = b`).
    pub passes: usize,
    pub scheme: Scheme,
    #[serde(flatten)]
    pub seeds: SeedTriple,
    #[serde(default)]
    pub normalization: Normalization,
}

impl SchemeConfig {
    pub fn new(scheme: Scheme, n: usize, block_size: usize, subrate: f64, passes: usize) -> Self {
        SchemeConfig {
            n,
            block_size,
            subrate,
            passes,
            scheme,
            seeds: SeedTriple::from_master(0),
            normalization: Normalization::Unbiased,
        }
    }

    /// Convenience for the full-matrix scheme (`n_B = n`, `b = 1`).
    pub fn full_grm(n: usize, subrate: f64) -> Self {
        Self::new(Scheme::FullGrm, n, n, subrate, 1)
    }

    pub fn with_seeds(mut self, seeds: SeedTriple) -> Self {
        self.seeds = seeds;
        self
    }

    pub fn with_master_seed(mut self, master: u64) -> Self {
        self.seeds = SeedTriple::from_master(master);
        self
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    /// Builds a config whose measurement count is exactly `m`.
    pub fn with_measurements(mut self, m: usize) -> Self {
        self.subrate = m as f64 / self.n as f64;
        self
    }

    /// Number of measurements `floor(r·n)`. A tiny epsilon absorbs decimal
    /// subrates like 0.3 that are not exact in binary.
    pub fn measurements(&self) -> usize {
        (self.subrate * self.n as f64 + 1e-9).floor() as usize
    }

    /// Number of sub-signals `c = b·n/n_B`.
    pub fn sub_signals(&self) -> usize {
        if self.block_size == 0 {
            return 0;
        }
        self.passes * (self.n / self.block_size)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n == 0 {
            return invalid("n must be positive".into());
        }
        if self.block_size == 0 {
            return invalid("block size n_B must be positive".into());
        }
        if !self.n.is_multiple_of(self.block_size) {
            return invalid(format!(
                "block size n_B = {} must divide n = {}",
                self.block_size, self.n
            ));
        }
        if self.passes == 0 {
            return invalid("passes b must be a positive integer".into());
        }
        if !(self.subrate > 0.0 && self.subrate <= 1.0) {
            return invalid(format!("subrate {} must lie in (0, 1]", self.subrate));
        }
        match self.scheme {
            Scheme::FullGrm => {
                if self.block_size != self.n {
                    return invalid(format!(
                        "fullgrm requires n_B = n (got n_B = {}, n = {})",
                        self.block_size, self.n
                    ));
                }
                if self.passes != 1 {
                    return invalid("fullgrm requires b = 1".into());
                }
            }
            Scheme::Bcs | Scheme::Bsrm => {
                if self.passes != 1 {
                    return invalid(format!("{} requires b = 1", self.scheme));
                }
            }
            Scheme::Rsrm => {}
        }
        let m = self.measurements();
        let c = self.sub_signals();
        if m < c {
            return Err(Error::TooFewMeasurements { m, c });
        }
        Ok(())
    }
}
