//! Test-signal generators, sparsifying transforms and sparsity metrics.

pub mod dct;

use rand::seq::index;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

pub use dct::{dct2_forward, dct2_inverse, dct_forward, dct_inverse, Dct2Plan, DctPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignalClass {
    RandomSparse,
    BlockSparse,
    Compressible,
    External,
}

impl SignalClass {
    pub fn name(self) -> &'static str {
        match self {
            SignalClass::RandomSparse => "random-sparse",
            SignalClass::BlockSparse => "block-sparse",
            SignalClass::Compressible => "compressible",
            SignalClass::External => "external",
        }
    }
}

/// Basis in which a signal is sparse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Identity,
    Dct,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalInstance {
    pub values: Vec<f64>,
    pub class: SignalClass,
    /// Sorted support, when known.
    pub support: Option<Vec<usize>>,
    pub basis: Basis,
}

impl SignalInstance {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Wraps user-supplied values.
    pub fn external(values: Vec<f64>) -> Self {
        SignalInstance {
            values,
            class: SignalClass::External,
            support: None,
            basis: Basis::Identity,
        }
    }
}

/// Parameters of a generated signal class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum SignalSpec {
    RandomSparse { s: usize },
    BlockSparse { s: usize, block_size: usize, block_sparsity: usize },
    Compressible { decay: f64 },
}

impl SignalSpec {
    pub fn class(&self) -> SignalClass {
        match self {
            SignalSpec::RandomSparse { .. } => SignalClass::RandomSparse,
            SignalSpec::BlockSparse { .. } => SignalClass::BlockSparse,
            SignalSpec::Compressible { .. } => SignalClass::Compressible,
        }
    }

    pub fn generate(&self, n: usize, seed: u64) -> Result<SignalInstance> {
        self.generate_with(None, n, seed)
    }

    /// Like [`SignalSpec::generate`], with an optional cached DCT of length `n`.
    pub fn generate_with(&self, plan: Option<&DctPlan>, n: usize, seed: u64) -> Result<SignalInstance> {
        match *self {
            SignalSpec::Compressible { decay } if plan.is_some_and(|p| p.len() == n) => {
                gen_compressible_with(plan.expect("checked"), decay, seed)
            }
            SignalSpec::RandomSparse { s } => gen_random_sparse(n, s, seed),
            SignalSpec::BlockSparse { s, block_size, block_sparsity } => {
                gen_block_sparse(n, s, block_size, block_sparsity, seed)
            }
            SignalSpec::Compressible { decay } => gen_compressible(n, decay, seed),
        }
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

fn sparse_from_support(n: usize, mut support: Vec<usize>, seed_rng: &mut crate::rng::Rng, class: SignalClass) -> SignalInstance {
    support.sort_unstable();
    let mut values = vec![0.0; n];
    for &k in &support {
        // Standard normal values are nonzero with probability one; guard anyway
        // so the recorded support is exact.
        let mut v: f64 = seed_rng.sample(StandardNormal);
        while v == 0.0 {
            v = seed_rng.sample(StandardNormal);
        }
        values[k] = v;
    }
    normalize(&mut values);
    SignalInstance {
        values,
        class,
        support: Some(support),
        basis: Basis::Identity,
    }
}

/// `s` uniformly placed standard-normal nonzeros, unit-normalized.
pub fn gen_random_sparse(n: usize, s: usize, seed: u64) -> Result<SignalInstance> {
    if s == 0 || s > n {
        return Err(Error::InvalidConfig(format!("sparsity s = {s} must lie in 1..={n}")));
    }
    let mut rng = rng_from_seed(seed);
    let support = index::sample(&mut rng, n, s).into_vec();
    Ok(sparse_from_support(n, support, &mut rng, SignalClass::RandomSparse))
}

/// `s` nonzeros spread uniformly over `block_sparsity` randomly chosen
/// contiguous blocks of `block_size` samples.
pub fn gen_block_sparse(
    n: usize,
    s: usize,
    block_size: usize,
    block_sparsity: usize,
    seed: u64,
) -> Result<SignalInstance> {
    if block_size == 0 || !n.is_multiple_of(block_size) {
        return Err(Error::InvalidConfig(format!(
            "block size {block_size} must divide n = {n}"
        )));
    }
    let blocks = n / block_size;
    if block_sparsity == 0 || block_sparsity > blocks {
        return Err(Error::InvalidConfig(format!(
            "block sparsity {block_sparsity} must lie in 1..={blocks}"
        )));
    }
    if s == 0 || s > block_sparsity * block_size {
        return Err(Error::InvalidConfig(format!(
            "sparsity s = {s} must lie in 1..={}",
            block_sparsity * block_size
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut chosen = index::sample(&mut rng, blocks, block_sparsity).into_vec();
    chosen.sort_unstable();
    let support = index::sample(&mut rng, block_sparsity * block_size, s)
        .into_iter()
        .map(|p| chosen[p / block_size] * block_size + p % block_size)
        .collect();
    Ok(sparse_from_support(n, support, &mut rng, SignalClass::BlockSparse))
}

/// Power-law compressible signal: DCT coefficient `k` (1-based) has magnitude
/// `k^(−decay)` and a random sign; the result is unit-normalized.
pub fn gen_compressible(n: usize, decay: f64, seed: u64) -> Result<SignalInstance> {
    gen_compressible_with(&DctPlan::new(n), decay, seed)
}

/// [`gen_compressible`] reusing a cached transform.
pub fn gen_compressible_with(plan: &DctPlan, decay: f64, seed: u64) -> Result<SignalInstance> {
    let n = plan.len();
    if decay.is_nan() || decay <= 0.0 {
        return Err(Error::InvalidConfig(format!("decay {decay} must be positive")));
    }
    let mut rng = rng_from_seed(seed);
    let coeffs: Vec<f64> = (1..=n)
        .map(|k| {
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            sign * (k as f64).powf(-decay)
        })
        .collect();
    let mut values = plan.inverse(&coeffs);
    normalize(&mut values);
    Ok(SignalInstance {
        values,
        class: SignalClass::Compressible,
        support: None,
        basis: Basis::Dct,
    })
}

/// Relative ℓ2 error of the best `s`-term approximation of `x` in `basis`.
pub fn best_s_term_error(x: &[f64], s: usize, basis: Basis) -> f64 {
    let coeffs = match basis {
        Basis::Identity => x.to_vec(),
        Basis::Dct => dct_forward(x),
    };
    let total: f64 = coeffs.iter().map(|c| c * c).sum();
    if total == 0.0 {
        return 0.0;
    }
    let mut energies: Vec<f64> = coeffs.iter().map(|c| c * c).collect();
    let s = s.min(energies.len());
    let tail_len = energies.len() - s;
    if tail_len == 0 {
        return 0.0;
    }
    // Partition so the `tail_len` smallest energies come first.
    energies.select_nth_unstable_by(tail_len - 1, |a, b| a.total_cmp(b));
    let tail: f64 = energies[..tail_len].iter().sum();
    (tail / total).sqrt()
}

/// Reads newline-separated decimals; blank lines and `#` comments are skipped.
pub fn parse_signal_text(text: &str) -> Result<Vec<f64>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad sample `{l}`: {e}")))
        })
        .collect()
}

pub fn load_signal_file(path: &std::path::Path) -> Result<SignalInstance> {
    let text = std::fs::read_to_string(path)?;
    Ok(SignalInstance::external(parse_signal_text(&text)?))
}
