//! Command-line front end.
//!
//! Every subcommand takes its parameters from an optional JSON file
//! (`--config`) overlaid with command-line flags, fills in defaults, and embeds
//! the fully resolved parameter set (seeds included) in each artifact it
//! writes. Any artifact can be passed back through `--config` to reproduce it.

mod commands;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::config::{Normalization, Scheme, SeedTriple};
use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "rsrm", version, about = "Structured random sensing operators: generation, RIP sweeps, recovery, security and storage analysis")]
pub struct Cli {
    /// JSON parameter file, or any artifact written by this tool; flags override its values
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for trial-parallel work (results do not depend on it)
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output path; standard output when omitted
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a sensing operator and dump it as JSON
    Gen(GenArgs),
    /// Empirical RIP satisfaction curves as CSV
    RipSweep(RipSweepArgs),
    /// Reconstruct a PGM image (Kronecker sensing) or a 1D signal file
    Recon(ReconArgs),
    /// Leakage, measurement correlation, energy spread and erasure robustness
    Security(SecurityArgs),
    /// Storage and sampling-cost accounting
    Storage(StorageArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Gen(_) => "gen",
            Command::RipSweep(_) => "rip-sweep",
            Command::Recon(_) => "recon",
            Command::Security(_) => "security",
            Command::Storage(_) => "storage",
        }
    }
}

/// Master seed and the optional explicit per-factor seeds.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct SeedArgs {
    /// Master seed deriving the R, D and Φ seeds
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Seed of the sub-sampling factor R
    #[arg(long = "seed-r")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_r: Option<u64>,
    /// Seed of the row-selection factor D
    #[arg(long = "seed-d")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_d: Option<u64>,
    /// Seed of the orthonormal blocks Φ
    #[arg(long = "seed-phi")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_phi: Option<u64>,
}

impl SeedArgs {
    fn fill(&mut self) {
        let master = *self.seed.get_or_insert(0);
        let derived = SeedTriple::from_master(master);
        self.seed_r.get_or_insert(derived.seed_r);
        self.seed_d.get_or_insert(derived.seed_d);
        self.seed_phi.get_or_insert(derived.seed_phi);
    }

    fn master(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    fn triple(&self) -> SeedTriple {
        let derived = SeedTriple::from_master(self.master());
        SeedTriple {
            seed_r: self.seed_r.unwrap_or(derived.seed_r),
            seed_d: self.seed_d.unwrap_or(derived.seed_d),
            seed_phi: self.seed_phi.unwrap_or(derived.seed_phi),
        }
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct GenArgs {
    /// fullgrm, bcs, bsrm or rsrm
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<Scheme>,
    /// Signal length
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Block size n_B
    #[arg(long = "nb")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_size: Option<usize>,
    /// Subrate m/n
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subrate: Option<f64>,
    /// Measurement count; overrides the subrate
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Restricted-permutation passes b
    #[arg(long = "b")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub passes: Option<usize>,
    /// raw or unbiased
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<Normalization>,
    #[command(flatten)]
    #[serde(flatten)]
    pub seeds: SeedArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct RipSweepArgs {
    /// Comma-separated scheme list
    #[arg(long, alias = "scheme", value_delimiter = ',')]
    #[serde(default, alias = "scheme", skip_serializing_if = "Option::is_none")]
    pub schemes: Option<Vec<Scheme>>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Comma-separated block sizes
    #[arg(long = "nb", value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_sizes: Option<Vec<usize>>,
    /// Comma-separated measurement counts
    #[arg(long = "m", value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measurements: Option<Vec<usize>>,
    /// Passes b used for RSRM entries
    #[arg(long = "b")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub passes: Option<usize>,
    /// random-sparse, block-sparse or compressible
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal: Option<String>,
    /// Sparsity of sparse signal classes
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    /// Block length of block-sparse signals
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sparse_block: Option<usize>,
    /// Number of active blocks of block-sparse signals
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_sparsity: Option<usize>,
    /// Power-law decay of compressible signals
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay: Option<f64>,
    /// Sensing matrices per configuration
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Test signals per matrix
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signals_per_trial: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub seeds: SeedArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ReconArgs {
    /// 8-bit binary PGM to sense and reconstruct
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<PathBuf>,
    /// Name of a built-in test image (discs, ramp-shapes, waves)
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corpus: Option<String>,
    /// Plain-text 1D signal (whitespace or comma separated)
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal_file: Option<PathBuf>,
    /// Scheme, optionally prefixed with `kcs-` (e.g. kcs-rsrm)
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<String>,
    /// Block size per axis (images) or n_B (signals)
    #[arg(long = "nb")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_size: Option<usize>,
    /// Total subrate
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subrate: Option<f64>,
    #[arg(long = "b")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub passes: Option<usize>,
    /// DCT soft-threshold level for images
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    /// omp or iht (1D signals)
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<String>,
    /// Sparsity budget for 1D solvers
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<Normalization>,
    #[command(flatten)]
    #[serde(flatten)]
    pub seeds: SeedArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct SecurityArgs {
    /// leakage, correlation, energy or erasure
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<String>,
    #[arg(long, alias = "scheme", value_delimiter = ',')]
    #[serde(default, alias = "scheme", skip_serializing_if = "Option::is_none")]
    pub schemes: Option<Vec<Scheme>>,
    /// 8-bit binary PGM for image metrics
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<PathBuf>,
    /// Built-in test image for image metrics
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corpus: Option<String>,
    /// Tile side for image metrics (n_B = tile²)
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tile: Option<usize>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subrate: Option<f64>,
    #[arg(long = "b")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub passes: Option<usize>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<Normalization>,
    /// Signal length for erasure experiments
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Block size for erasure experiments
    #[arg(long = "nb")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_size: Option<usize>,
    /// Measurement count for erasure experiments
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Sparsity for erasure experiments
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Comma-separated erasure fractions
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fractions: Option<Vec<f64>>,
    /// omp or iht
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<String>,
    /// Directory receiving per-scheme energy heat images
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heat_dir: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub seeds: SeedArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct StorageArgs {
    /// separable or frame-based
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    /// Image side length
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<usize>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subrate: Option<f64>,
    #[arg(long = "nb")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_size: Option<usize>,
    #[arg(long, alias = "scheme", value_delimiter = ',')]
    #[serde(default, alias = "scheme", skip_serializing_if = "Option::is_none")]
    pub schemes: Option<Vec<Scheme>>,
    /// Comma-separated pass counts for RSRM rows
    #[arg(long = "b", value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub passes: Option<Vec<usize>>,
}

/// Reads the parameter object embedded in a config file or a previous artifact.
pub fn load_config_file(path: &Path) -> Result<Map<String, Value>> {
    let bytes = std::fs::read(path)?;
    let text = String::from_utf8_lossy(&bytes);
    let value: Value = if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&text)?;
        match v.get("config") {
            Some(inner @ Value::Object(_)) => inner.clone(),
            _ => v,
        }
    } else {
        let line = text
            .lines()
            .find_map(|l| l.trim_start_matches('#').trim_start().strip_prefix("config="))
            .ok_or_else(|| Error::Parse(format!("{} contains no embedded config", path.display())))?;
        serde_json::from_str(line)?
    };
    match value {
        Value::Object(map) => Ok(map),
        _ => Err(Error::Parse("config must be a JSON object".into())),
    }
}

const SEED_KEYS: [&str; 3] = ["seed_r", "seed_d", "seed_phi"];

/// Overlays flag values on file values. A master seed given on the command
/// line also discards the per-factor seeds coming from the file.
fn merge<T: Serialize + DeserializeOwned>(command: &str, flags: &T, file: Option<Map<String, Value>>) -> Result<T> {
    let mut base = file.unwrap_or_default();
    if let Some(Value::String(cmd)) = base.remove("command") {
        if cmd != command {
            return Err(Error::InvalidConfig(format!(
                "config file is for `{cmd}`, not `{command}`"
            )));
        }
    }
    let Value::Object(over) = serde_json::to_value(flags)? else {
        unreachable!("argument structs serialize to objects")
    };
    if over.contains_key("seed") {
        for k in SEED_KEYS {
            base.remove(k);
        }
    }
    base.extend(over);
    serde_json::from_value(Value::Object(base))
        .map_err(|e| Error::InvalidConfig(format!("bad config value: {e}")))
}

/// Resolved parameters as a compact JSON object tagged with the command.
fn provenance<T: Serialize>(command: &str, params: &T) -> Result<String> {
    let mut map = Map::new();
    map.insert("command".into(), Value::String(command.into()));
    if let Value::Object(p) = serde_json::to_value(params)? {
        map.extend(p);
    }
    Ok(serde_json::to_string(&Value::Object(map))?)
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    use std::io::Write;
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

/// Executes a parsed command line.
pub fn execute(cli: Cli) -> Result<()> {
    let file = cli.config.as_deref().map(load_config_file).transpose()?;
    let name = cli.command.name();
    let out = cli.out.as_deref();
    let job = || match &cli.command {
        Command::Gen(a) => commands::gen(merge(name, a, file.clone())?, out),
        Command::RipSweep(a) => commands::rip_sweep(merge(name, a, file.clone())?, out),
        Command::Recon(a) => commands::recon(merge(name, a, file.clone())?, out),
        Command::Security(a) => commands::security(merge(name, a, file.clone())?, out),
        Command::Storage(a) => commands::storage(merge(name, a, file.clone())?, out),
    };
    match cli.jobs {
        Some(0) => Err(Error::InvalidConfig("--jobs must be at least 1".into())),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("cannot start {j} workers: {e}")))?
            .install(job),
        None => job(),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run_from_env() -> i32 {
    run(std::env::args_os())
}
