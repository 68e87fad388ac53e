use std::path::Path;

use nalgebra::DMatrix;

use super::{emit, provenance, GenArgs, ReconArgs, RipSweepArgs, SecurityArgs, StorageArgs};
use crate::config::{Normalization, Scheme, SchemeConfig, SeedTriple};
use crate::corpus;
use crate::error::{Error, Result};
use crate::io::{encode_pgm, read_pgm, write_pgm};
use crate::operators::accounting::{sampling_cost, separable_axis_config, storage_profile, StorageMode};
use crate::operators::{build_operator, KroneckerOperator, LinearOperator};
use crate::recon::{kcs_recover, psnr, ssim, KcsOptions, SolverChoice};
use crate::rip::{default_delta_grid, satisfaction_sweep, SweepSpec};
use crate::rng::derive;
use crate::security::{
    adjacent_correlation, block_energy_leakage, energy_heat_image, energy_spread, erasure_robustness,
    leakage_config, sub_signal_energies, tile_vectorize,
};
use crate::signals::{gen_random_sparse, load_signal_file, SignalSpec};

fn csv_bytes(config: &str, header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut buf = format!("# config={config}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
    }
    Ok(buf)
}

fn parse_scheme(name: &str) -> Result<Scheme> {
    name.strip_prefix("kcs-").unwrap_or(name).parse()
}

fn load_image(image: Option<&Path>, corpus_name: Option<&str>) -> Result<(String, DMatrix<f64>)> {
    match (image, corpus_name) {
        (Some(_), Some(_)) => Err(Error::InvalidConfig("give either an image path or a corpus name, not both".into())),
        (Some(p), None) => Ok((p.display().to_string(), read_pgm(p)?)),
        (None, name) => {
            let name = name.unwrap_or(corpus::NAMES[0]);
            let img = corpus::by_name(name)
                .ok_or_else(|| Error::InvalidConfig(format!("unknown corpus image `{name}` (have {:?})", corpus::NAMES)))?;
            Ok((name.to_string(), img))
        }
    }
}

fn solver_choice(name: &str, s: usize) -> Result<SolverChoice> {
    match name {
        "omp" => Ok(SolverChoice::omp(s)),
        "iht" => Ok(SolverChoice::iht(s)),
        other => Err(Error::InvalidConfig(format!("unknown solver `{other}` (omp or iht)"))),
    }
}

/// Per-axis configurations for separable sensing of a `rows × cols` image.
/// The column axis uses seeds derived from the row-axis triple.
pub(super) fn kronecker_configs(
    scheme: Scheme,
    shape: (usize, usize),
    block_size: usize,
    subrate: f64,
    passes: usize,
    seeds: SeedTriple,
    normalization: Normalization,
) -> (SchemeConfig, SchemeConfig) {
    let axis = |n: usize, seeds: SeedTriple| {
        let nb = if scheme == Scheme::FullGrm { n } else { block_size };
        separable_axis_config(scheme, n, nb, subrate, passes)
            .with_seeds(seeds)
            .with_normalization(normalization)
    };
    let right = SeedTriple {
        seed_r: derive(seeds.seed_r, 0x43),
        seed_d: derive(seeds.seed_d, 0x43),
        seed_phi: derive(seeds.seed_phi, 0x43),
    };
    (axis(shape.0, seeds), axis(shape.1, right))
}

pub(super) fn gen(mut a: GenArgs, out: Option<&Path>) -> Result<()> {
    a.seeds.fill();
    let scheme = *a.scheme.get_or_insert(Scheme::Rsrm);
    let n = *a.n.get_or_insert(1024);
    let nb = *a.block_size.get_or_insert(if scheme == Scheme::FullGrm { n } else { 256 });
    let passes = *a.passes.get_or_insert(1);
    let norm = *a.normalization.get_or_insert(Normalization::Unbiased);
    let mut cfg = SchemeConfig::new(scheme, n, nb, a.subrate.unwrap_or(0.25), passes)
        .with_seeds(a.seeds.triple())
        .with_normalization(norm);
    if let Some(m) = a.m {
        cfg = cfg.with_measurements(m);
    }
    let op = build_operator(&cfg)?;
    let mut text = op.to_json()?;
    text.push('\n');
    emit(out, text.as_bytes())
}

pub(super) fn rip_sweep(mut a: RipSweepArgs, out: Option<&Path>) -> Result<()> {
    a.seeds.fill();
    let schemes = a
        .schemes
        .get_or_insert_with(|| vec![Scheme::Rsrm, Scheme::Bsrm, Scheme::Bcs])
        .clone();
    let n = *a.n.get_or_insert(256);
    let block_sizes = a.block_sizes.get_or_insert_with(|| vec![64]).clone();
    let measurements = a.measurements.get_or_insert_with(|| vec![32]).clone();
    let passes = *a.passes.get_or_insert(1);
    let class = a.signal.get_or_insert_with(|| "block-sparse".into()).clone();
    let s = *a.s.get_or_insert(8);
    let sparse_block = *a.sparse_block.get_or_insert(64);
    let block_sparsity = *a.block_sparsity.get_or_insert(2);
    let decay = *a.decay.get_or_insert(1.5);
    let trials = *a.trials.get_or_insert(200);
    let signals_per_trial = *a.signals_per_trial.get_or_insert(500);
    let signal = match class.as_str() {
        "random-sparse" => SignalSpec::RandomSparse { s },
        "block-sparse" => SignalSpec::BlockSparse {
            s,
            block_size: sparse_block,
            block_sparsity,
        },
        "compressible" => SignalSpec::Compressible { decay },
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown signal class `{other}` (random-sparse, block-sparse, compressible)"
            )))
        }
    };
    if trials == 0 || signals_per_trial == 0 {
        return Err(Error::InvalidConfig("trials and signals per trial must be positive".into()));
    }
    let spec = SweepSpec {
        schemes,
        n,
        block_sizes,
        measurements,
        passes,
        signal,
        trials,
        signals_per_trial,
        delta_grid: default_delta_grid(),
        seed: a.seeds.master(),
    };
    let curves = satisfaction_sweep(&spec)?;
    let mut rows = Vec::new();
    for c in &curves {
        for (d, f) in c.curve.delta_grid.iter().zip(&c.curve.fraction_satisfying) {
            rows.push(vec![
                c.scheme.to_string(),
                c.n.to_string(),
                c.block_size.to_string(),
                c.m.to_string(),
                c.passes.to_string(),
                signal.class().name().to_string(),
                format!("{d:.2}"),
                format!("{f:.6}"),
            ]);
        }
    }
    let cfg = provenance("rip-sweep", &a)?;
    let header = ["scheme", "n", "n_B", "m", "b", "signal_class", "delta", "fraction"];
    emit(out, &csv_bytes(&cfg, &header, &rows)?)
}

#[derive(serde::Serialize)]
struct ImageMetrics<'a> {
    config: serde_json::Value,
    image: &'a str,
    psnr: f64,
    ssim: f64,
    iterations: usize,
    residual: f64,
    converged: bool,
}

#[derive(serde::Serialize)]
struct SignalReport {
    config: serde_json::Value,
    iterations: usize,
    residual: f64,
    support: Option<Vec<usize>>,
    measurements: Vec<f64>,
    estimate: Vec<f64>,
    relative_error: f64,
}

pub(super) fn recon(mut a: ReconArgs, out: Option<&Path>) -> Result<()> {
    a.seeds.fill();
    let scheme = parse_scheme(a.scheme.get_or_insert_with(|| "kcs-rsrm".into()))?;
    let subrate = *a.subrate.get_or_insert(0.25);
    let passes = *a.passes.get_or_insert(1);
    let norm = *a.normalization.get_or_insert(Normalization::Unbiased);
    let seeds = a.seeds.triple();

    if let Some(path) = a.signal_file.clone() {
        if a.image.is_some() || a.corpus.is_some() {
            return Err(Error::InvalidConfig("give either a signal file or an image".into()));
        }
        let signal = load_signal_file(&path)?;
        let n = signal.len();
        let nb = *a.block_size.get_or_insert(if scheme == Scheme::FullGrm { n } else { 32 });
        let cfg = SchemeConfig::new(scheme, n, nb, subrate, passes)
            .with_seeds(seeds)
            .with_normalization(norm);
        let op = build_operator(&cfg)?;
        let s = *a.s.get_or_insert((cfg.measurements() / 4).max(1));
        let solver = solver_choice(a.solver.get_or_insert_with(|| "omp".into()), s)?;
        let y = op.apply(&signal.values)?;
        let res = solver.solve(&op, &y)?;
        let err: f64 = res.estimate.iter().zip(&signal.values).map(|(e, t)| (e - t).powi(2)).sum();
        let norm_x: f64 = signal.values.iter().map(|v| v * v).sum();
        let report = SignalReport {
            config: serde_json::from_str(&provenance("recon", &a)?)?,
            iterations: res.iterations,
            residual: res.residual,
            support: res.support,
            measurements: y,
            estimate: res.estimate,
            relative_error: if norm_x > 0.0 { (err / norm_x).sqrt() } else { err.sqrt() },
        };
        let mut text = serde_json::to_string_pretty(&report)?;
        text.push('\n');
        return emit(out, text.as_bytes());
    }

    let out = out.ok_or_else(|| Error::InvalidConfig("image reconstruction needs --out <file.pgm>".into()))?;
    if a.image.is_none() && a.corpus.is_none() {
        a.corpus = Some(corpus::NAMES[0].into());
    }
    let (label, image) = load_image(a.image.as_deref(), a.corpus.as_deref())?;
    let nb = *a.block_size.get_or_insert(32);
    let lambda = *a.lambda.get_or_insert(8.0);
    let max_iters = *a.max_iters.get_or_insert(300);
    let (left, right) = kronecker_configs(scheme, image.shape(), nb, subrate, passes, seeds, norm);
    let kop = KroneckerOperator::new(build_operator(&left)?, build_operator(&right)?);
    let y = kop.apply(&image)?;
    let opts = KcsOptions {
        lambda,
        max_iters,
        ..KcsOptions::default()
    };
    let res = kcs_recover(&y, &kop, &opts, None)?;
    let estimate = res.as_matrix().expect("2D result");
    let clipped = estimate.map(|v| v.round().clamp(0.0, 255.0));
    let cfg = provenance("recon", &a)?;
    let metrics = ImageMetrics {
        config: serde_json::from_str(&cfg)?,
        image: &label,
        psnr: psnr(&image, &clipped, 255.0)?,
        ssim: ssim(&image, &clipped)?,
        iterations: res.iterations,
        residual: res.residual,
        converged: res.converged,
    };
    write_pgm(out, &clipped, &[format!("config={cfg}")])?;
    let mut text = serde_json::to_string_pretty(&metrics)?;
    text.push('\n');
    std::fs::write(out.with_extension("json"), text)?;
    Ok(())
}

pub(super) fn security(mut a: SecurityArgs, out: Option<&Path>) -> Result<()> {
    a.seeds.fill();
    let metric = a.metric.get_or_insert_with(|| "leakage".into()).clone();
    let schemes = a.schemes.get_or_insert_with(|| vec![Scheme::Bcs, Scheme::Rsrm]).clone();
    let passes = *a.passes.get_or_insert(1);
    let seeds = a.seeds.triple();
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut heat: Vec<(Scheme, Vec<f64>)> = Vec::new();
    let row = |scheme: &str, metric: &str, value: f64| vec![scheme.to_string(), metric.to_string(), format!("{value:.6}")];

    match metric.as_str() {
        "leakage" | "correlation" | "energy" => {
            if a.image.is_none() && a.corpus.is_none() {
                a.corpus = Some(corpus::NAMES[0].into());
            }
            let (_, image) = load_image(a.image.as_deref(), a.corpus.as_deref())?;
            let tile = *a.tile.get_or_insert(8);
            let subrate = *a.subrate.get_or_insert(0.25);
            let norm = *a.normalization.get_or_insert(Normalization::Raw);
            if metric == "correlation" {
                let raster: Vec<f64> = image.transpose().iter().copied().collect();
                rows.push(row("pixels", "adjacent_correlation", adjacent_correlation(&raster)?));
            }
            for &scheme in &schemes {
                let mut cfg = leakage_config(scheme, image.shape(), tile, subrate)
                    .with_seeds(seeds)
                    .with_normalization(norm);
                if scheme == Scheme::Rsrm {
                    cfg.passes = passes;
                }
                if scheme == Scheme::FullGrm {
                    return Err(Error::InvalidConfig("image security metrics need a block scheme".into()));
                }
                match metric.as_str() {
                    "leakage" => {
                        let rep = block_energy_leakage(&cfg, &image, tile)?;
                        rows.push(row(scheme.name(), "leakage", rep.correlation));
                        heat.push((scheme, rep.energy_map));
                    }
                    "correlation" => {
                        let op = build_operator(&cfg)?;
                        let y = op.apply(&tile_vectorize(&image, tile)?)?;
                        rows.push(row(scheme.name(), "adjacent_correlation", adjacent_correlation(&y)?));
                    }
                    _ => {
                        let op = build_operator(&cfg)?;
                        let e = sub_signal_energies(&op, &tile_vectorize(&image, tile)?)?;
                        rows.push(row(scheme.name(), "energy_spread", energy_spread(&e)));
                        heat.push((scheme, e));
                    }
                }
            }
        }
        "erasure" => {
            let n = *a.n.get_or_insert(256);
            let nb = *a.block_size.get_or_insert(64);
            let m = *a.m.get_or_insert(96);
            let s = *a.s.get_or_insert(8);
            let trials = *a.trials.get_or_insert(200);
            let fractions = a.fractions.get_or_insert_with(|| vec![0.1]).clone();
            let solver = solver_choice(a.solver.get_or_insert_with(|| "omp".into()), s)?;
            let norm = *a.normalization.get_or_insert(Normalization::Unbiased);
            let signal_seed = derive(a.seeds.master(), 0x5349);
            let signals = (0..trials)
                .map(|t| gen_random_sparse(n, s, derive(signal_seed, t as u64)))
                .collect::<Result<Vec<_>>>()?;
            for &scheme in &schemes {
                let nb = if scheme == Scheme::FullGrm { n } else { nb };
                let p = if scheme == Scheme::Rsrm { passes } else { 1 };
                let cfg = SchemeConfig::new(scheme, n, nb, 0.0, p)
                    .with_measurements(m)
                    .with_seeds(seeds)
                    .with_normalization(norm);
                let op = build_operator(&cfg)?;
                for &f in &fractions {
                    let rep = erasure_robustness(&op, &signals, f, solver, derive(a.seeds.master(), 0x4552))?;
                    rows.push(row(scheme.name(), &format!("recovery_rate@{f}"), rep.rate));
                }
            }
        }
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown metric `{other}` (leakage, correlation, energy, erasure)"
            )))
        }
    }
    let cfg = provenance("security", &a)?;
    if let Some(dir) = &a.heat_dir {
        std::fs::create_dir_all(dir)?;
        for (scheme, map) in &heat {
            let path = dir.join(format!("{}-{metric}.pgm", scheme.name()));
            std::fs::write(path, encode_pgm(&energy_heat_image(map), &[format!("config={cfg}")]))?;
        }
    }
    emit(out, &csv_bytes(&cfg, &["scheme", "metric", "value"], &rows)?)
}

pub(super) fn storage(mut a: StorageArgs, out: Option<&Path>) -> Result<()> {
    let mode = match a.mode.get_or_insert_with(|| "separable".into()).as_str() {
        "separable" | "kronecker" => StorageMode::Separable,
        "frame-based" | "frame" => StorageMode::FrameBased,
        other => return Err(Error::InvalidConfig(format!("unknown mode `{other}` (separable, frame-based)"))),
    };
    let side = *a.image.get_or_insert(256);
    let subrate = *a.subrate.get_or_insert(0.25);
    let nb = *a.block_size.get_or_insert(128);
    let schemes = a
        .schemes
        .get_or_insert_with(|| vec![Scheme::FullGrm, Scheme::Bcs, Scheme::Bsrm, Scheme::Rsrm])
        .clone();
    let pass_list = a.passes.get_or_insert_with(|| vec![1, 4]).clone();
    let mut rows = Vec::new();
    for &scheme in &schemes {
        let passes: &[usize] = if scheme == Scheme::Rsrm { &pass_list } else { &[1] };
        for &b in passes {
            let cfg = match mode {
                StorageMode::Separable => {
                    separable_axis_config(scheme, side, if scheme == Scheme::FullGrm { side } else { nb }, subrate, b)
                }
                StorageMode::FrameBased => {
                    let n = side * side;
                    SchemeConfig::new(scheme, n, if scheme == Scheme::FullGrm { n } else { nb }, subrate, b)
                }
            };
            cfg.validate()?;
            let p = storage_profile(&cfg, mode);
            let m = cfg.measurements();
            let (adds, mults) = match mode {
                StorageMode::FrameBased => {
                    let c = sampling_cost(&cfg);
                    (c.adds, c.mults)
                }
                // Φ_L applied to every column, then Φ_R to every row of the result.
                StorageMode::Separable => {
                    let per = m * cfg.block_size * side + m * cfg.block_size * m;
                    (per, per)
                }
            };
            rows.push(vec![
                scheme.to_string(),
                match mode {
                    StorageMode::Separable => "separable".into(),
                    StorageMode::FrameBased => "frame-based".into(),
                },
                side.to_string(),
                cfg.n.to_string(),
                cfg.block_size.to_string(),
                b.to_string(),
                format!("{subrate}"),
                m.to_string(),
                p.phi_floats.to_string(),
                p.r_ints.to_string(),
                p.d_ints.to_string(),
                adds.to_string(),
                mults.to_string(),
            ]);
        }
    }
    let cfg = provenance("storage", &a)?;
    let header = [
        "scheme", "mode", "image", "n", "n_B", "b", "subrate", "m", "phi_floats", "r_ints", "d_ints", "adds", "mults",
    ];
    emit(out, &csv_bytes(&cfg, &header, &rows)?)
}
