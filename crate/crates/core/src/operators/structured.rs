use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::bank::{OrthoBlock, OrthoBlockBank};
use super::linop::{check_len, LinearOperator};
use super::permutation::RestrictedPermutation;
use super::selection::{
    distinct_block_rows, equal_counts, shared_block_rows, uneven_block_rows, RowSelection,
};
use crate::config::{Normalization, Scheme, SchemeConfig};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Largest `n` for which [`StructuredOperator::densify`] will materialize the matrix.
pub const DENSIFY_LIMIT: usize = 4096;

/// Version tag written into serialized operators.
pub const OPERATOR_FORMAT: &str = "rsrm-operator/1";

/// `D · Φ^B · R` as an index-based operator.
///
/// Measurement `t` of sub-signal `i` is `scale_i · ⟨Φ_{a(i)}[row_t], x[R_i]⟩`,
/// and the output is the concatenation of the sub-signal measurement vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredOperator {
    config: SchemeConfig,
    permutation: RestrictedPermutation,
    selection: RowSelection,
    bank: OrthoBlockBank,
    offsets: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct OperatorDocument {
    format: String,
    config: SchemeConfig,
    m: usize,
    c: usize,
    d: usize,
    sub_samplers: Vec<Vec<usize>>,
    rows: Vec<Vec<usize>>,
    assignment: Vec<usize>,
    blocks: Vec<OrthoBlock>,
}

/// Constructs the operator described by `config`.
pub fn build_operator(config: &SchemeConfig) -> Result<StructuredOperator> {
    StructuredOperator::build(config)
}

impl StructuredOperator {
    pub fn build(config: &SchemeConfig) -> Result<Self> {
        config.validate()?;
        let n = config.n;
        let nb = config.block_size;
        let m = config.measurements();
        let c = config.sub_signals();
        let mut rng_r = rng_from_seed(config.seeds.seed_r);
        let mut rng_d = rng_from_seed(config.seeds.seed_d);
        let mut rng_phi = rng_from_seed(config.seeds.seed_phi);

        let (permutation, selection, assignment, d, block_rows) = match config.scheme {
            Scheme::FullGrm => {
                let r = RestrictedPermutation::identity_blocks(n, n);
                let sel = RowSelection {
                    rows: vec![(0..m).collect()],
                };
                (r, sel, vec![0], 1, m)
            }
            Scheme::Bcs => {
                let r = RestrictedPermutation::identity_blocks(n, nb);
                let counts = equal_counts(m, c, &mut rng_d);
                let sel = distinct_block_rows(&counts, nb, &mut rng_d);
                (r, sel, (0..c).collect(), c, nb)
            }
            Scheme::Bsrm => {
                let r = RestrictedPermutation::random_permutation(n, nb, &mut rng_r);
                let sel = uneven_block_rows(m, c, nb, &mut rng_d);
                (r, sel, (0..c).collect(), c, nb)
            }
            Scheme::Rsrm => {
                let r = RestrictedPermutation::restricted(n, nb, config.passes, &mut rng_r)?;
                let counts = equal_counts(m, c, &mut rng_d);
                let (sel, assign, d) = shared_block_rows(&counts, nb, &mut rng_d);
                (r, sel, assign, d, nb)
            }
        };
        let blocks = (0..d)
            .map(|_| OrthoBlock::gaussian(block_rows, nb, &mut rng_phi))
            .collect();
        let bank = OrthoBlockBank { blocks, assignment };
        Ok(Self::assemble(config.clone(), permutation, selection, bank))
    }

    fn assemble(
        config: SchemeConfig,
        permutation: RestrictedPermutation,
        selection: RowSelection,
        bank: OrthoBlockBank,
    ) -> Self {
        let mut offsets = Vec::with_capacity(selection.rows.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for list in &selection.rows {
            acc += list.len();
            offsets.push(acc);
        }
        StructuredOperator {
            config,
            permutation,
            selection,
            bank,
            offsets,
        }
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.config
    }

    pub fn permutation(&self) -> &RestrictedPermutation {
        &self.permutation
    }

    pub fn selection(&self) -> &RowSelection {
        &self.selection
    }

    pub fn bank(&self) -> &OrthoBlockBank {
        &self.bank
    }

    pub fn n(&self) -> usize {
        self.config.n
    }

    pub fn m(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    /// Number of sub-signals `c`.
    pub fn c(&self) -> usize {
        self.selection.rows.len()
    }

    pub fn block_size(&self) -> usize {
        self.config.block_size
    }

    /// Measurement index range belonging to sub-signal `i`.
    pub fn measurement_range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    /// Global factor (`1/√b` when unbiased).
    pub fn global_scale(&self, norm: Normalization) -> f64 {
        match norm {
            Normalization::Raw => 1.0,
            Normalization::Unbiased => 1.0 / (self.config.passes as f64).sqrt(),
        }
    }

    /// Per sub-signal factor (`√(n_B/m_i)` when unbiased).
    pub fn sub_scale(&self, i: usize, norm: Normalization) -> f64 {
        match norm {
            Normalization::Raw => 1.0,
            Normalization::Unbiased => {
                let mi = self.selection.rows[i].len();
                (self.config.block_size as f64 / mi as f64).sqrt()
            }
        }
    }

    /// Total factor applied to sub-signal `i` under the operator's own normalization.
    pub fn scale(&self, i: usize) -> f64 {
        let norm = self.config.normalization;
        self.global_scale(norm) * self.sub_scale(i, norm)
    }

    /// Apply with an explicit normalization, ignoring the configured one.
    pub fn apply_with(&self, x: &[f64], norm: Normalization) -> Result<Vec<f64>> {
        check_len(self.n(), x.len())?;
        let mut y = vec![0.0; self.m()];
        self.apply_scaled(x, &mut y, norm);
        Ok(y)
    }

    fn apply_scaled(&self, x: &[f64], y: &mut [f64], norm: Normalization) {
        let g = self.global_scale(norm);
        let mut sub = vec![0.0; self.config.block_size];
        for (i, idx) in self.permutation.sub_samplers.iter().enumerate() {
            for (s, &k) in sub.iter_mut().zip(idx) {
                *s = x[k];
            }
            let block = self.bank.block_for(i);
            let scale = g * self.sub_scale(i, norm);
            let out = &mut y[self.offsets[i]..self.offsets[i + 1]];
            for (o, &row) in out.iter_mut().zip(&self.selection.rows[i]) {
                let dot: f64 = block.row(row).iter().zip(&sub).map(|(a, b)| a * b).sum();
                *o = scale * dot;
            }
        }
    }

    /// Measurements split per sub-signal, under the configured normalization.
    pub fn sub_signal_measurements(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        let y = self.apply(x)?;
        Ok((0..self.c())
            .map(|i| y[self.measurement_range(i)].to_vec())
            .collect())
    }

    /// `D_i · Φ^B_{a(i)}` as an `m_i × n_B` matrix, times the sub-signal scale
    /// (the global `1/√b` is excluded).
    pub fn effective_block(&self, i: usize, norm: Normalization) -> DMatrix<f64> {
        let block = self.bank.block_for(i);
        let rows = &self.selection.rows[i];
        let s = self.sub_scale(i, norm);
        DMatrix::from_fn(rows.len(), block.cols, |t, j| s * block.row(rows[t])[j])
    }

    /// Dense `m × n` matrix of the operator.
    pub fn densify(&self) -> Result<DMatrix<f64>> {
        if self.n() > DENSIFY_LIMIT {
            return Err(Error::DensifyRefused {
                n: self.n(),
                limit: DENSIFY_LIMIT,
            });
        }
        let mut dense = DMatrix::<f64>::zeros(self.m(), self.n());
        for (i, idx) in self.permutation.sub_samplers.iter().enumerate() {
            let block = self.bank.block_for(i);
            let scale = self.scale(i);
            for (t, &row) in self.selection.rows[i].iter().enumerate() {
                let out = self.offsets[i] + t;
                for (&k, &v) in idx.iter().zip(block.row(row)) {
                    dense[(out, k)] += scale * v;
                }
            }
        }
        Ok(dense)
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = OperatorDocument {
            format: OPERATOR_FORMAT.to_string(),
            config: self.config.clone(),
            m: self.m(),
            c: self.c(),
            d: self.bank.blocks.len(),
            sub_samplers: self.permutation.sub_samplers.clone(),
            rows: self.selection.rows.clone(),
            assignment: self.bank.assignment.clone(),
            blocks: self.bank.blocks.clone(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    /// Loads an operator document and checks its structural consistency.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: OperatorDocument = serde_json::from_str(text)?;
        if doc.format != OPERATOR_FORMAT {
            return Err(Error::Parse(format!("unsupported operator format `{}`", doc.format)));
        }
        let bad = |msg: &str| Err(Error::Parse(format!("inconsistent operator document: {msg}")));
        let cfg = &doc.config;
        let c = doc.sub_samplers.len();
        if doc.rows.len() != c || doc.assignment.len() != c || doc.c != c {
            return bad("sub-signal counts disagree");
        }
        if doc.blocks.len() != doc.d || doc.assignment.iter().any(|&a| a >= doc.d) {
            return bad("block assignment out of range");
        }
        for b in &doc.blocks {
            if b.cols != cfg.block_size || b.data.len() != b.rows * b.cols {
                return bad("block shape");
            }
        }
        for (i, idx) in doc.sub_samplers.iter().enumerate() {
            if idx.len() != cfg.block_size || idx.iter().any(|&k| k >= cfg.n) {
                return bad("sub-sampler index list");
            }
            let block = &doc.blocks[doc.assignment[i]];
            if doc.rows[i].iter().any(|&r| r >= block.rows) || doc.rows[i].is_empty() {
                return bad("row selection");
            }
        }
        let m: usize = doc.rows.iter().map(Vec::len).sum();
        if m != doc.m {
            return bad("measurement count");
        }
        Ok(Self::assemble(
            doc.config,
            RestrictedPermutation {
                sub_samplers: doc.sub_samplers,
            },
            RowSelection { rows: doc.rows },
            OrthoBlockBank {
                blocks: doc.blocks,
                assignment: doc.assignment,
            },
        ))
    }
}

impl LinearOperator for StructuredOperator {
    fn rows(&self) -> usize {
        self.m()
    }

    fn cols(&self) -> usize {
        self.n()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.apply_scaled(x, y, self.config.normalization);
    }

    fn adjoint_into(&self, y: &[f64], x: &mut [f64]) {
        x.iter_mut().for_each(|v| *v = 0.0);
        let mut acc = vec![0.0; self.config.block_size];
        for (i, idx) in self.permutation.sub_samplers.iter().enumerate() {
            acc.iter_mut().for_each(|v| *v = 0.0);
            let block = self.bank.block_for(i);
            let scale = self.scale(i);
            for (&yt, &row) in y[self.offsets[i]..self.offsets[i + 1]]
                .iter()
                .zip(&self.selection.rows[i])
            {
                let w = scale * yt;
                for (a, &b) in acc.iter_mut().zip(block.row(row)) {
                    *a += w * b;
                }
            }
            for (&k, &a) in idx.iter().zip(&acc) {
                x[k] += a;
            }
        }
    }
}
