use rand::seq::{index, SliceRandom};
use serde::{Deserialize, Serialize};

use crate::rng::Rng;

/// The `D` factor: for each sub-signal, the rows of its orthonormal block that produce measurements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowSelection {
    pub rows: Vec<Vec<usize>>,
}

impl RowSelection {
    /// `m_i` for every sub-signal.
    pub fn counts(&self) -> Vec<usize> {
        self.rows.iter().map(Vec::len).collect()
    }

    pub fn total(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }
}

/// `floor(m/c)` measurements each; the `m mod c` leftover go one apiece to
/// uniformly chosen distinct sub-signals.
pub fn equal_counts(m: usize, c: usize, rng: &mut Rng) -> Vec<usize> {
    let mut counts = vec![m / c; c];
    let rem = m % c;
    if rem > 0 {
        for i in index::sample(rng, c, rem) {
            counts[i] += 1;
        }
    }
    counts
}

/// Shared-block consumption: sub-signals take disjoint rows of a randomly
/// ordered block until it cannot serve the next request, then a fresh block
/// is opened. Returns the row lists and the block assignment.
pub fn shared_block_rows(
    counts: &[usize],
    block_size: usize,
    rng: &mut Rng,
) -> (RowSelection, Vec<usize>, usize) {
    let mut rows = Vec::with_capacity(counts.len());
    let mut assignment = Vec::with_capacity(counts.len());
    let mut order: Vec<usize> = Vec::new();
    let mut cursor = block_size;
    let mut blocks = 0usize;
    for &mi in counts {
        if cursor + mi > block_size {
            order = (0..block_size).collect();
            order.shuffle(rng);
            cursor = 0;
            blocks += 1;
        }
        rows.push(order[cursor..cursor + mi].to_vec());
        assignment.push(blocks - 1);
        cursor += mi;
    }
    (RowSelection { rows }, assignment, blocks)
}

/// One private block per sub-signal, `counts[i]` random distinct rows each.
pub fn distinct_block_rows(counts: &[usize], block_size: usize, rng: &mut Rng) -> RowSelection {
    let rows = counts
        .iter()
        .map(|&mi| index::sample(rng, block_size, mi).into_vec())
        .collect();
    RowSelection { rows }
}

/// Block-permuted selection with unequal sizes: every block keeps one random
/// row, the remaining `m − c` rows are a uniform subset of the rest.
pub fn uneven_block_rows(m: usize, c: usize, block_size: usize, rng: &mut Rng) -> RowSelection {
    let mut rows: Vec<Vec<usize>> = (0..c)
        .map(|_| vec![index::sample(rng, block_size, 1).index(0)])
        .collect();
    let pool: Vec<(usize, usize)> = (0..c)
        .flat_map(|i| (0..block_size).map(move |t| (i, t)))
        .filter(|&(i, t)| rows[i][0] != t)
        .collect();
    for k in index::sample(rng, pool.len(), m - c) {
        let (i, t) = pool[k];
        rows[i].push(t);
    }
    for list in &mut rows {
        list.sort_unstable();
    }
    RowSelection { rows }
}
