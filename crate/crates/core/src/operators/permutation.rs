use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, Rng};

/// The `R` factor: `c` sub-samplers, each selecting `n_B` distinct indices of the signal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictedPermutation {
    pub sub_samplers: Vec<Vec<usize>>,
}

impl RestrictedPermutation {
    pub fn len(&self) -> usize {
        self.sub_samplers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sub_samplers.is_empty()
    }

    /// `R = I`: sub-sampler `i` is the contiguous range `[i·n_B, (i+1)·n_B)`.
    pub fn identity_blocks(n: usize, block_size: usize) -> Self {
        let sub_samplers = (0..n / block_size)
            .map(|i| (i * block_size..(i + 1) * block_size).collect())
            .collect();
        RestrictedPermutation { sub_samplers }
    }

    /// A uniform random permutation of `[0, n)` cut into consecutive chunks of `n_B`.
    pub fn random_permutation(n: usize, block_size: usize, rng: &mut Rng) -> Self {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        let sub_samplers = perm.chunks(block_size).map(<[usize]>::to_vec).collect();
        RestrictedPermutation { sub_samplers }
    }

    /// `passes` independent restricted random permutation passes, stacked.
    pub fn restricted(n: usize, block_size: usize, passes: usize, rng: &mut Rng) -> Result<Self> {
        let mut sub_samplers = Vec::with_capacity(passes * n / block_size.max(1));
        for _ in 0..passes {
            sub_samplers.extend(rrp_pass(n, block_size, rng)?.sub_samplers);
        }
        Ok(RestrictedPermutation { sub_samplers })
    }

    /// Per-index selection counts across all sub-samplers.
    pub fn coverage(&self, n: usize) -> Vec<usize> {
        let mut counts = vec![0usize; n];
        for list in &self.sub_samplers {
            for &k in list {
                if k < n {
                    counts[k] += 1;
                }
            }
        }
        counts
    }
}

/// One restricted random permutation pass.
///
/// The signal is cut into `n_B` decimation groups of `g = n/n_B` consecutive
/// samples. Each group gets its own uniform permutation, and sub-sampler `i`
/// takes the `i`-th element of every group's permutation, so each of the `g`
/// sub-samplers is a random low-resolution version of the signal.
pub fn rrp_pass(n: usize, block_size: usize, rng: &mut Rng) -> Result<RestrictedPermutation> {
    if block_size == 0 || !n.is_multiple_of(block_size) {
        return Err(Error::InvalidConfig(format!(
            "block size n_B = {block_size} must divide n = {n}"
        )));
    }
    let group = n / block_size;
    let mut sub_samplers = vec![Vec::with_capacity(block_size); group];
    let mut perm: Vec<usize> = Vec::with_capacity(group);
    for j in 0..block_size {
        perm.clear();
        perm.extend(j * group..(j + 1) * group);
        perm.shuffle(rng);
        for (sampler, &idx) in sub_samplers.iter_mut().zip(&perm) {
            sampler.push(idx);
        }
    }
    Ok(RestrictedPermutation { sub_samplers })
}

/// Seeded single restricted random permutation pass (`c' = n/n_B` sub-samplers).
pub fn gen_rrp(n: usize, block_size: usize, seed: u64) -> Result<RestrictedPermutation> {
    rrp_pass(n, block_size, &mut rng_from_seed(seed))
}

/// Minimum and maximum number of times any index in `[0, n)` is selected.
pub fn compute_pq(r: &RestrictedPermutation, n: usize) -> (usize, usize) {
    let counts = r.coverage(n);
    let p = counts.iter().copied().min().unwrap_or(0);
    let q = counts.iter().copied().max().unwrap_or(0);
    (p, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn twelve_by_three_layout() {
        for seed in 0..20 {
            let r = gen_rrp(12, 3, seed).unwrap();
            assert_eq!(r.len(), 4);
            for j in 0..3 {
                let mut column: Vec<usize> = r.sub_samplers.iter().map(|s| s[j]).collect();
                assert!(column.iter().all(|&k| (4 * j..4 * j + 4).contains(&k)));
                column.sort_unstable();
                assert_eq!(column, (4 * j..4 * j + 4).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn single_group_is_identity() {
        let r = gen_rrp(8, 8, 99).unwrap();
        assert_eq!(r.sub_samplers, vec![(0..8).collect::<Vec<_>>()]);
    }

    #[test]
    fn deterministic_for_seed() {
        assert_eq!(gen_rrp(1024, 256, 7).unwrap(), gen_rrp(1024, 256, 7).unwrap());
        assert_ne!(gen_rrp(1024, 256, 7).unwrap(), gen_rrp(1024, 256, 8).unwrap());
    }

    #[test]
    fn rejects_non_divisor() {
        assert!(matches!(gen_rrp(10, 3, 0), Err(Error::InvalidConfig(_))));
        assert!(gen_rrp(10, 0, 0).is_err());
    }

    #[test]
    fn pq_by_hand() {
        let r = RestrictedPermutation {
            sub_samplers: vec![vec![0, 1], vec![0, 2], vec![1, 3]],
        };
        assert_eq!(compute_pq(&r, 4), (1, 2));
    }

    #[test]
    fn pq_of_identity_blocks() {
        assert_eq!(compute_pq(&RestrictedPermutation::identity_blocks(64, 16), 64), (1, 1));
    }

    #[test]
    fn pq_zero_when_index_missing() {
        let r = RestrictedPermutation {
            sub_samplers: vec![vec![0, 1]],
        };
        assert_eq!(compute_pq(&r, 3), (0, 1));
    }

    proptest! {
        #[test]
        fn restricted_passes_cover_each_index_b_times(
            log_g in 0u32..4, log_nb in 0u32..5, passes in 1usize..5, seed in any::<u64>()
        ) {
            let block = 1usize << log_nb;
            let n = block << log_g;
            let r = RestrictedPermutation::restricted(n, block, passes, &mut rng_from_seed(seed)).unwrap();
            prop_assert_eq!(r.len(), passes * n / block);
            prop_assert_eq!(compute_pq(&r, n), (passes, passes));
            for list in &r.sub_samplers {
                let mut sorted = list.clone();
                sorted.sort_unstable();
                sorted.dedup();
                prop_assert_eq!(sorted.len(), block);
            }
        }

        #[test]
        fn random_permutation_sorts_to_range(log_g in 0u32..4, log_nb in 0u32..5, seed in any::<u64>()) {
            let block = 1usize << log_nb;
            let n = block << log_g;
            let r = RestrictedPermutation::random_permutation(n, block, &mut rng_from_seed(seed));
            let mut all: Vec<usize> = r.sub_samplers.concat();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        }
    }
}
