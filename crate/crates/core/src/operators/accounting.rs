use serde::Serialize;

use crate::config::{Scheme, SchemeConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StorageMode {
    /// One operator over the vectorized signal.
    FrameBased,
    /// One operator per image axis (Kronecker sampling); counts cover both axes.
    Separable,
}

/// Distinct stored scalars of a scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StorageProfile {
    pub phi_floats: usize,
    pub r_ints: usize,
    pub d_ints: usize,
}

/// Arithmetic cost of one acquisition `y = Φx`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SamplingCost {
    pub adds: usize,
    pub mults: usize,
}

/// Storage needed by `config`. In [`StorageMode::Separable`] the config
/// describes one axis and the result is doubled for the two axes.
///
/// `R` and `D` are stored as index vectors (`b·n` and `m` integers) and vanish
/// when they are identities. Only the orthonormal rows that actually produce a
/// measurement are stored, so `Φ` costs `m · n_B` floats.
pub fn storage_profile(config: &SchemeConfig, mode: StorageMode) -> StorageProfile {
    let m = config.measurements();
    let implicit_rd = matches!(config.scheme, Scheme::FullGrm | Scheme::Bcs);
    let axis = StorageProfile {
        phi_floats: m * config.block_size,
        r_ints: if implicit_rd { 0 } else { config.passes * config.n },
        d_ints: if implicit_rd { 0 } else { m },
    };
    match mode {
        StorageMode::FrameBased => axis,
        StorageMode::Separable => StorageProfile {
            phi_floats: 2 * axis.phi_floats,
            r_ints: 2 * axis.r_ints,
            d_ints: 2 * axis.d_ints,
        },
    }
}

/// `R` and `D` are index gathers, so only the `Σ m_i` inner products of length
/// `n_B` cost arithmetic (`m·n` for the full matrix).
pub fn sampling_cost(config: &SchemeConfig) -> SamplingCost {
    let m = config.measurements();
    let per = m * config.block_size;
    SamplingCost { adds: per, mults: per }
}

/// Per-axis configuration of a separable scheme on a `side × side` image at total subrate `r`:
/// each axis keeps `floor(√r · side)` measurements.
pub fn separable_axis_config(
    scheme: Scheme,
    side: usize,
    block_size: usize,
    total_subrate: f64,
    passes: usize,
) -> SchemeConfig {
    SchemeConfig::new(scheme, side, block_size, total_subrate.sqrt(), passes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_table_columns() {
        let rsrm1 = separable_axis_config(Scheme::Rsrm, 256, 128, 0.25, 1);
        assert_eq!(
            storage_profile(&rsrm1, StorageMode::Separable),
            StorageProfile { phi_floats: 2 * 128 * 128, r_ints: 2 * 256, d_ints: 2 * 128 }
        );
        let rsrm4 = separable_axis_config(Scheme::Rsrm, 256, 128, 0.25, 4);
        assert_eq!(storage_profile(&rsrm4, StorageMode::Separable).r_ints, 8 * 256);
        let bcs = separable_axis_config(Scheme::Bcs, 256, 128, 0.25, 1);
        assert_eq!(
            storage_profile(&bcs, StorageMode::Separable),
            StorageProfile { phi_floats: 2 * 128 * 128, r_ints: 0, d_ints: 0 }
        );
        let kcs = separable_axis_config(Scheme::FullGrm, 256, 256, 0.25, 1);
        assert_eq!(storage_profile(&kcs, StorageMode::Separable).phi_floats, 2 * 128 * 256);
    }

    #[test]
    fn frame_based_index_counts() {
        let cfg = SchemeConfig::new(Scheme::Rsrm, 256 * 256, 128, 0.25, 4);
        let p = storage_profile(&cfg, StorageMode::FrameBased);
        assert_eq!(p.r_ints, 4 * 256 * 256);
        assert_eq!(p.d_ints, 128 * 128);
    }

    #[test]
    fn costs() {
        let rsrm = SchemeConfig::new(Scheme::Rsrm, 1024, 256, 0.25, 1);
        assert_eq!(sampling_cost(&rsrm).mults, 65536);
        let bcs = SchemeConfig::new(Scheme::Bcs, 1024, 256, 0.25, 1);
        assert_eq!(sampling_cost(&bcs), sampling_cost(&rsrm));
        let rsrm8 = SchemeConfig::new(Scheme::Rsrm, 1024, 256, 0.25, 8);
        assert_eq!(sampling_cost(&rsrm8), sampling_cost(&rsrm));
        assert_eq!(sampling_cost(&SchemeConfig::full_grm(1024, 0.25)).mults, 262144);
    }
}
