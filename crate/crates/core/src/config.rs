//! Configuration constants shared across modules.
//!
//! Dimension caps can be raised (or lowered) for a whole process through the
//! `TROPI_MAX_DIM` environment variable, which overrides both lattice caps.

use std::sync::OnceLock;

/// Default cap on the lattice dimension for exact shortest-vector search.
pub const DEFAULT_SVP_MAX_DIM: usize = 8;
/// Default cap on the lattice dimension for certified covering radii.
pub const DEFAULT_COVERING_MAX_DIM: usize = 4;
/// Largest edge count accepted by the isomorphism backtracking.
pub const ISO_MAX_EDGES: usize = 12;
/// Largest genus accepted by the census.
pub const CENSUS_MAX_GENUS: usize = 5;
/// Default tolerance for length comparisons.
pub const LENGTH_TOL: f64 = 1e-9;
/// Largest net built for a Gromov–Hausdorff estimate; finer requests are
/// coarsened until they fit.
pub const NET_MAX_POINTS: usize = 4000;
/// Nets are subsampled to this size before packing-number bounds.
pub const PACKING_MAX_POINTS: usize = 400;

pub const MAX_DIM_ENV: &str = "TROPI_MAX_DIM";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimCaps {
    pub svp: usize,
    pub covering: usize,
}

impl Default for DimCaps {
    fn default() -> Self {
        Self { svp: DEFAULT_SVP_MAX_DIM, covering: DEFAULT_COVERING_MAX_DIM }
    }
}

impl DimCaps {
    fn from_env() -> Self {
        match std::env::var(MAX_DIM_ENV).ok().and_then(|s| s.trim().parse::<usize>().ok()) {
            Some(n) if n > 0 => Self { svp: n, covering: n },
            _ => Self::default(),
        }
    }
}

/// Process-wide dimension caps, read once from the environment.
pub fn dim_caps() -> DimCaps {
    static CAPS: OnceLock<DimCaps> = OnceLock::new();
    *CAPS.get_or_init(DimCaps::from_env)
}
