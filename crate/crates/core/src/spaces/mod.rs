//! Cayley graphs of marked groups as proper geodesic spaces.
//!
//! The basepoint `o` is the identity; the orbit point `g·o` is identified
//! with `g`, so `d(g·o, h·o) = |g⁻¹h|` in the word metric.

mod ball;
mod cache;
mod group;
mod growth;
mod quotient;
mod word;

pub use ball::{
    all_geodesics, enumerate_ball, geodesic, sphere, sphere_counts, walk_ball, Ball, Sphere,
};
pub use cache::{ball_cache_path, enumerate_ball_cached, load_ball, save_ball};
pub use group::{FiniteGroup, GroupKind, GroupSpec, MarkedGroup, NfState};
pub use growth::{
    growth_exponent, log_add, poincare_from_log_terms, poincare_partial, Estimator,
    GrowthEstimate, PoincareParams, PoincareRecord, RadiusEstimate, SeriesVerdict,
};
pub use quotient::{abelian_kernel_sphere_counts, HomSpec, QuotientSpace};
pub use word::{parse_word, Element, Letter, MAX_RANK};

use serde::{Deserialize, Serialize};

/// Resource limits for enumerations.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budget {
    /// Maximum number of stored elements in a ball or BFS layer set.
    pub max_elements: usize,
    /// Maximum number of geodesics returned by exhaustive geodesic searches.
    pub max_geodesics: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_elements: 20_000_000,
            max_geodesics: 100_000,
        }
    }
}

impl Budget {
    pub fn elements(max_elements: usize) -> Self {
        Budget {
            max_elements,
            ..Budget::default()
        }
    }
}
