//! Rate-region bounds: inner-bound corners, the erasure channel's exact
//! corners, the outer-bound attack polytope and the randomized-coding
//! region of an arbitrarily varying channel.

mod inner;
mod jahn;
mod polytope;

pub use inner::{erasure_inner_bound_exact, inner_bound_corner, CornerForm, InnerCorner, SearchConfig};
pub use jahn::{avmac_rate_region, mac_rate_region, simplex_grid, JahnCell};
pub use polytope::{attack_polytope_vertices, outer_bound_avmac, outer_bound_residual, AttackVertex};

use alloc::string::String;
use alloc::vec::Vec;

/// A rate pair in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RatePoint {
    pub r1: f64,
    pub r2: f64,
}

impl RatePoint {
    pub fn new(r1: f64, r2: f64) -> Self {
        Self { r1: r1.max(0.0), r2: r2.max(0.0) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Provenance {
    InnerCorner1,
    InnerCorner2,
    Jahn,
    MacCapacity,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegionSample {
    pub provenance: Provenance,
    pub parameters: Vec<(String, f64)>,
    pub points: Vec<RatePoint>,
    /// Per-input-pair bounds, for grid evaluations.
    pub cells: Vec<JahnCell>,
}
