//! Minimal finite orbits of the joint `x -> 2x`, `x -> 3x` (mod 1) action on the
//! circle, their invariant counting measures, and surveys for orbits far from
//! uniformly distributed.
//!
//! Real-valued outputs are generic over [`Real`] (`f32` or `f64`); exact distances
//! use [`ExactRational`]. The `*64` aliases below fix the common `f64` choice.

pub mod error;
pub mod golden;
pub mod measures;
pub mod modarith;
pub mod orbits;
pub mod outliers;
pub mod scalar;
pub mod symbolic;

pub use error::{Error, Result};
pub use measures::{
    cdf_points, histogram, ks_distance, ks_distance_exact, left_heavy_count, mass_near, CdfPoint,
    ExactRational, Histogram,
};
pub use modarith::{divisors, mul_mod, subgroup_info, Modulus, SubgroupInfo};
pub use orbits::{
    canonical_of_pair, decompose, is_symmetric, mirror, orbit_of, pushforward, Decomposition,
    Method, Orbit, Pushforward, ReducedFraction,
};
pub use outliers::{
    rarity_statistic, select_outliers, shadow_estimate, shadow_report, survey, OutlierCriterion,
    ShadowPrediction, ShadowReport, SurveyRecord,
};
pub use scalar::Real;
pub use symbolic::{render, Bitmap, Triangle};

pub type Histogram64 = Histogram<f64>;
pub type Histogram32 = Histogram<f32>;
pub type CdfPoint64 = CdfPoint<f64>;
pub type ShadowPrediction64 = ShadowPrediction<f64>;
pub type ShadowReport64 = ShadowReport<f64>;
