//! Kinematics, singularity analysis and workspace-topology classification
//! for 3R orthogonal manipulators with `r3 = 0`.
//!
//! Geometries are `(d2, d3, d4, r2)`; everything topological depends only on
//! the ratios to `d2`, so most routines normalize first.

pub mod aspects;
pub mod classify;
pub mod error;
pub mod exec;
pub mod features;
pub mod geometry;
pub mod ik;
pub mod kinematics;
pub mod poly;
pub mod surfaces;
pub mod sweep;
pub mod trace;
pub mod verify;

pub use classify::{
    classify, classify_by_surfaces, classify_numeric, nearest_boundary_distance, Agreement,
    Classification, Method, Wt,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use features::{analyze_features, count_features, FeatureCount, FeatureReport};
pub use geometry::{CartesianPoint, Geometry, HalfSectionPoint, JointConfig};
pub use ik::{inverse_kinematics, inverse_kinematics_default, IkSolutions};
pub use kinematics::{forward_kinematics, jacobian_det_closed, jacobian_det_numeric};
pub use surfaces::{surface_value, SurfaceAtlas, SurfaceId};
pub use sweep::{region_stats, sweep, PartitionRaster, RegionStats, SweepConfig};

pub use trace::{trace_singular_set, Branch, SingularCurve};
