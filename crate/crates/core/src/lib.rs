//! Curvature-bound toolkit for geodesic metric spaces.
//!
//! The crate compares distances in a space against the constant-curvature
//! model surfaces `S²_k` and turns the comparisons into pass/fail verdicts and
//! quantitative curvature bounds.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod criteria;
pub mod estimator;
pub mod mesh;
pub mod model;
pub mod rng;
pub mod spaces;
pub mod tolerances;

pub use criteria::{CriteriaError, Criterion, DefectSign, Defects, TestOptions, TestOutcome, Verdict};
pub use estimator::{
    estimate_bounds, region_report, theorem_c_defect_profile, Classification, CurvatureEstimate,
    DefectProfile, EstimateOptions, EstimatorError, ProfileOptions,
};
pub use model::{ComparisonTriangle, ModelError, ModelParam, SideTriple};
pub use spaces::{
    eval, geodesic, reverse, subsegment, AnySpace, GeodesicSegment, GeodesicSpace, Seg, SpaceDescriptor,
    SpaceError,
};
pub use tolerances::{Tolerances, TOL};
