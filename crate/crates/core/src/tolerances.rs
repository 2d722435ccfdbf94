//! Numerical tolerances shared by every module.
//!
//! Everything that compares floating point values against a threshold reads it
//! from here, so a run can be reproduced from a single record.

use serde::{Deserialize, Serialize};

/// Central tolerance record.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Triangle-inequality slack, relative to the perimeter.
    pub tri: f64,
    /// Angle agreement for round trips (radians).
    pub angle: f64,
    /// Largest excursion outside `[-1, 1]` (or its equivalent) that may be clamped.
    pub clamp: f64,
    /// `|k| d^2` below which the curvature kernels switch to power series.
    pub series_cutoff: f64,
    /// Perimeter margin for `k > 0`, in units of `1/sqrt(k)`.
    pub positive_margin: f64,
    /// Point equality in ambient coordinates.
    pub pt: f64,
    /// Length agreement along geodesics.
    pub geo: f64,
    /// Two minima closer than this (relative to `max(1, d)`) are ties.
    pub tie: f64,
    /// Adjacent sides shorter than this make an angle undefined.
    pub degenerate: f64,
    /// Absolute floor of the verdict tolerance.
    pub verdict_abs: f64,
    /// Coefficient of the scale-dependent verdict tolerance.
    pub verdict_coeff: f64,
    /// Interior margin for feet of perpendiculars, relative to segment length.
    pub interior_margin: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        tri: 1e-9,
        angle: 1e-9,
        clamp: 1e-9,
        series_cutoff: 1e-8,
        positive_margin: 1e-6,
        pt: 1e-10,
        geo: 1e-9,
        tie: 1e-9,
        degenerate: 1e-13,
        verdict_abs: 1e-9,
        verdict_coeff: 1e-4,
        interior_margin: 1e-3,
    };

    /// Verdict tolerance for angle-valued defects at a configuration of the
    /// given diameter: `max(abs, coeff * scale^2)`.
    pub fn angle_verdict(&self, scale: f64) -> f64 {
        self.verdict_abs.max(self.verdict_coeff * scale * scale)
    }

    /// Verdict tolerance for length-valued defects. A curvature error of `dk`
    /// moves a distance by roughly `dk * scale^3`, hence the cubic term.
    pub fn length_verdict(&self, scale: f64) -> f64 {
        (self.verdict_abs * scale).max(self.verdict_coeff * scale * scale * scale)
    }

    /// Copy with the scale-dependent verdict coefficient multiplied by `factor`.
    pub fn with_verdict_scale(mut self, factor: f64) -> Self {
        self.verdict_coeff *= factor;
        self
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

pub const TOL: Tolerances = Tolerances::DEFAULT;
