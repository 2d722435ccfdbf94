//! Trigonometry of the two-dimensional model surfaces `S²_k`.
//!
//! All kernels work with three curvature-normalized functions of a length `d`:
//!
//! * `sn_k(d)`: `sin(√k d)/√k`, `d`, or `sinh(√-k d)/√-k`;
//! * `cs_k(d)`: `cos(√k d)`, `1`, or `cosh(√-k d)`;
//! * `md_k(d) = (1 - cs_k(d)) / k`, which tends to `d²/2` as `k → 0`.
//!
//! In terms of these the law of cosines reads
//! `md_k(c) = md_k(|a-b|) + 2 sn_k(a) sn_k(b) sin²(γ/2)`,
//! which has no cancellation for small `γ` and is continuous through `k = 0`.
//! The angle is recovered as
//! `γ = 2 atan2(√(md_k(c) - md_k(|a-b|)), √(md_k(a+b) - md_k(c)))`
//! where each difference is factored as `2 sn_k((x+y)/2) sn_k((x-y)/2)`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tolerances::TOL;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("non-finite input: {0}")]
    NotFinite(&'static str),
}

pub type Result<T> = std::result::Result<T, ModelError>;

/// Curvature constant `k` of the comparison surface.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ModelParam(f64);

impl ModelParam {
    pub const FLAT: ModelParam = ModelParam(0.0);

    pub fn new(k: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(ModelError::NotFinite("k"));
        }
        Ok(ModelParam(k))
    }

    #[inline]
    pub fn k(self) -> f64 {
        self.0
    }

    /// Length of a half great circle (`π/√k`), infinite for `k <= 0`.
    pub fn max_length(self) -> f64 {
        if self.0 > 0.0 {
            PI / self.0.sqrt()
        } else {
            f64::INFINITY
        }
    }

    /// Largest admissible triangle perimeter, including the safety margin
    /// against the antipodal degeneracy.
    pub fn max_perimeter(self) -> f64 {
        if self.0 > 0.0 {
            (2.0 * PI - TOL.positive_margin) / self.0.sqrt()
        } else {
            f64::INFINITY
        }
    }
}

impl TryFrom<f64> for ModelParam {
    type Error = ModelError;
    fn try_from(k: f64) -> Result<Self> {
        ModelParam::new(k)
    }
}

impl From<ModelParam> for f64 {
    fn from(k: ModelParam) -> f64 {
        k.0
    }
}

/// Side lengths of a triangle; the angle of interest sits between `a` and
/// `b`, opposite `c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SideTriple {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl SideTriple {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let s = SideTriple { a, b, c };
        s.validate()?;
        Ok(s)
    }

    pub fn perimeter(&self) -> f64 {
        self.a + self.b + self.c
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("b", self.b), ("c", self.c)] {
            if !v.is_finite() {
                return Err(ModelError::NotFinite(name));
            }
            if v < 0.0 {
                return Err(ModelError::Domain(format!("side {name} = {v} is negative")));
            }
        }
        let slack = TOL.tri * self.perimeter();
        let (lo, hi) = self.inequality_gaps();
        if lo < -slack || hi < -slack {
            return Err(ModelError::Domain(format!(
                "sides ({}, {}, {}) violate the triangle inequality",
                self.a, self.b, self.c
            )));
        }
        Ok(())
    }

    /// `(c - |a-b|, a+b-c)`; both are non-negative for a valid triple.
    fn inequality_gaps(&self) -> (f64, f64) {
        (self.c - (self.a - self.b).abs(), self.a + self.b - self.c)
    }

    fn check_admissible(&self, k: ModelParam) -> Result<()> {
        if k.k() > 0.0 && self.perimeter() >= k.max_perimeter() {
            return Err(ModelError::Domain(format!(
                "perimeter {} is not below 2π/√k = {} for k = {}",
                self.perimeter(),
                2.0 * PI / k.k().sqrt(),
                k.k()
            )));
        }
        Ok(())
    }
}

fn check_length(name: &'static str, d: f64) -> Result<()> {
    if !d.is_finite() {
        return Err(ModelError::NotFinite(name));
    }
    if d < 0.0 {
        return Err(ModelError::Domain(format!("length {name} = {d} is negative")));
    }
    Ok(())
}

fn check_below_half_circle(k: ModelParam, name: &'static str, d: f64) -> Result<()> {
    check_length(name, d)?;
    if d >= k.max_length() {
        return Err(ModelError::Domain(format!(
            "length {name} = {d} is not below π/√k = {} for k = {}",
            k.max_length(),
            k.k()
        )));
    }
    Ok(())
}

/// `sn_k(d)` for any real `d` (odd in `d`), no domain checks.
#[inline]
pub(crate) fn sn_raw(k: f64, d: f64) -> f64 {
    let x = k * d * d;
    if x.abs() < TOL.series_cutoff {
        d * (1.0 - x / 6.0 + x * x / 120.0)
    } else if k > 0.0 {
        let s = k.sqrt();
        (s * d).sin() / s
    } else {
        let s = (-k).sqrt();
        (s * d).sinh() / s
    }
}

/// `md_k(d) = (1 - cs_k(d))/k`, evaluated without cancellation.
#[inline]
pub(crate) fn md_raw(k: f64, d: f64) -> f64 {
    let x = k * d * d;
    if x.abs() < TOL.series_cutoff {
        0.5 * d * d * (1.0 - x / 12.0 + x * x / 360.0)
    } else if k > 0.0 {
        let h = (0.5 * k.sqrt() * d).sin();
        2.0 * h * h / k
    } else {
        let h = (0.5 * (-k).sqrt() * d).sinh();
        -2.0 * h * h / k
    }
}

/// Inverse of `md_k` on `[0, π/√k]` (or `[0, ∞)` for `k <= 0`).
#[inline]
pub(crate) fn md_inv(k: f64, m: f64) -> f64 {
    let m = m.max(0.0);
    let y = k * m;
    if y.abs() < TOL.series_cutoff {
        (2.0 * m).sqrt() * (1.0 + y / 12.0 + 3.0 * y * y / 160.0)
    } else if k > 0.0 {
        2.0 * (0.5 * y).sqrt().min(1.0).asin() / k.sqrt()
    } else {
        2.0 * (-0.5 * y).sqrt().asinh() / (-k).sqrt()
    }
}

/// Generalized cosine `cs_k(d)`.
pub fn generalized_cos(k: ModelParam, d: f64) -> Result<f64> {
    check_below_half_circle(k, "d", d)?;
    Ok(1.0 - k.k() * md_raw(k.k(), d))
}

/// Generalized sine `sn_k(d)`.
pub fn generalized_sin(k: ModelParam, d: f64) -> Result<f64> {
    check_below_half_circle(k, "d", d)?;
    Ok(sn_raw(k.k(), d))
}

/// Normalized versine `md_k(d)`; equals `d²/2` at `k = 0`.
pub fn normalized_versine(k: ModelParam, d: f64) -> Result<f64> {
    check_below_half_circle(k, "d", d)?;
    Ok(md_raw(k.k(), d))
}

/// Third side of the model triangle with sides `a`, `b` enclosing `gamma`.
pub fn side_from_angle(k: ModelParam, a: f64, b: f64, gamma: f64) -> Result<f64> {
    check_below_half_circle(k, "a", a)?;
    check_below_half_circle(k, "b", b)?;
    if !gamma.is_finite() {
        return Err(ModelError::NotFinite("gamma"));
    }
    if !(-TOL.angle..=PI + TOL.angle).contains(&gamma) {
        return Err(ModelError::Domain(format!("angle {gamma} is outside [0, π]")));
    }
    let gamma = gamma.clamp(0.0, PI);
    let kk = k.k();
    let h = (0.5 * gamma).sin();
    let m = md_raw(kk, (a - b).abs()) + 2.0 * sn_raw(kk, a) * sn_raw(kk, b) * h * h;
    Ok(md_inv(kk, m))
}

/// Angle at `p̃` of the comparison triangle with `|p̃q̃| = a`, `|p̃r̃| = b`,
/// `|q̃r̃| = c` in `S²_k`.
pub fn comparison_angle(k: ModelParam, sides: SideTriple) -> Result<f64> {
    sides.validate()?;
    sides.check_admissible(k)?;
    let SideTriple { a, b, c } = sides;
    if a <= TOL.degenerate || b <= TOL.degenerate {
        return Err(ModelError::Degenerate(format!(
            "adjacent side vanishes in ({a}, {b}, {c})"
        )));
    }
    let (lo, hi) = sides.inequality_gaps();
    let (lo, hi) = (lo.max(0.0), hi.max(0.0));
    let kk = k.k();
    let d = (a - b).abs();
    // Both products are non-negative: every argument is at most half the
    // perimeter, which is below π/√k when k > 0.
    let num = sn_raw(kk, 0.5 * (c + d)) * sn_raw(kk, 0.5 * lo);
    let den = sn_raw(kk, 0.5 * (a + b + c)) * sn_raw(kk, 0.5 * hi);
    let num = num.max(0.0);
    let den = den.max(0.0);
    Ok(2.0 * num.sqrt().atan2(den.sqrt()))
}

/// `comparison_angle(k, (leg1, leg2, hyp)) - π/2`.
///
/// Negative values mean the lower-bound (CBB) inequality holds strictly,
/// positive values the upper-bound (CBA) one.
pub fn pythagorean_defect(k: ModelParam, leg1: f64, leg2: f64, hyp: f64) -> Result<f64> {
    Ok(comparison_angle(k, SideTriple::new(leg1, leg2, hyp)?)? - FRAC_PI_2)
}

/// Distance from `q̃` to the point of `[p̃r̃]` at arclength `t` from `p̃`, in
/// the comparison triangle of `(|qp|, |qr|, |pr|)`.
pub fn comparison_distance_at(k: ModelParam, d_qp: f64, d_qr: f64, d_pr: f64, t: f64) -> Result<f64> {
    let sides = SideTriple::new(d_qp, d_pr, d_qr)?;
    sides.check_admissible(k)?;
    check_length("t", t)?;
    let slack = TOL.geo.max(TOL.tri * sides.perimeter());
    if t > d_pr + slack {
        return Err(ModelError::Domain(format!("t = {t} exceeds |pr| = {d_pr}")));
    }
    if t == 0.0 {
        return Ok(d_qp);
    }
    if t >= d_pr {
        return Ok(d_qr);
    }
    if d_qp <= TOL.degenerate {
        return Ok(t);
    }
    let angle = comparison_angle(k, sides)?;
    side_from_angle(k, d_qp, t, angle)
}

/// A triangle in `S²_k` given by its sides, with all three angles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTriangle {
    pub k: ModelParam,
    pub sides: SideTriple,
    /// Angles opposite `sides.a`, `sides.b`, `sides.c` respectively.
    pub angles: [f64; 3],
}

impl ComparisonTriangle {
    pub fn new(k: ModelParam, sides: SideTriple) -> Result<Self> {
        let SideTriple { a, b, c } = sides;
        let opp_a = comparison_angle(k, SideTriple { a: b, b: c, c: a })?;
        let opp_b = comparison_angle(k, SideTriple { a: c, b: a, c: b })?;
        let opp_c = comparison_angle(k, SideTriple { a, b, c })?;
        Ok(ComparisonTriangle {
            k,
            sides,
            angles: [opp_a, opp_b, opp_c],
        })
    }

    pub fn angle_sum(&self) -> f64 {
        self.angles.iter().sum()
    }
}
