use std::f64::consts::{PI, TAU};

use rand::RngCore;

use super::{check_coords, uniform, GeodesicSegment, GeodesicSpace, Seg, SpaceError};

/// Three half-lines glued at their origins.
#[derive(Clone, Copy, Debug, Default)]
pub struct Tripod;

/// Point at distance `r` from the branch point on ray `ray`. The branch point
/// itself is stored as ray 0, `r = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TripodPoint {
    pub ray: u8,
    pub r: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct TripodPath {
    pub from: TripodPoint,
    pub to: TripodPoint,
}

const HEADING_TOL: f64 = 1e-12;

impl TripodPoint {
    pub fn new(ray: u8, r: f64) -> Self {
        if r <= 0.0 {
            TripodPoint { ray: 0, r: 0.0 }
        } else {
            TripodPoint { ray, r }
        }
    }

    pub fn branch() -> Self {
        TripodPoint { ray: 0, r: 0.0 }
    }

    fn at_branch(&self) -> bool {
        self.r == 0.0
    }
}

impl Tripod {
    pub fn new() -> Self {
        Tripod
    }

    fn radial(a: &TripodPoint, b: &TripodPoint) -> bool {
        a.ray == b.ray || a.at_branch() || b.at_branch()
    }
}

fn near(angle: f64, target: f64) -> bool {
    let d = (angle - target).rem_euclid(TAU);
    d < HEADING_TOL || TAU - d < HEADING_TOL
}

impl GeodesicSpace for Tripod {
    type Point = TripodPoint;
    type Path = TripodPath;

    fn id(&self) -> String {
        "tripod".into()
    }

    fn distance(&self, a: &TripodPoint, b: &TripodPoint) -> f64 {
        if Self::radial(a, b) {
            (a.r - b.r).abs()
        } else {
            a.r + b.r
        }
    }

    fn geodesics(&self, a: &TripodPoint, b: &TripodPoint) -> Vec<Seg<Self>> {
        vec![GeodesicSegment::new(
            *a,
            *b,
            self.distance(a, b),
            TripodPath { from: *a, to: *b },
        )]
    }

    fn path_point(&self, path: &TripodPath, s: f64) -> TripodPoint {
        let (a, b) = (path.from, path.to);
        if Self::radial(&a, &b) {
            let ray = if a.at_branch() { b.ray } else { a.ray };
            let sign = if b.r >= a.r { 1.0 } else { -1.0 };
            TripodPoint::new(ray, a.r + sign * s)
        } else if s <= a.r {
            TripodPoint::new(a.ray, a.r - s)
        } else {
            TripodPoint::new(b.ray, s - a.r)
        }
    }

    fn sample_ball(&self, center: &TripodPoint, radius: f64, rng: &mut dyn RngCore) -> TripodPoint {
        let rho = radius * uniform(rng);
        let pick = uniform(rng);
        if center.at_branch() {
            return TripodPoint::new(((3.0 * pick) as u8).min(2), rho);
        }
        if pick < 0.5 || rho <= center.r {
            let r = if pick < 0.5 {
                center.r + rho
            } else {
                center.r - rho
            };
            return TripodPoint::new(center.ray, r);
        }
        // Past the branch point onto one of the other two rays.
        let other = (center.ray + 1 + ((pick - 0.5) * 4.0) as u8 % 2) % 3;
        TripodPoint::new(other, rho - center.r)
    }

    fn known_curvature(&self) -> Option<f64> {
        None
    }

    /// Headings 0 (outward) and π (inward, up to the branch point) at
    /// interior points; `2πi/3` selects ray `i` at the branch point.
    fn exp(&self, p: &TripodPoint, heading: f64, len: f64) -> Option<TripodPoint> {
        if p.at_branch() {
            return (0..3u8)
                .find(|&i| near(heading, TAU * i as f64 / 3.0))
                .map(|i| TripodPoint::new(i, len));
        }
        if near(heading, 0.0) {
            Some(TripodPoint::new(p.ray, p.r + len))
        } else if near(heading, PI) && len <= p.r {
            Some(TripodPoint::new(p.ray, p.r - len))
        } else {
            None
        }
    }

    fn coords(&self, p: &TripodPoint) -> Vec<f64> {
        vec![p.ray as f64, p.r]
    }

    fn point_from_coords(&self, c: &[f64]) -> Result<TripodPoint, SpaceError> {
        check_coords(c, &[2])?;
        let ray = c[0];
        if !(ray == 0.0 || ray == 1.0 || ray == 2.0) {
            return Err(SpaceError::BadCoordinates(format!(
                "ray index {ray} is not 0, 1 or 2"
            )));
        }
        if c[1] < 0.0 {
            return Err(SpaceError::BadCoordinates(format!("negative radius {}", c[1])));
        }
        Ok(TripodPoint::new(ray as u8, c[1]))
    }

    fn base_point(&self) -> TripodPoint {
        TripodPoint::branch()
    }
}
