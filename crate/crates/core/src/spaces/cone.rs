use std::f64::consts::{PI, TAU};

use rand::RngCore;

use super::{check_coords, uniform, GeodesicSegment, GeodesicSpace, Seg, SpaceError};
use crate::tolerances::TOL;

/// Euclidean cone over a circle of length `perimeter`.
///
/// For `perimeter < 2π` the cone is flat away from its apex and has
/// curvature bounded below by 0; for `perimeter > 2π` it is bounded above.
#[derive(Clone, Copy, Debug)]
pub struct Cone {
    perimeter: f64,
}

/// Polar point `(r, θ)` with `θ ∈ [0, L)`. The apex is stored as `(0, 0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConePoint {
    pub r: f64,
    pub theta: f64,
}

#[derive(Clone, Copy, Debug)]
pub enum ConePath {
    /// Straight line in a planar unrolling. `start + s*dir` has polar angle
    /// measured from the ray `theta0`.
    Unrolled {
        start: [f64; 2],
        dir: [f64; 2],
        theta0: f64,
    },
    /// Down one ray to the apex, then out along another.
    ThroughApex { r1: f64, theta1: f64, theta2: f64 },
}

impl Cone {
    pub fn new(perimeter: f64) -> Result<Self, SpaceError> {
        if !perimeter.is_finite() || perimeter <= 0.0 {
            return Err(SpaceError::InvalidParameter(format!(
                "cone perimeter must be positive, got {perimeter}"
            )));
        }
        Ok(Cone { perimeter })
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    pub fn point(&self, r: f64, theta: f64) -> ConePoint {
        if r <= 0.0 {
            ConePoint { r: 0.0, theta: 0.0 }
        } else {
            ConePoint {
                r,
                theta: self.wrap(theta),
            }
        }
    }

    pub fn apex(&self) -> ConePoint {
        ConePoint { r: 0.0, theta: 0.0 }
    }

    fn wrap(&self, theta: f64) -> f64 {
        let t = theta.rem_euclid(self.perimeter);
        if t >= self.perimeter {
            0.0
        } else {
            t
        }
    }

    /// Length of the unrolled path sweeping angle `alpha` between radii.
    fn sweep_length(r1: f64, r2: f64, alpha: f64) -> f64 {
        if alpha >= PI {
            r1 + r2
        } else {
            let h = (0.5 * alpha).sin();
            ((r1 - r2).powi(2) + 4.0 * r1 * r2 * h * h).sqrt()
        }
    }

    /// Counter-clockwise and clockwise angular gaps from `a` to `b`.
    fn gaps(&self, a: &ConePoint, b: &ConePoint) -> (f64, f64) {
        let ccw = (b.theta - a.theta).rem_euclid(self.perimeter);
        (ccw, self.perimeter - ccw)
    }

    fn candidate(&self, a: &ConePoint, b: &ConePoint, alpha: f64, sign: f64) -> Seg<Self> {
        let len = Self::sweep_length(a.r, b.r, alpha);
        let path = if alpha >= PI {
            ConePath::ThroughApex {
                r1: a.r,
                theta1: a.theta,
                theta2: b.theta,
            }
        } else if a.r == 0.0 {
            ConePath::Unrolled {
                start: [0.0, 0.0],
                dir: [1.0, 0.0],
                theta0: b.theta,
            }
        } else {
            let end = [b.r * alpha.cos(), sign * b.r * alpha.sin()];
            let (dx, dy) = (end[0] - a.r, end[1]);
            let dir = if len > 0.0 {
                [dx / len, dy / len]
            } else {
                [1.0, 0.0]
            };
            ConePath::Unrolled {
                start: [a.r, 0.0],
                dir,
                theta0: a.theta,
            }
        };
        GeodesicSegment::new(*a, *b, len, path)
    }

    /// Arclength along the geodesic from `p` with `heading` at which it
    /// stops being minimal, or infinity if it never does (relevant for
    /// `L < 2π` only).
    pub fn cut_length(&self, p: &ConePoint, heading: f64) -> f64 {
        if p.r == 0.0 || self.perimeter >= TAU {
            return f64::INFINITY;
        }
        let half = 0.5 * self.perimeter;
        // The polar angle swept by the unrolled ray approaches |h|.
        let h = heading.rem_euclid(TAU);
        let h = if h > PI { TAU - h } else { h };
        if h <= half {
            return f64::INFINITY;
        }
        // Solve atan2(len sin h, r + len cos h) = half for len.
        p.r * half.sin() / (h - half).sin()
    }
}

impl GeodesicSpace for Cone {
    type Point = ConePoint;
    type Path = ConePath;

    fn id(&self) -> String {
        format!("cone(L={})", self.perimeter)
    }

    fn distance(&self, a: &ConePoint, b: &ConePoint) -> f64 {
        let (ccw, cw) = self.gaps(a, b);
        Self::sweep_length(a.r, b.r, ccw.min(cw))
    }

    fn geodesics(&self, a: &ConePoint, b: &ConePoint) -> Vec<Seg<Self>> {
        let (ccw, cw) = self.gaps(a, b);
        let l1 = Self::sweep_length(a.r, b.r, ccw);
        let l2 = Self::sweep_length(a.r, b.r, cw);
        let d = l1.min(l2);
        let tie = TOL.geo * d.max(1.0);
        // Paths touching the apex, or both going through it, coincide.
        let single = a.r == 0.0 || b.r == 0.0 || (ccw >= PI && cw >= PI);
        let mut out = Vec::with_capacity(2);
        if l1 <= d + tie {
            out.push(self.candidate(a, b, ccw, 1.0));
        }
        if l2 <= d + tie && !(single && !out.is_empty()) {
            out.push(self.candidate(a, b, cw, -1.0));
        }
        out
    }

    fn path_point(&self, path: &ConePath, s: f64) -> ConePoint {
        match *path {
            ConePath::Unrolled { start, dir, theta0 } => {
                let x = start[0] + s * dir[0];
                let y = start[1] + s * dir[1];
                let r = x.hypot(y);
                if r <= 1e-300 {
                    self.apex()
                } else {
                    self.point(r, theta0 + y.atan2(x))
                }
            }
            ConePath::ThroughApex { r1, theta1, theta2 } => {
                if s <= r1 {
                    self.point(r1 - s, theta1)
                } else {
                    self.point(s - r1, theta2)
                }
            }
        }
    }

    fn sample_ball(&self, center: &ConePoint, radius: f64, rng: &mut dyn RngCore) -> ConePoint {
        let h = TAU * uniform(rng);
        let r = radius * uniform(rng);
        self.exp(center, h, r).expect("cone geodesics extend")
    }

    fn known_curvature(&self) -> Option<f64> {
        None
    }

    /// At the apex the heading is the polar angle of the outgoing ray;
    /// elsewhere it is measured from the outward radial direction, positive
    /// toward increasing `θ`.
    fn exp(&self, p: &ConePoint, heading: f64, len: f64) -> Option<ConePoint> {
        if p.r == 0.0 {
            return Some(self.point(len, heading));
        }
        let x = p.r + len * heading.cos();
        let y = len * heading.sin();
        let r = x.hypot(y);
        if r <= 1e-300 {
            return Some(self.apex());
        }
        Some(self.point(r, p.theta + y.atan2(x)))
    }

    fn tie_pairs(&self, center: &ConePoint, radius: f64) -> Vec<(ConePoint, ConePoint)> {
        let half = 0.5 * self.perimeter;
        let mut out = Vec::new();
        for i in 1..=4 {
            let r = radius * i as f64 / 5.0;
            for j in 0..4 {
                let theta = center.theta + self.perimeter * j as f64 / 4.0;
                let a = self.point(r, theta);
                let b = self.point(0.5 * r, theta + half);
                if self.distance(center, &a) < radius && self.distance(center, &b) < radius {
                    out.push((a, b));
                }
            }
        }
        out
    }

    fn coords(&self, p: &ConePoint) -> Vec<f64> {
        vec![p.r, p.theta]
    }

    fn point_from_coords(&self, c: &[f64]) -> Result<ConePoint, SpaceError> {
        check_coords(c, &[2])?;
        if c[0] < 0.0 {
            return Err(SpaceError::BadCoordinates(format!("negative radius {}", c[0])));
        }
        Ok(self.point(c[0], c[1]))
    }

    fn base_point(&self) -> ConePoint {
        self.apex()
    }
}
