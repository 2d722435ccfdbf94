use std::f64::consts::{PI, TAU};

use rand::RngCore;

use super::v3::{self, V};
use super::{check_coords, check_curvature, uniform, GeodesicSegment, GeodesicSpace, Seg, SpaceError};
use crate::tolerances::TOL;

/// Round sphere of curvature `k > 0`, i.e. radius `1/√k`.
///
/// Points are stored as unit vectors; lengths are scaled by the radius.
#[derive(Clone, Copy, Debug)]
pub struct Sphere {
    k: f64,
    radius: f64,
}

/// Great circle through `origin` with unit tangent `dir`.
#[derive(Clone, Copy, Debug)]
pub struct SpherePath {
    pub origin: V,
    pub dir: V,
}

impl Sphere {
    pub fn new(k: f64) -> Result<Self, SpaceError> {
        check_curvature(k, true)?;
        Ok(Sphere {
            k,
            radius: 1.0 / k.sqrt(),
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Unit vector for ambient coordinates of any positive norm.
    pub fn point(&self, x: V) -> Result<V, SpaceError> {
        let n = v3::norm(x);
        if !(n > 0.0) || !n.is_finite() {
            return Err(SpaceError::BadCoordinates("zero or non-finite vector".into()));
        }
        Ok(v3::scale(x, 1.0 / n))
    }

    /// Orthonormal tangent frame at `p`; the first vector comes from the
    /// coordinate axis least aligned with `p`.
    pub fn frame(p: V) -> (V, V) {
        let mut axis = 0;
        for i in 1..3 {
            if p[i].abs() < p[axis].abs() {
                axis = i;
            }
        }
        let mut e = [0.0; 3];
        e[axis] = 1.0;
        let e1 = v3::normalize(v3::lin(e, 1.0, p, -p[axis]));
        let e2 = v3::cross(p, e1);
        (e1, e2)
    }

    /// Angle subtended at the center (unit-sphere distance).
    pub fn central_angle(a: V, b: V) -> f64 {
        v3::norm(v3::cross(a, b)).atan2(v3::dot(a, b))
    }

    /// Unit tangent at `a` toward `b`, if `b` is neither `a` nor antipodal.
    fn direction(a: V, b: V) -> Option<V> {
        let w = v3::lin(b, 1.0, a, -v3::dot(a, b));
        let n = v3::norm(w);
        if n > 1e-15 {
            Some(v3::scale(w, 1.0 / n))
        } else {
            None
        }
    }

    pub(crate) fn shoot(&self, p: V, dir: V, len: f64) -> V {
        let a = len / self.radius;
        v3::normalize(v3::lin(p, a.cos(), dir, a.sin()))
    }

    pub(crate) fn heading_dir(p: V, heading: f64) -> V {
        let (e1, e2) = Self::frame(p);
        v3::lin(e1, heading.cos(), e2, heading.sin())
    }
}

impl GeodesicSpace for Sphere {
    type Point = V;
    type Path = SpherePath;

    fn id(&self) -> String {
        format!("sphere(k={})", self.k)
    }

    fn distance(&self, a: &V, b: &V) -> f64 {
        self.radius * Self::central_angle(*a, *b)
    }

    fn geodesics(&self, a: &V, b: &V) -> Vec<Seg<Self>> {
        let theta = Self::central_angle(*a, *b);
        let d = self.radius * theta;
        match Self::direction(*a, *b) {
            Some(dir) if theta < PI - TOL.tie => {
                vec![GeodesicSegment::new(*a, *b, d, SpherePath { origin: *a, dir })]
            }
            _ if theta < 0.5 * PI => {
                // Coincident points.
                let (e1, _) = Self::frame(*a);
                vec![GeodesicSegment::new(
                    *a,
                    *b,
                    d,
                    SpherePath { origin: *a, dir: e1 },
                )]
            }
            _ => {
                // Antipodal: a whole circle of minimal geodesics; report two.
                let dir = Self::direction(*a, *b).unwrap_or_else(|| Self::frame(*a).0);
                [dir, v3::scale(dir, -1.0)]
                    .into_iter()
                    .map(|dir| GeodesicSegment::new(*a, *b, d, SpherePath { origin: *a, dir }))
                    .collect()
            }
        }
    }

    fn path_point(&self, path: &SpherePath, s: f64) -> V {
        self.shoot(path.origin, path.dir, s)
    }

    fn sample_ball(&self, center: &V, radius: f64, rng: &mut dyn RngCore) -> V {
        let h = TAU * uniform(rng);
        let r = radius.min(PI * self.radius) * uniform(rng);
        self.shoot(*center, Self::heading_dir(*center, h), r)
    }

    fn known_curvature(&self) -> Option<f64> {
        Some(self.k)
    }

    fn exp(&self, p: &V, heading: f64, len: f64) -> Option<V> {
        Some(self.shoot(*p, Self::heading_dir(*p, heading), len))
    }

    fn tie_pairs(&self, center: &V, radius: f64) -> Vec<(V, V)> {
        if radius >= 0.5 * PI * self.radius {
            let (e1, _) = Self::frame(*center);
            let a = self.shoot(*center, e1, 0.5 * PI * self.radius);
            vec![(a, v3::scale(a, -1.0))]
        } else {
            Vec::new()
        }
    }

    fn coords(&self, p: &V) -> Vec<f64> {
        v3::scale(*p, self.radius).to_vec()
    }

    fn point_from_coords(&self, c: &[f64]) -> Result<V, SpaceError> {
        check_coords(c, &[3])?;
        self.point([c[0], c[1], c[2]])
    }

    fn base_point(&self) -> V {
        [0.0, 0.0, 1.0]
    }
}
