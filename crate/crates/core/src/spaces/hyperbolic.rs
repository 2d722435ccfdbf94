use std::f64::consts::TAU;

use rand::RngCore;

use super::v3::V;
use super::{check_coords, check_curvature, uniform, GeodesicSegment, GeodesicSpace, Seg, SpaceError};

/// Hyperbolic plane of curvature `k < 0` in the hyperboloid model.
///
/// Points are stored on the unit hyperboloid `x² + y² - t² = -1, t > 0`;
/// lengths are scaled by `R = 1/√-k`.
#[derive(Clone, Copy, Debug)]
pub struct Hyperbolic {
    k: f64,
    radius: f64,
}

/// Geodesic through `origin` with unit (spacelike) tangent `dir`.
#[derive(Clone, Copy, Debug)]
pub struct HyperbolicPath {
    pub origin: V,
    pub dir: V,
}

fn minkowski(a: V, b: V) -> f64 {
    a[0] * b[0] + a[1] * b[1] - a[2] * b[2]
}

fn lift(x: f64, y: f64) -> V {
    [x, y, (1.0 + x * x + y * y).sqrt()]
}

fn reproject(p: V) -> V {
    lift(p[0], p[1])
}

impl Hyperbolic {
    pub fn new(k: f64) -> Result<Self, SpaceError> {
        check_curvature(k, false)?;
        Ok(Hyperbolic {
            k,
            radius: 1.0 / (-k).sqrt(),
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Distance on the unit hyperboloid, from the Minkowski norm of the
    /// chord, which stays accurate for nearby points.
    fn unit_distance(a: V, b: V) -> f64 {
        let w = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let q = minkowski(w, w).max(0.0);
        2.0 * (0.5 * q.sqrt()).asinh()
    }

    /// Minkowski-orthonormal tangent frame at `p`: the boost taking the
    /// origin to `p` applied to the standard axes.
    pub fn frame(p: V) -> (V, V) {
        let t = p[2];
        let boost = |v: [f64; 2]| {
            let uv = p[0] * v[0] + p[1] * v[1];
            let c = uv / (1.0 + t);
            [v[0] + c * p[0], v[1] + c * p[1], uv]
        };
        (boost([1.0, 0.0]), boost([0.0, 1.0]))
    }

    fn shoot(&self, p: V, dir: V, len: f64) -> V {
        let a = len / self.radius;
        let (c, s) = (a.cosh(), a.sinh());
        reproject([p[0] * c + dir[0] * s, p[1] * c + dir[1] * s, 0.0])
    }

    fn heading_dir(p: V, heading: f64) -> V {
        let (e1, e2) = Self::frame(p);
        let (c, s) = (heading.cos(), heading.sin());
        [
            e1[0] * c + e2[0] * s,
            e1[1] * c + e2[1] * s,
            e1[2] * c + e2[2] * s,
        ]
    }
}

impl GeodesicSpace for Hyperbolic {
    type Point = V;
    type Path = HyperbolicPath;

    fn id(&self) -> String {
        format!("hyperbolic(k={})", self.k)
    }

    fn distance(&self, a: &V, b: &V) -> f64 {
        self.radius * Self::unit_distance(*a, *b)
    }

    fn geodesics(&self, a: &V, b: &V) -> Vec<Seg<Self>> {
        let d = Self::unit_distance(*a, *b);
        let dir = if d > 1e-300 {
            // u = ((b - a) - 2 sinh²(d/2) a) / sinh d
            let h = (0.5 * d).sinh();
            let c = 2.0 * h * h;
            let s = d.sinh();
            [
                (b[0] - a[0] - c * a[0]) / s,
                (b[1] - a[1] - c * a[1]) / s,
                (b[2] - a[2] - c * a[2]) / s,
            ]
        } else {
            Self::frame(*a).0
        };
        vec![GeodesicSegment::new(
            *a,
            *b,
            self.radius * d,
            HyperbolicPath { origin: *a, dir },
        )]
    }

    fn path_point(&self, path: &HyperbolicPath, s: f64) -> V {
        self.shoot(path.origin, path.dir, s)
    }

    fn sample_ball(&self, center: &V, radius: f64, rng: &mut dyn RngCore) -> V {
        let h = TAU * uniform(rng);
        let r = radius * uniform(rng);
        self.shoot(*center, Self::heading_dir(*center, h), r)
    }

    fn known_curvature(&self) -> Option<f64> {
        Some(self.k)
    }

    fn exp(&self, p: &V, heading: f64, len: f64) -> Option<V> {
        Some(self.shoot(*p, Self::heading_dir(*p, heading), len))
    }

    fn coords(&self, p: &V) -> Vec<f64> {
        p.iter().map(|v| v * self.radius).collect()
    }

    /// Accepts `(x, y)` or `(x, y, t)` on the hyperboloid of radius `R`;
    /// `t` is recomputed from `x, y`.
    fn point_from_coords(&self, c: &[f64]) -> Result<V, SpaceError> {
        check_coords(c, &[2, 3])?;
        let (x, y) = (c[0] / self.radius, c[1] / self.radius);
        let p = lift(x, y);
        if c.len() == 3 && (c[2] / self.radius - p[2]).abs() > 1e-9 * p[2] {
            return Err(SpaceError::BadCoordinates(format!(
                "({}, {}, {}) is not on the hyperboloid of radius {}",
                c[0], c[1], c[2], self.radius
            )));
        }
        Ok(p)
    }

    fn base_point(&self) -> V {
        [0.0, 0.0, 1.0]
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::super::*;
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn orthogonal_unit_geodesics() {
        let h = Hyperbolic::new(-1.0).unwrap();
        let o = h.base_point();
        let q = h.exp(&o, 0.0, 1.0).unwrap();
        let r = h.exp(&o, FRAC_PI_2, 1.0).unwrap();
        let want = (1.0f64.cosh().powi(2)).acosh();
        assert!((h.distance(&q, &r) - want).abs() < 1e-14);
    }

    #[test]
    fn matches_arccosh_formula() {
        let h = Hyperbolic::new(-1.0).unwrap();
        let a = lift(0.3, -1.2);
        let b = lift(2.0, 0.7);
        let want = (-minkowski(a, b)).acosh();
        assert!((h.distance(&a, &b) - want).abs() < 1e-13);
    }

    #[test]
    fn frame_is_orthonormal() {
        let h = Hyperbolic::new(-1.0).unwrap();
        let mut r = rng(5);
        for _ in 0..100 {
            let p = h.sample_ball(&h.base_point(), 4.0, &mut r);
            let (e1, e2) = Hyperbolic::frame(p);
            assert!(minkowski(p, e1).abs() < 1e-12);
            assert!(minkowski(p, e2).abs() < 1e-12);
            assert!(minkowski(e1, e2).abs() < 1e-12);
            assert!((minkowski(e1, e1) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn metric_and_minimality() {
        for k in [-1.0, -0.25, -4.0] {
            let h = Hyperbolic::new(k).unwrap();
            let c = h.point_from_coords(&[0.1, 0.2]).unwrap();
            check_metric(&h, &c, 2.0 * h.radius(), 10_000, 1e-10);
            check_subsegments(&h, &c, &lift(1.0, -0.4), 1e-11);
        }
    }

    #[test]
    fn scaled_right_angle_is_cosh_law() {
        let h = Hyperbolic::new(-4.0).unwrap();
        let p = h.point_from_coords(&[0.2, 0.1]).unwrap();
        let q = h.exp(&p, 1.0, 0.3).unwrap();
        let r = h.exp(&p, 1.0 + FRAC_PI_2, 0.2).unwrap();
        let c = h.distance(&q, &r);
        let want = ((2.0 * 0.3f64).cosh() * (2.0 * 0.2f64).cosh()).acosh() / 2.0;
        assert!((c - want).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Hyperbolic::new(0.0).is_err());
        assert!(Hyperbolic::new(1.0).is_err());
        let h = Hyperbolic::new(-1.0).unwrap();
        assert!(h.point_from_coords(&[1.0, 0.0, 1.0]).is_err());
        assert!(h.point_from_coords(&[1.0, 0.0, 2f64.sqrt()]).is_ok());
    }
}
