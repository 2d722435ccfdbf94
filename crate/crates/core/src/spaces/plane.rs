use std::f64::consts::TAU;

use rand::RngCore;

use super::{check_coords, uniform, GeodesicSegment, GeodesicSpace, Seg, SpaceError};

/// The Euclidean plane.
#[derive(Clone, Copy, Debug, Default)]
pub struct Plane;

#[derive(Clone, Copy, Debug)]
pub struct PlanePath {
    pub origin: [f64; 2],
    pub dir: [f64; 2],
}

impl Plane {
    pub fn new() -> Self {
        Plane
    }
}

impl GeodesicSpace for Plane {
    type Point = [f64; 2];
    type Path = PlanePath;

    fn id(&self) -> String {
        "plane".into()
    }

    fn distance(&self, a: &[f64; 2], b: &[f64; 2]) -> f64 {
        (b[0] - a[0]).hypot(b[1] - a[1])
    }

    fn geodesics(&self, a: &[f64; 2], b: &[f64; 2]) -> Vec<Seg<Self>> {
        let d = self.distance(a, b);
        let dir = if d > 0.0 {
            [(b[0] - a[0]) / d, (b[1] - a[1]) / d]
        } else {
            [1.0, 0.0]
        };
        vec![GeodesicSegment::new(*a, *b, d, PlanePath { origin: *a, dir })]
    }

    fn path_point(&self, path: &PlanePath, s: f64) -> [f64; 2] {
        [path.origin[0] + s * path.dir[0], path.origin[1] + s * path.dir[1]]
    }

    fn sample_ball(&self, center: &[f64; 2], radius: f64, rng: &mut dyn RngCore) -> [f64; 2] {
        let h = TAU * uniform(rng);
        let r = radius * uniform(rng);
        self.exp(center, h, r).expect("plane geodesics extend")
    }

    fn known_curvature(&self) -> Option<f64> {
        Some(0.0)
    }

    fn exp(&self, p: &[f64; 2], heading: f64, len: f64) -> Option<[f64; 2]> {
        Some([p[0] + len * heading.cos(), p[1] + len * heading.sin()])
    }

    fn coords(&self, p: &[f64; 2]) -> Vec<f64> {
        p.to_vec()
    }

    fn point_from_coords(&self, c: &[f64]) -> Result<[f64; 2], SpaceError> {
        check_coords(c, &[2])?;
        Ok([c[0], c[1]])
    }

    fn base_point(&self) -> [f64; 2] {
        [0.0, 0.0]
    }
}
