use rand::RngCore;

use super::sphere::{Sphere, SpherePath};
use super::v3::{self, V};
use super::{check_coords, GeodesicSpace, Seg, SpaceError};

/// The smaller closed region of the sphere bounded by a geodesic triangle.
///
/// The region is convex, so its intrinsic metric is the restriction of the
/// ambient one.
#[derive(Clone, Debug)]
pub struct SphericalTriangle {
    sphere: Sphere,
    vertices: [V; 3],
    /// Rows of the inverse of the matrix with the vertices as columns, so
    /// that `inv[i]·x` is the barycentric-like weight of vertex `i`.
    inv: [V; 3],
}

const MEMBER_TOL: f64 = 1e-12;
const MAX_REJECTIONS: usize = 100_000;

impl SphericalTriangle {
    /// Vertices are ambient vectors of any positive length.
    pub fn new(k: f64, vertices: [V; 3]) -> Result<Self, SpaceError> {
        let sphere = Sphere::new(k)?;
        let mut vs = [[0.0; 3]; 3];
        for (i, v) in vertices.iter().enumerate() {
            vs[i] = sphere
                .point(*v)
                .map_err(|e| SpaceError::InvalidParameter(format!("vertex {i}: {e}")))?;
        }
        // Three unit vectors lie in an open hemisphere bounding a proper
        // triangle exactly when they are linearly independent.
        let c12 = v3::cross(vs[1], vs[2]);
        let c20 = v3::cross(vs[2], vs[0]);
        let c01 = v3::cross(vs[0], vs[1]);
        let det = v3::dot(vs[0], c12);
        if det.abs() < 1e-9 {
            return Err(SpaceError::InvalidParameter(
                "vertices lie on a great circle and do not bound a triangle in an open hemisphere".into(),
            ));
        }
        let inv = [
            v3::scale(c12, 1.0 / det),
            v3::scale(c20, 1.0 / det),
            v3::scale(c01, 1.0 / det),
        ];
        Ok(SphericalTriangle {
            sphere,
            vertices: vs,
            inv,
        })
    }

    /// The octant with vertices on the three positive axes.
    pub fn octant(k: f64) -> Result<Self, SpaceError> {
        Self::new(k, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    pub fn sphere(&self) -> &Sphere {
        &self.sphere
    }

    pub fn vertices(&self) -> [V; 3] {
        self.vertices
    }

    pub fn weights(&self, x: V) -> V {
        [
            v3::dot(self.inv[0], x),
            v3::dot(self.inv[1], x),
            v3::dot(self.inv[2], x),
        ]
    }

    pub fn contains(&self, x: &V) -> bool {
        self.weights(*x).iter().all(|w| *w >= -MEMBER_TOL)
    }

    /// Normalized centroid of the vertices.
    pub fn centroid(&self) -> V {
        let [a, b, c] = self.vertices;
        v3::normalize(v3::add(v3::add(a, b), c))
    }
}

impl GeodesicSpace for SphericalTriangle {
    type Point = V;
    type Path = SpherePath;

    fn id(&self) -> String {
        format!("spherical_triangle(k={})", self.sphere.k())
    }

    fn distance(&self, a: &V, b: &V) -> f64 {
        self.sphere.distance(a, b)
    }

    fn geodesics(&self, a: &V, b: &V) -> Vec<Seg<Self>> {
        self.sphere.geodesics(a, b)
    }

    fn path_point(&self, path: &SpherePath, s: f64) -> V {
        self.sphere.path_point(path, s)
    }

    /// Rejection sampling from the ambient ball; falls back to the center
    /// (which is in the region) if the region is hit too rarely.
    fn sample_ball(&self, center: &V, radius: f64, rng: &mut dyn RngCore) -> V {
        for _ in 0..MAX_REJECTIONS {
            let x = self.sphere.sample_ball(center, radius, rng);
            if self.contains(&x) {
                return x;
            }
        }
        *center
    }

    fn known_curvature(&self) -> Option<f64> {
        Some(self.sphere.k())
    }

    fn exp(&self, p: &V, heading: f64, len: f64) -> Option<V> {
        let x = self.sphere.exp(p, heading, len)?;
        self.contains(&x).then_some(x)
    }

    fn coords(&self, p: &V) -> Vec<f64> {
        self.sphere.coords(p)
    }

    fn point_from_coords(&self, c: &[f64]) -> Result<V, SpaceError> {
        check_coords(c, &[3])?;
        let p = self.sphere.point_from_coords(c)?;
        if !self.contains(&p) {
            return Err(SpaceError::BadCoordinates(format!(
                "({}, {}, {}) is outside the triangle",
                c[0], c[1], c[2]
            )));
        }
        Ok(p)
    }

    fn base_point(&self) -> V {
        self.centroid()
    }
}
