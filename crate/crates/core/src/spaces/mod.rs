//! Geodesic metric spaces with analytic distances and minimal geodesics.

use std::fmt::Debug;

use rand::RngCore;
use thiserror::Error;

mod cone;
mod descriptor;
mod hyperbolic;
mod plane;
mod sphere;
mod spherical_triangle;
mod tripod;

pub use cone::{Cone, ConePath, ConePoint};
pub use descriptor::{AnySpace, MeshSource, SpaceDescriptor, DESCRIPTOR_VERSION};
pub use hyperbolic::{Hyperbolic, HyperbolicPath};
pub use plane::{Plane, PlanePath};
pub use sphere::{Sphere, SpherePath};
pub use spherical_triangle::SphericalTriangle;
pub use tripod::{Tripod, TripodPath, TripodPoint};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpaceError {
    #[error("invalid space parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid point coordinates: {0}")]
    BadCoordinates(String),
    #[error("invalid space descriptor: {0}")]
    Descriptor(String),
    #[error(transparent)]
    Mesh(#[from] crate::mesh::MeshError),
}

/// A geodesic metric space in which distances and all minimal geodesics
/// between two points can be computed.
///
/// Implementations are immutable; randomness is always supplied by the caller.
pub trait GeodesicSpace: Sync {
    type Point: Clone + Debug + PartialEq + Send + Sync;
    /// Arclength-parametrized curve carrying one or more minimal geodesics.
    type Path: Clone + Debug + Send + Sync;

    fn id(&self) -> String;

    fn distance(&self, a: &Self::Point, b: &Self::Point) -> f64;

    /// All minimal geodesics from `a` to `b` up to length ties; never empty.
    fn geodesics(&self, a: &Self::Point, b: &Self::Point) -> Vec<Seg<Self>>;

    /// Point of `path` at arclength `s` from the start of the path.
    fn path_point(&self, path: &Self::Path, s: f64) -> Self::Point;

    /// Random point at distance below `radius` from `center`.
    fn sample_ball(&self, center: &Self::Point, radius: f64, rng: &mut dyn RngCore) -> Self::Point;

    /// Curvature of the space if it is a model space (used as a test oracle).
    fn known_curvature(&self) -> Option<f64>;

    /// Geodesic shooting: the point at arclength `len` along the geodesic
    /// leaving `p` with direction angle `heading` in the space's tangent frame
    /// at `p`. `None` where directions or continuations are not available.
    fn exp(&self, _p: &Self::Point, _heading: f64, _len: f64) -> Option<Self::Point> {
        None
    }

    /// Point pairs near `center` that are joined by more than one minimal
    /// geodesic.
    fn tie_pairs(&self, _center: &Self::Point, _radius: f64) -> Vec<(Self::Point, Self::Point)> {
        Vec::new()
    }

    fn coords(&self, p: &Self::Point) -> Vec<f64>;

    fn point_from_coords(&self, c: &[f64]) -> Result<Self::Point, SpaceError>;

    /// A canonical interior point, used as the default region center.
    fn base_point(&self) -> Self::Point;

    /// Distances are approximations and verdicts must not be read as
    /// certified.
    fn diagnostic_only(&self) -> bool {
        false
    }

    /// Rough bound on the absolute distance error of approximate spaces.
    fn error_bar(&self) -> Option<f64> {
        None
    }
}

/// A minimal geodesic `[start end]` given as a window of a path.
#[derive(Clone, Debug)]
pub struct GeodesicSegment<P, G> {
    pub start: P,
    pub end: P,
    pub length: f64,
    pub path: G,
    /// Arclength on `path` where the window begins.
    pub offset: f64,
    /// When set, the segment runs along the window backwards.
    pub reversed: bool,
}

pub type Seg<S> = GeodesicSegment<<S as GeodesicSpace>::Point, <S as GeodesicSpace>::Path>;

impl<P, G> GeodesicSegment<P, G> {
    /// Segment covering `path` on `[0, length]`.
    pub fn new(start: P, end: P, length: f64, path: G) -> Self {
        GeodesicSegment {
            start,
            end,
            length,
            path,
            offset: 0.0,
            reversed: false,
        }
    }

    fn path_param(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.length);
        if self.reversed {
            self.offset + self.length - t
        } else {
            self.offset + t
        }
    }
}

/// Point of `seg` at arclength `t` from its start. Endpoints are returned
/// verbatim.
pub fn eval<S: GeodesicSpace + ?Sized>(space: &S, seg: &Seg<S>, t: f64) -> S::Point {
    if t <= 0.0 {
        return seg.start.clone();
    }
    if t >= seg.length {
        return seg.end.clone();
    }
    space.path_point(&seg.path, seg.path_param(t))
}

/// The part of `seg` between arclengths `t0` and `t1`, oriented from `t0`
/// to `t1` (so `t0 > t1` yields a reversed piece).
pub fn subsegment<S: GeodesicSpace + ?Sized>(space: &S, seg: &Seg<S>, t0: f64, t1: f64) -> Seg<S> {
    let t0 = t0.clamp(0.0, seg.length);
    let t1 = t1.clamp(0.0, seg.length);
    let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
    let offset = if seg.reversed {
        seg.offset + seg.length - hi
    } else {
        seg.offset + lo
    };
    let piece = GeodesicSegment {
        start: eval(space, seg, lo),
        end: eval(space, seg, hi),
        length: hi - lo,
        path: seg.path.clone(),
        offset,
        reversed: seg.reversed,
    };
    if t0 <= t1 {
        piece
    } else {
        reverse(&piece)
    }
}

pub fn reverse<P: Clone, G: Clone>(seg: &GeodesicSegment<P, G>) -> GeodesicSegment<P, G> {
    GeodesicSegment {
        start: seg.end.clone(),
        end: seg.start.clone(),
        length: seg.length,
        path: seg.path.clone(),
        offset: seg.offset,
        reversed: !seg.reversed,
    }
}

/// First minimal geodesic from `a` to `b`.
pub fn geodesic<S: GeodesicSpace + ?Sized>(space: &S, a: &S::Point, b: &S::Point) -> Seg<S> {
    space
        .geodesics(a, b)
        .into_iter()
        .next()
        .expect("spaces return at least one geodesic")
}

pub(crate) fn uniform(rng: &mut dyn RngCore) -> f64 {
    use rand::Rng;
    rng.gen::<f64>()
}

pub(crate) fn check_coords(c: &[f64], n: &[usize]) -> Result<(), SpaceError> {
    if !n.contains(&c.len()) {
        return Err(SpaceError::BadCoordinates(format!(
            "expected {} coordinates, got {}",
            n.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" or "),
            c.len()
        )));
    }
    if let Some(v) = c.iter().find(|v| !v.is_finite()) {
        return Err(SpaceError::BadCoordinates(format!("non-finite coordinate {v}")));
    }
    Ok(())
}

pub(crate) fn check_curvature(k: f64, positive: bool) -> Result<(), SpaceError> {
    let ok_sign = if positive { k > 0.0 } else { k < 0.0 };
    if !k.is_finite() || !ok_sign || !(1e-6..=1e6).contains(&k.abs()) {
        let want = if positive { "positive" } else { "negative" };
        return Err(SpaceError::InvalidParameter(format!(
            "curvature {k} must be {want} with |k| in [1e-6, 1e6]"
        )));
    }
    Ok(())
}

/// Small 3-vector helpers shared by the sphere-like spaces.
pub(crate) mod v3 {
    pub type V = [f64; 3];

    pub fn dot(a: V, b: V) -> f64 {
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }
    pub fn cross(a: V, b: V) -> V {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    }
    pub fn norm(a: V) -> f64 {
        dot(a, a).sqrt()
    }
    pub fn scale(a: V, s: f64) -> V {
        [a[0] * s, a[1] * s, a[2] * s]
    }
    pub fn add(a: V, b: V) -> V {
        [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
    }
    /// `a*s + b*t`
    pub fn lin(a: V, s: f64, b: V, t: f64) -> V {
        [a[0] * s + b[0] * t, a[1] * s + b[1] * t, a[2] * s + b[2] * t]
    }
    pub fn normalize(a: V) -> V {
        scale(a, 1.0 / norm(a))
    }
}
