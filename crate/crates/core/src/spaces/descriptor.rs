use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::{Cone, Hyperbolic, Plane, SpaceError, Sphere, SphericalTriangle, Tripod};
use crate::mesh::{self, MeshSpace};

/// Version of the descriptor format; documents may carry it as `"version"`.
pub const DESCRIPTOR_VERSION: u32 = 1;

/// Declarative description of a space, e.g. `{"type":"sphere","k":1.0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceDescriptor {
    Plane,
    Sphere {
        k: f64,
    },
    Hyperbolic {
        k: f64,
    },
    Cone {
        perimeter: f64,
    },
    Tripod,
    SphericalTriangle {
        k: f64,
        vertices: [[f64; 3]; 3],
    },
    /// Triangulated surface from an OBJ file (`path`) or a built-in
    /// generator (`"icosphere:3"`, `"octahedron"`, `"grid:8"`).
    Mesh {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        path: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        generator: Option<String>,
        #[serde(default)]
        steiner: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum MeshSource {
    Obj(PathBuf),
    Icosphere(u32),
    Octahedron,
    Grid(usize),
}

impl MeshSource {
    pub fn parse_generator(g: &str) -> Result<Self, SpaceError> {
        let bad = || SpaceError::Descriptor(format!("unknown mesh generator {g:?}"));
        let (name, arg) = match g.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (g, None),
        };
        let num = |a: Option<&str>, default: usize| -> Result<usize, SpaceError> {
            match a {
                None => Ok(default),
                Some(a) => a.trim().parse().map_err(|_| bad()),
            }
        };
        match name.trim() {
            "icosphere" => Ok(MeshSource::Icosphere(num(arg, 3)? as u32)),
            "octahedron" if arg.is_none() => Ok(MeshSource::Octahedron),
            "grid" => Ok(MeshSource::Grid(num(arg, 8)?)),
            _ => Err(bad()),
        }
    }

    pub fn load(&self) -> Result<mesh::TriMesh, SpaceError> {
        Ok(match self {
            MeshSource::Obj(p) => mesh::load_obj(p)?,
            MeshSource::Icosphere(level) => {
                if *level > 7 {
                    return Err(SpaceError::Descriptor(format!(
                        "icosphere level {level} is above the supported 7"
                    )));
                }
                mesh::icosphere(*level)
            }
            MeshSource::Octahedron => mesh::octahedron(),
            MeshSource::Grid(n) => {
                if *n == 0 || *n > 1000 {
                    return Err(SpaceError::Descriptor(format!(
                        "grid size {n} is not in 1..=1000"
                    )));
                }
                mesh::grid_square(*n)
            }
        })
    }
}

impl SpaceDescriptor {
    pub fn kind(&self) -> &'static str {
        match self {
            SpaceDescriptor::Plane => "plane",
            SpaceDescriptor::Sphere { .. } => "sphere",
            SpaceDescriptor::Hyperbolic { .. } => "hyperbolic",
            SpaceDescriptor::Cone { .. } => "cone",
            SpaceDescriptor::Tripod => "tripod",
            SpaceDescriptor::SphericalTriangle { .. } => "spherical_triangle",
            SpaceDescriptor::Mesh { .. } => "mesh",
        }
    }

    pub fn mesh_source(&self) -> Result<Option<MeshSource>, SpaceError> {
        match self {
            SpaceDescriptor::Mesh { path, generator, .. } => match (path, generator) {
                (Some(p), None) => Ok(Some(MeshSource::Obj(PathBuf::from(p)))),
                (None, Some(g)) => MeshSource::parse_generator(g).map(Some),
                _ => Err(SpaceError::Descriptor(
                    "a mesh needs exactly one of \"path\" and \"generator\"".into(),
                )),
            },
            _ => Ok(None),
        }
    }

    pub fn build(&self) -> Result<AnySpace, SpaceError> {
        Ok(match self {
            SpaceDescriptor::Plane => AnySpace::Plane(Plane),
            SpaceDescriptor::Sphere { k } => AnySpace::Sphere(Sphere::new(*k)?),
            SpaceDescriptor::Hyperbolic { k } => AnySpace::Hyperbolic(Hyperbolic::new(*k)?),
            SpaceDescriptor::Cone { perimeter } => AnySpace::Cone(Cone::new(*perimeter)?),
            SpaceDescriptor::Tripod => AnySpace::Tripod(Tripod),
            SpaceDescriptor::SphericalTriangle { k, vertices } => {
                AnySpace::SphericalTriangle(SphericalTriangle::new(*k, *vertices)?)
            }
            SpaceDescriptor::Mesh { steiner, .. } => {
                let source = self.mesh_source()?.expect("mesh descriptor");
                AnySpace::Mesh(MeshSpace::new(source.load()?, *steiner)?)
            }
        })
    }
}

/// Any built space. Use [`with_space!`](crate::with_space) to run generic
/// code on the concrete type.
#[derive(Debug)]
pub enum AnySpace {
    Plane(Plane),
    Sphere(Sphere),
    Hyperbolic(Hyperbolic),
    Cone(Cone),
    Tripod(Tripod),
    SphericalTriangle(SphericalTriangle),
    Mesh(MeshSpace),
}

/// `with_space!(any, s => expr)` evaluates `expr` with `s` bound to the
/// concrete space inside an [`AnySpace`].
#[macro_export]
macro_rules! with_space {
    ($any:expr, $s:ident => $body:expr) => {
        match $any {
            $crate::spaces::AnySpace::Plane($s) => $body,
            $crate::spaces::AnySpace::Sphere($s) => $body,
            $crate::spaces::AnySpace::Hyperbolic($s) => $body,
            $crate::spaces::AnySpace::Cone($s) => $body,
            $crate::spaces::AnySpace::Tripod($s) => $body,
            $crate::spaces::AnySpace::SphericalTriangle($s) => $body,
            $crate::spaces::AnySpace::Mesh($s) => $body,
        }
    };
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::GeodesicSpace;

    fn parse(s: &str) -> Result<SpaceDescriptor, serde_json::Error> {
        serde_json::from_str(s)
    }

    #[test]
    fn parses_every_kind() {
        assert_eq!(parse(r#"{"type":"plane"}"#).unwrap(), SpaceDescriptor::Plane);
        assert_eq!(
            parse(r#"{"type":"sphere","k":1.0}"#).unwrap(),
            SpaceDescriptor::Sphere { k: 1.0 }
        );
        assert!(parse(r#"{"type":"cone","perimeter":3.14159}"#).is_ok());
        assert!(parse(r#"{"type":"tripod"}"#).is_ok());
        assert!(parse(r#"{"type":"hyperbolic","k":-1}"#).is_ok());
        assert!(parse(r#"{"type":"spherical_triangle","k":1,"vertices":[[1,0,0],[0,1,0],[0,0,1]]}"#).is_ok());
        assert!(parse(r#"{"type":"mesh","generator":"icosphere:2","steiner":1}"#).is_ok());
    }

    #[test]
    fn rejects_unknown_fields_and_kinds() {
        assert!(parse(r#"{"type":"sphere","k":1.0,"radius":2}"#).is_err());
        assert!(parse(r#"{"type":"torus"}"#).is_err());
        assert!(parse(r#"{"k":1.0}"#).is_err());
    }

    #[test]
    fn builds_and_dispatches() {
        let any = parse(r#"{"type":"sphere","k":4}"#).unwrap().build().unwrap();
        let id = with_space!(&any, s => s.id());
        assert_eq!(id, "sphere(k=4)");
        assert!(parse(r#"{"type":"sphere","k":0}"#).unwrap().build().is_err());
        assert!(parse(r#"{"type":"mesh"}"#).unwrap().build().is_err());
        assert!(parse(r#"{"type":"mesh","generator":"klein"}"#)
            .unwrap()
            .build()
            .is_err());
        let m = parse(r#"{"type":"mesh","generator":"octahedron"}"#)
            .unwrap()
            .build()
            .unwrap();
        assert!(with_space!(&m, s => s.diagnostic_only()));
    }
}
