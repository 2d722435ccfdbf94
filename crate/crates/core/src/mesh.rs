//! Triangulated surfaces and their graph-approximated geodesic metric.
//!
//! The metric is the shortest-path metric of a graph whose nodes are the
//! mesh vertices plus `s` equally spaced points on every edge, with straight
//! chords joining the nodes on the boundary of each triangle. Points in the
//! interior of a chord are first-class, so geodesics can be evaluated at any
//! arclength and the result is an exact metric graph.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};
use std::fmt::Write as _;
use std::path::Path;
use std::rc::Rc;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use rand::RngCore;
use thiserror::Error;

use crate::spaces::{check_coords, uniform, GeodesicSegment, GeodesicSpace, Seg, SpaceError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: non-triangular face with {count} vertices")]
    NonTriangularFace { line: usize, count: usize },
    #[error("line {line}: vertex index {index} out of range")]
    IndexOutOfRange { line: usize, index: i64 },
    #[error("non-manifold edges (shared by more than two triangles): {}", fmt_edges(.0))]
    NonManifold(Vec<[usize; 2]>),
    #[error("degenerate triangle {index} with area {area:e}")]
    Degenerate { index: usize, area: f64 },
    #[error("mesh has no triangles")]
    Empty,
    #[error("geodesic graph is disconnected ({components} components)")]
    Disconnected { components: usize },
}

fn fmt_edges(edges: &[[usize; 2]]) -> String {
    edges
        .iter()
        .map(|[a, b]| format!("({a}, {b})"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// A validated triangle mesh. Vertex order is preserved from the input.
#[derive(Clone, Debug)]
pub struct TriMesh {
    vertices: Vec<[f64; 3]>,
    triangles: Vec<[usize; 3]>,
    /// Sorted, unique, each as `[low, high]`.
    edges: Vec<[usize; 2]>,
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

fn lerp(a: [f64; 3], b: [f64; 3], f: f64) -> [f64; 3] {
    [
        a[0] + f * (b[0] - a[0]),
        a[1] + f * (b[1] - a[1]),
        a[2] + f * (b[2] - a[2]),
    ]
}

fn triangle_area(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let u = sub(b, a);
    let v = sub(c, a);
    let x = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    0.5 * norm(x)
}

fn edge_key(a: usize, b: usize) -> [usize; 2] {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

impl TriMesh {
    pub fn new(vertices: Vec<[f64; 3]>, triangles: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        if triangles.is_empty() {
            return Err(MeshError::Empty);
        }
        for t in &triangles {
            for &i in t {
                if i >= vertices.len() {
                    return Err(MeshError::IndexOutOfRange {
                        line: 0,
                        index: i as i64,
                    });
                }
            }
        }
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for v in &vertices {
            for i in 0..3 {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        let diag = norm(sub(hi, lo));
        for (index, t) in triangles.iter().enumerate() {
            let area = triangle_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
            if !(area > 1e-12 * diag * diag) {
                return Err(MeshError::Degenerate { index, area });
            }
        }
        let mut uses: BTreeMap<[usize; 2], usize> = BTreeMap::new();
        for t in &triangles {
            for j in 0..3 {
                *uses.entry(edge_key(t[j], t[(j + 1) % 3])).or_default() += 1;
            }
        }
        let bad: Vec<[usize; 2]> = uses.iter().filter(|(_, &n)| n > 2).map(|(e, _)| *e).collect();
        if !bad.is_empty() {
            return Err(MeshError::NonManifold(bad));
        }
        Ok(TriMesh {
            vertices,
            triangles,
            edges: uses.into_keys().collect(),
        })
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn max_edge_length(&self) -> f64 {
        self.edges
            .iter()
            .map(|[a, b]| norm(sub(self.vertices[*a], self.vertices[*b])))
            .fold(0.0, f64::max)
    }
}

/// Parses the `v` and `f` records of a Wavefront OBJ document; everything
/// else is ignored. Face entries may use `v/vt/vn` forms and negative
/// (relative) indices.
pub fn parse_obj(text: &str) -> Result<TriMesh, MeshError> {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut tok = raw.split_whitespace();
        match tok.next() {
            Some("v") => {
                let mut xyz = [0.0f64; 3];
                for c in xyz.iter_mut() {
                    let t = tok.next().ok_or_else(|| MeshError::Parse {
                        line,
                        message: "vertex needs three coordinates".into(),
                    })?;
                    *c = t.parse().map_err(|_| MeshError::Parse {
                        line,
                        message: format!("bad coordinate {t:?}"),
                    })?;
                    if !c.is_finite() {
                        return Err(MeshError::Parse {
                            line,
                            message: format!("non-finite coordinate {t:?}"),
                        });
                    }
                }
                vertices.push(xyz);
            }
            Some("f") => {
                let refs: Vec<&str> = tok.collect();
                if refs.len() != 3 {
                    return Err(MeshError::NonTriangularFace {
                        line,
                        count: refs.len(),
                    });
                }
                let mut face = [0usize; 3];
                for (slot, r) in face.iter_mut().zip(&refs) {
                    let head = r.split('/').next().unwrap_or("");
                    let idx: i64 = head.parse().map_err(|_| MeshError::Parse {
                        line,
                        message: format!("bad face index {r:?}"),
                    })?;
                    let n = vertices.len() as i64;
                    let resolved = if idx > 0 { idx - 1 } else { n + idx };
                    if idx == 0 || resolved < 0 || resolved >= n {
                        return Err(MeshError::IndexOutOfRange { line, index: idx });
                    }
                    *slot = resolved as usize;
                }
                triangles.push(face);
            }
            _ => {}
        }
    }
    TriMesh::new(vertices, triangles)
}

pub fn load_obj(path: impl AsRef<Path>) -> Result<TriMesh, MeshError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| MeshError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_obj(&text)
}

pub fn to_obj_string(mesh: &TriMesh) -> String {
    let mut out = String::new();
    for v in &mesh.vertices {
        let _ = writeln!(out, "v {} {} {}", v[0], v[1], v[2]);
    }
    for t in &mesh.triangles {
        let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    out
}

pub fn octahedron() -> TriMesh {
    let v = vec![
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ];
    let f = vec![
        [0, 2, 4],
        [2, 1, 4],
        [1, 3, 4],
        [3, 0, 4],
        [2, 0, 5],
        [1, 2, 5],
        [3, 1, 5],
        [0, 3, 5],
    ];
    TriMesh::new(v, f).expect("octahedron is valid")
}

/// Unit icosphere: an icosahedron with every triangle split into four
/// `level` times, vertices projected to the sphere.
pub fn icosphere(level: u32) -> TriMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut v: Vec<[f64; 3]> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .iter()
    .map(|p| {
        let n = norm(*p);
        [p[0] / n, p[1] / n, p[2] / n]
    })
    .collect();
    let mut f: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut mid: BTreeMap<[usize; 2], usize> = BTreeMap::new();
        let mut midpoint = |a: usize, b: usize, v: &mut Vec<[f64; 3]>| {
            *mid.entry(edge_key(a, b)).or_insert_with(|| {
                let m = lerp(v[a], v[b], 0.5);
                let n = norm(m);
                v.push([m[0] / n, m[1] / n, m[2] / n]);
                v.len() - 1
            })
        };
        let mut next = Vec::with_capacity(f.len() * 4);
        for [a, b, c] in f {
            let ab = midpoint(a, b, &mut v);
            let bc = midpoint(b, c, &mut v);
            let ca = midpoint(c, a, &mut v);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        f = next;
    }
    TriMesh::new(v, f).expect("icosphere is valid")
}

/// Unit square `[0,1]²` in the plane `z = 0`, cut into `n × n` cells, each
/// split along alternating diagonals.
pub fn grid_square(n: usize) -> TriMesh {
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut v = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            v.push([i as f64 / n as f64, j as f64 / n as f64, 0.0]);
        }
    }
    let mut f = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if (i + j) % 2 == 0 {
                f.push([a, b, d]);
                f.push([b, c, d]);
            } else {
                f.push([a, b, c]);
                f.push([a, c, d]);
            }
        }
    }
    TriMesh::new(v, f).expect("grid is valid")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraphArc {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// Vertices plus Steiner points, joined by chords inside each triangle.
#[derive(Clone, Debug)]
pub struct GeodesicGraph {
    steiner: usize,
    positions: Vec<[f64; 3]>,
    arcs: Vec<GraphArc>,
    /// Compressed adjacency: neighbours of `u` are
    /// `adj[offsets[u]..offsets[u+1]]` as `(node, arc)`, sorted by node.
    offsets: Vec<usize>,
    adj: Vec<(usize, usize)>,
}

impl GeodesicGraph {
    pub fn new(mesh: &TriMesh, steiner: usize) -> Result<Self, MeshError> {
        let nv = mesh.vertices.len();
        let edge_id: BTreeMap<[usize; 2], usize> =
            mesh.edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let mut positions = mesh.vertices.clone();
        for [a, b] in &mesh.edges {
            for j in 1..=steiner {
                positions.push(lerp(
                    mesh.vertices[*a],
                    mesh.vertices[*b],
                    j as f64 / (steiner + 1) as f64,
                ));
            }
        }
        // Nodes along an edge from `a` to `b`, in order.
        let along = |a: usize, b: usize| -> Vec<usize> {
            let key = edge_key(a, b);
            let base = nv + edge_id[&key] * steiner;
            let mut nodes = vec![key[0]];
            nodes.extend(base..base + steiner);
            nodes.push(key[1]);
            if key[0] != a {
                nodes.reverse();
            }
            nodes
        };
        let mut keys: BTreeSet<(usize, usize)> = BTreeSet::new();
        for t in &mesh.triangles {
            let sides: Vec<Vec<usize>> = (0..3).map(|j| along(t[j], t[(j + 1) % 3])).collect();
            let mut boundary: Vec<usize> = Vec::new();
            for side in &sides {
                boundary.extend(&side[..side.len() - 1]);
            }
            // Pairs on a common side are joined only when consecutive.
            let same_side_gap = |x: usize, y: usize| -> Option<usize> {
                sides.iter().find_map(|side| {
                    let i = side.iter().position(|&n| n == x)?;
                    let j = side.iter().position(|&n| n == y)?;
                    Some(i.abs_diff(j))
                })
            };
            for (i, &x) in boundary.iter().enumerate() {
                for &y in &boundary[i + 1..] {
                    match same_side_gap(x, y) {
                        Some(gap) if gap > 1 => {}
                        _ => {
                            keys.insert((x.min(y), x.max(y)));
                        }
                    }
                }
            }
        }
        let arcs: Vec<GraphArc> = keys
            .iter()
            .map(|&(u, v)| GraphArc {
                u,
                v,
                weight: norm(sub(positions[u], positions[v])),
            })
            .collect();
        let n = positions.len();
        let mut lists: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (i, a) in arcs.iter().enumerate() {
            lists[a.u].push((a.v, i));
            lists[a.v].push((a.u, i));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut adj = Vec::with_capacity(2 * arcs.len());
        offsets.push(0);
        for mut l in lists {
            l.sort_unstable();
            adj.extend(l);
            offsets.push(adj.len());
        }
        let graph = GeodesicGraph {
            steiner,
            positions,
            arcs,
            offsets,
            adj,
        };
        let components = graph.components();
        if components > 1 {
            return Err(MeshError::Disconnected { components });
        }
        Ok(graph)
    }

    pub fn steiner(&self) -> usize {
        self.steiner
    }

    pub fn node_count(&self) -> usize {
        self.positions.len()
    }

    pub fn arcs(&self) -> &[GraphArc] {
        &self.arcs
    }

    pub fn position(&self, node: usize) -> [f64; 3] {
        self.positions[node]
    }

    fn neighbours(&self, u: usize) -> &[(usize, usize)] {
        &self.adj[self.offsets[u]..self.offsets[u + 1]]
    }

    fn components(&self) -> usize {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut count = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &(v, _) in self.neighbours(u) {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        count
    }

    /// Single-source shortest paths from weighted sources. Ties are settled
    /// in node-id order so predecessor trees are reproducible.
    fn dijkstra(&self, sources: &[(usize, f64)]) -> Field {
        #[derive(PartialEq)]
        struct Item(f64, usize);
        impl Eq for Item {}
        impl Ord for Item {
            fn cmp(&self, o: &Self) -> Ordering {
                o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
            }
        }
        impl PartialOrd for Item {
            fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
                Some(self.cmp(o))
            }
        }
        let n = self.node_count();
        let mut dist = vec![f64::INFINITY; n];
        let mut pred = vec![(usize::MAX, usize::MAX); n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        for &(s, d0) in sources {
            if d0 < dist[s] {
                dist[s] = d0;
                heap.push(Item(d0, s));
            }
        }
        while let Some(Item(d, u)) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            for &(v, arc) in self.neighbours(u) {
                let nd = d + self.arcs[arc].weight;
                if nd < dist[v] {
                    dist[v] = nd;
                    pred[v] = (u, arc);
                    heap.push(Item(nd, v));
                }
            }
        }
        Field { dist, pred }
    }
}

struct Field {
    dist: Vec<f64>,
    pred: Vec<(usize, usize)>,
}

/// A node, or a point on a chord at fraction `frac` from `arcs[arc].u`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeshPoint {
    Node(usize),
    OnArc { arc: usize, frac: f64 },
}

/// Piece of a path along one chord, between two fractions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Leg {
    pub arc: usize,
    pub from: f64,
    pub to: f64,
    pub length: f64,
}

#[derive(Clone, Debug, Default)]
pub struct MeshPath {
    pub legs: Vec<Leg>,
    /// Arclength at which each leg starts.
    pub starts: Vec<f64>,
}

static NEXT_UID: AtomicU64 = AtomicU64::new(1);
const CACHE_SLOTS: usize = 8;

thread_local! {
    static FIELDS: RefCell<Vec<(u64, MeshPoint, Rc<Field>)>> = const { RefCell::new(Vec::new()) };
}

/// Graph-metric geodesic space over a triangle mesh. Results are diagnostic.
#[derive(Debug)]
pub struct MeshSpace {
    mesh: TriMesh,
    graph: GeodesicGraph,
    uid: u64,
}

impl MeshSpace {
    pub fn new(mesh: TriMesh, steiner: usize) -> Result<Self, MeshError> {
        let graph = GeodesicGraph::new(&mesh, steiner)?;
        Ok(MeshSpace {
            mesh,
            graph,
            uid: NEXT_UID.fetch_add(1, AtomicOrdering::Relaxed),
        })
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    pub fn graph(&self) -> &GeodesicGraph {
        &self.graph
    }

    pub fn vertex(&self, i: usize) -> MeshPoint {
        MeshPoint::Node(i)
    }

    /// Node nearest to an ambient position (lowest id on ties).
    pub fn nearest_node(&self, x: [f64; 3]) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (i, p) in self.graph.positions.iter().enumerate() {
            let d = norm(sub(*p, x));
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }

    pub fn position(&self, p: &MeshPoint) -> [f64; 3] {
        match *p {
            MeshPoint::Node(u) => self.graph.positions[u],
            MeshPoint::OnArc { arc, frac } => {
                let a = self.graph.arcs[arc];
                lerp(self.graph.positions[a.u], self.graph.positions[a.v], frac)
            }
        }
    }

    fn on_arc(&self, arc: usize, frac: f64) -> MeshPoint {
        let a = self.graph.arcs[arc];
        if frac <= 0.0 {
            MeshPoint::Node(a.u)
        } else if frac >= 1.0 {
            MeshPoint::Node(a.v)
        } else {
            MeshPoint::OnArc { arc, frac }
        }
    }

    /// `(node, offset)` pairs through which `p` connects to the graph.
    fn anchors(&self, p: &MeshPoint) -> Vec<(usize, f64)> {
        match *p {
            MeshPoint::Node(u) => vec![(u, 0.0)],
            MeshPoint::OnArc { arc, frac } => {
                let a = self.graph.arcs[arc];
                vec![(a.u, frac * a.weight), (a.v, (1.0 - frac) * a.weight)]
            }
        }
    }

    fn field(&self, p: &MeshPoint) -> Rc<Field> {
        FIELDS.with(|cell| {
            let mut cache = cell.borrow_mut();
            if let Some(i) = cache.iter().position(|(u, q, _)| *u == self.uid && q == p) {
                let entry = cache.remove(i);
                let f = entry.2.clone();
                cache.insert(0, entry);
                return f;
            }
            let f = Rc::new(self.graph.dijkstra(&self.anchors(p)));
            cache.insert(0, (self.uid, *p, f.clone()));
            cache.truncate(CACHE_SLOTS);
            f
        })
    }

    /// Best route from `a` to `b`: `(length, end anchor node, offset)`, or
    /// `None` for the length when the direct chord route wins.
    fn route(&self, a: &MeshPoint, b: &MeshPoint) -> (f64, Option<usize>) {
        let field = self.field(a);
        let mut best = (f64::INFINITY, None);
        for (t, off) in self.anchors(b) {
            let d = field.dist[t] + off;
            if d < best.0 {
                best = (d, Some(t));
            }
        }
        if let (MeshPoint::OnArc { arc: x, frac: fa }, MeshPoint::OnArc { arc: y, frac: fb }) = (a, b) {
            if x == y {
                let d = (fa - fb).abs() * self.graph.arcs[*x].weight;
                if d <= best.0 {
                    best = (d, None);
                }
            }
        }
        best
    }

    fn arc_fraction(&self, arc: usize, node: usize) -> f64 {
        if self.graph.arcs[arc].u == node {
            0.0
        } else {
            1.0
        }
    }

    fn build_path(&self, a: &MeshPoint, b: &MeshPoint) -> (f64, MeshPath) {
        let (len, end) = self.route(a, b);
        let mut legs = Vec::new();
        let mut leg = |arc: usize, from: f64, to: f64| {
            let length = (to - from).abs() * self.graph.arcs[arc].weight;
            if length > 0.0 {
                legs.push(Leg {
                    arc,
                    from,
                    to,
                    length,
                });
            }
        };
        match end {
            None => {
                if let (MeshPoint::OnArc { arc, frac: fa }, MeshPoint::OnArc { frac: fb, .. }) = (a, b) {
                    leg(*arc, *fa, *fb);
                }
            }
            Some(t) => {
                let field = self.field(a);
                let mut chain = Vec::new();
                let mut u = t;
                while field.pred[u].0 != usize::MAX {
                    let (p, arc) = field.pred[u];
                    chain.push((p, arc, u));
                    u = p;
                }
                chain.reverse();
                // `u` is now the source anchor the route leaves from.
                if let MeshPoint::OnArc { arc, frac } = *a {
                    leg(arc, frac, self.arc_fraction(arc, u));
                }
                for (p, arc, q) in chain {
                    leg(arc, self.arc_fraction(arc, p), self.arc_fraction(arc, q));
                }
                if let MeshPoint::OnArc { arc, frac } = *b {
                    leg(arc, self.arc_fraction(arc, t), frac);
                }
            }
        }
        let mut starts = Vec::with_capacity(legs.len());
        let mut acc = 0.0;
        for l in &legs {
            starts.push(acc);
            acc += l.length;
        }
        (len, MeshPath { legs, starts })
    }
}

impl GeodesicSpace for MeshSpace {
    type Point = MeshPoint;
    type Path = MeshPath;

    fn id(&self) -> String {
        format!(
            "mesh(vertices={},steiner={})",
            self.mesh.vertices.len(),
            self.graph.steiner
        )
    }

    fn distance(&self, a: &MeshPoint, b: &MeshPoint) -> f64 {
        if a == b {
            return 0.0;
        }
        self.route(a, b).0
    }

    fn geodesics(&self, a: &MeshPoint, b: &MeshPoint) -> Vec<Seg<Self>> {
        if a == b {
            return vec![GeodesicSegment::new(*a, *b, 0.0, MeshPath::default())];
        }
        let (len, path) = self.build_path(a, b);
        vec![GeodesicSegment::new(*a, *b, len, path)]
    }

    fn path_point(&self, path: &MeshPath, s: f64) -> MeshPoint {
        if path.legs.is_empty() {
            return MeshPoint::Node(0);
        }
        let i = match path.starts.binary_search_by(|x| x.total_cmp(&s)) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        };
        let l = path.legs[i];
        let f = ((s - path.starts[i]) / l.length).clamp(0.0, 1.0);
        self.on_arc(l.arc, l.from + f * (l.to - l.from))
    }

    /// Uniform choice among graph nodes strictly inside the ball.
    fn sample_ball(&self, center: &MeshPoint, radius: f64, rng: &mut dyn RngCore) -> MeshPoint {
        let field = self.field(center);
        let inside: Vec<usize> = (0..self.graph.node_count())
            .filter(|&u| field.dist[u] < radius)
            .collect();
        if inside.is_empty() {
            return *center;
        }
        let i = ((uniform(rng) * inside.len() as f64) as usize).min(inside.len() - 1);
        MeshPoint::Node(inside[i])
    }

    fn known_curvature(&self) -> Option<f64> {
        None
    }

    fn coords(&self, p: &MeshPoint) -> Vec<f64> {
        self.position(p).to_vec()
    }

    /// One value selects a node by id; three select the node nearest to an
    /// ambient position.
    fn point_from_coords(&self, c: &[f64]) -> Result<MeshPoint, SpaceError> {
        check_coords(c, &[1, 3])?;
        if c.len() == 1 {
            let n = self.graph.node_count();
            if c[0] < 0.0 || c[0].fract() != 0.0 || c[0] >= n as f64 {
                return Err(SpaceError::BadCoordinates(format!(
                    "node id {} is not an integer in 0..{n}",
                    c[0]
                )));
            }
            return Ok(MeshPoint::Node(c[0] as usize));
        }
        Ok(MeshPoint::Node(self.nearest_node([c[0], c[1], c[2]])))
    }

    fn base_point(&self) -> MeshPoint {
        MeshPoint::Node(0)
    }

    fn diagnostic_only(&self) -> bool {
        true
    }

    /// Longest chord between consecutive edge nodes: the graph metric can be
    /// off from the polyhedral one by about this much.
    fn error_bar(&self) -> Option<f64> {
        Some(self.mesh.max_edge_length() / (self.graph.steiner + 1) as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::test_support::{check_metric, check_subsegments, rng};
    use crate::spaces::{eval, geodesic, Sphere};

    #[test]
    fn octahedron_counts() {
        let m = parse_obj(&to_obj_string(&octahedron())).unwrap();
        assert_eq!(m.vertices().len(), 6);
        assert_eq!(m.triangles().len(), 8);
        assert_eq!(m.edges().len(), 12);
        // Euler characteristic of the sphere.
        assert_eq!(6 + 8 - 12, 2);
    }

    #[test]
    fn icosphere_counts() {
        for (level, nv) in [(0, 12), (1, 42), (2, 162), (3, 642)] {
            let m = icosphere(level);
            // Generator count: 10·4^level + 2.
            assert_eq!(m.vertices().len(), 10 * 4usize.pow(level) + 2);
            assert_eq!(m.vertices().len(), nv);
            assert_eq!(m.vertices().len() + m.triangles().len() - m.edges().len(), 2);
        }
    }

    #[test]
    fn parse_errors() {
        let quad = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n";
        let e = parse_obj(quad).unwrap_err();
        assert_eq!(e, MeshError::NonTriangularFace { line: 5, count: 4 });
        assert!(e.to_string().contains("non-triangular face"));
        let e = parse_obj("v 0 0 0\nv 1 0 0\nf 1 2 7\n").unwrap_err();
        assert!(matches!(e, MeshError::IndexOutOfRange { line: 3, index: 7 }));
        let e = parse_obj("v 0 0 x\n").unwrap_err();
        assert!(matches!(e, MeshError::Parse { line: 1, .. }));
        let e = parse_obj("v 0 0 0\nv 1 0 0\nv 2 0 0\nf 1 2 3\n").unwrap_err();
        assert!(matches!(e, MeshError::Degenerate { index: 0, .. }));
        let fan = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 -1 0\nv 0 0 1\n\
                   f 1 2 3\nf 1 2 4\nf 1 2 5\n";
        let e = parse_obj(fan).unwrap_err();
        assert_eq!(e, MeshError::NonManifold(vec![[0, 1]]));
        assert!(e.to_string().contains("(0, 1)"));
        assert!(matches!(parse_obj("# nothing\n"), Err(MeshError::Empty)));
    }

    #[test]
    fn obj_extras_are_ignored() {
        let text = "# cube corner\nvn 0 0 1\nv 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0\nf 1/1/1 2/2/1 -1/3/1\n";
        let m = parse_obj(text).unwrap();
        assert_eq!(m.triangles(), &[[0, 1, 2]]);
    }

    #[test]
    fn load_obj_reports_missing_file() {
        assert!(matches!(
            load_obj("/nonexistent/x.obj"),
            Err(MeshError::Io { .. })
        ));
    }

    #[test]
    fn disconnected_mesh_is_rejected() {
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 5 0 0\nv 6 0 0\nv 5 1 0\nf 1 2 3\nf 4 5 6\n";
        let m = parse_obj(text).unwrap();
        assert!(matches!(
            MeshSpace::new(m, 1),
            Err(MeshError::Disconnected { components: 2 })
        ));
    }

    #[test]
    fn octahedron_opposite_vertices() {
        let s = MeshSpace::new(octahedron(), 0).unwrap();
        // Two edges of length √2 on the unfolding.
        let d = s.distance(&MeshPoint::Node(0), &MeshPoint::Node(1));
        assert!((d - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        // Steiner points let the path cut across faces.
        let s4 = MeshSpace::new(octahedron(), 4).unwrap();
        assert!(s4.distance(&MeshPoint::Node(0), &MeshPoint::Node(1)) <= d);
    }

    #[test]
    fn grid_diagonal() {
        let s = MeshSpace::new(grid_square(8), 4).unwrap();
        let a = s.point_from_coords(&[0.0, 0.0, 0.0]).unwrap();
        let b = s.point_from_coords(&[1.0, 1.0, 0.0]).unwrap();
        let d = s.distance(&a, &b);
        assert!(d >= 2f64.sqrt() - 1e-12);
        assert!(d <= 1.05 * 2f64.sqrt(), "{d}");
    }

    #[test]
    fn icosphere_median_error() {
        let s = MeshSpace::new(icosphere(3), 4).unwrap();
        let mut r = rng(11);
        let n = s.mesh().vertices().len();
        let mut errs = Vec::new();
        for _ in 0..200 {
            let i = (uniform(&mut r) * n as f64) as usize;
            let j = (uniform(&mut r) * n as f64) as usize;
            if i == j {
                continue;
            }
            let (a, b) = (s.mesh().vertices()[i], s.mesh().vertices()[j]);
            let truth = Sphere::central_angle(a, b);
            let d = s.distance(&MeshPoint::Node(i), &MeshPoint::Node(j));
            errs.push((d - truth).abs() / truth);
        }
        errs.sort_by(f64::total_cmp);
        assert!(errs[errs.len() / 2] <= 0.08, "median {}", errs[errs.len() / 2]);
    }

    #[test]
    fn steiner_refinement_does_not_increase_distance() {
        // s + 1 divides the finer s + 1, so every coarse path survives.
        let mesh = icosphere(1);
        let spaces: Vec<MeshSpace> = [0, 1, 3, 7]
            .iter()
            .map(|&s| MeshSpace::new(mesh.clone(), s).unwrap())
            .collect();
        for i in 0..mesh.vertices().len() {
            let ds: Vec<f64> = spaces
                .iter()
                .map(|s| s.distance(&MeshPoint::Node(0), &MeshPoint::Node(i)))
                .collect();
            for w in ds.windows(2) {
                assert!(w[1] <= w[0] + 1e-12, "{ds:?}");
            }
        }
    }

    #[test]
    fn metric_and_geodesic_points() {
        let s = MeshSpace::new(icosphere(1), 2).unwrap();
        check_metric(&s, &MeshPoint::Node(0), 1.5, 300, 1e-12);
        check_subsegments(&s, &MeshPoint::Node(0), &MeshPoint::Node(20), 1e-12);
        let seg = geodesic(&s, &MeshPoint::Node(3), &MeshPoint::Node(30));
        // Points inside chords measure consistently along the path.
        let x = eval(&s, &seg, 0.37 * seg.length);
        let y = eval(&s, &seg, 0.81 * seg.length);
        assert!(matches!(x, MeshPoint::OnArc { .. }) || matches!(x, MeshPoint::Node(_)));
        assert!((s.distance(&x, &y) - 0.44 * seg.length).abs() < 1e-12);
        let back = geodesic(&s, &y, &x);
        assert!((back.length - 0.44 * seg.length).abs() < 1e-12);
    }

    #[test]
    fn sampling_and_coordinates() {
        let s = MeshSpace::new(icosphere(2), 1).unwrap();
        let mut r = rng(9);
        for _ in 0..50 {
            let x = s.sample_ball(&MeshPoint::Node(5), 0.5, &mut r);
            assert!(s.distance(&MeshPoint::Node(5), &x) < 0.5);
        }
        assert!(s.point_from_coords(&[2.5]).is_err());
        assert!(s.point_from_coords(&[1e9]).is_err());
        assert_eq!(s.point_from_coords(&[7.0]).unwrap(), MeshPoint::Node(7));
        let v = s.mesh().vertices()[9];
        assert_eq!(s.point_from_coords(&v).unwrap(), MeshPoint::Node(9));
        assert!(s.diagnostic_only());
        assert!(s.error_bar().unwrap() > 0.0);
    }
}
