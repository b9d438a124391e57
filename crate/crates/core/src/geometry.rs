//! Triangular-lattice regions: the quasi-circular disk regions and boxed
//! `a x b x c` hexagons, with oriented edges, faces, boundary cycle and
//! pinned boundary heights.
//!
//! Axial coordinates `(a, b)` use the axis steps `e_x = (1,0)`, `e_y = (0,1)`,
//! `e_z = (-1,-1)`. The Euclidean embedding maps them to `(√3/2, 1/2)`,
//! `(-√3/2, 1/2)` and `(0, -1)`, so `e_z` points straight down and the
//! vertical line through the origin is the set `a == b`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// One of the three lattice axes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Axis {
        Axis::ALL[i % 3]
    }

    /// Unit step along the positive direction of the axis.
    pub fn step(self) -> AxialCoord {
        match self {
            Axis::X => AxialCoord::new(1, 0),
            Axis::Y => AxialCoord::new(0, 1),
            Axis::Z => AxialCoord::new(-1, -1),
        }
    }

    /// Cyclic successor `x -> y -> z -> x`.
    pub fn next(self) -> Axis {
        Axis::from_index(self.index() + 1)
    }

    pub fn label(self) -> char {
        ['x', 'y', 'z'][self.index()]
    }
}

/// Integer axial coordinate of a triangular-lattice vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i32; 2]", into = "[i32; 2]")]
pub struct AxialCoord {
    pub a: i32,
    pub b: i32,
}

impl From<[i32; 2]> for AxialCoord {
    fn from(v: [i32; 2]) -> Self {
        AxialCoord::new(v[0], v[1])
    }
}

impl From<AxialCoord> for [i32; 2] {
    fn from(v: AxialCoord) -> Self {
        [v.a, v.b]
    }
}

impl fmt::Display for AxialCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

impl Add for AxialCoord {
    type Output = AxialCoord;
    fn add(self, o: AxialCoord) -> AxialCoord {
        AxialCoord::new(self.a + o.a, self.b + o.b)
    }
}

impl Sub for AxialCoord {
    type Output = AxialCoord;
    fn sub(self, o: AxialCoord) -> AxialCoord {
        AxialCoord::new(self.a - o.a, self.b - o.b)
    }
}

impl Neg for AxialCoord {
    type Output = AxialCoord;
    fn neg(self) -> AxialCoord {
        AxialCoord::new(-self.a, -self.b)
    }
}

/// The six nearest-neighbour steps in counterclockwise angular order,
/// starting at `e_x` (30 degrees).
pub const NEIGHBOR_STEPS: [AxialCoord; 6] = [
    AxialCoord { a: 1, b: 0 },
    AxialCoord { a: 1, b: 1 },
    AxialCoord { a: 0, b: 1 },
    AxialCoord { a: -1, b: 0 },
    AxialCoord { a: -1, b: -1 },
    AxialCoord { a: 0, b: -1 },
];

/// Next-nearest-neighbour steps grouped in opposite pairs, one pair per axis
/// direction `e_i - e_{i+1}`.
pub const NNN_STEPS: [AxialCoord; 3] = [
    AxialCoord { a: 1, b: -1 },
    AxialCoord { a: 1, b: 2 },
    AxialCoord { a: -2, b: -1 },
];

impl AxialCoord {
    pub const ORIGIN: AxialCoord = AxialCoord { a: 0, b: 0 };

    pub const fn new(a: i32, b: i32) -> Self {
        AxialCoord { a, b }
    }

    /// Sublattice index in `{0,1,2}`; every positive axis step adds one.
    pub fn sublattice(self) -> u8 {
        (self.a + self.b).rem_euclid(3) as u8
    }

    /// Horizontal coordinate in units of `√3/2`.
    pub fn col(self) -> i32 {
        self.a - self.b
    }

    /// Vertical coordinate in units of `1/2`.
    pub fn row(self) -> i32 {
        self.a + self.b
    }

    /// Four times the squared Euclidean norm.
    pub fn norm2_x4(self) -> i64 {
        let x = self.col() as i64;
        let y = self.row() as i64;
        3 * x * x + y * y
    }

    pub fn euclid(self) -> (f64, f64) {
        (
            0.5 * 3f64.sqrt() * self.col() as f64,
            0.5 * self.row() as f64,
        )
    }

    pub fn step(self, axis: Axis, k: i32) -> Self {
        let s = axis.step();
        AxialCoord::new(self.a + k * s.a, self.b + k * s.b)
    }

    /// Angular index (0..6) of a unit step, if it is one.
    pub fn direction_index(self) -> Option<usize> {
        NEIGHBOR_STEPS.iter().position(|&d| d == self)
    }

    /// Axis and sign of a unit step.
    pub fn as_axis_step(self) -> Option<(Axis, i32)> {
        Axis::ALL.iter().find_map(|&ax| {
            if self == ax.step() {
                Some((ax, 1))
            } else if self == -ax.step() {
                Some((ax, -1))
            } else {
                None
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RegionKind {
    /// Union of superlattice cells inside the disk of diameter `l` about the
    /// origin; cell centres lie on sublattice `cell_sublattice`.
    Disk { l: u32, cell_sublattice: u8 },
    Hexagon { a: u32, b: u32, c: u32 },
}

/// Oriented lattice edge with `head - tail` equal to the positive axis step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub axis: Axis,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RegionViolation {
    EdgeFaceCount { tail: AxialCoord, head: AxialCoord, faces: usize },
    BoundaryPinch { vertex: AxialCoord },
    BoundaryCycles { cycles: usize },
    CollinearBoundary { vertex: AxialCoord },
    SharpTurn { vertex: AxialCoord, degrees: i32 },
    TotalTurning { degrees: i32 },
    MissingBoundaryHeight { vertex: AxialCoord },
    BoundaryHeightRange { vertex: AxialCoord, height: i32 },
    BoundaryEdgeRule { tail: AxialCoord, head: AxialCoord, difference: i32 },
    FaceCount { faces: usize },
    Empty,
}

impl fmt::Display for RegionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use RegionViolation::*;
        match self {
            EdgeFaceCount { tail, head, faces } => {
                write!(f, "edge {tail}->{head} lies on {faces} faces")
            }
            BoundaryPinch { vertex } => write!(f, "boundary pinches at {vertex}"),
            BoundaryCycles { cycles } => write!(f, "boundary splits into {cycles} cycles"),
            CollinearBoundary { vertex } => write!(f, "boundary is straight at {vertex}"),
            SharpTurn { vertex, degrees } => {
                write!(f, "boundary turns by {degrees} degrees at {vertex}")
            }
            TotalTurning { degrees } => write!(f, "total boundary turning is {degrees} degrees"),
            MissingBoundaryHeight { vertex } => write!(f, "no boundary height at {vertex}"),
            BoundaryHeightRange { vertex, height } => {
                write!(f, "boundary height {height} at {vertex} is outside {{0,1}}")
            }
            BoundaryEdgeRule { tail, head, difference } => write!(
                f,
                "boundary edge {tail}->{head} has height difference {difference}"
            ),
            FaceCount { faces } => write!(f, "{faces} faces is not a multiple of 6"),
            Empty => write!(f, "region has no faces"),
        }
    }
}

/// An immutable lattice region with pinned boundary heights.
#[derive(Clone, Debug)]
pub struct LatticeRegion {
    kind: RegionKind,
    vertices: Vec<AxialCoord>,
    index: HashMap<AxialCoord, usize>,
    faces: Vec<[usize; 3]>,
    face_edges: Vec<[usize; 3]>,
    edges: Vec<Edge>,
    edge_faces: Vec<Vec<usize>>,
    edge_lookup: HashMap<(usize, usize), usize>,
    out_nb: Vec<[Option<usize>; 3]>,
    in_nb: Vec<[Option<usize>; 3]>,
    face_count: Vec<u8>,
    boundary_cycle: Vec<usize>,
    boundary_heights: Vec<Option<i32>>,
    interior: Vec<usize>,
    topology_violations: Vec<RegionViolation>,
}

/// Builds the quasi-circular region of diameter `l`: cells centred on the
/// origin's sublattice whose six outer vertices lie in the closed disk.
pub fn build_region(l: u32) -> Result<LatticeRegion> {
    build_disk_region(l, 0)
}

/// Disk region with cells centred on sublattice `cell_sublattice` (relative to
/// the origin, which has sublattice 0).
pub fn build_disk_region(l: u32, cell_sublattice: u8) -> Result<LatticeRegion> {
    if l < 2 || !l.is_multiple_of(2) {
        return Err(Error::InvalidSize(l as i64));
    }
    let sigma = cell_sublattice % 3;
    let lim = l as i64 * l as i64;
    let r = l as i32 + 2;
    let mut verts = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            let c = AxialCoord::new(a, b);
            if c.sublattice() != sigma {
                continue;
            }
            if NEIGHBOR_STEPS.iter().all(|&d| (c + d).norm2_x4() <= lim) {
                verts.push(c);
                verts.extend(NEIGHBOR_STEPS.iter().map(|&d| c + d));
            }
        }
    }
    let kind = RegionKind::Disk { l, cell_sublattice: sigma };
    let region = LatticeRegion::from_vertices(kind, verts)?;
    let violations = validate_region(&region);
    if violations.is_empty() {
        Ok(region)
    } else {
        Err(Error::RegionInvalid(violations))
    }
}

/// The semiregular hexagon with sides `a, b, c, a, b, c`, translated so that
/// its centre sits at the origin. Heights along the boundary follow the edges
/// without diagonals and are shifted so the lowest tiling touches height 0.
pub fn build_hexagon_region(a: u32, b: u32, c: u32) -> Result<LatticeRegion> {
    if a == 0 || b == 0 || c == 0 {
        return Err(Error::InvalidHexagon(a as i64, b as i64, c as i64));
    }
    let ex = Axis::X.step();
    let ey = Axis::Y.step();
    let ez = Axis::Z.step();
    let sides = [(ex, a), (-ez, b), (ey, c), (-ex, a), (ez, b), (-ey, c)];
    let mut corners = vec![AxialCoord::ORIGIN];
    let mut p = AxialCoord::ORIGIN;
    for &(d, n) in &sides {
        p = p.step_by(d, n as i32);
        corners.push(p);
    }
    corners.pop();
    let sa: i32 = corners.iter().map(|v| v.a).sum();
    let sb: i32 = corners.iter().map(|v| v.b).sum();
    let shift = AxialCoord::new(sa.div_euclid(6), sb.div_euclid(6));
    let corners: Vec<AxialCoord> = corners.into_iter().map(|v| v - shift).collect();

    let amin = corners.iter().map(|v| v.a).min().unwrap_or(0);
    let amax = corners.iter().map(|v| v.a).max().unwrap_or(0);
    let bmin = corners.iter().map(|v| v.b).min().unwrap_or(0);
    let bmax = corners.iter().map(|v| v.b).max().unwrap_or(0);
    let n = corners.len();
    let inside = |v: AxialCoord| {
        (0..n).all(|i| {
            let p = corners[i];
            let q = corners[(i + 1) % n];
            let d = q - p;
            let w = v - p;
            d.a as i64 * w.b as i64 - d.b as i64 * w.a as i64 >= 0
        })
    };
    let mut verts = Vec::new();
    for va in amin..=amax {
        for vb in bmin..=bmax {
            let v = AxialCoord::new(va, vb);
            if inside(v) {
                verts.push(v);
            }
        }
    }
    let kind = RegionKind::Hexagon { a, b, c };
    let mut region = LatticeRegion::from_vertices(kind, verts)?;
    let low = crate::tiling::thurston_lower_envelope(&region)?;
    let m = low.heights().iter().copied().min().unwrap_or(0);
    for h in region.boundary_heights.iter_mut().flatten() {
        *h -= m;
    }
    let violations = validate_region(&region);
    if violations.is_empty() {
        Ok(region)
    } else {
        Err(Error::RegionInvalid(violations))
    }
}

impl AxialCoord {
    fn step_by(self, d: AxialCoord, k: i32) -> Self {
        AxialCoord::new(self.a + k * d.a, self.b + k * d.b)
    }
}

impl LatticeRegion {
    /// Builds faces, edges, boundary cycle and walked boundary heights from a
    /// vertex set. Topological problems are recorded and surface through
    /// [`validate_region`].
    pub fn from_vertices(kind: RegionKind, mut verts: Vec<AxialCoord>) -> Result<LatticeRegion> {
        verts.sort();
        verts.dedup();
        let index: HashMap<AxialCoord, usize> =
            verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let ex = Axis::X.step();
        let ey = Axis::Y.step();

        let mut faces = Vec::new();
        for &v in &verts {
            let up = [v, v + ex, v + ex + ey];
            let down = [v, v + ex + ey, v + ey];
            for tri in [up, down] {
                if let (Some(&i), Some(&j), Some(&k)) =
                    (index.get(&tri[0]), index.get(&tri[1]), index.get(&tri[2]))
                {
                    faces.push([i, j, k]);
                }
            }
        }

        let mut edges: Vec<Edge> = Vec::new();
        let mut edge_lookup: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edge_faces: Vec<Vec<usize>> = Vec::new();
        let mut face_edges = Vec::with_capacity(faces.len());
        for (fi, f) in faces.iter().enumerate() {
            let mut fe = [0usize; 3];
            for k in 0..3 {
                let (p, q) = (f[k], f[(k + 1) % 3]);
                let (ax, sign) = (verts[q] - verts[p])
                    .as_axis_step()
                    .expect("face sides are unit steps");
                let (tail, head) = if sign > 0 { (p, q) } else { (q, p) };
                let id = *edge_lookup.entry((tail, head)).or_insert_with(|| {
                    edges.push(Edge { tail, head, axis: ax });
                    edge_faces.push(Vec::new());
                    edges.len() - 1
                });
                edge_faces[id].push(fi);
                fe[k] = id;
            }
            face_edges.push(fe);
        }

        let nv = verts.len();
        let mut out_nb = vec![[None; 3]; nv];
        let mut in_nb = vec![[None; 3]; nv];
        for e in &edges {
            out_nb[e.tail][e.axis.index()] = Some(e.head);
            in_nb[e.head][e.axis.index()] = Some(e.tail);
        }
        let mut face_count = vec![0u8; nv];
        for f in &faces {
            for &v in f {
                face_count[v] += 1;
            }
        }

        let mut topology_violations = Vec::new();
        if faces.is_empty() {
            topology_violations.push(RegionViolation::Empty);
        }
        // Boundary segments directed with the region on the left.
        let mut next: BTreeMap<usize, usize> = BTreeMap::new();
        let mut n_segments = 0usize;
        for (fi, f) in faces.iter().enumerate() {
            for k in 0..3 {
                let e = face_edges[fi][k];
                if edge_faces[e].len() == 1 {
                    n_segments += 1;
                    let (p, q) = (f[k], f[(k + 1) % 3]);
                    if next.insert(p, q).is_some() {
                        topology_violations.push(RegionViolation::BoundaryPinch { vertex: verts[p] });
                    }
                }
            }
        }
        for (e, fs) in edges.iter().zip(&edge_faces) {
            if fs.len() > 2 {
                topology_violations.push(RegionViolation::EdgeFaceCount {
                    tail: verts[e.tail],
                    head: verts[e.head],
                    faces: fs.len(),
                });
            }
        }
        let mut boundary_cycle = Vec::new();
        if let Some((&start, _)) = next.iter().next() {
            let mut cur = start;
            loop {
                boundary_cycle.push(cur);
                match next.get(&cur) {
                    Some(&q) if q != start && boundary_cycle.len() <= n_segments => cur = q,
                    _ => break,
                }
            }
            if boundary_cycle.len() != n_segments {
                let mut seen = vec![false; nv];
                let mut cycles = 0;
                for &s in next.keys() {
                    if seen[s] {
                        continue;
                    }
                    cycles += 1;
                    let mut c = s;
                    while !seen[c] {
                        seen[c] = true;
                        match next.get(&c) {
                            Some(&q) => c = q,
                            None => break,
                        }
                    }
                }
                topology_violations.push(RegionViolation::BoundaryCycles { cycles });
            }
        }

        let mut boundary_heights = vec![None; nv];
        if !boundary_cycle.is_empty() {
            let mut h = 0i32;
            let mut walked = vec![(boundary_cycle[0], 0)];
            for w in boundary_cycle.windows(2) {
                let (_, sign) = (verts[w[1]] - verts[w[0]]).as_axis_step().expect("unit step");
                h += sign;
                walked.push((w[1], h));
            }
            let m = walked.iter().map(|&(_, h)| h).min().unwrap_or(0);
            for (v, h) in walked {
                boundary_heights[v] = Some(h - m);
            }
        }
        let interior = (0..nv).filter(|&v| face_count[v] == 6).collect();

        Ok(LatticeRegion {
            kind,
            vertices: verts,
            index,
            faces,
            face_edges,
            edges,
            edge_faces,
            edge_lookup,
            out_nb,
            in_nb,
            face_count,
            boundary_cycle,
            boundary_heights,
            interior,
            topology_violations,
        })
    }

    pub fn kind(&self) -> RegionKind {
        self.kind
    }

    /// Diameter of a disk region; for a hexagon the sum of its sides.
    pub fn size(&self) -> u32 {
        match self.kind {
            RegionKind::Disk { l, .. } => l,
            RegionKind::Hexagon { a, b, c } => a + b + c,
        }
    }

    pub fn is_disk(&self) -> bool {
        matches!(self.kind, RegionKind::Disk { .. })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[AxialCoord] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> AxialCoord {
        self.vertices[i]
    }

    pub fn index_of(&self, v: AxialCoord) -> Option<usize> {
        self.index.get(&v).copied()
    }

    /// Faces as vertex triples in counterclockwise order.
    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    /// Edge ids of face `f`, aligned with its vertex order: entry `k` joins
    /// vertices `k` and `k+1`.
    pub fn face_edges(&self, f: usize) -> [usize; 3] {
        self.face_edges[f]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_faces(&self, e: usize) -> &[usize] {
        &self.edge_faces[e]
    }

    pub fn edge_between(&self, tail: usize, head: usize) -> Option<usize> {
        self.edge_lookup.get(&(tail, head)).copied()
    }

    pub fn out_neighbor(&self, v: usize, axis: Axis) -> Option<usize> {
        self.out_nb[v][axis.index()]
    }

    pub fn in_neighbor(&self, v: usize, axis: Axis) -> Option<usize> {
        self.in_nb[v][axis.index()]
    }

    pub fn out_neighbors(&self, v: usize) -> [Option<usize>; 3] {
        self.out_nb[v]
    }

    pub fn in_neighbors(&self, v: usize) -> [Option<usize>; 3] {
        self.in_nb[v]
    }

    /// Opposite next-nearest-neighbour pairs of `v`, one per axis direction.
    pub fn nnn_pairs(&self, v: usize) -> [(Option<usize>, Option<usize>); 3] {
        let c = self.vertices[v];
        NNN_STEPS.map(|d| (self.index_of(c + d), self.index_of(c - d)))
    }

    pub fn boundary_cycle(&self) -> &[usize] {
        &self.boundary_cycle
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary_heights[v].is_some() || self.face_count[v] < 6
    }

    pub fn boundary_height(&self, v: usize) -> Option<i32> {
        self.boundary_heights[v]
    }

    /// Interior vertices (on six faces) in canonical order.
    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn faces_at(&self, v: usize) -> usize {
        self.face_count[v] as usize
    }

    /// Heights are congruent to `sublattice + residue` modulo 3.
    pub fn residue(&self) -> u8 {
        self.boundary_cycle
            .first()
            .and_then(|&v| {
                self.boundary_heights[v]
                    .map(|h| (h - self.vertices[v].sublattice() as i32).rem_euclid(3) as u8)
            })
            .unwrap_or(0)
    }

    /// Smallest nonnegative height compatible with the residue class of `v`.
    pub fn floor(&self, v: usize) -> i32 {
        (self.vertices[v].sublattice() as i32 + self.residue() as i32).rem_euclid(3)
    }

    /// Index of the origin vertex, the centre of every shipped region.
    pub fn center(&self) -> Option<usize> {
        self.index_of(AxialCoord::ORIGIN)
    }

    /// Overwrites one boundary height (fault injection for validators).
    pub fn set_boundary_height(&mut self, v: usize, h: i32) {
        self.boundary_heights[v] = Some(h);
    }

    /// Hex digest of the canonical JSON form.
    pub fn hash_hex(&self) -> String {
        let doc = self.to_json();
        let text = serde_json::to_string(&doc).expect("json");
        let digest = Sha256::digest(text.as_bytes());
        hex::encode(digest)
    }

    pub fn to_json(&self) -> Value {
        let mut bh = serde_json::Map::new();
        for (i, h) in self.boundary_heights.iter().enumerate() {
            if let Some(h) = h {
                let v = self.vertices[i];
                bh.insert(format!("{},{}", v.a, v.b), json!(h));
            }
        }
        json!({
            "schema_version": crate::cli::SCHEMA_VERSION,
            "L": self.size(),
            "kind": self.kind,
            "vertices": self.vertices,
            "boundary_cycle": self.boundary_cycle.iter().map(|&i| self.vertices[i]).collect::<Vec<_>>(),
            "boundary_heights": bh,
        })
    }

    /// Rebuilds a region from its JSON form. Stored boundary heights override
    /// the walked ones so that edited files are caught by the validator.
    pub fn from_json(doc: &Value) -> Result<LatticeRegion> {
        crate::cli::check_schema(doc)?;
        let kind: RegionKind = serde_json::from_value(doc["kind"].clone())?;
        let verts: Vec<AxialCoord> = serde_json::from_value(doc["vertices"].clone())?;
        let mut region = LatticeRegion::from_vertices(kind, verts)?;
        let bh = doc["boundary_heights"]
            .as_object()
            .ok_or_else(|| Error::Format("boundary_heights must be an object".into()))?;
        region.boundary_heights.iter_mut().for_each(|h| *h = None);
        for (k, h) in bh {
            let mut it = k.split(',').map(|s| s.trim().parse::<i32>());
            let (a, b) = match (it.next(), it.next()) {
                (Some(Ok(a)), Some(Ok(b))) => (a, b),
                _ => return Err(Error::Format(format!("bad vertex key {k}"))),
            };
            let v = region
                .index_of(AxialCoord::new(a, b))
                .ok_or_else(|| Error::Format(format!("boundary vertex {k} not in region")))?;
            let h = h.as_i64().ok_or_else(|| Error::Format(format!("bad height at {k}")))?;
            region.boundary_heights[v] = Some(h as i32);
        }
        Ok(region)
    }
}

/// Checks every region invariant and returns the list of violations.
pub fn validate_region(region: &LatticeRegion) -> Vec<RegionViolation> {
    let mut out = region.topology_violations.clone();
    let verts = &region.vertices;
    let cycle = &region.boundary_cycle;
    let n = cycle.len();
    let disk = region.is_disk();

    if disk && n > 0 {
        let mut total = 0i32;
        for k in 0..n {
            let prev = cycle[(k + n - 1) % n];
            let cur = cycle[k];
            let nxt = cycle[(k + 1) % n];
            let din = (verts[cur] - verts[prev]).direction_index();
            let dout = (verts[nxt] - verts[cur]).direction_index();
            if let (Some(i), Some(o)) = (din, dout) {
                let t = ((o as i32 - i as i32).rem_euclid(6) + 2).rem_euclid(6) - 2;
                total += t * 60;
                match t {
                    0 => out.push(RegionViolation::CollinearBoundary { vertex: verts[cur] }),
                    1 | -1 => {}
                    _ => out.push(RegionViolation::SharpTurn { vertex: verts[cur], degrees: t * 60 }),
                }
            }
        }
        if total != 360 {
            out.push(RegionViolation::TotalTurning { degrees: total });
        }
    }

    for &v in cycle {
        match region.boundary_heights[v] {
            None => out.push(RegionViolation::MissingBoundaryHeight { vertex: verts[v] }),
            Some(h) if disk && !(0..=1).contains(&h) => {
                out.push(RegionViolation::BoundaryHeightRange { vertex: verts[v], height: h })
            }
            _ => {}
        }
    }
    for k in 0..n {
        let p = cycle[k];
        let q = cycle[(k + 1) % n];
        let (tail, head) = match region.edge_between(p, q) {
            Some(_) => (p, q),
            None => (q, p),
        };
        if let (Some(ht), Some(hh)) = (region.boundary_heights[tail], region.boundary_heights[head]) {
            let d = hh - ht;
            let ok = if disk { d == 1 } else { d == 1 || d == -2 };
            if !ok {
                out.push(RegionViolation::BoundaryEdgeRule {
                    tail: verts[tail],
                    head: verts[head],
                    difference: d,
                });
            }
        }
    }
    if disk && !region.faces.len().is_multiple_of(6) {
        out.push(RegionViolation::FaceCount { faces: region.faces.len() });
    }
    out
}
