//! Height functions, their validation, Thurston envelopes and the decoding
//! of heights into lozenges.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::{AxialCoord, Axis, LatticeRegion};

/// One tiling, stored as a height per vertex in the region's canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HeightConfig(Box<[i32]>);

impl HeightConfig {
    pub fn new(heights: Vec<i32>) -> Self {
        HeightConfig(heights.into_boxed_slice())
    }

    pub fn heights(&self) -> &[i32] {
        &self.0
    }

    pub fn get(&self, v: usize) -> i32 {
        self.0[v]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Copy with vertex `v` shifted by `delta`.
    pub fn shifted(&self, v: usize, delta: i32) -> HeightConfig {
        let mut h = self.0.clone();
        h[v] += delta;
        HeightConfig(h)
    }

    pub(crate) fn set(&mut self, v: usize, h: i32) {
        self.0[v] = h;
    }

    pub fn into_vec(self) -> Vec<i32> {
        self.0.into_vec()
    }

    pub fn to_json(&self, region: &LatticeRegion) -> Value {
        json!({
            "schema_version": crate::cli::SCHEMA_VERSION,
            "region_hash": region.hash_hex(),
            "heights": self.heights(),
        })
    }

    pub fn from_json(doc: &Value, region: &LatticeRegion) -> Result<HeightConfig> {
        crate::cli::check_schema(doc)?;
        if let Some(hash) = doc.get("region_hash").and_then(Value::as_str) {
            if hash != region.hash_hex() {
                return Err(Error::Format("config belongs to a different region".into()));
            }
        }
        let h: Vec<i32> = serde_json::from_value(doc["heights"].clone())?;
        if h.len() != region.num_vertices() {
            return Err(Error::LengthMismatch { expected: region.num_vertices(), found: h.len() });
        }
        Ok(HeightConfig::new(h))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConfigViolation {
    Length { expected: usize, found: usize },
    EdgeRule { tail: AxialCoord, head: AxialCoord, difference: i32 },
    FaceRule { face: [AxialCoord; 3], diagonals: usize },
    Boundary { vertex: AxialCoord, expected: i32, found: i32 },
    Negative { vertex: AxialCoord, height: i32 },
}

impl fmt::Display for ConfigViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ConfigViolation::*;
        match self {
            Length { expected, found } => write!(f, "{found} heights for {expected} vertices"),
            EdgeRule { tail, head, difference } => {
                write!(f, "edge {tail}->{head} changes height by {difference}")
            }
            FaceRule { face, diagonals } => write!(
                f,
                "face {}{}{} has {diagonals} short diagonals",
                face[0], face[1], face[2]
            ),
            Boundary { vertex, expected, found } => {
                write!(f, "boundary vertex {vertex} has height {found}, pinned at {expected}")
            }
            Negative { vertex, height } => write!(f, "negative height {height} at {vertex}"),
        }
    }
}

/// Checks the edge rule, the one-diagonal-per-face rule, the pinned boundary
/// and nonnegativity.
pub fn validate_config(region: &LatticeRegion, h: &HeightConfig) -> Vec<ConfigViolation> {
    let n = region.num_vertices();
    if h.len() != n {
        return vec![ConfigViolation::Length { expected: n, found: h.len() }];
    }
    let mut out = Vec::new();
    let vx = |i: usize| region.vertex(i);
    for e in region.edges() {
        let d = h.get(e.head) - h.get(e.tail);
        if d != 1 && d != -2 {
            out.push(ConfigViolation::EdgeRule { tail: vx(e.tail), head: vx(e.head), difference: d });
        }
    }
    for (fi, f) in region.faces().iter().enumerate() {
        let diagonals = region
            .face_edges(fi)
            .iter()
            .filter(|&&e| {
                let e = region.edges()[e];
                (h.get(e.head) - h.get(e.tail)).abs() == 2
            })
            .count();
        if diagonals != 1 {
            out.push(ConfigViolation::FaceRule { face: f.map(vx), diagonals });
        }
    }
    for v in 0..n {
        if let Some(b) = region.boundary_height(v) {
            if b != h.get(v) {
                out.push(ConfigViolation::Boundary { vertex: vx(v), expected: b, found: h.get(v) });
            }
        }
        if h.get(v) < 0 {
            out.push(ConfigViolation::Negative { vertex: vx(v), height: h.get(v) });
        }
    }
    out
}

pub fn is_valid(region: &LatticeRegion, h: &HeightConfig) -> bool {
    validate_config(region, h).is_empty()
}

/// Sum of all vertex heights.
pub fn volume(h: &HeightConfig) -> i64 {
    h.heights().iter().map(|&x| x as i64).sum()
}

/// Pointwise-largest lower bound implied by the boundary alone (no
/// nonnegativity). On disk regions this dips below zero.
pub fn thurston_lower_envelope(region: &LatticeRegion) -> Result<HeightConfig> {
    let h = lower_envelope(region, false);
    check_envelope(region, &h, false)?;
    Ok(h)
}

/// The minimal tiling of the sector `h >= 0` (the sharkskin surface).
pub fn min_config(region: &LatticeRegion) -> Result<HeightConfig> {
    let h = lower_envelope(region, true);
    check_envelope(region, &h, true)?;
    Ok(h)
}

/// The maximal tiling (the dome).
pub fn max_config(region: &LatticeRegion) -> Result<HeightConfig> {
    let h = upper_envelope(region);
    check_envelope(region, &h, true)?;
    Ok(h)
}

// h(v) = max_u (c_u - d(v,u)) over sources u, with forward edges costing 1 and
// backward edges 2. Computed as a multi-source shortest path on -h.
fn lower_envelope(region: &LatticeRegion, floored: bool) -> HeightConfig {
    let n = region.num_vertices();
    let mut dist = vec![i64::MAX; n];
    for (v, d) in dist.iter_mut().enumerate() {
        if let Some(b) = region.boundary_height(v) {
            *d = -(b as i64);
        }
        if floored {
            *d = (*d).min(-(region.floor(v) as i64));
        }
    }
    dijkstra(region, &mut dist, |region, w, ax| {
        [(region.in_neighbor(w, ax), 1), (region.out_neighbor(w, ax), 2)]
    });
    HeightConfig::new(dist.iter().map(|&d| (-d) as i32).collect())
}

// h(v) = min_u (c_u + d(u,v)).
fn upper_envelope(region: &LatticeRegion) -> HeightConfig {
    let n = region.num_vertices();
    let mut dist = vec![i64::MAX; n];
    for (v, d) in dist.iter_mut().enumerate() {
        if let Some(b) = region.boundary_height(v) {
            *d = b as i64;
        }
    }
    dijkstra(region, &mut dist, |region, w, ax| {
        [(region.out_neighbor(w, ax), 1), (region.in_neighbor(w, ax), 2)]
    });
    HeightConfig::new(dist.iter().map(|&d| d as i32).collect())
}

fn dijkstra<F>(region: &LatticeRegion, dist: &mut [i64], relax: F)
where
    F: Fn(&LatticeRegion, usize, Axis) -> [(Option<usize>, i64); 2],
{
    let mut heap: BinaryHeap<Reverse<(i64, usize)>> = dist
        .iter()
        .enumerate()
        .filter(|(_, &d)| d != i64::MAX)
        .map(|(v, &d)| Reverse((d, v)))
        .collect();
    while let Some(Reverse((d, w))) = heap.pop() {
        if d > dist[w] {
            continue;
        }
        for ax in Axis::ALL {
            for (nb, cost) in relax(region, w, ax) {
                if let Some(x) = nb {
                    let nd = d + cost;
                    if nd < dist[x] {
                        dist[x] = nd;
                        heap.push(Reverse((nd, x)));
                    }
                }
            }
        }
    }
}

fn check_envelope(region: &LatticeRegion, h: &HeightConfig, nonneg: bool) -> Result<()> {
    if h.heights().iter().any(|&x| x == i32::MAX || x == i32::MIN + 1) {
        return Err(Error::Untileable("region graph is disconnected".into()));
    }
    let bad: Vec<String> = validate_config(region, h)
        .into_iter()
        .filter(|v| nonneg || !matches!(v, ConfigViolation::Negative { .. }))
        .map(|v| v.to_string())
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::Untileable(bad.join("; ")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LozengeOrientation {
    /// Sides along x and y; short diagonal along z (vertical).
    Xy,
    Yz,
    Zx,
}

impl LozengeOrientation {
    pub fn from_diagonal(axis: Axis) -> Self {
        match axis {
            Axis::Z => LozengeOrientation::Xy,
            Axis::X => LozengeOrientation::Yz,
            Axis::Y => LozengeOrientation::Zx,
        }
    }

    pub fn diagonal_axis(self) -> Axis {
        match self {
            LozengeOrientation::Xy => Axis::Z,
            LozengeOrientation::Yz => Axis::X,
            LozengeOrientation::Zx => Axis::Y,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lozenge {
    pub faces: [usize; 2],
    pub orientation: LozengeOrientation,
    /// Edge id of the short diagonal.
    pub diagonal: usize,
    /// Corners along the perimeter, starting at the low end of the diagonal;
    /// heights read `h, h+1, h+2, h+1`.
    pub corners: [usize; 4],
}

impl Lozenge {
    /// Edge ids of the two sides parallel to `axis` (empty for the diagonal
    /// axis).
    pub fn sides_along(&self, region: &LatticeRegion, axis: Axis) -> Vec<usize> {
        let mut out = Vec::with_capacity(2);
        for &f in &self.faces {
            for e in region.face_edges(f) {
                if e != self.diagonal && region.edges()[e].axis == axis {
                    out.push(e);
                }
            }
        }
        out
    }
}

/// Pairs every face with its partner across the face's short diagonal.
pub fn lozenges_of(region: &LatticeRegion, h: &HeightConfig) -> Result<Vec<Lozenge>> {
    if h.len() != region.num_vertices() {
        return Err(Error::LengthMismatch { expected: region.num_vertices(), found: h.len() });
    }
    let ne = region.edges().len();
    let mut by_edge: Vec<Vec<usize>> = vec![Vec::new(); ne];
    for fi in 0..region.faces().len() {
        let diags: Vec<usize> = region
            .face_edges(fi)
            .into_iter()
            .filter(|&e| {
                let e = region.edges()[e];
                h.get(e.head) - h.get(e.tail) == -2
            })
            .collect();
        if diags.len() != 1 {
            return Err(Error::InvalidConfig(format!(
                "face {fi} has {} short diagonals",
                diags.len()
            )));
        }
        by_edge[diags[0]].push(fi);
    }
    let mut out = Vec::new();
    for (e, fs) in by_edge.iter().enumerate() {
        match fs.len() {
            0 => {}
            2 => {
                let edge = region.edges()[e];
                let third = |f: usize| {
                    *region.faces()[f]
                        .iter()
                        .find(|&&v| v != edge.tail && v != edge.head)
                        .expect("triangle")
                };
                out.push(Lozenge {
                    faces: [fs[0], fs[1]],
                    orientation: LozengeOrientation::from_diagonal(edge.axis),
                    diagonal: e,
                    corners: [edge.head, third(fs[0]), edge.tail, third(fs[1])],
                });
            }
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "short diagonal {}->{} is not shared by two faces",
                    region.vertex(region.edges()[e].tail),
                    region.vertex(region.edges()[e].head)
                )))
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_hexagon_region, build_region};

    #[test]
    fn sharkskin_heights() {
        let r = build_region(8).unwrap();
        let h = min_config(&r).unwrap();
        for v in 0..r.num_vertices() {
            let want = [2, 0, 1][r.vertex(v).sublattice() as usize];
            assert_eq!(h.get(v), want);
        }
        let t = thurston_lower_envelope(&r).unwrap();
        assert_eq!(t.get(r.center().unwrap()), -4);
    }

    #[test]
    fn unit_box_envelopes() {
        let r = build_hexagon_region(1, 1, 1).unwrap();
        let lo = min_config(&r).unwrap();
        let hi = max_config(&r).unwrap();
        let c = r.center().unwrap();
        assert_eq!(hi.get(c) - lo.get(c), 3);
        assert_eq!(lo.get(c), 0);
        assert!(validate_config(&r, &lo).is_empty());
        assert!(validate_config(&r, &hi).is_empty());
    }

    #[test]
    fn lozenge_corners_read_consecutive_heights() {
        let r = build_region(6).unwrap();
        let h = max_config(&r).unwrap();
        let lz = lozenges_of(&r, &h).unwrap();
        assert_eq!(lz.len() * 2, r.faces().len());
        for l in &lz {
            let c = l.corners.map(|v| h.get(v));
            assert_eq!([c[1] - c[0], c[2] - c[0], c[3] - c[0]], [1, 2, 1]);
        }
    }
}
