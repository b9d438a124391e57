//! Flip moves (add or remove one unit cube), the greedy reduction to the
//! minimal tiling, and classification of local maxima.

use std::cmp::Reverse;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Axis, LatticeRegion};
use crate::tiling::{min_config, volume, HeightConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Raise,
    Lower,
}

impl Direction {
    pub fn delta(self) -> i32 {
        match self {
            Direction::Raise => 3,
            Direction::Lower => -3,
        }
    }

    pub fn inverse(self) -> Direction {
        match self {
            Direction::Raise => Direction::Lower,
            Direction::Lower => Direction::Raise,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlipMove {
    pub vertex: usize,
    pub direction: Direction,
}

impl FlipMove {
    pub fn new(vertex: usize, direction: Direction) -> Self {
        FlipMove { vertex, direction }
    }

    pub fn inverse(self) -> FlipMove {
        FlipMove::new(self.vertex, self.direction.inverse())
    }
}

impl fmt::Display for FlipMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}@{}", self.direction, self.vertex)
    }
}

/// `v` sits on a removable cube: out-neighbours at `h-2`, in-neighbours at
/// `h-1`, and the result stays nonnegative.
pub fn can_lower(region: &LatticeRegion, h: &[i32], v: usize) -> bool {
    if region.faces_at(v) != 6 || region.is_boundary(v) {
        return false;
    }
    let hv = h[v];
    hv >= 3
        && Axis::ALL.iter().all(|&ax| {
            region.out_neighbor(v, ax).map(|w| h[w] == hv - 2).unwrap_or(false)
                && region.in_neighbor(v, ax).map(|w| h[w] == hv - 1).unwrap_or(false)
        })
}

/// Mirror of [`can_lower`]: out-neighbours at `h+1`, in-neighbours at `h+2`.
pub fn can_raise(region: &LatticeRegion, h: &[i32], v: usize) -> bool {
    if region.faces_at(v) != 6 || region.is_boundary(v) {
        return false;
    }
    let hv = h[v];
    Axis::ALL.iter().all(|&ax| {
        region.out_neighbor(v, ax).map(|w| h[w] == hv + 1).unwrap_or(false)
            && region.in_neighbor(v, ax).map(|w| h[w] == hv + 2).unwrap_or(false)
    })
}

pub fn is_applicable(region: &LatticeRegion, h: &HeightConfig, m: FlipMove) -> bool {
    match m.direction {
        Direction::Raise => can_raise(region, h.heights(), m.vertex),
        Direction::Lower => can_lower(region, h.heights(), m.vertex),
    }
}

/// All applicable moves in canonical vertex order.
pub fn flips_of(region: &LatticeRegion, h: &HeightConfig) -> Vec<FlipMove> {
    let hs = h.heights();
    let mut out = Vec::new();
    for &v in region.interior() {
        if can_lower(region, hs, v) {
            out.push(FlipMove::new(v, Direction::Lower));
        } else if can_raise(region, hs, v) {
            out.push(FlipMove::new(v, Direction::Raise));
        }
    }
    out
}

pub fn apply_flip(region: &LatticeRegion, h: &HeightConfig, m: FlipMove) -> Result<HeightConfig> {
    if m.vertex >= region.num_vertices() || !is_applicable(region, h, m) {
        return Err(Error::NotApplicable(m.to_string()));
    }
    Ok(h.shifted(m.vertex, m.direction.delta()))
}

/// Greedy lowering: repeatedly remove the highest removable cube (ties by
/// vertex order) until the minimal tiling is reached.
pub fn reduce_to_min(region: &LatticeRegion, h: &HeightConfig) -> Result<Vec<FlipMove>> {
    let target = min_config(region)?;
    let mut cur = h.clone();
    let mut seq = Vec::new();
    // Removable vertices keyed by (height, reversed index); a flip only
    // changes the status of the vertex and its six neighbours.
    let mut ready: BTreeSet<(i32, Reverse<usize>)> = BTreeSet::new();
    let mut key: Vec<Option<i32>> = vec![None; region.num_vertices()];
    for &v in region.interior() {
        if can_lower(region, cur.heights(), v) {
            key[v] = Some(cur.get(v));
            ready.insert((cur.get(v), Reverse(v)));
        }
    }
    while let Some(&(hv, Reverse(v))) = ready.iter().next_back() {
        ready.remove(&(hv, Reverse(v)));
        key[v] = None;
        cur.set(v, hv - 3);
        seq.push(FlipMove::new(v, Direction::Lower));
        let around = region.out_neighbors(v).into_iter().chain(region.in_neighbors(v)).flatten();
        for u in std::iter::once(v).chain(around) {
            if let Some(k) = key[u].take() {
                ready.remove(&(k, Reverse(u)));
            }
            if can_lower(region, cur.heights(), u) {
                key[u] = Some(cur.get(u));
                ready.insert((cur.get(u), Reverse(u)));
            }
        }
    }
    if cur != target {
        return Err(Error::ReductionStuck { volume: volume(&cur), config: Box::new(cur) });
    }
    Ok(seq)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaximumClass {
    /// No next-nearest neighbour shares the maximal height.
    Isolated,
    /// On a plateau edge where it turns (or one of the extra removable
    /// patterns): no opposite next-nearest pair is level with `v`.
    PlateauCorner,
    /// On a straight plateau edge: some opposite next-nearest pair is level.
    PlateauStraight,
    /// All six next-nearest neighbours are level.
    PlateauInterior,
}

fn is_local_max(region: &LatticeRegion, h: &[i32], v: usize) -> bool {
    let hv = h[v];
    region.faces_at(v) == 6
        && Axis::ALL.iter().all(|&ax| {
            region.out_neighbor(v, ax).map(|w| h[w] == hv - 2).unwrap_or(false)
                && region.in_neighbor(v, ax).map(|w| h[w] == hv - 1).unwrap_or(false)
        })
}

/// Classifies a local maximum by the next-nearest neighbours at its height.
pub fn classify_maximum(region: &LatticeRegion, h: &HeightConfig, v: usize) -> Result<MaximumClass> {
    let hs = h.heights();
    if v >= region.num_vertices() || !is_local_max(region, hs, v) {
        return Err(Error::NotLocalMaximum(
            region.vertices().get(v).map(|c| c.to_string()).unwrap_or_else(|| v.to_string()),
        ));
    }
    let hv = hs[v];
    let level = |w: Option<usize>| w.map(|w| hs[w] == hv).unwrap_or(false);
    let pairs = region.nnn_pairs(v);
    let n_level: usize = pairs.iter().map(|&(p, m)| level(p) as usize + level(m) as usize).sum();
    let straight = pairs.iter().any(|&(p, m)| level(p) && level(m));
    Ok(if n_level == 0 {
        MaximumClass::Isolated
    } else if n_level == 6 {
        MaximumClass::PlateauInterior
    } else if straight {
        MaximumClass::PlateauStraight
    } else {
        MaximumClass::PlateauCorner
    })
}

fn fredkin_blocked(region: &LatticeRegion, h: &[i32], v: usize, top: i32) -> bool {
    region.nnn_pairs(v).iter().any(|&(p, m)| {
        matches!((p, m), (Some(p), Some(m)) if h[p] == top && h[m] == top)
    })
}

/// Lowering under the next-nearest-neighbour constrained Fredkin rule: the
/// plain condition plus no opposite next-nearest pair level with `v`.
pub fn fredkin_can_lower(region: &LatticeRegion, h: &[i32], v: usize) -> bool {
    can_lower(region, h, v) && !fredkin_blocked(region, h, v, h[v])
}

pub fn fredkin_can_raise(region: &LatticeRegion, h: &[i32], v: usize) -> bool {
    can_raise(region, h, v) && !fredkin_blocked(region, h, v, h[v] + 3)
}

/// Moves of the constrained Fredkin rule, in canonical order.
pub fn fredkin_flips_of(region: &LatticeRegion, h: &HeightConfig) -> Vec<FlipMove> {
    let hs = h.heights();
    let mut out = Vec::new();
    for &v in region.interior() {
        if fredkin_can_lower(region, hs, v) {
            out.push(FlipMove::new(v, Direction::Lower));
        } else if fredkin_can_raise(region, hs, v) {
            out.push(FlipMove::new(v, Direction::Raise));
        }
    }
    out
}
