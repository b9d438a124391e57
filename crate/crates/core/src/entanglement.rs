//! The central vertical cut, cross-sectional area, color-line tracing and
//! pair matching, the exact entropy decomposition and scaling classification.

use serde::{Deserialize, Serialize};

use crate::ensemble::{cut_distribution, partition_function, ConfigSet};
use crate::error::{Error, Result};
use crate::geometry::{Axis, LatticeRegion};
use crate::numeric::Deformation;
use crate::tiling::{lozenges_of, min_config, HeightConfig, Lozenge};

/// The vertical cut through the region centre. The column holds the region
/// vertices on the line, bottom to top.
#[derive(Clone, Debug, PartialEq)]
pub struct Cut {
    column: Vec<usize>,
    line: i32,
    baseline: Vec<i32>,
    x0: u64,
}

impl Cut {
    pub fn column(&self) -> &[usize] {
        &self.column
    }

    /// Horizontal lattice coordinate `a - b` of the cut line.
    pub fn line(&self) -> i32 {
        self.line
    }

    /// Heights of the minimal tiling on the column.
    pub fn baseline(&self) -> &[i32] {
        &self.baseline
    }

    /// Shared color pairs of the minimal tiling.
    pub fn x0(&self) -> u64 {
        self.x0
    }

    pub fn profile(&self, h: &HeightConfig) -> Vec<i32> {
        self.column.iter().map(|&v| h.get(v)).collect()
    }

    pub fn area_of_profile(&self, profile: &[i32]) -> i64 {
        profile
            .iter()
            .zip(&self.baseline)
            .map(|(&h, &b)| (h - b) as i64)
            .sum()
    }
}

pub fn central_cut(region: &LatticeRegion) -> Result<Cut> {
    let line = 0;
    let mut column: Vec<usize> =
        (0..region.num_vertices()).filter(|&v| region.vertex(v).col() == line).collect();
    if column.is_empty() {
        return Err(Error::EmptyCut);
    }
    column.sort_by_key(|&v| region.vertex(v).row());
    let min = min_config(region)?;
    let baseline = column.iter().map(|&v| min.get(v)).collect();
    let mut cut = Cut { column, line, baseline, x0: 0 };
    cut.x0 = color_line_crossings(region, &min, &cut)?;
    Ok(cut)
}

/// `A = Σ_{column} (h - h_min)`.
pub fn cross_section_area(h: &HeightConfig, cut: &Cut) -> i64 {
    cut.area_of_profile(&cut.profile(h))
}

/// Position of a lozenge relative to the cut line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
    /// A horizontal lozenge whose short diagonal lies on the cut.
    Split,
}

/// Up (`+e_j`) or down (`-e_k`) step of a color line along axis `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    Open,
    Close,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Segment {
    pub lozenge: usize,
    pub step: Step,
    pub side: Side,
}

/// A maximal color line: the chain of lozenges joined through their sides
/// parallel to `axis`, read as a word of up and down steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorLine {
    pub axis: Axis,
    pub segments: Vec<Segment>,
}

impl ColorLine {
    /// Parenthesis matching; `None` when the word is not balanced Dyck.
    pub fn matching(&self) -> Option<Vec<(usize, usize)>> {
        let (pairs, unmatched) = self.partial_matching();
        unmatched.is_empty().then_some(pairs)
    }

    /// Greedy parenthesis matching that also returns the unmatched
    /// positions.
    pub fn partial_matching(&self) -> (Vec<(usize, usize)>, Vec<usize>) {
        let mut stack = Vec::new();
        let mut pairs = Vec::with_capacity(self.segments.len() / 2);
        let mut unmatched = Vec::new();
        for (i, s) in self.segments.iter().enumerate() {
            match s.step {
                Step::Open => stack.push(i),
                Step::Close => match stack.pop() {
                    Some(j) => pairs.push((j, i)),
                    None => unmatched.push(i),
                },
            }
        }
        unmatched.extend(stack);
        unmatched.sort_unstable();
        (pairs, unmatched)
    }
}

#[derive(Clone, Debug)]
pub struct ColorLines {
    pub lozenges: Vec<Lozenge>,
    pub lines: Vec<ColorLine>,
    /// Every line must be Dyck. Set on disk regions; on boxed hexagons the
    /// lines run between opposite sides and their unmatched steps carry
    /// boundary-fixed colors.
    pub strict: bool,
}

impl ColorLines {
    /// All matched pairs as `(line, i, j)` segment positions.
    pub fn pairs(&self) -> Result<Vec<(usize, usize, usize)>> {
        let mut out = Vec::new();
        for (li, line) in self.lines.iter().enumerate() {
            let (m, unmatched) = line.partial_matching();
            if self.strict && !unmatched.is_empty() {
                return Err(Error::NotDyck {
                    axis: line.axis.label(),
                    detail: format!("{} of {} segments unmatched", unmatched.len(), line.segments.len()),
                });
            }
            out.extend(m.into_iter().map(|(a, b)| (li, a, b)));
        }
        Ok(out)
    }

    /// Pairs with at least one member visible on each side of the cut.
    pub fn shared_pairs(&self) -> Result<u64> {
        let mut n = 0;
        for (li, a, b) in self.pairs()? {
            let sa = self.lines[li].segments[a].side;
            let sb = self.lines[li].segments[b].side;
            let same = matches!((sa, sb), (Side::Left, Side::Left) | (Side::Right, Side::Right));
            n += (!same) as u64;
        }
        Ok(n)
    }
}

pub fn lozenge_side(region: &LatticeRegion, lz: &Lozenge, line: i32) -> Side {
    let e = region.edges()[lz.diagonal];
    let s = region.vertex(e.tail).col() + region.vertex(e.head).col() - 2 * line;
    match s.signum() {
        -1 => Side::Left,
        1 => Side::Right,
        _ => Side::Split,
    }
}

/// Traces every color line of the tiling.
pub fn color_lines(region: &LatticeRegion, h: &HeightConfig, line: i32) -> Result<ColorLines> {
    let lozenges = lozenges_of(region, h)?;
    let sides: Vec<Side> = lozenges.iter().map(|l| lozenge_side(region, l, line)).collect();
    let mut lines = Vec::new();
    for axis in Axis::ALL {
        let j = axis.next();
        let k = j.next();
        let up = j.step();
        let down = -k.step();
        let mut by_edge: std::collections::HashMap<usize, Vec<(usize, usize)>> =
            std::collections::HashMap::new();
        let mut n_members = 0;
        for (li, lz) in lozenges.iter().enumerate() {
            let s = lz.sides_along(region, axis);
            if s.len() != 2 {
                continue;
            }
            n_members += 1;
            by_edge.entry(s[0]).or_default().push((li, s[1]));
            by_edge.entry(s[1]).or_default().push((li, s[0]));
        }
        let mut starts: Vec<usize> =
            by_edge.iter().filter(|(_, v)| v.len() == 1).map(|(&e, _)| e).collect();
        starts.sort_unstable();
        let mut used = vec![false; lozenges.len()];
        let mut traced = 0;
        for start in starts {
            let first = by_edge[&start][0].0;
            if used[first] {
                continue;
            }
            let mut seq: Vec<(usize, crate::geometry::AxialCoord)> = Vec::new();
            let mut cur = start;
            let mut prev: Option<usize> = None;
            loop {
                let nxt = by_edge[&cur].iter().find(|&&(l, _)| Some(l) != prev).copied();
                let Some((l, other)) = nxt else { break };
                used[l] = true;
                let d = region.vertex(region.edges()[other].tail)
                    - region.vertex(region.edges()[cur].tail);
                seq.push((l, d));
                prev = Some(l);
                cur = other;
            }
            traced += seq.len();
            if seq.first().map(|&(_, d)| d != up && d != down).unwrap_or(false) {
                seq.reverse();
                for s in seq.iter_mut() {
                    s.1 = -s.1;
                }
            }
            let mut segments = Vec::with_capacity(seq.len());
            for (l, d) in seq {
                let step = if d == up {
                    Step::Open
                } else if d == down {
                    Step::Close
                } else {
                    return Err(Error::NotDyck {
                        axis: axis.label(),
                        detail: "line is not monotone".into(),
                    });
                };
                segments.push(Segment { lozenge: l, step, side: sides[l] });
            }
            lines.push(ColorLine { axis, segments });
        }
        if traced != n_members {
            return Err(Error::NotDyck {
                axis: axis.label(),
                detail: format!("{} of {} segments lie on closed loops", n_members - traced, n_members),
            });
        }
    }
    Ok(ColorLines { lozenges, lines, strict: region.is_disk() })
}

/// Matched color pairs shared by the two halves of the cut: pairs whose
/// members are not both strictly on the same side. A bisected horizontal
/// lozenge is visible from both halves.
pub fn color_line_crossings(region: &LatticeRegion, h: &HeightConfig, cut: &Cut) -> Result<u64> {
    color_lines(region, h, cut.line)?.shared_pairs()
}

/// Color-line segments meeting the cut line geometrically. A segment joins
/// the midpoints of two parallel lozenge sides; it is counted when it passes
/// from the open left half-plane into the closed right one.
pub fn segment_crossings(region: &LatticeRegion, h: &HeightConfig, cut: &Cut) -> Result<u64> {
    let lozenges = lozenges_of(region, h)?;
    let mid = |e: usize| {
        let e = region.edges()[e];
        region.vertex(e.tail).col() + region.vertex(e.head).col() - 2 * cut.line
    };
    let mut n = 0;
    for lz in &lozenges {
        for axis in Axis::ALL {
            let s = lz.sides_along(region, axis);
            if s.len() == 2 {
                let (m0, m1) = (mid(s[0]), mid(s[1]));
                n += (m0.min(m1) < 0 && m0.max(m1) >= 0) as u64;
            }
        }
    }
    Ok(n)
}

/// Total matched pairs; every line must be a balanced Dyck word, whatever
/// the region kind.
pub fn matched_pair_count(region: &LatticeRegion, h: &HeightConfig) -> Result<u64> {
    let mut lines = color_lines(region, h, 0)?;
    lines.strict = true;
    Ok(lines.pairs()?.len() as u64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub l: u32,
    pub q: f64,
    pub s: u32,
    /// `color_term + s_colorless`.
    pub s_total: f64,
    pub s_colorless: f64,
    /// `ln s · (<A> + X0)`.
    pub color_term: f64,
    pub mean_area: f64,
    pub x0: u64,
    pub n_profiles: usize,
    /// `<N>` with `N` the shared color pairs of each tiling.
    pub mean_shared_pairs: f64,
    /// `ln s · <N> + s_colorless`, the entropy from exact pair counting.
    pub s_pair_count: f64,
}

/// Exact entropy decomposition over an enumerated set, in nats.
pub fn exact_entropy(set: &ConfigSet, q: &Deformation, s: u32, cut: &Cut) -> Result<EntropyReport> {
    if s == 0 {
        return Err(Error::InvalidParameter("s must be at least 1".into()));
    }
    let dist = cut_distribution(set, q, cut);
    let s_colorless = dist.shannon_entropy();
    let ln_s = (s as f64).ln();
    let color_term = ln_s * (dist.mean_area + cut.x0 as f64);
    let z = partition_function(set, q);
    let ln_q = q.ln();
    let region = set.region();
    let mut mean_shared_pairs = 0.0;
    for (h, &v) in set.configs().iter().zip(set.volumes()) {
        let w = (2.0 * v as f64 * ln_q - z.ln_z).exp();
        mean_shared_pairs += w * color_line_crossings(region, h, cut)? as f64;
    }
    Ok(EntropyReport {
        l: region.size(),
        q: q.value(),
        s,
        s_total: color_term + s_colorless,
        s_colorless,
        color_term,
        mean_area: dist.mean_area,
        x0: cut.x0,
        n_profiles: dist.profiles.len(),
        mean_shared_pairs,
        s_pair_count: ln_s * mean_shared_pairs + s_colorless,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScalingModel {
    #[serde(rename = "area")]
    Area,
    #[serde(rename = "L_log_L")]
    LLogL,
    #[serde(rename = "volume")]
    Volume,
}

impl ScalingModel {
    pub const ALL: [ScalingModel; 3] = [ScalingModel::Area, ScalingModel::LLogL, ScalingModel::Volume];

    pub fn basis(self, l: f64) -> f64 {
        match self {
            ScalingModel::Area => l,
            ScalingModel::LLogL => l * l.ln(),
            ScalingModel::Volume => l * l,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ScalingModel::Area => "area",
            ScalingModel::LLogL => "L_log_L",
            ScalingModel::Volume => "volume",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFit {
    pub model: ScalingModel,
    pub coefficient: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub best: ScalingModel,
    pub fits: Vec<ModelFit>,
    /// Best and runner-up residuals differ by less than 10%.
    pub inconclusive: bool,
    /// `1 - best/runner_up`.
    pub margin: f64,
}

impl ScalingFit {
    pub fn fit(&self, m: ScalingModel) -> &ModelFit {
        self.fits.iter().find(|f| f.model == m).expect("all models fitted")
    }
}

/// Least-squares fits of `c·L`, `c·L ln L` and `c·L²` to `(L, value)`
/// points.
pub fn classify_scaling(series: &[(f64, f64)]) -> Result<ScalingFit> {
    if series.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "scaling fit needs at least 4 sizes, got {}",
            series.len()
        )));
    }
    let mut fits: Vec<ModelFit> = ScalingModel::ALL
        .iter()
        .map(|&model| {
            let (sxy, sxx) = series.iter().fold((0.0, 0.0), |(a, b), &(l, y)| {
                let f = model.basis(l);
                (a + f * y, b + f * f)
            });
            let c = sxy / sxx;
            let residual = series.iter().map(|&(l, y)| (y - c * model.basis(l)).powi(2)).sum();
            ModelFit { model, coefficient: c, residual }
        })
        .collect();
    let mut order: Vec<usize> = (0..fits.len()).collect();
    order.sort_by(|&a, &b| fits[a].residual.total_cmp(&fits[b].residual));
    let best = fits[order[0]].model;
    let (r0, r1) = (fits[order[0]].residual, fits[order[1]].residual);
    let margin = if r1 > 0.0 { 1.0 - r0 / r1 } else { 0.0 };
    fits.sort_by_key(|f| f.model as u8);
    Ok(ScalingFit { best, fits, inconclusive: margin < 0.1, margin })
}
