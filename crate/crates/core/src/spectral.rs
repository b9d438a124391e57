//! The colorless Hamiltonian on an enumerated basis, ground-state checks,
//! the spectral gap, and the colored micro-check of the entropy formula.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::Direction;
use crate::ensemble::{enumerate_configs, ConfigSet};
use crate::entanglement::{central_cut, color_lines, exact_entropy, Step};
use crate::error::{Error, Result};
use crate::geometry::LatticeRegion;
use crate::numeric::Deformation;

/// Largest dimension solved densely.
pub const DENSE_CAP: usize = 4096;
/// Largest colored basis of the micro-check.
pub const MICRO_CAP: u128 = 100_000;
pub const SOLVER_TOL: f64 = 1e-8;
/// `E₁` above this counts as a nondegenerate ground state.
pub const DEGENERACY_TOL: f64 = 1e-6;

/// Symmetric sparse matrix in compressed rows.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianMatrix {
    dim: usize,
    q: f64,
    norm: f64,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl HamiltonianMatrix {
    /// Builds a matrix from triplets; duplicates are summed.
    pub fn from_triplets(dim: usize, q: f64, mut t: Vec<(usize, usize, f64)>) -> Self {
        t.sort_by_key(|a| (a.0, a.1));
        let mut row_ptr = vec![0; dim + 1];
        let mut cols = Vec::with_capacity(t.len());
        let mut vals: Vec<f64> = Vec::with_capacity(t.len());
        let mut last = None;
        for (r, c, v) in t {
            if last == Some((r, c)) {
                *vals.last_mut().expect("nonempty") += v;
                continue;
            }
            last = Some((r, c));
            cols.push(c);
            vals.push(v);
            row_ptr[r + 1] += 1;
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        let q3 = q.powi(3);
        HamiltonianMatrix { dim, q, norm: q3 + 1.0 / q3, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `[2]_{q³} = q³ + q⁻³`.
    pub fn normalization(&self) -> f64 {
        self.norm
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let row = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[row.clone()].binary_search(&c) {
            Ok(k) => self.vals[row.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            *out = s;
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[k])] = self.vals[k];
            }
        }
        m
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).all(|k| self.get(self.cols[k], r) == self.vals[k])
        })
    }
}

/// One normalized projector per flip pair `(T⁻, T⁺)`, annihilating
/// `Σ q^{V(T)} |T⟩`.
pub fn build_hamiltonian(set: &ConfigSet, q: f64) -> Result<HamiltonianMatrix> {
    if !(q.is_finite() && q > 0.0) {
        return Err(Error::InvalidParameter(format!("q must be positive, got {q}")));
    }
    if !set.is_connected() {
        return Err(Error::Disconnected);
    }
    let q3 = q.powi(3);
    let n = q3 + 1.0 / q3;
    let mut t = Vec::new();
    for lo in 0..set.len() {
        for &(hi, m) in set.neighbors(lo) {
            if m.direction != Direction::Raise {
                continue;
            }
            t.push((hi, hi, 1.0 / q3 / n));
            t.push((lo, lo, q3 / n));
            t.push((lo, hi, -1.0 / n));
            t.push((hi, lo, -1.0 / n));
        }
    }
    Ok(HamiltonianMatrix::from_triplets(set.len(), q, t))
}

/// `ψ_T ∝ q^{V(T)}`, unit norm.
pub fn ground_state_vector(set: &ConfigSet, q: f64) -> Vec<f64> {
    let ln_q = q.ln();
    let top = set.volumes().iter().map(|&v| v as f64 * ln_q).fold(f64::NEG_INFINITY, f64::max);
    let mut psi: Vec<f64> = set.volumes().iter().map(|&v| (v as f64 * ln_q - top).exp()).collect();
    let norm = psi.iter().map(|x| x * x).sum::<f64>().sqrt();
    psi.iter_mut().for_each(|x| *x /= norm);
    psi
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundStateCheck {
    /// `‖Hψ‖`.
    pub residual: f64,
    /// Largest relative deviation of `ψ_{T⁺}/ψ_{T⁻}` from `q³`.
    pub max_ratio_error: f64,
    pub ratio_ok: bool,
}

pub fn verify_ground_state(h: &HamiltonianMatrix, set: &ConfigSet, psi: &[f64]) -> GroundStateCheck {
    let mut hpsi = vec![0.0; h.dim()];
    h.apply(psi, &mut hpsi);
    let q3 = h.q().powi(3);
    let mut max_ratio_error: f64 = 0.0;
    for lo in 0..set.len() {
        for &(hi, m) in set.neighbors(lo) {
            if m.direction == Direction::Raise {
                max_ratio_error = max_ratio_error.max((psi[hi] / psi[lo] - q3).abs() / q3);
            }
        }
    }
    GroundStateCheck { residual: norm(&hpsi), max_ratio_error, ratio_ok: max_ratio_error < 1e-10 }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    Dense,
    Lanczos,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapResult {
    pub e0: f64,
    pub e1: f64,
    pub method: SolverMethod,
    /// Smallest eigenvalue found (dense) or Ritz value (iterative).
    pub min_eigenvalue: f64,
    /// Largest componentwise deviation of the solver's ground vector from
    /// the supplied one, in dense mode.
    pub eigenvector_deviation: Option<f64>,
    pub iterations: usize,
    pub solver_residual: f64,
}

/// Two lowest eigenvalues. Above [`DENSE_CAP`] the known ground state is
/// deflated, `E₀ = ⟨ψ|H|ψ⟩`, and `E₁` comes from restarted Lanczos on the
/// orthogonal complement.
pub fn spectral_gap(h: &HamiltonianMatrix, psi: &[f64]) -> Result<GapResult> {
    if h.dim() <= DENSE_CAP {
        dense_gap(h, psi)
    } else {
        lanczos_gap(h, psi, 100, 500)
    }
}

pub fn dense_gap(h: &HamiltonianMatrix, psi: &[f64]) -> Result<GapResult> {
    let eig = SymmetricEigen::new(h.to_dense());
    let mut order: Vec<usize> = (0..h.dim()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let e0 = eig.eigenvalues[order[0]];
    let e1 = order.get(1).map(|&i| eig.eigenvalues[i]).unwrap_or(f64::INFINITY);
    let v = eig.eigenvectors.column(order[0]);
    let sign = if dot(v.as_slice(), psi) < 0.0 { -1.0 } else { 1.0 };
    let dev = v.iter().zip(psi).map(|(a, b)| (sign * a - b).abs()).fold(0.0, f64::max);
    Ok(GapResult {
        e0,
        e1,
        method: SolverMethod::Dense,
        min_eigenvalue: e0,
        eigenvector_deviation: Some(dev),
        iterations: 1,
        solver_residual: 0.0,
    })
}

fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(w, b);
            w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
    }
}

/// Lowest eigenvalue of `H` on `ψ⊥`: Krylov extension with full
/// reorthogonalization and thick restarts that keep the `keep` lowest Ritz
/// vectors.
pub fn lanczos_gap(h: &HamiltonianMatrix, psi: &[f64], krylov: usize, max_restarts: usize) -> Result<GapResult> {
    let n = h.dim();
    let mut hp = vec![0.0; n];
    h.apply(psi, &mut hp);
    let e0 = dot(psi, &hp);
    let deflate = vec![psi.to_vec()];
    let m = krylov.min(n.saturating_sub(1)).max(2);
    let keep = (m / 4).clamp(1, 20);

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut next: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
    let mut v: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut hv: Vec<Vec<f64>> = Vec::with_capacity(m);
    // Projected matrix `t[i][j] = v_i · H v_j`, kept symmetric.
    let mut t: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    for _ in 0..max_restarts {
        let mut exhausted = false;
        while v.len() < m {
            let n0 = norm(&next);
            for _ in 0..2 {
                orthogonalize(&mut next, &deflate);
                orthogonalize(&mut next, &v);
            }
            let mut nn = norm(&next);
            if nn <= 1e-8 * n0 {
                // Breakdown: the Krylov space is invariant. Continue with a
                // fresh direction unless the complement is exhausted.
                if v.len() + 1 >= n {
                    exhausted = true;
                    break;
                }
                next = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
                for _ in 0..2 {
                    orthogonalize(&mut next, &deflate);
                    orthogonalize(&mut next, &v);
                }
                nn = norm(&next);
            }
            next.iter_mut().for_each(|x| *x /= nn);
            let mut w = vec![0.0; n];
            h.apply(&next, &mut w);
            orthogonalize(&mut w, &deflate);
            iterations += 1;
            let col: Vec<f64> = v.iter().map(|vi| dot(vi, &w)).collect();
            for (row, &c) in t.iter_mut().zip(&col) {
                row.push(c);
            }
            let mut last = col;
            last.push(dot(&next, &w));
            t.push(last);
            v.push(std::mem::take(&mut next));
            next = w.clone();
            hv.push(w);
        }
        let k = v.len();
        let tm = DMatrix::from_fn(k, k, |i, j| 0.5 * (t[i][j] + t[j][i]));
        let eig = SymmetricEigen::new(tm);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let combine = |basis: &[Vec<f64>], col: usize| -> Vec<f64> {
            let y = eig.eigenvectors.column(col);
            let mut out = vec![0.0; n];
            for (c, b) in y.iter().zip(basis) {
                out.iter_mut().zip(b).for_each(|(x, z)| *x += c * z);
            }
            out
        };
        let theta = eig.eigenvalues[order[0]];
        let u = combine(&v, order[0]);
        let hu = combine(&hv, order[0]);
        let r: Vec<f64> = hu.iter().zip(&u).map(|(a, b)| a - theta * b).collect();
        residual = norm(&r);
        if residual < SOLVER_TOL || exhausted {
            return Ok(GapResult {
                e0,
                e1: theta,
                method: SolverMethod::Lanczos,
                min_eigenvalue: e0.min(theta),
                eigenvector_deviation: None,
                iterations,
                solver_residual: residual,
            });
        }
        let kept: Vec<usize> = order.iter().copied().take(keep.min(k - 1)).collect();
        let nv: Vec<Vec<f64>> = kept.iter().map(|&c| combine(&v, c)).collect();
        let nhv: Vec<Vec<f64>> = kept.iter().map(|&c| combine(&hv, c)).collect();
        t = (0..kept.len())
            .map(|i| (0..kept.len()).map(|j| if i == j { eig.eigenvalues[kept[i]] } else { 0.0 }).collect())
            .collect();
        v = nv;
        hv = nhv;
        next = r;
    }
    Err(Error::NoConvergence { iterations, residual })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub q: f64,
    pub dim: usize,
    pub e0: f64,
    pub e1: f64,
    pub residual: f64,
    pub degenerate: bool,
    pub ratio_ok: bool,
    pub max_ratio_error: f64,
    pub method: SolverMethod,
    pub eigenvector_deviation: Option<f64>,
    pub min_eigenvalue: f64,
    pub iterations: usize,
}

/// Hamiltonian, ground-state check and gap in one pass.
pub fn spectral_report(set: &ConfigSet, q: f64) -> Result<SpectralReport> {
    let h = build_hamiltonian(set, q)?;
    let psi = ground_state_vector(set, q);
    let check = verify_ground_state(&h, set, &psi);
    let gap = spectral_gap(&h, &psi)?;
    Ok(SpectralReport {
        q,
        dim: h.dim(),
        e0: gap.e0,
        e1: gap.e1,
        residual: check.residual,
        degenerate: gap.e1 <= DEGENERACY_TOL,
        ratio_ok: check.ratio_ok,
        max_ratio_error: check.max_ratio_error,
        method: gap.method,
        eigenvector_deviation: gap.eigenvector_deviation,
        min_eigenvalue: gap.min_eigenvalue,
        iterations: gap.iterations,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MicroReport {
    pub q: f64,
    pub s: u32,
    pub n_configs: usize,
    /// Colored basis dimension: one color per matched pair.
    pub dim: usize,
    /// Von Neumann entropy of the reduced state across the cut, in nats.
    pub s_direct: f64,
    /// `ln s · (<A> + X0) + S(q,1)`.
    pub s_formula: f64,
    /// `ln s · <N> + S(q,1)` with `N` the shared pairs.
    pub s_pair_count: f64,
    pub s_colorless: f64,
    pub mean_area: f64,
    pub x0: u64,
    pub mean_shared_pairs: f64,
    pub formula_error: f64,
    pub pair_count_error: f64,
    /// `‖H_Γ ψ‖` over all peaks.
    pub h_gamma_residual: f64,
    pub n_peaks: usize,
    pub schmidt_blocks: usize,
}

type FaceKey = Vec<(u32, u32, [u8; 3])>;

struct ColoredConfig {
    offset: usize,
    n_pairs: usize,
    /// `(line, segment a, segment b)` for every pair.
    pairs: Vec<(usize, usize, usize)>,
    /// Per pair, the lozenge and axis of each member.
    members: Vec<[(usize, usize); 2]>,
    /// Pairs forming a peak: adjacent open and close segments.
    peaks: Vec<usize>,
    lozenge_diag: Vec<usize>,
    lozenge_faces: Vec<[usize; 2]>,
}

fn find(p: &mut [usize], mut x: usize) -> usize {
    while p[x] != x {
        p[x] = p[p[x]];
        x = p[x];
    }
    x
}

/// Direct reduced-density-matrix entropy of the colored ground state across
/// the central cut, compared with the closed-form decomposition, plus the
/// color-equalizing terms applied to the ground state.
pub fn colored_microcheck(region: &LatticeRegion, q: &Deformation, s: u32) -> Result<MicroReport> {
    if s == 0 {
        return Err(Error::InvalidParameter("s must be at least 1".into()));
    }
    let set = enumerate_configs(region, MICRO_CAP as usize)?;
    let cut = central_cut(region)?;
    let su = s as usize;

    let mut colored = Vec::with_capacity(set.len());
    let mut dim: u128 = 0;
    for h in set.configs() {
        let cl = color_lines(region, h, cut.line())?;
        let pairs = cl.pairs()?;
        let mut members = Vec::with_capacity(pairs.len());
        let mut peaks = Vec::new();
        for (p, &(li, a, b)) in pairs.iter().enumerate() {
            let line = &cl.lines[li];
            let ax = line.axis.index();
            members.push([(line.segments[a].lozenge, ax), (line.segments[b].lozenge, ax)]);
            if b == a + 1 && line.segments[a].step == Step::Open {
                peaks.push(p);
            }
        }
        let offset = dim as usize;
        dim += (s as u128).pow(pairs.len() as u32);
        if dim > MICRO_CAP {
            return Err(Error::DimensionCap { dim, cap: MICRO_CAP });
        }
        colored.push(ColoredConfig {
            offset,
            n_pairs: pairs.len(),
            pairs,
            members,
            peaks,
            lozenge_diag: cl.lozenges.iter().map(|l| l.diagonal).collect(),
            lozenge_faces: cl.lozenges.iter().map(|l| l.faces).collect(),
        });
    }
    let dim = dim as usize;

    let ln_q = q.ln();
    let mut amp = vec![0.0; dim];
    let top = set.volumes().iter().map(|&v| v as f64 * ln_q).fold(f64::NEG_INFINITY, f64::max);
    for (c, &v) in colored.iter().zip(set.volumes()) {
        let a = (v as f64 * ln_q - top).exp();
        let n = su.pow(c.n_pairs as u32);
        amp[c.offset..c.offset + n].iter_mut().for_each(|x| *x = a);
    }
    let nrm = norm(&amp);
    amp.iter_mut().for_each(|x| *x /= nrm);

    let left_face: Vec<bool> = region
        .faces()
        .iter()
        .map(|f| f.iter().map(|&v| region.vertex(v).col() - cut.line()).sum::<i32>() < 0)
        .collect();

    let mut lkeys: HashMap<FaceKey, usize> = HashMap::new();
    let mut rkeys: HashMap<FaceKey, usize> = HashMap::new();
    let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(dim);
    let mut h_gamma = vec![0.0; dim];
    let mut n_peaks = 0;
    for c in &colored {
        n_peaks += c.peaks.len();
        let n = su.pow(c.n_pairs as u32);
        let mut loz_color = vec![[u8::MAX; 3]; c.lozenge_diag.len()];
        for code in 0..n {
            let mut rest = code;
            for m in &c.members {
                let col = (rest % su) as u8;
                rest /= su;
                for &(l, ax) in m {
                    loz_color[l][ax] = col;
                }
            }
            let mut lk = FaceKey::new();
            let mut rk = FaceKey::new();
            for (l, faces) in c.lozenge_faces.iter().enumerate() {
                for &f in faces {
                    let item = (f as u32, c.lozenge_diag[l] as u32, loz_color[l]);
                    if left_face[f] {
                        lk.push(item);
                    } else {
                        rk.push(item);
                    }
                }
            }
            lk.sort_unstable();
            rk.sort_unstable();
            let nl = lkeys.len();
            let li = *lkeys.entry(lk).or_insert(nl);
            let nr = rkeys.len();
            let ri = *rkeys.entry(rk).or_insert(nr);
            let x = c.offset + code;
            entries.push((li, ri, amp[x]));

            // Mismatch penalties vanish: both members of a pair share a color
            // by construction of the basis.
            for &p in &c.peaks {
                let w = su.pow(p as u32);
                let c1 = (code / w) % su;
                for c2 in (0..su).filter(|&c2| c2 != c1) {
                    let y = c.offset + code - c1 * w + c2 * w;
                    h_gamma[x] += 0.5 * (amp[x] - amp[y]);
                }
            }
        }
        debug_assert_eq!(c.pairs.len(), c.n_pairs);
    }

    // Block-diagonalize M by connected components of its bipartite support.
    let nl = lkeys.len();
    let mut parent: Vec<usize> = (0..nl + rkeys.len()).collect();
    for &(l, r, _) in &entries {
        let (a, b) = (find(&mut parent, l), find(&mut parent, nl + r));
        if a != b {
            parent[a] = b;
        }
    }
    let mut blocks: HashMap<usize, Vec<(usize, usize, f64)>> = HashMap::new();
    for &(l, r, a) in &entries {
        let root = find(&mut parent, l);
        blocks.entry(root).or_default().push((l, r, a));
    }
    let mut block_list: Vec<_> = blocks.into_values().collect();
    block_list.sort_by_key(|b| (b[0].0, b[0].1));
    let mut s_direct = 0.0;
    for b in &block_list {
        let mut rows: Vec<usize> = b.iter().map(|e| e.0).collect();
        let mut cols: Vec<usize> = b.iter().map(|e| e.1).collect();
        rows.sort_unstable();
        rows.dedup();
        cols.sort_unstable();
        cols.dedup();
        let mut m = DMatrix::<f64>::zeros(rows.len(), cols.len());
        for &(l, r, a) in b {
            let i = rows.binary_search(&l).expect("row present");
            let j = cols.binary_search(&r).expect("col present");
            m[(i, j)] += a;
        }
        let g = if rows.len() <= cols.len() { &m * m.transpose() } else { m.transpose() * &m };
        for &lambda in SymmetricEigen::new(g).eigenvalues.iter() {
            if lambda > 1e-300 {
                s_direct -= lambda * lambda.ln();
            }
        }
    }

    let rep = exact_entropy(&set, q, s, &cut)?;
    Ok(MicroReport {
        q: q.value(),
        s,
        n_configs: set.len(),
        dim,
        s_direct,
        s_formula: rep.s_total,
        s_pair_count: rep.s_pair_count,
        s_colorless: rep.s_colorless,
        mean_area: rep.mean_area,
        x0: rep.x0,
        mean_shared_pairs: rep.mean_shared_pairs,
        formula_error: (s_direct - rep.s_total).abs(),
        pair_count_error: (s_direct - rep.s_pair_count).abs(),
        h_gamma_residual: norm(&h_gamma),
        n_peaks,
        schmidt_blocks: block_list.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_hexagon_region;

    #[test]
    fn unit_box_projector() {
        let r = build_hexagon_region(1, 1, 1).unwrap();
        let set = enumerate_configs(&r, 10).unwrap();
        for q in [0.5, 1.0, 2.0] {
            let h = build_hamiltonian(&set, q).unwrap();
            let q3: f64 = q * q * q;
            assert!((h.get(0, 0) - q3 / (q3 + 1.0 / q3)).abs() < 1e-15);
            assert!(h.is_symmetric());
            let psi = ground_state_vector(&set, q);
            let gap = spectral_gap(&h, &psi).unwrap();
            assert!(gap.e0.abs() < 1e-12 && (gap.e1 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lanczos_matches_dense() {
        let r = build_hexagon_region(2, 2, 3).unwrap();
        let set = enumerate_configs(&r, 1000).unwrap();
        let h = build_hamiltonian(&set, 1.0).unwrap();
        let psi = ground_state_vector(&set, 1.0);
        let d = dense_gap(&h, &psi).unwrap();
        let l = lanczos_gap(&h, &psi, 30, 100).unwrap();
        assert!((d.e1 - l.e1).abs() < 1e-7, "{} vs {}", d.e1, l.e1);
        assert!(d.eigenvector_deviation.unwrap() < 1e-8);
    }
}
