//! Exhaustive enumeration of the configuration space, partition functions,
//! volume polynomials, the MacMahon box formula and cut-profile marginals.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use indexmap::IndexSet;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::dynamics::{flips_of, FlipMove};
use crate::entanglement::Cut;
use crate::error::{Error, Result};
use crate::geometry::LatticeRegion;
use crate::numeric::{self, Deformation};
use crate::tiling::{min_config, volume, HeightConfig};

pub const DEFAULT_CAP: usize = 10_000_000;

/// Sets up to this size get exact rational weights.
pub const EXACT_LIMIT: usize = 100_000;

const FRONTIER_CHUNK: usize = 4096;

/// The enumerated configuration space in canonical order: ascending volume,
/// then lexicographic heights.
#[derive(Clone, Debug)]
pub struct ConfigSet {
    region: LatticeRegion,
    configs: Vec<HeightConfig>,
    volumes: Vec<i64>,
    adjacency: Vec<Vec<(usize, FlipMove)>>,
}

impl ConfigSet {
    /// Canonicalises a list of distinct configurations and rebuilds the flip
    /// adjacency.
    pub fn from_configs(region: LatticeRegion, mut configs: Vec<HeightConfig>) -> ConfigSet {
        configs.par_sort_by_cached_key(|h| (volume(h), h.clone()));
        configs.dedup();
        let volumes: Vec<i64> = configs.iter().map(volume).collect();
        let adjacency = configs
            .par_iter()
            .map(|h| {
                flips_of(&region, h)
                    .into_iter()
                    .filter_map(|m| {
                        let g = h.shifted(m.vertex, m.direction.delta());
                        search(&configs, &volumes, &g).map(|j| (j, m))
                    })
                    .collect()
            })
            .collect();
        ConfigSet { region, configs, volumes, adjacency }
    }

    pub fn region(&self) -> &LatticeRegion {
        &self.region
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn configs(&self) -> &[HeightConfig] {
        &self.configs
    }

    pub fn config(&self, i: usize) -> &HeightConfig {
        &self.configs[i]
    }

    pub fn volume(&self, i: usize) -> i64 {
        self.volumes[i]
    }

    pub fn volumes(&self) -> &[i64] {
        &self.volumes
    }

    /// Flip neighbours of configuration `i` with the move that reaches them.
    pub fn neighbors(&self, i: usize) -> &[(usize, FlipMove)] {
        &self.adjacency[i]
    }

    pub fn index_of(&self, h: &HeightConfig) -> Option<usize> {
        search(&self.configs, &self.volumes, h)
    }

    pub fn v_min(&self) -> i64 {
        self.volumes.first().copied().unwrap_or(0)
    }

    pub fn v_max(&self) -> i64 {
        self.volumes.last().copied().unwrap_or(0)
    }

    /// Every neighbour list entry points back (the graph is undirected) and
    /// all configurations lie in one component.
    pub fn is_connected(&self) -> bool {
        if self.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for &(j, _) in &self.adjacency[i] {
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
        count == self.len()
    }

    /// Flip-closure check: every applicable move leads inside the set.
    pub fn is_closed(&self) -> bool {
        self.configs
            .par_iter()
            .zip(self.adjacency.par_iter())
            .all(|(h, adj)| flips_of(&self.region, h).len() == adj.len())
    }

    const MAGIC: &'static [u8; 8] = b"LZSET\0v1";

    /// Binary form: magic, `u32` region-JSON length, region JSON, `u32`
    /// vertex count, `u64` configuration count, then little-endian `i32`
    /// height arrays in canonical order.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let region = serde_json::to_vec(&self.region.to_json())?;
        w.write_all(Self::MAGIC)?;
        w.write_all(&(region.len() as u32).to_le_bytes())?;
        w.write_all(&region)?;
        w.write_all(&(self.region.num_vertices() as u32).to_le_bytes())?;
        w.write_all(&(self.len() as u64).to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.region.num_vertices() * 4);
        for h in &self.configs {
            buf.clear();
            for &x in h.heights() {
                buf.extend_from_slice(&x.to_le_bytes());
            }
            w.write_all(&buf)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<ConfigSet> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != Self::MAGIC {
            return Err(Error::Format("not a configuration set file (bad magic)".into()));
        }
        let mut b4 = [0u8; 4];
        r.read_exact(&mut b4)?;
        let mut region = vec![0u8; u32::from_le_bytes(b4) as usize];
        r.read_exact(&mut region)?;
        let region = LatticeRegion::from_json(&serde_json::from_slice(&region)?)?;
        r.read_exact(&mut b4)?;
        let nv = u32::from_le_bytes(b4) as usize;
        if nv != region.num_vertices() {
            return Err(Error::Format("vertex count does not match region".into()));
        }
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let count = u64::from_le_bytes(b8) as usize;
        let mut buf = vec![0u8; nv * 4];
        let mut configs = Vec::with_capacity(count);
        for _ in 0..count {
            r.read_exact(&mut buf)?;
            let h = buf
                .chunks_exact(4)
                .map(|c| i32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect();
            configs.push(HeightConfig::new(h));
        }
        Ok(ConfigSet::from_configs(region, configs))
    }
}

fn search(configs: &[HeightConfig], volumes: &[i64], h: &HeightConfig) -> Option<usize> {
    let v = volume(h);
    let lo = volumes.partition_point(|&x| x < v);
    let hi = volumes.partition_point(|&x| x <= v);
    configs[lo..hi].binary_search(h).ok().map(|k| lo + k)
}

/// Breadth-first closure of the minimal tiling under all flips.
pub fn enumerate_configs(region: &LatticeRegion, cap: usize) -> Result<ConfigSet> {
    let start = min_config(region)?;
    let mut seen: IndexSet<HeightConfig> = IndexSet::new();
    seen.insert(start);
    let mut i = 0;
    while i < seen.len() {
        let end = (i + FRONTIER_CHUNK).min(seen.len());
        let found: Vec<Vec<HeightConfig>> = (i..end)
            .into_par_iter()
            .map(|k| {
                let h = &seen[k];
                flips_of(region, h)
                    .into_iter()
                    .map(|m| h.shifted(m.vertex, m.direction.delta()))
                    .collect()
            })
            .collect();
        for g in found.into_iter().flatten() {
            seen.insert(g);
            if seen.len() > cap {
                return Err(Error::CapExceeded { cap, found: seen.len() });
            }
        }
        i = end;
    }
    Ok(ConfigSet::from_configs(region.clone(), seen.into_iter().collect()))
}

/// Number of configurations if the enumeration finishes within `budget`.
pub fn probe_count(region: &LatticeRegion, budget: usize) -> Result<Option<usize>> {
    match enumerate_configs(region, budget) {
        Ok(set) => Ok(Some(set.len())),
        Err(Error::CapExceeded { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Generate-and-filter enumeration that never uses flips: depth-first
/// assignment of every free vertex within crude distance bounds, pruned by
/// the edge rule, then filtered by full validation.
pub fn naive_enumerate(region: &LatticeRegion, cap: usize) -> Result<Vec<HeightConfig>> {
    let n = region.num_vertices();
    // Crude bounds: |h(u) - h(v)| <= 2 * hops(u, v) from every boundary vertex.
    let mut lo = vec![i64::MIN; n];
    let mut hi = vec![i64::MAX; n];
    for v in 0..n {
        if let Some(b) = region.boundary_height(v) {
            lo[v] = b as i64;
            hi[v] = b as i64;
        }
    }
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in region.edges() {
        nbrs[e.tail].push(e.head);
        nbrs[e.head].push(e.tail);
    }
    loop {
        let mut changed = false;
        for v in 0..n {
            for &w in &nbrs[v] {
                if lo[w] != i64::MIN && lo[w] - 2 > lo[v] {
                    lo[v] = lo[w] - 2;
                    changed = true;
                }
                if hi[w] != i64::MAX && hi[w] + 2 < hi[v] {
                    hi[v] = hi[w] + 2;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let free: Vec<usize> = (0..n).filter(|&v| region.boundary_height(v).is_none()).collect();
    let mut h: Vec<i32> = (0..n).map(|v| region.boundary_height(v).unwrap_or(i32::MIN)).collect();
    let mut out = Vec::new();
    let ok_edge = |h: &[i32], v: usize| {
        nbrs[v].iter().all(|&w| {
            if h[w] == i32::MIN {
                return true;
            }
            let (t, hd) = if region.edge_between(v, w).is_some() { (v, w) } else { (w, v) };
            let d = h[hd] - h[t];
            d == 1 || d == -2
        })
    };
    #[allow(clippy::too_many_arguments)]
    fn rec(
        k: usize,
        free: &[usize],
        h: &mut Vec<i32>,
        lo: &[i64],
        hi: &[i64],
        region: &LatticeRegion,
        ok_edge: &dyn Fn(&[i32], usize) -> bool,
        out: &mut Vec<HeightConfig>,
        cap: usize,
    ) -> Result<()> {
        if k == free.len() {
            let cfg = HeightConfig::new(h.clone());
            if crate::tiling::is_valid(region, &cfg) {
                out.push(cfg);
                if out.len() > cap {
                    return Err(Error::CapExceeded { cap, found: out.len() });
                }
            }
            return Ok(());
        }
        let v = free[k];
        let lo_v = lo[v].max(0);
        for x in lo_v..=hi[v] {
            h[v] = x as i32;
            if ok_edge(h, v) {
                rec(k + 1, free, h, lo, hi, region, ok_edge, out, cap)?;
            }
        }
        h[v] = i32::MIN;
        Ok(())
    }
    rec(0, &free, &mut h, &lo, &hi, region, &ok_edge, &mut out, cap)?;
    out.sort_by_cached_key(|h| (volume(h), h.clone()));
    Ok(out)
}

/// `c_k = #{T : V(T) = V_min + 3k}`.
pub fn volume_polynomial(set: &ConfigSet) -> Vec<u64> {
    poly_of(set.volumes(), set.v_min())
}

fn poly_of(vols: &[i64], vmin: i64) -> Vec<u64> {
    let mut c: Vec<u64> = Vec::new();
    for &v in vols {
        let d = v - vmin;
        assert!(d >= 0 && d % 3 == 0, "volume off the lattice of spacing 3");
        let k = (d / 3) as usize;
        if c.len() <= k {
            c.resize(k + 1, 0);
        }
        c[k] += 1;
    }
    c
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartitionValue {
    pub q: f64,
    pub ln_z: f64,
    /// Exact value when `q` is rational and the set is small enough.
    pub exact: Option<BigRational>,
}

/// `Z = Σ_T q^{2V(T)}`.
pub fn partition_function(set: &ConfigSet, q: &Deformation) -> PartitionValue {
    let poly = volume_polynomial(set);
    let vmin = set.v_min();
    let ln_q = q.ln();
    let exact = match q.exact() {
        Some(r) if set.len() <= EXACT_LIMIT => {
            let t = numeric::ratio_pow(r, 6);
            Some(numeric::ratio_pow(r, 2 * vmin) * numeric::poly_eval_exact(&poly, &t))
        }
        _ => None,
    };
    let ln_z = match &exact {
        Some(z) => numeric::ln_ratio(z),
        None => 2.0 * vmin as f64 * ln_q + numeric::poly_ln_eval(&poly, 6.0 * ln_q),
    };
    PartitionValue { q: q.value(), ln_z, exact }
}

/// Exact number of tilings of the `a x b x c` hexagon.
pub fn macmahon_count(a: u32, b: u32, c: u32) -> BigUint {
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 1..=a {
        for j in 1..=b {
            for k in 1..=c {
                num *= i + j + k - 1;
                den *= i + j + k - 2;
            }
        }
    }
    num / den
}

#[derive(Clone, Debug, PartialEq)]
pub struct CutProfile {
    pub heights: Vec<i32>,
    pub area: i64,
    pub count: usize,
    pub probability: f64,
    pub exact: Option<BigRational>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CutDistribution {
    pub q: f64,
    pub profiles: Vec<CutProfile>,
    pub mean_area: f64,
    pub exact_mean_area: Option<BigRational>,
}

impl CutDistribution {
    pub fn total_probability(&self) -> f64 {
        self.profiles.iter().map(|p| p.probability).sum()
    }

    /// `-Σ p ln p` in nats.
    pub fn shannon_entropy(&self) -> f64 {
        self.profiles
            .iter()
            .filter(|p| p.probability > 0.0)
            .map(|p| -p.probability * p.probability.ln())
            .sum()
    }
}

/// Marginal distribution of the height profile on the cut column.
pub fn cut_distribution(set: &ConfigSet, q: &Deformation, cut: &Cut) -> CutDistribution {
    let vmin = set.v_min();
    let mut groups: BTreeMap<Vec<i32>, Vec<i64>> = BTreeMap::new();
    for (h, &v) in set.configs().iter().zip(set.volumes()) {
        groups.entry(cut.profile(h)).or_default().push(v);
    }
    let total = volume_polynomial(set);
    let ln_q = q.ln();
    let ln_total = numeric::poly_ln_eval(&total, 6.0 * ln_q);
    let exact_ctx = match q.exact() {
        Some(r) if set.len() <= EXACT_LIMIT => {
            let t = numeric::ratio_pow(r, 6);
            let z = numeric::poly_eval_exact(&total, &t);
            Some((t, z))
        }
        _ => None,
    };
    let mut profiles = Vec::with_capacity(groups.len());
    let mut mean_area = 0.0;
    let mut exact_mean = exact_ctx.as_ref().map(|_| BigRational::zero());
    for (heights, vols) in groups {
        let poly = poly_of(&vols, vmin);
        let probability = (numeric::poly_ln_eval(&poly, 6.0 * ln_q) - ln_total).exp();
        let exact = exact_ctx
            .as_ref()
            .map(|(t, z)| numeric::poly_eval_exact(&poly, t) / z);
        let area = cut.area_of_profile(&heights);
        mean_area += probability * area as f64;
        if let (Some(m), Some(p)) = (exact_mean.as_mut(), exact.as_ref()) {
            *m += p * BigRational::from_integer(area.into());
        }
        profiles.push(CutProfile { heights, area, count: vols.len(), probability, exact });
    }
    if let Some(m) = &exact_mean {
        mean_area = numeric::ratio_to_f64(m);
    }
    CutDistribution { q: q.value(), profiles, mean_area, exact_mean_area: exact_mean }
}
