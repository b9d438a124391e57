//! Metropolis sampling of `π(T) ∝ q^{2V(T)}` with single-vertex toggles,
//! batch-means error bars and integrated autocorrelation times.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{can_lower, can_raise, Direction, FlipMove};
use crate::entanglement::{central_cut, Cut};
use crate::error::{Error, Result};
use crate::geometry::LatticeRegion;
use crate::tiling::{is_valid, max_config, min_config, volume, HeightConfig};

/// Batches per chain for the batch-means error estimate.
pub const BATCHES_PER_CHAIN: usize = 20;

/// Effective sample size below which a run is marked unusable.
pub const MIN_ESS: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Proposal {
    /// Accept with `min(1, π'/π)`.
    #[default]
    Metropolis,
    /// Accept with `π'/(π + π')`.
    HeatBath,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    pub q: f64,
    /// Proposals per chain, burn-in included.
    pub steps: u64,
    pub burn_in: u64,
    pub seed: u64,
    pub thinning: u64,
    pub chains: usize,
    #[serde(default)]
    pub proposal: Proposal,
    /// Validate the state every this many proposals; 0 disables.
    #[serde(default = "default_check_every")]
    pub check_every: u64,
}

fn default_check_every() -> u64 {
    10_000
}

impl ChainParams {
    pub fn new(q: f64, steps: u64, burn_in: u64, seed: u64) -> Self {
        ChainParams {
            q,
            steps,
            burn_in,
            seed,
            thinning: 1,
            chains: 1,
            proposal: Proposal::Metropolis,
            check_every: default_check_every(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.q.is_finite() && self.q > 0.0) {
            return bad(format!("q must be positive, got {}", self.q));
        }
        if self.steps <= self.burn_in {
            return bad(format!("steps {} must exceed burn-in {}", self.steps, self.burn_in));
        }
        if self.thinning == 0 {
            return bad("thinning must be at least 1".into());
        }
        if self.chains == 0 {
            return bad("at least one chain is required".into());
        }
        Ok(())
    }

    pub fn samples_per_chain(&self) -> u64 {
        (self.steps - self.burn_in) / self.thinning
    }
}

/// Acceptance probabilities for raising and lowering at deformation `q`.
pub fn acceptance(q: f64, proposal: Proposal) -> (f64, f64) {
    let w = q.powi(6);
    match proposal {
        Proposal::Metropolis => (w.min(1.0), (1.0 / w).min(1.0)),
        Proposal::HeatBath => (w / (1.0 + w), 1.0 / (1.0 + w)),
    }
}

/// One chain's mutable state with incrementally tracked observables.
#[derive(Clone, Debug)]
pub struct Sampler<'a> {
    region: &'a LatticeRegion,
    h: HeightConfig,
    volume: i64,
    area: i64,
    on_cut: Vec<bool>,
    level_count: Vec<u64>,
    h_max: i32,
    p_raise: f64,
    p_lower: f64,
    accepted: u64,
    proposed: u64,
}

impl<'a> Sampler<'a> {
    pub fn new(region: &'a LatticeRegion, cut: &Cut, start: HeightConfig, q: f64, proposal: Proposal) -> Self {
        let mut on_cut = vec![false; region.num_vertices()];
        for &v in cut.column() {
            on_cut[v] = true;
        }
        let area = crate::entanglement::cross_section_area(&start, cut);
        let h_max = start.heights().iter().copied().max().unwrap_or(0);
        let mut level_count = vec![0u64; h_max.max(0) as usize + 4];
        for &x in start.heights() {
            level_count[x.max(0) as usize] += 1;
        }
        let (p_raise, p_lower) = acceptance(q, proposal);
        Sampler {
            region,
            volume: volume(&start),
            h: start,
            area,
            on_cut,
            level_count,
            h_max,
            p_raise,
            p_lower,
            accepted: 0,
            proposed: 0,
        }
    }

    pub fn state(&self) -> &HeightConfig {
        &self.h
    }

    pub fn volume(&self) -> i64 {
        self.volume
    }

    pub fn area(&self) -> i64 {
        self.area
    }

    pub fn h_max(&self) -> i32 {
        self.h_max
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }

    /// One proposal: a uniform interior vertex and its applicable toggle.
    pub fn step<R: Rng>(&mut self, rng: &mut R) -> Option<FlipMove> {
        let interior = self.region.interior();
        self.proposed += 1;
        if interior.is_empty() {
            return None;
        }
        let v = interior[rng.gen_range(0..interior.len())];
        let hs = self.h.heights();
        let (dir, p) = if can_raise(self.region, hs, v) {
            (Direction::Raise, self.p_raise)
        } else if can_lower(self.region, hs, v) {
            (Direction::Lower, self.p_lower)
        } else {
            return None;
        };
        if p < 1.0 && rng.gen::<f64>() >= p {
            return None;
        }
        self.apply(v, dir);
        Some(FlipMove::new(v, dir))
    }

    fn apply(&mut self, v: usize, dir: Direction) {
        let d = dir.delta();
        let old = self.h.get(v);
        let new = old + d;
        self.h.set(v, new);
        self.volume += d as i64;
        if self.on_cut[v] {
            self.area += d as i64;
        }
        self.accepted += 1;
        self.level_count[old as usize] -= 1;
        if new as usize >= self.level_count.len() {
            self.level_count.resize(new as usize + 4, 0);
        }
        self.level_count[new as usize] += 1;
        if new > self.h_max {
            self.h_max = new;
        }
        while self.h_max > 0 && self.level_count[self.h_max as usize] == 0 {
            self.h_max -= 1;
        }
    }
}

/// Functional form of a single proposal.
pub fn mcmc_step<R: Rng>(region: &LatticeRegion, state: HeightConfig, q: f64, rng: &mut R) -> HeightConfig {
    let interior = region.interior();
    if interior.is_empty() {
        return state;
    }
    let v = interior[rng.gen_range(0..interior.len())];
    let (p_raise, p_lower) = acceptance(q, Proposal::Metropolis);
    let (dir, p) = if can_raise(region, state.heights(), v) {
        (Direction::Raise, p_raise)
    } else if can_lower(region, state.heights(), v) {
        (Direction::Lower, p_lower)
    } else {
        return state;
    };
    if p < 1.0 && rng.gen::<f64>() >= p {
        return state;
    }
    state.shifted(v, dir.delta())
}

/// Generator for chain `chain`: the master seed with a per-chain stream.
pub fn chain_rng(seed: u64, chain: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chain as u64);
    rng
}

/// Recorded observables of one chain, one entry per kept sample.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ChainSeries {
    pub step: Vec<u64>,
    pub volume: Vec<i64>,
    pub area: Vec<i64>,
    pub h_max: Vec<i32>,
    pub center: Vec<i32>,
    pub profile_sum: Vec<f64>,
    /// Histogram of cut profiles over the kept samples.
    pub cut_profiles: BTreeMap<Vec<i32>, u64>,
    pub accepted: u64,
    pub proposed: u64,
}

pub fn run_single_chain(region: &LatticeRegion, cut: &Cut, params: &ChainParams, chain: usize) -> Result<ChainSeries> {
    params.validate()?;
    let start = if params.q <= 1.0 { min_config(region)? } else { max_config(region)? };
    let center = region.center();
    let mut s = Sampler::new(region, cut, start, params.q, params.proposal);
    let mut rng = chain_rng(params.seed, chain);
    let n = params.samples_per_chain() as usize;
    let mut out = ChainSeries {
        step: Vec::with_capacity(n),
        volume: Vec::with_capacity(n),
        area: Vec::with_capacity(n),
        h_max: Vec::with_capacity(n),
        center: Vec::with_capacity(n),
        profile_sum: vec![0.0; region.num_vertices()],
        ..Default::default()
    };
    for t in 0..params.steps {
        s.step(&mut rng);
        if params.check_every > 0 && (t + 1) % params.check_every == 0 && !is_valid(region, s.state()) {
            return Err(Error::InvalidConfig(format!("chain {chain} left the valid sector at step {}", t + 1)));
        }
        if t >= params.burn_in && (t - params.burn_in + 1).is_multiple_of(params.thinning) {
            out.step.push(t + 1);
            out.volume.push(s.volume());
            out.area.push(s.area());
            out.h_max.push(s.h_max());
            out.center.push(center.map(|c| s.state().get(c)).unwrap_or(0));
            *out.cut_profiles.entry(cut.profile(s.state())).or_default() += 1;
            for (acc, &x) in out.profile_sum.iter_mut().zip(s.state().heights()) {
                *acc += x as f64;
            }
        }
    }
    out.accepted = s.accepted;
    out.proposed = s.proposed;
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub params: ChainParams,
    pub samples: u64,
    pub area: Estimate,
    pub volume: Estimate,
    pub h_max: Estimate,
    pub center_height: Estimate,
    /// Mean height per vertex in canonical order.
    pub profile: Vec<f64>,
    pub acceptance_rate: f64,
    /// Integrated autocorrelation times in recorded samples, chain average.
    pub tau_volume: f64,
    pub tau_area: f64,
    /// `samples / (2 max(τ_V, τ_A))`.
    pub effective_samples: f64,
    pub usable: bool,
    /// Plug-in Shannon entropy of the sampled cut profiles. Biased low when
    /// the profile space is undersampled.
    pub s_colorless_plugin: f64,
    pub distinct_profiles: usize,
}

/// Batch means over `BATCHES_PER_CHAIN` equal batches of every chain.
pub fn batch_means(chains: &[Vec<f64>]) -> Result<Estimate> {
    let mut means = Vec::new();
    for c in chains {
        let b = c.len() / BATCHES_PER_CHAIN;
        if b == 0 {
            return Err(Error::InsufficientData(format!(
                "{} samples cannot fill {BATCHES_PER_CHAIN} batches",
                c.len()
            )));
        }
        for k in 0..BATCHES_PER_CHAIN {
            means.push(c[k * b..(k + 1) * b].iter().sum::<f64>() / b as f64);
        }
    }
    let n = means.len() as f64;
    let mean = means.iter().sum::<f64>() / n;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(Estimate { mean, stderr: (var / n).sqrt() })
}

/// Integrated autocorrelation time `τ = 1/2 + Σ_{t≥1} ρ(t)`, summed until the
/// window `t ≥ 5τ`.
pub fn autocorrelation_time(samples: &[f64]) -> Result<f64> {
    let n = samples.len();
    if n < 1000 {
        return Err(Error::InsufficientData(format!("autocorrelation needs 1000 samples, got {n}")));
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let x: Vec<f64> = samples.iter().map(|s| s - mean).collect();
    let c0 = x.iter().map(|v| v * v).sum::<f64>() / n as f64;
    if c0 == 0.0 {
        return Ok(0.5);
    }
    let mut tau = 0.5;
    for t in 1..n / 2 {
        let ct = x[..n - t].iter().zip(&x[t..]).map(|(a, b)| a * b).sum::<f64>() / n as f64;
        tau += ct / c0;
        if t as f64 >= 5.0 * tau {
            break;
        }
    }
    Ok(tau.max(0.5))
}

fn to_f64<T: Copy + Into<f64>>(v: &[T]) -> Vec<f64> {
    v.iter().map(|&x| x.into()).collect()
}

fn i64s(v: &[i64]) -> Vec<f64> {
    v.iter().map(|&x| x as f64).collect()
}

pub fn summarize(region: &LatticeRegion, params: &ChainParams, series: &[ChainSeries]) -> Result<EnsembleStats> {
    let area: Vec<Vec<f64>> = series.iter().map(|s| i64s(&s.area)).collect();
    let vol: Vec<Vec<f64>> = series.iter().map(|s| i64s(&s.volume)).collect();
    let hmax: Vec<Vec<f64>> = series.iter().map(|s| to_f64(&s.h_max)).collect();
    let center: Vec<Vec<f64>> = series.iter().map(|s| to_f64(&s.center)).collect();
    let samples: u64 = series.iter().map(|s| s.volume.len() as u64).sum();
    let tau_of = |xs: &[Vec<f64>]| -> Result<f64> {
        let mut t = 0.0;
        for x in xs {
            t += autocorrelation_time(x)?;
        }
        Ok(t / xs.len() as f64)
    };
    let tau_volume = tau_of(&vol)?;
    let tau_area = tau_of(&area)?;
    let effective_samples = samples as f64 / (2.0 * tau_volume.max(tau_area));
    let mut profile = vec![0.0; region.num_vertices()];
    for s in series {
        for (p, x) in profile.iter_mut().zip(&s.profile_sum) {
            *p += x;
        }
    }
    for p in profile.iter_mut() {
        *p /= samples as f64;
    }
    let mut hist: BTreeMap<&[i32], u64> = BTreeMap::new();
    for s in series {
        for (k, &c) in &s.cut_profiles {
            *hist.entry(k.as_slice()).or_default() += c;
        }
    }
    let s_colorless_plugin = hist
        .values()
        .map(|&c| {
            let p = c as f64 / samples as f64;
            -p * p.ln()
        })
        .sum();
    let accepted: u64 = series.iter().map(|s| s.accepted).sum();
    let proposed: u64 = series.iter().map(|s| s.proposed).sum();
    Ok(EnsembleStats {
        params: params.clone(),
        samples,
        area: batch_means(&area)?,
        volume: batch_means(&vol)?,
        h_max: batch_means(&hmax)?,
        center_height: batch_means(&center)?,
        profile,
        acceptance_rate: accepted as f64 / proposed.max(1) as f64,
        tau_volume,
        tau_area,
        effective_samples,
        usable: effective_samples >= MIN_ESS,
        s_colorless_plugin,
        distinct_profiles: hist.len(),
    })
}

/// Runs all chains in parallel and returns the merged statistics with the
/// raw series of every chain.
pub fn run_chains(region: &LatticeRegion, params: &ChainParams) -> Result<(EnsembleStats, Vec<ChainSeries>)> {
    params.validate()?;
    let cut = central_cut(region)?;
    let series = (0..params.chains)
        .into_par_iter()
        .map(|c| run_single_chain(region, &cut, params, c))
        .collect::<Result<Vec<_>>>()?;
    Ok((summarize(region, params, &series)?, series))
}

pub fn run_chain(region: &LatticeRegion, params: &ChainParams) -> Result<EnsembleStats> {
    run_chains(region, params).map(|r| r.0)
}

/// Series CSV `step,V,A,h_max` of one chain.
pub fn write_series_csv<W: std::io::Write>(mut w: W, s: &ChainSeries) -> Result<()> {
    writeln!(w, "step,V,A,h_max")?;
    for i in 0..s.step.len() {
        writeln!(w, "{},{},{},{}", s.step[i], s.volume[i], s.area[i], s.h_max[i])?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_hexagon_region;

    #[test]
    fn acceptance_probabilities() {
        assert_eq!(acceptance(1.0, Proposal::Metropolis), (1.0, 1.0));
        let (up, down) = acceptance(2.0, Proposal::Metropolis);
        assert_eq!(up, 1.0);
        assert!((down - 2f64.powi(-6)).abs() < 1e-15);
    }

    #[test]
    fn white_noise_tau() {
        let mut rng = chain_rng(7, 0);
        let xs: Vec<f64> = (0..100_000).map(|_| rng.gen::<f64>()).collect();
        let tau = autocorrelation_time(&xs).unwrap();
        assert!((tau - 0.5).abs() < 0.1, "tau {tau}");
        assert!(autocorrelation_time(&xs[..999]).is_err());
    }

    #[test]
    fn ar1_tau() {
        let mut rng = chain_rng(11, 0);
        let mut x = 0.0;
        let xs: Vec<f64> = (0..400_000)
            .map(|_| {
                x = 0.9 * x + (rng.gen::<f64>() - 0.5);
                x
            })
            .collect();
        let tau = autocorrelation_time(&xs).unwrap();
        assert!((tau - 9.5).abs() < 0.15 * 9.5, "tau {tau}");
    }

    #[test]
    fn tracked_observables_stay_exact() {
        let r = build_hexagon_region(2, 2, 3).unwrap();
        let cut = central_cut(&r).unwrap();
        let mut s = Sampler::new(&r, &cut, min_config(&r).unwrap(), 1.0, Proposal::Metropolis);
        let mut rng = chain_rng(3, 1);
        for _ in 0..20_000 {
            s.step(&mut rng);
            assert_eq!(s.volume(), volume(s.state()));
            assert_eq!(s.h_max(), *s.state().heights().iter().max().unwrap());
        }
        assert_eq!(s.area(), crate::entanglement::cross_section_area(s.state(), &cut));
    }
}
