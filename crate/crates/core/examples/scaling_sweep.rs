//! A short (L, q) sweep and the scaling classification of <A>.

use lozenge::cli::{run_sweep, ChainSpec, SweepConfig, SweepMode};
use lozenge::entanglement::classify_scaling;

fn main() {
    let cfg = SweepConfig {
        q: vec![0.8, 1.0, 1.25],
        l: vec![12, 16, 20, 24, 28],
        s: 2,
        chain: ChainSpec { steps: 2000, burn_in: 500, ..ChainSpec::default() },
        out_dir: None,
        exact_budget: 0,
        mode: SweepMode::Mcmc,
    };
    let rows = run_sweep(&cfg).unwrap();
    for r in &rows {
        println!("q={:<4} L={:2} <A> {:8.2} +- {:.2}  S_total {:.3}", r.q, r.l, r.mean_a, r.stderr_a, r.s_total);
    }
    for &q in &cfg.q {
        let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.q == q).map(|r| (r.l as f64, r.mean_a)).collect();
        let fit = classify_scaling(&pts).unwrap();
        println!("q={q}: {} (margin {:.2})", fit.best.name(), fit.margin);
    }
}
