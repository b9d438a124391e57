use lozenge::dynamics::Direction;
use lozenge::ensemble::{enumerate_configs, DEFAULT_CAP};
use lozenge::entanglement::{central_cut, cross_section_area};
use lozenge::geometry::{build_hexagon_region, build_region};
use lozenge::mcmc::*;
use lozenge::tiling::{max_config, min_config, volume};
use lozenge::Error;

fn exact_means(l: u32, q: f64) -> (f64, f64) {
    let r = build_region(l).unwrap();
    let cut = central_cut(&r).unwrap();
    let set = enumerate_configs(&r, DEFAULT_CAP).unwrap();
    let (mut z, mut v, mut a) = (0.0, 0.0, 0.0);
    for (h, &vol) in set.configs().iter().zip(set.volumes()) {
        let w = q.powf(2.0 * (vol - set.v_min()) as f64);
        z += w;
        v += w * vol as f64;
        a += w * cross_section_area(h, &cut) as f64;
    }
    (v / z, a / z)
}

#[test]
fn two_state_chain_hits_the_exact_weight() {
    let r = build_hexagon_region(1, 1, 1).unwrap();
    let q = 1.1f64;
    let mut p = ChainParams::new(q, 400_000, 1000, 3);
    p.chains = 4;
    let stats = run_chain(&r, &p).unwrap();
    let vmin = volume(&min_config(&r).unwrap()) as f64;
    let w = q.powi(6);
    let want = vmin + 3.0 * w / (1.0 + w);
    assert!((stats.volume.mean - want).abs() < 4.0 * stats.volume.stderr, "{stats:?}");
}

#[test]
fn area_and_volume_match_enumeration() {
    for (q, seed) in [(1.0, 11), (0.8, 12), (1.25, 13)] {
        let r = build_region(8).unwrap();
        let (v, a) = exact_means(8, q);
        let mut p = ChainParams::new(q, 400_000, 20_000, seed);
        p.chains = 4;
        let stats = run_chain(&r, &p).unwrap();
        assert!(stats.usable);
        assert!((stats.volume.mean - v).abs() < 4.0 * stats.volume.stderr, "q={q} {v} {:?}", stats.volume);
        assert!((stats.area.mean - a).abs() < 4.0 * stats.area.stderr, "q={q} {a} {:?}", stats.area);
    }
}

#[test]
fn heat_bath_agrees() {
    let r = build_region(8).unwrap();
    let (v, _) = exact_means(8, 1.25);
    let mut p = ChainParams::new(1.25, 400_000, 20_000, 5);
    p.chains = 4;
    p.proposal = Proposal::HeatBath;
    let stats = run_chain(&r, &p).unwrap();
    assert!((stats.volume.mean - v).abs() < 4.0 * stats.volume.stderr);
}

#[test]
fn extreme_q_freezes_the_chain() {
    let r = build_region(8).unwrap();
    let lo = volume(&min_config(&r).unwrap()) as f64;
    let hi = volume(&max_config(&r).unwrap()) as f64;
    let stats = run_chain(&r, &ChainParams::new(0.01, 50_000, 10_000, 1)).unwrap();
    assert!((stats.volume.mean - lo).abs() < 1e-9);
    // Removing a cube costs a factor q^-6 = 1/4096.
    let stats = run_chain(&r, &ChainParams::new(4.0, 50_000, 10_000, 1)).unwrap();
    assert!((stats.volume.mean - hi).abs() < 0.05);
}

// Metropolis transition probabilities satisfy detailed balance exactly.
#[test]
fn detailed_balance_on_enumerated_set() {
    let r = build_region(8).unwrap();
    let set = enumerate_configs(&r, DEFAULT_CAP).unwrap();
    let n_int = r.interior().len() as f64;
    for q in [0.7, 1.0, 1.3] {
        for prop in [Proposal::Metropolis, Proposal::HeatBath] {
            let (up, down) = acceptance(q, prop);
            for i in 0..set.len() {
                for &(j, m) in set.neighbors(i) {
                    let pi_i = q.powf(2.0 * set.volume(i) as f64);
                    let pi_j = q.powf(2.0 * set.volume(j) as f64);
                    let (fwd, back) = match m.direction {
                        Direction::Raise => (up, down),
                        Direction::Lower => (down, up),
                    };
                    let lhs = pi_i * fwd / n_int;
                    let rhs = pi_j * back / n_int;
                    assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(rhs));
                }
            }
        }
    }
}

#[test]
fn seeded_runs_are_reproducible() {
    let r = build_region(12).unwrap();
    let cut = central_cut(&r).unwrap();
    let p = ChainParams::new(1.0, 30_000, 1000, 99);
    let a = run_single_chain(&r, &cut, &p, 0).unwrap();
    let b = run_single_chain(&r, &cut, &p, 0).unwrap();
    assert_eq!(a, b);
    let c = run_single_chain(&r, &cut, &p, 1).unwrap();
    assert_ne!(a.volume, c.volume);

    let mut p = p;
    p.chains = 3;
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let s1 = one.install(|| run_chain(&r, &p).unwrap());
    let s4 = many.install(|| run_chain(&r, &p).unwrap());
    assert_eq!(serde_json::to_string(&s1).unwrap(), serde_json::to_string(&s4).unwrap());
}

#[test]
fn unit_box_steps_alternate_at_q_one() {
    let r = build_hexagon_region(1, 1, 1).unwrap();
    let mut rng = chain_rng(0, 0);
    let lo = min_config(&r).unwrap();
    let hi = max_config(&r).unwrap();
    let mut h = lo.clone();
    for i in 0..10 {
        h = mcmc_step(&r, h, 1.0, &mut rng);
        assert_eq!(h, if i % 2 == 0 { hi.clone() } else { lo.clone() });
    }
}

#[test]
fn parameters_are_validated() {
    let r = build_region(6).unwrap();
    for p in [
        ChainParams::new(0.0, 100, 10, 0),
        ChainParams::new(f64::NAN, 100, 10, 0),
        ChainParams::new(1.0, 100, 100, 0),
        ChainParams { thinning: 0, ..ChainParams::new(1.0, 100, 10, 0) },
        ChainParams { chains: 0, ..ChainParams::new(1.0, 100, 10, 0) },
    ] {
        assert!(matches!(run_chain(&r, &p), Err(Error::InvalidParameter(_))));
    }
    // Too few samples for batch means.
    assert!(matches!(run_chain(&r, &ChainParams::new(1.0, 20, 10, 0)), Err(Error::InsufficientData(_))));
}

#[test]
fn series_csv_header() {
    let r = build_region(8).unwrap();
    let cut = central_cut(&r).unwrap();
    let s = run_single_chain(&r, &cut, &ChainParams::new(1.0, 200, 100, 0), 0).unwrap();
    let mut buf = Vec::new();
    write_series_csv(&mut buf, &s).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().next().unwrap(), "step,V,A,h_max");
    assert_eq!(text.lines().count(), 101);
}
