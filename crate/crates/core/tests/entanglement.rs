use std::collections::BTreeMap;

use lozenge::ensemble::{enumerate_configs, DEFAULT_CAP};
use lozenge::entanglement::*;
use lozenge::geometry::{build_disk_region, build_hexagon_region, build_region};
use lozenge::numeric::Deformation;
use lozenge::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(s: &str) -> Deformation {
    s.parse().unwrap()
}

// Shared pairs of the minimal tiling, frozen from an independent
// color-line tracer.
#[test]
fn baseline_shared_pairs_frozen() {
    for (l, x0) in [(2, 3), (4, 3), (6, 3), (8, 9), (10, 9), (12, 9), (14, 15)] {
        let cut = central_cut(&build_region(l).unwrap()).unwrap();
        assert_eq!(cut.x0(), x0, "L={l}");
    }
}

#[test]
fn column_is_vertical_and_ordered() {
    let r = build_region(10).unwrap();
    let cut = central_cut(&r).unwrap();
    let rows: Vec<i32> = cut.column().iter().map(|&v| r.vertex(v).row()).collect();
    assert!(rows.windows(2).all(|w| w[0] < w[1]));
    assert!(cut.column().iter().all(|&v| r.vertex(v).col() == 0));
}

// Every shared pair beyond the baseline costs four thirds of a unit of
// cross-sectional area, tiling by tiling.
#[test]
fn shared_pairs_track_area() {
    for l in [6, 8, 10] {
        let r = build_region(l).unwrap();
        let cut = central_cut(&r).unwrap();
        let set = enumerate_configs(&r, DEFAULT_CAP).unwrap();
        for h in set.configs() {
            let n = color_line_crossings(&r, h, &cut).unwrap() as i64;
            let a = cross_section_area(h, &cut);
            assert_eq!(3 * (n - cut.x0() as i64), 4 * a, "L={l}");
        }
    }
}

#[test]
fn every_segment_is_paired_on_disks() {
    let r = build_region(8).unwrap();
    let set = enumerate_configs(&r, DEFAULT_CAP).unwrap();
    let faces = r.faces().len() as u64;
    for h in set.configs() {
        // Two segments per lozenge, two segments per pair.
        assert_eq!(matched_pair_count(&r, h).unwrap(), faces / 2);
    }
}

#[test]
fn hexagon_lines_are_not_dyck() {
    let r = build_hexagon_region(2, 2, 3).unwrap();
    let h = lozenge::tiling::min_config(&r).unwrap();
    assert!(matches!(matched_pair_count(&r, &h), Err(Error::NotDyck { .. })));
    // The tolerant matching still finds a cut.
    assert!(central_cut(&r).is_ok());
}

// Independent plug-in computation of the cut-profile entropy.
fn profile_entropy(l: u32, qv: f64) -> (f64, f64) {
    let r = build_region(l).unwrap();
    let cut = central_cut(&r).unwrap();
    let set = enumerate_configs(&r, DEFAULT_CAP).unwrap();
    let mut w: BTreeMap<Vec<i32>, f64> = BTreeMap::new();
    let mut z = 0.0;
    let mut area = 0.0;
    for (h, &v) in set.configs().iter().zip(set.volumes()) {
        let x = qv.powf(2.0 * (v - set.v_min()) as f64);
        *w.entry(cut.profile(h)).or_default() += x;
        z += x;
        area += x * cross_section_area(h, &cut) as f64;
    }
    let s = -w.values().map(|&p| p / z).map(|p| p * p.ln()).sum::<f64>();
    (s, area / z)
}

#[test]
fn colorless_entropy_matches_oracle() {
    for l in [6, 8, 10] {
        for qs in ["0.8", "1", "5/4"] {
            let set = enumerate_configs(&build_region(l).unwrap(), DEFAULT_CAP).unwrap();
            let cut = central_cut(set.region()).unwrap();
            let rep = exact_entropy(&set, &q(qs), 1, &cut).unwrap();
            let (s, a) = profile_entropy(l, q(qs).value());
            assert!((rep.s_colorless - s).abs() < 1e-10);
            assert!((rep.mean_area - a).abs() < 1e-10);
            assert_eq!(rep.s_total, rep.s_colorless);
            assert!(rep.n_profiles <= 1 << cut.column().len());
            assert!(rep.s_colorless <= l as f64 * 2f64.ln());
        }
    }
}

#[test]
fn color_term_is_linear_in_ln_s() {
    let set = enumerate_configs(&build_region(8).unwrap(), DEFAULT_CAP).unwrap();
    let cut = central_cut(set.region()).unwrap();
    let one = exact_entropy(&set, &q("1"), 1, &cut).unwrap();
    for s in [2, 3, 5] {
        let rep = exact_entropy(&set, &q("1"), s, &cut).unwrap();
        let want = (s as f64).ln() * (one.mean_area + one.x0 as f64);
        assert!((rep.s_total - one.s_total - want).abs() < 1e-12);
    }
    assert!(exact_entropy(&set, &q("1"), 0, &cut).is_err());
}

#[test]
fn mean_area_grows_with_q() {
    let set = enumerate_configs(&build_region(10).unwrap(), DEFAULT_CAP).unwrap();
    let cut = central_cut(set.region()).unwrap();
    let mut last = -1.0;
    for qs in ["1/4", "1/2", "0.8", "1", "5/4", "2", "4"] {
        let a = exact_entropy(&set, &q(qs), 2, &cut).unwrap().mean_area;
        assert!(a >= last - 1e-12, "q={qs}");
        last = a;
    }
}

#[test]
fn unit_box_entropy_is_ln_two() {
    // Two tilings differing at the centre, which sits on the cut.
    let set = enumerate_configs(&build_hexagon_region(1, 1, 1).unwrap(), DEFAULT_CAP).unwrap();
    let cut = central_cut(set.region()).unwrap();
    let rep = exact_entropy(&set, &q("1"), 1, &cut).unwrap();
    assert!((rep.s_total - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn offset_cut_exists() {
    let r = build_disk_region(8, 1).unwrap();
    assert!(!central_cut(&r).unwrap().column().is_empty());
}

#[test]
fn scaling_classification() {
    let ls: Vec<f64> = (3..=12).map(|k| (4 * k) as f64).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut noisy = |f: &dyn Fn(f64) -> f64| -> Vec<(f64, f64)> {
        ls.iter().map(|&l| (l, f(l) * (1.0 + 0.01 * rng.gen_range(-1.0..1.0)))).collect()
    };
    let fit = classify_scaling(&noisy(&|l| 0.7 * l * l.ln())).unwrap();
    assert_eq!(fit.best, ScalingModel::LLogL);
    assert!(!fit.inconclusive);
    let fit = classify_scaling(&noisy(&|l| 2.0 * l * l)).unwrap();
    assert_eq!(fit.best, ScalingModel::Volume);
    assert!((fit.fit(ScalingModel::Volume).coefficient - 2.0).abs() < 0.02);
    let fit = classify_scaling(&noisy(&|l| 3.0 * l)).unwrap();
    assert_eq!(fit.best, ScalingModel::Area);
    assert!(matches!(classify_scaling(&[(4.0, 1.0), (8.0, 2.0)]), Err(Error::InsufficientData(_))));
}
