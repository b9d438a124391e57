use lozenge::ensemble::{enumerate_configs, ConfigSet, DEFAULT_CAP};
use lozenge::geometry::{build_disk_region, build_hexagon_region, build_region};
use lozenge::numeric::Deformation;
use lozenge::spectral::*;
use lozenge::tiling::{max_config, min_config};
use lozenge::{Error, LatticeRegion};

fn set_of(r: &LatticeRegion) -> ConfigSet {
    enumerate_configs(r, DEFAULT_CAP).unwrap()
}

#[test]
fn unit_box_projector_spectrum() {
    let set = set_of(&build_hexagon_region(1, 1, 1).unwrap());
    for q in [0.5, 1.0, 1.7] {
        let h = build_hamiltonian(&set, q).unwrap();
        assert_eq!(h.dim(), 2);
        let psi = ground_state_vector(&set, q);
        let gap = dense_gap(&h, &psi).unwrap();
        assert!(gap.e0.abs() < 1e-12 && (gap.e1 - 1.0).abs() < 1e-12);
        let w = q.powi(3);
        assert!((h.get(0, 0) - w * w / (1.0 + w * w)).abs() < 1e-12);
        assert!((h.get(0, 1) + w / (1.0 + w * w)).abs() < 1e-12);
    }
}

#[test]
fn ground_state_is_annihilated() {
    for r in [build_region(8).unwrap(), build_region(10).unwrap(), build_hexagon_region(2, 3, 2).unwrap()] {
        let set = set_of(&r);
        for q in [0.5, 0.8, 1.0, 1.25, 2.0] {
            let h = build_hamiltonian(&set, q).unwrap();
            assert!(h.is_symmetric());
            let psi = ground_state_vector(&set, q);
            let check = verify_ground_state(&h, &set, &psi);
            assert!(check.residual < 1e-10, "q={q} {check:?}");
            assert!(check.ratio_ok);
        }
    }
}

#[test]
fn perturbed_state_is_not_annihilated() {
    let set = set_of(&build_region(8).unwrap());
    let h = build_hamiltonian(&set, 1.0).unwrap();
    let mut psi = ground_state_vector(&set, 1.0);
    psi[5] *= 1.01;
    assert!(verify_ground_state(&h, &set, &psi).residual > 1e-5);
}

#[test]
fn unique_gapped_ground_state() {
    for r in [build_region(6).unwrap(), build_region(8).unwrap(), build_hexagon_region(2, 2, 2).unwrap()] {
        let set = set_of(&r);
        for q in [0.5, 1.0, 2.0] {
            let rep = spectral_report(&set, q).unwrap();
            assert!(rep.e0.abs() < 1e-10);
            assert!(rep.e1 > 1e-6, "q={q} {rep:?}");
            assert!(!rep.degenerate);
            assert!(rep.min_eigenvalue > -1e-10);
            assert!(rep.eigenvector_deviation.unwrap() < 1e-8);
        }
    }
}

#[test]
fn lanczos_agrees_with_dense() {
    for r in [build_region(8).unwrap(), build_hexagon_region(2, 2, 3).unwrap()] {
        let set = set_of(&r);
        let h = build_hamiltonian(&set, 1.0).unwrap();
        let psi = ground_state_vector(&set, 1.0);
        let d = dense_gap(&h, &psi).unwrap();
        let l = lanczos_gap(&h, &psi, 30, 200).unwrap();
        assert!((d.e1 - l.e1).abs() < 1e-7, "{} {}", d.e1, l.e1);
    }
}

#[test]
fn gap_shrinks_with_size() {
    let g: Vec<f64> = [6, 8, 10].iter().map(|&l| spectral_report(&set_of(&build_region(l).unwrap()), 1.0).unwrap().e1).collect();
    assert!(g.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{g:?}");
}

#[test]
fn disconnected_sets_are_rejected() {
    let r = build_hexagon_region(2, 2, 2).unwrap();
    let set = ConfigSet::from_configs(r.clone(), vec![min_config(&r).unwrap(), max_config(&r).unwrap()]);
    assert!(matches!(build_hamiltonian(&set, 1.0), Err(Error::Disconnected)));
}

#[test]
fn microcheck_on_unit_hexagon() {
    let r = build_region(2).unwrap();
    for qs in ["0.5", "1", "2"] {
        let q: Deformation = qs.parse().unwrap();
        for s in [1, 2, 3] {
            let m = colored_microcheck(&r, &q, s).unwrap();
            assert!(m.formula_error < 1e-10, "q={qs} s={s} {m:?}");
            assert!(m.h_gamma_residual < 1e-10);
        }
        let m = colored_microcheck(&r, &q, 2).unwrap();
        assert!((m.s_direct - 3.0 * 2f64.ln()).abs() < 1e-10);
    }
}

#[test]
fn microcheck_reduces_to_colorless_at_one_color() {
    let r = build_disk_region(4, 2).unwrap();
    let q: Deformation = "0.7".parse().unwrap();
    let m = colored_microcheck(&r, &q, 1).unwrap();
    assert!((m.s_direct - m.s_colorless).abs() < 1e-10);
    // With colors, the direct entropy equals the pair-count form.
    let m = colored_microcheck(&r, &q, 2).unwrap();
    assert!(m.pair_count_error < 1e-10, "{m:?}");
    assert!(m.h_gamma_residual < 1e-10);
}

#[test]
fn microcheck_respects_dimension_cap() {
    let r = build_region(8).unwrap();
    let q: Deformation = "1".parse().unwrap();
    assert!(matches!(colored_microcheck(&r, &q, 3), Err(Error::DimensionCap { .. })));
}
