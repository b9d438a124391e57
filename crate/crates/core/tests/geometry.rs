use lozenge::geometry::*;
use lozenge::Error;
use proptest::prelude::*;

#[test]
fn unit_hexagon_shape() {
    let r = build_region(2).unwrap();
    assert_eq!(r.num_vertices(), 7);
    assert_eq!(r.faces().len(), 6);
    assert_eq!(r.boundary_cycle().len(), 6);
    assert_eq!(r.interior(), &[r.center().unwrap()]);
    let hs: Vec<i32> = r.boundary_cycle().iter().map(|&v| r.boundary_height(v).unwrap()).collect();
    // Sublattice 1 pinned at 0, sublattice 2 at 1, alternating around the cycle.
    for w in hs.windows(2) {
        assert_eq!((w[0] - w[1]).abs(), 1);
    }
    for &v in r.boundary_cycle() {
        assert_eq!(r.boundary_height(v).unwrap(), [-1, 0, 1][r.vertex(v).sublattice() as usize]);
    }
}

#[test]
fn odd_or_tiny_sizes_are_rejected() {
    assert!(matches!(build_region(3), Err(Error::InvalidSize(3))));
    assert!(matches!(build_region(0), Err(Error::InvalidSize(0))));
    assert!(matches!(build_hexagon_region(0, 1, 1), Err(Error::InvalidHexagon(..))));
}

// Frozen from an independent construction (cell centres on sublattice 0,
// all six outer vertices inside the disk).
#[test]
fn disk_sizes_frozen() {
    let want = [(2, 7, 6), (4, 7, 6), (6, 31, 42), (8, 55, 78), (10, 73, 114), (12, 115, 186)];
    for (l, nv, nf) in want {
        let r = build_region(l).unwrap();
        assert_eq!((r.num_vertices(), r.faces().len()), (nv, nf), "L={l}");
    }
}

#[test]
fn hexagon_counts_match_closed_forms() {
    for (a, b, c) in [(1, 1, 1), (1, 1, 2), (2, 2, 2), (1, 3, 2), (3, 4, 2)] {
        let r = build_hexagon_region(a, b, c).unwrap();
        let (a, b, c) = (a as usize, b as usize, c as usize);
        assert_eq!(r.faces().len(), 2 * (a * b + b * c + c * a));
        assert_eq!(r.num_vertices(), a * b + b * c + c * a + a + b + c + 1);
        assert_eq!(r.boundary_cycle().len(), 2 * (a + b + c));
        assert!(validate_region(&r).is_empty());
    }
}

#[test]
fn tampered_boundary_is_reported() {
    let mut r = build_region(6).unwrap();
    let v = r.boundary_cycle()[0];
    r.set_boundary_height(v, 4);
    let bad = validate_region(&r);
    assert!(bad.iter().any(|x| matches!(x, RegionViolation::BoundaryHeightRange { .. })));
    assert!(bad.iter().any(|x| matches!(x, RegionViolation::BoundaryEdgeRule { .. })));
}

#[test]
fn json_roundtrip_and_hash() {
    let r = build_region(8).unwrap();
    let doc = r.to_json();
    assert_eq!(doc["L"], 8);
    let back = LatticeRegion::from_json(&doc).unwrap();
    assert_eq!(back.vertices(), r.vertices());
    assert_eq!(back.hash_hex(), r.hash_hex());
    assert_ne!(r.hash_hex(), build_region(6).unwrap().hash_hex());

    let mut doc = doc;
    doc["schema_version"] = "9.0".into();
    assert!(LatticeRegion::from_json(&doc).is_err());
}

#[test]
fn edited_region_file_fails_validation() {
    let r = build_region(6).unwrap();
    let mut doc = r.to_json();
    let key = doc["boundary_heights"].as_object().unwrap().keys().next().unwrap().clone();
    doc["boundary_heights"][&key] = 3.into();
    let back = LatticeRegion::from_json(&doc).unwrap();
    assert!(!validate_region(&back).is_empty());
}

#[test]
fn offset_disks_build() {
    for s in 0..3 {
        for l in (2..=12).step_by(2) {
            if let Ok(r) = build_disk_region(l, s) {
                assert!(validate_region(&r).is_empty());
            }
        }
    }
    let triad = build_disk_region(4, 2).unwrap();
    assert_eq!(triad.num_vertices(), 16);
}

proptest! {
    #[test]
    fn disk_invariants(half in 1u32..15) {
        let r = build_region(2 * half).unwrap();
        prop_assert!(validate_region(&r).is_empty());
        prop_assert_eq!(r.faces().len() % 6, 0);
        // Every vertex sits inside the closed disk.
        let lim = (2 * half) as i64 * (2 * half) as i64;
        prop_assert!(r.vertices().iter().all(|v| v.norm2_x4() <= lim));
        // Interior vertices carry six faces, boundary ones fewer.
        for v in 0..r.num_vertices() {
            prop_assert_eq!(r.faces_at(v) == 6, !r.is_boundary(v));
        }
        // Boundary walk alternates between the pinned values.
        for &v in r.boundary_cycle() {
            let h = r.boundary_height(v).unwrap();
            prop_assert!(h == 0 || h == 1);
        }
    }

    #[test]
    fn sublattice_is_additive(a in -50i32..50, b in -50i32..50, k in -5i32..5) {
        let v = AxialCoord::new(a, b);
        for ax in Axis::ALL {
            let w = v.step(ax, k);
            prop_assert_eq!(w.sublattice() as i32, (v.sublattice() as i32 + k).rem_euclid(3));
        }
    }
}
