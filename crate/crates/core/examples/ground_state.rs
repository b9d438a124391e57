//! Frustration-free ground state and spectral gap of the flip Hamiltonian.

use lozenge::ensemble::{enumerate_configs, DEFAULT_CAP};
use lozenge::geometry::build_region;
use lozenge::spectral::spectral_report;

fn main() {
    for l in [6, 8, 10] {
        let set = enumerate_configs(&build_region(l).unwrap(), DEFAULT_CAP).unwrap();
        for q in [0.5, 1.0, 2.0] {
            let r = spectral_report(&set, q).unwrap();
            println!(
                "L={l:2} q={q:<4} dim {:5}  |H psi| {:.1e}  E0 {:.1e}  E1 {:.6}  ({:?})",
                r.dim, r.residual, r.e0, r.e1, r.method
            );
        }
    }
}
