//! Direct reduced-density-matrix entropy of the colored state on tiny regions.

use lozenge::geometry::{build_disk_region, build_region};
use lozenge::spectral::colored_microcheck;

fn main() {
    let regions = [("unit hexagon", build_region(2).unwrap()), ("triad", build_disk_region(4, 2).unwrap())];
    for (name, r) in &regions {
        for s in [2, 3] {
            for q in ["1/2", "1", "2"] {
                let m = colored_microcheck(r, &q.parse().unwrap(), s).unwrap();
                println!(
                    "{name:12} s={s} q={q:<3} dim {:3}  direct {:.6}  A+X0 form {:.6}  pair form {:.6}  |H_G psi| {:.1e}",
                    m.dim, m.s_direct, m.s_formula, m.s_pair_count, m.h_gamma_residual
                );
            }
        }
    }
}
