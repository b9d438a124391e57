//! Metropolis sampling on a large disk: area, volume and centre height.

use lozenge::geometry::build_region;
use lozenge::mcmc::{run_chain, ChainParams};

fn main() {
    let l = 32;
    let r = build_region(l).unwrap();
    let k = r.interior().len() as u64;
    for q in [0.8, 1.0, 1.25] {
        let p = ChainParams { chains: 4, thinning: k, ..ChainParams::new(q, 3000 * k, 500 * k, 1) };
        let st = run_chain(&r, &p).unwrap();
        println!(
            "L={l} q={q:<4} <A> {:8.2} +- {:.2}  <V> {:9.1}  h_center {:.2}  tau {:.1} sweeps  ESS {:.0}",
            st.area.mean,
            st.area.stderr,
            st.volume.mean,
            st.center_height.mean,
            st.tau_volume.max(st.tau_area),
            st.effective_samples
        );
    }
}
