//! Exact cut entanglement: colorless part, color part and shared pairs.

use lozenge::ensemble::{enumerate_configs, DEFAULT_CAP};
use lozenge::entanglement::{central_cut, exact_entropy};
use lozenge::geometry::build_region;

fn main() {
    let s = 3;
    for l in [6, 8, 10] {
        let set = enumerate_configs(&build_region(l).unwrap(), DEFAULT_CAP).unwrap();
        let cut = central_cut(set.region()).unwrap();
        for q in ["1/2", "1", "5/4", "2"] {
            let e = exact_entropy(&set, &q.parse().unwrap(), s, &cut).unwrap();
            println!(
                "L={l:2} q={q:<4} <A> {:7.3}  X0 {}  <N> {:7.3}  S(q,1) {:.4}  S(q,{s}) {:.4}",
                e.mean_area, e.x0, e.mean_shared_pairs, e.s_colorless, e.s_total
            );
        }
    }
}
