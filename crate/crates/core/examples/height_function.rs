//! Height functions of the extremal tilings and what validation reports
//! after a bad edit.

use lozenge::geometry::build_region;
use lozenge::tiling::{lozenges_of, max_config, min_config, thurston_lower_envelope, validate_config, volume};

fn main() {
    let r = build_region(8).unwrap();
    let lo = min_config(&r).unwrap();
    let hi = max_config(&r).unwrap();
    let free = thurston_lower_envelope(&r).unwrap();
    let c = r.center().unwrap();
    println!("centre height: sharkskin {}, dome {}, without floor {}", lo.get(c), hi.get(c), free.get(c));
    println!("volumes: {} .. {}", volume(&lo), volume(&hi));
    let mut kinds = [0; 3];
    for l in lozenges_of(&r, &hi).unwrap() {
        kinds[l.orientation.diagonal_axis().index()] += 1;
    }
    println!("dome lozenges by diagonal axis: {kinds:?}");
    for v in validate_config(&r, &lo.shifted(c, 1)) {
        println!("edited: {v}");
    }
}
