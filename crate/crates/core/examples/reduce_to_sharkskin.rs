//! Greedy reduction of the dome to the minimal tiling, one cube at a time.

use lozenge::dynamics::{apply_flip, reduce_to_min};
use lozenge::geometry::build_region;
use lozenge::tiling::{max_config, min_config, volume};

fn main() {
    let r = build_region(20).unwrap();
    let top = max_config(&r).unwrap();
    let bottom = min_config(&r).unwrap();
    let seq = reduce_to_min(&r, &top).unwrap();
    println!("V {} -> {}: {} removals", volume(&top), volume(&bottom), seq.len());
    let mut h = top;
    for (i, m) in seq.iter().enumerate() {
        h = apply_flip(&r, &h, *m).unwrap();
        if (i + 1) % 100 == 0 || i + 1 == seq.len() {
            println!("  step {:4}  V {:5}  max height {}", i + 1, volume(&h), h.heights().iter().max().unwrap());
        }
    }
    assert_eq!(h, bottom);
}
