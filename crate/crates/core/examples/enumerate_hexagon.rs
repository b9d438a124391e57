//! Flip-closure enumeration of boxed hexagons against the MacMahon product.

use lozenge::ensemble::{enumerate_configs, macmahon_count, volume_polynomial, DEFAULT_CAP};
use lozenge::geometry::build_hexagon_region;

fn main() {
    for (a, b, c) in [(1, 1, 1), (2, 2, 2), (2, 3, 4), (3, 3, 3)] {
        let set = enumerate_configs(&build_hexagon_region(a, b, c).unwrap(), DEFAULT_CAP).unwrap();
        println!("{a}x{b}x{c}: {} tilings, closed form {}", set.len(), macmahon_count(a, b, c));
    }
    let set = enumerate_configs(&build_hexagon_region(2, 2, 2).unwrap(), DEFAULT_CAP).unwrap();
    println!("volume polynomial of 2x2x2 (step 3): {:?}", volume_polynomial(&set));
}
