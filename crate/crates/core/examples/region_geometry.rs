//! Builds the quasi-circular regions and prints their size and boundary.

use lozenge::geometry::{build_disk_region, build_hexagon_region, validate_region};

fn main() {
    for l in (2..=16).step_by(2) {
        let r = build_disk_region(l, 0).unwrap();
        println!(
            "L={l:2}  vertices {:4}  triangles {:4}  boundary {:3}  interior {:4}  valid {}",
            r.num_vertices(),
            r.faces().len(),
            r.boundary_cycle().len(),
            r.interior().len(),
            validate_region(&r).is_empty()
        );
    }
    let h = build_hexagon_region(2, 3, 4).unwrap();
    println!("hexagon 2,3,4: {} vertices, hash {}", h.num_vertices(), &h.hash_hex()[..16]);
}
