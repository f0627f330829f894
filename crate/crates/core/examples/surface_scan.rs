// Classifies points of the three-mode parameter space against the
// exceptional surface.
//
// Usage: cargo run --example surface_scan

use bosonic_ep::scan::{scan_exceptional_surface, SurfaceScanOptions};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let points = [
        [1.0, 1.0, 1.0, 1.0],
        [std::f64::consts::SQRT_2, 0.0, 1.0, 1.0],
        [0.6, 0.8, 0.0, 1.0],
        [0.5, 0.5, 1.0, 1.0],
    ];
    for p in scan_exceptional_surface(&points, &SurfaceScanOptions::default())? {
        println!(
            "(g1, g2, J1, J2) = ({:.3}, {:.3}, {:.3}, {:.3}): {:?}, blocks {:?}",
            p.g1, p.g2, p.j1, p.j2, p.kind, p.block_sizes
        );
    }
    Ok(())
}

fn main() {
    run_example().unwrap();
}
