// Jordan structure at the exceptional point `g = J` of uniform chains.
//
// Usage: cargo run --example jordan_blocks

use std::f64::consts::FRAC_PI_2;

use bosonic_ep::chain::{build_bdg_matrix, ChainSpec};
use bosonic_ep::jordan::{detect_eps, DEFAULT_CLUSTER_TOL, DEFAULT_RANK_TOL};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for (n, phi) in [(2, 0.0), (3, FRAC_PI_2), (4, 0.0), (4, FRAC_PI_2), (5, FRAC_PI_2)] {
        let m = build_bdg_matrix(&ChainSpec::uniform(n, 1.0, 1.0, 0.0, phi)?);
        for ep in detect_eps(&m, DEFAULT_CLUSTER_TOL, DEFAULT_RANK_TOL)? {
            println!(
                "N = {n}, phi = {phi:.3}: lambda = {:.2e}, blocks {:?} ({}-fold EP{})",
                ep.center,
                ep.jordan_blocks,
                ep.fold(),
                ep.order
            );
        }
    }
    Ok(())
}

fn main() {
    run_example().unwrap();
}
