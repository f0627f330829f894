// Eigenvalues and region labels of the two-mode chain across `g`.
//
// Usage: cargo run --example spectrum

use bosonic_ep::chain::{build_bdg_matrix, ChainSpec};
use bosonic_ep::spectrum::{spectrum_report, DEFAULT_REGION_TOL};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for g in [0.5, 0.79, 1.0, 1.19, 1.59] {
        let m = build_bdg_matrix(&ChainSpec::uniform(2, g, 1.0, 0.2, 0.0)?);
        let report = spectrum_report(&m, DEFAULT_REGION_TOL)?;
        let eig: Vec<String> = report
            .eigenvalues
            .iter()
            .map(|z| format!("{:+.4}{:+.4}i", z.re, z.im))
            .collect();
        println!("g = {g:.2}  region {:<3} {}", report.region.label(), eig.join("  "));
    }
    Ok(())
}

fn main() {
    run_example().unwrap();
}
