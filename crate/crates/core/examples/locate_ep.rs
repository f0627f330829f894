// Exceptional points along a parameter line.
//
// Usage: cargo run --example locate_ep

use bosonic_ep::chain::ChainSpec;
use bosonic_ep::scan::locate_ep_1d;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // single-mode squeezing splits the EP at g = J into g = J -/+ eta
    let eps = locate_ep_1d(|g| ChainSpec::uniform(2, g, 1.0, 0.2, 0.0), 0.0, 2.0, 1e-12)?;
    println!("N = 2, eta = 0.2: {eps:?}");

    let eps = locate_ep_1d(|g| ChainSpec::uniform(4, g, 1.0, 0.2, 0.0), 0.0, 2.0, 1e-12)?;
    println!("N = 4, eta = 0.2: {eps:?}");
    Ok(())
}

fn main() {
    run_example().unwrap();
}
