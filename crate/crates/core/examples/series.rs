// Power-series coefficients of the witness at the highest-order EP.
//
// Usage: cargo run --example series

use bosonic_ep::series::xi_series_coefficients;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let series = xi_series_coefficients(6)?;
    for fit in &series.fits {
        println!("N = {}: residual {:.1e}, c = {:.8?}", fit.n_modes, fit.residual, fit.coefficients);
    }
    println!("largest drift between chain lengths: {:.1e}", series.max_drift);
    Ok(())
}

fn main() {
    run_example().unwrap();
}
