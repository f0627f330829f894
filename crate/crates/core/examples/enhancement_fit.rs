// Enhancement ratio `R(N)` and its exponential fit.
//
// Usage: cargo run --example enhancement_fit

use bosonic_ep::closed_form::enhancement_ratio;
use bosonic_ep::fit::fit_exponential;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let ns: Vec<usize> = (2..=30).collect();
    let r = ns.iter().map(|&n| enhancement_ratio(n, 3.5)).collect::<Result<Vec<_>, _>>()?;
    let x: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let fit = fit_exponential(&x, &r)?;
    println!("R(N) = {:.4} exp({:.4} N) + {:.4}", fit.a, fit.b, fit.c);
    for (n, r) in ns.iter().zip(&r).step_by(4) {
        println!("N = {n:>2}: R = {r:.5}, fit {:.5}", fit.eval(*n as f64));
    }
    Ok(())
}

fn main() {
    run_example().unwrap();
}
