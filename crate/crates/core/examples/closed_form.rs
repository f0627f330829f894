// Closed forms against the numerical pipeline.
//
// Usage: cargo run --example closed_form

use std::f64::consts::FRAC_PI_8;

use bosonic_ep::chain::ChainSpec;
use bosonic_ep::closed_form::{nu_closed_form_three_mode_nonuniform, nu_closed_form_two_mode, surface_point};
use bosonic_ep::entanglement::Bipartition;
use bosonic_ep::pipeline::vacuum_nu_minus;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let two = Bipartition::first_vs_rest(2)?;
    for g in [0.5, 1.0, 1.5] {
        let spec = ChainSpec::uniform(2, g, 1.0, 0.0, 0.0)?;
        let t = 2.0;
        let (num, exact) = (vacuum_nu_minus(&spec, &two, t)?, nu_closed_form_two_mode(g, 1.0, t));
        println!("two-mode g = {g}: {num:.12e} vs {exact:.12e}");
    }

    // a point on the exceptional surface g1^2 + g2^2 = J1^2 + J2^2
    let (g1, g2) = surface_point(FRAC_PI_8, 1.0);
    let spec = ChainSpec::three_mode(g1, g2, 1.0, 1.0)?;
    let part = Bipartition::parse("13|2", 3)?;
    let t = 2.0;
    let num = vacuum_nu_minus(&spec, &part, t)?;
    let exact = nu_closed_form_three_mode_nonuniform(FRAC_PI_8, 1.0, t);
    println!("three-mode (g1, g2) = ({g1:.4}, {g2:.4}): {num:.12e} vs {exact:.12e}");
    Ok(())
}

fn main() {
    run_example().unwrap();
}
