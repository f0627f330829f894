// `nu_minus` and the logarithmic negativity of the evolved vacuum.
//
// Usage: cargo run --example entanglement_trajectory

use bosonic_ep::chain::ChainSpec;
use bosonic_ep::entanglement::Bipartition;
use bosonic_ep::pipeline::vacuum_trajectory;
use bosonic_ep::scan::linspace;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let spec = ChainSpec::uniform(4, 1.0, 1.0, 0.0, std::f64::consts::FRAC_PI_2)?;
    let part = Bipartition::parse("1|234", 4)?;
    let times = linspace(0.0, 5.0, 11);
    println!("{:>5} {:>14} {:>10}", "Jt", "nu_minus", "E_N");
    for (t, r) in times.iter().zip(vacuum_trajectory(&spec, &part, &times)?) {
        println!("{t:>5.2} {:>14.6e} {:>10.4}", r.nu_minus, r.log_negativity);
    }
    Ok(())
}

fn main() {
    run_example().unwrap();
}
