//! Vacuum-to-witness pipeline: chain -> generator -> propagated covariance
//! -> PPT witness.

use rayon::prelude::*;

use crate::chain::{generator_for, ChainSpec};
use crate::dynamics::{check_sorted, propagator};
use crate::entanglement::{pure_state_entanglement, Bipartition, EntanglementResult};
use crate::error::Result;

/// Witnesses of the vacuum evolved for time `t`.
pub fn vacuum_entanglement(spec: &ChainSpec, part: &Bipartition, t: f64) -> Result<EntanglementResult> {
    let k = generator_for(spec)?;
    pure_state_entanglement(propagator(&k, t)?.matrix(), part)
}

pub fn vacuum_nu_minus(spec: &ChainSpec, part: &Bipartition, t: f64) -> Result<f64> {
    Ok(vacuum_entanglement(spec, part, t)?.nu_minus)
}

/// Witnesses at each time, each evolved from the vacuum at `t = 0`.
pub fn vacuum_trajectory(
    spec: &ChainSpec,
    part: &Bipartition,
    times: &[f64],
) -> Result<Vec<EntanglementResult>> {
    check_sorted(times)?;
    let k = generator_for(spec)?;
    times
        .par_iter()
        .map(|&t| pure_state_entanglement(propagator(&k, t)?.matrix(), part))
        .collect()
}

/// `nu_minus` of the `(1|N-1)` cut for the uniform chain at `g = J = 1`,
/// `eta = 0` and hopping phase `phi`; `t` is in units of `1/J`.
pub fn bkc_ep_nu_minus(n_modes: usize, phi: f64, t: f64) -> Result<f64> {
    let spec = ChainSpec::uniform(n_modes, 1.0, 1.0, 0.0, phi)?;
    vacuum_nu_minus(&spec, &Bipartition::first_vs_rest(n_modes)?, t)
}
