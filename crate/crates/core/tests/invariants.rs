use std::f64::consts::TAU;

use bosonic_ep::chain::{build_bdg_matrix, generator_for, symplectic_form, ChainSpec};
use bosonic_ep::closed_form::{nu_closed_form_two_mode, xi_from_nu, xi_two_mode};
use bosonic_ep::dynamics::{evolve, propagator, GaussianState};
use bosonic_ep::entanglement::{entanglement, pure_state_entanglement, Bipartition};
use bosonic_ep::series::default_coefficients;
use bosonic_ep::spectrum::eigenspectrum;
use num_complex::Complex64;
use proptest::prelude::*;

fn chain(n: usize) -> impl Strategy<Value = ChainSpec> {
    let bond = (0.0..1.2f64, 0.0..TAU, 0.0..1.2f64);
    let site = (0.0..0.4f64, 0.0..TAU);
    (prop::collection::vec(bond, n - 1), prop::collection::vec(site, n)).prop_map(|(bonds, sites)| {
        ChainSpec::new(
            bonds.iter().map(|&(r, a, _)| Complex64::from_polar(r, a)).collect(),
            bonds.iter().map(|&(_, _, g)| g).collect(),
            sites.iter().map(|&(r, a)| Complex64::from_polar(r, a)).collect(),
        )
        .unwrap()
    })
}

fn any_chain() -> impl Strategy<Value = ChainSpec> {
    (1usize..=6).prop_flat_map(chain)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectrum_is_closed_under_negated_conjugation(spec in any_chain()) {
        let eig = eigenspectrum(&build_bdg_matrix(&spec)).unwrap();
        let scale = eig.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for z in &eig {
            let partner = eig.iter().map(|w| (w + z.conj()).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(partner <= 1e-6 * scale, "{z} has no -conj partner");
        }
    }

    #[test]
    fn propagators_compose(spec in any_chain(), t1 in 0.0..0.8f64, t2 in 0.0..0.8f64) {
        let k = generator_for(&spec).unwrap();
        let s1 = propagator(&k, t1).unwrap();
        let s2 = propagator(&k, t2).unwrap();
        let s12 = propagator(&k, t1 + t2).unwrap();
        let prod = s2.matrix() * s1.matrix();
        prop_assert!((prod - s12.matrix()).amax() <= 1e-10 * s12.matrix().amax());
    }

    #[test]
    fn symplectic_and_pure(spec in any_chain(), t in 0.0..1.5f64) {
        let n = spec.n_modes();
        let k = generator_for(&spec).unwrap();
        let s = propagator(&k, t).unwrap();
        let s = s.matrix();
        let omega = symplectic_form(n);
        prop_assert!((s * &omega * s.transpose() - &omega).amax() <= 1e-10 * s.amax().powi(2).max(1.0));
        let state = evolve(&GaussianState::vacuum(n), &k, t).unwrap();
        prop_assert!((state.determinant() - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn pure_and_general_witness_agree(spec in (2usize..=5).prop_flat_map(chain), t in 0.0..1.0f64, cut in 1usize..=4) {
        let n = spec.n_modes();
        let part = Bipartition::new(n, 0..cut.min(n - 1)).unwrap();
        let k = generator_for(&spec).unwrap();
        let s = propagator(&k, t).unwrap();
        let pure = pure_state_entanglement(s.matrix(), &part).unwrap();
        let general = entanglement(&evolve(&GaussianState::vacuum(n), &k, t).unwrap(), &part).unwrap();
        prop_assert!((pure.nu_minus - general.nu_minus).abs() <= 1e-9 * general.nu_minus.max(1e-3));
        prop_assert!((pure.log_negativity - general.log_negativity).abs() <= 1e-8);
    }

    #[test]
    fn two_mode_witness_stays_in_range(g in 0.0..2.0f64, t in 0.0..5.0f64) {
        let nu = nu_closed_form_two_mode(g, 1.0, t);
        prop_assert!(nu > 0.0 && nu <= 1.0 + 1e-12);
        prop_assert!((xi_from_nu(nu).unwrap() - xi_two_mode(g, 1.0, t)).abs()
            <= 1e-9 * xi_two_mode(g, 1.0, t));
    }
}

/// Fitted coefficients of the highest-order EP series, frozen from a
/// high-precision run. They agree with `2 * 4^j / (j!)^2`.
const FROZEN_COEFFICIENTS: [f64; 5] = [8.0, 8.0, 32.0 / 9.0, 8.0 / 9.0, 32.0 / 225.0];

#[test]
fn series_coefficients_are_frozen() {
    let c = default_coefficients().unwrap();
    for (j, (got, want)) in c.iter().zip(FROZEN_COEFFICIENTS).enumerate() {
        let rel = (got - want).abs() / want;
        assert!(rel <= 1e-6, "c_{} = {got}, expected {want} (rel {rel:.1e})", j + 1);
    }
}
