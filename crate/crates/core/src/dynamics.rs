//! Gaussian states and their transport under the chain dynamics.
//!
//! Covariances use `sigma_ij = <b_i b_j + b_j b_i> - 2 <b_i><b_j>` in the
//! quadrature ordering `(X_1, P_1, ..., X_N, P_N)`, so the vacuum is the
//! identity. Means stay zero for the homogeneous linear dynamics here.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::chain::{symplectic_form, RealGenerator};
use crate::error::{Error, Result};
use crate::expm::{expm, norm1};

/// Growth guard: `|K|_1 |t|` above this is refused.
pub const MAX_GROWTH_EXPONENT: f64 = 300.0;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    n_modes: usize,
    cm: DMatrix<f64>,
}

impl GaussianState {
    /// Wraps a covariance, checking symmetry and the uncertainty principle.
    pub fn new(cm: DMatrix<f64>) -> Result<Self> {
        if !cm.is_square() || !cm.nrows().is_multiple_of(2) || cm.nrows() == 0 {
            return Err(Error::DimensionMismatch {
                expected: 2 * (cm.nrows() / 2).max(1),
                got: cm.ncols(),
            });
        }
        let scale = cm.amax().max(1.0);
        let asymmetry = (&cm - cm.transpose()).amax();
        if asymmetry > 1e-12 * scale {
            return Err(Error::AsymmetricInput { asymmetry });
        }
        let state = Self {
            n_modes: cm.nrows() / 2,
            cm,
        };
        let min_eigenvalue = state.uncertainty_min_eigenvalue()?;
        if min_eigenvalue < -1e-9 * scale {
            return Err(Error::NotBonaFide { min_eigenvalue });
        }
        Ok(state)
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self {
            n_modes,
            cm: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cm(&self) -> &DMatrix<f64> {
        &self.cm
    }

    pub fn determinant(&self) -> f64 {
        self.cm.determinant()
    }

    /// Smallest eigenvalue of the Hermitian matrix `sigma + i Omega`.
    pub fn uncertainty_min_eigenvalue(&self) -> Result<f64> {
        let omega = symplectic_form(self.n_modes);
        let h = DMatrix::<Complex64>::from_fn(self.cm.nrows(), self.cm.ncols(), |r, c| {
            Complex64::new(self.cm[(r, c)], omega[(r, c)])
        });
        let eig = SymmetricEigen::try_new(h, f64::EPSILON, 0)
            .ok_or(Error::EigensolverFailure("Hermitian eigen"))?;
        Ok(eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
    }
}

/// Thermal product state with `sigma = diag((2 n_j + 1) I_2)`.
pub fn initial_state(n_modes: usize, occupancies: &[f64]) -> Result<GaussianState> {
    if n_modes == 0 {
        return Err(Error::NonPositiveN(0));
    }
    let occ: Vec<f64> = match occupancies.len() {
        0 => vec![0.0; n_modes],
        1 => vec![occupancies[0]; n_modes],
        len if len == n_modes => occupancies.to_vec(),
        len => {
            return Err(Error::LengthMismatch {
                field: "occupancies",
                expected: n_modes,
                got: len,
            })
        }
    };
    for (mode, &value) in occ.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFiniteParameter {
                field: "occupancies",
            });
        }
        if value < 0.0 {
            return Err(Error::NegativeOccupancy { mode, value });
        }
    }
    let mut cm = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for (k, n) in occ.iter().enumerate() {
        cm[(2 * k, 2 * k)] = 2.0 * n + 1.0;
        cm[(2 * k + 1, 2 * k + 1)] = 2.0 * n + 1.0;
    }
    Ok(GaussianState { n_modes, cm })
}

/// `S(t) = exp(K t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticPropagator {
    s: DMatrix<f64>,
    t: f64,
}

impl SymplecticPropagator {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// Largest entry of `S Omega S^T - Omega`, relative to `max(1, |S|^2)`.
    pub fn symplectic_defect(&self) -> f64 {
        let omega = symplectic_form(self.s.nrows() / 2);
        let d = &self.s * &omega * self.s.transpose() - &omega;
        d.amax() / self.s.amax().powi(2).max(1.0)
    }
}

pub fn growth_exponent(k: &RealGenerator, t: f64) -> f64 {
    norm1(k.data()) * t.abs()
}

pub fn propagator(k: &RealGenerator, t: f64) -> Result<SymplecticPropagator> {
    if !t.is_finite() {
        return Err(Error::NonFiniteParameter { field: "t" });
    }
    if k.data().iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteParameter { field: "generator" });
    }
    let exponent = growth_exponent(k, t);
    if exponent > MAX_GROWTH_EXPONENT {
        return Err(Error::OverflowRisk {
            exponent,
            limit: MAX_GROWTH_EXPONENT,
        });
    }
    Ok(SymplecticPropagator {
        s: expm(&(k.data() * t)),
        t,
    })
}

/// `sigma -> S sigma S^T`, symmetrised.
pub fn transport(state: &GaussianState, s: &SymplecticPropagator) -> Result<GaussianState> {
    let size = state.cm.nrows();
    if s.s.nrows() != size {
        return Err(Error::DimensionMismatch {
            expected: size,
            got: s.s.nrows(),
        });
    }
    let moved = &s.s * &state.cm * s.s.transpose();
    let cm = (&moved + moved.transpose()) * 0.5;
    Ok(GaussianState {
        n_modes: state.n_modes,
        cm,
    })
}

/// `sigma(t) = S(t) sigma S(t)^T`, with the bona fide condition checked
/// relative to `|sigma|`.
pub fn evolve(state: &GaussianState, k: &RealGenerator, t: f64) -> Result<GaussianState> {
    if k.size() != state.cm.nrows() {
        return Err(Error::DimensionMismatch {
            expected: state.cm.nrows(),
            got: k.size(),
        });
    }
    let s = propagator(k, t)?;
    let out = transport(state, &s)?;
    let min_eigenvalue = out.uncertainty_min_eigenvalue()?;
    if min_eigenvalue < -1e-8 * out.cm.amax().max(1.0) {
        return Err(Error::NotBonaFide { min_eigenvalue });
    }
    Ok(out)
}

/// One state per requested time, each propagated directly from `t = 0`.
pub fn evolve_trajectory(
    state: &GaussianState,
    k: &RealGenerator,
    times: &[f64],
) -> Result<Vec<GaussianState>> {
    check_sorted(times)?;
    times.par_iter().map(|&t| evolve(state, k, t)).collect()
}

pub(crate) fn check_sorted(times: &[f64]) -> Result<()> {
    for (i, w) in times.windows(2).enumerate() {
        if !(w[0] <= w[1]) {
            return Err(Error::UnsortedTimes { index: i + 1 });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{generator_for, ChainSpec};
    use crate::ode::{integrate_covariance, OdeOptions};

    fn gen(n: usize, g: f64, j: f64, eta: f64, phi: f64) -> RealGenerator {
        generator_for(&ChainSpec::uniform(n, g, j, eta, phi).unwrap()).unwrap()
    }

    #[test]
    fn thermal_states() {
        assert_eq!(initial_state(2, &[0.0]).unwrap().cm(), &DMatrix::identity(4, 4));
        assert_eq!(
            initial_state(1, &[0.5]).unwrap().cm(),
            &(DMatrix::identity(2, 2) * 2.0)
        );
        let s = initial_state(3, &[0.0, 1.0, 0.0]).unwrap();
        let want = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            1.0, 1.0, 3.0, 3.0, 1.0, 1.0,
        ]));
        assert_eq!(s.cm(), &want);
        assert!(matches!(
            initial_state(2, &[0.0, -0.1]),
            Err(Error::NegativeOccupancy { mode: 1, .. })
        ));
    }

    #[test]
    fn rejects_unphysical_covariance() {
        let cm = DMatrix::identity(2, 2) * 0.5;
        assert!(matches!(GaussianState::new(cm), Err(Error::NotBonaFide { .. })));
        let mut cm = DMatrix::identity(2, 2);
        cm[(0, 1)] = 0.3;
        assert!(matches!(GaussianState::new(cm), Err(Error::AsymmetricInput { .. })));
    }

    #[test]
    fn zero_time_is_identity() {
        let k = gen(3, 0.7, 1.0, 0.2, 0.4);
        assert_eq!(propagator(&k, 0.0).unwrap().matrix(), &DMatrix::identity(6, 6));
        let v = GaussianState::vacuum(3);
        assert_eq!(evolve(&v, &k, 0.0).unwrap(), v);
    }

    #[test]
    fn single_mode_squeezer_closed_form() {
        let k = gen(1, 0.0, 0.0, 1.0, 0.0);
        let t = 0.8;
        let s = propagator(&k, t).unwrap();
        // diag(e^t, e^-t) in some quadrature basis: the eigenvalues of S
        let m = s.matrix();
        let tr = m[(0, 0)] + m[(1, 1)];
        assert!((tr - 2.0 * t.cosh()).abs() < 1e-13);
        assert!((m.determinant() - 1.0).abs() < 1e-13);
        // S is symmetric for a pure squeezer, so its singular values are e^{+-t}
        let sv = m.clone().svd(false, false).singular_values;
        assert!((sv.max() - t.exp()).abs() < 1e-13);
    }

    #[test]
    fn ep_propagator_is_linear_in_time() {
        // K^2 = 0 at the N = 2 exceptional point, so S(t) = 1 + K t exactly
        let k = gen(2, 1.0, 1.0, 0.0, 0.0);
        assert!((k.data() * k.data()).amax() < 1e-14);
        for t in [0.3, 1.0, 4.0] {
            let s = propagator(&k, t).unwrap();
            let series = DMatrix::identity(4, 4) + k.data() * t;
            assert!((s.matrix() - series).amax() < 1e-12 * t.max(1.0));
        }
    }

    #[test]
    fn semigroup_and_symplectic() {
        let k = gen(3, 0.79, 1.0, 0.2, 0.3);
        let (t1, t2) = (0.7, 1.9);
        let s1 = propagator(&k, t1).unwrap();
        let s2 = propagator(&k, t2).unwrap();
        let s12 = propagator(&k, t1 + t2).unwrap();
        let prod = s1.matrix() * s2.matrix();
        assert!((prod - s12.matrix()).amax() < 1e-9 * s12.matrix().amax());
        for s in [&s1, &s2, &s12] {
            assert!(s.symplectic_defect() < 1e-10);
        }
    }

    #[test]
    fn overflow_guard() {
        let k = gen(2, 0.5, 1.0, 0.0, 0.0);
        let err = propagator(&k, 1e4).unwrap_err();
        assert!(matches!(err, Error::OverflowRisk { .. }));
    }

    #[test]
    fn purity_preserved() {
        let k = gen(4, 0.9, 1.0, 0.3, 0.6);
        let v = GaussianState::vacuum(4);
        for t in [0.5, 2.0, 4.0] {
            let s = evolve(&v, &k, t).unwrap();
            // pure Gaussian states satisfy (sigma Omega)^2 = -1
            let so = s.cm() * symplectic_form(4);
            let defect = (&so * &so + DMatrix::identity(8, 8)).amax();
            assert!(defect < 1e-13 * s.cm().amax().powi(2), "t = {t}: {defect}");
            if t < 3.0 {
                assert!((s.determinant() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn trajectory_is_consistent_and_sorted() {
        let k = gen(2, 0.79, 1.0, 0.2, 0.0);
        let v = GaussianState::vacuum(2);
        let traj = evolve_trajectory(&v, &k, &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(traj[0], v);
        let single = evolve_trajectory(&v, &k, &[2.0]).unwrap();
        assert!((traj[2].cm() - single[0].cm()).amax() < 1e-12);
        assert!(matches!(
            evolve_trajectory(&v, &k, &[0.0, 2.0, 1.0]),
            Err(Error::UnsortedTimes { index: 2 })
        ));
    }

    #[test]
    fn region_one_norm_grows() {
        let k = gen(2, 0.79, 1.0, 0.2, 0.0);
        let v = GaussianState::vacuum(2);
        let times: Vec<f64> = (0..=50).map(|i| i as f64 * 0.1).collect();
        let traj = evolve_trajectory(&v, &k, &times).unwrap();
        for w in traj.windows(2) {
            assert!(w[1].cm().norm() >= w[0].cm().norm() - 1e-12);
        }
    }

    #[test]
    fn exponential_matches_ode() {
        let k = gen(3, 0.6, 1.0, 0.1, 0.9);
        let v = GaussianState::vacuum(3);
        let exact = evolve(&v, &k, 5.0).unwrap();
        let ode = integrate_covariance(k.data(), v.cm(), 5.0, OdeOptions::default()).unwrap();
        let rel = (exact.cm() - ode).amax() / exact.cm().amax();
        assert!(rel < 1e-7, "rel = {rel:e}");
    }
}
