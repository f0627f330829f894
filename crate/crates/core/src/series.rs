//! Power-series coefficients of `xi_N` at the highest-order exceptional point.
//!
//! For the uniform chain at `g = J`, `eta = 0`, the `(1|N-1)` witness obeys
//! `xi_N = 1 + sum_j c_j (Jt)^{2j} sin^{2(j-1)} phi`. The `c_j` are obtained
//! here by running the numerical pipeline at `phi = pi/2` and fitting a
//! polynomial in `(Jt)^2` without constant term.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::closed_form::xi_from_nu;
use crate::error::{Error, Result};
use crate::pipeline::bkc_ep_nu_minus;

pub const FIT_NODES: usize = 40;
pub const FIT_JT_MIN: f64 = 0.05;
pub const FIT_JT_MAX: f64 = 1.0;
pub const MAX_FIT_RESIDUAL: f64 = 1e-6;
pub const MAX_COEFF_DRIFT: f64 = 1e-4;
/// Chain length used for the cached coefficients.
pub const DEFAULT_MAX_N: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesFit {
    pub n_modes: usize,
    pub phi: f64,
    /// `c_1 .. c_{N-1}` (including the `sin^{2(j-1)} phi` factor).
    pub coefficients: Vec<f64>,
    /// Largest absolute deviation over the nodes.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XiSeries {
    /// `c_1 .. c_{max_n - 1}` from the longest chain.
    pub coefficients: Vec<f64>,
    pub fits: Vec<SeriesFit>,
    /// Largest relative change of a shared coefficient between `N` and `N+1`.
    pub max_drift: f64,
}

pub fn fit_nodes() -> Vec<f64> {
    let step = (FIT_JT_MAX - FIT_JT_MIN) / (FIT_NODES - 1) as f64;
    (0..FIT_NODES).map(|i| FIT_JT_MIN + step * i as f64).collect()
}

/// Least-squares fit of `xi_N(phi, t) - 1` in powers `(Jt)^{2j}`, `j = 1..N-1`.
pub fn fit_xi_series(n_modes: usize, phi: f64) -> Result<SeriesFit> {
    if n_modes < 2 {
        return Err(Error::TooFewModes {
            min: 2,
            got: n_modes,
        });
    }
    let nodes = fit_nodes();
    let xi: Vec<f64> = nodes
        .par_iter()
        .map(|&jt| xi_from_nu(bkc_ep_nu_minus(n_modes, phi, jt)?))
        .collect::<Result<_>>()?;
    let terms = n_modes - 1;
    let design = DMatrix::from_fn(nodes.len(), terms, |r, c| (nodes[r] * nodes[r]).powi(c as i32 + 1));
    let rhs = DVector::from_iterator(nodes.len(), xi.iter().map(|x| x - 1.0));
    let coeffs = design
        .clone()
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::FitFailure(e.to_string()))?;
    let residual = (&design * &coeffs - &rhs).amax();
    if residual > MAX_FIT_RESIDUAL {
        return Err(Error::FitResidualTooLarge {
            residual,
            limit: MAX_FIT_RESIDUAL,
        });
    }
    Ok(SeriesFit {
        n_modes,
        phi,
        coefficients: coeffs.iter().copied().collect(),
        residual,
    })
}

/// Fits `N = 2..=max_n` at `phi = pi/2` and checks that shared coefficients
/// agree between consecutive chain lengths.
pub fn xi_series_coefficients(max_n: usize) -> Result<XiSeries> {
    if max_n < 2 {
        return Err(Error::TooFewModes { min: 2, got: max_n });
    }
    let fits: Vec<SeriesFit> = (2..=max_n)
        .into_par_iter()
        .map(|n| fit_xi_series(n, FRAC_PI_2))
        .collect::<Result<_>>()?;
    let mut max_drift = 0.0f64;
    for pair in fits.windows(2) {
        let (short, long) = (&pair[0], &pair[1]);
        for (idx, (a, b)) in short.coefficients.iter().zip(&long.coefficients).enumerate() {
            let relative = (a - b).abs() / a.abs();
            max_drift = max_drift.max(relative);
            if relative > MAX_COEFF_DRIFT {
                return Err(Error::InconsistentCoefficients {
                    index: idx + 1,
                    n: long.n_modes,
                    relative,
                });
            }
        }
    }
    Ok(XiSeries {
        coefficients: fits.last().unwrap().coefficients.clone(),
        fits,
        max_drift,
    })
}

/// Coefficients fitted once for `N` up to [`DEFAULT_MAX_N`] and cached.
pub fn default_coefficients() -> Result<&'static [f64]> {
    static CACHE: OnceLock<std::result::Result<Vec<f64>, Error>> = OnceLock::new();
    CACHE
        .get_or_init(|| xi_series_coefficients(DEFAULT_MAX_N).map(|s| s.coefficients))
        .as_deref()
        .map_err(Clone::clone)
}
