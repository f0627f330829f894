//! Closed-form witnesses for the two-mode chain, the phase-tuned uniform
//! chain at its exceptional point and the nonuniform three-mode chain.

use std::f64::consts::FRAC_PI_4;

use crate::error::{Error, Result};
use crate::pipeline::bkc_ep_nu_minus;

/// Relative width of the exceptional-point branch in [`xi_two_mode`].
pub const EP_BRANCH_WIDTH: f64 = 1e-8;

/// `nu = sqrt(xi - sqrt(xi^2 - det))`, evaluated without cancellation.
pub fn nu_from_xi_det(xi: f64, det: f64) -> f64 {
    let root = (xi * xi - det).max(0.0).sqrt();
    (det / (xi + root)).sqrt()
}

/// `nu_from_xi_det` for pure states (`det = 1`).
pub fn nu_from_xi(xi: f64) -> f64 {
    nu_from_xi_det(xi, 1.0)
}

/// Inverse of [`nu_from_xi`] on `(0, 1]`: `xi = (nu^2 + nu^-2) / 2`.
pub fn xi_from_nu(nu: f64) -> Result<f64> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::OutOfRange {
            value: nu,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(0.5 * (nu * nu + 1.0 / (nu * nu)))
}

/// `xi(t) = (g^2 - J^2 cos(4ct)) / c^2` with `c = sqrt(g^2 - J^2)`, written
/// as `1 + 8 J^2 t^2 sinc^2(2ct)` so both sides of the exceptional point and
/// the point itself are stable.
pub fn xi_two_mode(g: f64, j: f64, t: f64) -> f64 {
    let c2 = g * g - j * j;
    let base = 8.0 * j * j * t * t;
    if c2.abs() <= EP_BRANCH_WIDTH * j * j {
        // sinc^2(x) = 1 - x^2/3 + ..., x^2 = 4 c^2 t^2
        return 1.0 + base * (1.0 - 4.0 * c2 * t * t / 3.0);
    }
    let x = 2.0 * c2.abs().sqrt() * t;
    let sinc = if x == 0.0 {
        1.0
    } else if c2 > 0.0 {
        x.sin() / x
    } else {
        x.sinh() / x
    };
    1.0 + base * sinc * sinc
}

pub fn nu_closed_form_two_mode(g: f64, j: f64, t: f64) -> f64 {
    nu_from_xi(xi_two_mode(g, j, t))
}

/// `xi_N(phi, t) = 1 + sum_j c_j (Jt)^{2j} sin^{2(j-1)} phi`, `j = 1..N-1`.
pub fn xi_bkc_ep(n_modes: usize, phi: f64, jt: f64, coeffs: &[f64]) -> Result<f64> {
    let needed = n_modes.saturating_sub(1);
    if coeffs.len() < needed {
        return Err(Error::MissingCoefficients {
            needed,
            available: coeffs.len(),
        });
    }
    let x = jt * jt;
    let s2 = phi.sin().powi(2);
    let mut xi = 1.0;
    let mut xpow = 1.0;
    let mut spow = 1.0;
    for &c in &coeffs[..needed] {
        xpow *= x;
        xi += c * xpow * spow;
        spow *= s2;
    }
    Ok(xi)
}

pub fn nu_closed_form_bkc_ep(n_modes: usize, phi: f64, jt: f64, coeffs: &[f64]) -> Result<f64> {
    Ok(nu_from_xi(xi_bkc_ep(n_modes, phi, jt, coeffs)?))
}

/// `32 J^4 t^4 sin^2(varphi) + 16 J^2 t^2 + 1`.
pub fn xi_three_mode_nonuniform(varphi: f64, j: f64, t: f64) -> f64 {
    let x = j * j * t * t;
    32.0 * x * x * varphi.sin().powi(2) + 16.0 * x + 1.0
}

/// Witness of the `13|2` cut on the exceptional surface
/// `g1^2 + g2^2 = J1^2 + J2^2 = 2 J^2`.
pub fn nu_closed_form_three_mode_nonuniform(varphi: f64, j: f64, t: f64) -> f64 {
    nu_from_xi(xi_three_mode_nonuniform(varphi, j, t))
}

/// Hopping strengths on the exceptional surface at angle `varphi` from the
/// exceptional arc (`varphi = pi/4 - atan(g2/g1)`).
pub fn surface_point(varphi: f64, j: f64) -> (f64, f64) {
    let theta = FRAC_PI_4 - varphi;
    let r = std::f64::consts::SQRT_2 * j;
    (r * theta.cos(), r * theta.sin())
}

pub fn varphi_of(g1: f64, g2: f64) -> f64 {
    FRAC_PI_4 - g2.atan2(g1)
}

/// `R(t) = ln nu(pi/2, t) / ln nu(0, t)` for the `N`-mode chain at
/// `g = J`, `eta = 0`, from the full numerical pipeline.
pub fn enhancement_ratio(n_modes: usize, jt: f64) -> Result<f64> {
    let at_zero = bkc_ep_nu_minus(n_modes, 0.0, jt)?.ln();
    if at_zero.abs() <= 1e-12 {
        return Err(Error::DivisionByZeroLog { t: jt });
    }
    let at_half_pi = bkc_ep_nu_minus(n_modes, std::f64::consts::FRAC_PI_2, jt)?.ln();
    Ok(at_half_pi / at_zero)
}
