//! Non-Hermitian spectrum of `M` and its region labels.

use std::cmp::Ordering;
use std::fmt;

use nalgebra::linalg::Schur;
use nalgebra::{DMatrix, DVector, Dyn};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::{quadrature_generator, BdgMatrix};
use crate::error::{Error, Result};

/// Default relative classification threshold.
pub const DEFAULT_REGION_TOL: f64 = 1e-9;
/// Absolute floor below which a component always counts as zero.
pub const ABS_FLOOR: f64 = 1e-12;

/// Spectral regions of the dynamical matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    /// Region I: exponential growth of correlations.
    PurelyImaginary,
    /// Region II: oscillatory dynamics.
    PurelyReal,
    /// Region III: both kinds coexist.
    Mixed,
}

impl Region {
    pub fn label(self) -> &'static str {
        match self {
            Region::PurelyImaginary => "I",
            Region::PurelyReal => "II",
            Region::Mixed => "III",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Region::PurelyImaginary => "PurelyImaginary",
            Region::PurelyReal => "PurelyReal",
            Region::Mixed => "Mixed",
        };
        f.write_str(name)
    }
}

/// Eigenvalues with their region classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<Complex64>,
    pub region: Region,
    pub tolerance: f64,
    /// Set when the label changes if the tolerance is scaled by 10 either way.
    pub boundary: bool,
}

/// Counts of eigenvalues on each axis. Finer than [`Region`]: interior
/// exceptional points of long chains change the signature but not the region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpectralSignature {
    pub real: usize,
    pub imaginary: usize,
    pub zero: usize,
    pub complex: usize,
}

fn cmp_complex(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// All `2N` eigenvalues of `M`, sorted by `(re, im)`.
///
/// BdG matrices are diagonalised through the real generator `K = -i M` (in
/// the quadrature basis) with a real Schur decomposition, so the pairing
/// `lambda <-> -conj(lambda)` is exact. Anything else goes through a complex
/// Schur decomposition.
/// Real Schur form of `k`. Francis iteration without exceptional shifts can
/// stall on decoupled, defective generators; in that case the iteration is
/// rerun on an orthogonally similar matrix `Q k Q` (fixed Householder `Q`).
fn real_schur(k: &DMatrix<f64>, max_iter: usize) -> Result<Schur<f64, Dyn>> {
    if let Some(s) = Schur::try_new(k.clone(), f64::EPSILON, max_iter) {
        return Ok(s);
    }
    let n = k.nrows();
    let v = DVector::from_fn(n, |i, _| 1.0 + 0.37 * i as f64);
    let v = &v / v.norm();
    let q = DMatrix::identity(n, n) - &v * v.transpose() * 2.0;
    Schur::try_new(&q * k * &q, f64::EPSILON, max_iter).ok_or(Error::EigensolverFailure("real Schur"))
}

pub fn eigenspectrum(m: &BdgMatrix) -> Result<Vec<Complex64>> {
    let size = m.size();
    let max_iter = 1000 * size;
    let mut eig: Vec<Complex64> = match quadrature_generator(m) {
        Ok(k) => {
            let schur = real_schur(k.data(), max_iter)?;
            let i = Complex64::new(0.0, 1.0);
            schur.complex_eigenvalues().iter().map(|&z| i * z).collect()
        }
        Err(Error::ImaginaryResidual { .. }) => {
            let schur = Schur::try_new(m.data().clone(), f64::EPSILON, max_iter)
                .ok_or(Error::EigensolverFailure("complex Schur"))?;
            schur
                .eigenvalues()
                .ok_or(Error::EigensolverFailure("complex Schur"))?
                .iter()
                .copied()
                .collect()
        }
        Err(e) => return Err(e),
    };
    if eig.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::EigensolverFailure("non-finite eigenvalue"));
    }
    eig.sort_by(cmp_complex);
    Ok(eig)
}

fn threshold(spectrum: &[Complex64], tol: f64) -> f64 {
    let scale = spectrum.iter().map(|z| z.norm()).fold(0.0, f64::max);
    (tol * scale).max(ABS_FLOOR)
}

/// Counts eigenvalues on the real axis, imaginary axis, at zero and off-axis.
pub fn signature(spectrum: &[Complex64], tol: f64) -> SpectralSignature {
    signature_with_threshold(spectrum, threshold(spectrum, tol))
}

/// As [`signature`], with the threshold `max(tol * scale, 1e-12)` taken
/// relative to a caller-supplied scale such as a matrix norm.
///
/// Near a high-order EP the whole spectrum collapses, so a threshold tied to
/// the spectral radius shrinks below the rounding error of eigenvalues that
/// are exactly zero.
pub fn signature_scaled(spectrum: &[Complex64], tol: f64, scale: f64) -> SpectralSignature {
    signature_with_threshold(spectrum, (tol * scale).max(ABS_FLOOR))
}

fn signature_with_threshold(spectrum: &[Complex64], thr: f64) -> SpectralSignature {
    let mut sig = SpectralSignature {
        real: 0,
        imaginary: 0,
        zero: 0,
        complex: 0,
    };
    for z in spectrum {
        match (z.im.abs() <= thr, z.re.abs() <= thr) {
            (true, true) => sig.zero += 1,
            (true, false) => sig.real += 1,
            (false, true) => sig.imaginary += 1,
            (false, false) => sig.complex += 1,
        }
    }
    sig
}

impl SpectralSignature {
    /// Zero eigenvalues count as both real and imaginary. An all-zero
    /// spectrum is labelled `PurelyImaginary`.
    pub fn region(&self) -> Region {
        if self.real == 0 && self.complex == 0 {
            Region::PurelyImaginary
        } else if self.imaginary == 0 && self.complex == 0 {
            Region::PurelyReal
        } else {
            Region::Mixed
        }
    }
}

/// Region label with threshold `max(tol * max|lambda|, 1e-12)`.
pub fn classify_region(spectrum: &[Complex64], tol: f64) -> Region {
    signature(spectrum, tol).region()
}

pub fn spectrum_report(m: &BdgMatrix, tol: f64) -> Result<SpectrumReport> {
    let eigenvalues = eigenspectrum(m)?;
    let region = classify_region(&eigenvalues, tol);
    let boundary = classify_region(&eigenvalues, tol * 10.0) != region
        || classify_region(&eigenvalues, tol / 10.0) != region;
    Ok(SpectrumReport {
        eigenvalues,
        region,
        tolerance: tol,
        boundary,
    })
}

/// Largest distance between an eigenvalue and the nearest `-conj` partner.
pub fn pairing_defect(spectrum: &[Complex64]) -> f64 {
    spectrum
        .iter()
        .map(|z| {
            let partner = -z.conj();
            spectrum
                .iter()
                .map(|w| (w - partner).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}
