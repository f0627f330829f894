//! Chain parameterisation and the dynamical matrices built from it.
//!
//! The Hamiltonian of an open chain of `N` bosonic modes is
//!
//! ```text
//! H = sum_j (eta_j/2) a_j^2 + sum_j ( g_j a_j^† a_{j+1} + J_j a_j^† a_{j+1}^† ) + h.c.
//! ```
//!
//! Writing the Heisenberg equations for `Phi = [a_1..a_N, a_1^†..a_N^†]` as
//! `i dPhi/dt = M Phi` gives the BdG matrix `M = [[A, B], [-B*, -A*]]` with
//!
//! * `i da_k/dt = [a_k, H]`, so `A[k][k+1] = g_k`, `A[k+1][k] = g_k*`,
//! * `B[k][k] = eta_k*`, `B[k][k+1] = B[k+1][k] = J_k`.
//!
//! [`quadrature_generator`] rotates `M` into the real quadrature basis
//! `(X_1, P_1, ..., X_N, P_N)` with `X = (a + a^†)/sqrt 2`,
//! `P = -i (a - a^†)/sqrt 2`.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Full parameterisation of an `N`-mode chain.
///
/// Hopping rates are complex (`|g_j| e^{i phi_j}`), pairing rates are real and
/// single-mode squeezing rates are complex, although every shipped experiment
/// uses real `eta`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    n_modes: usize,
    hopping: Vec<Complex64>,
    pairing: Vec<f64>,
    sms: Vec<Complex64>,
}

impl ChainSpec {
    pub fn new(hopping: Vec<Complex64>, pairing: Vec<f64>, sms: Vec<Complex64>) -> Result<Self> {
        let n_modes = sms.len();
        if n_modes == 0 {
            return Err(Error::NonPositiveN(0));
        }
        check_len("hopping", hopping.len(), n_modes - 1)?;
        check_len("pairing", pairing.len(), n_modes - 1)?;
        if hopping.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteParameter { field: "hopping" });
        }
        if pairing.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteParameter { field: "pairing" });
        }
        if sms.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteParameter { field: "sms" });
        }
        Ok(Self {
            n_modes,
            hopping,
            pairing,
            sms,
        })
    }

    /// Uniform chain: every bond has hopping `g e^{i phi}` and pairing `j`,
    /// every site has single-mode squeezing `eta`.
    pub fn uniform(n_modes: usize, g: f64, j: f64, eta: f64, phi: f64) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::NonPositiveN(0));
        }
        let bonds = n_modes - 1;
        Self::new(
            vec![Complex64::from_polar(g, phi); bonds],
            vec![j; bonds],
            vec![Complex64::new(eta, 0.0); n_modes],
        )
    }

    /// Three-mode chain with independent bond strengths and no phase or SMS.
    pub fn three_mode(g1: f64, g2: f64, j1: f64, j2: f64) -> Result<Self> {
        Self::new(
            vec![Complex64::new(g1, 0.0), Complex64::new(g2, 0.0)],
            vec![j1, j2],
            vec![Complex64::new(0.0, 0.0); 3],
        )
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn hopping(&self) -> &[Complex64] {
        &self.hopping
    }

    pub fn pairing(&self) -> &[f64] {
        &self.pairing
    }

    pub fn sms(&self) -> &[Complex64] {
        &self.sms
    }
}

fn check_len(field: &'static str, got: usize, expected: usize) -> Result<()> {
    if got == expected {
        Ok(())
    } else {
        Err(Error::LengthMismatch {
            field,
            expected,
            got,
        })
    }
}

/// A JSON value that is either a scalar broadcast over all bonds/sites or an
/// explicit per-bond/per-site array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarOrSeq {
    Scalar(f64),
    Seq(Vec<f64>),
}

impl ScalarOrSeq {
    pub(crate) fn expand(&self, field: &'static str, len: usize) -> Result<Vec<f64>> {
        let values = match self {
            ScalarOrSeq::Scalar(x) => vec![*x; len],
            ScalarOrSeq::Seq(v) => {
                check_len(field, v.len(), len)?;
                v.clone()
            }
        };
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteParameter { field });
        }
        Ok(values)
    }
}

impl From<f64> for ScalarOrSeq {
    fn from(x: f64) -> Self {
        ScalarOrSeq::Scalar(x)
    }
}

impl From<Vec<f64>> for ScalarOrSeq {
    fn from(v: Vec<f64>) -> Self {
        ScalarOrSeq::Seq(v)
    }
}

fn zero() -> ScalarOrSeq {
    ScalarOrSeq::Scalar(0.0)
}

/// The on-disk chain document:
/// `{"n": int, "g": number|array, "phi": number|array, "J": number|array, "eta": number|array}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub n: i64,
    #[serde(default = "zero")]
    pub g: ScalarOrSeq,
    #[serde(default = "zero")]
    pub phi: ScalarOrSeq,
    #[serde(rename = "J", default = "zero")]
    pub j: ScalarOrSeq,
    #[serde(default = "zero")]
    pub eta: ScalarOrSeq,
}

impl ChainConfig {
    pub fn uniform(n: i64, g: f64, j: f64, eta: f64, phi: f64) -> Self {
        Self {
            n,
            g: g.into(),
            phi: phi.into(),
            j: j.into(),
            eta: eta.into(),
        }
    }
}

/// Validates a chain document and expands broadcast scalars.
pub fn build_chain_spec(config: &ChainConfig) -> Result<ChainSpec> {
    if config.n < 1 {
        return Err(Error::NonPositiveN(config.n));
    }
    let n = config.n as usize;
    let bonds = n - 1;
    let g = config.g.expand("g", bonds)?;
    let phi = config.phi.expand("phi", bonds)?;
    let j = config.j.expand("J", bonds)?;
    let eta = config.eta.expand("eta", n)?;
    let hopping = g
        .iter()
        .zip(&phi)
        .map(|(&mag, &ph)| Complex64::from_polar(mag, ph))
        .collect();
    ChainSpec::new(
        hopping,
        j,
        eta.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
    )
}

/// The `2N x 2N` BdG dynamical matrix `M` in the `[a, a^†]` ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct BdgMatrix {
    n_modes: usize,
    data: DMatrix<Complex64>,
}

impl BdgMatrix {
    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn size(&self) -> usize {
        2 * self.n_modes
    }

    pub fn data(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    /// Upper-left block `A` (Hermitian).
    pub fn a_block(&self) -> DMatrix<Complex64> {
        let n = self.n_modes;
        self.data.view((0, 0), (n, n)).into_owned()
    }

    /// Upper-right block `B` (symmetric).
    pub fn b_block(&self) -> DMatrix<Complex64> {
        let n = self.n_modes;
        self.data.view((0, n), (n, n)).into_owned()
    }

    /// Largest entry of `|Sx M Sx + M*|`, where `Sx` swaps the two halves.
    pub fn particle_hole_residual(&self) -> f64 {
        let n = self.n_modes;
        let size = self.size();
        let mut worst = 0.0f64;
        for r in 0..size {
            for c in 0..size {
                let swapped = self.data[((r + n) % size, (c + n) % size)];
                worst = worst.max((swapped + self.data[(r, c)].conj()).norm());
            }
        }
        worst
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.norm()
    }

    /// Wraps an arbitrary matrix without checking the BdG block structure.
    pub fn from_raw(data: DMatrix<Complex64>) -> Result<Self> {
        if data.nrows() != data.ncols() || !data.nrows().is_multiple_of(2) || data.nrows() == 0 {
            return Err(Error::DimensionMismatch {
                expected: 2 * (data.nrows() / 2).max(1),
                got: data.ncols(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteParameter { field: "matrix" });
        }
        Ok(Self {
            n_modes: data.nrows() / 2,
            data,
        })
    }
}

/// Builds `M` from the Heisenberg equations of the chain Hamiltonian.
pub fn build_bdg_matrix(spec: &ChainSpec) -> BdgMatrix {
    let n = spec.n_modes;
    let mut a = DMatrix::<Complex64>::zeros(n, n);
    let mut b = DMatrix::<Complex64>::zeros(n, n);
    for (k, (&g, &j)) in spec.hopping.iter().zip(&spec.pairing).enumerate() {
        a[(k, k + 1)] = g;
        a[(k + 1, k)] = g.conj();
        b[(k, k + 1)] = Complex64::new(j, 0.0);
        b[(k + 1, k)] = Complex64::new(j, 0.0);
    }
    for (k, &eta) in spec.sms.iter().enumerate() {
        b[(k, k)] = eta.conj();
    }
    let mut data = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
    data.view_mut((0, 0), (n, n)).copy_from(&a);
    data.view_mut((0, n), (n, n)).copy_from(&b);
    data.view_mut((n, 0), (n, n)).copy_from(&(-b.conjugate()));
    data.view_mut((n, n), (n, n)).copy_from(&(-a.conjugate()));
    BdgMatrix { n_modes: n, data }
}

/// Real `2N x 2N` generator `K` with `d beta/dt = K beta` in the quadrature
/// ordering `(X_1, P_1, ..., X_N, P_N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealGenerator {
    n_modes: usize,
    data: DMatrix<f64>,
}

impl RealGenerator {
    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn size(&self) -> usize {
        2 * self.n_modes
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    /// Largest entry of `K Omega + Omega K^T`; zero for a Hamiltonian matrix.
    pub fn hamiltonian_residual(&self) -> f64 {
        let omega = symplectic_form(self.n_modes);
        let r = &self.data * &omega + &omega * self.data.transpose();
        r.amax()
    }

    pub fn from_raw(data: DMatrix<f64>) -> Result<Self> {
        if data.nrows() != data.ncols() || !data.nrows().is_multiple_of(2) || data.nrows() == 0 {
            return Err(Error::DimensionMismatch {
                expected: 2 * (data.nrows() / 2).max(1),
                got: data.ncols(),
            });
        }
        Ok(Self {
            n_modes: data.nrows() / 2,
            data,
        })
    }
}

/// `Omega = direct sum of [[0, 1], [-1, 0]]` over the modes.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Unitary map from `[a, a^†]` to interleaved `(X, P)` quadratures.
fn quadrature_basis(n: usize) -> DMatrix<Complex64> {
    let s = FRAC_1_SQRT_2;
    let mut t = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
    for k in 0..n {
        t[(2 * k, k)] = Complex64::new(s, 0.0);
        t[(2 * k, n + k)] = Complex64::new(s, 0.0);
        t[(2 * k + 1, k)] = Complex64::new(0.0, -s);
        t[(2 * k + 1, n + k)] = Complex64::new(0.0, s);
    }
    t
}

/// `K = T (-i M) T^†`, checked to be real.
pub fn quadrature_generator(m: &BdgMatrix) -> Result<RealGenerator> {
    let n = m.n_modes;
    let t = quadrature_basis(n);
    let minus_i = Complex64::new(0.0, -1.0);
    let k = &t * m.data.map(|z| z * minus_i) * t.adjoint();
    let scale = k.norm().max(f64::MIN_POSITIVE);
    let residual = k.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if residual > 1e-12 * scale.max(1.0) {
        return Err(Error::ImaginaryResidual { residual });
    }
    Ok(RealGenerator {
        n_modes: n,
        data: k.map(|z| z.re),
    })
}

/// Convenience: spec -> `K`.
pub fn generator_for(spec: &ChainSpec) -> Result<RealGenerator> {
    quadrature_generator(&build_bdg_matrix(spec))
}
