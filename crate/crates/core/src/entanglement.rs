//! PPT entanglement witnesses for Gaussian states.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::symplectic_form;
use crate::dynamics::GaussianState;
use crate::error::{Error, Result};

/// Split of the modes into two non-empty sides. Modes are 0-based
/// internally; the text form uses 1-based labels (`"13|2"`, or
/// `"1,10|2,3,..."` for chains longer than nine modes).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bipartition {
    n_modes: usize,
    side_a: BTreeSet<usize>,
    side_b: BTreeSet<usize>,
}

impl Bipartition {
    pub fn new(n_modes: usize, side_a: impl IntoIterator<Item = usize>) -> Result<Self> {
        let side_a: BTreeSet<usize> = side_a.into_iter().collect();
        if let Some(&bad) = side_a.iter().find(|&&m| m >= n_modes) {
            return Err(Error::InvalidBipartition(format!(
                "mode {} out of range for {n_modes} modes",
                bad + 1
            )));
        }
        let side_b: BTreeSet<usize> = (0..n_modes).filter(|m| !side_a.contains(m)).collect();
        if side_a.is_empty() || side_b.is_empty() {
            return Err(Error::InvalidBipartition(
                "both sides must be non-empty".into(),
            ));
        }
        Ok(Self {
            n_modes,
            side_a,
            side_b,
        })
    }

    /// The `(1|N-1)` cut: first mode against the rest.
    pub fn first_vs_rest(n_modes: usize) -> Result<Self> {
        Self::new(n_modes, [0])
    }

    /// Parses `"13|2"` style labels for a chain of `n_modes`.
    pub fn parse(text: &str, n_modes: usize) -> Result<Self> {
        let (a, b) = text
            .split_once('|')
            .ok_or_else(|| Error::InvalidBipartition(format!("missing '|' in {text:?}")))?;
        let side = |s: &str| -> Result<BTreeSet<usize>> {
            let s = s.trim();
            let labels: Vec<&str> = if s.contains(',') {
                s.split(',').map(str::trim).collect()
            } else {
                s.split("").filter(|c| !c.is_empty()).collect()
            };
            labels
                .into_iter()
                .map(|l| {
                    let k: usize = l
                        .parse()
                        .map_err(|_| Error::InvalidBipartition(format!("bad mode label {l:?}")))?;
                    if k == 0 || k > n_modes {
                        return Err(Error::InvalidBipartition(format!(
                            "mode {k} out of range for {n_modes} modes"
                        )));
                    }
                    Ok(k - 1)
                })
                .collect()
        };
        let side_a = side(a)?;
        let side_b = side(b)?;
        if !side_a.is_disjoint(&side_b) || side_a.len() + side_b.len() != n_modes {
            return Err(Error::InvalidBipartition(format!(
                "{text:?} is not a partition of {n_modes} modes"
            )));
        }
        Self::new(n_modes, side_a)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn side_a(&self) -> &BTreeSet<usize> {
        &self.side_a
    }

    pub fn side_b(&self) -> &BTreeSet<usize> {
        &self.side_b
    }

    /// Diagonal of `Theta`: `-1` on the momenta of side B.
    pub fn theta(&self) -> Vec<f64> {
        let mut d = vec![1.0; 2 * self.n_modes];
        for &m in &self.side_b {
            d[2 * m + 1] = -1.0;
        }
        d
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.n_modes > 9 { "," } else { "" };
        let join = |s: &BTreeSet<usize>| {
            s.iter()
                .map(|m| (m + 1).to_string())
                .collect::<Vec<_>>()
                .join(sep)
        };
        write!(f, "{}|{}", join(&self.side_a), join(&self.side_b))
    }
}

impl Serialize for Bipartition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A partition label whose mode count is known only once a chain is chosen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PartitionLabel(pub String);

impl PartitionLabel {
    pub fn resolve(&self, n_modes: usize) -> Result<Bipartition> {
        Bipartition::parse(&self.0, n_modes)
    }
}

impl FromStr for PartitionLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.split_once('|').is_none() {
            return Err(Error::InvalidBipartition(format!("missing '|' in {s:?}")));
        }
        Ok(PartitionLabel(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementResult {
    /// Ascending symplectic eigenvalues of the partially transposed covariance.
    pub symplectic_eigenvalues_pt: Vec<f64>,
    pub nu_minus: f64,
    pub log_negativity: f64,
}

/// `Theta sigma Theta`.
pub fn partial_transpose(state: &GaussianState, part: &Bipartition) -> Result<DMatrix<f64>> {
    if part.n_modes() != state.n_modes() {
        return Err(Error::InvalidBipartition(format!(
            "partition over {} modes applied to a {}-mode state",
            part.n_modes(),
            state.n_modes()
        )));
    }
    let theta = part.theta();
    let cm = state.cm();
    Ok(DMatrix::from_fn(cm.nrows(), cm.ncols(), |r, c| {
        theta[r] * cm[(r, c)] * theta[c]
    }))
}

/// Symplectic eigenvalues of a symmetric `2N x 2N` matrix, ascending.
///
/// For positive definite input `sigma = L L^T`, `i Omega sigma` is similar to
/// the Hermitian matrix `i L^T Omega L`, whose eigenvalues are `+-nu_k`.
/// Other input falls back to a general eigensolve of `i Omega sigma`.
pub fn symplectic_eigenvalues(sigma: &DMatrix<f64>) -> Result<Vec<f64>> {
    let size = sigma.nrows();
    if !sigma.is_square() || !size.is_multiple_of(2) || size == 0 {
        return Err(Error::DimensionMismatch {
            expected: 2 * (size / 2).max(1),
            got: sigma.ncols(),
        });
    }
    let scale = sigma.amax().max(1.0);
    let asymmetry = (sigma - sigma.transpose()).amax();
    if asymmetry > 1e-12 * scale {
        return Err(Error::AsymmetricInput { asymmetry });
    }
    let omega = symplectic_form(size / 2);
    let moduli: Vec<f64> = match sigma.clone().cholesky() {
        Some(chol) => return factor_symplectic_eigenvalues(&chol.l()),
        None => {
            let m = (&omega * sigma).map(|x| Complex64::new(0.0, x));
            nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 1000 * size)
                .and_then(|s| s.eigenvalues())
                .ok_or(Error::EigensolverFailure("complex Schur"))?
                .iter()
                .map(|z| z.norm())
                .collect()
        }
    };
    Ok(pair_moduli(moduli))
}

fn pair_moduli(mut moduli: Vec<f64>) -> Vec<f64> {
    moduli.sort_by(f64::total_cmp);
    moduli.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

/// Symplectic eigenvalues of `L L^T` from the factor `L`, ascending: the
/// moduli of the eigenvalues of the Hermitian matrix `i L^T Omega L`.
pub fn factor_symplectic_eigenvalues(l: &DMatrix<f64>) -> Result<Vec<f64>> {
    let size = l.nrows();
    if !l.is_square() || !size.is_multiple_of(2) || size == 0 {
        return Err(Error::DimensionMismatch {
            expected: 2 * (size / 2).max(1),
            got: l.ncols(),
        });
    }
    let omega = symplectic_form(size / 2);
    let a = l.transpose() * &omega * l;
    let h = a.map(|x| Complex64::new(0.0, x));
    let moduli = SymmetricEigen::try_new(h, f64::EPSILON, 0)
        .ok_or(Error::EigensolverFailure("Hermitian eigen"))?
        .eigenvalues
        .iter()
        .map(|x| x.abs())
        .collect();
    Ok(pair_moduli(moduli))
}

/// Witnesses of the pure state `sigma = S S^T`, with `S` symplectic (the
/// vacuum carried by `S`).
///
/// The partially transposed spectrum of a pure state consists of pairs
/// `(nu, 1/nu)` and ones. Values below one are taken as reciprocals of the
/// values above one, which are resolved to relative precision even when
/// `nu_minus` is far below `eps |sigma|`.
pub fn pure_state_entanglement(s: &DMatrix<f64>, part: &Bipartition) -> Result<EntanglementResult> {
    if s.nrows() != 2 * part.n_modes() {
        return Err(Error::InvalidBipartition(format!(
            "partition over {} modes applied to a {}-mode state",
            part.n_modes(),
            s.nrows() / 2
        )));
    }
    let theta = part.theta();
    let l = DMatrix::from_fn(s.nrows(), s.ncols(), |r, c| theta[r] * s[(r, c)]);
    let mut values = factor_symplectic_eigenvalues(&l)?;
    let n = values.len();
    let above = values.iter().filter(|&&v| v > 1.0).count().min(n / 2);
    let mut log_negativity = 0.0;
    for k in 0..above {
        let big = values[n - 1 - k];
        values[k] = 1.0 / big;
        log_negativity += big.ln();
    }
    Ok(EntanglementResult {
        nu_minus: values[0],
        log_negativity,
        symplectic_eigenvalues_pt: values,
    })
}

/// `-sum ln nu` over the values below one.
pub fn log_negativity_from(values: &[f64]) -> f64 {
    values
        .iter()
        .filter(|&&v| v < 1.0)
        .map(|v| -v.ln())
        .sum()
}

pub fn entanglement(state: &GaussianState, part: &Bipartition) -> Result<EntanglementResult> {
    let pt = partial_transpose(state, part)?;
    let values = symplectic_eigenvalues(&pt)?;
    Ok(EntanglementResult {
        nu_minus: values[0],
        log_negativity: log_negativity_from(&values),
        symplectic_eigenvalues_pt: values,
    })
}

pub fn nu_minus(state: &GaussianState, part: &Bipartition) -> Result<f64> {
    Ok(entanglement(state, part)?.nu_minus)
}

pub fn log_negativity(state: &GaussianState, part: &Bipartition) -> Result<f64> {
    Ok(entanglement(state, part)?.log_negativity)
}
