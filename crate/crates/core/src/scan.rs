//! Parameter scans: exceptional points along a line and the exceptional
//! surface of the three-mode chain.

use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{build_bdg_matrix, ChainSpec};
use crate::error::{Error, Result};
use crate::jordan::detect_eps;
use crate::spectrum::{eigenspectrum, signature_scaled, SpectralSignature, DEFAULT_REGION_TOL};

/// `steps` evenly spaced values from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let h = (stop - start) / (steps - 1) as f64;
            (0..steps)
                .map(|i| if i == steps - 1 { stop } else { start + h * i as f64 })
                .collect()
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LocateOptions {
    /// Number of scan cells before bisection.
    pub grid: usize,
    pub region_tol: f64,
}

impl Default for LocateOptions {
    fn default() -> Self {
        Self {
            grid: 400,
            region_tol: DEFAULT_REGION_TOL,
        }
    }
}

fn signature_at<F>(family: &F, p: f64, tol: f64) -> Result<SpectralSignature>
where
    F: Fn(f64) -> Result<ChainSpec>,
{
    let m = build_bdg_matrix(&family(p)?);
    Ok(signature_scaled(&eigenspectrum(&m)?, tol, m.norm()))
}

/// Parameter values in `[lo, hi]` where the spectral signature changes,
/// refined by bisection to `tol`.
///
/// Keying on the signature rather than the three-way region label also finds
/// the interior exceptional points of longer chains, where only the number
/// of real eigenvalues changes.
pub fn locate_ep_1d<F>(family: F, lo: f64, hi: f64, tol: f64) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<ChainSpec> + Sync,
{
    locate_ep_1d_with(family, lo, hi, tol, LocateOptions::default())
}

pub fn locate_ep_1d_with<F>(
    family: F,
    lo: f64,
    hi: f64,
    tol: f64,
    opts: LocateOptions,
) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<ChainSpec> + Sync,
{
    let grid = linspace(lo, hi, opts.grid.max(1) + 1);
    let sigs: Vec<SpectralSignature> = grid
        .par_iter()
        .map(|&p| signature_at(&family, p, opts.region_tol))
        .collect::<Result<_>>()?;

    let mut found: Vec<f64> = Vec::new();
    for i in 0..grid.len() - 1 {
        if sigs[i] == sigs[i + 1] {
            continue;
        }
        let (mut a, mut b) = (grid[i], grid[i + 1]);
        let left = sigs[i];
        while b - a > tol {
            let mid = 0.5 * (a + b);
            if signature_at(&family, mid, opts.region_tol)? == left {
                a = mid;
            } else {
                b = mid;
            }
        }
        found.push(0.5 * (a + b));
    }
    if found.is_empty() {
        return Err(Error::NoTransition { lo, hi });
    }
    // a grid node sitting on an EP yields the same point from both sides
    let merge = 0.5 * (hi - lo) / opts.grid.max(1) as f64;
    found.dedup_by(|next, prev| (*next - *prev).abs() <= merge);
    Ok(found)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SurfaceKind {
    /// Off the surface `g1^2 + g2^2 = J1^2 + J2^2`.
    Off,
    /// On the surface with 2-fold third-order EPs.
    Surface,
    /// On the exceptional arc `g1 = J1, g2 = J2` (2-fold second-order EPs).
    Arc,
    /// Satisfies the condition but no EP was resolved.
    OnSurfaceNoEp,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfacePoint {
    pub g1: f64,
    pub g2: f64,
    pub j1: f64,
    pub j2: f64,
    pub residual: f64,
    pub on_surface: bool,
    /// Largest Jordan block over all EPs, 0 when none.
    pub ep_order: usize,
    /// Blocks of the highest-order EP.
    pub block_sizes: Vec<usize>,
    pub kind: SurfaceKind,
}

/// `|g1^2 + g2^2 - J1^2 - J2^2|`.
pub fn surface_residual(g1: f64, g2: f64, j1: f64, j2: f64) -> f64 {
    (g1 * g1 + g2 * g2 - j1 * j1 - j2 * j2).abs()
}

#[derive(Debug, Clone, Copy)]
pub struct SurfaceScanOptions {
    /// Residual below which a point counts as on the surface.
    pub tol: f64,
    pub cluster_tol: f64,
    pub rank_tol: f64,
}

impl Default for SurfaceScanOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            cluster_tol: crate::jordan::DEFAULT_CLUSTER_TOL,
            rank_tol: crate::jordan::DEFAULT_RANK_TOL,
        }
    }
}

/// Classifies one point of the three-mode parameter space `(g1, g2, J1, J2)`.
pub fn classify_surface_point(p: [f64; 4], opts: &SurfaceScanOptions) -> Result<SurfacePoint> {
    let [g1, g2, j1, j2] = p;
    let residual = surface_residual(g1, g2, j1, j2);
    let on_surface = residual <= opts.tol;
    let mut point = SurfacePoint {
        g1,
        g2,
        j1,
        j2,
        residual,
        on_surface,
        ep_order: 0,
        block_sizes: Vec::new(),
        kind: SurfaceKind::Off,
    };
    if !on_surface {
        return Ok(point);
    }
    let m = build_bdg_matrix(&ChainSpec::three_mode(g1, g2, j1, j2)?);
    let eps = detect_eps(&m, opts.cluster_tol, opts.rank_tol)?;
    if let Some(top) = eps.iter().max_by_key(|e| e.order) {
        point.ep_order = top.order;
        point.block_sizes = top.jordan_blocks.clone();
    }
    point.kind = match point.ep_order {
        0 | 1 => SurfaceKind::OnSurfaceNoEp,
        2 => SurfaceKind::Arc,
        _ => SurfaceKind::Surface,
    };
    Ok(point)
}

/// Evaluates every point (in parallel), returning results in input order.
pub fn scan_exceptional_surface(
    points: &[[f64; 4]],
    opts: &SurfaceScanOptions,
) -> Result<Vec<SurfacePoint>> {
    points
        .par_iter()
        .map(|&p| classify_surface_point(p, opts))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(0.0, 1.0, 1), vec![0.0]);
        let v = linspace(0.5, 1.5, 5);
        assert_eq!(v, vec![0.5, 0.75, 1.0, 1.25, 1.5]);
    }

    #[test]
    fn two_mode_split_eps() {
        let eps = locate_ep_1d(|g| ChainSpec::uniform(2, g, 1.0, 0.2, 0.0), 0.5, 1.5, 1e-9).unwrap();
        assert_eq!(eps.len(), 2, "{eps:?}");
        assert!((eps[0] - 0.8).abs() < 1e-6);
        assert!((eps[1] - 1.2).abs() < 1e-6);
    }

    #[test]
    fn two_mode_degenerate_ep() {
        let eps = locate_ep_1d(|g| ChainSpec::uniform(2, g, 1.0, 0.0, 0.0), 0.5, 1.5, 1e-9).unwrap();
        assert_eq!(eps.len(), 1);
        assert!((eps[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn uniform_interval_has_no_transition() {
        let r = locate_ep_1d(|g| ChainSpec::uniform(2, g, 1.0, 0.2, 0.0), 1.5, 2.5, 1e-9);
        assert!(matches!(r, Err(Error::NoTransition { .. })));
    }

    #[test]
    fn surface_examples() {
        let opts = SurfaceScanOptions::default();
        let arc = classify_surface_point([1.0, 1.0, 1.0, 1.0], &opts).unwrap();
        assert_eq!(arc.kind, SurfaceKind::Arc);
        assert_eq!(arc.block_sizes, vec![1, 1, 2, 2]);

        let s = classify_surface_point([2f64.sqrt(), 0.0, 1.0, 1.0], &opts);
        // 2 - 2 in floating point is not exactly zero
        let s = s.unwrap();
        assert!(s.on_surface);
        assert_eq!(s.kind, SurfaceKind::Surface);
        assert_eq!(s.block_sizes, vec![3, 3]);

        let off = classify_surface_point([1.0, 1.0, 0.5, 0.5], &opts).unwrap();
        assert!(!off.on_surface);
        assert_eq!(off.kind, SurfaceKind::Off);
        assert!((off.residual - 1.5).abs() < 1e-15);
    }
}
