//! Jordan structure of `M` at an eigenvalue and exceptional-point detection.
//!
//! Block sizes follow from the rank sequence `r_k = rank((M - lambda I)^k)`:
//! the number of blocks of size at least `k` is `r_{k-1} - r_k`. Ranks are
//! read off singular values with the threshold `rank_tol * s^k`, where `s` is
//! the largest singular value of `M - lambda I` (so `s^k` bounds the largest
//! singular value of the `k`-th power).

use nalgebra::{DMatrix, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::BdgMatrix;
use crate::error::{Error, Result};
use crate::spectrum::eigenspectrum;

pub const DEFAULT_RANK_TOL: f64 = 1e-8;
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-7;

/// A group of coalesced eigenvalues with its Jordan blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpCluster {
    pub center: Complex64,
    pub algebraic_multiplicity: usize,
    /// Ascending block sizes, e.g. `[2, 2]` for a 2-fold EP2.
    pub jordan_blocks: Vec<usize>,
    pub order: usize,
}

impl EpCluster {
    pub fn geometric_multiplicity(&self) -> usize {
        self.jordan_blocks.len()
    }

    /// Number of blocks of maximal size (the `X` in "X-fold EP_n").
    pub fn fold(&self) -> usize {
        self.jordan_blocks.iter().filter(|&&b| b == self.order).count()
    }
}

fn singular_values(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let svd = SVD::try_new(m.clone(), false, false, f64::EPSILON, 0)
        .ok_or(Error::EigensolverFailure("SVD"))?;
    Ok(svd.singular_values.iter().copied().collect())
}

/// Jordan block sizes of `m` at `lambda`, ascending. Empty when `lambda` is
/// not an eigenvalue at this tolerance.
pub fn jordan_structure(m: &BdgMatrix, lambda: Complex64, rank_tol: f64) -> Result<Vec<usize>> {
    let size = m.size();
    let shifted = m.data() - DMatrix::<Complex64>::identity(size, size) * lambda;
    let sv = singular_values(&shifted)?;
    let s_ref = sv.iter().copied().fold(0.0, f64::max);
    if s_ref == 0.0 {
        return Ok(vec![1; size]);
    }

    let mut ranks = vec![size];
    let mut power = shifted.clone();
    for k in 1..=size {
        let sv = if k == 1 { sv.clone() } else { singular_values(&power)? };
        let thr = rank_tol * s_ref.powi(k as i32);
        if let Some(&s) = sv.iter().find(|&&s| s > thr / 10.0 && s < thr * 10.0) {
            return Err(Error::RankAmbiguity {
                threshold: thr,
                singular_value: s,
            });
        }
        let rank = sv.iter().filter(|&&s| s > thr).count();
        let prev = *ranks.last().unwrap();
        ranks.push(rank);
        if rank == prev || rank == 0 {
            break;
        }
        power = &power * &shifted;
    }

    // at_least[k-1] = number of blocks with size >= k
    let at_least: Vec<usize> = ranks.windows(2).map(|w| w[0] - w[1]).collect();
    let mut blocks = Vec::new();
    for (i, &count) in at_least.iter().enumerate() {
        let next = at_least.get(i + 1).copied().unwrap_or(0);
        blocks.extend(std::iter::repeat_n(i + 1, count - next));
    }
    blocks.sort_unstable();
    Ok(blocks)
}

/// Single-linkage components of `indices` under distance `radius`.
fn components(eig: &[Complex64], indices: &[usize], radius: f64) -> Vec<Vec<usize>> {
    let n = indices.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for a in 0..n {
        for b in a + 1..n {
            if (eig[indices[a]] - eig[indices[b]]).norm() <= radius {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[rb] = ra;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = vec![usize::MAX; n];
    for a in 0..n {
        let r = find(&mut parent, a);
        if root_slot[r] == usize::MAX {
            root_slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_slot[r]].push(indices[a]);
    }
    groups
}

/// Finds all exceptional points of `m`.
///
/// Eigenvalues near an order-`k` EP are only resolved to about
/// `eps^(1/k)`, so clustering starts from the radius
/// `scale * (64 eps)^(1/2N)` and a cluster is accepted once the rank test at
/// its mean accounts for every member. Clusters that fail are re-split with a
/// ten times smaller radius, down to `cluster_tol * max(1, |M|_F)`.
pub fn detect_eps(m: &BdgMatrix, cluster_tol: f64, rank_tol: f64) -> Result<Vec<EpCluster>> {
    let eig = eigenspectrum(m)?;
    let size = eig.len();
    let scale = m.norm().max(1.0);
    let tight = cluster_tol * scale;
    let loose = (scale * (64.0 * f64::EPSILON).powf(1.0 / size as f64)).max(tight);

    let mut found = Vec::new();
    let all: Vec<usize> = (0..size).collect();
    let mut stack = vec![(all, loose)];
    while let Some((group, radius)) = stack.pop() {
        for comp in components(&eig, &group, radius) {
            if comp.len() < 2 {
                continue;
            }
            let center =
                comp.iter().map(|&i| eig[i]).sum::<Complex64>() / comp.len() as f64;
            let at_floor = radius <= tight;
            match jordan_structure(m, center, rank_tol) {
                Ok(blocks) if blocks.iter().sum::<usize>() == comp.len() || at_floor => {
                    let order = blocks.iter().copied().max().unwrap_or(0);
                    if order >= 2 {
                        found.push(EpCluster {
                            center,
                            algebraic_multiplicity: blocks.iter().sum(),
                            jordan_blocks: blocks,
                            order,
                        });
                    }
                }
                Err(e) if at_floor => return Err(e),
                _ => stack.push((comp, (radius / 10.0).max(tight))),
            }
        }
    }
    found.sort_by(|a, b| {
        a.center
            .re
            .total_cmp(&b.center.re)
            .then(a.center.im.total_cmp(&b.center.im))
    });
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{build_bdg_matrix, ChainSpec};
    use std::f64::consts::FRAC_PI_2;

    fn bkc(n: usize, g: f64, j: f64, eta: f64, phi: f64) -> BdgMatrix {
        build_bdg_matrix(&ChainSpec::uniform(n, g, j, eta, phi).unwrap())
    }

    const ZERO: Complex64 = Complex64::new(0.0, 0.0);

    #[test]
    fn two_mode_ep_blocks() {
        let m = bkc(2, 1.0, 1.0, 0.0, 0.0);
        assert_eq!(jordan_structure(&m, ZERO, 1e-8).unwrap(), vec![2, 2]);
    }

    #[test]
    fn three_mode_phase_gives_ep3() {
        let m = bkc(3, 1.0, 1.0, 0.0, FRAC_PI_2);
        assert_eq!(jordan_structure(&m, ZERO, 1e-8).unwrap(), vec![3, 3]);
    }

    #[test]
    fn simple_eigenvalue_is_one_block() {
        let m = bkc(2, 2.0, 1.0, 0.0, 0.0);
        let blocks = jordan_structure(&m, Complex64::new(3f64.sqrt(), 0.0), 1e-8).unwrap();
        // sqrt(3) appears twice, each in its own 1x1 block
        assert_eq!(blocks, vec![1, 1]);
    }

    #[test]
    fn non_eigenvalue_has_no_blocks() {
        let m = bkc(2, 2.0, 1.0, 0.0, 0.0);
        assert!(jordan_structure(&m, Complex64::new(0.3, 0.1), 1e-8)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn zero_matrix_is_diagonal() {
        let m = bkc(2, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(jordan_structure(&m, ZERO, 1e-8).unwrap(), vec![1, 1, 1, 1]);
    }

    #[test]
    fn ambiguous_rank_reported() {
        // a singular value sitting right at the threshold
        let mut d = DMatrix::<Complex64>::zeros(2, 2);
        d[(0, 0)] = Complex64::new(1.0, 0.0);
        d[(1, 1)] = Complex64::new(2e-8, 0.0);
        let m = BdgMatrix::from_raw(d).unwrap();
        assert!(matches!(
            jordan_structure(&m, ZERO, 1e-8),
            Err(Error::RankAmbiguity { .. })
        ));
    }

    #[test]
    fn four_mode_fold_structure() {
        let eps = detect_eps(&bkc(4, 1.0, 1.0, 0.0, 0.0), 1e-7, 1e-8).unwrap();
        assert_eq!(eps.len(), 1);
        assert_eq!(eps[0].jordan_blocks, vec![2, 2, 2, 2]);
        assert_eq!(eps[0].fold(), 4);
        assert!(eps[0].center.norm() < 1e-6);

        let eps = detect_eps(&bkc(4, 1.0, 1.0, 0.0, FRAC_PI_2), 1e-7, 1e-8).unwrap();
        assert_eq!(eps.len(), 1);
        assert_eq!(eps[0].jordan_blocks, vec![4, 4]);
        assert_eq!(eps[0].order, 4);
    }

    #[test]
    fn odd_chain_has_n_minus_one_fold() {
        let eps = detect_eps(&bkc(5, 1.0, 1.0, 0.0, 0.0), 1e-7, 1e-8).unwrap();
        assert_eq!(eps.len(), 1);
        assert_eq!(eps[0].fold(), 4);
        assert_eq!(eps[0].order, 2);
        assert_eq!(eps[0].algebraic_multiplicity, 10);
    }

    #[test]
    fn highest_order_up_to_six_modes() {
        for n in 2..=6 {
            let eps = detect_eps(&bkc(n, 1.0, 1.0, 0.0, 1.0), 1e-7, 1e-8).unwrap();
            assert_eq!(eps.len(), 1, "n = {n}");
            let want = if n == 2 { vec![2, 2] } else { vec![n, n] };
            assert_eq!(eps[0].jordan_blocks, want, "n = {n}");
        }
    }

    #[test]
    fn non_degenerate_spectrum_has_no_eps() {
        assert!(detect_eps(&bkc(2, 2.0, 1.0, 0.0, 0.0), 1e-7, 1e-8)
            .unwrap()
            .is_empty());
        // near, but not at, an EP
        assert!(detect_eps(&bkc(3, 1.001, 1.0, 0.0, 0.5), 1e-7, 1e-8)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn blocks_sum_to_multiplicity() {
        for phi in [0.0, 0.3, FRAC_PI_2] {
            for n in 2..=5 {
                for ep in detect_eps(&bkc(n, 1.0, 1.0, 0.0, phi), 1e-7, 1e-8).unwrap() {
                    assert_eq!(ep.jordan_blocks.iter().sum::<usize>(), ep.algebraic_multiplicity);
                    assert!(ep.order >= 2);
                }
            }
        }
    }
}
