//! Dense matrix exponential by scaling and squaring with Padé approximants
//! (Higham 2005).

use nalgebra::DMatrix;

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539_398_330_063_23e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Induced 1-norm (max column sum).
pub fn norm1(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Odd/even split of a low-degree Padé approximant from precomputed even powers.
fn pade_low(a: &DMatrix<f64>, powers: &[DMatrix<f64>], b: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let mut u = &id * b[1];
    let mut v = &id * b[0];
    for (k, p) in powers.iter().enumerate() {
        u += p * b[2 * k + 3];
        v += p * b[2 * k + 2];
    }
    (a * u, v)
}

/// `exp(a)`.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    assert!(a.is_square(), "expm needs a square matrix");
    let n = a.nrows();
    if n == 0 {
        return a.clone();
    }
    let id = DMatrix::<f64>::identity(n, n);
    let norm = norm1(a);

    let a2 = a * a;
    let (u, v, squarings) = if norm <= THETA_3 {
        let (u, v) = pade_low(a, &[a2], &B3);
        (u, v, 0)
    } else if norm <= THETA_5 {
        let a4 = &a2 * &a2;
        let (u, v) = pade_low(a, &[a2, a4], &B5);
        (u, v, 0)
    } else if norm <= THETA_7 {
        let a4 = &a2 * &a2;
        let a6 = &a4 * &a2;
        let (u, v) = pade_low(a, &[a2, a4, a6], &B7);
        (u, v, 0)
    } else if norm <= THETA_9 {
        let a4 = &a2 * &a2;
        let a6 = &a4 * &a2;
        let a8 = &a6 * &a2;
        let (u, v) = pade_low(a, &[a2, a4, a6, a8], &B9);
        (u, v, 0)
    } else {
        let s = (norm / THETA_13).log2().ceil().max(0.0) as i32;
        let scale = 0.5f64.powi(s);
        let a = a * scale;
        let a2 = &a2 * (scale * scale);
        let a4 = &a2 * &a2;
        let a6 = &a4 * &a2;
        let b = &B13;
        let inner_u = &a6 * b[13] + &a4 * b[11] + &a2 * b[9];
        let u = &a * (&a6 * inner_u + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &id * b[1]);
        let inner_v = &a6 * b[12] + &a4 * b[10] + &a2 * b[8];
        let v = &a6 * inner_v + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &id * b[0];
        (u, v, s)
    };

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .expect("Padé denominator is nonsingular for the chosen scaling");
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Taylor series with many terms, used as an oracle for small arguments.
    fn taylor(a: &DMatrix<f64>, terms: usize) -> DMatrix<f64> {
        let n = a.nrows();
        let mut sum = DMatrix::identity(n, n);
        let mut term = DMatrix::identity(n, n);
        for k in 1..terms {
            term = &term * a / k as f64;
            sum += &term;
        }
        sum
    }

    fn rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn zero_gives_identity() {
        let z = DMatrix::<f64>::zeros(4, 4);
        assert_eq!(expm(&z), DMatrix::identity(4, 4));
    }

    #[test]
    fn every_pade_degree_matches_taylor() {
        let base = DMatrix::from_row_slice(
            3,
            3,
            &[0.1, -0.4, 0.2, 0.3, 0.05, -0.7, -0.2, 0.6, -0.15],
        );
        let n1 = norm1(&base);
        for target in [0.01, 0.2, 0.9, 2.0, 5.0, 12.0] {
            let a = &base * (target / n1);
            let want = taylor(&a, 120);
            assert!(rel_err(&expm(&a), &want) < 1e-13, "norm {target}");
        }
    }

    #[test]
    fn rotation_closed_form() {
        let t: f64 = 3.7;
        let a = DMatrix::from_row_slice(2, 2, &[0.0, t, -t, 0.0]);
        let want = DMatrix::from_row_slice(2, 2, &[t.cos(), t.sin(), -t.sin(), t.cos()]);
        assert!((expm(&a) - want).amax() < 1e-14);
    }

    #[test]
    fn nilpotent_is_polynomial() {
        // exp of a Jordan block with zero eigenvalue: 1 + N + N^2/2
        let a = DMatrix::from_row_slice(3, 3, &[0.0, 2.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0]);
        let want = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 0.0, 1.0, 3.0, 0.0, 0.0, 1.0]);
        assert!((expm(&a) - want).amax() < 1e-14);
    }

    #[test]
    fn large_hyperbolic_growth() {
        let a = DMatrix::from_row_slice(2, 2, &[20.0, 0.0, 0.0, -20.0]);
        let e = expm(&a);
        assert!((e[(0, 0)] / 20f64.exp() - 1.0).abs() < 1e-13);
        assert!((e[(1, 1)] / (-20f64).exp() - 1.0).abs() < 1e-12);
    }
}
