//! Adaptive Dormand–Prince 5(4) integration of the covariance equation
//! `d sigma/dt = K sigma + sigma K^T`.
//!
//! This is an independent route to the propagated covariance, used to
//! cross-check the matrix exponential.

use nalgebra::DMatrix;

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-14,
            max_steps: 1_000_000,
        }
    }
}

fn rhs(k: &DMatrix<f64>, s: &DMatrix<f64>) -> DMatrix<f64> {
    let ks = k * s;
    let kst = ks.transpose();
    ks + kst
}

/// Integrates the covariance from 0 to `t_end`. Returns `None` if the step
/// budget runs out.
pub fn integrate_covariance(
    k: &DMatrix<f64>,
    sigma0: &DMatrix<f64>,
    t_end: f64,
    opts: OdeOptions,
) -> Option<DMatrix<f64>> {
    let mut t = 0.0;
    let mut y = sigma0.clone();
    if t_end == 0.0 {
        return Some(y);
    }
    let dir = t_end.signum();
    let mut h = dir * (t_end.abs() / 100.0).min(0.01);
    let mut f0 = rhs(k, &y);
    for _ in 0..opts.max_steps {
        if (t_end - t) * dir <= 0.0 {
            return Some(y);
        }
        if (t + h - t_end) * dir > 0.0 {
            h = t_end - t;
        }
        let mut stages: Vec<DMatrix<f64>> = Vec::with_capacity(7);
        stages.push(f0.clone());
        for i in 1..7 {
            let mut yi = y.clone();
            for (j, st) in stages.iter().enumerate().take(i) {
                if A[i][j] != 0.0 {
                    yi += st * (h * A[i][j]);
                }
            }
            stages.push(rhs(k, &yi));
        }
        let mut y5 = y.clone();
        let mut y4 = y.clone();
        for (i, st) in stages.iter().enumerate() {
            if B5[i] != 0.0 {
                y5 += st * (h * B5[i]);
            }
            if B4[i] != 0.0 {
                y4 += st * (h * B4[i]);
            }
        }
        let mut err = 0.0f64;
        for ((a, b), y0) in y5.iter().zip(y4.iter()).zip(y.iter()) {
            let sc = opts.atol + opts.rtol * a.abs().max(y0.abs());
            err = err.max((a - b).abs() / sc);
        }
        if err <= 1.0 {
            t += h;
            y = y5;
            // FSAL: last stage is f(t + h, y5)
            f0 = stages.pop().unwrap();
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    None
}
