//! Acceptance criteria. Runs as a plain binary and prints one line per
//! criterion; exits non-zero if any fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, TAU};
use std::panic;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bosonic_ep::chain::{build_bdg_matrix, generator_for, symplectic_form, ChainSpec};
use bosonic_ep::closed_form::{
    enhancement_ratio, nu_closed_form_three_mode_nonuniform, nu_closed_form_two_mode, surface_point,
};
use bosonic_ep::dynamics::{evolve, propagator, GaussianState};
use bosonic_ep::entanglement::Bipartition;
use bosonic_ep::fit::fit_exponential;
use bosonic_ep::jordan::{detect_eps, DEFAULT_CLUSTER_TOL};
use bosonic_ep::ode::{integrate_covariance, OdeOptions};
use bosonic_ep::pipeline::{bkc_ep_nu_minus, vacuum_nu_minus};
use bosonic_ep::scan::{linspace, locate_ep_1d, surface_residual};
use bosonic_ep::series::xi_series_coefficients;
use bosonic_ep::spectrum::{classify_region, eigenspectrum, Region, DEFAULT_REGION_TOL};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn at_most(value: f64, tol: f64) -> Self {
        Self {
            passed: value <= tol,
            detail: format!("measured {value:.3e}, tol {tol:.1e}"),
        }
    }

    fn holds(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }

    fn all(parts: Vec<(&str, Outcome)>) -> Self {
        let passed = parts.iter().all(|(_, o)| o.passed);
        let detail = parts
            .iter()
            .map(|(name, o)| format!("{name}: {}", o.detail))
            .collect::<Vec<_>>()
            .join("; ");
        Self { passed, detail }
    }
}

struct Criterion {
    id: usize,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn two_mode(g: f64, eta: f64) -> ChainSpec {
    ChainSpec::uniform(2, g, 1.0, eta, 0.0).unwrap()
}

fn spectrum_formula() -> Outcome {
    let mut worst = 0.0f64;
    for g in [0.3, 0.5, 0.9, 1.1, 1.5, 2.0] {
        let eig = eigenspectrum(&build_bdg_matrix(&two_mode(g, 0.0))).unwrap();
        let root = Complex64::new(g * g - 1.0, 0.0).sqrt();
        let (mut plus, mut minus) = (0, 0);
        for z in &eig {
            let (dp, dm) = ((z - root).norm(), (z + root).norm());
            if dp <= dm {
                plus += 1;
            } else {
                minus += 1;
            }
            worst = worst.max(dp.min(dm) / g.max(1.0));
        }
        if (plus, minus) != (2, 2) {
            return Outcome::holds(false, format!("g = {g}: multiplicities ({plus}, {minus})"));
        }
    }
    Outcome::at_most(worst, 1e-9)
}

fn ep_splitting() -> Outcome {
    let eps = locate_ep_1d(|g| ChainSpec::uniform(2, g, 1.0, 0.2, 0.0), 0.0, 2.0, 1e-12).unwrap();
    if eps.len() != 2 {
        return Outcome::holds(false, format!("found {eps:?}"));
    }
    Outcome::at_most((eps[0] - 0.8).abs().max((eps[1] - 1.2).abs()), 1e-6)
}

fn regions() -> Outcome {
    let mut got = Vec::new();
    for (g, want) in [(0.79, Region::PurelyImaginary), (1.19, Region::Mixed), (1.59, Region::PurelyReal)] {
        let eig = eigenspectrum(&build_bdg_matrix(&two_mode(g, 0.2))).unwrap();
        let r = classify_region(&eig, DEFAULT_REGION_TOL);
        got.push((g, r, r == want));
    }
    let passed = got.iter().all(|x| x.2);
    let detail = got.iter().map(|(g, r, _)| format!("{g} -> {}", r.label())).collect::<Vec<_>>().join(", ");
    Outcome::holds(passed, detail)
}

fn two_mode_closed_form() -> Outcome {
    let part = Bipartition::first_vs_rest(2).unwrap();
    let mut worst = 0.0f64;
    for g in [0.5, 0.99, 1.0, 1.01, 1.5] {
        for t in linspace(0.0, 5.0, 50) {
            let nu = vacuum_nu_minus(&two_mode(g, 0.0), &part, t).unwrap();
            worst = worst.max((nu - nu_closed_form_two_mode(g, 1.0, t)).abs());
        }
    }
    Outcome::at_most(worst, 1e-8)
}

/// Smallest partially transposed symplectic eigenvalue from an ODE-integrated
/// covariance, via the eigenvalues of `i Omega sigma~` directly.
fn brute_force_nu(spec: &ChainSpec, part: &Bipartition, t: f64) -> f64 {
    let n = spec.n_modes();
    let k = generator_for(spec).unwrap();
    let sigma = integrate_covariance(k.data(), &DMatrix::identity(2 * n, 2 * n), t, OdeOptions::default()).unwrap();
    let theta = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(part.theta()));
    let pt = &theta * sigma * &theta;
    (symplectic_form(n) * pt)
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(f64::INFINITY, f64::min)
}

fn squeezer_limit() -> Outcome {
    let part = Bipartition::first_vs_rest(2).unwrap();
    let spec = two_mode(0.0, 0.0);
    let (mut closed, mut oracle) = (0.0f64, 0.0f64);
    for t in linspace(0.0, 3.0, 31) {
        let nu = vacuum_nu_minus(&spec, &part, t).unwrap();
        closed = closed.max((nu - (-2.0 * t).exp()).abs());
        oracle = oracle.max((nu - brute_force_nu(&spec, &part, t)).abs());
    }
    Outcome::all(vec![
        ("closed form", Outcome::at_most(closed, 1e-9)),
        ("ODE oracle", Outcome::at_most(oracle, 1e-9)),
    ])
}

fn jordan_orders() -> Outcome {
    let cases: [(usize, f64, &[usize]); 4] = [
        (2, 0.0, &[2, 2]),
        (4, 0.0, &[2, 2, 2, 2]),
        (4, FRAC_PI_2, &[4, 4]),
        (3, FRAC_PI_2, &[3, 3]),
    ];
    let mut passed = true;
    let mut detail = Vec::new();
    for (n, phi, want) in cases {
        let m = build_bdg_matrix(&ChainSpec::uniform(n, 1.0, 1.0, 0.0, phi).unwrap());
        let eps = detect_eps(&m, DEFAULT_CLUSTER_TOL, 1e-8).unwrap();
        let blocks: Vec<Vec<usize>> = eps.iter().map(|e| e.jordan_blocks.clone()).collect();
        passed &= blocks.len() == 1 && blocks[0] == want;
        detail.push(format!("N={n} phi={phi:.3}: {blocks:?}"));
    }
    Outcome::holds(passed, detail.join(", "))
}

fn series_coefficient() -> Outcome {
    let series = xi_series_coefficients(6).unwrap();
    let residual = series.fits.iter().map(|f| f.residual).fold(0.0, f64::max);
    let c1 = series.fits.iter().map(|f| (f.coefficients[0] - 8.0).abs()).fold(0.0, f64::max);
    Outcome::all(vec![
        ("c1", Outcome::at_most(c1, 1e-6)),
        ("residual", Outcome::at_most(residual, 1e-6)),
        ("drift", Outcome::at_most(series.max_drift, 1e-4)),
    ])
}

fn phase_monotonicity() -> Outcome {
    let phis = linspace(0.0, FRAC_PI_2, 33);
    let mut at_half_pi = Vec::new();
    for n in 3..=6 {
        let w: Vec<f64> = phis.iter().map(|&p| -bkc_ep_nu_minus(n, p, 3.5).unwrap().ln()).collect();
        if let Some(i) = (1..w.len()).find(|&i| w[i] < w[i - 1]) {
            return Outcome::holds(false, format!("N={n} decreases at phi={:.4}: {} -> {}", phis[i], w[i - 1], w[i]));
        }
        at_half_pi.push(*w.last().unwrap());
    }
    let ordered = at_half_pi.windows(2).all(|p| p[1] > p[0]);
    let shown = at_half_pi.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(" < ");
    Outcome::holds(ordered, format!("-ln nu at pi/2: {shown}"))
}

fn enhancement_scaling() -> Outcome {
    let ns: Vec<f64> = (2..=30).map(f64::from).collect();
    let r: Vec<f64> = (2..=30).map(|n| enhancement_ratio(n, 3.5).unwrap()).collect();
    let fit = fit_exponential(&ns, &r).unwrap();
    let mut o = Outcome::all(vec![
        ("c", Outcome::at_most((fit.c - 2.493).abs(), 0.1)),
        ("b", Outcome::at_most((fit.b + 0.4633).abs(), 0.1)),
    ]);
    o.detail = format!("a={:.4} b={:.4} c={:.4}; {}", fit.a, fit.b, fit.c, o.detail);
    o
}

fn three_mode() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);

    // EPs along g2 where the surface has a real solution.
    let mut residual = 0.0f64;
    let mut located = 0;
    while located < 20 {
        let (j1, j2): (f64, f64) = (rng.random_range(0.3..1.5), rng.random_range(0.3..1.5));
        let g1 = rng.random_range(0.0..(j1 * j1 + j2 * j2).sqrt() * 0.95);
        let eps = locate_ep_1d(|g2| ChainSpec::three_mode(g1, g2, j1, j2), 0.0, 3.0, 1e-12).unwrap();
        for g2 in eps {
            residual = residual.max(surface_residual(g1, g2, j1, j2));
            located += 1;
        }
    }

    // Two eigenvalues at zero for any parameters.
    let mut zero_ok = 0;
    let mut worst_zero = 0.0f64;
    for _ in 0..100 {
        let p: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..2.0)).collect();
        let m = build_bdg_matrix(&ChainSpec::three_mode(p[0], p[1], p[2], p[3]).unwrap());
        let mut mods: Vec<f64> = eigenspectrum(&m).unwrap().iter().map(|z| z.norm()).collect();
        mods.sort_by(f64::total_cmp);
        let scale = m.norm();
        worst_zero = worst_zero.max(mods[1] / scale);
        if mods[1] <= 1e-8 * scale {
            zero_ok += 1;
        }
    }

    let part = Bipartition::parse("13|2", 3).unwrap();
    let mut witness = 0.0f64;
    for v in [0.0, FRAC_PI_8, FRAC_PI_4] {
        let (g1, g2) = surface_point(v, 1.0);
        let spec = ChainSpec::three_mode(g1, g2, 1.0, 1.0).unwrap();
        for t in linspace(0.0, 5.0, 51) {
            let nu = vacuum_nu_minus(&spec, &part, t).unwrap();
            witness = witness.max((nu - nu_closed_form_three_mode_nonuniform(v, 1.0, t)).abs());
        }
    }

    Outcome::all(vec![
        ("surface residual", Outcome::at_most(residual, 1e-6)),
        (
            "double zero",
            Outcome::holds(zero_ok == 100, format!("{zero_ok}/100, worst |lambda_2|/|M| {worst_zero:.1e}")),
        ),
        ("13|2 witness", Outcome::at_most(witness, 1e-6)),
    ])
}

fn odd_chain_never_real() -> Outcome {
    let gs = linspace(0.0, 3.0, 3001);
    let real: Vec<f64> = gs
        .iter()
        .copied()
        .filter(|&g| {
            let eig = eigenspectrum(&build_bdg_matrix(&ChainSpec::uniform(3, g, 1.0, 0.2, 0.0).unwrap())).unwrap();
            classify_region(&eig, DEFAULT_REGION_TOL) == Region::PurelyReal
        })
        .collect();
    Outcome::holds(real.is_empty(), format!("{} of {} points purely real", real.len(), gs.len()))
}

fn random_chain(rng: &mut ChaCha8Rng, n: usize) -> ChainSpec {
    let bonds = n - 1;
    let hopping = (0..bonds)
        .map(|_| Complex64::from_polar(rng.random_range(0.0..1.2), rng.random_range(0.0..TAU)))
        .collect();
    let pairing = (0..bonds).map(|_| rng.random_range(0.0..1.2)).collect();
    let sms = (0..n)
        .map(|_| Complex64::from_polar(rng.random_range(0.0..0.4), rng.random_range(0.0..TAU)))
        .collect();
    ChainSpec::new(hopping, pairing, sms).unwrap()
}

fn property_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (mut sym, mut ph, mut det, mut bona, mut ode) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for draw in 0..200 {
        let n = 1 + draw % 6;
        let spec = random_chain(&mut rng, n);
        let t = rng.random_range(0.0..1.5);
        ph = ph.max(build_bdg_matrix(&spec).particle_hole_residual());
        let k = generator_for(&spec).unwrap();
        let omega = symplectic_form(n);
        let s = propagator(&k, t).unwrap();
        let s = s.matrix();
        sym = sym.max((s * &omega * s.transpose() - &omega).amax() / s.amax().powi(2).max(1.0));
        let vac = GaussianState::vacuum(n);
        let state = evolve(&vac, &k, t).unwrap();
        det = det.max((state.determinant() - 1.0).abs());
        bona = bona.max(-state.uncertainty_min_eigenvalue().unwrap());
        let a = evolve(&vac, &k, 5.0).unwrap();
        let b = integrate_covariance(k.data(), vac.cm(), 5.0, OdeOptions::default()).unwrap();
        ode = ode.max((a.cm() - &b).amax() / b.amax().max(1.0));
    }
    Outcome::all(vec![
        ("symplecticity", Outcome::at_most(sym, 1e-10)),
        ("particle-hole", Outcome::at_most(ph, 1e-14)),
        ("det", Outcome::at_most(det, 1e-8)),
        ("bona fide", Outcome::at_most(bona, 1e-8)),
        ("expm vs ODE", Outcome::at_most(ode, 1e-7)),
    ])
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { id: 1, name: "two-mode spectrum formula", budget: secs(1), run: spectrum_formula },
        Criterion { id: 2, name: "EP splitting by single-mode squeezing", budget: secs(1), run: ep_splitting },
        Criterion { id: 3, name: "region classification", budget: secs(1), run: regions },
        Criterion { id: 4, name: "two-mode closed form", budget: secs(5), run: two_mode_closed_form },
        Criterion { id: 5, name: "squeezer limit", budget: secs(1), run: squeezer_limit },
        Criterion { id: 6, name: "Jordan block structure", budget: secs(2), run: jordan_orders },
        Criterion { id: 7, name: "series coefficients", budget: secs(30), run: series_coefficient },
        Criterion { id: 8, name: "phase monotonicity and N ordering", budget: secs(30), run: phase_monotonicity },
        Criterion { id: 9, name: "enhancement-ratio scaling", budget: secs(120), run: enhancement_scaling },
        Criterion { id: 10, name: "three-mode exceptional surface", budget: secs(30), run: three_mode },
        Criterion { id: 11, name: "odd chain never purely real", budget: secs(5), run: odd_chain_never_real },
        Criterion { id: 12, name: "property suite", budget: secs(60), run: property_suite },
    ];

    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(c.run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome::holds(false, format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let status = if outcome.passed { "PASS" } else { "FAIL" };
        let over = if elapsed > c.budget { " over budget" } else { "" };
        println!(
            "{status} criterion {:>2}: {} ({}) [{:.2}s, budget {}s{over}]",
            c.id,
            c.name,
            outcome.detail,
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
        failed += usize::from(!outcome.passed);
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
