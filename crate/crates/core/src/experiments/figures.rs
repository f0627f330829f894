//! Figure data: `fig2` (two-mode regions), `fig3` (phase-tuned chains) and
//! `fig4` (three-mode exceptional surface).

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};
use std::path::PathBuf;

use rayon::prelude::*;
use serde_json::json;

use crate::chain::{build_bdg_matrix, ChainConfig, ScalarOrSeq};
use crate::closed_form::{enhancement_ratio, nu_closed_form_three_mode_nonuniform, surface_point};
use crate::entanglement::PartitionLabel;
use crate::fit::fit_exponential;
use crate::pipeline::vacuum_nu_minus;
use crate::spectrum::{classify_region, eigenspectrum, DEFAULT_REGION_TOL};

use super::commands::{entangle_table, spectrum_table};
use super::output::{emit, sibling, Cell, Sink, Table};
use super::plan::{AxisName, Format, Grid, SweepAxis, SweepPlan, SweepPoint};
use super::{Check, CliError, Report, RunOptions};

fn main_path(opts: &RunOptions, plan: &SweepPlan, name: &str, fmt: Format) -> PathBuf {
    opts.out_for(plan, None)
        .unwrap_or_else(|| PathBuf::from(format!("{name}.{}", fmt.extension())))
}

fn scalar(field: &ScalarOrSeq, what: &str) -> Result<f64, CliError> {
    match field {
        ScalarOrSeq::Scalar(x) => Ok(*x),
        ScalarOrSeq::Seq(v) if !v.is_empty() && v.iter().all(|x| *x == v[0]) => Ok(v[0]),
        ScalarOrSeq::Seq(_) => Err(CliError::config(format!("{what} must be uniform here"))),
    }
}

/// Two-mode chain, `J = 1`, `eta = 0.2`: a 301 x 501 grid over
/// `g in [0, 2]`, `Jt in [0, 5]`, with line cuts at `g = 0.79, 1.19, 1.59`.
pub fn fig2_default_plan() -> SweepPlan {
    let mut plan = SweepPlan::new(ChainConfig::uniform(2, 1.0, 1.0, 0.2, 0.0));
    plan.sweep = vec![SweepAxis::linear(AxisName::G, 0.0, 2.0, 301)];
    plan.times = Some(Grid::linear(0.0, 5.0, 501));
    plan.figure.cuts = Some(vec![0.79, 1.19, 1.59]);
    plan.figure.cut_times = Some(Grid::linear(0.0, 50.0, 1001));
    plan
}

pub fn cmd_fig2(plan: &SweepPlan, opts: &RunOptions) -> Result<Report, CliError> {
    let axes = plan.parameter_axes();
    let [axis] = axes.as_slice() else {
        return Err(CliError::config("fig2 sweeps exactly one coupling"));
    };
    let axis_name = axis.name;
    let tol = opts.tol.unwrap_or(DEFAULT_REGION_TOL);
    let mut plan = plan.clone();
    if let Some(p) = &opts.partition {
        plan.partitions = vec![p.clone()];
    }
    let fmt = opts.format_for(&plan);
    let base = main_path(opts, &plan, "fig2", fmt);
    let mut report = Report::default();

    let map = entangle_table(&plan, tol, false)?;
    report.notes.extend(map.notes.iter().cloned());

    let mut spec_plan = plan.clone();
    spec_plan.times = None;
    let spectrum = spectrum_table(&spec_plan, tol)?;
    report.notes.extend(spectrum.notes.iter().cloned());

    let mut cut_plan = plan.clone();
    cut_plan.sweep = vec![SweepAxis::list(
        axis_name,
        plan.figure.cuts.clone().unwrap_or_else(|| vec![0.79, 1.19, 1.59]),
    )];
    cut_plan.times = Some(plan.figure.cut_times.clone().unwrap_or(Grid::linear(0.0, 50.0, 1001)));
    let cuts = entangle_table(&cut_plan, tol, false)?;
    report.notes.extend(cuts.notes.iter().cloned());

    let results = json!({"map": map.results, "spectrum": spectrum.results, "cuts": cuts.results});
    for (path, built) in [
        (base.clone(), &map),
        (sibling(&base, "spectrum", fmt), &spectrum),
        (sibling(&base, "cuts", fmt), &cuts),
    ] {
        report
            .files
            .extend(emit(&Sink::File(path), fmt, "fig2", &built.table, &plan, &results)?);
    }
    Ok(report)
}

/// Uniform chains at `g = J = 1`, `eta = 0`, `N = 2..6`, 65 phases over
/// `[0, pi]` at `Jt = 3.5`; ratio table over `Jt in [0.1, 5]`; fit for
/// `N = 2..30`.
pub fn fig3_default_plan() -> SweepPlan {
    let mut plan = SweepPlan::new(ChainConfig::uniform(2, 1.0, 1.0, 0.0, 0.0));
    plan.sweep = vec![
        SweepAxis::list(AxisName::N, (2..=6).map(f64::from).collect()),
        SweepAxis::linear(AxisName::Phi, 0.0, PI, 65),
    ];
    plan.times = Some(Grid::List(vec![3.5]));
    plan.figure.ratio_times = Some(Grid::linear(0.1, 5.0, 50));
    plan.figure.fit_n_max = Some(30);
    plan
}

pub fn cmd_fig3(plan: &SweepPlan, opts: &RunOptions) -> Result<Report, CliError> {
    let g = scalar(&plan.chain.g, "g")?;
    let j = scalar(&plan.chain.j, "J")?;
    let eta = scalar(&plan.chain.eta, "eta")?;
    if g != j || eta != 0.0 || j <= 0.0 {
        return Err(CliError::config("fig3 runs at g = J > 0 and eta = 0"));
    }
    if plan.axis(AxisName::N).is_none() || plan.axis(AxisName::Phi).is_none() {
        return Err(CliError::config("fig3 sweeps N and phi"));
    }
    let times = plan
        .time_values()
        .ok_or_else(|| CliError::config("fig3 needs `times`"))?;
    let sym_tol = opts.tol.unwrap_or(1e-9);
    let fmt = opts.format_for(plan);
    let base = main_path(opts, plan, "fig3", fmt);
    let mut report = Report::default();

    // -ln nu versus phi
    let mut cells = Vec::new();
    for p in plan.points() {
        for &t in &times {
            cells.push((p.clone(), t));
        }
    }
    let values: Vec<f64> = cells
        .par_iter()
        .map(|(p, t)| {
            let spec = plan.spec_at(p)?;
            let part = plan.bipartitions(spec.n_modes())?.remove(0);
            Ok(vacuum_nu_minus(&spec, &part, *t)?)
        })
        .collect::<Result<_, CliError>>()?;
    let mut phase = Table::new(["N", "phi", "t", "nu_minus", "minus_log_nu"]);
    for ((p, t), nu) in cells.iter().zip(&values) {
        let n = p.get(AxisName::N).unwrap_or(plan.chain.n as f64) as usize;
        let phi = p.get(AxisName::Phi).unwrap_or(0.0);
        phase.push(vec![n.into(), phi.into(), (*t).into(), (*nu).into(), (-nu.ln()).into()]);
    }

    // symmetry about pi/2 and phase independence at N = 2
    let mut asym = 0.0f64;
    let mut n2_spread = 0.0f64;
    for (a, (pa, ta)) in cells.iter().enumerate() {
        let va = -values[a].ln();
        let na = pa.get(AxisName::N);
        let phia = pa.get(AxisName::Phi).unwrap_or(0.0);
        for (b, (pb, tb)) in cells.iter().enumerate().skip(a) {
            if pb.get(AxisName::N) != na || tb != ta {
                continue;
            }
            let vb = -values[b].ln();
            let scale = va.abs().max(vb.abs()).max(1.0);
            let phib = pb.get(AxisName::Phi).unwrap_or(0.0);
            if (phia + phib - PI).abs() <= 1e-12 {
                asym = asym.max((va - vb).abs() / scale);
            }
            if na == Some(2.0) {
                n2_spread = n2_spread.max((va - vb).abs() / scale);
            }
        }
    }
    report.checks.push(Check::at_most("fig3.symmetry_about_half_pi", asym, sym_tol));
    if plan.axis(AxisName::N).is_some_and(|a| a.grid.values().contains(&2.0)) {
        report.checks.push(Check::at_most("fig3.n2_phase_independent", n2_spread, sym_tol));
    }

    // R(t) for each N
    let ns: Vec<usize> = plan
        .axis(AxisName::N)
        .map(|a| a.grid.values().iter().map(|&x| x as usize).collect())
        .unwrap_or_default();
    let ratio_times = plan
        .figure
        .ratio_times
        .clone()
        .unwrap_or(Grid::linear(0.1, 5.0, 50))
        .values();
    let ratio_cells: Vec<(usize, f64)> = ns
        .iter()
        .flat_map(|&n| ratio_times.iter().map(move |&t| (n, t)))
        .collect();
    let ratios: Vec<f64> = ratio_cells
        .par_iter()
        .map(|&(n, t)| enhancement_ratio(n, j * t))
        .collect::<crate::Result<_>>()?;
    let mut ratio = Table::new(["N", "t", "R"]);
    for ((n, t), r) in ratio_cells.iter().zip(&ratios) {
        ratio.push(vec![(*n).into(), (*t).into(), (*r).into()]);
    }

    // R(N) at the first time, fitted to a exp(bN) + c
    let t_fit = times[0];
    let n_max = plan.figure.fit_n_max.unwrap_or(30).max(4);
    let fit_ns: Vec<usize> = (2..=n_max).collect();
    let fit_r: Vec<f64> = fit_ns
        .par_iter()
        .map(|&n| enhancement_ratio(n, j * t_fit))
        .collect::<crate::Result<_>>()?;
    let xs: Vec<f64> = fit_ns.iter().map(|&n| n as f64).collect();
    let fit = fit_exponential(&xs, &fit_r)?;
    let mut fit_table = Table::new(["N", "t", "R", "R_fit"]);
    for (x, r) in xs.iter().zip(&fit_r) {
        fit_table.push(vec![(*x as usize).into(), t_fit.into(), (*r).into(), fit.eval(*x).into()]);
    }
    report.notes.push(format!(
        "R(N) at Jt = {}: {:.4} exp({:.4} N) + {:.4}",
        j * t_fit,
        fit.a,
        fit.b,
        fit.c
    ));

    let results = json!({
        "symmetry_defect": asym,
        "fit": {"t": t_fit, "a": fit.a, "b": fit.b, "c": fit.c, "rss": fit.rss},
        "checks": report.checks,
    });
    for (path, table) in [
        (base.clone(), &phase),
        (sibling(&base, "ratio", fmt), &ratio),
        (sibling(&base, "ratio_fit", fmt), &fit_table),
    ] {
        report
            .files
            .extend(emit(&Sink::File(path), fmt, "fig3", table, plan, &results)?);
    }
    Ok(report)
}

/// Three-mode chain, `J1 = J2 = 1`, `eta = 0`, `13|2` cut at `Jt = 5`:
/// a 101 x 101 map over `g1, g2 in [0, 2]` and a line cut along
/// `g1^2 + g2^2 = 2 J^2`.
pub fn fig4_default_plan() -> SweepPlan {
    let mut plan = SweepPlan::new(ChainConfig::uniform(3, 1.0, 1.0, 0.0, 0.0));
    plan.sweep = vec![
        SweepAxis::linear(AxisName::G1, 0.0, 2.0, 101),
        SweepAxis::linear(AxisName::G2, 0.0, 2.0, 101),
    ];
    plan.times = Some(Grid::List(vec![5.0]));
    plan.partitions = vec![PartitionLabel("13|2".into())];
    plan.figure.line_cut_points = Some(101);
    plan.figure.cut_times = Some(Grid::linear(0.0, 5.0, 101));
    plan
}

pub fn cmd_fig4(plan: &SweepPlan, opts: &RunOptions) -> Result<Report, CliError> {
    if plan.chain.n != 3 || plan.axis(AxisName::N).is_some() {
        return Err(CliError::config("fig4 runs on the three-mode chain"));
    }
    let j = scalar(&plan.chain.j, "J")?;
    if scalar(&plan.chain.eta, "eta")? != 0.0 || plan.axis(AxisName::Eta).is_some() {
        return Err(CliError::config("fig4 runs at eta = 0"));
    }
    if plan.axis(AxisName::J1).is_some() || plan.axis(AxisName::J2).is_some() {
        return Err(CliError::config("fig4 holds J1 = J2 = J fixed"));
    }
    let times = plan
        .time_values()
        .ok_or_else(|| CliError::config("fig4 needs `times`"))?;
    let t_cut = *times.last().unwrap_or(&5.0);
    let tol = opts.tol.unwrap_or(DEFAULT_REGION_TOL);
    let cf_tol = opts.tol.unwrap_or(1e-6);
    let mut plan = plan.clone();
    if let Some(p) = &opts.partition {
        plan.partitions = vec![p.clone()];
    }
    if plan.partitions.is_empty() {
        plan.partitions = vec![PartitionLabel("13|2".into())];
    }
    let plan = &plan;
    let fmt = opts.format_for(plan);
    let base = main_path(opts, plan, "fig4", fmt);
    let part = plan.bipartitions(3)?.remove(0);
    let mut report = Report::default();

    // witness map
    let points = plan.points();
    let cells: Vec<(SweepPoint, f64)> = points
        .iter()
        .flat_map(|p| times.iter().map(move |&t| (p.clone(), t)))
        .collect();
    let rows: Vec<(f64, f64, String, f64)> = cells
        .par_iter()
        .map(|(p, t)| {
            let spec = plan.spec_at(p)?;
            let g1 = spec.hopping()[0].norm();
            let g2 = spec.hopping()[1].norm();
            let region = classify_region(&eigenspectrum(&build_bdg_matrix(&spec))?, tol);
            let nu = vacuum_nu_minus(&spec, &part, *t)?;
            Ok((g1, g2, region.label().to_string(), nu))
        })
        .collect::<Result<_, CliError>>()?;
    let mut map = Table::new(["g1", "g2", "surface_offset", "region", "t", "nu_minus", "minus_log_nu"]);
    for ((_, t), (g1, g2, region, nu)) in cells.iter().zip(&rows) {
        let offset = g1 * g1 + g2 * g2 - 2.0 * j * j;
        map.push(vec![
            (*g1).into(),
            (*g2).into(),
            offset.into(),
            region.as_str().into(),
            (*t).into(),
            (*nu).into(),
            (-nu.ln()).into(),
        ]);
    }

    // line cut along the surface, and time traces at three angles
    let n_cut = plan.figure.line_cut_points.unwrap_or(101).max(2);
    let varphis = crate::scan::linspace(-FRAC_PI_4, FRAC_PI_4, n_cut);
    let cut_times = plan
        .figure
        .cut_times
        .clone()
        .unwrap_or(Grid::linear(0.0, 5.0, 101))
        .values();
    let trace_angles = [0.0, FRAC_PI_8, FRAC_PI_4];
    let line_cells: Vec<(f64, f64)> = varphis.iter().map(|&v| (v, t_cut)).collect();
    let trace_cells: Vec<(f64, f64)> = trace_angles
        .iter()
        .flat_map(|&v| cut_times.iter().map(move |&t| (v, t)))
        .collect();
    let eval = |cells: &[(f64, f64)]| -> Result<Table, CliError> {
        let out: Vec<[f64; 5]> = cells
            .par_iter()
            .map(|&(v, t)| {
                let (g1, g2) = surface_point(v, j);
                let spec = crate::chain::ChainSpec::three_mode(g1, g2, j, j)?;
                let nu = vacuum_nu_minus(&spec, &part, t)?;
                Ok([g1, g2, t, nu, nu_closed_form_three_mode_nonuniform(v, j, t)])
            })
            .collect::<Result<_, CliError>>()?;
        let mut table = Table::new(["varphi", "g1", "g2", "t", "nu_minus", "minus_log_nu", "nu_closed_form"]);
        for (&(v, _), [g1, g2, t, nu, cf]) in cells.iter().zip(out) {
            table.push(vec![v.into(), g1.into(), g2.into(), t.into(), nu.into(), (-nu.ln()).into(), cf.into()]);
        }
        Ok(table)
    };
    let line = eval(&line_cells)?;
    let traces = eval(&trace_cells)?;
    let worst = [&line, &traces]
        .iter()
        .flat_map(|tab| {
            let (a, b) = (tab.column("nu_minus").unwrap(), tab.column("nu_closed_form").unwrap());
            tab.rows.iter().map(move |r| match (&r[a], &r[b]) {
                (Cell::Num(x), Cell::Num(y)) => (x - y).abs(),
                _ => f64::NAN,
            })
        })
        .fold(0.0f64, f64::max);
    report.checks.push(Check::at_most("fig4.line_cut_closed_form", worst, cf_tol));

    let results = json!({
        "J": j,
        "t_cut": t_cut,
        "max_closed_form_error": worst,
        "trace_angles": trace_angles,
        "checks": report.checks,
    });
    for (path, table) in [
        (base.clone(), &map),
        (sibling(&base, "cut", fmt), &line),
        (sibling(&base, "cut_time", fmt), &traces),
    ] {
        report
            .files
            .extend(emit(&Sink::File(path), fmt, "fig4", table, plan, &results)?);
    }
    Ok(report)
}
