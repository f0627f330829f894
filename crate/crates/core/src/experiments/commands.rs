//! `spectrum`, `entangle` and `es-scan`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::chain::{build_bdg_matrix, generator_for, ChainConfig, ChainSpec};
use crate::dynamics::propagator;
use crate::entanglement::{pure_state_entanglement, Bipartition};
use crate::error::Error;
use crate::jordan::{detect_eps, EpCluster, DEFAULT_CLUSTER_TOL, DEFAULT_RANK_TOL};
use crate::scan::{scan_exceptional_surface, SurfaceScanOptions};
use crate::spectrum::{classify_region, eigenspectrum, spectrum_report, SpectrumReport, DEFAULT_REGION_TOL};

use super::output::{emit, Cell, Sink, Table};
use super::plan::{AxisName, SweepAxis, SweepPlan, SweepPoint};
use super::{CliError, Report, RunOptions};

pub(crate) fn sink(opts: &RunOptions, plan: &SweepPlan) -> Sink {
    match opts.out_for(plan, None) {
        Some(p) => Sink::File(p),
        None => Sink::Stdout,
    }
}

fn axis_columns(plan: &SweepPlan) -> Vec<String> {
    plan.parameter_axes().iter().map(|a| a.name.to_string()).collect()
}

fn axis_cells(point: &SweepPoint) -> Vec<Cell> {
    point.values.iter().map(|&(_, v)| Cell::Num(v)).collect()
}

/// `[2 2]@re+imi` per cluster, `;`-separated.
pub(crate) fn ep_summary(eps: &[EpCluster]) -> String {
    eps.iter()
        .map(|e| {
            let blocks: Vec<String> = e.jordan_blocks.iter().map(usize::to_string).collect();
            format!("[{}]@{:.9e}{:+.9e}i", blocks.join(" "), e.center.re, e.center.im)
        })
        .collect::<Vec<_>>()
        .join(";")
}

struct SpectrumRow {
    n_modes: usize,
    report: SpectrumReport,
    eps: Option<Vec<EpCluster>>,
}

/// Region boundaries along the single swept coupling, if there is one.
fn sweep_boundaries(plan: &SweepPlan, tol: f64) -> Result<Option<(AxisName, Vec<f64>)>, CliError> {
    let axes = plan.parameter_axes();
    let [axis] = axes.as_slice() else {
        return Ok(None);
    };
    let values = axis.grid.values();
    if axis.name == AxisName::N || values.len() < 2 {
        return Ok(None);
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let name = axis.name;
    let family = |x: f64| plan.spec_at(&SweepPoint { values: vec![(name, x)] });
    let opts = crate::scan::LocateOptions {
        region_tol: tol,
        ..Default::default()
    };
    match crate::scan::locate_ep_1d_with(family, lo, hi, 1e-10, opts) {
        Ok(b) => Ok(Some((name, b))),
        Err(Error::NoTransition { .. }) => Ok(Some((name, Vec::new()))),
        Err(e) => Err(e.into()),
    }
}

/// Built table plus manifest results and human-readable notes.
pub(crate) struct Built {
    pub table: Table,
    pub results: Value,
    pub notes: Vec<String>,
}

pub fn cmd_spectrum(plan: &SweepPlan, opts: &RunOptions) -> Result<Report, CliError> {
    let built = spectrum_table(plan, opts.tol.unwrap_or(DEFAULT_REGION_TOL))?;
    let mut report = Report {
        notes: built.notes,
        ..Default::default()
    };
    let fmt = opts.format_for(plan);
    report.files.extend(emit(&sink(opts, plan), fmt, "spectrum", &built.table, plan, &built.results)?);
    Ok(report)
}

pub(crate) fn spectrum_table(plan: &SweepPlan, tol: f64) -> Result<Built, CliError> {
    let points = plan.points();
    let rows: Vec<SpectrumRow> = points
        .par_iter()
        .map(|p| -> Result<SpectrumRow, CliError> {
            let spec = plan.spec_at(p)?;
            let m = build_bdg_matrix(&spec);
            let report = spectrum_report(&m, tol)?;
            let eps = if plan.detect_eps {
                Some(detect_eps(&m, DEFAULT_CLUSTER_TOL, DEFAULT_RANK_TOL)?)
            } else {
                None
            };
            Ok(SpectrumRow {
                n_modes: spec.n_modes(),
                report,
                eps,
            })
        })
        .collect::<Result<_, _>>()?;

    let width = rows.iter().map(|r| r.report.eigenvalues.len()).max().unwrap_or(0);
    let mut columns = axis_columns(plan);
    columns.extend(["N", "region", "boundary", "ep_count", "ep_max_order", "ep_blocks"].map(String::from));
    for k in 0..width {
        columns.push(format!("re_{k}"));
        columns.push(format!("im_{k}"));
    }
    let mut table = Table::new(columns);
    for (p, r) in points.iter().zip(&rows) {
        let mut row = axis_cells(p);
        row.push(r.n_modes.into());
        row.push(r.report.region.label().into());
        row.push(r.report.boundary.into());
        match &r.eps {
            Some(eps) => {
                row.push(eps.len().into());
                row.push(eps.iter().map(|e| e.order).max().unwrap_or(0).into());
                row.push(ep_summary(eps).into());
            }
            None => row.extend([Cell::Empty, Cell::Empty, Cell::Empty]),
        }
        for k in 0..width {
            match r.report.eigenvalues.get(k) {
                Some(z) => row.extend([Cell::Num(z.re), Cell::Num(z.im)]),
                None => row.extend([Cell::Empty, Cell::Empty]),
            }
        }
        table.push(row);
    }

    let mut notes = Vec::new();
    // a line inside an exceptional manifold has no stable signature, and
    // bisection would only chase rounding noise
    let all_exceptional = rows.len() > 1
        && rows
            .iter()
            .all(|r| r.eps.as_ref().is_some_and(|eps| eps.iter().any(|e| e.order >= 2)));
    let boundaries = if all_exceptional {
        notes.push("every sweep point is exceptional; region boundaries not located".into());
        None
    } else {
        sweep_boundaries(plan, tol)?
    };
    let results = match boundaries {
        Some((axis, b)) => {
            let shown: Vec<String> = b.iter().map(|x| format!("{x:.10}")).collect();
            notes.push(format!("region boundaries in {axis}: [{}]", shown.join(", ")));
            json!({"region_tol": tol, "boundary_axis": axis, "boundaries": b})
        }
        None => json!({"region_tol": tol}),
    };
    Ok(Built { table, results, notes })
}

/// Witness rows for one chain and partition; stops at the first time the
/// overflow guard trips and appends a `truncated` row there.
pub(crate) struct Trajectory {
    pub rows: Vec<(f64, Option<(f64, f64)>, Option<Vec<f64>>)>,
    pub truncated_at: Option<f64>,
}

pub(crate) fn trajectory(
    spec: &ChainSpec,
    part: &Bipartition,
    times: &[f64],
    covariance: bool,
) -> Result<Trajectory, CliError> {
    crate::dynamics::check_sorted(times)?;
    let k = generator_for(spec)?;
    let states: Vec<_> = times
        .par_iter()
        .map(|&t| {
            let s = propagator(&k, t)?;
            let e = pure_state_entanglement(s.matrix(), part)?;
            Ok((e, s))
        })
        .collect::<Vec<crate::Result<_>>>();
    let mut rows = Vec::with_capacity(times.len());
    for (&t, r) in times.iter().zip(states) {
        match r {
            Ok((e, s)) => {
                let cm = covariance.then(|| upper_triangle(&(s.matrix() * s.matrix().transpose())));
                rows.push((t, Some((e.nu_minus, e.log_negativity)), cm));
            }
            Err(Error::OverflowRisk { .. }) => {
                rows.push((t, None, None));
                return Ok(Trajectory {
                    rows,
                    truncated_at: Some(t),
                });
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Trajectory {
        rows,
        truncated_at: None,
    })
}

fn upper_triangle(m: &nalgebra::DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    (0..n).flat_map(|i| (i..n).map(move |j| m[(i, j)])).collect()
}

pub fn cmd_entangle(plan: &SweepPlan, opts: &RunOptions) -> Result<Report, CliError> {
    let mut plan = plan.clone();
    if let Some(p) = &opts.partition {
        plan.partitions = vec![p.clone()];
    }
    let plan = &plan;
    let built = entangle_table(
        plan,
        opts.tol.unwrap_or(DEFAULT_REGION_TOL),
        plan.covariance || opts.covariance,
    )?;
    let mut report = Report {
        notes: built.notes,
        ..Default::default()
    };
    let fmt = opts.format_for(plan);
    report.files.extend(emit(&sink(opts, plan), fmt, "entangle", &built.table, plan, &built.results)?);
    Ok(report)
}

pub(crate) fn entangle_table(plan: &SweepPlan, tol: f64, covariance: bool) -> Result<Built, CliError> {
    let times = plan
        .time_values()
        .ok_or_else(|| CliError::config("entanglement needs `times` or a `t` axis"))?;

    let mut units = Vec::new();
    for p in plan.points() {
        let spec = plan.spec_at(&p)?;
        for part in plan.bipartitions(spec.n_modes())? {
            units.push((p.clone(), spec.clone(), part));
        }
    }
    let computed: Vec<(String, Trajectory)> = units
        .par_iter()
        .map(|(_, spec, part)| {
            let m = build_bdg_matrix(spec);
            let region = classify_region(&eigenspectrum(&m)?, tol);
            Ok((region.label().to_string(), trajectory(spec, part, &times, covariance)?))
        })
        .collect::<Result<_, CliError>>()?;

    let cm_width = if covariance {
        units.iter().map(|(_, s, _)| 2 * s.n_modes()).max().unwrap_or(0)
    } else {
        0
    };
    let mut columns = axis_columns(plan);
    columns.extend(["N", "partition", "t", "nu_minus", "log_negativity", "region", "status"].map(String::from));
    for i in 0..cm_width {
        for j in i..cm_width {
            columns.push(format!("sigma_{i}_{j}"));
        }
    }
    let mut table = Table::new(columns);
    let mut notes = Vec::new();
    let mut truncated = 0usize;
    for ((p, spec, part), (region, traj)) in units.iter().zip(&computed) {
        let n = spec.n_modes();
        if let Some(t) = traj.truncated_at {
            truncated += 1;
            notes.push(format!("warning: trajectory for {part} truncated at t = {t} (overflow guard)"));
        }
        for (t, metrics, cm) in &traj.rows {
            let mut row = axis_cells(p);
            row.push(n.into());
            row.push(part.to_string().into());
            row.push((*t).into());
            match metrics {
                Some((nu, en)) => row.extend([Cell::Num(*nu), Cell::Num(*en)]),
                None => row.extend([Cell::Num(f64::NAN), Cell::Num(f64::NAN)]),
            }
            row.push(region.as_str().into());
            row.push(if metrics.is_some() { "ok" } else { "truncated" }.into());
            if covariance {
                let width = 2 * n;
                let mut it = cm.iter().flatten();
                for i in 0..cm_width {
                    for j in i..cm_width {
                        if i < width && j < width {
                            row.push(it.next().copied().map_or(Cell::Empty, Cell::Num));
                        } else {
                            row.push(Cell::Empty);
                        }
                    }
                }
            }
            table.push(row);
        }
    }
    let results = json!({"region_tol": tol, "truncated_trajectories": truncated});
    Ok(Built { table, results, notes })
}

/// Default `es-scan` plan: `(g1, g2, J1, J2)` on a 9^4 grid over `[0, 2]`.
pub fn es_scan_default_plan() -> SweepPlan {
    let mut plan = SweepPlan::new(ChainConfig::uniform(3, 1.0, 1.0, 0.0, 0.0));
    plan.sweep = [AxisName::G1, AxisName::G2, AxisName::J1, AxisName::J2]
        .into_iter()
        .map(|a| SweepAxis::linear(a, 0.0, 2.0, 9))
        .collect();
    plan
}

fn three_mode_couplings(spec: &ChainSpec) -> Result<[f64; 4], CliError> {
    if spec.n_modes() != 3 {
        return Err(CliError::config("es-scan needs a three-mode chain"));
    }
    if spec.sms().iter().any(|z| z.norm() != 0.0) {
        return Err(CliError::config("es-scan needs eta = 0"));
    }
    let h = spec.hopping();
    if h.iter().any(|z| z.im != 0.0 || z.re < 0.0) {
        return Err(CliError::config("es-scan needs real, non-negative hopping"));
    }
    let p = spec.pairing();
    Ok([h[0].re, h[1].re, p[0], p[1]])
}

pub fn cmd_es_scan(plan: &SweepPlan, opts: &RunOptions) -> Result<Report, CliError> {
    let points: Vec<[f64; 4]> = plan
        .points()
        .iter()
        .map(|p| three_mode_couplings(&plan.spec_at(p)?))
        .collect::<Result<_, _>>()?;
    let mut scan_opts = SurfaceScanOptions::default();
    if let Some(t) = opts.tol {
        scan_opts.tol = t;
    }
    let scanned = scan_exceptional_surface(&points, &scan_opts)?;
    let mut table = Table::new(["g1", "g2", "J1", "J2", "residual", "on_surface", "ep_order", "block_sizes", "kind"]);
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for s in &scanned {
        let kind = format!("{:?}", s.kind);
        *counts.entry(kind.clone()).or_default() += 1;
        let blocks: Vec<String> = s.block_sizes.iter().map(usize::to_string).collect();
        table.push(vec![
            s.g1.into(),
            s.g2.into(),
            s.j1.into(),
            s.j2.into(),
            s.residual.into(),
            s.on_surface.into(),
            s.ep_order.into(),
            blocks.join(" ").into(),
            kind.into(),
        ]);
    }
    let mut report = Report::default();
    report.notes.push(format!("kinds: {counts:?}"));
    let results: Value = json!({"surface_tol": scan_opts.tol, "kinds": counts});
    let fmt = opts.format_for(plan);
    report.files.extend(emit(&sink(opts, plan), fmt, "es-scan", &table, plan, &results)?);
    Ok(report)
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundaries_along_a_coupling() {
        let plan = SweepPlan::from_json(
            r#"{"n": 2, "J": 1, "eta": 0.2, "sweep": [{"name": "g", "start": 0.5, "stop": 1.5, "steps": 5}]}"#,
        )
        .unwrap();
        let built = spectrum_table(&plan, DEFAULT_REGION_TOL).unwrap();
        let b: Vec<f64> = serde_json::from_value(built.results["boundaries"].clone()).unwrap();
        assert_eq!(b.len(), 2);
        assert!((b[0] - 0.8).abs() < 1e-9 && (b[1] - 1.2).abs() < 1e-9);
    }

    #[test]
    fn no_boundaries_inside_an_exceptional_line() {
        // g = J is exceptional for every phase
        let plan = SweepPlan::from_json(
            r#"{"n": 3, "g": 1, "J": 1, "sweep": [{"name": "phi", "start": 0, "stop": 3, "steps": 7}]}"#,
        )
        .unwrap();
        let built = spectrum_table(&plan, DEFAULT_REGION_TOL).unwrap();
        assert!(built.results.get("boundaries").is_none());
        assert_eq!(built.notes.len(), 1);
    }
}
