use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{RunConfig, Task};
use super::report::{MaxTracker, Provenance, TaskRecord, VerificationReport, ARTIFACT_VERSION};
use crate::error::Result;
use crate::fields::{d_from_b, d_from_profile, solve_gauge, GaugeField, NCProfile};
use crate::jacobi::{jacobiator_at, linear_counterexample, StructureConstants, INDEPENDENT_TRIPLES};
use crate::jet::ScalarField;
use crate::lsz::{boundary_term, decomposition_residual, lagrangian_l0, lagrangian_lsz, LszState};
use crate::quantum::{omega2_appendix, omega2_general, resolve_appendix_sign34, scaled_mismatch, Sign34};
use crate::symplectic::{
    build_constraints, max_entry_diff, omega0_by_inversion, omega0_closed_form, omega0_example_forms, BivectorField,
    InvertedBivector, PolyBivector, UPPER_LABELS,
};

pub const LSZ_SEED: u64 = 0x1f2e_3d4c;
pub const LSZ_STATES: usize = 100;
pub const COUNTEREXAMPLE_TOLERANCE: f64 = 1e-12;
pub const LSZ_SUBSTITUTION_TOLERANCE: f64 = 1e-13;
pub const LSZ_DECOMPOSITION_TOLERANCE: f64 = 1e-12;
pub const LIMIT_COMMUTATIVE_THETA: f64 = 1e-8;
pub const LIMIT_COMMUTATIVE_TOLERANCE: f64 = 1e-7;
pub const LIMIT_GLOBAL_TOLERANCE: f64 = 1e-12;

/// Structure constants `(f_1^{12}, f_2^{12})` exercised by the counterexample task.
pub const COUNTEREXAMPLE_CASES: [(f64, f64); 3] = [(1.0, 0.0), (0.0, 1.0), (2.5, -0.75)];

/// Everything a run produces, before anything touches the filesystem.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: VerificationReport,
    pub omega0_csv: Option<String>,
    pub omega2_csv: Option<String>,
}

/// Fixed-width scientific notation with 17 significant digits; `nan` marks singular points.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn csv_header(columns: &[&str]) -> String {
    let mut s = String::from("x,y");
    for c in columns {
        s.push(',');
        s.push_str(c);
    }
    s.push('\n');
    s
}

fn csv_row(out: &mut String, (x, y): (f64, f64), values: &[f64]) {
    out.push_str(&format_number(x));
    out.push(',');
    out.push_str(&format_number(y));
    for v in values {
        out.push(',');
        out.push_str(&format_number(*v));
    }
    out.push('\n');
}

fn upper_of(m: &[[f64; 4]; 4]) -> [f64; 6] {
    crate::symplectic::UPPER_PAIRS.map(|(a, b)| m[a][b])
}

/// Executes the requested tasks in dependency order without writing files.
pub fn execute(cfg: &RunConfig) -> RunOutput {
    let profile = cfg.profile.profile();
    let theta = profile.theta;
    let points = cfg.grid.points();
    let order = cfg.jet_order - 1;
    let tol = &cfg.tolerances;
    let tasks = cfg.ordered_tasks();

    let mut records = vec![profile_record(&profile, &points)];
    let mut omega0_csv = None;
    let mut omega2_csv = None;

    let gauge = solve_gauge(&profile, cfg.profile.gauge);
    let needs_gauge = |t: &Task| matches!(t, Task::Omega0 | Task::Omega2 | Task::Jacobi | Task::Roundtrip);

    for task in &tasks {
        if needs_gauge(task) {
            if let Err(e) = &gauge {
                let mut t = MaxTracker::default();
                t.fail(format!("gauge solve failed: {e}"));
                records.push(TaskRecord::from_tracker(task.name(), t, 0.0));
                continue;
            }
        }
        match task {
            Task::Omega0 => {
                let g = gauge.as_ref().expect("checked above");
                let (record, csv) = omega0_task(&profile, g, &points, order, tol.omega0_match);
                records.push(record);
                omega0_csv = Some(csv);
            }
            Task::Omega2 => {
                let g = gauge.as_ref().expect("checked above");
                let (record, csv) = omega2_task(g, theta, &points, tol.omega2_match);
                records.push(record);
                omega2_csv = Some(csv);
            }
            Task::Jacobi => {
                let g = gauge.as_ref().expect("checked above");
                records.extend(jacobi_task(g, theta, &points, order.max(1), tol.jacobi));
            }
            Task::Roundtrip => {
                let g = gauge.as_ref().expect("checked above");
                records.extend(roundtrip_task(
                    &profile,
                    g,
                    &points,
                    order.max(2),
                    tol.roundtrip,
                    tol.roundtrip_derivatives,
                ));
            }
            Task::Counterexample => records.push(counterexample_record()),
            Task::Lsz => records.extend(lsz_records(LSZ_SEED, LSZ_STATES)),
            Task::Limits => records.extend(limit_records(cfg, &points)),
        }
    }

    RunOutput {
        report: VerificationReport {
            records,
            provenance: Provenance { config: cfg.clone(), version: ARTIFACT_VERSION.to_string() },
        },
        omega0_csv,
        omega2_csv,
    }
}

/// Executes the run and writes `omega0.csv`, `omega2.csv`, `report.json` and `report.txt`.
pub fn run(cfg: &RunConfig, out_dir: &Path) -> std::io::Result<VerificationReport> {
    let output = execute(cfg);
    fs::create_dir_all(out_dir)?;
    if let Some(csv) = &output.omega0_csv {
        fs::write(out_dir.join("omega0.csv"), csv)?;
    }
    if let Some(csv) = &output.omega2_csv {
        fs::write(out_dir.join("omega2.csv"), csv)?;
    }
    fs::write(out_dir.join("report.json"), output.report.to_json())?;
    fs::write(out_dir.join("report.txt"), output.report.to_text())?;
    Ok(output.report)
}

fn profile_record(profile: &NCProfile, points: &[(f64, f64)]) -> TaskRecord {
    let mut t = MaxTracker::default();
    if let Err(e) = profile.validate().and_then(|_| profile.check_positive_on(points.iter().copied())) {
        t.fail(e.to_string());
    }
    TaskRecord::from_tracker("profile_positivity", t, 0.0)
}

fn omega0_task(
    profile: &NCProfile,
    g: &GaugeField,
    points: &[(f64, f64)],
    order: usize,
    tolerance: f64,
) -> (TaskRecord, String) {
    let theta = profile.theta;
    let inverted = omega0_by_inversion(&build_constraints(g, theta));
    let closed = omega0_closed_form(g, theta);
    let example = g.gauge().and_then(|gauge| omega0_example_forms(profile, gauge).ok());

    let mut csv = csv_header(&UPPER_LABELS);
    let mut t = MaxTracker::default();
    for &(x, y) in points {
        let eval = || -> Result<([[f64; 4]; 4], f64)> {
            let a = inverted.eval(x, y, order)?.matrix();
            let mut diff = max_entry_diff(&a, &closed.eval(x, y, order)?.matrix());
            if let Some(ex) = &example {
                diff = diff.max(max_entry_diff(&a, &ex.eval(x, y, order)?.matrix()));
            }
            Ok((a, diff))
        };
        match eval() {
            Ok((a, diff)) => {
                t.observe(diff, (x, y));
                csv_row(&mut csv, (x, y), &upper_of(&a));
            }
            Err(e) => {
                t.fail(format!("({x}, {y}): {e}"));
                csv_row(&mut csv, (x, y), &[f64::NAN; 6]);
            }
        }
    }
    let detail = if example.is_some() {
        "inversion vs closed form vs local-profile forms"
    } else {
        "inversion vs closed form (local-profile forms need f(u) = u)"
    };
    (TaskRecord::from_tracker("omega0_agreement", t, tolerance).with_detail(detail), csv)
}

fn omega2_task(g: &GaugeField, theta: f64, points: &[(f64, f64)], tolerance: f64) -> (TaskRecord, String) {
    let w0 = omega0_by_inversion(&build_constraints(g, theta));
    let mut csv = csv_header(&UPPER_LABELS);
    let mut t = MaxTracker::default();
    let mut regular = Vec::new();
    for &pt in points {
        let eval = || -> Result<([f64; 6], f64)> {
            let general = upper_of(&omega2_general(&w0, pt)?);
            let appendix = omega2_appendix(g, theta, pt)?.upper_values();
            let mismatch = (0..6).map(|k| scaled_mismatch(appendix[k], general[k])).fold(0.0, f64::max);
            Ok((general, mismatch))
        };
        match eval() {
            Ok((general, mismatch)) => {
                t.observe(mismatch, pt);
                regular.push(pt);
                csv_row(&mut csv, pt, &general);
            }
            Err(e) => {
                t.fail(format!("({}, {}): {e}", pt.0, pt.1));
                csv_row(&mut csv, pt, &[f64::NAN; 6]);
            }
        }
    }
    let mut record = TaskRecord::from_tracker("omega2_appendix_match", t, tolerance);
    if let Ok(r) = resolve_appendix_sign34(g, theta, &w0, &regular, tolerance) {
        let winner = match r.winner {
            Some(Sign34::Plus) => "+",
            Some(Sign34::Minus) => "-",
            None => "neither",
        };
        record = record.with_detail(format!(
            "reference omega2^34 inner sign matching the general formula: {winner} (mismatch + {:.3e}, - {:.3e})",
            r.plus_mismatch, r.minus_mismatch
        ));
    }
    (record, csv)
}

fn triple_label(triple: [usize; 3]) -> String {
    triple.iter().map(|i| (i + 1).to_string()).collect()
}

fn jacobi_task(g: &GaugeField, theta: f64, points: &[(f64, f64)], order: usize, tolerance: f64) -> Vec<TaskRecord> {
    let w0 = omega0_by_inversion(&build_constraints(g, theta));
    let mut trackers: Vec<MaxTracker> = vec![MaxTracker::default(); INDEPENDENT_TRIPLES.len()];
    for &(x, y) in points {
        match w0.eval(x, y, order) {
            Ok(jets) => {
                for (k, &triple) in INDEPENDENT_TRIPLES.iter().enumerate() {
                    match jacobiator_at(&jets, triple) {
                        Ok(v) => trackers[k].observe(v.abs(), (x, y)),
                        Err(e) => trackers[k].fail(format!("({x}, {y}): {e}")),
                    }
                }
            }
            Err(e) => trackers.iter_mut().for_each(|t| t.fail(format!("({x}, {y}): {e}"))),
        }
    }
    INDEPENDENT_TRIPLES
        .iter()
        .zip(trackers)
        .map(|(&triple, t)| TaskRecord::from_tracker(format!("jacobi_{}", triple_label(triple)), t, tolerance))
        .collect()
}

fn roundtrip_task(
    profile: &NCProfile,
    g: &GaugeField,
    points: &[(f64, f64)],
    order: usize,
    value_tol: f64,
    derivative_tol: f64,
) -> Vec<TaskRecord> {
    let target = d_from_profile(profile);
    let rebuilt = d_from_b(g, profile.theta);
    let mut value = MaxTracker::default();
    let mut derivs = MaxTracker::default();
    for &(x, y) in points {
        let pair = target.jet(x, y, order).and_then(|a| Ok((a, rebuilt.jet(x, y, order)?)));
        match pair {
            Ok((a, b)) => {
                value.observe((a.value() - b.value()).abs(), (x, y));
                let mut worst: f64 = 0.0;
                for (i, j) in [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)] {
                    let da = a.partial(i, j).unwrap_or(f64::NAN);
                    let db = b.partial(i, j).unwrap_or(f64::NAN);
                    worst = worst.max((da - db).abs());
                    if (da - db).is_nan() {
                        worst = f64::NAN;
                        break;
                    }
                }
                derivs.observe(worst, (x, y));
            }
            Err(e) => {
                value.fail(format!("({x}, {y}): {e}"));
                derivs.fail(format!("({x}, {y}): {e}"));
            }
        }
    }
    vec![
        TaskRecord::from_tracker("roundtrip_value", value, value_tol),
        TaskRecord::from_tracker("roundtrip_derivatives", derivs, derivative_tol),
    ]
}

/// Largest deviation of `|J(p_k, x^i, x^j)|` from `|f_k^{ij}|` over [`COUNTEREXAMPLE_CASES`].
pub fn counterexample_record() -> TaskRecord {
    let mut t = MaxTracker::default();
    let mut detail = String::new();
    for (f1, f2) in COUNTEREXAMPLE_CASES {
        let sc = StructureConstants::from_xy(f1, f2);
        match linear_counterexample(&sc) {
            Ok(table) => {
                let mut worst: f64 = 0.0;
                for k in 0..2 {
                    for i in 0..2 {
                        for j in 0..2 {
                            worst = worst.max((table[k][i][j].abs() - sc.get(k, i, j).abs()).abs());
                        }
                    }
                }
                t.observe(worst, (f1, f2));
                let _ = write!(detail, "f=({f1}, {f2}): J(p1,x,y)={} J(p2,x,y)={}; ", table[0][0][1], table[1][0][1]);
            }
            Err(e) => t.fail(e.to_string()),
        }
    }
    TaskRecord::from_tracker("counterexample", t, COUNTEREXAMPLE_TOLERANCE).with_detail(detail.trim_end().to_string())
}

fn random_pair(rng: &mut ChaCha8Rng) -> [f64; 2] {
    [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]
}

/// Reproducible pseudo-random states with `theta` in `[0.25, 2)`.
pub fn random_lsz_states(seed: u64, count: usize) -> Vec<LszState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| LszState {
            x: random_pair(&mut rng),
            y: random_pair(&mut rng),
            p: random_pair(&mut rng),
            xdot: random_pair(&mut rng),
            ydot: random_pair(&mut rng),
            pdot: random_pair(&mut rng),
            theta: rng.gen_range(0.25..2.0),
        })
        .collect()
}

/// Substitution identity, decomposition boundary term, and independence of `(x, xdot)`.
pub fn lsz_records(seed: u64, count: usize) -> Vec<TaskRecord> {
    let states = random_lsz_states(seed, count);
    let mut subst = MaxTracker::default();
    let mut decomp = MaxTracker::default();
    let mut shift = MaxTracker::default();
    for (n, s) in states.iter().enumerate() {
        let tag = (n as f64, 0.0);
        let on_shell = LszState { y: s.xdot, ..*s };
        subst.observe((lagrangian_l0(&on_shell) - lagrangian_lsz(s.xdot, s.ydot, s.theta)).abs(), tag);
        match decomposition_residual(s) {
            Ok(r) => {
                decomp.observe((r - boundary_term(s)).abs(), tag);
                let moved = LszState { x: [s.x[0] + 3.0, s.x[1] - 1.5], xdot: [-s.xdot[1], 2.0 * s.xdot[0]], ..*s };
                match decomposition_residual(&moved) {
                    Ok(r2) => shift.observe((r2 - r).abs(), tag),
                    Err(e) => shift.fail(e.to_string()),
                }
            }
            Err(e) => decomp.fail(e.to_string()),
        }
    }
    let note = format!("{count} states from seed {seed}; worst_point holds (state index, 0)");
    vec![
        TaskRecord::from_tracker("lsz_substitution", subst, LSZ_SUBSTITUTION_TOLERANCE).with_detail(note.clone()),
        TaskRecord::from_tracker("lsz_decomposition", decomp, LSZ_DECOMPOSITION_TOLERANCE).with_detail(note.clone()),
        TaskRecord::from_tracker("lsz_position_independence", shift, LSZ_DECOMPOSITION_TOLERANCE).with_detail(note),
    ]
}

fn deviation_record(
    name: &str,
    w: Result<InvertedBivector>,
    reference: &PolyBivector,
    points: &[(f64, f64)],
    tolerance: f64,
) -> TaskRecord {
    let mut t = MaxTracker::default();
    match w {
        Ok(w) => {
            for &(x, y) in points {
                let pair = w.eval(x, y, 0).and_then(|a| Ok((a, reference.eval(x, y, 0)?)));
                match pair {
                    Ok((a, b)) => t.observe(max_entry_diff(&a.matrix(), &b.matrix()), (x, y)),
                    Err(e) => t.fail(format!("({x}, {y}): {e}")),
                }
            }
        }
        Err(e) => t.fail(e.to_string()),
    }
    TaskRecord::from_tracker(name, t, tolerance)
}

/// `theta -> 1e-8` against the canonical matrix and `alpha -> 0` against constant theta.
pub fn limit_records(cfg: &RunConfig, points: &[(f64, f64)]) -> Vec<TaskRecord> {
    let base = cfg.profile.profile();
    let gauge = cfg.profile.gauge;
    let bracket = |p: NCProfile| -> Result<InvertedBivector> {
        let g = solve_gauge(&p, gauge)?;
        Ok(omega0_by_inversion(&build_constraints(&g, p.theta)))
    };
    let small_theta = NCProfile { theta: LIMIT_COMMUTATIVE_THETA, ..base.clone() };
    let global = NCProfile { alpha: 0.0, ..base.clone() };
    vec![
        deviation_record(
            "limit_commutative",
            bracket(small_theta),
            &PolyBivector::canonical(),
            points,
            LIMIT_COMMUTATIVE_TOLERANCE,
        )
        .with_detail(format!("theta = {LIMIT_COMMUTATIVE_THETA:e}")),
        deviation_record(
            "limit_global",
            bracket(global),
            &PolyBivector::constant_theta(base.theta),
            points,
            LIMIT_GLOBAL_TOLERANCE,
        )
        .with_detail("alpha = 0"),
    ]
}

/// Rows `x,y,d,bx,by` for the profile density and the solved correction field.
pub fn profile_table(cfg: &RunConfig) -> Result<String> {
    let profile = cfg.profile.profile();
    profile.validate()?;
    let g = solve_gauge(&profile, cfg.profile.gauge)?;
    let d = d_from_profile(&profile);
    let mut csv = csv_header(&["d", "bx", "by"]);
    for pt in cfg.grid.points() {
        let dv = d.jet(pt.0, pt.1, 0).map(|j| j.value()).unwrap_or(f64::NAN);
        let (bx, by) = g.value(pt.0, pt.1);
        csv_row(&mut csv, pt, &[dv, bx, by]);
    }
    Ok(csv)
}
