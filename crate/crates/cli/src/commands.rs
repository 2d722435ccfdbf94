//! The subcommands. Each one resolves its space, computes rows in sample
//! order and hands a table plus a summary to the writers.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, TAU};
use std::path::PathBuf;

use cmpk_core::criteria::{
    angle_sum_check, first_variation_check, geodesic_multiplicity_probe, point_segment_test,
    pythagorean_test, right_angle_from_foot, right_angle_test, shoot_right_angle, triangle_comparison_test,
    DEFAULT_STEPS,
};
use cmpk_core::estimator::{estimate_bounds_with_samples, sample_segment_config, RegionOptions, SkipReason};
use cmpk_core::mesh::MeshSpace;
use cmpk_core::model::{comparison_angle, side_from_angle};
use cmpk_core::rng::index_rng;
use cmpk_core::{
    geodesic, region_report, theorem_c_defect_profile, with_space, CriteriaError, Criterion, EstimateOptions,
    GeodesicSpace, ModelParam, ProfileOptions, SideTriple, SpaceDescriptor, TestOptions, TestOutcome,
    Verdict, TOL,
};
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{ModelQuery, RunConfig};
use crate::output::{fmt_coords, fmt_f64, fmt_opt, summary, to_value, write_report, Table};
use crate::CliError;

/// `{:.10}` with trailing zeros removed.
pub fn trim_value(x: f64) -> String {
    let s = format!("{x:.10}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn fmt_defect(d: f64) -> String {
    if d == 0.0 {
        "0".into()
    } else {
        format!("{d:.3e}")
    }
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

/// Prints `value  defect=...`; the defect is the angle's excess over π/2
/// for `angle` and the round-trip angle error for `side`.
pub fn cmd_model(q: &ModelQuery) -> Result<String, CliError> {
    match q {
        ModelQuery::Angle { k, sides } => {
            let [a, b, c] = sides[..] else {
                return Err(CliError::Config(format!(
                    "--sides needs three values, got {}",
                    sides.len()
                )));
            };
            let k = ModelParam::new(*k).map_err(domain)?;
            let g = comparison_angle(k, SideTriple::new(a, b, c).map_err(domain)?).map_err(domain)?;
            Ok(format!("{}  defect={}", trim_value(g), fmt_defect(g - FRAC_PI_2)))
        }
        ModelQuery::Side { k, legs, gamma } => {
            let [a, b] = legs[..] else {
                return Err(CliError::Config(format!(
                    "--legs needs two values, got {}",
                    legs.len()
                )));
            };
            let k = ModelParam::new(*k).map_err(domain)?;
            let c = side_from_angle(k, a, b, *gamma).map_err(domain)?;
            let back = comparison_angle(k, SideTriple::new(a, b, c).map_err(domain)?).map_err(domain)?;
            Ok(format!("{}  defect={}", trim_value(c), fmt_defect(back - gamma)))
        }
    }
}

fn test_options(cfg: &RunConfig) -> TestOptions {
    TestOptions {
        tol: TOL.with_verdict_scale(cfg.tol_scale),
        ..TestOptions::default()
    }
}

fn point<S: GeodesicSpace>(space: &S, c: &[f64]) -> Result<S::Point, CliError> {
    space.point_from_coords(c).map_err(CliError::from)
}

fn center<S: GeodesicSpace>(space: &S, cfg: &RunConfig) -> Result<S::Point, CliError> {
    match &cfg.center {
        Some(c) => point(space, c),
        None => Ok(space.base_point()),
    }
}

/// Runs a subcommand and returns the paths written.
pub fn run_command(cfg: &RunConfig) -> Result<(PathBuf, PathBuf, String), CliError> {
    let any = cfg.space.build()?;
    let (table, sum, line) = with_space!(&any, s => match cfg.command.as_str() {
        "test" => cmd_test(s, cfg),
        "estimate" => cmd_estimate(s, cfg),
        "profile" => cmd_profile(s, cfg),
        "report" => cmd_report(s, cfg),
        other => Err(CliError::Config(format!("unknown command {other}"))),
    })?;
    let (rows, summary) = write_report(&cfg.out, &cfg.command, &table, &sum)?;
    Ok((rows, summary, line))
}

struct Row {
    index: usize,
    k: Option<f64>,
    reason: Option<SkipReason>,
    verdict: Option<Verdict>,
    defect: Option<f64>,
    defect_cba: Option<f64>,
    tolerance: Option<f64>,
    scale: Option<f64>,
    multi: Option<bool>,
    points: String,
    values: String,
}

const TEST_HEADER: [&str; 12] = [
    "index",
    "k",
    "status",
    "skip_reason",
    "verdict",
    "defect",
    "defect_cba",
    "tolerance",
    "scale",
    "multi_geodesic",
    "points",
    "values",
];

fn kv_points(points: &[(&str, Vec<f64>)]) -> String {
    points
        .iter()
        .map(|(n, c)| format!("{n}={}", fmt_coords(c)))
        .collect::<Vec<_>>()
        .join(";")
}

fn kv_values(values: &[(&str, f64)]) -> String {
    values
        .iter()
        .map(|(n, v)| format!("{n}={}", fmt_f64(*v)))
        .collect::<Vec<_>>()
        .join(";")
}

impl Row {
    fn empty(index: usize, k: Option<f64>) -> Self {
        Row {
            index,
            k,
            reason: None,
            verdict: None,
            defect: None,
            defect_cba: None,
            tolerance: None,
            scale: None,
            multi: None,
            points: String::new(),
            values: String::new(),
        }
    }

    fn skipped(index: usize, k: Option<f64>, e: &CriteriaError) -> Self {
        Row {
            reason: Some(SkipReason::from(e)),
            ..Row::empty(index, k)
        }
    }

    fn outcome(index: usize, o: &TestOutcome) -> Self {
        let points: Vec<(&str, Vec<f64>)> = o
            .snapshot
            .points
            .iter()
            .map(|(k, v)| (k.as_str(), v.clone()))
            .collect();
        let values: Vec<(&str, f64)> = o
            .snapshot
            .distances
            .iter()
            .map(|(k, v)| (k.as_str(), *v))
            .collect();
        Row {
            index,
            k: Some(o.k),
            reason: None,
            verdict: Some(o.verdict),
            defect: Some(o.defect),
            defect_cba: Some(o.defect_cba),
            tolerance: Some(o.tolerance),
            scale: Some(o.scale),
            multi: Some(o.multi_geodesic),
            points: kv_points(&points),
            values: kv_values(&values),
        }
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.index.to_string(),
            fmt_opt(self.k),
            if self.reason.is_some() { "skipped" } else { "ok" }.into(),
            self.reason.map(|r| r.as_str().to_string()).unwrap_or_default(),
            self.verdict.map(|v| v.as_str().to_string()).unwrap_or_default(),
            fmt_opt(self.defect),
            fmt_opt(self.defect_cba),
            fmt_opt(self.tolerance),
            fmt_opt(self.scale),
            self.multi.map(|m| m.to_string()).unwrap_or_default(),
            self.points.clone(),
            self.values.clone(),
        ]
    }
}

/// All rows produced by sample `i` of the `test` command.
fn test_sample<S: GeodesicSpace>(
    space: &S,
    c: &S::Point,
    cfg: &RunConfig,
    criterion: Criterion,
    i: usize,
    opts: &TestOptions,
    shoot: bool,
) -> Vec<Row> {
    let mut rng = index_rng(cfg.seed, i as u64);
    let r = cfg.radius;
    let per_k = |f: &dyn Fn(f64) -> Result<TestOutcome, CriteriaError>| -> Vec<Row> {
        cfg.k_grid
            .iter()
            .map(|&k| match f(k) {
                Ok(o) => Row::outcome(i, &o),
                Err(e) => Row::skipped(i, Some(k), &e),
            })
            .collect()
    };
    match criterion {
        Criterion::Pythagorean | Criterion::PointSegment | Criterion::Triangle => {
            let r1 = space.sample_ball(c, r, &mut rng);
            let r2 = space.sample_ball(c, r, &mut rng);
            let q = space.sample_ball(c, r, &mut rng);
            let seg = geodesic(space, &r1, &r2);
            per_k(&|k| match criterion {
                Criterion::Pythagorean => pythagorean_test(space, k, &q, &seg, opts),
                Criterion::PointSegment => point_segment_test(space, k, &q, &seg, opts),
                _ => triangle_comparison_test(space, k, &q, &r1, &r2, opts),
            })
        }
        Criterion::RightAngle => {
            let ra = if shoot {
                let p = space.sample_ball(c, 0.5 * r, &mut rng);
                let room = r - space.distance(c, &p);
                let h = TAU * rng.gen::<f64>();
                let l1 = room * (0.05 + 0.95 * rng.gen::<f64>());
                let l2 = room * (0.05 + 0.95 * rng.gen::<f64>());
                shoot_right_angle(space, &p, h, (l1, l2), &opts.tol)
            } else {
                let r1 = space.sample_ball(c, r, &mut rng);
                let r2 = space.sample_ball(c, r, &mut rng);
                let q = space.sample_ball(c, r, &mut rng);
                right_angle_from_foot(space, &q, &geodesic(space, &r1, &r2), opts)
            };
            match ra {
                Ok(ra) => per_k(&|k| right_angle_test(space, k, &ra, opts)),
                Err(e) => vec![Row::skipped(i, None, &e)],
            }
        }
        Criterion::FirstVariation | Criterion::AngleSum => {
            let r1 = space.sample_ball(c, r, &mut rng);
            let r2 = space.sample_ball(c, r, &mut rng);
            let q = space.sample_ball(c, r, &mut rng);
            let seg = geodesic(space, &r1, &r2);
            let t = seg.length * (0.1 + 0.8 * rng.gen::<f64>());
            let pts = kv_points(&[
                ("q", space.coords(&q)),
                ("r1", space.coords(&r1)),
                ("r2", space.coords(&r2)),
            ]);
            if criterion == Criterion::FirstVariation {
                match first_variation_check(space, &q, &seg, t, &DEFAULT_STEPS, opts) {
                    Ok(fv) => {
                        let err = fv.error_at(1e-4);
                        let mut values = vec![("t", t), ("angle", fv.angle), ("target", fv.target)];
                        values.extend(fv.steps.iter().zip(&fv.errors).map(|(h, e)| (step_name(*h), *e)));
                        vec![Row {
                            defect: err,
                            multi: Some(fv.multiple_geodesics),
                            points: pts,
                            values: kv_values(&values),
                            ..Row::empty(i, None)
                        }]
                    }
                    Err(e) => vec![Row::skipped(i, None, &e)],
                }
            } else {
                match angle_sum_check(space, &q, &seg, t, opts) {
                    Ok(a) => vec![Row {
                        verdict: Some(Verdict::from_flags(a.equality_ok, a.one_sided_ok)),
                        defect: Some(a.excess),
                        defect_cba: Some(a.excess),
                        tolerance: Some(a.tolerance),
                        points: pts,
                        values: kv_values(&[("t", t), ("angle1", a.angles[0]), ("angle2", a.angles[1])]),
                        ..Row::empty(i, None)
                    }],
                    Err(e) => vec![Row::skipped(i, None, &e)],
                }
            }
        }
        Criterion::Multiplicity => {
            let a = space.sample_ball(c, r, &mut rng);
            let b = space.sample_ball(c, r, &mut rng);
            let n = space.geodesics(&a, &b).len();
            vec![Row {
                defect: Some((n - 1) as f64),
                multi: Some(n > 1),
                points: kv_points(&[("a", space.coords(&a)), ("b", space.coords(&b))]),
                values: kv_values(&[("distance", space.distance(&a, &b)), ("geodesics", n as f64)]),
                ..Row::empty(i, None)
            }]
        }
    }
}

fn step_name(h: f64) -> &'static str {
    match -(h.log10().round() as i32) {
        2 => "err_h1e-2",
        3 => "err_h1e-3",
        4 => "err_h1e-4",
        5 => "err_h1e-5",
        _ => "err_h1e-6",
    }
}

#[derive(Default)]
struct Tally {
    rows: usize,
    ok: usize,
    skipped: usize,
    verdicts: BTreeMap<&'static str, usize>,
    min: Option<f64>,
    max: Option<f64>,
}

impl Tally {
    fn add(&mut self, r: &Row) {
        self.rows += 1;
        if r.reason.is_some() {
            self.skipped += 1;
            return;
        }
        self.ok += 1;
        if let Some(v) = r.verdict {
            *self.verdicts.entry(v.as_str()).or_default() += 1;
        }
        if let Some(d) = r.defect {
            self.min = Some(self.min.map_or(d, |m| m.min(d)));
            self.max = Some(self.max.map_or(d, |m| m.max(d)));
        }
    }

    fn counts(&self) -> Value {
        let mut m = serde_json::Map::new();
        m.insert("rows".into(), self.rows.into());
        m.insert("ok".into(), self.ok.into());
        m.insert("skipped".into(), self.skipped.into());
        for v in [
            Verdict::PassCbb,
            Verdict::PassCba,
            Verdict::PassBoth,
            Verdict::Fail,
        ] {
            m.insert(
                v.as_str().into(),
                self.verdicts.get(v.as_str()).copied().unwrap_or(0).into(),
            );
        }
        Value::Object(m)
    }
}

type Output = (Table, serde_json::Map<String, Value>, String);

fn cmd_test<S: GeodesicSpace>(space: &S, cfg: &RunConfig) -> Result<Output, CliError> {
    let criterion = cfg.criteria[0];
    let c = center(space, cfg)?;
    let opts = test_options(cfg);
    let shoot = space.exp(&c, 0.0, 1e-3 * cfg.radius).is_some();
    let rows: Vec<Vec<Row>> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| test_sample(space, &c, cfg, criterion, i, &opts, shoot))
        .collect();
    let mut table = Table::new(&TEST_HEADER);
    let mut total = Tally::default();
    let mut per_k: BTreeMap<usize, Tally> = BTreeMap::new();
    let mut skipped: BTreeMap<&'static str, usize> = BTreeMap::new();
    let mut multi = 0;
    for r in rows.iter().flatten() {
        table.push(r.cells());
        total.add(r);
        if let Some(j) = r.k.and_then(|k| cfg.k_grid.iter().position(|g| *g == k)) {
            per_k.entry(j).or_default().add(r);
        }
        if let Some(reason) = r.reason {
            *skipped.entry(reason.as_str()).or_default() += 1;
        }
        multi += usize::from(r.multi == Some(true));
    }
    let mut sum = summary(cfg, &space.id(), space.diagnostic_only());
    sum.insert("criterion".into(), criterion.as_str().into());
    sum.insert("counts".into(), total.counts());
    sum.insert(
        "fail_count".into(),
        total.verdicts.get("fail").copied().unwrap_or(0).into(),
    );
    sum.insert("min_defect".into(), to_value(&total.min));
    sum.insert("max_defect".into(), to_value(&total.max));
    sum.insert("multi_geodesic_rows".into(), multi.into());
    sum.insert("skipped".into(), to_value(&skipped));
    let per_k: Vec<Value> = per_k
        .iter()
        .map(|(j, t)| {
            json!({
                "k": cfg.k_grid[*j],
                "counts": t.counts(),
                "min_defect": t.min,
                "max_defect": t.max,
            })
        })
        .collect();
    sum.insert("per_k".into(), Value::Array(per_k));
    let line = format!(
        "{} on {}: {} rows, {} skipped, {} fail",
        criterion,
        space.id(),
        total.rows,
        total.skipped,
        total.verdicts.get("fail").copied().unwrap_or(0)
    );
    Ok((table, sum, line))
}

fn estimate_options(cfg: &RunConfig) -> EstimateOptions {
    EstimateOptions {
        criteria: cfg.criteria.clone(),
        bracket: cfg.bracket,
        resolution: cfg.resolution,
        samples: cfg.samples,
        seed: cfg.seed,
        test: test_options(cfg),
        ..EstimateOptions::default()
    }
}

fn estimator_err(e: cmpk_core::EstimatorError) -> CliError {
    match e {
        cmpk_core::EstimatorError::InvalidOptions(m) => CliError::Config(m),
        e => CliError::Domain(e.to_string()),
    }
}

fn bound_text(b: &cmpk_core::estimator::Bound) -> String {
    match b.k {
        Some(k) => trim_value(k),
        None => to_value(&b.status).as_str().unwrap_or_default().to_string(),
    }
}

fn cmd_estimate<S: GeodesicSpace>(space: &S, cfg: &RunConfig) -> Result<Output, CliError> {
    let c = center(space, cfg)?;
    let opts = estimate_options(cfg);
    let (est, set) = estimate_bounds_with_samples(space, &c, cfg.radius, &opts).map_err(estimator_err)?;
    let mut table = Table::new(&[
        "index",
        "criterion",
        "scale",
        "k_cbb",
        "defect_at_k_cbb",
        "k_cba",
        "defect_cba_at_k_cba",
        "points",
    ]);
    let at = |k: Option<f64>| k.and_then(|k| ModelParam::new(k).ok());
    for m in &set.configs {
        let lo = at(est.k_cbb.k)
            .map(|k| m.evaluate(k, &opts.test))
            .unwrap_or_default();
        let hi = at(est.k_cba.k)
            .map(|k| m.evaluate(k, &opts.test))
            .unwrap_or_default();
        for crit in &opts.criteria {
            let pick = |v: &[(Criterion, Option<cmpk_core::Defects>, _, f64)], cbb: bool| {
                v.iter()
                    .find(|e| e.0 == *crit)
                    .and_then(|e| e.1)
                    .map(|d| if cbb { d.cbb } else { d.cba })
            };
            table.push(vec![
                m.index.to_string(),
                crit.as_str().into(),
                fmt_f64(m.scale),
                fmt_opt(est.k_cbb.k),
                fmt_opt(pick(&lo, true)),
                fmt_opt(est.k_cba.k),
                fmt_opt(pick(&hi, false)),
                kv_points(&[("q", m.q.clone()), ("r1", m.r1.clone()), ("r2", m.r2.clone())]),
            ]);
        }
    }
    let mut sum = summary(cfg, &space.id(), space.diagnostic_only());
    sum.insert(
        "counts".into(),
        json!({
            "samples": est.samples,
            "used": est.used,
            "lost": est.lost,
            "rejected": est.rejected.values().sum::<usize>(),
        }),
    );
    sum.insert("estimate".into(), to_value(&est));
    let line = format!(
        "{}: k_cbb = {}, k_cba = {} ({} configurations)",
        space.id(),
        bound_text(&est.k_cbb),
        bound_text(&est.k_cba),
        est.used
    );
    Ok((table, sum, line))
}

fn cmd_profile<S: GeodesicSpace>(space: &S, cfg: &RunConfig) -> Result<Output, CliError> {
    let c = center(space, cfg)?;
    let popts = ProfileOptions {
        eps: cfg.eps.clone(),
        per_eps: cfg.samples,
        seed: cfg.seed,
        ..ProfileOptions::default()
    };
    let p = theorem_c_defect_profile(space, &c, &popts, &test_options(cfg)).map_err(estimator_err)?;
    let mut table = Table::new(&["eps", "chi", "used", "skip_fraction"]);
    for j in 0..p.eps.len() {
        table.push(vec![
            fmt_f64(p.eps[j]),
            fmt_f64(p.chi[j]),
            p.used[j].to_string(),
            fmt_f64(p.skip_fraction[j]),
        ]);
    }
    let mut sum = summary(cfg, &space.id(), space.diagnostic_only());
    sum.insert(
        "counts".into(),
        json!({"rungs": p.eps.len(), "per_eps": cfg.samples, "used": p.used.iter().sum::<usize>()}),
    );
    sum.insert("profile".into(), to_value(&p));
    let line = format!(
        "{}: {} (chi at smallest eps {})",
        space.id(),
        p.classification.as_str(),
        fmt_f64(p.chi[p.chi.len() - 1])
    );
    Ok((table, sum, line))
}

fn cmd_report<S: GeodesicSpace>(space: &S, cfg: &RunConfig) -> Result<Output, CliError> {
    let centers: Vec<S::Point> = if cfg.centers.is_empty() {
        vec![center(space, cfg)?]
    } else {
        cfg.centers
            .iter()
            .map(|c| point(space, c))
            .collect::<Result<_, _>>()?
    };
    let opts = RegionOptions {
        estimate: estimate_options(cfg),
        ..RegionOptions::default()
    };
    let report = region_report(space, &centers, cfg.radius, &opts);
    let mut table = Table::new(&[
        "center",
        "k_cbb_status",
        "k_cbb",
        "k_cba_status",
        "k_cba",
        "classification",
        "chi_min",
        "chi_ratio",
        "multi_pairs",
        "errors",
    ]);
    let status = |s: &cmpk_core::estimator::BoundStatus| to_value(s).as_str().unwrap_or_default().to_string();
    let mut errors = 0;
    for row in &report.rows {
        errors += usize::from(!row.errors.is_empty());
        let est = row.estimate.as_ref();
        let prof = row.profile.as_ref();
        table.push(vec![
            fmt_coords(&row.center),
            est.map(|e| status(&e.k_cbb.status)).unwrap_or_default(),
            fmt_opt(est.and_then(|e| e.k_cbb.k)),
            est.map(|e| status(&e.k_cba.status)).unwrap_or_default(),
            fmt_opt(est.and_then(|e| e.k_cba.k)),
            prof.map(|p| p.classification.as_str().to_string())
                .unwrap_or_default(),
            fmt_opt(prof.map(|p| p.chi[p.chi.len() - 1])),
            fmt_opt(prof.and_then(|p| p.ratio)),
            row.multiplicity.total_multi().to_string(),
            row.errors.join("; "),
        ]);
    }
    let mut sum = summary(cfg, &space.id(), space.diagnostic_only());
    sum.insert(
        "counts".into(),
        json!({"centers": report.rows.len(), "errors": errors}),
    );
    sum.insert("report".into(), to_value(&report));
    let line = format!(
        "{}: {} centers, {} with errors",
        space.id(),
        report.rows.len(),
        errors
    );
    Ok((table, sum, line))
}

/// Pair distances against an analytic reference plus a diagnostic
/// Pythagorean sweep. The reference is the unit sphere when every vertex
/// has norm 1, the straight-line distance otherwise.
pub fn run_mesh(cfg: &RunConfig) -> Result<(PathBuf, PathBuf, String), CliError> {
    let SpaceDescriptor::Mesh { .. } = &cfg.space else {
        return Err(CliError::Config("the mesh command needs a mesh space".into()));
    };
    let any = cfg.space.build()?;
    let cmpk_core::AnySpace::Mesh(space) = &any else {
        unreachable!("mesh descriptors build mesh spaces")
    };
    let (table, mut sum, line) = mesh_pairs(space, cfg)?;
    let (sweep_table, sweep) = mesh_sweep(space, cfg)?;
    sum.insert("sweep".into(), sweep);
    std::fs::create_dir_all(&cfg.out).map_err(|e| CliError::Io(format!("{}: {e}", cfg.out.display())))?;
    sweep_table.write(&cfg.out.join("mesh_sweep_rows.csv"))?;
    let (rows, summary) = write_report(&cfg.out, "mesh", &table, &sum)?;
    Ok((rows, summary, line))
}

fn mesh_pairs(space: &MeshSpace, cfg: &RunConfig) -> Result<Output, CliError> {
    let verts = space.mesh().vertices();
    let spherical = verts
        .iter()
        .all(|v| ((v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt() - 1.0).abs() <= 1e-6);
    let n = verts.len();
    let rows: Vec<Option<(usize, usize, f64, f64)>> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = index_rng(cfg.seed, i as u64);
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a == b {
                return None;
            }
            let (x, y) = (verts[a], verts[b]);
            let reference = if spherical {
                let dot = x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
                let cross = [
                    x[1] * y[2] - x[2] * y[1],
                    x[2] * y[0] - x[0] * y[2],
                    x[0] * y[1] - x[1] * y[0],
                ];
                (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2])
                    .sqrt()
                    .atan2(dot)
            } else {
                ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2) + (x[2] - y[2]).powi(2)).sqrt()
            };
            Some((
                a,
                b,
                space.distance(&space.vertex(a), &space.vertex(b)),
                reference,
            ))
        })
        .collect();
    let mut table = Table::new(&["index", "a", "b", "graph_distance", "reference", "rel_error"]);
    let mut errs = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        if let Some((a, b, d, reference)) = r {
            let e = (d - reference).abs() / reference;
            errs.push(e);
            table.push(vec![
                i.to_string(),
                a.to_string(),
                b.to_string(),
                fmt_f64(*d),
                fmt_f64(*reference),
                fmt_f64(e),
            ]);
        }
    }
    errs.sort_by(f64::total_cmp);
    let median = (!errs.is_empty()).then(|| errs[errs.len() / 2]);
    let mut sum = summary(cfg, &space.id(), true);
    sum.insert(
        "counts".into(),
        json!({"pairs": errs.len(), "skipped": cfg.samples - errs.len()}),
    );
    sum.insert(
        "reference".into(),
        if spherical { "unit_sphere" } else { "euclidean" }.into(),
    );
    sum.insert("median_rel_error".into(), to_value(&median));
    sum.insert("max_rel_error".into(), to_value(&errs.last()));
    sum.insert("error_bar".into(), to_value(&space.error_bar()));
    sum.insert("vertices".into(), n.into());
    sum.insert("nodes".into(), space.graph().node_count().into());
    let line = format!(
        "{}: median relative error {} over {} pairs (diagnostic only)",
        space.id(),
        median.map(trim_value).unwrap_or_else(|| "n/a".into()),
        errs.len()
    );
    Ok((table, sum, line))
}

/// Draws for the diagnostic sweep.
const SWEEP_SAMPLES: usize = 40;

fn mesh_sweep(space: &MeshSpace, cfg: &RunConfig) -> Result<(Table, Value), CliError> {
    let c = center(space, cfg)?;
    let opts = test_options(cfg);
    let rows: Vec<Vec<Row>> = (0..SWEEP_SAMPLES)
        .into_par_iter()
        .map(|i| {
            let mut rng = index_rng(cfg.seed ^ 0x5eed, i as u64);
            match sample_segment_config(space, &c, cfg.radius, &mut rng, 0.0, &opts) {
                Ok(sc) => cfg
                    .k_grid
                    .iter()
                    .map(|&k| match pythagorean_test(space, k, &sc.q, &sc.seg, &opts) {
                        Ok(o) => Row::outcome(i, &o),
                        Err(e) => Row::skipped(i, Some(k), &e),
                    })
                    .collect(),
                Err(reason) => vec![Row {
                    reason: Some(reason),
                    ..Row::empty(i, None)
                }],
            }
        })
        .collect();
    let mut table = Table::new(&TEST_HEADER);
    let mut total = Tally::default();
    for r in rows.iter().flatten() {
        table.push(r.cells());
        total.add(r);
    }
    let multi = geodesic_multiplicity_probe(space, &c, cfg.radius, 200, cfg.seed);
    Ok((
        table,
        json!({
            "criterion": "pythagorean",
            "samples": SWEEP_SAMPLES,
            "counts": total.counts(),
            "min_defect": total.min,
            "max_defect": total.max,
            "multiplicity": to_value(&multi),
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_trimming() {
        assert_eq!(trim_value(FRAC_PI_2), "1.5707963268");
        assert_eq!(trim_value(0.7000000000001), "0.7");
        assert_eq!(trim_value(-1e-14), "0");
        assert_eq!(trim_value(2.0), "2");
    }

    #[test]
    #[allow(clippy::approx_constant)] // the literal a user would type
    fn model_queries() {
        let q = ModelQuery::Angle {
            k: 0.0,
            sides: vec![3.0, 4.0, 5.0],
        };
        assert_eq!(cmd_model(&q).unwrap(), "1.5707963268  defect=0");
        let q = ModelQuery::Side {
            k: 1.0,
            legs: vec![1.5707963268, 1.5707963268],
            gamma: 0.7,
        };
        assert!(cmd_model(&q).unwrap().starts_with("0.7  defect="));
        let q = ModelQuery::Angle {
            k: 1.0,
            sides: vec![3.0, 3.0, 3.0],
        };
        assert!(matches!(cmd_model(&q), Err(CliError::Domain(_))));
    }
}
