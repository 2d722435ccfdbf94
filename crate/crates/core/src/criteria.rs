//! Comparison criteria as executable predicates with signed defects.
//!
//! Every test reports two extremes of its defect: the one that decides the
//! lower-bound (CBB) verdict and the one that decides the upper-bound (CBA)
//! verdict. [`DefectSign`] records which direction counts as passing.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{self, ModelError, ModelParam, SideTriple};
use crate::spaces::{eval, subsegment, GeodesicSegment, GeodesicSpace, Seg};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CriteriaError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("point lies on the segment (distance {distance:e})")]
    PointOnSegment { distance: f64 },
    #[error("foot at t = {t} is within the boundary margin of a segment of length {length}")]
    FootOnBoundary { t: f64, length: f64 },
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("no right angle can be constructed: {0}")]
    RightAngleUnavailable(String),
    #[error("angle ladder failed: {0}")]
    LadderFailure(String),
}

pub type Result<T> = std::result::Result<T, CriteriaError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    Pythagorean,
    RightAngle,
    PointSegment,
    Triangle,
    FirstVariation,
    AngleSum,
    Multiplicity,
}

impl Criterion {
    pub const ALL: [Criterion; 7] = [
        Criterion::Pythagorean,
        Criterion::RightAngle,
        Criterion::PointSegment,
        Criterion::Triangle,
        Criterion::FirstVariation,
        Criterion::AngleSum,
        Criterion::Multiplicity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::Pythagorean => "pythagorean",
            Criterion::RightAngle => "right-angle",
            Criterion::PointSegment => "point-segment",
            Criterion::Triangle => "triangle",
            Criterion::FirstVariation => "first-variation",
            Criterion::AngleSum => "angle-sum",
            Criterion::Multiplicity => "multiplicity",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Criterion {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Criterion::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Criterion::ALL.iter().map(|c| c.as_str()).collect();
                format!("unknown criterion {s:?} (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    PassCbb,
    PassCba,
    PassBoth,
    Fail,
}

impl Verdict {
    pub fn from_flags(cbb: bool, cba: bool) -> Self {
        match (cbb, cba) {
            (true, true) => Verdict::PassBoth,
            (true, false) => Verdict::PassCbb,
            (false, true) => Verdict::PassCba,
            (false, false) => Verdict::Fail,
        }
    }

    pub fn passes_cbb(self) -> bool {
        matches!(self, Verdict::PassCbb | Verdict::PassBoth)
    }

    pub fn passes_cba(self) -> bool {
        matches!(self, Verdict::PassCba | Verdict::PassBoth)
    }

    /// Two verdicts point the same way if some bound passes in both.
    pub fn compatible(self, other: Verdict) -> bool {
        (self.passes_cbb() && other.passes_cbb()) || (self.passes_cba() && other.passes_cba())
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::PassCbb => "pass_cbb",
            Verdict::PassCba => "pass_cba",
            Verdict::PassBoth => "pass_both",
            Verdict::Fail => "fail",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which sign of the defect the lower-bound inequality asks for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DefectSign {
    /// CBB holds when the defect is at most `tol` (comparison angle at most π/2).
    CbbNonPositive,
    /// CBB holds when the defect is at least `-tol` (space angles or distances
    /// at least their model values).
    CbbNonNegative,
}

/// The two deciding extremes of a defect.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Defects {
    pub cbb: f64,
    pub cba: f64,
}

impl Defects {
    pub fn passes(&self, sign: DefectSign, tol: f64) -> (bool, bool) {
        match sign {
            DefectSign::CbbNonPositive => (self.cbb <= tol, self.cba >= -tol),
            DefectSign::CbbNonNegative => (self.cbb >= -tol, self.cba <= tol),
        }
    }

    pub fn verdict(&self, sign: DefectSign, tol: f64) -> Verdict {
        let (a, b) = self.passes(sign, tol);
        Verdict::from_flags(a, b)
    }

    fn merge(self, o: Defects, sign: DefectSign) -> Defects {
        match sign {
            DefectSign::CbbNonPositive => Defects {
                cbb: self.cbb.max(o.cbb),
                cba: self.cba.min(o.cba),
            },
            DefectSign::CbbNonNegative => Defects {
                cbb: self.cbb.min(o.cbb),
                cba: self.cba.max(o.cba),
            },
        }
    }
}

/// Points and distances of a tested configuration, keyed by name.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfigSnapshot {
    pub points: BTreeMap<String, Vec<f64>>,
    pub distances: BTreeMap<String, f64>,
}

impl ConfigSnapshot {
    fn point<S: GeodesicSpace + ?Sized>(mut self, space: &S, name: &str, p: &S::Point) -> Self {
        self.points.insert(name.into(), space.coords(p));
        self
    }

    fn dist(mut self, name: &str, d: f64) -> Self {
        self.distances.insert(name.into(), d);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub criterion: Criterion,
    pub k: f64,
    /// Diameter of the configuration.
    pub scale: f64,
    /// Extreme defect deciding the CBB verdict.
    pub defect: f64,
    /// Extreme defect deciding the CBA verdict.
    pub defect_cba: f64,
    pub sign: DefectSign,
    pub tolerance: f64,
    pub verdict: Verdict,
    /// More than one minimal geodesic or foot entered the evaluation.
    pub multi_geodesic: bool,
    pub snapshot: ConfigSnapshot,
}

impl TestOutcome {
    #[allow(clippy::too_many_arguments)]
    fn build(
        criterion: Criterion,
        k: f64,
        scale: f64,
        d: Defects,
        sign: DefectSign,
        tolerance: f64,
        multi_geodesic: bool,
        snapshot: ConfigSnapshot,
    ) -> Self {
        TestOutcome {
            criterion,
            k,
            scale,
            defect: d.cbb,
            defect_cba: d.cba,
            sign,
            tolerance,
            verdict: d.verdict(sign, tolerance),
            multi_geodesic,
            snapshot,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FootOptions {
    /// Number of grid samples before refinement.
    pub grid: usize,
    /// Refinement stops at this fraction of the segment length.
    pub rel_tol: f64,
    /// Interior margin as a fraction of the segment length.
    pub margin: f64,
}

impl Default for FootOptions {
    fn default() -> Self {
        FootOptions {
            grid: 64,
            rel_tol: 1e-8,
            margin: crate::TOL.interior_margin,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderOptions {
    /// First rung as a fraction of the shorter geodesic.
    pub t0_frac: f64,
    pub ratio: f64,
    pub rungs: usize,
}

impl Default for LadderOptions {
    fn default() -> Self {
        LadderOptions {
            t0_frac: 0.1,
            ratio: 0.5,
            rungs: 8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestOptions {
    pub tol: Tolerances,
    pub foot: FootOptions,
    pub ladder: LadderOptions,
    /// Probe count for the point-to-segment test.
    pub probes: usize,
}

impl Default for TestOptions {
    fn default() -> Self {
        TestOptions {
            tol: Tolerances::DEFAULT,
            foot: FootOptions::default(),
            ladder: LadderOptions::default(),
            probes: 17,
        }
    }
}

/// Closest point to `q` on a segment.
#[derive(Clone, Debug)]
pub struct FootResult<P, G> {
    pub segment: GeodesicSegment<P, G>,
    /// Arclength of the chosen minimizer.
    pub t: f64,
    /// `|q[r1 r2]|`.
    pub distance: f64,
    pub interior: bool,
    /// All separated minimizers within the tie tolerance, in increasing `t`.
    pub minimizers: Vec<f64>,
    /// Adjacent grid samples tie with the minimum: a whole arc of feet.
    pub plateau: bool,
}

impl<P, G> FootResult<P, G> {
    pub fn is_multiple(&self) -> bool {
        self.plateau || self.minimizers.len() > 1
    }
}

pub type Foot<S> = FootResult<<S as GeodesicSpace>::Point, <S as GeodesicSpace>::Path>;

fn golden(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Bisection on the sign of a central difference near `t`, which locates a
/// smooth or kinked minimum far below the resolution of value comparisons.
fn polish(f: &impl Fn(f64) -> f64, t: f64, len: f64) -> f64 {
    let h = 1e-6 * len;
    let w = 1e-5 * len;
    let (mut a, mut b) = ((t - w).max(h), (t + w).min(len - h));
    if a >= b {
        return t;
    }
    let g = |x: f64| f(x + h) - f(x - h);
    if !(g(a) < 0.0 && g(b) > 0.0) {
        return t;
    }
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m);
        if gm < 0.0 {
            a = m;
        } else if gm > 0.0 {
            b = m;
        } else {
            return m;
        }
    }
    0.5 * (a + b)
}

/// Global minimizer of `t ↦ |q seg(t)|` with an interior flag; does not fail
/// on boundary feet.
pub fn locate_foot<S: GeodesicSpace + ?Sized>(
    space: &S,
    q: &S::Point,
    seg: &Seg<S>,
    opts: &FootOptions,
    tol: &Tolerances,
) -> Result<Foot<S>> {
    let len = seg.length;
    if !(len > tol.geo) {
        return Err(CriteriaError::Degenerate(format!(
            "segment length {len:e} is below the geodesic tolerance"
        )));
    }
    let f = |t: f64| space.distance(q, &eval(space, seg, t));
    let n = opts.grid.max(3);
    let step = len / (n - 1) as f64;
    let ts: Vec<f64> = (0..n)
        .map(|i| if i == n - 1 { len } else { i as f64 * step })
        .collect();
    let vals: Vec<f64> = ts.iter().map(|&t| f(t)).collect();

    let mut cands: Vec<usize> = (0..n)
        .filter(|&i| (i == 0 || vals[i] <= vals[i - 1]) && (i == n - 1 || vals[i] <= vals[i + 1]))
        .collect();
    cands.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]).then(i.cmp(&j)));
    cands.truncate(8);
    let refine_tol = opts.rel_tol * len;
    let mut refined: Vec<(f64, f64)> = cands
        .iter()
        .map(|&i| {
            let lo = ts[i.saturating_sub(1)];
            let hi = ts[(i + 1).min(n - 1)];
            let (t, v) = golden(&f, lo, hi, refine_tol);
            if vals[i] < v {
                (ts[i], vals[i])
            } else {
                (t, v)
            }
        })
        .collect();
    refined.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)));
    let (mut t_best, d_best) = refined[0];
    let tie = tol.tie * d_best.max(1.0);

    let plateau = vals
        .windows(2)
        .any(|w| w[0] <= d_best + tie && w[1] <= d_best + tie);
    let mut minimizers: Vec<f64> = refined
        .iter()
        .filter(|(_, v)| *v <= d_best + tie)
        .map(|(t, _)| *t)
        .collect();
    minimizers.sort_by(f64::total_cmp);
    minimizers.dedup_by(|b, a| (*b - *a).abs() <= step);

    if !plateau {
        let tp = polish(&f, t_best, len);
        if f(tp) <= d_best + 4.0 * f64::EPSILON * d_best.max(1.0) {
            t_best = tp;
        }
    }
    let distance = f(t_best).min(d_best);
    if distance < tol.geo {
        return Err(CriteriaError::PointOnSegment { distance });
    }
    if let Some(m) = minimizers
        .iter_mut()
        .min_by(|a, b| (**a - t_best).abs().total_cmp(&(**b - t_best).abs()))
    {
        *m = t_best;
    }
    let margin = opts.margin * len;
    Ok(FootResult {
        segment: seg.clone(),
        t: t_best,
        distance,
        interior: t_best >= margin && t_best <= len - margin,
        minimizers,
        plateau,
    })
}

/// Foot of the perpendicular from `q`; fails unless the foot is interior.
pub fn foot_of_perpendicular<S: GeodesicSpace + ?Sized>(
    space: &S,
    q: &S::Point,
    seg: &Seg<S>,
    opts: &FootOptions,
    tol: &Tolerances,
) -> Result<Foot<S>> {
    let foot = locate_foot(space, q, seg, opts, tol)?;
    if !foot.interior {
        return Err(CriteriaError::FootOnBoundary {
            t: foot.t,
            length: seg.length,
        });
    }
    Ok(foot)
}

/// Distances entering the Pythagorean criterion at one foot.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PythagoreanLegs {
    pub d_qp: f64,
    pub d_pr: [f64; 2],
    pub d_qr: [f64; 2],
}

/// Pre-measured data for the Pythagorean criterion; evaluating at another
/// `k` needs no further distance queries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PythagoreanData {
    pub feet: Vec<PythagoreanLegs>,
    pub scale: f64,
    pub multiple: bool,
}

impl PythagoreanData {
    pub fn measure<S: GeodesicSpace + ?Sized>(space: &S, q: &S::Point, foot: &Foot<S>) -> Self {
        let seg = &foot.segment;
        let d_qr = [space.distance(q, &seg.start), space.distance(q, &seg.end)];
        let margin = foot.segment.length * crate::TOL.interior_margin;
        let mut feet = Vec::new();
        for &t in &foot.minimizers {
            if t < margin || t > seg.length - margin {
                continue;
            }
            let d_qp = if t == foot.t {
                foot.distance
            } else {
                space.distance(q, &eval(space, seg, t))
            };
            feet.push(PythagoreanLegs {
                d_qp,
                d_pr: [t, seg.length - t],
                d_qr,
            });
        }
        if feet.is_empty() {
            feet.push(PythagoreanLegs {
                d_qp: foot.distance,
                d_pr: [foot.t, seg.length - foot.t],
                d_qr,
            });
        }
        let scale = seg.length.max(d_qr[0]).max(d_qr[1]).max(foot.distance);
        PythagoreanData {
            feet,
            scale,
            multiple: foot.is_multiple(),
        }
    }

    pub fn evaluate(&self, k: ModelParam) -> Result<Defects> {
        let mut out: Option<Defects> = None;
        for leg in &self.feet {
            for i in 0..2 {
                if leg.d_pr[i] < crate::TOL.geo {
                    return Err(CriteriaError::Degenerate(
                        "foot coincides with an endpoint".into(),
                    ));
                }
                let d = model::pythagorean_defect(k, leg.d_qp, leg.d_pr[i], leg.d_qr[i])?;
                let d = Defects { cbb: d, cba: d };
                out = Some(match out {
                    None => d,
                    Some(o) => o.merge(d, DefectSign::CbbNonPositive),
                });
            }
        }
        Ok(out.expect("at least one foot"))
    }
}

/// Pythagorean criterion at the interior foot of the perpendicular from `q`
/// to `seg`.
pub fn pythagorean_test<S: GeodesicSpace + ?Sized>(
    space: &S,
    k: f64,
    q: &S::Point,
    seg: &Seg<S>,
    opts: &TestOptions,
) -> Result<TestOutcome> {
    let km = ModelParam::new(k)?;
    let foot = foot_of_perpendicular(space, q, seg, &opts.foot, &opts.tol)?;
    let data = PythagoreanData::measure(space, q, &foot);
    let d = data.evaluate(km)?;
    let p = eval(space, seg, foot.t);
    let leg = data.feet[0];
    let snapshot = ConfigSnapshot::default()
        .point(space, "q", q)
        .point(space, "r1", &seg.start)
        .point(space, "r2", &seg.end)
        .point(space, "p", &p)
        .dist("qp", foot.distance)
        .dist("pr1", leg.d_pr[0])
        .dist("pr2", leg.d_pr[1])
        .dist("qr1", leg.d_qr[0])
        .dist("qr2", leg.d_qr[1])
        .dist("t", foot.t);
    Ok(TestOutcome::build(
        Criterion::Pythagorean,
        k,
        data.scale,
        d,
        DefectSign::CbbNonPositive,
        opts.tol.angle_verdict(data.scale),
        data.multiple,
        snapshot,
    ))
}

/// A right angle at `p` with legs ending at `q` and `r`.
#[derive(Clone, Debug)]
pub struct RightAngle<P> {
    pub p: P,
    pub q: P,
    pub r: P,
    pub d_pq: f64,
    pub d_pr: f64,
    pub d_qr: f64,
}

/// Shoots two legs from `p` along headings `h` and `h + π/2` and checks that
/// both are minimal and that they meet at a right angle.
pub fn shoot_right_angle<S: GeodesicSpace + ?Sized>(
    space: &S,
    p: &S::Point,
    heading: f64,
    legs: (f64, f64),
    tol: &Tolerances,
) -> Result<RightAngle<S::Point>> {
    let (l1, l2) = legs;
    if !(l1 > tol.geo && l2 > tol.geo) {
        return Err(CriteriaError::Degenerate(format!(
            "legs ({l1}, {l2}) are too short"
        )));
    }
    let h2 = heading + FRAC_PI_2;
    let unavailable = || {
        CriteriaError::RightAngleUnavailable("the space cannot shoot geodesics in these directions".into())
    };
    let q = space.exp(p, heading, l1).ok_or_else(unavailable)?;
    let r = space.exp(p, h2, l2).ok_or_else(unavailable)?;
    let d_pq = space.distance(p, &q);
    let d_pr = space.distance(p, &r);
    for (d, l) in [(d_pq, l1), (d_pr, l2)] {
        if (d - l).abs() > tol.geo * l.max(1.0) {
            return Err(CriteriaError::RightAngleUnavailable(format!(
                "a leg of length {l} is not minimal (endpoint distance {d})"
            )));
        }
    }
    // The shot directions must span a right angle in the space itself.
    let hc = 1e-4 * l1.min(l2);
    let qc = space.exp(p, heading, hc).ok_or_else(unavailable)?;
    let rc = space.exp(p, h2, hc).ok_or_else(unavailable)?;
    let sides = SideTriple::new(
        space.distance(p, &qc),
        space.distance(p, &rc),
        space.distance(&qc, &rc),
    )?;
    let gamma = model::comparison_angle(ModelParam::FLAT, sides)?;
    if (gamma - FRAC_PI_2).abs() > 1e-6 {
        return Err(CriteriaError::RightAngleUnavailable(format!(
            "directions at the vertex span {gamma} instead of π/2"
        )));
    }
    let d_qr = space.distance(&q, &r);
    Ok(RightAngle {
        p: p.clone(),
        q,
        r,
        d_pq,
        d_pr,
        d_qr,
    })
}

/// Right angle from a foot of perpendicular, for spaces that cannot shoot
/// geodesics: the legs are `[p q]` and `[p r2]`.
pub fn right_angle_from_foot<S: GeodesicSpace + ?Sized>(
    space: &S,
    q: &S::Point,
    seg: &Seg<S>,
    opts: &TestOptions,
) -> Result<RightAngle<S::Point>> {
    let foot = foot_of_perpendicular(space, q, seg, &opts.foot, &opts.tol).map_err(|e| match e {
        CriteriaError::FootOnBoundary { .. } | CriteriaError::PointOnSegment { .. } => {
            CriteriaError::RightAngleUnavailable(e.to_string())
        }
        e => e,
    })?;
    let p = eval(space, seg, foot.t);
    Ok(RightAngle {
        d_pq: foot.distance,
        d_pr: seg.length - foot.t,
        d_qr: space.distance(q, &seg.end),
        p,
        q: q.clone(),
        r: seg.end.clone(),
    })
}

/// Pythagorean criterion on an already constructed right angle.
pub fn right_angle_test<S: GeodesicSpace + ?Sized>(
    space: &S,
    k: f64,
    ra: &RightAngle<S::Point>,
    opts: &TestOptions,
) -> Result<TestOutcome> {
    let km = ModelParam::new(k)?;
    let delta = model::pythagorean_defect(km, ra.d_pq, ra.d_pr, ra.d_qr)?;
    let scale = ra.d_pq.max(ra.d_pr).max(ra.d_qr);
    let snapshot = ConfigSnapshot::default()
        .point(space, "p", &ra.p)
        .point(space, "q", &ra.q)
        .point(space, "r", &ra.r)
        .dist("pq", ra.d_pq)
        .dist("pr", ra.d_pr)
        .dist("qr", ra.d_qr);
    Ok(TestOutcome::build(
        Criterion::RightAngle,
        k,
        scale,
        Defects {
            cbb: delta,
            cba: delta,
        },
        DefectSign::CbbNonPositive,
        opts.tol.angle_verdict(scale),
        false,
        snapshot,
    ))
}

/// Pythagorean criterion on a right angle shot from `p` (heading `h` for
/// the first leg, `h + π/2` for the second).
pub fn right_angle_pythagorean_test<S: GeodesicSpace + ?Sized>(
    space: &S,
    k: f64,
    p: &S::Point,
    heading: f64,
    legs: (f64, f64),
    opts: &TestOptions,
) -> Result<TestOutcome> {
    let ra = shoot_right_angle(space, p, heading, legs, &opts.tol)?;
    right_angle_test(space, k, &ra, opts)
}

/// Right-angle criterion on a configuration built from a foot of
/// perpendicular.
pub fn right_angle_test_from_foot<S: GeodesicSpace + ?Sized>(
    space: &S,
    k: f64,
    q: &S::Point,
    seg: &Seg<S>,
    opts: &TestOptions,
) -> Result<TestOutcome> {
    let ra = right_angle_from_foot(space, q, seg, opts)?;
    right_angle_test(space, k, &ra, opts)
}

/// Chebyshev–Lobatto nodes on `[0, len]`, endpoints included.
pub fn lobatto_nodes(len: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|i| {
            if i == 0 {
                0.0
            } else if i == n - 1 {
                len
            } else {
                0.5 * len * (1.0 - (PI * i as f64 / (n - 1) as f64).cos())
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSegmentData {
    pub d_qp: f64,
    pub d_qr: f64,
    pub length: f64,
    /// `(t, |q seg(t)|)` at the probes.
    pub probes: Vec<(f64, f64)>,
    pub scale: f64,
}

impl PointSegmentData {
    pub fn measure<S: GeodesicSpace + ?Sized>(space: &S, q: &S::Point, seg: &Seg<S>, n: usize) -> Self {
        let d_qp = space.distance(q, &seg.start);
        let d_qr = space.distance(q, &seg.end);
        let probes = lobatto_nodes(seg.length, n)
            .into_iter()
            .map(|t| (t, space.distance(q, &eval(space, seg, t))))
            .collect();
        PointSegmentData {
            d_qp,
            d_qr,
            length: seg.length,
            probes,
            scale: seg.length.max(d_qp).max(d_qr),
        }
    }

    pub fn evaluate(&self, k: ModelParam) -> Result<Defects> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &(t, d) in &self.probes {
            let model = model::comparison_distance_at(k, self.d_qp, self.d_qr, self.length, t)?;
            lo = lo.min(d - model);
            hi = hi.max(d - model);
        }
        Ok(Defects { cbb: lo, cba: hi })
    }
}

/// Distance from `q` to points of `seg` against the comparison triangle of
/// `(q, seg.start, seg.end)`.
pub fn point_segment_test<S: GeodesicSpace + ?Sized>(
    space: &S,
    k: f64,
    q: &S::Point,
    seg: &Seg<S>,
    opts: &TestOptions,
) -> Result<TestOutcome> {
    let km = ModelParam::new(k)?;
    if !(seg.length > opts.tol.geo) {
        return Err(CriteriaError::Degenerate("segment has no length".into()));
    }
    let data = PointSegmentData::measure(space, q, seg, opts.probes);
    let d = data.evaluate(km)?;
    let snapshot = ConfigSnapshot::default()
        .point(space, "q", q)
        .point(space, "p", &seg.start)
        .point(space, "r", &seg.end)
        .dist("qp", data.d_qp)
        .dist("qr", data.d_qr)
        .dist("pr", data.length);
    Ok(TestOutcome::build(
        Criterion::PointSegment,
        k,
        data.scale,
        d,
        DefectSign::CbbNonNegative,
        opts.tol.length_verdict(data.scale),
        false,
        snapshot,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Constant,
    NonDecreasing,
    NonIncreasing,
    Mixed,
}

/// Angle at a vertex from comparison angles of shrinking triangles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleEstimate {
    /// `(t_j, comparison angle)` with strictly decreasing `t_j`.
    pub ladder: Vec<(f64, f64)>,
    /// Last rung.
    pub angle: f64,
    /// Richardson extrapolation of the last two rungs, clamped to `[0, π]`.
    pub extrapolated: f64,
    /// How the ladder moves as the scale shrinks.
    pub trend: Trend,
    /// The ladder is non-decreasing as the scale shrinks, as lower curvature
    /// bounds predict.
    pub monotone: bool,
}

/// Estimates the angle at `p` between two geodesics leaving it.
pub fn angle_at<S: GeodesicSpace + ?Sized>(
    space: &S,
    p: &S::Point,
    toward_q: &Seg<S>,
    toward_r: &Seg<S>,
    k0: f64,
    opts: &LadderOptions,
    tol: &Tolerances,
) -> Result<AngleEstimate> {
    let k0 = ModelParam::new(k0)?;
    for seg in [toward_q, toward_r] {
        let off = space.distance(p, &seg.start);
        if off > tol.geo * seg.length.max(1.0) {
            return Err(CriteriaError::LadderFailure(format!(
                "geodesic starts {off:e} away from the vertex"
            )));
        }
    }
    let rungs = opts.rungs.max(2);
    let t0 = opts.t0_frac * toward_q.length.min(toward_r.length);
    let t_last = t0 * opts.ratio.powi(rungs as i32 - 1);
    if !(t_last >= 10.0 * tol.geo) {
        return Err(CriteriaError::LadderFailure(format!(
            "smallest rung {t_last:e} is below 10·τ_geo"
        )));
    }
    let mut ladder = Vec::with_capacity(rungs);
    for j in 0..rungs {
        let t = t0 * opts.ratio.powi(j as i32);
        let a = eval(space, toward_q, t);
        let b = eval(space, toward_r, t);
        let c = space.distance(&a, &b);
        let sides = SideTriple::new(t, t, c.min(2.0 * t))?;
        ladder.push((t, model::comparison_angle(k0, sides)?));
    }
    let eps = 1e-12;
    let diffs: Vec<f64> = ladder.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let trend = if diffs.iter().all(|d| d.abs() <= eps) {
        Trend::Constant
    } else if diffs.iter().all(|d| *d >= -eps) {
        Trend::NonDecreasing
    } else if diffs.iter().all(|d| *d <= eps) {
        Trend::NonIncreasing
    } else {
        Trend::Mixed
    };
    let last = ladder[rungs - 1].1;
    let prev = ladder[rungs - 2].1;
    let factor = 1.0 / (opts.ratio * opts.ratio) - 1.0;
    let extrapolated = (last + (last - prev) / factor).clamp(0.0, PI);
    Ok(AngleEstimate {
        ladder,
        angle: last,
        extrapolated,
        monotone: matches!(trend, Trend::Constant | Trend::NonDecreasing),
        trend,
    })
}

/// Side lengths and measured angles of a triangle for the angle criterion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleData {
    /// For each vertex: `(|vx|, |vy|, |xy|)` for the two other vertices.
    pub sides: [[f64; 3]; 3],
    /// Smallest and largest angle estimate at each vertex over all pairs of
    /// minimal geodesics.
    pub angles: [[f64; 2]; 3],
    pub scale: f64,
    pub multiple: bool,
}

impl TriangleData {
    pub fn measure<S: GeodesicSpace + ?Sized>(
        space: &S,
        pts: [&S::Point; 3],
        k0: f64,
        ladder: &LadderOptions,
        tol: &Tolerances,
    ) -> Result<Self> {
        let mut sides = [[0.0; 3]; 3];
        let mut angles = [[0.0; 2]; 3];
        let mut multiple = false;
        for v in 0..3 {
            let (x, y) = ((v + 1) % 3, (v + 2) % 3);
            let gx = space.geodesics(pts[v], pts[x]);
            let gy = space.geodesics(pts[v], pts[y]);
            multiple |= gx.len() > 1 || gy.len() > 1;
            let (dx, dy) = (gx[0].length, gy[0].length);
            if dx < tol.geo || dy < tol.geo {
                return Err(CriteriaError::Degenerate("two triangle vertices coincide".into()));
            }
            sides[v] = [dx, dy, space.distance(pts[x], pts[y])];
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for sx in &gx {
                for sy in &gy {
                    let a = angle_at(space, pts[v], sx, sy, k0, ladder, tol)?.extrapolated;
                    lo = lo.min(a);
                    hi = hi.max(a);
                }
            }
            angles[v] = [lo, hi];
        }
        let scale = sides.iter().flatten().fold(0.0f64, |m, s| m.max(*s));
        Ok(TriangleData {
            sides,
            angles,
            scale,
            multiple,
        })
    }

    pub fn evaluate(&self, k: ModelParam) -> Result<Defects> {
        let mut d = Defects {
            cbb: f64::INFINITY,
            cba: f64::NEG_INFINITY,
        };
        for v in 0..3 {
            let [a, b, c] = self.sides[v];
            let model = model::comparison_angle(k, SideTriple::new(a, b, c)?)?;
            d.cbb = d.cbb.min(self.angles[v][0] - model);
            d.cba = d.cba.max(self.angles[v][1] - model);
        }
        Ok(d)
    }
}

/// Angles of the triangle `pqr` against its comparison triangle.
pub fn triangle_comparison_test<S: GeodesicSpace + ?Sized>(
    space: &S,
    k: f64,
    p: &S::Point,
    q: &S::Point,
    r: &S::Point,
    opts: &TestOptions,
) -> Result<TestOutcome> {
    let km = ModelParam::new(k)?;
    let data = TriangleData::measure(space, [p, q, r], k, &opts.ladder, &opts.tol)?;
    let d = data.evaluate(km)?;
    let snapshot = ConfigSnapshot::default()
        .point(space, "p", p)
        .point(space, "q", q)
        .point(space, "r", r)
        .dist("pq", data.sides[0][0])
        .dist("pr", data.sides[0][1])
        .dist("qr", data.sides[0][2])
        .dist("angle_p", data.angles[0][0])
        .dist("angle_q", data.angles[1][0])
        .dist("angle_r", data.angles[2][0]);
    Ok(TestOutcome::build(
        Criterion::Triangle,
        k,
        data.scale,
        d,
        DefectSign::CbbNonNegative,
        opts.tol.angle_verdict(data.scale),
        data.multiple,
        snapshot,
    ))
}

pub const DEFAULT_STEPS: [f64; 5] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirstVariationReport {
    pub t: f64,
    /// Angle between `[p q]` and the forward part of the segment.
    pub angle: f64,
    /// `-cos(angle)`.
    pub target: f64,
    pub steps: Vec<f64>,
    pub slopes: Vec<f64>,
    pub errors: Vec<f64>,
    /// `log(e_j/e_{j+1}) / log(h_j/h_{j+1})`.
    pub orders: Vec<f64>,
    /// Errors shrink (up to 1e-9) along the step ladder.
    pub decaying: bool,
    pub multiple_geodesics: bool,
}

impl FirstVariationReport {
    pub fn error_at(&self, h: f64) -> Option<f64> {
        self.steps
            .iter()
            .position(|s| (s - h).abs() <= 1e-12 * h)
            .map(|i| self.errors[i])
    }
}

/// Forward-difference slope of `t ↦ |q seg(t)|` at `t` against `-cos∠`.
pub fn first_variation_check<S: GeodesicSpace + ?Sized>(
    space: &S,
    q: &S::Point,
    seg: &Seg<S>,
    t: f64,
    steps: &[f64],
    opts: &TestOptions,
) -> Result<FirstVariationReport> {
    let p = eval(space, seg, t);
    let forward = subsegment(space, seg, t, seg.length);
    let to_q = space.geodesics(&p, q);
    if to_q[0].length < opts.tol.geo || forward.length < opts.tol.geo {
        return Err(CriteriaError::Degenerate(
            "vertex coincides with an endpoint".into(),
        ));
    }
    let mut angle = f64::INFINITY;
    for g in &to_q {
        let a = angle_at(space, &p, g, &forward, 0.0, &opts.ladder, &opts.tol)?;
        angle = angle.min(a.extrapolated);
    }
    let target = -angle.cos();
    let d0 = space.distance(q, &p);
    let mut used = Vec::new();
    let mut slopes = Vec::new();
    let mut errors = Vec::new();
    for &h in steps {
        if t + h > seg.length {
            continue;
        }
        let slope = (space.distance(q, &eval(space, seg, t + h)) - d0) / h;
        used.push(h);
        slopes.push(slope);
        errors.push((slope - target).abs());
    }
    let orders = errors
        .windows(2)
        .zip(used.windows(2))
        .map(|(e, h)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect();
    let decaying = errors.windows(2).all(|e| e[1] <= e[0] + 1e-9);
    Ok(FirstVariationReport {
        t,
        angle,
        target,
        steps: used,
        slopes,
        errors,
        orders,
        decaying,
        multiple_geodesics: to_q.len() > 1,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleSumReport {
    pub t: f64,
    pub angles: [f64; 2],
    pub sum: f64,
    /// `sum - π`.
    pub excess: f64,
    pub tolerance: f64,
    /// `|excess| <= tol`, expected under a lower curvature bound.
    pub equality_ok: bool,
    /// `excess >= -tol`, expected under an upper curvature bound.
    pub one_sided_ok: bool,
}

/// Sum of the angles at `seg(t)` between `[p q]` and the two halves of the
/// segment.
pub fn angle_sum_check<S: GeodesicSpace + ?Sized>(
    space: &S,
    q: &S::Point,
    seg: &Seg<S>,
    t: f64,
    opts: &TestOptions,
) -> Result<AngleSumReport> {
    let p = eval(space, seg, t);
    let back = subsegment(space, seg, t, 0.0);
    let fwd = subsegment(space, seg, t, seg.length);
    let to_q = space.geodesics(&p, q);
    if to_q[0].length < opts.tol.geo || back.length < opts.tol.geo || fwd.length < opts.tol.geo {
        return Err(CriteriaError::Degenerate(
            "vertex coincides with a configuration point".into(),
        ));
    }
    let a1 = angle_at(space, &p, &to_q[0], &back, 0.0, &opts.ladder, &opts.tol)?.extrapolated;
    let a2 = angle_at(space, &p, &to_q[0], &fwd, 0.0, &opts.ladder, &opts.tol)?.extrapolated;
    let sum = a1 + a2;
    let scale = seg.length.max(to_q[0].length);
    let tolerance = opts.tol.angle_verdict(scale);
    Ok(AngleSumReport {
        t,
        angles: [a1, a2],
        sum,
        excess: sum - PI,
        tolerance,
        equality_ok: (sum - PI).abs() <= tolerance,
        one_sided_ok: sum - PI >= -tolerance,
    })
}

/// Counts of point pairs joined by more than one minimal geodesic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplicityReport {
    pub pairs: usize,
    pub multi: usize,
    /// Pairs supplied by the space as known ties.
    pub constructed: usize,
    pub constructed_multi: usize,
    /// Coordinates of up to five flagged pairs.
    pub examples: Vec<[Vec<f64>; 2]>,
}

impl MultiplicityReport {
    pub fn total_multi(&self) -> usize {
        self.multi + self.constructed_multi
    }
}

/// Samples `n_pairs` random pairs in the ball and adds the space's known tie
/// pairs; counts the pairs with several minimal geodesics.
pub fn geodesic_multiplicity_probe<S: GeodesicSpace + ?Sized>(
    space: &S,
    center: &S::Point,
    radius: f64,
    n_pairs: usize,
    seed: u64,
) -> MultiplicityReport {
    use rayon::prelude::*;
    let flags: Vec<Option<[Vec<f64>; 2]>> = (0..n_pairs as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = crate::rng::index_rng(seed, i);
            let a = space.sample_ball(center, radius, &mut rng);
            let b = space.sample_ball(center, radius, &mut rng);
            (space.geodesics(&a, &b).len() > 1).then(|| [space.coords(&a), space.coords(&b)])
        })
        .collect();
    let ties = space.tie_pairs(center, radius);
    let tie_flags: Vec<Option<[Vec<f64>; 2]>> = ties
        .iter()
        .map(|(a, b)| (space.geodesics(a, b).len() > 1).then(|| [space.coords(a), space.coords(b)]))
        .collect();
    let examples = tie_flags
        .iter()
        .chain(&flags)
        .flatten()
        .take(5)
        .cloned()
        .collect();
    MultiplicityReport {
        pairs: n_pairs,
        multi: flags.iter().flatten().count(),
        constructed: ties.len(),
        constructed_multi: tie_flags.iter().flatten().count(),
        examples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{geodesic, Cone, Hyperbolic, Plane, Sphere, SphericalTriangle, Tripod, TripodPoint};

    fn opts() -> TestOptions {
        TestOptions::default()
    }

    #[test]
    fn verdict_logic() {
        let d = Defects { cbb: -0.1, cba: -0.2 };
        assert_eq!(d.verdict(DefectSign::CbbNonPositive, 1e-9), Verdict::PassCbb);
        assert_eq!(d.verdict(DefectSign::CbbNonNegative, 1e-9), Verdict::PassCba);
        let z = Defects {
            cbb: 1e-10,
            cba: -1e-10,
        };
        assert_eq!(z.verdict(DefectSign::CbbNonPositive, 1e-9), Verdict::PassBoth);
        let f = Defects { cbb: 0.1, cba: -0.1 };
        assert_eq!(f.verdict(DefectSign::CbbNonPositive, 1e-9), Verdict::Fail);
        assert!(Verdict::PassBoth.compatible(Verdict::PassCba));
        assert!(!Verdict::PassCbb.compatible(Verdict::PassCba));
        assert_eq!("right-angle".parse::<Criterion>(), Ok(Criterion::RightAngle));
        assert!("sideways".parse::<Criterion>().is_err());
    }

    #[test]
    fn plane_foot_is_midpoint() {
        let seg = geodesic(&Plane, &[-1.0, 0.0], &[1.0, 0.0]);
        let f =
            foot_of_perpendicular(&Plane, &[0.0, 1.0], &seg, &FootOptions::default(), &crate::TOL).unwrap();
        assert!((f.t - 1.0).abs() < 1e-9);
        assert!((f.distance - 1.0).abs() < 1e-15);
        assert_eq!(f.minimizers.len(), 1);
        assert!(!f.plateau);
    }

    #[test]
    fn sphere_pole_over_equator_is_a_plateau() {
        let s = Sphere::new(1.0).unwrap();
        let seg = geodesic(&s, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]);
        let f = locate_foot(&s, &[0.0, 0.0, 1.0], &seg, &FootOptions::default(), &crate::TOL).unwrap();
        assert!(f.plateau);
        assert!(f.is_multiple());
        assert!((f.distance - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn tripod_foot_at_branch() {
        let seg = geodesic(&Tripod, &TripodPoint::new(0, 1.0), &TripodPoint::new(1, 1.0));
        let q = TripodPoint::new(2, 1.0);
        let f = foot_of_perpendicular(&Tripod, &q, &seg, &FootOptions::default(), &crate::TOL).unwrap();
        // Brute force over a fine grid of the segment.
        let brute = (0..=20_000)
            .map(|i| Tripod.distance(&q, &eval(&Tripod, &seg, 2.0 * i as f64 / 20_000.0)))
            .fold(f64::INFINITY, f64::min);
        assert!((f.distance - brute).abs() < 1e-12);
        assert!((f.t - 1.0).abs() < 1e-9);
        assert!((f.distance - 1.0).abs() < 1e-9);
    }

    #[test]
    fn foot_errors() {
        let seg = geodesic(&Plane, &[0.0, 0.0], &[1.0, 0.0]);
        let e = foot_of_perpendicular(&Plane, &[0.5, 0.0], &seg, &FootOptions::default(), &crate::TOL);
        assert!(matches!(e, Err(CriteriaError::PointOnSegment { .. })));
        let e = foot_of_perpendicular(&Plane, &[-1.0, 1.0], &seg, &FootOptions::default(), &crate::TOL);
        assert!(matches!(e, Err(CriteriaError::FootOnBoundary { .. })));
    }

    #[test]
    fn plane_pythagorean_is_flat() {
        let seg = geodesic(&Plane, &[-0.7, 0.1], &[0.9, -0.3]);
        let o = pythagorean_test(&Plane, 0.0, &[0.2, 0.8], &seg, &opts()).unwrap();
        assert!(o.defect.abs() < 1e-9 && o.defect_cba.abs() < 1e-9);
        assert_eq!(o.verdict, Verdict::PassBoth);
    }

    #[test]
    fn plane_fails_positive_lower_bound() {
        let seg = geodesic(&Plane, &[-0.3, 0.0], &[0.3, 0.0]);
        let q = [0.0, 0.4];
        let o = pythagorean_test(&Plane, 1.0, &q, &seg, &opts()).unwrap();
        // Oracle: the same defect from explicit planar distances.
        let want = model::pythagorean_defect(ModelParam::new(1.0).unwrap(), 0.4, 0.3, 0.5).unwrap();
        assert!(want > 0.0);
        assert!((o.defect - want).abs() < 1e-9);
        assert!(!o.verdict.passes_cbb());
        assert!(o.verdict.passes_cba());
    }

    #[test]
    fn tripod_pythagorean_is_straight() {
        let seg = geodesic(&Tripod, &TripodPoint::new(0, 1.0), &TripodPoint::new(1, 1.0));
        let o = pythagorean_test(&Tripod, 0.0, &TripodPoint::new(2, 1.0), &seg, &opts()).unwrap();
        assert!((o.defect - FRAC_PI_2).abs() < 1e-7);
        assert_eq!(o.verdict, Verdict::PassCba);
    }

    #[test]
    fn sphere_right_angles() {
        let s = Sphere::new(1.0).unwrap();
        let p = s.point([0.3, -0.2, 1.0]).unwrap();
        let o = right_angle_pythagorean_test(&s, 1.0, &p, 0.7, (0.3, 0.4), &opts()).unwrap();
        assert!(o.defect.abs() < 1e-8);
        assert_eq!(o.verdict, Verdict::PassBoth);
        let o = right_angle_pythagorean_test(&s, 0.0, &p, 0.7, (0.3, 0.4), &opts()).unwrap();
        // cos c = cos a cos b gives c² < a² + b².
        let c = (0.3f64.cos() * 0.4f64.cos()).acos();
        assert!(c * c < 0.25);
        assert!(o.defect < 0.0);
        assert_eq!(o.verdict, Verdict::PassCbb);
        let h = Hyperbolic::new(-1.0).unwrap();
        let o = right_angle_pythagorean_test(&h, 0.0, &h.base_point(), 0.2, (0.3, 0.4), &opts()).unwrap();
        let c = (0.3f64.cosh() * 0.4f64.cosh()).acosh();
        assert!(c * c > 0.25);
        assert!(o.defect > 0.0);
        assert_eq!(o.verdict, Verdict::PassCba);
    }

    #[test]
    fn right_angle_unavailable_on_tripod() {
        let e =
            right_angle_pythagorean_test(&Tripod, 0.0, &TripodPoint::new(0, 1.0), 0.0, (0.3, 0.3), &opts());
        assert!(matches!(e, Err(CriteriaError::RightAngleUnavailable(_))));
        // Beyond the cut locus of a narrow cone the leg stops being minimal.
        let c = Cone::new(PI).unwrap();
        let p = c.point(0.2, 0.0);
        let e = right_angle_pythagorean_test(&c, 0.0, &p, 2.8, (1.0, 0.1), &opts());
        assert!(matches!(e, Err(CriteriaError::RightAngleUnavailable(_))));
    }

    #[test]
    fn point_segment_examples() {
        let seg = geodesic(&Plane, &[0.0, 0.0], &[1.0, 0.3]);
        let o = point_segment_test(&Plane, 0.0, &[0.2, 0.9], &seg, &opts()).unwrap();
        assert!(o.defect.abs() < 1e-9 && o.defect_cba.abs() < 1e-9);
        let s = Sphere::new(1.0).unwrap();
        let seg = geodesic(
            &s,
            &s.point([1.0, 0.0, 1.0]).unwrap(),
            &s.point([0.0, 1.0, 1.0]).unwrap(),
        );
        let o = point_segment_test(&s, 0.0, &s.point([0.0, 0.0, 1.0]).unwrap(), &seg, &opts()).unwrap();
        assert!(o.defect >= -1e-12);
        assert!(o.verdict.passes_cbb());
        let c = Cone::new(PI).unwrap();
        let seg = geodesic(&c, &c.point(0.5, 0.0), &c.point(0.5, 1.4));
        let o = point_segment_test(&c, 0.0, &c.point(0.6, 2.6), &seg, &opts()).unwrap();
        assert!(o.defect >= -o.tolerance);
    }

    #[test]
    fn triangle_examples() {
        let o =
            triangle_comparison_test(&Plane, 0.0, &[0.0, 0.0], &[3.0, 0.0], &[0.0, 4.0], &opts()).unwrap();
        assert!(o.defect.abs() < 1e-6 && o.defect_cba.abs() < 1e-6);
        assert_eq!(o.verdict, Verdict::PassBoth);
        let s = Sphere::new(1.0).unwrap();
        let (x, y, z) = ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]);
        let o = triangle_comparison_test(&s, 0.0, &x, &y, &z, &opts()).unwrap();
        // Equilateral planar comparison angle π/3 against true angles π/2.
        assert!((o.defect - (FRAC_PI_2 - PI / 3.0)).abs() < 1e-6);
        assert_eq!(o.verdict, Verdict::PassCbb);
        let tips = [
            TripodPoint::new(0, 1.0),
            TripodPoint::new(1, 1.0),
            TripodPoint::new(2, 1.0),
        ];
        let o = triangle_comparison_test(&Tripod, 0.0, &tips[0], &tips[1], &tips[2], &opts()).unwrap();
        assert!((o.defect + PI / 3.0).abs() < 1e-9);
        assert_eq!(o.verdict, Verdict::PassCba);
    }

    #[test]
    fn angle_ladders() {
        let a = geodesic(&Plane, &[0.0, 0.0], &[1.0, 0.0]);
        let b = geodesic(&Plane, &[0.0, 0.0], &[0.0, 2.0]);
        let e = angle_at(
            &Plane,
            &[0.0, 0.0],
            &a,
            &b,
            0.0,
            &LadderOptions::default(),
            &crate::TOL,
        )
        .unwrap();
        assert!(e.ladder.iter().all(|(_, g)| (g - FRAC_PI_2).abs() < 1e-14));
        assert_eq!(e.trend, Trend::Constant);
        assert!(e.ladder.windows(2).all(|w| w[1].0 < w[0].0));
        let s = SphericalTriangle::octant(1.0).unwrap();
        let v = [0.0, 0.0, 1.0];
        let a = geodesic(&s, &v, &[1.0, 0.0, 0.0]);
        let b = geodesic(&s, &v, &[0.0, 1.0, 0.0]);
        let e = angle_at(&s, &v, &a, &b, 0.0, &LadderOptions::default(), &crate::TOL).unwrap();
        assert!((e.extrapolated - FRAC_PI_2).abs() < 1e-9);
        assert!(e.monotone);
        let c = Cone::new(PI).unwrap();
        let a = geodesic(&c, &c.apex(), &c.point(1.0, 0.0));
        let b = geodesic(&c, &c.apex(), &c.point(1.0, 1.2));
        let e = angle_at(&c, &c.apex(), &a, &b, 0.0, &LadderOptions::default(), &crate::TOL).unwrap();
        assert!(e.ladder.iter().all(|(_, g)| (g - 1.2).abs() < 1e-12));
        let tiny = geodesic(&Plane, &[0.0, 0.0], &[1e-7, 0.0]);
        assert!(matches!(
            angle_at(
                &Plane,
                &[0.0, 0.0],
                &tiny,
                &b_plane(),
                0.0,
                &LadderOptions::default(),
                &crate::TOL
            ),
            Err(CriteriaError::LadderFailure(_))
        ));
    }

    fn b_plane() -> Seg<Plane> {
        geodesic(&Plane, &[0.0, 0.0], &[0.0, 1.0])
    }

    #[test]
    fn first_variation_examples() {
        let seg = geodesic(&Plane, &[-1.0, 0.0], &[1.0, 0.0]);
        let r = first_variation_check(&Plane, &[0.0, 1.0], &seg, 1.0, &DEFAULT_STEPS, &opts()).unwrap();
        assert!(r.slopes[4].abs() < 1e-6);
        // Angle π/3 between [p q] and the forward direction.
        let q = [0.5, 3f64.sqrt() / 2.0];
        let seg = geodesic(&Plane, &[0.0, 0.0], &[2.0, 0.0]);
        let r = first_variation_check(&Plane, &q, &seg, 0.0, &DEFAULT_STEPS, &opts()).unwrap();
        assert!((r.target + 0.5).abs() < 1e-9);
        assert!((r.slopes[2] + 0.5).abs() < 1e-4);
        assert!(r.decaying);
        assert!(r.orders[0] > 0.9);
        // Sphere: forward along the equator, q at 45° elevation above the
        // meridian through p, so the angle at p is π/4.
        let s = Sphere::new(1.0).unwrap();
        let p = [1.0, 0.0, 0.0];
        let seg = geodesic(&s, &p, &[0.0, 1.0, 0.0]);
        let q = s.exp(&p, angle_heading(&s, &p, PI / 4.0), 0.5).unwrap();
        let r = first_variation_check(&s, &q, &seg, 0.0, &DEFAULT_STEPS, &opts()).unwrap();
        assert!((r.angle - PI / 4.0).abs() < 1e-6, "{}", r.angle);
        assert!((r.slopes[2] + 2f64.sqrt() / 2.0).abs() < 1e-3);
    }

    /// Heading at `p` making angle `a` with the direction toward +y.
    fn angle_heading(s: &Sphere, p: &[f64; 3], a: f64) -> f64 {
        let target = geodesic(s, p, &[0.0, 1.0, 0.0]);
        let hs: Vec<f64> = (0..3600)
            .map(|i| i as f64 * std::f64::consts::TAU / 3600.0)
            .collect();
        let dir_angle = |h: f64| {
            let x = s.exp(p, h, 1e-3).unwrap();
            let y = eval(s, &target, 1e-3);
            2.0 * (0.5 * s.distance(&x, &y) / 1e-3).asin()
        };
        // Coarse scan then bisection on the angle to the +y direction.
        let h0 = hs
            .iter()
            .copied()
            .min_by(|a1, b1| (dir_angle(*a1) - a).abs().total_cmp(&(dir_angle(*b1) - a).abs()))
            .unwrap();
        let (mut lo, mut hi) = (h0 - 0.002, h0 + 0.002);
        let f = |h: f64| dir_angle(h) - a;
        for _ in 0..60 {
            let m = 0.5 * (lo + hi);
            if f(lo).signum() == f(m).signum() {
                lo = m;
            } else {
                hi = m;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn angle_sum_examples() {
        let seg = geodesic(&Plane, &[-1.0, 0.2], &[1.0, -0.1]);
        let r = angle_sum_check(&Plane, &[0.3, 1.0], &seg, 0.7, &opts()).unwrap();
        assert!(r.excess.abs() < 1e-5);
        let s = Sphere::new(1.0).unwrap();
        let seg = geodesic(&s, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]);
        let r = angle_sum_check(&s, &s.point([0.3, 0.5, 1.0]).unwrap(), &seg, 0.4, &opts()).unwrap();
        assert!(r.excess.abs() < 1e-4);
        let seg = geodesic(&Tripod, &TripodPoint::new(0, 1.0), &TripodPoint::new(1, 1.0));
        let r = angle_sum_check(&Tripod, &TripodPoint::new(2, 1.0), &seg, 1.0, &opts()).unwrap();
        // Straight angles are square-root sensitive to rounding in the side lengths.
        assert!(
            (r.angles[0] - PI).abs() < 1e-5 && (r.angles[1] - PI).abs() < 1e-5,
            "{r:?}"
        );
        assert!(r.one_sided_ok && !r.equality_ok);
    }

    #[test]
    fn multiplicity_examples() {
        let r = geodesic_multiplicity_probe(&Plane, &[0.0, 0.0], 1.0, 500, 1);
        assert_eq!(r.total_multi(), 0);
        let c = Cone::new(PI).unwrap();
        let r = geodesic_multiplicity_probe(&c, &c.apex(), 0.4, 200, 1);
        assert!(r.constructed_multi >= 1);
        let s = Sphere::new(1.0).unwrap();
        assert_eq!(s.geodesics(&[0.0, 0.0, 1.0], &[0.0, 0.0, -1.0]).len(), 2);
        let r = geodesic_multiplicity_probe(&s, &[0.0, 0.0, 1.0], 3.0, 10, 1);
        assert!(r.total_multi() >= 1);
    }
}
