//! Quantitative curvature bounds, small-scale defect profiles and region
//! reports built on the criteria.
//!
//! Bound searches draw one configuration set from the seed and reuse it for
//! every `k`. Each defect is monotone in `k`, so every pass/fail predicate
//! is monotone on that set and bisection is exact up to its resolution.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::criteria::{
    self, foot_of_perpendicular, geodesic_multiplicity_probe, right_angle_from_foot, shoot_right_angle,
    CriteriaError, Criterion, DefectSign, Defects, Foot, MultiplicityReport, PointSegmentData,
    PythagoreanData, RightAngle, TestOptions, TriangleData,
};
use crate::model::{ModelError, ModelParam};
use crate::rng::index_rng;
use crate::spaces::{geodesic, uniform, GeodesicSpace, Plane, Seg};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimatorError {
    #[error("no valid configuration in the region ({rejected} rejected draws)")]
    NoConfigurations { rejected: usize },
    #[error("invalid estimator options: {0}")]
    InvalidOptions(String),
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
}

/// Why a sampled configuration was rejected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipReason {
    FootOnBoundary,
    PointOnSegment,
    Degenerate,
    IllConditioned,
    RightAngleUnavailable,
    LadderFailure,
    Inadmissible,
}

impl SkipReason {
    pub fn as_str(self) -> &'static str {
        match self {
            SkipReason::FootOnBoundary => "foot_on_boundary",
            SkipReason::PointOnSegment => "point_on_segment",
            SkipReason::Degenerate => "degenerate",
            SkipReason::IllConditioned => "ill_conditioned",
            SkipReason::RightAngleUnavailable => "right_angle_unavailable",
            SkipReason::LadderFailure => "ladder_failure",
            SkipReason::Inadmissible => "inadmissible",
        }
    }
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl From<&CriteriaError> for SkipReason {
    fn from(e: &CriteriaError) -> Self {
        match e {
            CriteriaError::FootOnBoundary { .. } => SkipReason::FootOnBoundary,
            CriteriaError::PointOnSegment { .. } => SkipReason::PointOnSegment,
            CriteriaError::Degenerate(_) => SkipReason::Degenerate,
            CriteriaError::RightAngleUnavailable(_) => SkipReason::RightAngleUnavailable,
            CriteriaError::LadderFailure(_) => SkipReason::LadderFailure,
            CriteriaError::Model(ModelError::Domain(_)) => SkipReason::Inadmissible,
            CriteriaError::Model(_) => SkipReason::Degenerate,
        }
    }
}

/// A point `q` and a segment `[r1 r2]` with an interior foot.
#[derive(Clone, Debug)]
pub struct SegmentConfig<P, G> {
    pub q: P,
    pub seg: crate::spaces::GeodesicSegment<P, G>,
    pub foot: criteria::FootResult<P, G>,
    /// Largest distance among `q`, `r1`, `r2`.
    pub scale: f64,
}

pub type SegConfig<S> = SegmentConfig<<S as GeodesicSpace>::Point, <S as GeodesicSpace>::Path>;

/// Draws `r1`, `r2`, `q` in the ball and keeps the configuration if the foot
/// from `q` is interior and `|qp|`, `|pr1|`, `|pr2|` are all at least
/// `min_aspect` times the configuration scale.
pub fn sample_segment_config<S: GeodesicSpace + ?Sized>(
    space: &S,
    center: &S::Point,
    radius: f64,
    rng: &mut dyn rand::RngCore,
    min_aspect: f64,
    opts: &TestOptions,
) -> Result<SegConfig<S>, SkipReason> {
    let r1 = space.sample_ball(center, radius, rng);
    let r2 = space.sample_ball(center, radius, rng);
    let q = space.sample_ball(center, radius, rng);
    let seg = geodesic(space, &r1, &r2);
    if seg.length <= opts.tol.geo {
        return Err(SkipReason::Degenerate);
    }
    let foot: Foot<S> =
        foot_of_perpendicular(space, &q, &seg, &opts.foot, &opts.tol).map_err(|e| SkipReason::from(&e))?;
    let scale = seg
        .length
        .max(space.distance(&q, &r1))
        .max(space.distance(&q, &r2));
    let aspect = foot.distance.min(foot.t).min(seg.length - foot.t);
    if aspect < min_aspect * scale {
        return Err(SkipReason::IllConditioned);
    }
    Ok(SegmentConfig { q, seg, foot, scale })
}

/// Data of one sampled configuration, measured once and evaluated at any `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasuredConfig {
    pub index: usize,
    pub scale: f64,
    pub q: Vec<f64>,
    pub r1: Vec<f64>,
    pub r2: Vec<f64>,
    pub pythagorean: Option<PythagoreanData>,
    pub triangle: Option<TriangleData>,
    pub point_segment: Option<PointSegmentData>,
}

impl MeasuredConfig {
    pub fn measure<S: GeodesicSpace + ?Sized>(
        space: &S,
        index: usize,
        cfg: &SegConfig<S>,
        criteria: &[Criterion],
        opts: &TestOptions,
    ) -> Result<Self, CriteriaError> {
        let has = |c| criteria.contains(&c);
        let seg: &Seg<S> = &cfg.seg;
        Ok(MeasuredConfig {
            index,
            scale: cfg.scale,
            q: space.coords(&cfg.q),
            r1: space.coords(&seg.start),
            r2: space.coords(&seg.end),
            pythagorean: has(Criterion::Pythagorean)
                .then(|| PythagoreanData::measure(space, &cfg.q, &cfg.foot)),
            triangle: if has(Criterion::Triangle) {
                Some(TriangleData::measure(
                    space,
                    [&cfg.q, &seg.start, &seg.end],
                    0.0,
                    &opts.ladder,
                    &opts.tol,
                )?)
            } else {
                None
            },
            point_segment: has(Criterion::PointSegment)
                .then(|| PointSegmentData::measure(space, &cfg.q, seg, opts.probes)),
        })
    }

    /// Defects and tolerance per criterion at `k`; `None` where the
    /// configuration is inadmissible for `k`.
    pub fn evaluate(
        &self,
        k: ModelParam,
        opts: &TestOptions,
    ) -> Vec<(Criterion, Option<Defects>, DefectSign, f64)> {
        let mut out = Vec::new();
        if let Some(d) = &self.pythagorean {
            out.push((
                Criterion::Pythagorean,
                d.evaluate(k).ok(),
                DefectSign::CbbNonPositive,
                opts.tol.angle_verdict(d.scale),
            ));
        }
        if let Some(d) = &self.point_segment {
            out.push((
                Criterion::PointSegment,
                d.evaluate(k).ok(),
                DefectSign::CbbNonNegative,
                opts.tol.length_verdict(d.scale),
            ));
        }
        if let Some(d) = &self.triangle {
            out.push((
                Criterion::Triangle,
                d.evaluate(k).ok(),
                DefectSign::CbbNonNegative,
                opts.tol.angle_verdict(d.scale),
            ));
        }
        out
    }

    /// `(CBB passes, CBA passes)` for all measured criteria at `k`.
    /// Configurations too large for the model at `k > 0` cannot lie in a
    /// CBB(k) space and are outside the scope of CBA(k).
    pub fn passes(&self, k: ModelParam, opts: &TestOptions) -> (bool, bool) {
        self.evaluate(k, opts)
            .into_iter()
            .fold((true, true), |(a, b), (_, d, sign, tol)| match d {
                Some(d) => {
                    let (x, y) = d.passes(sign, tol);
                    (a && x, b && y)
                }
                None => (false, b),
            })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateOptions {
    pub criteria: Vec<Criterion>,
    /// Initial search bracket `[k_lo, k_hi]`.
    pub bracket: [f64; 2],
    pub resolution: f64,
    pub samples: usize,
    pub seed: u64,
    /// Smallest admitted `min(|qp|, |pr1|, |pr2|) / scale`.
    pub min_aspect: f64,
    /// Draws per sample index before the index is given up.
    pub retries: usize,
    /// The bracket is expanded up to `±expand_limit`.
    pub expand_limit: f64,
    pub test: TestOptions,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            criteria: vec![Criterion::Pythagorean],
            bracket: [-2.0, 2.0],
            resolution: 0.01,
            samples: 300,
            seed: 0,
            min_aspect: 0.2,
            retries: 64,
            expand_limit: 1024.0,
            test: TestOptions::default(),
        }
    }
}

impl EstimateOptions {
    pub fn validate(&self) -> Result<(), EstimatorError> {
        let bad = |m: String| Err(EstimatorError::InvalidOptions(m));
        if self.criteria.is_empty() {
            return bad("the criterion set is empty".into());
        }
        if let Some(c) = self.criteria.iter().find(|c| {
            !matches!(
                c,
                Criterion::Pythagorean | Criterion::PointSegment | Criterion::Triangle
            )
        }) {
            return bad(format!("criterion {c} does not give a curvature bound"));
        }
        let [lo, hi] = self.bracket;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return bad(format!("bracket [{lo}, {hi}] is not an interval"));
        }
        if !(self.resolution > 0.0) {
            return bad(format!("resolution {} must be positive", self.resolution));
        }
        if !(self.expand_limit >= lo.abs().max(hi.abs())) || self.expand_limit > 1e6 {
            return bad(format!(
                "expansion limit {} must cover the bracket",
                self.expand_limit
            ));
        }
        if self.samples == 0 || self.retries == 0 {
            return bad("samples and retries must be at least 1".into());
        }
        if !(0.0..0.5).contains(&self.min_aspect) {
            return bad(format!("min_aspect {} must lie in [0, 0.5)", self.min_aspect));
        }
        Ok(())
    }
}

/// A fixed configuration set drawn from a seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub configs: Vec<MeasuredConfig>,
    /// Rejected draws by reason.
    pub rejected: BTreeMap<SkipReason, usize>,
    /// Sample indices for which every draw was rejected.
    pub lost: usize,
}

/// Draws and measures `opts.samples` configurations; index `i` uses its own
/// random stream and retries until a draw is accepted.
pub fn sample_set<S: GeodesicSpace + ?Sized>(
    space: &S,
    center: &S::Point,
    radius: f64,
    opts: &EstimateOptions,
) -> SampleSet {
    let results: Vec<(Option<MeasuredConfig>, Vec<SkipReason>)> = (0..opts.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = index_rng(opts.seed, i as u64);
            let mut rejected = Vec::new();
            for _ in 0..opts.retries {
                let cfg =
                    match sample_segment_config(space, center, radius, &mut rng, opts.min_aspect, &opts.test)
                    {
                        Ok(c) => c,
                        Err(r) => {
                            rejected.push(r);
                            continue;
                        }
                    };
                match MeasuredConfig::measure(space, i, &cfg, &opts.criteria, &opts.test) {
                    Ok(m) => return (Some(m), rejected),
                    Err(e) => rejected.push(SkipReason::from(&e)),
                }
            }
            (None, rejected)
        })
        .collect();
    let mut set = SampleSet {
        configs: Vec::new(),
        rejected: BTreeMap::new(),
        lost: 0,
    };
    for (cfg, rejected) in results {
        for r in rejected {
            *set.rejected.entry(r).or_default() += 1;
        }
        match cfg {
            Some(c) => set.configs.push(c),
            None => set.lost += 1,
        }
    }
    set
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundStatus {
    Found,
    /// The predicate fails even at the far end of the expanded bracket.
    FailsEverywhere,
    /// The predicate passes even at the far end of the expanded bracket.
    PassesEverywhere,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub status: BoundStatus,
    pub k: Option<f64>,
    /// Final `[passing, failing]` pair for a found bound, or the last
    /// bracket examined.
    pub bracket: [f64; 2],
    /// Extreme defects per criterion at `k`.
    pub residual: BTreeMap<Criterion, Defects>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureEstimate {
    pub space: String,
    pub center: Vec<f64>,
    pub radius: f64,
    pub criteria: Vec<Criterion>,
    pub seed: u64,
    pub samples: usize,
    pub used: usize,
    pub rejected: BTreeMap<SkipReason, usize>,
    pub lost: usize,
    pub resolution: f64,
    /// Largest `k` at which every configuration passes the CBB side.
    pub k_cbb: Bound,
    /// Smallest `k` at which every configuration passes the CBA side.
    pub k_cba: Bound,
    /// `k_cbb <= k_cba + resolution`, or not both bounds were found.
    pub consistent: bool,
    pub diagnostic_only: bool,
}

/// Boundary of a predicate that holds below some threshold and fails above.
fn search_threshold(
    pred: impl Fn(f64) -> bool,
    bracket: [f64; 2],
    res: f64,
    limit: f64,
) -> (BoundStatus, [f64; 2]) {
    let [mut lo, mut hi] = bracket;
    let mut width = hi - lo;
    while !pred(lo) {
        if lo <= -limit {
            return (BoundStatus::FailsEverywhere, [lo, hi]);
        }
        hi = lo;
        lo = (lo - width).max(-limit);
        width *= 2.0;
    }
    let mut width = hi - lo;
    while pred(hi) {
        if hi >= limit {
            return (BoundStatus::PassesEverywhere, [lo, hi]);
        }
        lo = hi;
        hi = (hi + width).min(limit);
        width *= 2.0;
    }
    while hi - lo > res {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (BoundStatus::Found, [lo, hi])
}

fn residuals(set: &SampleSet, k: f64, opts: &TestOptions) -> BTreeMap<Criterion, Defects> {
    let Ok(km) = ModelParam::new(k) else {
        return BTreeMap::new();
    };
    let mut out: BTreeMap<Criterion, Defects> = BTreeMap::new();
    for cfg in &set.configs {
        for (c, d, sign, _) in cfg.evaluate(km, opts) {
            let Some(d) = d else { continue };
            out.entry(c)
                .and_modify(|o| {
                    *o = match sign {
                        DefectSign::CbbNonPositive => Defects {
                            cbb: o.cbb.max(d.cbb),
                            cba: o.cba.min(d.cba),
                        },
                        DefectSign::CbbNonNegative => Defects {
                            cbb: o.cbb.min(d.cbb),
                            cba: o.cba.max(d.cba),
                        },
                    }
                })
                .or_insert(d);
        }
    }
    out
}

fn all_pass(set: &SampleSet, k: f64, opts: &TestOptions, cbb: bool) -> bool {
    let Ok(km) = ModelParam::new(k) else {
        return false;
    };
    set.configs.par_iter().all(|c| {
        let (a, b) = c.passes(km, opts);
        if cbb {
            a
        } else {
            b
        }
    })
}

/// Bisection for the CBB and CBA bounds on a given sample set.
pub fn bounds_from_samples(set: &SampleSet, opts: &EstimateOptions) -> (Bound, Bound) {
    let t = &opts.test;
    let (status, br) = search_threshold(
        |k| all_pass(set, k, t, true),
        opts.bracket,
        opts.resolution,
        opts.expand_limit,
    );
    let k = (status == BoundStatus::Found).then_some(br[0]);
    let cbb = Bound {
        status,
        k,
        bracket: br,
        residual: k.map(|k| residuals(set, k, t)).unwrap_or_default(),
    };
    // CBA passes above its threshold: search the mirrored predicate.
    let [lo, hi] = opts.bracket;
    let (status, br) = search_threshold(
        |x| all_pass(set, -x, t, false),
        [-hi, -lo],
        opts.resolution,
        opts.expand_limit,
    );
    let k = (status == BoundStatus::Found).then_some(-br[0]);
    let cba = Bound {
        status,
        k,
        bracket: [-br[0], -br[1]],
        residual: k.map(|k| residuals(set, k, t)).unwrap_or_default(),
    };
    (cbb, cba)
}

/// Largest lower and smallest upper curvature bound consistent with every
/// configuration drawn from `B(center, radius)`.
pub fn estimate_bounds<S: GeodesicSpace + ?Sized>(
    space: &S,
    center: &S::Point,
    radius: f64,
    opts: &EstimateOptions,
) -> Result<CurvatureEstimate, EstimatorError> {
    estimate_bounds_with_samples(space, center, radius, opts).map(|(e, _)| e)
}

/// [`estimate_bounds`] that also returns the configuration set it used.
pub fn estimate_bounds_with_samples<S: GeodesicSpace + ?Sized>(
    space: &S,
    center: &S::Point,
    radius: f64,
    opts: &EstimateOptions,
) -> Result<(CurvatureEstimate, SampleSet), EstimatorError> {
    opts.validate()?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(EstimatorError::InvalidOptions(format!(
            "radius {radius} must be positive"
        )));
    }
    let set = sample_set(space, center, radius, opts);
    if set.configs.is_empty() {
        return Err(EstimatorError::NoConfigurations {
            rejected: set.rejected.values().sum(),
        });
    }
    let (k_cbb, k_cba) = bounds_from_samples(&set, opts);
    let consistent = match (k_cbb.k, k_cba.k) {
        (Some(a), Some(b)) => a <= b + opts.resolution,
        _ => true,
    };
    let estimate = CurvatureEstimate {
        space: space.id(),
        center: space.coords(center),
        radius,
        criteria: opts.criteria.clone(),
        seed: opts.seed,
        samples: opts.samples,
        used: set.configs.len(),
        rejected: set.rejected.clone(),
        lost: set.lost,
        resolution: opts.resolution,
        k_cbb,
        k_cba,
        consistent,
        diagnostic_only: space.diagnostic_only(),
    };
    Ok((estimate, set))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Vanishing,
    NonVanishing,
    Inconclusive,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Vanishing => "vanishing",
            Classification::NonVanishing => "non_vanishing",
            Classification::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileOptions {
    /// Strictly decreasing ball radii.
    pub eps: Vec<f64>,
    pub per_eps: usize,
    pub seed: u64,
    /// Legs are drawn as this fraction range of the room left in the ball.
    pub leg_range: [f64; 2],
}

impl ProfileOptions {
    /// Ladder `radius · 2^-j` for `j = 0..4`.
    pub fn for_radius(radius: f64, per_eps: usize, seed: u64) -> Self {
        ProfileOptions {
            eps: (0..4).map(|j| radius * 0.5f64.powi(j)).collect(),
            per_eps,
            seed,
            leg_range: [0.05, 1.0],
        }
    }

    pub fn validate(&self) -> Result<(), EstimatorError> {
        let bad = |m: String| Err(EstimatorError::InvalidOptions(m));
        if self.eps.len() < 2 {
            return bad("the ε ladder needs at least two rungs".into());
        }
        if self.eps.iter().any(|e| !(e.is_finite() && *e > 0.0)) || self.eps.windows(2).any(|w| w[1] >= w[0])
        {
            return bad(format!(
                "ε ladder {:?} must be positive and strictly decreasing",
                self.eps
            ));
        }
        if self.per_eps == 0 {
            return bad("per_eps must be at least 1".into());
        }
        let [a, b] = self.leg_range;
        if !(0.0 < a && a <= b && b <= 1.0) {
            return bad(format!("leg range [{a}, {b}] must lie in (0, 1]"));
        }
        Ok(())
    }
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions::for_radius(0.4, 200, 0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectProfile {
    pub space: String,
    pub center: Vec<f64>,
    pub eps: Vec<f64>,
    /// `max |qr|²/(|pq|²+|pr|²) − 1|` per rung.
    pub chi: Vec<f64>,
    pub used: Vec<usize>,
    pub skip_fraction: Vec<f64>,
    /// Right angles shot along directions (`exp`) or taken at feet (`foot`).
    pub construction: String,
    pub floor: f64,
    pub threshold: f64,
    /// `chi` at the smallest rung over `chi` at the next one.
    pub ratio: Option<f64>,
    pub classification: Classification,
    /// More than half of the draws were skipped at some rung.
    pub invalid: bool,
}

fn chi(ra: &RightAngle<impl Clone>) -> f64 {
    let den = ra.d_pq * ra.d_pq + ra.d_pr * ra.d_pr;
    (ra.d_qr * ra.d_qr / den - 1.0).abs()
}

/// One right-angle draw at scale `eps`, with sample `j` reusing the same
/// random numbers at every rung.
fn right_angle_draw<S: GeodesicSpace + ?Sized>(
    space: &S,
    x: &S::Point,
    eps: f64,
    j: usize,
    shoot: bool,
    opts: &ProfileOptions,
    test: &TestOptions,
) -> Result<RightAngle<S::Point>, CriteriaError> {
    let mut rng = index_rng(opts.seed, j as u64);
    if shoot {
        let p = space.sample_ball(x, 0.5 * eps, &mut rng);
        let room = eps - space.distance(x, &p);
        let h = TAU * uniform(&mut rng);
        let [a, b] = opts.leg_range;
        let l1 = room * (a + (b - a) * uniform(&mut rng));
        let l2 = room * (a + (b - a) * uniform(&mut rng));
        shoot_right_angle(space, &p, h, (l1, l2), &test.tol)
    } else {
        let r1 = space.sample_ball(x, 0.5 * eps, &mut rng);
        let r2 = space.sample_ball(x, 0.5 * eps, &mut rng);
        let q = space.sample_ball(x, 0.5 * eps, &mut rng);
        right_angle_from_foot(space, &q, &geodesic(space, &r1, &r2), test)
    }
}

fn chi_ladder<S: GeodesicSpace + ?Sized>(
    space: &S,
    x: &S::Point,
    shoot: bool,
    opts: &ProfileOptions,
    test: &TestOptions,
) -> (Vec<f64>, Vec<usize>) {
    opts.eps
        .iter()
        .map(|&eps| {
            let vals: Vec<Option<f64>> = (0..opts.per_eps)
                .into_par_iter()
                .map(|j| {
                    right_angle_draw(space, x, eps, j, shoot, opts, test)
                        .ok()
                        .map(|ra| chi(&ra))
                })
                .collect();
            let used = vals.iter().flatten().count();
            (vals.into_iter().flatten().fold(0.0f64, f64::max), used)
        })
        .unzip()
}

/// Numerical noise of the profile on the plane, where `chi` vanishes exactly.
pub fn plane_noise_floor(opts: &ProfileOptions, test: &TestOptions) -> f64 {
    let (c, _) = chi_ladder(&Plane, &[0.0, 0.0], true, opts, test);
    c.into_iter().fold(1e-12, f64::max)
}

/// Profile of the right-angle Pythagorean ratio on shrinking balls around
/// `x`. A point where the ratio does not tend to zero cannot be Riemannian.
pub fn theorem_c_defect_profile<S: GeodesicSpace + ?Sized>(
    space: &S,
    x: &S::Point,
    opts: &ProfileOptions,
    test: &TestOptions,
) -> Result<DefectProfile, EstimatorError> {
    opts.validate()?;
    let shoot = space.exp(x, 0.0, 0.5 * opts.eps[opts.eps.len() - 1]).is_some();
    let (chi, used) = chi_ladder(space, x, shoot, opts, test);
    let skip_fraction: Vec<f64> = used
        .iter()
        .map(|&u| 1.0 - u as f64 / opts.per_eps as f64)
        .collect();
    let invalid = skip_fraction.iter().any(|&s| s > 0.5);
    let floor = plane_noise_floor(opts, test);
    let threshold = 4.0 * floor;
    let n = chi.len();
    let (c_min, c_prev) = (chi[n - 1], chi[n - 2]);
    let ratio = (c_prev > 0.0).then(|| c_min / c_prev);
    let decay = (opts.eps[n - 1] / opts.eps[n - 2]).sqrt();
    let classification = if invalid {
        Classification::Inconclusive
    } else if c_min <= threshold {
        Classification::Vanishing
    } else {
        match ratio {
            Some(r) if r <= decay => Classification::Vanishing,
            Some(r) if (0.8..=1.25).contains(&r) => Classification::NonVanishing,
            _ => Classification::Inconclusive,
        }
    };
    Ok(DefectProfile {
        space: space.id(),
        center: space.coords(x),
        eps: opts.eps.clone(),
        chi,
        used,
        skip_fraction,
        construction: if shoot { "exp" } else { "foot" }.into(),
        floor,
        threshold,
        ratio,
        classification,
        invalid,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionOptions {
    pub estimate: EstimateOptions,
    pub profile_per_eps: usize,
    pub multiplicity_pairs: usize,
}

impl Default for RegionOptions {
    fn default() -> Self {
        RegionOptions {
            estimate: EstimateOptions::default(),
            profile_per_eps: 200,
            multiplicity_pairs: 1000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionRow {
    pub center: Vec<f64>,
    pub estimate: Option<CurvatureEstimate>,
    pub profile: Option<DefectProfile>,
    pub multiplicity: MultiplicityReport,
    pub errors: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub space: String,
    pub radius: f64,
    pub diagnostic_only: bool,
    pub rows: Vec<RegionRow>,
}

/// Bounds, defect profile and multiplicity counts around each center. A
/// failure at one center is recorded in its row and the run continues.
pub fn region_report<S: GeodesicSpace + ?Sized>(
    space: &S,
    centers: &[S::Point],
    radius: f64,
    opts: &RegionOptions,
) -> RegionReport {
    let rows = centers
        .iter()
        .map(|c| {
            let mut errors = Vec::new();
            let estimate = estimate_bounds(space, c, radius, &opts.estimate)
                .map_err(|e| errors.push(format!("estimate: {e}")))
                .ok();
            let popts = ProfileOptions::for_radius(radius, opts.profile_per_eps, opts.estimate.seed);
            let profile = theorem_c_defect_profile(space, c, &popts, &opts.estimate.test)
                .map_err(|e| errors.push(format!("profile: {e}")))
                .ok();
            RegionRow {
                center: space.coords(c),
                estimate,
                profile,
                multiplicity: geodesic_multiplicity_probe(
                    space,
                    c,
                    radius,
                    opts.multiplicity_pairs,
                    opts.estimate.seed,
                ),
                errors,
            }
        })
        .collect();
    RegionReport {
        space: space.id(),
        radius,
        diagnostic_only: space.diagnostic_only(),
        rows,
    }
}
