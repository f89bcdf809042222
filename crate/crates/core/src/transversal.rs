//! Search over `n`-dimensional subspaces of `R^N` for one on which every
//! marginal has a common deep point.

use std::sync::atomic::{AtomicUsize, Ordering};

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::centers;
use crate::depth::{self, OrthoFrame, WeightedPointCloud, FRAME_TOLERANCE};
use crate::error::{domain, Error, Result};
use crate::rational::{self, to_f64, Point, Rational};
use crate::schubert::min_dimension;

/// Candidate points tried per evaluation when `n = 3`.
const SPACE_CANDIDATES: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepSchedule {
    /// Rotation angle after an accepted move, in radians.
    pub initial_angle: f64,
    /// Factor applied to the angle after a rejected move.
    pub decay: f64,
    /// The angle restarts from `initial_angle` once it falls below this.
    pub min_angle: f64,
}

impl Default for StepSchedule {
    fn default() -> Self {
        Self { initial_angle: 0.5, decay: 0.7, min_angle: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub restarts: usize,
    pub local_steps: usize,
    pub step_schedule: StepSchedule,
    pub master_seed: u64,
    #[serde(with = "rational::as_str")]
    pub target: Rational,
}

impl SearchConfig {
    /// Defaults aimed at the improved threshold for `n`.
    pub fn for_dimension(n: usize) -> Result<Self> {
        Ok(Self {
            restarts: 200,
            local_steps: 500,
            step_schedule: StepSchedule::default(),
            master_seed: 0,
            target: depth::thresholds(n)?.1,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.step_schedule;
        if self.restarts == 0 {
            return Err(domain("restarts must be positive"));
        }
        if !(s.decay > 0.0 && s.decay < 1.0) {
            return Err(domain("decay must lie in (0, 1)"));
        }
        if !(s.initial_angle > 0.0 && s.initial_angle <= std::f64::consts::PI) {
            return Err(domain("initial angle must lie in (0, pi]"));
        }
        if !(s.min_angle > 0.0 && s.min_angle <= s.initial_angle) {
            return Err(domain("minimum angle must lie in (0, initial angle]"));
        }
        Ok(())
    }
}

/// Value of the inner max-min problem for a fixed frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectiveValue {
    pub level: Rational,
    pub witness: Point,
    /// Set when the inner maximization is heuristic (`n = 3`).
    pub approximate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub step: usize,
    #[serde(with = "rational::as_str")]
    pub objective: Rational,
    pub angle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub restarts_run: usize,
    pub best_restart: usize,
    pub evaluations: usize,
    pub trajectory: Vec<TrajectoryPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransversalReport {
    pub n: usize,
    pub ambient: usize,
    pub frame: Vec<Vec<f64>>,
    pub projector: Vec<Vec<f64>>,
    #[serde(with = "rational::as_str")]
    pub objective: Rational,
    #[serde(with = "rational::as_str")]
    pub target: Rational,
    #[serde(with = "rational::vec_as_str")]
    pub per_measure_depths: Vec<Rational>,
    #[serde(with = "rational::vec_as_str")]
    pub witness_point: Point,
    /// `c` of each marginal; absent when centers are not available for `n`.
    #[serde(with = "rational::opt_points_as_str")]
    pub c_points: Option<Vec<Point>>,
    pub c_spread: Option<f64>,
    pub success: bool,
    pub failing: Vec<usize>,
    pub approximate: bool,
    pub warnings: Vec<String>,
    pub config: Option<SearchConfig>,
    pub stats: Option<SearchStats>,
}

fn check_inputs(frame: &OrthoFrame, clouds: &[WeightedPointCloud]) -> Result<()> {
    if clouds.is_empty() {
        return Err(domain("need at least one measure"));
    }
    if let Some(c) = clouds.iter().find(|c| c.dim() != frame.ambient()) {
        return Err(domain(format!("cloud of dimension {} does not match frame ambient {}", c.dim(), frame.ambient())));
    }
    if !(1..=3).contains(&frame.n()) {
        return Err(domain(format!("subspace dimension {} unsupported; use 1, 2 or 3", frame.n())));
    }
    Ok(())
}

fn marginals(frame: &OrthoFrame, clouds: &[WeightedPointCloud]) -> Result<Vec<WeightedPointCloud>> {
    clouds.iter().map(|c| depth::marginal(c, frame)).collect()
}

/// Largest `tau` such that all marginals have a common point of depth
/// `>= tau`, and that point. Exact for `n <= 2`; for `n = 3` the best of a
/// fixed candidate set, flagged approximate.
pub fn objective(frame: &OrthoFrame, clouds: &[WeightedPointCloud]) -> Result<ObjectiveValue> {
    check_inputs(frame, clouds)?;
    let ms = marginals(frame, clouds)?;
    objective_of_marginals(&ms)
}

fn objective_of_marginals(ms: &[WeightedPointCloud]) -> Result<ObjectiveValue> {
    let refs: Vec<&WeightedPointCloud> = ms.iter().collect();
    if ms[0].dim() <= 2 {
        let (level, witness, _) = depth::common_depth(&refs)?;
        return Ok(ObjectiveValue { level, witness, approximate: false });
    }
    let mut candidates: Vec<Point> = Vec::new();
    for (i, m) in ms.iter().enumerate() {
        candidates.push(m.mean());
        candidates.push(depth::depth_of_measure_heuristic(m, SPACE_CANDIDATES, i as u64)?.1);
    }
    let mut best: Option<ObjectiveValue> = None;
    for x in candidates {
        let mut level = Rational::one();
        for m in ms {
            level = level.min(depth::tukey_depth(m, &x)?.value);
        }
        if best.as_ref().is_none_or(|b| level > b.level) {
            best = Some(ObjectiveValue { level, witness: x, approximate: true });
        }
    }
    Ok(best.expect("at least one candidate"))
}

// Whether every marginal reaches `tau` at one common point (exact modes only).
fn reaches(ms: &[WeightedPointCloud], tau: &Rational) -> Result<bool> {
    let refs: Vec<&WeightedPointCloud> = ms.iter().collect();
    Ok(!depth::common_region(&refs, tau)?.is_empty())
}

/// Recomputes everything from the frame: depths at the witness, `c` of each
/// marginal (for `n <= 2`), and their spread.
pub fn verify(frame: &OrthoFrame, clouds: &[WeightedPointCloud], target: &Rational) -> Result<TransversalReport> {
    check_inputs(frame, clouds)?;
    let ms = marginals(frame, clouds)?;
    let obj = objective_of_marginals(&ms)?;
    report_for(frame, &ms, obj, target)
}

fn report_for(frame: &OrthoFrame, ms: &[WeightedPointCloud], obj: ObjectiveValue, target: &Rational) -> Result<TransversalReport> {
    let per: Vec<Rational> = ms.iter().map(|m| depth::tukey_depth(m, &obj.witness).map(|d| d.value)).collect::<Result<_>>()?;
    let objective = per.iter().min().expect("nonempty").clone();
    let failing: Vec<usize> = per.iter().enumerate().filter(|(_, d)| *d < target).map(|(i, _)| i).collect();
    let (c_points, c_spread) = if frame.n() <= 2 {
        let cs: Vec<Point> = ms.iter().map(|m| centers::center_point(m, frame.n()).map(|r| r.c)).collect::<Result<_>>()?;
        let spread = spread(&cs);
        (Some(cs), Some(spread))
    } else {
        (None, None)
    };
    Ok(TransversalReport {
        n: frame.n(),
        ambient: frame.ambient(),
        frame: frame.rows().to_vec(),
        projector: frame.projector(),
        objective,
        target: target.clone(),
        per_measure_depths: per,
        witness_point: obj.witness,
        c_points,
        c_spread,
        success: failing.is_empty(),
        failing,
        approximate: obj.approximate,
        warnings: Vec::new(),
        config: None,
        stats: None,
    })
}

fn spread(points: &[Point]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let d: f64 = a.iter().zip(b).map(|(x, y)| to_f64(&(x - y)).powi(2)).sum::<f64>().sqrt();
            worst = worst.max(d);
        }
    }
    worst
}

/// Orthonormal rows from a seeded Gaussian sample.
pub fn random_frame(ambient: usize, n: usize, seed: u64) -> Result<OrthoFrame> {
    random_frame_with(ambient, n, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn gaussian(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| StandardNormal.sample(rng)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// Removes the components along `basis` (twice, for stability) and normalizes.
fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) -> f64 {
    for _ in 0..2 {
        for b in basis {
            let c = dot(v, b);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
    }
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

fn random_frame_with(ambient: usize, n: usize, rng: &mut ChaCha8Rng) -> Result<OrthoFrame> {
    if n == 0 || n > ambient {
        return Err(domain(format!("need 1 <= n <= N, got n = {n}, N = {ambient}")));
    }
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    while rows.len() < n {
        let mut v = gaussian(rng, ambient);
        if orthogonalize(&mut v, &rows) > 1e-6 {
            rows.push(v);
        }
    }
    OrthoFrame::new(rows, FRAME_TOLERANCE)
}

// Rotates one row towards a random unit vector orthogonal to all rows.
fn perturbed(frame: &OrthoFrame, angle: f64, rng: &mut ChaCha8Rng) -> Option<OrthoFrame> {
    let rows = frame.rows();
    let i = rng.random_range(0..rows.len());
    let mut g = gaussian(rng, frame.ambient());
    if orthogonalize(&mut g, rows) < 1e-6 {
        return None;
    }
    let (c, s) = (angle.cos(), angle.sin());
    let mut new_rows = rows.to_vec();
    new_rows[i] = rows[i].iter().zip(&g).map(|(r, x)| c * r + s * x).collect();
    // Re-orthonormalize to keep rounding drift out of the frame check.
    let mut clean: Vec<Vec<f64>> = Vec::with_capacity(new_rows.len());
    for mut r in new_rows {
        orthogonalize(&mut r, &clean);
        clean.push(r);
    }
    OrthoFrame::new(clean, FRAME_TOLERANCE).ok()
}

struct RestartOutcome {
    frame: OrthoFrame,
    value: ObjectiveValue,
    evaluations: usize,
    trajectory: Vec<TrajectoryPoint>,
}

fn weight_denominator(clouds: &[WeightedPointCloud]) -> Rational {
    let den = rational::lcm_of_denominators(clouds.iter().flat_map(|c| c.atoms()).map(|a| &a.weight));
    Rational::new(num_bigint::BigInt::one(), den)
}

fn run_restart(
    clouds: &[WeightedPointCloud],
    n: usize,
    config: &SearchConfig,
    index: usize,
    step: &Rational,
    first_success: &AtomicUsize,
) -> Result<Option<RestartOutcome>> {
    if first_success.load(Ordering::Relaxed) < index {
        return Ok(None);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.master_seed);
    rng.set_stream(index as u64);
    let mut frame = random_frame_with(clouds[0].dim(), n, &mut rng)?;
    let mut value = objective(&frame, clouds)?;
    let mut evaluations = 1;
    let mut angle = config.step_schedule.initial_angle;
    let mut trajectory = vec![TrajectoryPoint { step: 0, objective: value.level.clone(), angle }];
    for k in 1..=config.local_steps {
        if value.level >= config.target {
            break;
        }
        // A lower-index restart already met the target.
        if first_success.load(Ordering::Relaxed) < index {
            return Ok(None);
        }
        let Some(candidate) = perturbed(&frame, angle, &mut rng) else {
            continue;
        };
        evaluations += 1;
        let ms = marginals(&candidate, clouds)?;
        let improved = if value.approximate {
            let v = objective_of_marginals(&ms)?;
            (v.level > value.level).then_some(v)
        } else if reaches(&ms, &(&value.level + step))? {
            Some(objective_of_marginals(&ms)?)
        } else {
            None
        };
        match improved {
            Some(v) => {
                frame = candidate;
                value = v;
                angle = config.step_schedule.initial_angle;
                trajectory.push(TrajectoryPoint { step: k, objective: value.level.clone(), angle });
            }
            None => {
                angle *= config.step_schedule.decay;
                if angle < config.step_schedule.min_angle {
                    angle = config.step_schedule.initial_angle;
                }
            }
        }
    }
    if value.level >= config.target {
        first_success.fetch_min(index, Ordering::Relaxed);
    }
    Ok(Some(RestartOutcome { frame, value, evaluations, trajectory }))
}

/// Random-restart hill climbing over frames; restart `i` draws from stream
/// `i` of the master seed. The lowest-index restart that meets the target is
/// reported, otherwise the best by objective with ties to the lower index.
/// Restarts above a known success stop early, so the report depends only on
/// the configuration and not on how restarts are scheduled across threads.
pub fn search(clouds: &[WeightedPointCloud], n: usize, config: &SearchConfig) -> Result<TransversalReport> {
    config.validate()?;
    let ambient = clouds.first().map(|c| c.dim()).ok_or_else(|| domain("need at least one measure"))?;
    if clouds.iter().any(|c| c.dim() != ambient) {
        return Err(domain("all measures must live in the same dimension"));
    }
    if !(1..=3).contains(&n) || n > ambient {
        return Err(domain(format!("subspace dimension {n} unsupported for ambient {ambient}")));
    }
    let mut warnings = Vec::new();
    if n >= 2 {
        let need = min_dimension(clouds.len(), n)?;
        if ambient < need {
            warnings.push(format!("ambient dimension {ambient} is below the guaranteed bound {need}"));
        }
    }
    let step = weight_denominator(clouds);
    let first_success = AtomicUsize::new(usize::MAX);
    let outcomes: Vec<Result<Option<RestartOutcome>>> = (0..config.restarts)
        .into_par_iter()
        .map(|i| run_restart(clouds, n, config, i, &step, &first_success))
        .collect();
    let winner = first_success.load(Ordering::Relaxed);
    // Only restarts up to the winner are guaranteed to have run to completion.
    let considered = if winner == usize::MAX { config.restarts } else { winner + 1 };
    let mut best: Option<(usize, RestartOutcome)> = None;
    let mut evaluations = 0;
    for (index, outcome) in outcomes.into_iter().enumerate().take(considered) {
        let outcome = outcome?.ok_or_else(|| Error::Internal(format!("restart {index} stopped before the winner")))?;
        evaluations += outcome.evaluations;
        if best.as_ref().is_none_or(|(_, b)| outcome.value.level > b.value.level) {
            best = Some((index, outcome));
        }
    }
    let restarts_run = considered;
    let (best_restart, outcome) = best.expect("at least one restart");
    let ms = marginals(&outcome.frame, clouds)?;
    let mut report = report_for(&outcome.frame, &ms, outcome.value, &config.target)?;
    report.warnings = warnings;
    report.config = Some(config.clone());
    report.stats = Some(SearchStats { restarts_run, best_restart, evaluations, trajectory: outcome.trajectory });
    Ok(report)
}

/// Runs `f` on a dedicated pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{generate, Family, GenParams};
    use crate::rational::{int, rat};

    #[test]
    fn random_frames_are_orthonormal_and_reproducible() {
        for seed in 0..100 {
            let f = random_frame(5, 3, seed).unwrap();
            assert!(f.gram_error() <= 1e-12);
        }
        assert_eq!(random_frame(4, 2, 9).unwrap(), random_frame(4, 2, 9).unwrap());
        assert_eq!(random_frame(3, 3, 1).unwrap().n(), 3);
        assert!(random_frame(2, 3, 0).is_err());
    }

    #[test]
    fn single_measure_objective_is_its_depth() {
        let c = generate(Family::GaussianQuantized, &GenParams { dim: 3, atoms: 10, seed: 4, ..GenParams::default() }).unwrap();
        let f = random_frame(3, 2, 11).unwrap();
        let m = depth::marginal(&c, &f).unwrap();
        let v = objective(&f, std::slice::from_ref(&c)).unwrap();
        assert_eq!(v.level, depth::depth_of_measure(&m).unwrap().0.value);
    }

    #[test]
    fn hexagon_plane_reaches_one_half() {
        let c = generate(Family::Coplanar, &GenParams { dim: 4, ..GenParams::default() }).unwrap();
        let f = OrthoFrame::coordinate(4, &[0, 1]).unwrap();
        let r = verify(&f, &[c.clone(), c], &rat(28, 81)).unwrap();
        assert_eq!(r.objective, rat(1, 2));
        assert!(r.success);
        assert_eq!(r.c_spread, Some(0.0));
    }

    #[test]
    fn failing_measure_is_identified() {
        let hex = generate(Family::Coplanar, &GenParams { dim: 3, ..GenParams::default() }).unwrap();
        let tri = WeightedPointCloud::uniform(vec![
            vec![int(4), int(0), int(0)],
            vec![int(-2), int(4), int(0)],
            vec![int(-2), int(-4), int(0)],
        ])
        .unwrap();
        let f = OrthoFrame::coordinate(3, &[0, 1]).unwrap();
        let r = verify(&f, &[hex, tri], &rat(28, 81)).unwrap();
        assert!(!r.success);
        assert_eq!(r.failing, vec![1]);
    }

    #[test]
    fn degenerate_search_is_one_evaluation() {
        let c = generate(Family::GaussianQuantized, &GenParams { dim: 3, atoms: 8, seed: 2, ..GenParams::default() }).unwrap();
        let config = SearchConfig { restarts: 1, local_steps: 0, ..SearchConfig::for_dimension(2).unwrap() };
        let r = search(std::slice::from_ref(&c), 2, &config).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(config.master_seed);
        rng.set_stream(0);
        let f = random_frame_with(3, 2, &mut rng).unwrap();
        assert_eq!(r.frame, f.rows().to_vec());
        assert_eq!(r.objective, objective(&f, &[c]).unwrap().level);
    }
}
