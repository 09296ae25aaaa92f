//! The analytic test corpus and the end-to-end checks run over it.
//!
//! Each check returns a [`CheckOutcome`] with a pass flag and a one-line detail,
//! so the same code backs the acceptance test target and the `corpus` command.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curve::{min_self_distance, ClosedCurve};
use crate::deform::{
    correct_with, helix_params, turns_for, Correction, DeformOptions, SegmentProfile, Splice,
    DEFAULT_S0, DEFAULT_WIDTH, TOL_WRITHE,
};
use crate::error::Result;
use crate::family::{
    correct_family, flexed_trefoil, max_deviation, omega_homotopy, tilde_family, CurveFamily,
    ParamSpace,
};
use crate::indicatrix::{enclosed_area, fuller_report, tangent_indicatrix};
use crate::io::AnalyticCurve;
use crate::report::fmt_sig;
use crate::writhe::{cross_validate, writhe, WritheMethod, DEFAULT_BAND};

pub const ORACLE_TOL: f64 = 1e-3;
pub const FULLER_TOL: f64 = 1e-2;
pub const PITCH_TOL: f64 = 1e-12;
pub const CONNECTOR_TOL: f64 = 1e-6;
pub const HALF_TIME_TOL: f64 = 1e-9;
pub const MAX_SWEEP_JUMP: f64 = 0.2;
pub const ORACLE_TIME_BUDGET_S: f64 = 60.0;
/// Oracle deltas below this are rounding noise and count as converged.
pub const CONVERGED_FLOOR: f64 = 1e-10;

/// A named member of the corpus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub name: String,
    pub recipe: AnalyticCurve,
}

impl CorpusEntry {
    pub fn build(&self, n_samples: usize) -> Result<ClosedCurve> {
        self.recipe.with_samples(n_samples).build()
    }

    /// Smallest sample count the recipe accepts.
    pub fn min_samples(&self) -> usize {
        match self.recipe {
            AnalyticCurve::TorusKnot { p, q, .. } => 64 * p.unsigned_abs().max(q.unsigned_abs()) as usize,
            _ => 16,
        }
    }
}

/// Circle, the (2,3), (3,2) and (2,5) torus knots, and three perturbed circles.
pub fn corpus() -> Vec<CorpusEntry> {
    let torus = |p, q, minor| AnalyticCurve::TorusKnot { p, q, major: 2.0, minor, n: 4096 };
    let ripple = |amplitude, k, height, m, phase| AnalyticCurve::PerturbedCircle {
        amplitude,
        k,
        height,
        m,
        phase,
        n: 4096,
    };
    [
        ("circle", AnalyticCurve::Circle { radius: 1.0, n: 4096 }),
        ("torus_2_3", torus(2, 3, 1.0)),
        ("torus_3_2", torus(3, 2, 0.5)),
        ("torus_2_5", torus(2, 5, 1.0)),
        ("perturbed_a", ripple(0.5, 3, 0.8, 2, 0.0)),
        ("perturbed_b", ripple(0.7, 3, 1.2, 5, 0.9)),
        ("perturbed_c", ripple(0.6, 3, 0.5, 4, 0.2)),
    ]
    .into_iter()
    .map(|(name, recipe)| CorpusEntry {
        name: name.into(),
        recipe,
    })
    .collect()
}

/// Sizes and seeds for the suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub n_samples: usize,
    pub band: usize,
    pub seed: u64,
    pub correction_trials: usize,
    /// Distinct random curves shared by the correction trials.
    pub trial_curves: usize,
    pub helix_trials: usize,
    pub family_nodes: usize,
    pub family_samples: usize,
    pub sweep_dt: f64,
    pub convergence_sizes: Vec<usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            n_samples: 4096,
            band: DEFAULT_BAND,
            seed: 20_240_601,
            correction_trials: 100,
            trial_curves: 20,
            helix_trials: 1000,
            family_nodes: 64,
            family_samples: 1024,
            sweep_dt: 0.05,
            convergence_sizes: vec![256, 512, 1024, 2048, 4096],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {} [{}] {}: {} ({:.1} s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.seconds
        )
    }
}

fn outcome(id: u32, name: &str, start: Instant, result: Result<(bool, String)>) -> CheckOutcome {
    let (passed, detail) = result.unwrap_or_else(|e| (false, format!("error: {e}")));
    CheckOutcome {
        id,
        name: name.into(),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn options() -> DeformOptions {
    DeformOptions::default()
}

/// Quadrature against the polygonal oracle on every corpus curve.
pub fn check_oracle(config: &SuiteConfig) -> CheckOutcome {
    let start = Instant::now();
    let result = (|| {
        let mut worst: (f64, String) = (0.0, String::new());
        for entry in corpus() {
            let curve = entry.build(config.n_samples)?;
            let (quad, _) = cross_validate(&curve, config.band)?;
            let delta = quad.oracle_delta.unwrap_or(f64::INFINITY);
            if delta >= worst.0 {
                worst = (delta, entry.name.clone());
            }
        }
        let secs = start.elapsed().as_secs_f64();
        Ok((
            worst.0 < ORACLE_TOL && secs < ORACLE_TIME_BUDGET_S,
            format!(
                "max |quadrature - polygonal| = {} ({}), N = {}, band = {}, budget {} s {}",
                fmt_sig(worst.0),
                worst.1,
                config.n_samples,
                config.band,
                ORACLE_TIME_BUDGET_S,
                if secs < ORACLE_TIME_BUDGET_S { "met" } else { "exceeded" }
            ),
        ))
    })();
    outcome(1, "oracle equivalence", start, result)
}

/// Fuller residual of a correction output, reusing its recorded writhe.
pub fn correction_residual(c: &Correction) -> Result<f64> {
    let raw = enclosed_area(&tangent_indicatrix(&c.curve)?)?;
    Ok(fuller_report(c.curve.len(), c.trace.wr_output, c.trace.method, raw).residual_mod2)
}

/// One correction per corpus curve, target `Wr(γ̃) − 1.3`.
pub fn corpus_corrections(config: &SuiteConfig) -> Result<Vec<(String, Correction)>> {
    corpus()
        .into_iter()
        .map(|entry| {
            let curve = entry.build(config.n_samples)?;
            let splice = Splice::prepare(&curve, DEFAULT_S0, DEFAULT_WIDTH, None)?;
            let method = WritheMethod::PolygonalExact;
            let wr_input = writhe(&curve, method)?;
            let wr_tilde = writhe(&splice.tilde(1.0, SegmentProfile::UNIFORM)?, method)?;
            let w = -1.3;
            let c = correct_with(&splice, 1.0, w, turns_for(w), wr_input, wr_tilde, wr_tilde + w, method)?;
            Ok((entry.name, c))
        })
        .collect()
}

/// Fuller residual on every corpus curve and every correction output.
pub fn check_fuller(config: &SuiteConfig, corrections: &[(String, Correction)]) -> CheckOutcome {
    let start = Instant::now();
    let result = (|| {
        let mut worst: (f64, String) = (0.0, String::new());
        for entry in corpus() {
            let curve = entry.build(config.n_samples)?;
            let r = crate::indicatrix::fuller_check(&curve)?.residual_mod2;
            if r >= worst.0 {
                worst = (r, entry.name.clone());
            }
        }
        for (name, c) in corrections {
            let r = correction_residual(c)?;
            if r >= worst.0 {
                worst = (r, format!("corrected {name}"));
            }
        }
        Ok((
            worst.0 < FULLER_TOL,
            format!(
                "max residual_mod2 = {} ({}), {} curves + {} corrections, N = {}",
                fmt_sig(worst.0),
                worst.1,
                corpus().len(),
                corrections.len(),
                config.n_samples
            ),
        ))
    })();
    outcome(2, "Fuller relation", start, result)
}

/// A random embedded curve: a torus knot or a rippled circle.
pub fn random_curve(rng: &mut impl Rng, n_samples: usize) -> Result<ClosedCurve> {
    let recipe = if rng.gen_bool(0.6) {
        let (p, q) = [(2, 3), (3, 2), (2, 5), (3, 4), (2, -3), (3, -2)][rng.gen_range(0..6)];
        AnalyticCurve::TorusKnot {
            p,
            q,
            major: rng.gen_range(1.8..2.6),
            minor: rng.gen_range(0.4..1.1),
            n: n_samples,
        }
    } else {
        AnalyticCurve::PerturbedCircle {
            amplitude: rng.gen_range(0.1..0.6),
            k: rng.gen_range(2..6),
            height: rng.gen_range(0.2..1.0),
            m: rng.gen_range(1..5),
            phase: rng.gen_range(0.0..2.0 * PI),
            n: n_samples,
        }
    };
    recipe.build()
}

/// Summary of the randomized correction trials.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub trials: usize,
    pub max_error: f64,
    pub min_distance: f64,
    pub all_local: bool,
    pub max_connector_area: f64,
    pub max_fuller_residual: f64,
}

/// Random `(curve, target)` trials with `|w| < 5`.
pub fn correction_trials(config: &SuiteConfig) -> Result<TrialStats> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let method = WritheMethod::PolygonalExact;
    let curves = config.trial_curves.max(1);
    let per_curve = config.correction_trials.div_ceil(curves);
    let mut stats = TrialStats {
        min_distance: f64::INFINITY,
        all_local: true,
        ..TrialStats::default()
    };
    for _ in 0..curves {
        if stats.trials >= config.correction_trials {
            break;
        }
        let curve = random_curve(&mut rng, config.n_samples)?;
        let splice = Splice::prepare(&curve, DEFAULT_S0, DEFAULT_WIDTH, None)?;
        let wr_input = writhe(&curve, method)?;
        let wr_tilde = writhe(&splice.tilde(1.0, SegmentProfile::UNIFORM)?, method)?;
        for _ in 0..per_curve.min(config.correction_trials - stats.trials) {
            let w: f64 = rng.gen_range(-4.95..4.95);
            let target = wr_tilde + w;
            let c = correct_with(&splice, 1.0, w, turns_for(w), wr_input, wr_tilde, target, method)?;
            stats.trials += 1;
            stats.max_error = stats.max_error.max((c.trace.wr_output - target).abs());
            stats.min_distance = stats.min_distance.min(min_self_distance(&c.curve, 2));
            stats.all_local &= c.trace.locality_ok && splice.is_local(&c.curve);
            stats.max_connector_area = stats.max_connector_area.max(c.trace.connector_area.abs());
            stats.max_fuller_residual = stats.max_fuller_residual.max(correction_residual(&c)?);
        }
    }
    Ok(stats)
}

pub fn check_trials(config: &SuiteConfig, stats: &Result<TrialStats>, start: Instant) -> CheckOutcome {
    let result = match stats {
        Ok(s) => Ok((
            s.trials == config.correction_trials
                && s.max_error < TOL_WRITHE
                && s.min_distance > 0.0
                && s.all_local,
            format!(
                "{} trials, max |Wr - target| = {}, min self-distance = {}, locality {}",
                s.trials,
                fmt_sig(s.max_error),
                fmt_sig(s.min_distance),
                if s.all_local { "held" } else { "violated" }
            ),
        )),
        Err(e) => Ok((false, format!("error: {e}"))),
    };
    outcome(3, "writhe fixing", start, result)
}

/// Pitch identity and per-turn containment for random helix parameters.
pub fn check_helix_algebra(config: &SuiteConfig) -> CheckOutcome {
    let start = Instant::now();
    let result = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed);
        let mut worst_pitch: f64 = 0.0;
        let mut worst_ball: f64 = f64::NEG_INFINITY;
        for _ in 0..config.helix_trials {
            let n: u32 = rng.gen_range(1..=8);
            let nf = n as f64;
            let w = rng.gen_range(-nf..nf);
            let epsilon = rng.gen_range(1e-3..1.0);
            let scale = rng.gen_range(1e-3..=1.0);
            let h = helix_params(w, n, epsilon, scale, 0.4375, 0.5625)?;
            let pitch_sin = (h.pitch / (2.0 * PI * h.radius)).atan().sin();
            worst_pitch = worst_pitch.max((pitch_sin - (1.0 - w.abs() / nf)).abs());
            let excess = h.max_turn_extent(64 * n as usize + 1) - h.turn_ball_radius();
            worst_ball = worst_ball.max(excess / h.turn_ball_radius());
        }
        Ok((
            worst_pitch < PITCH_TOL && worst_ball <= 0.0,
            format!(
                "{} helices, max pitch identity error = {}, max (extent - S eps/2n)/(S eps/2n) = {}",
                config.helix_trials,
                fmt_sig(worst_pitch),
                fmt_sig(worst_ball)
            ),
        ))
    })();
    outcome(4, "helix algebra", start, result)
}

pub fn check_connectors(
    max_area: std::result::Result<(f64, usize), String>,
    start: Instant,
) -> CheckOutcome {
    let result = Ok(match max_area {
        Ok((a, count)) => (
            a < CONNECTOR_TOL,
            format!("max |connector area| = {} over {count} corrections", fmt_sig(a)),
        ),
        Err(e) => (false, format!("error: {e}")),
    });
    outcome(5, "connector cancellation", start, result)
}

/// The S¹ family used by the family and homotopy checks.
pub fn s1_family(config: &SuiteConfig) -> Result<(CurveFamily, CurveFamily)> {
    let space = ParamSpace::circle(config.family_nodes)?;
    let raw = flexed_trefoil(&space, config.family_samples)?;
    let fixed = correct_family(&raw, &options())?;
    Ok((raw, fixed))
}

pub fn check_family(fam: &Result<(CurveFamily, CurveFamily)>, start: Instant) -> CheckOutcome {
    let result = match fam {
        Ok((_, fixed)) => {
            let raw_wr: Vec<f64> = fixed.traces.iter().map(|t| t.wr_input).collect();
            let spread = raw_wr.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - raw_wr.iter().cloned().fold(f64::INFINITY, f64::min);
            let dev = max_deviation(fixed).unwrap_or(f64::INFINITY);
            let max_w = fixed.traces.iter().map(|t| t.w_applied.abs()).fold(0.0, f64::max);
            let n = fixed.turns.unwrap_or(0);
            Ok((
                spread >= 1.0 && dev < TOL_WRITHE && max_w < n as f64,
                format!(
                    "{} nodes, raw writhe spread = {}, max |Wr - omega| = {}, max |w| = {} < n = {n}",
                    fixed.curves.len(),
                    fmt_sig(spread),
                    fmt_sig(dev),
                    fmt_sig(max_w)
                ),
            ))
        }
        Err(e) => Ok((false, format!("error: {e}"))),
    };
    outcome(6, "family constancy", start, result)
}

fn max_sample_gap(a: &CurveFamily, b: &CurveFamily) -> f64 {
    a.curves
        .iter()
        .zip(&b.curves)
        .flat_map(|(x, y)| x.samples().iter().zip(y.samples()).map(|(p, q)| (p - q).norm()))
        .fold(0.0, f64::max)
}

/// Writhe at each node along `t = 0, dt, …, 1`, and the largest jump between
/// consecutive times.
pub fn homotopy_sweep(raw: &CurveFamily, fixed: &CurveFamily, dt: f64) -> Result<f64> {
    let steps = (1.0 / dt).round() as usize;
    let mut prev: Option<Vec<f64>> = None;
    let mut jump: f64 = 0.0;
    for k in 0..=steps {
        let t = (k as f64 * dt).min(1.0);
        let w = omega_homotopy(raw, fixed, t)?.writhes(&options())?;
        if let Some(p) = &prev {
            jump = p.iter().zip(&w).map(|(a, b)| (a - b).abs()).fold(jump, f64::max);
        }
        prev = Some(w);
    }
    Ok(jump)
}

pub fn check_homotopy(
    fam: &Result<(CurveFamily, CurveFamily)>,
    config: &SuiteConfig,
    start: Instant,
) -> CheckOutcome {
    let result = match fam {
        Ok((raw, fixed)) => (|| {
            let one = omega_homotopy(raw, fixed, 1.0)?;
            let exact = one
                .curves
                .iter()
                .zip(&fixed.curves)
                .all(|(a, b)| a.samples() == b.samples());
            let half = omega_homotopy(raw, fixed, 0.5)?;
            let half_gap = max_sample_gap(&half, &tilde_family(raw, fixed)?);
            let jump = homotopy_sweep(raw, fixed, config.sweep_dt)?;
            Ok((
                exact && half_gap < HALF_TIME_TOL && jump < MAX_SWEEP_JUMP,
                format!(
                    "t=1 bit-exact: {exact}, t=1/2 max gap to tilde family = {}, max writhe jump (dt = {}) = {}",
                    fmt_sig(half_gap),
                    config.sweep_dt,
                    fmt_sig(jump)
                ),
            ))
        })(),
        Err(e) => Ok((false, format!("error: {e}"))),
    };
    outcome(7, "homotopy endpoints", start, result)
}

/// Oracle deltas of one corpus curve over the configured sizes (sizes below
/// the recipe's minimum are skipped).
pub fn convergence_series(entry: &CorpusEntry, config: &SuiteConfig) -> Result<Vec<(usize, f64)>> {
    config
        .convergence_sizes
        .iter()
        .filter(|&&n| n >= entry.min_samples())
        .map(|&n| {
            let (quad, _) = cross_validate(&entry.build(n)?, config.band)?;
            Ok((n, quad.oracle_delta.unwrap_or(f64::INFINITY)))
        })
        .collect()
}

/// Decreasing in trend: the last delta is below the first, and the least-squares
/// slope of `log delta` against `log N` is negative. Series already at rounding
/// level are converged.
pub fn decreasing_in_trend(series: &[(usize, f64)]) -> bool {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .map(|&(n, d)| ((n as f64).ln(), d.max(CONVERGED_FLOOR).ln()))
        .collect();
    if series.iter().all(|&(_, d)| d <= CONVERGED_FLOOR) {
        return true;
    }
    if pts.len() < 2 {
        return false;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let last = pts[pts.len() - 1].1;
    sxy / sxx < 0.0 && last < pts[0].1
}

pub fn check_convergence(config: &SuiteConfig) -> CheckOutcome {
    let start = Instant::now();
    let result = (|| {
        let mut failing = Vec::new();
        let mut ratios = Vec::new();
        for entry in corpus() {
            let series = convergence_series(&entry, config)?;
            if !decreasing_in_trend(&series) {
                failing.push(entry.name.clone());
            }
            let (first, last) = (series[0].1, series[series.len() - 1].1);
            ratios.push(format!("{} {}->{}", entry.name, fmt_sig(first), fmt_sig(last)));
        }
        Ok((
            failing.is_empty(),
            if failing.is_empty() {
                format!("all decreasing; {}", ratios.join(", "))
            } else {
                format!("not decreasing: {}; {}", failing.join(", "), ratios.join(", "))
            },
        ))
    })();
    outcome(8, "convergence", start, result)
}

/// Run all eight checks in order.
pub fn run_suite(config: &SuiteConfig, mut report: impl FnMut(&CheckOutcome)) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let mut push = |o: CheckOutcome, out: &mut Vec<CheckOutcome>| {
        report(&o);
        out.push(o);
    };
    push(check_oracle(config), &mut out);

    let start = Instant::now();
    let corrections = corpus_corrections(config);
    let fuller = match &corrections {
        Ok(c) => check_fuller(config, c),
        Err(e) => outcome(2, "Fuller relation", start, Ok((false, format!("error: {e}")))),
    };
    push(fuller, &mut out);

    let start = Instant::now();
    let trials = correction_trials(config);
    push(check_trials(config, &trials, start), &mut out);

    push(check_helix_algebra(config), &mut out);

    let start = Instant::now();
    let connector = match (&corrections, &trials) {
        (Ok(c), Ok(t)) => Ok((
            c.iter()
                .map(|(_, c)| c.trace.connector_area.abs())
                .fold(t.max_connector_area, f64::max),
            c.len() + t.trials,
        )),
        (Err(e), _) | (_, Err(e)) => Err(e.to_string()),
    };
    push(check_connectors(connector, start), &mut out);

    let start = Instant::now();
    let family = s1_family(config);
    push(check_family(&family, start), &mut out);
    let start = Instant::now();
    push(check_homotopy(&family, config, start), &mut out);

    push(check_convergence(config), &mut out);
    out
}
