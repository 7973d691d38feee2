//! Integral and pointwise quantities behind the extension criteria.
//!
//! Tracks running space-time norms of |A| and |H|, the pointwise hypothesis
//! witnesses (lower curvature bound, mean-convexity, pinching ratio), and
//! classifies the near-singularity growth of the norms against the sharp
//! alpha = n + 2 dichotomy.

use crate::error::{Error, Result};
use crate::flow::{FlowTrajectory, StopReason};
use crate::geometry::GeometryFrame;
use crate::oracles::SphereSolution;
use crate::Immersion;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quantity {
    /// Norm of the second fundamental form, |A|.
    A,
    /// Mean curvature magnitude, |H|.
    H,
}

impl Quantity {
    pub fn label(self) -> &'static str {
        match self {
            Quantity::A => "A",
            Quantity::H => "H",
        }
    }
}

/// Running space-time integrals of |q|^alpha dmu dt plus the latest spatial
/// snapshot, for every registered (quantity, alpha) pair.
#[derive(Debug, Clone, Serialize)]
pub struct NormAccumulator {
    pairs: Vec<(Quantity, f64)>,
    running: Vec<f64>,
    spatial: Vec<f64>,
}

impl NormAccumulator {
    pub fn new(pairs: Vec<(Quantity, f64)>) -> Result<Self> {
        if pairs.iter().any(|&(_, a)| !(a > 0.0)) {
            return Err(Error::NonPositiveInputs("accumulator exponent alpha"));
        }
        let k = pairs.len();
        Ok(NormAccumulator {
            pairs,
            running: vec![0.0; k],
            spatial: vec![0.0; k],
        })
    }

    pub fn pairs(&self) -> &[(Quantity, f64)] {
        &self.pairs
    }

    pub fn running(&self) -> &[f64] {
        &self.running
    }

    pub fn spatial(&self) -> &[f64] {
        &self.spatial
    }

    fn index_of(&self, quantity: Quantity, alpha: f64) -> Option<usize> {
        self.pairs
            .iter()
            .position(|&(q, a)| q == quantity && a == alpha)
    }

    /// Accumulated value of the space-time integral for one pair.
    pub fn value(&self, quantity: Quantity, alpha: f64) -> Option<f64> {
        self.index_of(quantity, alpha).map(|i| self.running[i])
    }

    /// Latest spatial snapshot (integral of |q|^alpha dmu)^{1/alpha}.
    pub fn snapshot_norm(&self, quantity: Quantity, alpha: f64) -> Option<f64> {
        self.index_of(quantity, alpha)
            .map(|i| self.spatial[i].powf(1.0 / alpha))
    }

    /// Recompute the spatial integrals on a frame without advancing time.
    pub fn refresh_spatial(&mut self, frame: &GeometryFrame) {
        for (i, &(q, alpha)) in self.pairs.iter().enumerate() {
            self.spatial[i] = frame.integral_abs_pow(q, alpha);
        }
    }

    /// Left-rectangle slab: running += dt * (current spatial integrals).
    pub fn add_time_slab(&mut self, dt: f64) {
        debug_assert!(dt >= 0.0);
        for i in 0..self.running.len() {
            self.running[i] += dt * self.spatial[i];
        }
    }
}

/// Left-rectangle time quadrature: adds dt * integral of |q|^alpha dmu for
/// every registered pair and refreshes the spatial snapshots.
pub fn update_accumulators(acc: &mut NormAccumulator, frame: &GeometryFrame, dt: f64) {
    acc.refresh_spatial(frame);
    acc.add_time_slab(dt);
}

/// Monitor set attached to a flow run.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MonitorConfig {
    pub pairs: Vec<(Quantity, f64)>,
    /// Optional user bound C for the hypothesis h_ij >= -C.
    pub c_bound: Option<f64>,
}

/// One row of hypothesis diagnostics at a single time.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MonitorRow {
    pub t: f64,
    pub min_kappa: f64,
    pub min_h: f64,
    /// max |A|^2 / H^2, present only while min H > 0.
    pub pinching: Option<f64>,
}

pub fn hypothesis_monitor(frame: &GeometryFrame) -> MonitorRow {
    MonitorRow {
        t: frame.t,
        min_kappa: frame.min_kappa(),
        min_h: frame.min_h(),
        pinching: frame.max_pinching(),
    }
}

/// Aggregated hypothesis report over a finished trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct MonitorReport {
    pub rows: Vec<MonitorRow>,
    /// Tightest C witnessed for h_ij >= -C (zero when curvature never dips
    /// below zero).
    pub tightest_c: f64,
    pub c_bound: Option<f64>,
    pub c_bound_violated: bool,
    pub initial_min_h: f64,
    pub h_positive_preserved: bool,
    pub max_pinching_seen: Option<f64>,
    /// Largest single-step increase of max |A|^2/H^2 while H > 0.
    pub worst_pinching_uptick: Option<f64>,
    pub dichotomy: Option<DichotomySummary>,
}

/// Builds the monitor report from the per-step records; rows are emitted at
/// the frame stride to keep reports small.
pub fn monitor_report(traj: &FlowTrajectory) -> MonitorReport {
    let rows: Vec<MonitorRow> = traj
        .frames
        .iter()
        .map(|tf| hypothesis_monitor(&tf.frame))
        .collect();
    let mut tightest_c = 0.0f64;
    let mut h_positive = true;
    let mut max_pinch: Option<f64> = None;
    let mut worst_uptick: Option<f64> = None;
    let mut prev_pinch: Option<f64> = None;
    for rec in &traj.records {
        tightest_c = tightest_c.max(-rec.min_kappa);
        if rec.min_h <= 0.0 {
            h_positive = false;
        }
        if let Some(p) = rec.pinching {
            max_pinch = Some(max_pinch.map_or(p, |q: f64| q.max(p)));
            if let Some(prev) = prev_pinch {
                let up = p - prev;
                worst_uptick = Some(worst_uptick.map_or(up, |w: f64| w.max(up)));
            }
        }
        prev_pinch = rec.pinching;
    }
    let c_bound = traj.monitor.c_bound;
    let c_bound_violated = c_bound.is_some_and(|c| tightest_c > c);
    let initial_min_h = traj.records.first().map_or(f64::NAN, |r| r.min_h);
    let dichotomy = {
        let n = traj.dimension as f64;
        let critical = traj
            .monitor
            .pairs
            .iter()
            .find(|&&(_, a)| (a - (n + 2.0)).abs() < 1e-12)
            .copied();
        critical.and_then(|(q, a)| dichotomy_fit(traj, q, a).ok().map(|f| f.summary(q, a)))
    };
    MonitorReport {
        rows,
        tightest_c,
        c_bound,
        c_bound_violated,
        initial_min_h,
        h_positive_preserved: h_positive,
        max_pinching_seen: max_pinch,
        worst_pinching_uptick: worst_uptick,
        dichotomy,
    }
}

/// Outcome of fitting the accumulator growth near the blow-up time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DichotomyVerdict {
    /// Integral converges; `estimate` extrapolates the remaining tail.
    Finite { estimate: f64 },
    /// Critical logarithmic growth: increment rate ~ (T - t)^{-1}.
    LogDivergent,
    /// Supercritical power divergence with the given exponent of (T - t).
    PowerDivergent { divergence_exponent: f64 },
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DichotomyFit {
    /// Estimated maximal time (exact for analytic spheres, extrapolated from
    /// the 1/max|A|^2 law otherwise).
    pub t_est: f64,
    /// Fitted exponent p of the spatial integral ~ (T - t)^p; the sharp
    /// theory gives p = (n - alpha)/2.
    pub fitted_exponent: f64,
    pub samples_used: usize,
    pub verdict: DichotomyVerdict,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DichotomySummary {
    pub quantity: Quantity,
    pub alpha: f64,
    pub t_est: f64,
    pub fitted_exponent: f64,
    pub verdict: DichotomyVerdict,
}

impl DichotomyFit {
    fn summary(&self, quantity: Quantity, alpha: f64) -> DichotomySummary {
        DichotomySummary {
            quantity,
            alpha,
            t_est: self.t_est,
            fitted_exponent: self.fitted_exponent,
            verdict: self.verdict,
        }
    }
}

const FIT_MIN_SAMPLES: usize = 20;
const FIT_CLASSIFY_BAND: f64 = 0.1;

/// Least-squares classification of the accumulator behaviour near blow-up.
///
/// Fits log(spatial integral) against log(T_est - t) over the fit window
/// (the last two decades of T_est - t): exponent (n - alpha)/2 means the
/// accumulator converges for alpha < n + 2, grows logarithmically at the
/// critical exponent, and diverges as a power beyond it.
pub fn dichotomy_fit(traj: &FlowTrajectory, quantity: Quantity, alpha: f64) -> Result<DichotomyFit> {
    if !matches!(
        traj.stop_reason,
        StopReason::CurvatureBlowup | StopReason::StepUnderflow
    ) {
        return Err(Error::InsufficientSamples { have: 0, need: FIT_MIN_SAMPLES });
    }
    let pair_idx = traj
        .accumulator
        .index_of(quantity, alpha)
        .ok_or(Error::MissingAccumulator {
            quantity: quantity.label(),
            alpha,
        })?;

    let t_est = estimate_maximal_time(traj)?;
    let t_last = traj.records.last().unwrap().t;
    let rem_last = t_est - t_last;
    if !(rem_last > 0.0) {
        return Err(Error::TrajectoryTooShort(
            "estimated maximal time does not exceed the last record".into(),
        ));
    }

    // fit window: last two decades of T_est - t
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut acc_at_last = 0.0;
    let mut spatial_last = 0.0;
    for rec in &traj.records {
        let rem = t_est - rec.t;
        let spatial = rec.spatial[pair_idx];
        if rem <= 100.0 * rem_last && rem > 0.0 && spatial > 0.0 {
            xs.push(rem.ln());
            ys.push(spatial.ln());
        }
        acc_at_last = rec.acc[pair_idx];
        spatial_last = spatial;
    }
    if xs.len() < FIT_MIN_SAMPLES {
        return Err(Error::InsufficientSamples {
            have: xs.len(),
            need: FIT_MIN_SAMPLES,
        });
    }
    let (slope, _) = linear_fit(&xs, &ys);

    let verdict = if slope > -1.0 + FIT_CLASSIFY_BAND {
        // spatial ~ (T-t)^p with p > -1: remaining tail ~ I(t) (T-t)/(p+1)
        let tail = spatial_last * rem_last / (slope + 1.0);
        DichotomyVerdict::Finite {
            estimate: acc_at_last + tail,
        }
    } else if slope > -1.0 - FIT_CLASSIFY_BAND {
        DichotomyVerdict::LogDivergent
    } else {
        DichotomyVerdict::PowerDivergent {
            divergence_exponent: -(slope + 1.0),
        }
    };
    Ok(DichotomyFit {
        t_est,
        fitted_exponent: slope,
        samples_used: xs.len(),
        verdict,
    })
}

/// Maximal-time estimate: exact for analytic spheres, otherwise a linear fit
/// of 1/max|A|^2 against t over the high-curvature tail (type-I ansatz).
fn estimate_maximal_time(traj: &FlowTrajectory) -> Result<f64> {
    if let Immersion::AnalyticSphere { radius, dimension } = &traj.initial {
        return Ok(SphereSolution::new(*dimension, *radius)?.maximal_time());
    }
    let final_a2 = traj.records.last().unwrap().max_a2;
    let mut ts = Vec::new();
    let mut ys = Vec::new();
    for rec in &traj.records {
        if rec.max_a2 >= final_a2 / 100.0 {
            ts.push(rec.t);
            ys.push(1.0 / rec.max_a2);
        }
    }
    if ts.len() < 3 {
        return Err(Error::InsufficientSamples {
            have: ts.len(),
            need: 3,
        });
    }
    let (slope, intercept) = linear_fit(&ts, &ys);
    if !(slope < 0.0) {
        return Err(Error::TrajectoryTooShort(
            "max |A|^2 is not growing; cannot extrapolate a blow-up time".into(),
        ));
    }
    Ok(-intercept / slope)
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Per-(quantity, alpha) verdict inside an [`ExtensionReport`].
#[derive(Debug, Clone, Serialize)]
pub struct AlphaVerdict {
    pub quantity: Quantity,
    pub alpha: f64,
    pub accumulated: f64,
    pub diverging: bool,
    /// Increment rate was monotone increasing over the last decade of
    /// T_est - t (only meaningful near a blow-up).
    pub increment_rate_increasing: Option<bool>,
    pub fit: Option<DichotomyFit>,
}

/// Numerical audit of the extension-theorem hypotheses on one trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct ExtensionReport {
    pub stop_reason: StopReason,
    pub t_final: f64,
    pub dimension: usize,
    /// Tightest C with h_ij >= -C witnessed along the run.
    pub witnessed_c: f64,
    pub initial_min_h: f64,
    pub h_positive_preserved: bool,
    pub verdicts: Vec<AlphaVerdict>,
    /// For a blow-up stop: whether every required critical accumulator was
    /// observed to diverge (the contrapositive of the extension criteria);
    /// None when the flow stopped smoothly.
    pub blowup_consistent: Option<bool>,
}

/// Evaluates the extension-criteria hypotheses on the computed interval.
///
/// A trajectory that stops in a curvature blow-up must show the critical
/// (alpha = n + 2) norms diverging: |A| always, |H| whenever the lower
/// curvature bound or initial mean-convexity hypothesis held.
pub fn extension_report(traj: &FlowTrajectory, alphas: &[f64]) -> ExtensionReport {
    let n = traj.dimension as f64;
    let stop_reason = traj.stop_reason;
    let t_final = traj.records.last().map_or(0.0, |r| r.t);
    let near_blowup = matches!(
        stop_reason,
        StopReason::CurvatureBlowup | StopReason::StepUnderflow
    );

    let mut witnessed_c = 0.0f64;
    let mut h_positive = true;
    for rec in &traj.records {
        witnessed_c = witnessed_c.max(-rec.min_kappa);
        if rec.min_h <= 0.0 {
            h_positive = false;
        }
    }
    let initial_min_h = traj.records.first().map_or(f64::NAN, |r| r.min_h);

    let mut verdicts = Vec::new();
    for &(q, a) in traj.accumulator.pairs() {
        if !alphas.iter().any(|&x| (x - a).abs() < 1e-12) {
            continue;
        }
        let accumulated = traj.accumulator.value(q, a).unwrap();
        let fit = if near_blowup { dichotomy_fit(traj, q, a).ok() } else { None };
        let rate_up = if near_blowup {
            increment_rate_increasing(traj, q, a)
        } else {
            None
        };
        let diverging = match fit.map(|f| f.verdict) {
            Some(DichotomyVerdict::LogDivergent)
            | Some(DichotomyVerdict::PowerDivergent { .. }) => true,
            Some(DichotomyVerdict::Finite { .. }) => false,
            None => near_blowup && a >= n + 2.0 && rate_up == Some(true),
        };
        verdicts.push(AlphaVerdict {
            quantity: q,
            alpha: a,
            accumulated,
            diverging,
            increment_rate_increasing: rate_up,
            fit,
        });
    }

    let blowup_consistent = if near_blowup {
        let h_hypotheses_held = h_positive || witnessed_c.is_finite();
        let mut ok = true;
        for v in &verdicts {
            if v.alpha >= n + 2.0 {
                let required = match v.quantity {
                    Quantity::A => true,
                    Quantity::H => h_hypotheses_held,
                };
                if required && !v.diverging {
                    ok = false;
                }
            }
        }
        Some(ok)
    } else {
        None
    };

    ExtensionReport {
        stop_reason,
        t_final,
        dimension: traj.dimension,
        witnessed_c,
        initial_min_h,
        h_positive_preserved: h_positive,
        verdicts,
        blowup_consistent,
    }
}

/// Checks that the spatial integral (the accumulator increment rate) is
/// strictly increasing over the last decade of T_est - t.
fn increment_rate_increasing(traj: &FlowTrajectory, q: Quantity, alpha: f64) -> Option<bool> {
    let idx = traj.accumulator.index_of(q, alpha)?;
    let t_est = estimate_maximal_time(traj).ok()?;
    let t_last = traj.records.last()?.t;
    let rem_last = t_est - t_last;
    if !(rem_last > 0.0) {
        return None;
    }
    let rates: Vec<f64> = traj
        .records
        .iter()
        .filter(|r| t_est - r.t <= 10.0 * rem_last)
        .map(|r| r.spatial[idx])
        .collect();
    if rates.len() < 3 {
        return None;
    }
    Some(rates.windows(2).all(|w| w[1] > w[0]))
}
