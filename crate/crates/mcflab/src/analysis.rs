//! Analytic machinery: parabolic rescaling and its invariants, residual
//! verification of the evolution equations, the Sobolev constant, and the
//! Moser-iteration constant chain with the sup-bound verifier.

use crate::error::{Error, Result};
use crate::flow::{FlowTrajectory, StepRecord, StopReason, TrajectoryFrame};
use crate::geometry::{
    compute_geometry_at, deriv_arclength, laplace_beltrami, position_derivative, unit_ball_volume,
    GeometryFrame, Immersion,
};
use crate::monitors::{NormAccumulator, Quantity};
use serde::Serialize;

/// Parabolic zoom: positions scale by Q^{1/2}, time by t -> Q (t - t_center).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RescaleSpec {
    pub q: f64,
    pub t_center: f64,
}

fn scale_immersion(imm: &Immersion, s: f64) -> Immersion {
    match imm {
        Immersion::PlaneCurve { points } => Immersion::PlaneCurve {
            points: points.iter().map(|p| [s * p[0], s * p[1]]).collect(),
        },
        Immersion::Revolution {
            axis,
            radius,
            dimension,
        } => Immersion::Revolution {
            axis: axis.iter().map(|x| s * x).collect(),
            radius: radius.iter().map(|r| s * r).collect(),
            dimension: *dimension,
        },
        Immersion::AnalyticSphere { radius, dimension } => Immersion::AnalyticSphere {
            radius: s * radius,
            dimension: *dimension,
        },
    }
}

/// Rescale a recorded trajectory: every kept frame is scaled by Q^{1/2},
/// its geometry recomputed from the scaled positions, and the diagnostics
/// re-derived. Under the exact transformation laws g -> Q g, H -> Q^{-1/2} H,
/// |A|^2 -> |A|^2/Q and dmu -> Q^{n/2} dmu; the recomputation realizes them
/// up to rounding, which the invariance checks quantify.
pub fn parabolic_rescale(traj: &FlowTrajectory, spec: &RescaleSpec) -> Result<FlowTrajectory> {
    if !(spec.q > 0.0) {
        return Err(Error::NonPositiveInputs("rescale factor Q"));
    }
    if traj.frames.is_empty() {
        return Err(Error::TrajectoryTooShort("no recorded frames".into()));
    }
    let t_first = traj.frames.first().unwrap().t;
    let t_last = traj.frames.last().unwrap().t;
    if !(spec.t_center >= t_first && spec.t_center <= t_last) {
        return Err(Error::WindowOutOfRange {
            lo: t_first,
            hi: t_last,
        });
    }
    let root_q = spec.q.sqrt();

    let mut frames = Vec::with_capacity(traj.frames.len());
    for tf in &traj.frames {
        let t_new = spec.q * (tf.t - spec.t_center);
        let imm = scale_immersion(&tf.immersion, root_q);
        let frame = compute_geometry_at(&imm, t_new)?;
        frames.push(TrajectoryFrame {
            t: t_new,
            immersion: imm,
            frame,
        });
    }

    let mut acc = NormAccumulator::new(traj.monitor.pairs.clone())?;
    let mut records = Vec::with_capacity(frames.len());
    let mut area_monotone = true;
    let mut prev_area = f64::INFINITY;
    for (k, tf) in frames.iter().enumerate() {
        let dt = if k + 1 < frames.len() {
            frames[k + 1].t - tf.t
        } else {
            0.0
        };
        acc.refresh_spatial(&tf.frame);
        let area = tf.frame.area();
        if area >= prev_area - 1e-12 * prev_area.abs() {
            area_monotone = k == 0;
        }
        prev_area = area;
        records.push(StepRecord {
            step: k,
            t: tf.t,
            dt,
            max_a2: tf.frame.max_a2(),
            max_h2: tf.frame.max_h2(),
            min_kappa: tf.frame.min_kappa(),
            min_h: tf.frame.min_h(),
            area,
            pinching: tf.frame.max_pinching(),
            redistributed: false,
            acc: acc.running().to_vec(),
            spatial: acc.spatial().to_vec(),
        });
        acc.add_time_slab(dt);
    }

    Ok(FlowTrajectory {
        dimension: traj.dimension,
        initial: scale_immersion(&traj.initial, root_q),
        records,
        frames,
        stop_reason: traj.stop_reason,
        accumulator: acc,
        monitor: traj.monitor.clone(),
        area_monotone,
        redistributed: traj.redistributed,
    })
}

/// Result of an invariance or scaling-law check.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct InvarianceCheck {
    pub original: f64,
    pub rescaled: f64,
    /// Q^{(n+2-alpha)/2} for space-time integrals, Q^{(n-alpha)/2} for
    /// spatial snapshots; unity at the invariant exponents.
    pub expected_ratio: f64,
    /// |rescaled - expected_ratio * original| / (expected_ratio * original).
    pub deviation: f64,
}

fn frame_index_window(traj: &FlowTrajectory, window: (f64, f64)) -> Result<(usize, usize)> {
    let (t1, t2) = window;
    let t_first = traj.frames.first().map(|f| f.t).unwrap_or(f64::NAN);
    let t_last = traj.frames.last().map(|f| f.t).unwrap_or(f64::NAN);
    let eps = 1e-12 * (t_last - t_first).abs().max(1e-30);
    if !(t1 < t2) || t1 < t_first - eps || t2 > t_last + eps {
        return Err(Error::WindowOutOfRange { lo: t_first, hi: t_last });
    }
    let i0 = traj.frames.iter().position(|f| f.t >= t1 - eps).unwrap();
    let i1 = traj.frames.iter().rposition(|f| f.t <= t2 + eps).unwrap();
    if i1 <= i0 {
        return Err(Error::WindowOutOfRange { lo: t_first, hi: t_last });
    }
    Ok((i0, i1))
}

fn spacetime_integral_over(traj: &FlowTrajectory, q: Quantity, alpha: f64, i0: usize, i1: usize) -> f64 {
    let mut sum = 0.0;
    for k in i0..i1 {
        let dt = traj.frames[k + 1].t - traj.frames[k].t;
        sum += traj.frames[k].frame.integral_abs_pow(q, alpha) * dt;
    }
    sum
}

/// Compare the space-time integral of |q|^alpha over a window against the
/// same integral on the rescaled trajectory. Invariant at alpha = n + 2;
/// every other exponent scales by Q^{(n+2-alpha)/2}.
pub fn spacetime_norm_invariance_check(
    traj: &FlowTrajectory,
    spec: &RescaleSpec,
    quantity: Quantity,
    alpha: f64,
    window: (f64, f64),
) -> Result<InvarianceCheck> {
    let (i0, i1) = frame_index_window(traj, window)?;
    let rescaled = parabolic_rescale(traj, spec)?;
    let original = spacetime_integral_over(traj, quantity, alpha, i0, i1);
    let mapped = spacetime_integral_over(&rescaled, quantity, alpha, i0, i1);
    let n = traj.dimension as f64;
    let expected_ratio = spec.q.powf((n + 2.0 - alpha) / 2.0);
    let denom = expected_ratio * original;
    Ok(InvarianceCheck {
        original,
        rescaled: mapped,
        expected_ratio,
        deviation: ((mapped - denom) / denom).abs(),
    })
}

/// Compare the spatial snapshot integral of |q|^alpha at one time against its
/// image under rescaling. Invariant at alpha = n; otherwise scales by
/// Q^{(n-alpha)/2}.
pub fn spatial_norm_invariance_check(
    traj: &FlowTrajectory,
    spec: &RescaleSpec,
    quantity: Quantity,
    alpha: f64,
    t_probe: f64,
) -> Result<InvarianceCheck> {
    if traj.frames.is_empty() {
        return Err(Error::TrajectoryTooShort("no recorded frames".into()));
    }
    let t_first = traj.frames.first().unwrap().t;
    let t_last = traj.frames.last().unwrap().t;
    if !(t_probe >= t_first && t_probe <= t_last) {
        return Err(Error::WindowOutOfRange { lo: t_first, hi: t_last });
    }
    let k = traj
        .frames
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            (a.t - t_probe).abs().partial_cmp(&(b.t - t_probe).abs()).unwrap()
        })
        .map(|(k, _)| k)
        .unwrap();
    let rescaled = parabolic_rescale(traj, spec)?;
    let original = traj.frames[k].frame.integral_abs_pow(quantity, alpha);
    let mapped = rescaled.frames[k].frame.integral_abs_pow(quantity, alpha);
    let n = traj.dimension as f64;
    let expected_ratio = spec.q.powf((n - alpha) / 2.0);
    let denom = expected_ratio * original;
    Ok(InvarianceCheck {
        original,
        rescaled: mapped,
        expected_ratio,
        deviation: ((mapped - denom) / denom).abs(),
    })
}

/// Which evolution equation to verify by finite differences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvolutionEquation {
    /// d/dt g_ij = -2 H h_ij
    Metric,
    /// d/dt nu = grad H
    Normal,
    /// d/dt h_ij = Lap h_ij - 2 H h_il g^{lm} h_mj + |A|^2 h_ij
    SecondFundamentalForm,
    /// d/dt H = Lap H + |A|^2 H
    MeanCurvature,
    /// d/dt |A|^2 = Lap |A|^2 - 2 |grad A|^2 + 2 |A|^4
    CurvatureNormSquared,
}

fn frame_triplet<'t>(
    traj: &'t FlowTrajectory,
    k: usize,
) -> Result<(&'t TrajectoryFrame, &'t TrajectoryFrame, &'t TrajectoryFrame)> {
    if traj.redistributed {
        return Err(Error::RedistributionActive);
    }
    if k == 0 || k + 1 >= traj.frames.len() {
        return Err(Error::IndexOutOfRange {
            index: k,
            len: traj.frames.len(),
        });
    }
    Ok((&traj.frames[k - 1], &traj.frames[k], &traj.frames[k + 1]))
}

/// Second-order time derivative on a nonuniform three-point stencil.
fn time_derivative(f0: &[f64], f1: &[f64], f2: &[f64], dt0: f64, dt1: f64) -> Vec<f64> {
    let denom = dt0 + dt1;
    f0.iter()
        .zip(f1)
        .zip(f2)
        .map(|((a, b), c)| (dt0 * (c - b) / dt1 + dt1 * (b - a) / dt0) / denom)
        .collect()
}

fn channel_field(frame: &GeometryFrame, ch: usize) -> Vec<f64> {
    frame.kappa.iter().map(|k| k[ch]).collect()
}

fn metric_channel(frame: &GeometryFrame, ch: usize) -> Vec<f64> {
    frame.metric.iter().map(|g| g[ch]).collect()
}

/// Finite-difference residual of one evolution equation at recorded step k.
///
/// The time derivative is the centered nonuniform stencil over frames
/// k-1, k, k+1; the right-hand side is built from frame k alone. Tensor
/// equations are evaluated channelwise in the principal frame, which is exact
/// for curves and umbilic profiles.
pub fn evolution_residual(
    traj: &FlowTrajectory,
    k: usize,
    equation: EvolutionEquation,
) -> Result<Vec<f64>> {
    let (tf0, tf1, tf2) = frame_triplet(traj, k)?;
    let (f0, f1, f2) = (&tf0.frame, &tf1.frame, &tf2.frame);
    let dt0 = tf1.t - tf0.t;
    let dt1 = tf2.t - tf1.t;
    let m = f1.samples();
    if f0.samples() != m || f2.samples() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            got: f0.samples().min(f2.samples()),
        });
    }

    match equation {
        EvolutionEquation::Metric => {
            let mut out = vec![0.0f64; m];
            for ch in 0..2 {
                if ch == 1 && f1.kappa_multiplicity[1] == 0 {
                    continue;
                }
                let lhs = time_derivative(
                    &metric_channel(f0, ch),
                    &metric_channel(f1, ch),
                    &metric_channel(f2, ch),
                    dt0,
                    dt1,
                );
                for j in 0..m {
                    let h_ch = f1.kappa[j][ch] * f1.metric[j][ch];
                    let rhs = -2.0 * f1.mean[j] * h_ch;
                    out[j] = out[j].max((lhs[j] - rhs).abs());
                }
            }
            Ok(out)
        }
        EvolutionEquation::Normal => {
            let nx = |f: &GeometryFrame| f.normal.iter().map(|n| n[0]).collect::<Vec<_>>();
            let ny = |f: &GeometryFrame| f.normal.iter().map(|n| n[1]).collect::<Vec<_>>();
            let dx = time_derivative(&nx(f0), &nx(f1), &nx(f2), dt0, dt1);
            let dy = time_derivative(&ny(f0), &ny(f1), &ny(f2), dt0, dt1);
            let h_s = deriv_arclength(f1, &f1.mean)?;
            let rhs: Vec<[f64; 2]> = match &tf1.immersion {
                Immersion::AnalyticSphere { .. } => vec![[0.0, 0.0]; m],
                imm => {
                    let gamma_u = position_derivative(imm)?;
                    gamma_u
                        .iter()
                        .zip(&h_s)
                        .map(|(gu, hs)| {
                            let norm = gu[0].hypot(gu[1]);
                            [hs * gu[0] / norm, hs * gu[1] / norm]
                        })
                        .collect()
                }
            };
            Ok((0..m)
                .map(|j| (dx[j] - rhs[j][0]).hypot(dy[j] - rhs[j][1]))
                .collect())
        }
        EvolutionEquation::SecondFundamentalForm => {
            let mut out = vec![0.0f64; m];
            for ch in 0..2 {
                if ch == 1 && f1.kappa_multiplicity[1] == 0 {
                    continue;
                }
                let h_of = |f: &GeometryFrame| -> Vec<f64> {
                    f.kappa
                        .iter()
                        .zip(&f.metric)
                        .map(|(k, g)| k[ch] * g[ch])
                        .collect()
                };
                let lhs = time_derivative(&h_of(f0), &h_of(f1), &h_of(f2), dt0, dt1);
                let lap_kappa = laplace_beltrami(f1, &channel_field(f1, ch))?;
                for j in 0..m {
                    let g_ch = f1.metric[j][ch];
                    let kappa_ch = f1.kappa[j][ch];
                    let h_ch = kappa_ch * g_ch;
                    // Lap h = g Lap kappa since the metric is parallel
                    let rhs = g_ch * lap_kappa[j] - 2.0 * f1.mean[j] * kappa_ch * h_ch
                        + f1.a2[j] * h_ch;
                    out[j] = out[j].max((lhs[j] - rhs).abs());
                }
            }
            Ok(out)
        }
        EvolutionEquation::MeanCurvature => {
            let lhs = time_derivative(&f0.mean, &f1.mean, &f2.mean, dt0, dt1);
            let lap = laplace_beltrami(f1, &f1.mean)?;
            Ok((0..m)
                .map(|j| (lhs[j] - (lap[j] + f1.a2[j] * f1.mean[j])).abs())
                .collect())
        }
        EvolutionEquation::CurvatureNormSquared => {
            let lhs = time_derivative(&f0.a2, &f1.a2, &f2.a2, dt0, dt1);
            let lap = laplace_beltrami(f1, &f1.a2)?;
            let grad_a2 = grad_a_squared(f1)?;
            Ok((0..m)
                .map(|j| {
                    let rhs = lap[j] - 2.0 * grad_a2[j] + 2.0 * f1.a2[j] * f1.a2[j];
                    (lhs[j] - rhs).abs()
                })
                .collect())
        }
    }
}

/// |grad A|^2 realized as the arclength first-derivative energy of the
/// principal curvature channels (exact for curves; on revolutions the
/// channels are the diagonal of h in the principal frame).
fn grad_a_squared(frame: &GeometryFrame) -> Result<Vec<f64>> {
    let m = frame.samples();
    let mut out = vec![0.0; m];
    for ch in 0..2 {
        let mult = frame.kappa_multiplicity[ch];
        if mult == 0 {
            continue;
        }
        let ds = deriv_arclength(frame, &channel_field(frame, ch))?;
        for j in 0..m {
            out[j] += mult as f64 * ds[j] * ds[j];
        }
    }
    Ok(out)
}

/// Residual of the pinching-ratio evolution equation plus the sign witness
/// of its dissipative gradient term.
#[derive(Debug, Clone)]
pub struct PinchingResidual {
    pub residual: Vec<f64>,
    /// The final term of the equation, -(2/H^4)|H grad h - grad H h|^2;
    /// non-positive at every sample by construction.
    pub gradient_term: Vec<f64>,
}

/// Finite-difference check of the evolution of w = |A|^2 / H^2:
/// dw/dt = Lap w + (2/H) <grad H, grad w> - (2/H^4) |H grad h - grad H h|^2.
pub fn pinching_evolution_residual(traj: &FlowTrajectory, k: usize) -> Result<PinchingResidual> {
    let (tf0, tf1, tf2) = frame_triplet(traj, k)?;
    let (f0, f1, f2) = (&tf0.frame, &tf1.frame, &tf2.frame);
    if f0.min_h() <= 0.0 || f1.min_h() <= 0.0 || f2.min_h() <= 0.0 {
        return Err(Error::NonPositiveH);
    }
    let dt0 = tf1.t - tf0.t;
    let dt1 = tf2.t - tf1.t;
    let m = f1.samples();
    let w_of = |f: &GeometryFrame| -> Vec<f64> {
        f.a2.iter().zip(&f.mean).map(|(a, h)| a / (h * h)).collect()
    };
    let w0 = w_of(f0);
    let w1 = w_of(f1);
    let w2 = w_of(f2);
    let lhs = time_derivative(&w0, &w1, &w2, dt0, dt1);
    let lap_w = laplace_beltrami(f1, &w1)?;
    let h_s = deriv_arclength(f1, &f1.mean)?;
    let w_s = deriv_arclength(f1, &w1)?;

    let mut gradient_term = vec![0.0; m];
    for ch in 0..2 {
        let mult = f1.kappa_multiplicity[ch];
        if mult == 0 {
            continue;
        }
        let kappa_s = deriv_arclength(f1, &channel_field(f1, ch))?;
        for j in 0..m {
            let e = f1.mean[j] * kappa_s[j] - h_s[j] * f1.kappa[j][ch];
            gradient_term[j] += mult as f64 * e * e;
        }
    }
    let mut residual = vec![0.0; m];
    for j in 0..m {
        let h = f1.mean[j];
        gradient_term[j] = -2.0 / (h * h * h * h) * gradient_term[j];
        let rhs = lap_w[j] + 2.0 / h * h_s[j] * w_s[j] + gradient_term[j];
        residual[j] = (lhs[j] - rhs).abs();
    }
    Ok(PinchingResidual {
        residual,
        gradient_term,
    })
}

/// Sobolev constant C(n) = 2^n (1+n)^{1+1/n} / ((n-1) sigma_n), where sigma_n
/// is the volume of the unit ball in R^{n+1}. Defined for n >= 3.
pub fn sobolev_constant(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::DimensionTooSmall(n));
    }
    let nf = n as f64;
    Ok(2.0f64.powi(n as i32) * (1.0 + nf).powf(1.0 + 1.0 / nf)
        / ((nf - 1.0) * unit_ball_volume(n + 1)))
}

/// The explicit constant chain of the parabolic Moser iteration.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MoserConstants {
    pub n: usize,
    pub t0: f64,
    pub sup_a: f64,
    /// Reaction coefficient beta = 2 sup|A|^2 bounding d/dt H^2 <= Lap H^2 + beta H^2.
    pub beta: f64,
    pub sobolev: f64,
    /// First exponent of the iteration, p0 = (n+2)/2.
    pub p0: f64,
    /// Interpolation weight evaluated at p0.
    pub s: f64,
    /// Iteration constant evaluated at p0 (conservative: D(p) decreases in p).
    pub d: f64,
    /// Exponent ratio mu = 1 + 2/n.
    pub mu: f64,
    pub t: f64,
    /// Final sup bound constant C2(t).
    pub c2: f64,
}

/// Evaluate the constant chain at time t in (0, T0].
pub fn moser_constants(n: usize, t0: f64, sup_a: f64, t: f64) -> Result<MoserConstants> {
    if n < 3 {
        return Err(Error::DimensionTooSmall(n));
    }
    if !(t0 > 0.0) {
        return Err(Error::NonPositiveInputs("T0"));
    }
    if !(sup_a > 0.0) {
        return Err(Error::NonPositiveInputs("sup |A|"));
    }
    if !(t > 0.0 && t <= t0) {
        return Err(Error::NonPositiveInputs("t must lie in (0, T0]"));
    }
    let nf = n as f64;
    let beta = 2.0 * sup_a * sup_a;
    let c_n = sobolev_constant(n)?;
    let p0 = (nf + 2.0) / 2.0;
    let s = ((2.0 / nf) * (p0 - 1.0) * t0 * beta).sqrt() * (nf - 2.0) / (nf * (p0 - 1.0)).sqrt();
    let d = ((nf - 1.0) * p0).sqrt() * c_n / ((nf - 2.0) * (p0 - 1.0).sqrt());
    let mu = 1.0 + 2.0 / nf;
    let c2 = d.powf(2.0 * nf / (nf + 2.0))
        * mu.powf(nf / 2.0)
        * ((nf + 2.0) * beta / 2.0 + (nf + 2.0) / (2.0 * t));
    Ok(MoserConstants {
        n,
        t0,
        sup_a,
        beta,
        sobolev: c_n,
        p0,
        s,
        d,
        mu,
        t,
        c2,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MoserBoundReport {
    /// max of H^2 over M x [T0/2, T0].
    pub lhs: f64,
    /// C2(T0/2) * (integral of |H|^{n+2} dmu dt over [0, T0])^{2/(n+2)}.
    pub rhs: f64,
    /// rhs - lhs; negative would falsify the sup bound.
    pub margin: f64,
    pub sup_a: f64,
    pub t0: f64,
    pub c2: f64,
    pub accumulated_h_norm: f64,
}

/// Check the parabolic sup bound max H^2 <= C2 (integral |H|^{n+2})^{2/(n+2)}
/// on a smooth trajectory over [0, T0], with T0 the recorded final time.
pub fn verify_moser_bound(traj: &FlowTrajectory) -> Result<MoserBoundReport> {
    let n = traj.dimension;
    if n < 3 {
        return Err(Error::DimensionTooSmall(n));
    }
    if traj.stop_reason != StopReason::ReachedTCap {
        return Err(Error::TrajectoryTooShort(format!(
            "trajectory must cover [0, T0] smoothly; stopped with {:?}",
            traj.stop_reason
        )));
    }
    let t0 = traj.final_time();
    if !(t0 > 0.0) {
        return Err(Error::TrajectoryTooShort("empty trajectory".into()));
    }
    let alpha = (n + 2) as f64;
    let accumulated = traj
        .accumulator
        .value(Quantity::H, alpha)
        .ok_or(Error::MissingAccumulator {
            quantity: "H",
            alpha,
        })?;
    let sup_a = traj
        .records
        .iter()
        .map(|r| r.max_a2)
        .fold(0.0f64, f64::max)
        .sqrt();
    let lhs = traj
        .records
        .iter()
        .filter(|r| r.t >= t0 / 2.0 - 1e-14 * t0)
        .map(|r| r.max_h2)
        .fold(0.0f64, f64::max);
    let constants = moser_constants(n, t0, sup_a, t0 / 2.0)?;
    let rhs = constants.c2 * accumulated.powf(2.0 / (n as f64 + 2.0));
    Ok(MoserBoundReport {
        lhs,
        rhs,
        margin: rhs - lhs,
        sup_a,
        t0,
        c2: constants.c2,
        accumulated_h_norm: accumulated,
    })
}
