//! Explicit mean curvature flow stepper with adaptive parabolic time steps.
//!
//! Every sample moves by -dt * H * nu; the analytic sphere is advanced by the
//! exact closed-form radius law so the same engine doubles as a
//! machine-precision oracle. A run records curvature extrema, area and the
//! registered space-time norms at every accepted step, and stops at the time
//! cap, on curvature blow-up, on step underflow, or when the mesh degenerates.

use crate::error::{Error, Result};
use crate::geometry::{compute_geometry_at, GeometryFrame, Immersion, Vec2};
use crate::monitors::{MonitorConfig, NormAccumulator};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowConfig {
    /// Maximum simulated time.
    pub t_cap: f64,
    /// Parabolic safety factor in (0, 1].
    pub c_stab: f64,
    /// Steps below this signal the approach to the maximal time.
    pub dt_floor: f64,
    /// Stop once max |A|^2 exceeds this.
    pub blowup_threshold: f64,
    /// Sample count used when the CLI builds the initial shape; echoed here.
    pub resolution: usize,
    /// Keep full geometry frames every this many steps.
    pub record_stride: usize,
    /// Tangential re-equidistribution pass after each step (off by default;
    /// the evolution-equation residual checks need the pure normal flow).
    pub redistribute: bool,
}

impl FlowConfig {
    pub fn new(t_cap: f64) -> Self {
        FlowConfig {
            t_cap,
            c_stab: 0.2,
            dt_floor: 1e-12,
            blowup_threshold: 1e8,
            resolution: 0,
            record_stride: 1,
            redistribute: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_cap > 0.0) {
            return Err(Error::BadConfig("t_cap must be positive".into()));
        }
        if !(self.c_stab > 0.0 && self.c_stab <= 1.0) {
            return Err(Error::BadConfig("c_stab must lie in (0, 1]".into()));
        }
        if !(self.dt_floor > 0.0) {
            return Err(Error::BadConfig("dt_floor must be positive".into()));
        }
        if !(self.blowup_threshold > 1.0) {
            return Err(Error::BadConfig("blowup_threshold must exceed 1".into()));
        }
        if self.record_stride == 0 {
            return Err(Error::BadConfig("record_stride must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    ReachedTCap,
    CurvatureBlowup,
    StepUnderflow,
    GeometryDegenerate,
}

/// Scalar diagnostics captured at every accepted step.
#[derive(Debug, Clone, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub t: f64,
    /// Step taken from this state (zero on the terminal record).
    pub dt: f64,
    pub max_a2: f64,
    pub max_h2: f64,
    pub min_kappa: f64,
    pub min_h: f64,
    pub area: f64,
    /// max |A|^2/H^2 while min H > 0.
    pub pinching: Option<f64>,
    pub redistributed: bool,
    /// Running space-time integrals per registered pair, up to time `t`.
    pub acc: Vec<f64>,
    /// Instantaneous spatial integrals of |q|^alpha per registered pair.
    pub spatial: Vec<f64>,
}

/// Full geometry snapshot kept every `record_stride` steps.
#[derive(Debug, Clone)]
pub struct TrajectoryFrame {
    pub t: f64,
    pub immersion: Immersion,
    pub frame: GeometryFrame,
}

#[derive(Debug, Clone)]
pub struct FlowTrajectory {
    pub dimension: usize,
    pub initial: Immersion,
    pub records: Vec<StepRecord>,
    pub frames: Vec<TrajectoryFrame>,
    pub stop_reason: StopReason,
    pub accumulator: NormAccumulator,
    pub monitor: MonitorConfig,
    /// Strict area decrease held at every accepted step (1e-12 slack).
    pub area_monotone: bool,
    /// Whether any step applied tangential redistribution.
    pub redistributed: bool,
}

impl FlowTrajectory {
    pub fn final_time(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.t)
    }

    pub fn final_immersion(&self) -> &Immersion {
        &self.frames.last().expect("trajectory has frames").immersion
    }
}

/// Parabolic step limit: dt = c_stab * min(h_min^2 / 2, 1 / (2 max |A|^2)).
pub fn adaptive_dt(frame: &GeometryFrame, cfg: &FlowConfig) -> f64 {
    let h_min = frame.min_mesh_width();
    let mesh_limit = if h_min.is_finite() {
        h_min * h_min / 2.0
    } else {
        f64::INFINITY
    };
    let curvature_limit = 1.0 / (2.0 * frame.max_a2().max(f64::MIN_POSITIVE));
    cfg.c_stab * mesh_limit.min(curvature_limit)
}

/// Advance the immersion by one explicit Euler step of -H nu.
///
/// The analytic sphere uses the exact update r <- sqrt(r^2 - 2 n dt), the
/// closed-form integral of dr/dt = -n/r.
pub fn step(imm: &Immersion, frame: &GeometryFrame, dt: f64) -> Result<Immersion> {
    if !(dt > 0.0) {
        return Err(Error::NonPositiveInputs("dt"));
    }
    match imm {
        Immersion::PlaneCurve { points } => {
            let moved: Vec<Vec2> = points
                .iter()
                .zip(frame.mean.iter().zip(&frame.normal))
                .map(|(p, (h, nu))| [p[0] - dt * h * nu[0], p[1] - dt * h * nu[1]])
                .collect();
            Ok(Immersion::PlaneCurve { points: moved })
        }
        Immersion::Revolution {
            axis,
            radius,
            dimension,
        } => {
            let m = axis.len();
            let mut new_axis = Vec::with_capacity(m);
            let mut new_radius = Vec::with_capacity(m);
            for j in 0..m {
                let h = frame.mean[j];
                let nu = frame.normal[j];
                new_axis.push(axis[j] - dt * h * nu[0]);
                new_radius.push(radius[j] - dt * h * nu[1]);
            }
            // poles ride the axis: their normals are axial by symmetry
            new_radius[0] = 0.0;
            new_radius[m - 1] = 0.0;
            Ok(Immersion::Revolution {
                axis: new_axis,
                radius: new_radius,
                dimension: *dimension,
            })
        }
        Immersion::AnalyticSphere { radius, dimension } => {
            let r2 = radius * radius - 2.0 * *dimension as f64 * dt;
            if r2 <= 0.0 {
                return Err(Error::DegenerateGeometry(format!(
                    "sphere vanished: r^2 would become {r2}"
                )));
            }
            Ok(Immersion::AnalyticSphere {
                radius: r2.sqrt(),
                dimension: *dimension,
            })
        }
    }
}

/// Resample a closed polygon to uniform arclength. New points lie on the old
/// polygonal image, so the pass is purely tangential up to interpolation.
pub fn redistribute_curve(points: &[Vec2]) -> Vec<Vec2> {
    let m = points.len();
    let mut cum = Vec::with_capacity(m + 1);
    cum.push(0.0);
    for j in 0..m {
        let next = points[(j + 1) % m];
        let d = (next[0] - points[j][0]).hypot(next[1] - points[j][1]);
        cum.push(cum[j] + d);
    }
    let total = cum[m];
    let mut out = Vec::with_capacity(m);
    let mut seg = 0usize;
    for k in 0..m {
        let target = total * k as f64 / m as f64;
        while seg + 1 < m && cum[seg + 1] < target {
            seg += 1;
        }
        let span = cum[seg + 1] - cum[seg];
        let w = if span > 0.0 { (target - cum[seg]) / span } else { 0.0 };
        let a = points[seg];
        let b = points[(seg + 1) % m];
        out.push([a[0] + w * (b[0] - a[0]), a[1] + w * (b[1] - a[1])]);
    }
    out
}

/// Resample a meridian to uniform arclength with both poles pinned.
pub fn redistribute_meridian(axis: &[f64], radius: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = axis.len();
    let mut cum = Vec::with_capacity(m);
    cum.push(0.0);
    for j in 0..m - 1 {
        let d = (axis[j + 1] - axis[j]).hypot(radius[j + 1] - radius[j]);
        cum.push(cum[j] + d);
    }
    let total = cum[m - 1];
    let mut out_axis = Vec::with_capacity(m);
    let mut out_radius = Vec::with_capacity(m);
    let mut seg = 0usize;
    for k in 0..m {
        let target = total * k as f64 / (m - 1) as f64;
        while seg + 2 < m && cum[seg + 1] < target {
            seg += 1;
        }
        let span = cum[seg + 1] - cum[seg];
        let w = if span > 0.0 { (target - cum[seg]) / span } else { 0.0 };
        out_axis.push(axis[seg] + w * (axis[seg + 1] - axis[seg]));
        out_radius.push(radius[seg] + w * (radius[seg + 1] - radius[seg]));
    }
    out_axis[0] = axis[0];
    out_radius[0] = 0.0;
    out_axis[m - 1] = axis[m - 1];
    out_radius[m - 1] = 0.0;
    (out_axis, out_radius)
}

fn apply_redistribution(imm: Immersion) -> Immersion {
    match imm {
        Immersion::PlaneCurve { points } => Immersion::PlaneCurve {
            points: redistribute_curve(&points),
        },
        Immersion::Revolution {
            axis,
            radius,
            dimension,
        } => {
            let (axis, radius) = redistribute_meridian(&axis, &radius);
            Immersion::Revolution {
                axis,
                radius,
                dimension,
            }
        }
        sphere => sphere,
    }
}

/// Run the flow until a stop condition, recording diagnostics at every step.
///
/// Deterministic: identical inputs produce identical record streams.
pub fn run_flow(
    imm0: &Immersion,
    cfg: &FlowConfig,
    monitors: &MonitorConfig,
) -> Result<FlowTrajectory> {
    cfg.validate()?;
    let mut acc = NormAccumulator::new(monitors.pairs.clone())?;
    let mut records: Vec<StepRecord> = Vec::new();
    let mut frames: Vec<TrajectoryFrame> = Vec::new();

    let mut imm = imm0.clone();
    let mut t = 0.0f64;
    let mut step_idx = 0usize;
    let mut prev_area = f64::INFINITY;
    let mut area_monotone = true;
    let mut any_redistributed = false;
    let t_eps = (cfg.t_cap * 1e-14).max(f64::MIN_POSITIVE);

    let stop_reason = loop {
        let frame = match compute_geometry_at(&imm, t) {
            Ok(f) => f,
            Err(_) => break StopReason::GeometryDegenerate,
        };
        acc.refresh_spatial(&frame);
        let area = frame.area();
        if area >= prev_area - 1e-12 * prev_area.abs() {
            area_monotone = false;
        }
        prev_area = area;

        let mut record = StepRecord {
            step: step_idx,
            t,
            dt: 0.0,
            max_a2: frame.max_a2(),
            max_h2: frame.max_h2(),
            min_kappa: frame.min_kappa(),
            min_h: frame.min_h(),
            area,
            pinching: frame.max_pinching(),
            redistributed: false,
            acc: acc.running().to_vec(),
            spatial: acc.spatial().to_vec(),
        };

        let keep_frame = step_idx % cfg.record_stride == 0;
        let mut push_frame = |t: f64, imm: &Immersion, frame: &GeometryFrame| {
            frames.push(TrajectoryFrame {
                t,
                immersion: imm.clone(),
                frame: frame.clone(),
            });
        };

        if record.max_a2 > cfg.blowup_threshold {
            records.push(record);
            push_frame(t, &imm, &frame);
            break StopReason::CurvatureBlowup;
        }
        if cfg.t_cap - t <= t_eps {
            records.push(record);
            push_frame(t, &imm, &frame);
            break StopReason::ReachedTCap;
        }
        let dt = adaptive_dt(&frame, cfg).min(cfg.t_cap - t);
        if dt < cfg.dt_floor {
            records.push(record);
            push_frame(t, &imm, &frame);
            break StopReason::StepUnderflow;
        }

        record.dt = dt;
        record.redistributed = cfg.redistribute;
        records.push(record);
        if keep_frame {
            push_frame(t, &imm, &frame);
        }

        acc.add_time_slab(dt);
        imm = match step(&imm, &frame, dt) {
            Ok(next) => next,
            Err(_) => break StopReason::GeometryDegenerate,
        };
        if cfg.redistribute {
            imm = apply_redistribution(imm);
            any_redistributed = true;
        }
        t += dt;
        step_idx += 1;
    };

    Ok(FlowTrajectory {
        dimension: imm0.dimension(),
        initial: imm0.clone(),
        records,
        frames,
        stop_reason,
        accumulator: acc,
        monitor: monitors.clone(),
        area_monotone,
        redistributed: any_redistributed,
    })
}
