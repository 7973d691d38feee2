//! Named verification suites: evolution residuals, rescaling invariance,
//! the Moser sup bound, and the norm dichotomy.

use mcflab::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub threshold: f64,
}

impl CheckResult {
    fn le(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        CheckResult {
            name: name.into(),
            pass: measured <= threshold,
            measured,
            threshold,
        }
    }

    fn ge(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        CheckResult {
            name: name.into(),
            pass: measured >= threshold,
            measured,
            threshold,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub all_pass: bool,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    fn new(suite: &str, checks: Vec<CheckResult>) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            all_pass: checks.iter().all(|c| c.pass),
            checks,
        }
    }
}

fn short_run(imm: &Immersion, t_cap: f64) -> Result<FlowTrajectory> {
    let mut cfg = FlowConfig::new(t_cap);
    cfg.record_stride = 1;
    run_flow(imm, &cfg, &MonitorConfig::default())
}

fn max_residual(traj: &FlowTrajectory, eq: EvolutionEquation) -> Result<f64> {
    let k = traj.frames.len() / 2;
    Ok(evolution_residual(traj, k, eq)?
        .into_iter()
        .fold(0.0f64, f64::max))
}

#[derive(Debug, Deserialize)]
pub struct EvolutionSuiteConfig {
    #[serde(default = "default_m_pair")]
    pub m_values: [usize; 2],
    #[serde(default = "default_t_star")]
    pub t_star: f64,
}

fn default_m_pair() -> [usize; 2] {
    [256, 512]
}
fn default_t_star() -> f64 {
    3e-3
}

pub fn evolution_suite(cfg: &EvolutionSuiteConfig) -> Result<SuiteReport> {
    let equations = [
        ("metric", EvolutionEquation::Metric),
        ("normal", EvolutionEquation::Normal),
        ("h", EvolutionEquation::SecondFundamentalForm),
        ("H", EvolutionEquation::MeanCurvature),
        ("A2", EvolutionEquation::CurvatureNormSquared),
    ];
    let run_ellipse = |m: usize| -> Result<FlowTrajectory> {
        let imm = make_initial(&InitialShape::Ellipse { a: 2.0, b: 1.0, m })?;
        short_run(&imm, cfg.t_star)
    };
    let coarse = run_ellipse(cfg.m_values[0])?;
    let fine = run_ellipse(cfg.m_values[1])?;
    let mut checks = Vec::new();
    for (name, eq) in equations {
        let rc = max_residual(&coarse, eq)?;
        let rf = max_residual(&fine, eq)?;
        let order = (rc / rf).log2();
        checks.push(CheckResult::ge(
            format!("ellipse {name}-equation refinement order"),
            order,
            1.5,
        ));
    }
    let imm = make_initial(&InitialShape::Circle {
        r0: 1.0,
        m: cfg.m_values[1],
    })?;
    let circle = short_run(&imm, 2.5e-4)?;
    checks.push(CheckResult::le(
        "circle H-equation residual",
        max_residual(&circle, EvolutionEquation::MeanCurvature)?,
        1e-3,
    ));
    Ok(SuiteReport::new("evolution", checks))
}

#[derive(Debug, Deserialize)]
pub struct InvarianceSuiteConfig {
    #[serde(default = "default_n2")]
    pub n: usize,
    #[serde(default = "default_qs")]
    pub q_values: Vec<f64>,
    #[serde(default = "default_true")]
    pub include_numeric: bool,
}

fn default_n2() -> usize {
    2
}
fn default_qs() -> Vec<f64> {
    vec![0.5, 4.0, 100.0]
}
fn default_true() -> bool {
    true
}

pub fn invariance_suite(cfg: &InvarianceSuiteConfig) -> Result<SuiteReport> {
    let n = cfg.n;
    let nf = n as f64;
    let sol = SphereSolution::new(n, 1.0)?;
    let mut run_cfg = FlowConfig::new(0.4 * sol.maximal_time());
    run_cfg.record_stride = 1;
    let traj = run_flow(
        &Immersion::analytic_sphere(1.0, n)?,
        &run_cfg,
        &MonitorConfig::default(),
    )?;
    let window = (0.0, traj.final_time());
    let probe = 0.5 * traj.final_time();

    let mut checks = Vec::new();
    for &q in &cfg.q_values {
        let spec = RescaleSpec { q, t_center: 0.0 };
        let st = spacetime_norm_invariance_check(&traj, &spec, Quantity::A, nf + 2.0, window)?;
        checks.push(CheckResult::le(
            format!("sphere spacetime |A|^(n+2) invariance, Q={q}"),
            st.deviation,
            1e-10,
        ));
        let sp = spatial_norm_invariance_check(&traj, &spec, Quantity::A, nf, probe)?;
        checks.push(CheckResult::le(
            format!("sphere spatial |A|^n invariance, Q={q}"),
            sp.deviation,
            1e-10,
        ));
        let scal = spatial_norm_invariance_check(&traj, &spec, Quantity::A, nf + 1.0, probe)?;
        checks.push(CheckResult::le(
            format!("sphere spatial |A|^(n+1) scaling law, Q={q}"),
            scal.deviation,
            1e-10,
        ));
    }

    if cfg.include_numeric {
        let imm = make_initial(&InitialShape::Circle { r0: 1.0, m: 512 })?;
        let mut c = FlowConfig::new(0.05);
        c.record_stride = 64;
        let numeric = run_flow(&imm, &c, &MonitorConfig::default())?;
        let window = (0.0, numeric.final_time());
        for &q in &cfg.q_values {
            let spec = RescaleSpec { q, t_center: 0.0 };
            let st = spacetime_norm_invariance_check(&numeric, &spec, Quantity::A, 3.0, window)?;
            checks.push(CheckResult::le(
                format!("numeric circle spacetime |A|^3 invariance, Q={q}"),
                st.deviation,
                1e-3,
            ));
        }
    }
    Ok(SuiteReport::new("invariance", checks))
}

#[derive(Debug, Deserialize)]
pub struct MoserSuiteConfig {
    #[serde(default = "default_r0s")]
    pub r0_values: Vec<f64>,
    #[serde(default = "default_fracs")]
    pub t0_fractions: Vec<f64>,
}

fn default_r0s() -> Vec<f64> {
    vec![1.0, 2.0, 10.0]
}
fn default_fracs() -> Vec<f64> {
    vec![0.3, 0.5, 0.8]
}

pub fn moser_suite(cfg: &MoserSuiteConfig) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    for &r0 in &cfg.r0_values {
        let t_max = SphereSolution::new(3, r0)?.maximal_time();
        for &frac in &cfg.t0_fractions {
            let mut run_cfg = FlowConfig::new(frac * t_max);
            run_cfg.record_stride = 16;
            let monitors = MonitorConfig {
                pairs: vec![(Quantity::H, 5.0)],
                c_bound: None,
            };
            let traj = run_flow(&Immersion::analytic_sphere(r0, 3)?, &run_cfg, &monitors)?;
            let rep = verify_moser_bound(&traj)?;
            checks.push(CheckResult::ge(
                format!("sup-bound margin, r0={r0}, T0={frac}T"),
                rep.margin,
                0.0,
            ));
        }
    }
    checks.push(CheckResult::le(
        "Sobolev constant C(3) vs hand evaluation",
        (sobolev_constant(3)? - 5.146795312016323).abs(),
        1e-10,
    ));
    Ok(SuiteReport::new("moser", checks))
}

#[derive(Debug, Deserialize)]
pub struct DichotomySuiteConfig {
    #[serde(default = "default_ns")]
    pub n_values: Vec<usize>,
}

fn default_ns() -> Vec<usize> {
    vec![1, 2, 3]
}

pub fn dichotomy_suite(cfg: &DichotomySuiteConfig) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    for &n in &cfg.n_values {
        let alpha_c = (n + 2) as f64;
        let mut run_cfg = FlowConfig::new(10.0 * SphereSolution::new(n, 1.0)?.maximal_time());
        run_cfg.c_stab = 0.15;
        run_cfg.record_stride = 1024;
        let monitors = MonitorConfig {
            pairs: vec![(Quantity::H, alpha_c), (Quantity::H, alpha_c + 1.0)],
            c_bound: None,
        };
        let traj = run_flow(&Immersion::analytic_sphere(1.0, n)?, &run_cfg, &monitors)?;

        let critical = dichotomy_fit(&traj, Quantity::H, alpha_c)?;
        let log_flag = matches!(critical.verdict, DichotomyVerdict::LogDivergent);
        checks.push(CheckResult::le(
            format!("n={n}: critical exponent error (fit {:.4})", critical.fitted_exponent),
            (critical.fitted_exponent + 1.0).abs() + if log_flag { 0.0 } else { 1.0 },
            0.05,
        ));
        let above = dichotomy_fit(&traj, Quantity::H, alpha_c + 1.0)?;
        let power_err = match above.verdict {
            DichotomyVerdict::PowerDivergent {
                divergence_exponent,
            } => (divergence_exponent - 0.5).abs(),
            _ => f64::INFINITY,
        };
        checks.push(CheckResult::le(
            format!("n={n}: supercritical divergence exponent error"),
            power_err,
            0.05,
        ));
    }
    // finite side: n=1, alpha=2 accumulates to the total length loss 2 pi
    let mut run_cfg = FlowConfig::new(10.0);
    run_cfg.c_stab = 0.02;
    run_cfg.record_stride = 64;
    let monitors = MonitorConfig {
        pairs: vec![(Quantity::H, 2.0)],
        c_bound: None,
    };
    let traj = run_flow(&Immersion::analytic_sphere(1.0, 1)?, &run_cfg, &monitors)?;
    let acc = traj.accumulator.value(Quantity::H, 2.0).unwrap();
    checks.push(CheckResult::le(
        "n=1 subcritical total vs 2*pi (relative)",
        (acc - 2.0 * PI).abs() / (2.0 * PI),
        0.01,
    ));
    Ok(SuiteReport::new("dichotomy", checks))
}
