//! mcflab: configuration-driven mean curvature flow experiments.
//!
//! Exit codes: 0 = normal completion (including detected blow-up),
//! 2 = configuration error, 3 = internal invariant violation or failed
//! verification checks.

mod artifacts;
mod config;
mod verify;

use clap::{Parser, Subcommand};
use mcflab::{extension_report, monitor_report, run_flow, SphereSolution};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "mcflab", version, about = "mean curvature flow laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a flow experiment from a JSON config and write artifacts.
    Run { config: PathBuf },
    /// Run a named verification suite (evolution|invariance|moser|dichotomy).
    Verify { suite: String, config: PathBuf },
    /// Evaluate the shrinking-sphere oracle and its quadrature cross-check.
    Oracle {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r0: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long = "t-end")]
        t_end: f64,
        #[arg(long)]
        json: bool,
    },
}

enum Failure {
    Config(String),
    Invariant(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Invariant(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Invariant(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config } => cmd_run(&config),
        Command::Verify { suite, config } => cmd_verify(&suite, &config),
        Command::Oracle {
            n,
            r0,
            alpha,
            t_end,
            json,
        } => cmd_oracle(n, r0, alpha, t_end, json),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("mcflab: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn read_json(path: &Path) -> Result<serde_json::Value, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Config(format!("invalid JSON in {}: {e}", path.display())))
}

fn cmd_run(path: &Path) -> Result<u8, Failure> {
    let raw = read_json(path)?;
    let cfg: config::RunConfig = serde_json::from_value(raw.clone())
        .map_err(|e| Failure::Config(format!("bad config: {e}")))?;
    let imm = cfg.build_immersion().map_err(Failure::Config)?;
    let flow_cfg = cfg.flow_config();
    flow_cfg
        .validate()
        .map_err(|e| Failure::Config(e.to_string()))?;
    let monitors = cfg.monitor_config().map_err(Failure::Config)?;

    let out_dir = std::env::var("MCFLAB_OUT").unwrap_or_else(|_| cfg.output.dir.clone());
    let out_dir = PathBuf::from(out_dir);
    fs::create_dir_all(&out_dir)
        .map_err(|e| Failure::Config(format!("cannot create output dir: {e}")))?;

    let start = Instant::now();
    let traj = run_flow(&imm, &flow_cfg, &monitors)
        .map_err(|e| Failure::Config(format!("flow setup failed: {e}")))?;
    let duration = start.elapsed().as_secs_f64();

    // internal invariants: area must decrease, diagnostics must stay finite
    if !traj.area_monotone {
        return Err(Failure::Invariant(
            "area increased along the flow".to_string(),
        ));
    }
    if traj.records.iter().any(|r| {
        !(r.t.is_finite() && r.area.is_finite() && r.max_a2.is_finite() && r.min_h.is_finite())
    }) {
        return Err(Failure::Invariant(
            "non-finite diagnostic in the record stream".to_string(),
        ));
    }

    let io_err = |e: std::io::Error| Failure::Invariant(format!("artifact write failed: {e}"));

    let csv = artifacts::render_steps_csv(&traj);
    fs::write(out_dir.join("steps.csv"), &csv).map_err(io_err)?;
    let csv_sha256 = artifacts::sha256_hex(csv.as_bytes());

    let alphas: Vec<f64> = cfg.monitors.alphas.clone();
    let report = serde_json::json!({
        "monitor": monitor_report(&traj),
        "extension": extension_report(&traj, &alphas),
    });
    fs::write(
        out_dir.join("report.json"),
        serde_json::to_string_pretty(&report).unwrap(),
    )
    .map_err(io_err)?;

    let mut artifact_list = vec!["steps.csv".to_string(), "report.json".to_string()];
    artifact_list.extend(artifacts::write_plots(&out_dir, &traj).map_err(io_err)?);
    artifact_list.push("manifest.json".to_string());

    let manifest = artifacts::Manifest {
        config: raw,
        artifacts: artifact_list,
        stop_reason: traj.stop_reason,
        duration_seconds: duration,
        tool_version: env!("CARGO_PKG_VERSION"),
        csv_sha256,
    };
    fs::write(
        out_dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).unwrap(),
    )
    .map_err(io_err)?;

    println!(
        "run finished: stop_reason {:?}, {} steps, t_final {}, artifacts in {}",
        traj.stop_reason,
        traj.records.len(),
        traj.final_time(),
        out_dir.display()
    );
    Ok(0)
}

fn cmd_verify(suite: &str, path: &Path) -> Result<u8, Failure> {
    let raw = read_json(path)?;
    let bad_cfg = |e: serde_json::Error| Failure::Config(format!("bad suite config: {e}"));
    let run_err = |e: mcflab::Error| Failure::Config(format!("suite setup failed: {e}"));
    let report = match suite {
        "evolution" => {
            let cfg = serde_json::from_value(raw).map_err(bad_cfg)?;
            verify::evolution_suite(&cfg).map_err(run_err)?
        }
        "invariance" => {
            let cfg = serde_json::from_value(raw).map_err(bad_cfg)?;
            verify::invariance_suite(&cfg).map_err(run_err)?
        }
        "moser" => {
            let cfg = serde_json::from_value(raw).map_err(bad_cfg)?;
            verify::moser_suite(&cfg).map_err(run_err)?
        }
        "dichotomy" => {
            let cfg = serde_json::from_value(raw).map_err(bad_cfg)?;
            verify::dichotomy_suite(&cfg).map_err(run_err)?
        }
        other => {
            return Err(Failure::Config(format!(
                "unknown suite {other:?} (expected evolution|invariance|moser|dichotomy)"
            )))
        }
    };
    let out = std::env::var("MCFLAB_OUT").unwrap_or_else(|_| ".".to_string());
    let out_dir = PathBuf::from(out);
    fs::create_dir_all(&out_dir)
        .map_err(|e| Failure::Config(format!("cannot create output dir: {e}")))?;
    fs::write(
        out_dir.join("report.json"),
        serde_json::to_string_pretty(&report).unwrap(),
    )
    .map_err(|e| Failure::Invariant(format!("report write failed: {e}")))?;
    for check in &report.checks {
        println!(
            "{} {}: measured {:.6e} vs {:.6e}",
            if check.pass { "PASS" } else { "FAIL" },
            check.name,
            check.measured,
            check.threshold
        );
    }
    if report.all_pass {
        println!("suite {suite}: all {} checks passed", report.checks.len());
        Ok(0)
    } else {
        eprintln!("suite {suite}: failures detected");
        Ok(3)
    }
}

/// Composite Simpson cross-check of the closed-form norm, using the
/// singularity-removing substitution t = T - tau^2.
fn oracle_quadrature(n: usize, r0: f64, alpha: f64, t_end: f64) -> f64 {
    let sol = SphereSolution::new(n, r0).expect("validated");
    let t_max = sol.maximal_time();
    let nf = n as f64;
    let orbit = mcflab::geometry::unit_sphere_area(n);
    let g = |tau: f64| {
        let r = (2.0 * nf).sqrt() * tau;
        (nf / r).powf(alpha) * orbit * r.powi(n as i32) * 2.0 * tau
    };
    let lo = (t_max - t_end).max(0.0).sqrt().max(1e-12);
    let hi = t_max.sqrt();
    let panels = 1usize << 16;
    let h = (hi - lo) / panels as f64;
    let mut sum = g(lo) + g(hi);
    for k in 1..panels {
        sum += if k % 2 == 1 { 4.0 } else { 2.0 } * g(lo + k as f64 * h);
    }
    sum * h / 3.0
}

fn cmd_oracle(n: usize, r0: f64, alpha: f64, t_end: f64, json: bool) -> Result<u8, Failure> {
    let sol = SphereSolution::new(n, r0)
        .map_err(|e| Failure::Config(e.to_string()))?;
    let t_max = sol.maximal_time();
    if !(alpha > 0.0) {
        return Err(Failure::Config(format!("alpha must be positive, got {alpha}")));
    }
    if !(t_end > 0.0 && t_end <= t_max * (1.0 + 1e-12)) {
        return Err(Failure::Config(format!(
            "t_end must lie in (0, T] with T = {t_max}, got {t_end}"
        )));
    }
    let norm = mcflab::sphere_spacetime_norm(n, r0, mcflab::Quantity::H, alpha, t_end)
        .map_err(|e| Failure::Config(e.to_string()))?;
    let (radius, h) = if t_end >= t_max * (1.0 - 1e-12) {
        (0.0, f64::INFINITY)
    } else {
        (sol.radius(t_end), sol.mean_curvature(t_end))
    };
    let cross_rel_err = if norm.is_finite() {
        let quad = oracle_quadrature(n, r0, alpha, t_end);
        Some((norm - quad).abs() / quad.abs().max(f64::MIN_POSITIVE))
    } else {
        None
    };
    if json {
        let value = serde_json::json!({
            "n": n,
            "r0": r0,
            "alpha": alpha,
            "t_end": t_end,
            "maximal_time": t_max,
            "radius": radius,
            "mean_curvature": if h.is_finite() { serde_json::json!(h) } else { serde_json::json!("inf") },
            "norm": if norm.is_finite() { serde_json::json!(norm) } else { serde_json::json!("inf") },
            "quadrature_rel_err": cross_rel_err,
        });
        println!("{}", serde_json::to_string_pretty(&value).unwrap());
    } else {
        println!("shrinking sphere: n = {n}, r0 = {r0}, T = {t_max}");
        println!("r({t_end}) = {radius}");
        println!("H({t_end}) = {h}");
        if norm.is_finite() {
            println!("integral of |H|^{alpha} dmu dt over [0, {t_end}] = {norm}");
            println!(
                "quadrature cross-check relative error = {:.3e}",
                cross_rel_err.unwrap()
            );
        } else {
            println!("integral of |H|^{alpha} dmu dt over [0, {t_end}] = inf (alpha >= n + 2)");
            println!("quadrature cross-check skipped (divergent)");
        }
    }
    Ok(0)
}
