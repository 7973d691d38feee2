//! JSON run-configuration schema and immersion construction.

use mcflab::{FlowConfig, Immersion, InitialShape, MonitorConfig, Quantity};
use serde::Deserialize;
use serde_json::Value;

#[derive(Debug, Deserialize)]
pub struct RunConfig {
    pub geometry: GeometrySection,
    pub flow: FlowSection,
    #[serde(default)]
    pub monitors: MonitorSection,
    pub output: OutputSection,
}

#[derive(Debug, Deserialize)]
pub struct GeometrySection {
    pub kind: String,
    #[serde(default)]
    pub params: serde_json::Map<String, Value>,
    #[serde(default)]
    pub m: usize,
    #[serde(default)]
    pub n: usize,
}

#[derive(Debug, Deserialize)]
pub struct FlowSection {
    pub t_cap: f64,
    #[serde(default = "default_c_stab")]
    pub c_stab: f64,
    #[serde(default = "default_dt_floor")]
    pub dt_floor: f64,
    #[serde(default = "default_blowup")]
    pub blowup_threshold: f64,
    #[serde(default = "default_stride")]
    pub record_stride: usize,
    #[serde(default)]
    pub redistribute: bool,
}

#[derive(Debug, Default, Deserialize)]
pub struct MonitorSection {
    #[serde(default)]
    pub alphas: Vec<f64>,
    #[serde(default = "default_quantities")]
    pub quantities: Vec<String>,
    #[serde(default, rename = "C_bound")]
    pub c_bound: Option<f64>,
}

#[derive(Debug, Deserialize)]
pub struct OutputSection {
    pub dir: String,
}

fn default_c_stab() -> f64 {
    0.2
}
fn default_dt_floor() -> f64 {
    1e-12
}
fn default_blowup() -> f64 {
    1e8
}
fn default_stride() -> usize {
    1
}
fn default_quantities() -> Vec<String> {
    vec!["A".to_string(), "H".to_string()]
}

fn param(map: &serde_json::Map<String, Value>, key: &str) -> Result<f64, String> {
    map.get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| format!("geometry.params.{key} must be a number"))
}

impl RunConfig {
    pub fn build_immersion(&self) -> Result<Immersion, String> {
        let g = &self.geometry;
        let shape = match g.kind.as_str() {
            "circle" => InitialShape::Circle {
                r0: param(&g.params, "r0")?,
                m: g.m,
            },
            "ellipse" => InitialShape::Ellipse {
                a: param(&g.params, "a")?,
                b: param(&g.params, "b")?,
                m: g.m,
            },
            "sphere_profile" => InitialShape::SphereProfile {
                r0: param(&g.params, "r0")?,
                m: g.m,
                n: g.n,
            },
            "dumbbell" => InitialShape::Dumbbell {
                neck: param(&g.params, "neck")?,
                bulb: param(&g.params, "bulb")?,
                m: g.m,
                n: g.n,
            },
            "analytic_sphere" => {
                return Immersion::analytic_sphere(param(&g.params, "r0")?, g.n)
                    .map_err(|e| e.to_string());
            }
            other => return Err(format!("unknown geometry.kind {other:?}")),
        };
        mcflab::make_initial(&shape).map_err(|e| e.to_string())
    }

    pub fn flow_config(&self) -> FlowConfig {
        FlowConfig {
            t_cap: self.flow.t_cap,
            c_stab: self.flow.c_stab,
            dt_floor: self.flow.dt_floor,
            blowup_threshold: self.flow.blowup_threshold,
            resolution: self.geometry.m,
            record_stride: self.flow.record_stride,
            redistribute: self.flow.redistribute,
        }
    }

    /// Registered (quantity, alpha) pairs: quantities outer, alphas inner;
    /// this fixes the acc_<q>_<alpha> column order in steps.csv.
    pub fn monitor_config(&self) -> Result<MonitorConfig, String> {
        let mut pairs = Vec::new();
        for q in &self.monitors.quantities {
            let quantity = match q.as_str() {
                "A" => Quantity::A,
                "H" => Quantity::H,
                other => return Err(format!("unknown quantity {other:?} (use \"A\" or \"H\")")),
            };
            for &alpha in &self.monitors.alphas {
                if !(alpha > 0.0) {
                    return Err(format!("alpha must be positive, got {alpha}"));
                }
                pairs.push((quantity, alpha));
            }
        }
        Ok(MonitorConfig {
            pairs,
            c_bound: self.monitors.c_bound,
        })
    }
}
