//! Closed-form solutions and canonical initial shapes.
//!
//! The shrinking round sphere is the workhorse oracle: every geometric
//! quantity and every space-time curvature norm has a closed form, including
//! the sharp alpha = n + 2 finite/infinite dichotomy of the norms.

use crate::error::{Error, Result};
use crate::geometry::{unit_sphere_area, Immersion};
use crate::monitors::Quantity;
use std::f64::consts::PI;

/// Shrinking round sphere: r(t) = sqrt(r0^2 - 2 n t), gone at T = r0^2 / (2n).
#[derive(Debug, Clone, Copy)]
pub struct SphereSolution {
    pub n: usize,
    pub r0: f64,
}

impl SphereSolution {
    pub fn new(n: usize, r0: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::BadShapeParameters("sphere needs n >= 1".into()));
        }
        if !(r0.is_finite() && r0 > 0.0) {
            return Err(Error::BadShapeParameters(format!(
                "initial radius must be positive, got {r0}"
            )));
        }
        Ok(SphereSolution { n, r0 })
    }

    /// Maximal existence time T = r0^2 / (2n).
    pub fn maximal_time(&self) -> f64 {
        self.r0 * self.r0 / (2.0 * self.n as f64)
    }

    pub fn radius(&self, t: f64) -> f64 {
        (self.r0 * self.r0 - 2.0 * self.n as f64 * t).sqrt()
    }

    pub fn mean_curvature(&self, t: f64) -> f64 {
        self.n as f64 / self.radius(t)
    }

    pub fn a2(&self, t: f64) -> f64 {
        let r = self.radius(t);
        self.n as f64 / (r * r)
    }

    pub fn area(&self, t: f64) -> f64 {
        unit_sphere_area(self.n) * self.radius(t).powi(self.n as i32)
    }
}

/// Closed-form space-time norm on the shrinking sphere:
/// integral over [0, t_end] of |q|^alpha dmu dt for q in {A, H}.
///
/// Returns `f64::INFINITY` when t_end reaches the maximal time and
/// alpha >= n + 2 (the divergent side of the dichotomy).
pub fn sphere_spacetime_norm(
    n: usize,
    r0: f64,
    quantity: Quantity,
    alpha: f64,
    t_end: f64,
) -> Result<f64> {
    let sol = SphereSolution::new(n, r0)?;
    if alpha <= 0.0 {
        return Err(Error::NonPositiveInputs("alpha"));
    }
    let t_max = sol.maximal_time();
    if !(t_end > 0.0 && t_end <= t_max * (1.0 + 1e-12)) {
        return Err(Error::NonPositiveInputs("t_end must lie in (0, T]"));
    }
    let nf = n as f64;
    let at_maximal = t_end >= t_max * (1.0 - 1e-12);
    // |H(t)|^alpha * area(t) = n^alpha (2n)^{(n-alpha)/2} |S^n| (T-t)^{(n-alpha)/2}
    let p = (nf - alpha) / 2.0;
    if at_maximal && alpha >= nf + 2.0 {
        return Ok(f64::INFINITY);
    }
    let time_integral = if (p + 1.0).abs() < 1e-14 {
        // logarithmic case alpha = n + 2
        (t_max / (t_max - t_end)).ln()
    } else {
        (t_max.powf(p + 1.0)
            - if at_maximal {
                0.0
            } else {
                (t_max - t_end).powf(p + 1.0)
            })
            / (p + 1.0)
    };
    let c1 = nf.powf(alpha) * (2.0 * nf).powf(p) * unit_sphere_area(n);
    let value = c1 * time_integral;
    Ok(match quantity {
        Quantity::H => value,
        // umbilical: |A| = |H| / sqrt(n)
        Quantity::A => nf.powf(-alpha / 2.0) * value,
    })
}

/// Canonical initial shapes for flow experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialShape {
    Circle { r0: f64, m: usize },
    Ellipse { a: f64, b: f64, m: usize },
    SphereProfile { r0: f64, m: usize, n: usize },
    Dumbbell { neck: f64, bulb: f64, m: usize, n: usize },
}

pub fn make_initial(shape: &InitialShape) -> Result<Immersion> {
    match *shape {
        InitialShape::Circle { r0, m } => {
            require_positive(r0, "circle radius")?;
            let points = (0..m)
                .map(|j| {
                    let th = 2.0 * PI * j as f64 / m as f64;
                    [r0 * th.cos(), r0 * th.sin()]
                })
                .collect();
            Immersion::plane_curve(points)
        }
        InitialShape::Ellipse { a, b, m } => {
            require_positive(a, "ellipse semi-axis a")?;
            require_positive(b, "ellipse semi-axis b")?;
            let points = (0..m)
                .map(|j| {
                    let th = 2.0 * PI * j as f64 / m as f64;
                    [a * th.cos(), b * th.sin()]
                })
                .collect();
            Immersion::plane_curve(points)
        }
        InitialShape::SphereProfile { r0, m, n } => {
            require_positive(r0, "sphere radius")?;
            if m < 16 {
                return Err(Error::BadShapeParameters(format!(
                    "sphere profile needs m >= 16, got {m}"
                )));
            }
            let mut axis = Vec::with_capacity(m);
            let mut radius = Vec::with_capacity(m);
            for j in 0..m {
                let u = PI * j as f64 / (m - 1) as f64;
                axis.push(-r0 * u.cos());
                radius.push(r0 * u.sin());
            }
            radius[0] = 0.0;
            radius[m - 1] = 0.0;
            Immersion::revolution(axis, radius, n)
        }
        InitialShape::Dumbbell { neck, bulb, m, n } => {
            require_positive(neck, "dumbbell neck radius")?;
            if !(bulb > neck) {
                return Err(Error::BadShapeParameters(format!(
                    "dumbbell needs neck < bulb, got neck = {neck}, bulb = {bulb}"
                )));
            }
            if m < 16 {
                return Err(Error::BadShapeParameters(format!(
                    "dumbbell needs m >= 16, got {m}"
                )));
            }
            let b = dumbbell_modulation(neck, bulb)?;
            let mut axis = Vec::with_capacity(m);
            let mut radius = Vec::with_capacity(m);
            for j in 0..m {
                let u = PI * j as f64 / (m - 1) as f64;
                let c = u.cos();
                axis.push(-c);
                radius.push(u.sin() * (neck + b * c * c));
            }
            radius[0] = 0.0;
            radius[m - 1] = 0.0;
            Immersion::revolution(axis, radius, n)
        }
    }
}

/// Two-bulb meridian rho(u) = sin(u) (neck + b cos^2 u): waist radius `neck`
/// at the equator, smooth sphere-like closure at both poles. The modulation
/// b is chosen so the bulb maxima reach `bulb`, i.e. 4 (neck + b)^3 = 27 b bulb^2
/// (larger root, which is the branch with a genuine interior waist).
fn dumbbell_modulation(neck: f64, bulb: f64) -> Result<f64> {
    let f = |b: f64| 4.0 * (neck + b).powi(3) - 27.0 * b * bulb * bulb;
    let mut lo = 1.5 * bulb - neck;
    let mut hi = 27.0 * bulb * bulb; // f(hi) > 0 since 4 b^3 dominates
    if !(f(lo) < 0.0) {
        return Err(Error::BadShapeParameters(format!(
            "no bulb/waist branch for neck = {neck}, bulb = {bulb}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn require_positive(x: f64, what: &str) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::BadShapeParameters(format!(
            "{what} must be positive, got {x}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::compute_geometry;

    #[test]
    fn sphere_solution_satisfies_the_flow_ode() {
        for (n, r0) in [(1usize, 1.0), (2, 1.0), (3, 2.0)] {
            let sol = SphereSolution::new(n, r0).unwrap();
            let t_max = sol.maximal_time();
            let h = 1e-6 * t_max;
            for frac in [0.1, 0.5, 0.9] {
                let t = frac * t_max;
                let drdt = (sol.radius(t + h) - sol.radius(t - h)) / (2.0 * h);
                let expect = -(n as f64) / sol.radius(t);
                assert!(
                    (drdt - expect).abs() < 1e-10 * expect.abs().max(1.0),
                    "n={n} t={t}: {drdt} vs {expect}"
                );
                assert_eq!(sol.mean_curvature(t) * sol.radius(t), n as f64);
            }
        }
    }

    #[test]
    fn dichotomy_table() {
        // finite iff alpha < n + 2 at t_end = T
        for n in 1..=4usize {
            let t_max = SphereSolution::new(n, 1.0).unwrap().maximal_time();
            for da in [-1i32, 0, 1, 2, 3] {
                let alpha = (n as i32 + da) as f64;
                if alpha <= 0.0 {
                    continue;
                }
                let v = sphere_spacetime_norm(n, 1.0, Quantity::H, alpha, t_max).unwrap();
                if alpha >= (n + 2) as f64 {
                    assert!(v.is_infinite(), "n={n} alpha={alpha} should diverge");
                } else {
                    assert!(v.is_finite(), "n={n} alpha={alpha} should be finite");
                }
            }
        }
    }

    #[test]
    fn norm_matches_length_and_area_loss() {
        // n=1: total length loss 2*pi; n=2: total area loss 4*pi
        let t1 = SphereSolution::new(1, 1.0).unwrap().maximal_time();
        let v1 = sphere_spacetime_norm(1, 1.0, Quantity::H, 2.0, t1).unwrap();
        assert!((v1 - 2.0 * PI).abs() < 1e-12, "{v1}");
        let t2 = SphereSolution::new(2, 1.0).unwrap().maximal_time();
        let v2 = sphere_spacetime_norm(2, 1.0, Quantity::H, 2.0, t2).unwrap();
        assert!((v2 - 4.0 * PI).abs() < 1e-12, "{v2}");
    }

    #[test]
    fn umbilical_norm_ratio() {
        for n in 1..=4usize {
            let t_max = SphereSolution::new(n, 1.0).unwrap().maximal_time();
            for alpha in [1.0, 2.0, 2.5, n as f64 + 1.0] {
                for frac in [0.3, 0.9, 1.0] {
                    let t_end = frac * t_max;
                    let va =
                        sphere_spacetime_norm(n, 1.0, Quantity::A, alpha, t_end).unwrap();
                    let vh =
                        sphere_spacetime_norm(n, 1.0, Quantity::H, alpha, t_end).unwrap();
                    if vh.is_finite() {
                        let expect = (n as f64).powf(-alpha / 2.0) * vh;
                        assert!(
                            (va - expect).abs() <= 1e-12 * expect.abs(),
                            "n={n} alpha={alpha}: {va} vs {expect}"
                        );
                    } else {
                        assert!(va.is_infinite());
                    }
                }
            }
        }
    }

    #[test]
    fn initial_shape_examples() {
        let imm = make_initial(&InitialShape::Circle { r0: 1.0, m: 256 }).unwrap();
        let f = compute_geometry(&imm).unwrap();
        assert!(f.mean.iter().all(|h| (h - 1.0).abs() < 1e-3));

        let imm = make_initial(&InitialShape::SphereProfile {
            r0: 1.0,
            m: 512,
            n: 2,
        })
        .unwrap();
        let f = compute_geometry(&imm).unwrap();
        assert!((f.area() - 4.0 * PI).abs() / (4.0 * PI) < 1e-3);

        let imm = make_initial(&InitialShape::Dumbbell {
            neck: 0.2,
            bulb: 1.0,
            m: 512,
            n: 2,
        })
        .unwrap();
        let f = compute_geometry(&imm).unwrap();
        assert!(f.min_kappa() < 0.0, "saddle neck expected");
        // waist sits at the equator with radius `neck`
        let waist = match &imm {
            Immersion::Revolution { radius, .. } => radius[256],
            _ => unreachable!(),
        };
        assert!((waist - 0.2).abs() < 1e-2, "waist {waist}");
        // bulb maxima reach `bulb`
        let max_rho = match &imm {
            Immersion::Revolution { radius, .. } => {
                radius.iter().cloned().fold(0.0f64, f64::max)
            }
            _ => unreachable!(),
        };
        assert!((max_rho - 1.0).abs() < 1e-2, "bulb {max_rho}");
    }

    #[test]
    fn bad_shape_parameters() {
        assert!(make_initial(&InitialShape::Circle { r0: -1.0, m: 64 }).is_err());
        assert!(make_initial(&InitialShape::Dumbbell {
            neck: 1.0,
            bulb: 0.5,
            m: 64,
            n: 2
        })
        .is_err());
        assert!(make_initial(&InitialShape::Ellipse {
            a: 0.0,
            b: 1.0,
            m: 64
        })
        .is_err());
    }
}
