//! Closed-hypersurface representations and their discrete differential geometry.
//!
//! Three concrete families cover everything the evolution equations need:
//! plane curves (n = 1), hypersurfaces of revolution (n >= 2, sampled along
//! the meridian), and round spheres handled analytically in any dimension.
//! A [`GeometryFrame`] carries the induced metric, principal curvatures,
//! mean curvature, |A|^2, outward unit normal and quadrature weights for one
//! time slice.

use crate::error::{Error, Result};

/// Edge lengths below this are treated as a degenerate mesh.
pub const SEGMENT_FLOOR: f64 = 1e-14;
/// Interior profile radii below this are treated as a collapsed meridian.
pub const PROFILE_FLOOR: f64 = 1e-12;

pub type Vec2 = [f64; 2];

#[inline]
pub(crate) fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub(crate) fn norm(a: Vec2) -> f64 {
    a[0].hypot(a[1])
}

#[inline]
pub(crate) fn cross(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Volume of the unit ball in R^d (exact two-term recurrence).
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / d as f64 * unit_ball_volume(d - 2),
    }
}

/// Area of the unit n-sphere embedded in R^{n+1}.
pub fn unit_sphere_area(n: usize) -> f64 {
    (n + 1) as f64 * unit_ball_volume(n + 1)
}

/// A closed hypersurface immersed in Euclidean space, at one instant.
#[derive(Debug, Clone, PartialEq)]
pub enum Immersion {
    /// Closed polygonal curve in the plane, n = 1. Periodic sample order.
    PlaneCurve { points: Vec<Vec2> },
    /// Hypersurface of revolution in R^{n+1}: meridian samples (axis, radius)
    /// over a uniform parameter grid, radius exactly zero at both poles.
    Revolution {
        axis: Vec<f64>,
        radius: Vec<f64>,
        dimension: usize,
    },
    /// Round sphere of the given radius, advanced in closed form.
    AnalyticSphere { radius: f64, dimension: usize },
}

impl Immersion {
    pub fn plane_curve(points: Vec<Vec2>) -> Result<Self> {
        if points.len() < 8 {
            return Err(Error::BadShapeParameters(format!(
                "plane curve needs at least 8 points, got {}",
                points.len()
            )));
        }
        let m = points.len();
        for j in 0..m {
            let e0 = sub(points[(j + 1) % m], points[j]);
            let l0 = norm(e0);
            if l0 < SEGMENT_FLOOR {
                return Err(Error::BadShapeParameters(format!(
                    "points {} and {} coincide",
                    j,
                    (j + 1) % m
                )));
            }
            // best-effort simplicity: reject consecutive segments that fold back
            // onto each other (collinear with reversed direction).
            let e1 = sub(points[(j + 2) % m], points[(j + 1) % m]);
            let l1 = norm(e1);
            let c = cross(e0, e1);
            let d = e0[0] * e1[0] + e0[1] * e1[1];
            if c.abs() < SEGMENT_FLOOR * l0 * l1 && d < 0.0 {
                return Err(Error::BadShapeParameters(format!(
                    "consecutive segments at point {} intersect",
                    (j + 1) % m
                )));
            }
        }
        Ok(Immersion::PlaneCurve { points })
    }

    pub fn revolution(axis: Vec<f64>, radius: Vec<f64>, dimension: usize) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::BadShapeParameters(format!(
                "revolution needs n >= 2, got n = {dimension}"
            )));
        }
        if axis.len() != radius.len() {
            return Err(Error::LengthMismatch {
                expected: axis.len(),
                got: radius.len(),
            });
        }
        let m = axis.len();
        if m < 16 {
            return Err(Error::BadShapeParameters(format!(
                "revolution meridian needs at least 16 samples, got {m}"
            )));
        }
        if radius[0] != 0.0 || radius[m - 1] != 0.0 {
            return Err(Error::BadShapeParameters(
                "profile must be exactly zero at both poles".into(),
            ));
        }
        if radius[1..m - 1].iter().any(|&r| r <= 0.0) {
            return Err(Error::BadShapeParameters(
                "profile must be strictly positive in the interior".into(),
            ));
        }
        Ok(Immersion::Revolution {
            axis,
            radius,
            dimension,
        })
    }

    pub fn analytic_sphere(radius: f64, dimension: usize) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::BadShapeParameters(format!(
                "sphere radius must be finite and positive, got {radius}"
            )));
        }
        if dimension < 1 {
            return Err(Error::BadShapeParameters("sphere needs n >= 1".into()));
        }
        Ok(Immersion::AnalyticSphere { radius, dimension })
    }

    /// Intrinsic dimension n of the hypersurface.
    pub fn dimension(&self) -> usize {
        match self {
            Immersion::PlaneCurve { .. } => 1,
            Immersion::Revolution { dimension, .. } => *dimension,
            Immersion::AnalyticSphere { dimension, .. } => *dimension,
        }
    }

    pub fn samples(&self) -> usize {
        match self {
            Immersion::PlaneCurve { points } => points.len(),
            Immersion::Revolution { axis, .. } => axis.len(),
            Immersion::AnalyticSphere { .. } => 1,
        }
    }

    /// Mean distance of the samples to their centroid; on discretized
    /// circles and spheres this is the numeric radius.
    pub fn mean_radius(&self) -> f64 {
        match self {
            Immersion::PlaneCurve { points } => {
                let m = points.len() as f64;
                let cx = points.iter().map(|p| p[0]).sum::<f64>() / m;
                let cy = points.iter().map(|p| p[1]).sum::<f64>() / m;
                points
                    .iter()
                    .map(|p| (p[0] - cx).hypot(p[1] - cy))
                    .sum::<f64>()
                    / m
            }
            Immersion::Revolution { axis, radius, .. } => {
                let m = axis.len() as f64;
                let cx = axis.iter().sum::<f64>() / m;
                axis.iter()
                    .zip(radius)
                    .map(|(&x, &r)| (x - cx).hypot(r))
                    .sum::<f64>()
                    / m
            }
            Immersion::AnalyticSphere { radius, .. } => *radius,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Stencil {
    Curve {
        /// edge_len[j] = |p_{j+1} - p_j| (periodic index).
        edge_len: Vec<f64>,
    },
    Revolution {
        /// edge_len[j] = meridian chord between samples j and j+1 (m-1 entries).
        edge_len: Vec<f64>,
        /// rho_mid^{n-1} / edge_len per edge: conductance of the flux form.
        flux_weight: Vec<f64>,
        /// dual-cell measure per sample (dmu without the orbit factor).
        cell: Vec<f64>,
    },
    Sphere,
}

/// Per-sample first and second fundamental form data for one time slice.
///
/// Principal curvatures are stored as two channels with multiplicities
/// `[1, n-1]`: a plane curve uses only the first channel, a hypersurface of
/// revolution carries (meridian, orbit), and a round sphere repeats 1/r.
#[derive(Debug, Clone)]
pub struct GeometryFrame {
    pub t: f64,
    pub dimension: usize,
    pub kappa_multiplicity: [usize; 2],
    /// Diagonal metric entries per sample: [g_parameter, g_orbit].
    pub metric: Vec<[f64; 2]>,
    /// Principal curvature channels per sample.
    pub kappa: Vec<[f64; 2]>,
    /// Mean curvature H = sum of principal curvatures.
    pub mean: Vec<f64>,
    /// |A|^2 = sum of squared principal curvatures.
    pub a2: Vec<f64>,
    /// Outward unit normal. For curves this is the ambient 2-vector, for a
    /// revolution it is the (axis, radial) meridian-plane component, and for
    /// the analytic sphere `[1, 0]` stands for the radial direction.
    pub normal: Vec<Vec2>,
    /// Quadrature weight of each sample; the weights sum to the total area.
    pub dmu: Vec<f64>,
    pub(crate) stencil: Stencil,
}

impl GeometryFrame {
    pub fn samples(&self) -> usize {
        self.mean.len()
    }

    pub fn area(&self) -> f64 {
        self.dmu.iter().sum()
    }

    pub fn max_a2(&self) -> f64 {
        self.a2.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_h2(&self) -> f64 {
        self.mean
            .iter()
            .map(|h| h * h)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_h(&self) -> f64 {
        self.mean.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Smallest principal curvature over all samples and directions.
    pub fn min_kappa(&self) -> f64 {
        let mut lo = f64::INFINITY;
        for k in &self.kappa {
            lo = lo.min(k[0]);
            if self.kappa_multiplicity[1] > 0 {
                lo = lo.min(k[1]);
            }
        }
        lo
    }

    /// max over samples of |A|^2 / H^2, defined only while min H > 0.
    pub fn max_pinching(&self) -> Option<f64> {
        if self.min_h() <= 0.0 {
            return None;
        }
        let mut hi = f64::NEG_INFINITY;
        for (a2, h) in self.a2.iter().zip(&self.mean) {
            hi = hi.max(a2 / (h * h));
        }
        Some(hi)
    }

    /// Minimal mesh width in arclength; infinite for the analytic sphere.
    pub fn min_mesh_width(&self) -> f64 {
        match &self.stencil {
            Stencil::Curve { edge_len } | Stencil::Revolution { edge_len, .. } => {
                edge_len.iter().cloned().fold(f64::INFINITY, f64::min)
            }
            Stencil::Sphere => f64::INFINITY,
        }
    }

    /// Spatial integral of |q|^alpha over the hypersurface, q in {A, H}.
    pub fn integral_abs_pow(&self, quantity: crate::monitors::Quantity, alpha: f64) -> f64 {
        use crate::monitors::Quantity;
        let mut acc = 0.0;
        match quantity {
            Quantity::A => {
                for (a2, w) in self.a2.iter().zip(&self.dmu) {
                    acc += abs_pow_from_square(*a2, alpha) * w;
                }
            }
            Quantity::H => {
                for (h, w) in self.mean.iter().zip(&self.dmu) {
                    acc += abs_pow_from_square(h * h, alpha) * w;
                }
            }
        }
        acc
    }
}

/// |q|^alpha from q^2, with fast paths for integer and half-integer powers.
#[inline]
pub(crate) fn abs_pow_from_square(square: f64, alpha: f64) -> f64 {
    let half = alpha * 0.5;
    if half == half.trunc() && half.abs() <= 64.0 {
        square.powi(half as i32)
    } else if alpha == alpha.trunc() && alpha.abs() <= 128.0 {
        square.sqrt().powi(alpha as i32)
    } else {
        square.powf(half)
    }
}

/// Build all first/second fundamental-form quantities from an immersion.
pub fn compute_geometry(imm: &Immersion) -> Result<GeometryFrame> {
    compute_geometry_at(imm, 0.0)
}

pub fn compute_geometry_at(imm: &Immersion, t: f64) -> Result<GeometryFrame> {
    match imm {
        Immersion::PlaneCurve { points } => curve_frame(points, t),
        Immersion::Revolution {
            axis,
            radius,
            dimension,
        } => revolution_frame(axis, radius, *dimension, t),
        Immersion::AnalyticSphere { radius, dimension } => sphere_frame(*radius, *dimension, t),
    }
}

fn curve_frame(points: &[Vec2], t: f64) -> Result<GeometryFrame> {
    let m = points.len();
    let mut twice_area = 0.0;
    for j in 0..m {
        let p = points[j];
        let q = points[(j + 1) % m];
        twice_area += p[0] * q[1] - q[0] * p[1];
    }
    if twice_area.abs() < SEGMENT_FLOOR {
        return Err(Error::DegenerateGeometry(
            "curve encloses no area".to_string(),
        ));
    }
    let orient = twice_area.signum();

    let mut edge_len = vec![0.0; m];
    for j in 0..m {
        let l = norm(sub(points[(j + 1) % m], points[j]));
        if l < SEGMENT_FLOOR {
            return Err(Error::DegenerateGeometry(format!(
                "segment {j} shorter than {SEGMENT_FLOOR}"
            )));
        }
        edge_len[j] = l;
    }

    let mut metric = Vec::with_capacity(m);
    let mut kappa = Vec::with_capacity(m);
    let mut mean = Vec::with_capacity(m);
    let mut a2 = Vec::with_capacity(m);
    let mut normal = Vec::with_capacity(m);
    let mut dmu = Vec::with_capacity(m);

    for j in 0..m {
        let prev = points[(j + m - 1) % m];
        let here = points[j];
        let next = points[(j + 1) % m];
        let chord = sub(next, prev);
        let clen = norm(chord);
        if clen < SEGMENT_FLOOR {
            return Err(Error::DegenerateGeometry(format!(
                "samples around {j} collapse onto each other"
            )));
        }
        let l_prev = edge_len[(j + m - 1) % m];
        let l_next = edge_len[j];
        // circumscribed-circle curvature; exact on sampled circles
        let k = orient * 2.0 * cross(sub(here, prev), sub(next, here)) / (l_prev * l_next * clen);
        let nu = [orient * chord[1] / clen, -orient * chord[0] / clen];
        metric.push([(clen / 2.0) * (clen / 2.0), 1.0]);
        kappa.push([k, 0.0]);
        mean.push(k);
        a2.push(k * k);
        normal.push(nu);
        dmu.push(0.5 * (l_prev + l_next));
    }

    Ok(GeometryFrame {
        t,
        dimension: 1,
        kappa_multiplicity: [1, 0],
        metric,
        kappa,
        mean,
        a2,
        normal,
        dmu,
        stencil: Stencil::Curve { edge_len },
    })
}

/// Meridian derivatives with ghost-point reflection through the poles:
/// the profile continues as (x(|u|), -rho(|u|)), which enforces x' = 0 and
/// rho'' = 0 at the axis and keeps the stencils second order one-sidedly.
fn meridian_derivatives(axis: &[f64], radius: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let m = axis.len();
    let mut xp = vec![0.0; m];
    let mut rp = vec![0.0; m];
    let mut xpp = vec![0.0; m];
    let mut rpp = vec![0.0; m];
    for j in 1..m - 1 {
        xp[j] = 0.5 * (axis[j + 1] - axis[j - 1]);
        rp[j] = 0.5 * (radius[j + 1] - radius[j - 1]);
        xpp[j] = axis[j + 1] - 2.0 * axis[j] + axis[j - 1];
        rpp[j] = radius[j + 1] - 2.0 * radius[j] + radius[j - 1];
    }
    xp[0] = 0.0;
    rp[0] = radius[1];
    xpp[0] = 2.0 * (axis[1] - axis[0]);
    rpp[0] = 0.0;
    xp[m - 1] = 0.0;
    rp[m - 1] = -radius[m - 2];
    xpp[m - 1] = 2.0 * (axis[m - 2] - axis[m - 1]);
    rpp[m - 1] = 0.0;
    (xp, rp, xpp, rpp)
}

fn revolution_frame(axis: &[f64], radius: &[f64], n: usize, t: f64) -> Result<GeometryFrame> {
    let m = axis.len();
    for (j, &r) in radius[1..m - 1].iter().enumerate() {
        if r < PROFILE_FLOOR {
            return Err(Error::DegenerateGeometry(format!(
                "interior profile radius at sample {} is below {PROFILE_FLOOR}",
                j + 1
            )));
        }
    }
    let mut edge_len = vec![0.0; m - 1];
    for j in 0..m - 1 {
        let l = (axis[j + 1] - axis[j]).hypot(radius[j + 1] - radius[j]);
        if l < SEGMENT_FLOOR {
            return Err(Error::DegenerateGeometry(format!(
                "meridian segment {j} shorter than {SEGMENT_FLOOR}"
            )));
        }
        edge_len[j] = l;
    }

    let (xp, rp, xpp, rpp) = meridian_derivatives(axis, radius);
    let orbit_area = unit_sphere_area(n - 1);

    // edge mass rho_mid^{n-1} * len and flux conductance rho_mid^{n-1} / len
    let mut edge_mass = vec![0.0; m - 1];
    let mut flux_weight = vec![0.0; m - 1];
    for j in 0..m - 1 {
        let rho_mid = 0.5 * (radius[j] + radius[j + 1]);
        let rpow = rho_mid.powi((n - 1) as i32);
        edge_mass[j] = rpow * edge_len[j];
        flux_weight[j] = rpow / edge_len[j];
    }
    let mut cell = vec![0.0; m];
    cell[0] = edge_mass[0] / (2.0 * n as f64);
    cell[m - 1] = edge_mass[m - 2] / (2.0 * n as f64);
    for j in 1..m - 1 {
        cell[j] = 0.5 * (edge_mass[j - 1] + edge_mass[j]);
    }

    let mut metric = Vec::with_capacity(m);
    let mut kappa = Vec::with_capacity(m);
    let mut mean = Vec::with_capacity(m);
    let mut a2 = Vec::with_capacity(m);
    let mut normal = Vec::with_capacity(m);
    let mut dmu = Vec::with_capacity(m);

    for j in 0..m {
        let speed = xp[j].hypot(rp[j]);
        if speed < SEGMENT_FLOOR {
            return Err(Error::DegenerateGeometry(format!(
                "meridian parameterization degenerates at sample {j}"
            )));
        }
        let k_ax = (rp[j] * xpp[j] - xp[j] * rpp[j]) / (speed * speed * speed);
        let k_rot = if j == 0 || j == m - 1 {
            // umbilic pole: the rotational curvature limit equals the
            // meridian curvature for a smoothly closed profile
            k_ax
        } else {
            xp[j] / (radius[j] * speed)
        };
        let h = k_ax + (n - 1) as f64 * k_rot;
        metric.push([speed * speed, radius[j] * radius[j]]);
        kappa.push([k_ax, k_rot]);
        mean.push(h);
        a2.push(k_ax * k_ax + (n - 1) as f64 * k_rot * k_rot);
        normal.push([-rp[j] / speed, xp[j] / speed]);
        dmu.push(orbit_area * cell[j]);
    }

    Ok(GeometryFrame {
        t,
        dimension: n,
        kappa_multiplicity: [1, n - 1],
        metric,
        kappa,
        mean,
        a2,
        normal,
        dmu,
        stencil: Stencil::Revolution {
            edge_len,
            flux_weight,
            cell,
        },
    })
}

fn sphere_frame(r: f64, n: usize, t: f64) -> Result<GeometryFrame> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::DegenerateGeometry(format!(
            "sphere radius {r} is not positive"
        )));
    }
    let k = 1.0 / r;
    let nf = n as f64;
    Ok(GeometryFrame {
        t,
        dimension: n,
        kappa_multiplicity: [1, n - 1],
        metric: vec![[r * r, r * r]],
        kappa: vec![[k, k]],
        mean: vec![nf / r],
        a2: vec![nf / (r * r)],
        normal: vec![[1.0, 0.0]],
        dmu: vec![unit_sphere_area(n) * r.powi(n as i32)],
        stencil: Stencil::Sphere,
    })
}

/// Quadrature of a per-sample scalar field against the area element.
pub fn area_integral(frame: &GeometryFrame, field: &[f64]) -> Result<f64> {
    if field.len() != frame.samples() {
        return Err(Error::LengthMismatch {
            expected: frame.samples(),
            got: field.len(),
        });
    }
    Ok(field.iter().zip(&frame.dmu).map(|(f, w)| f * w).sum())
}

/// Discrete Laplace-Beltrami operator in flux form.
///
/// Exactly annihilates constants and satisfies the discrete divergence
/// theorem (the dmu-weighted sum of the result is zero up to rounding).
pub fn laplace_beltrami(frame: &GeometryFrame, field: &[f64]) -> Result<Vec<f64>> {
    if field.len() != frame.samples() {
        return Err(Error::LengthMismatch {
            expected: frame.samples(),
            got: field.len(),
        });
    }
    match &frame.stencil {
        Stencil::Curve { edge_len } => {
            let m = field.len();
            let mut out = vec![0.0; m];
            for j in 0..m {
                let prev = (j + m - 1) % m;
                let next = (j + 1) % m;
                let flux_out = (field[next] - field[j]) / edge_len[j];
                let flux_in = (field[j] - field[prev]) / edge_len[prev];
                out[j] = (flux_out - flux_in) / frame.dmu[j];
            }
            Ok(out)
        }
        Stencil::Revolution {
            flux_weight, cell, ..
        } => {
            let m = field.len();
            let mut out = vec![0.0; m];
            for j in 0..m {
                // no flux through the poles
                let flux_out = if j + 1 < m {
                    flux_weight[j] * (field[j + 1] - field[j])
                } else {
                    0.0
                };
                let flux_in = if j > 0 {
                    flux_weight[j - 1] * (field[j] - field[j - 1])
                } else {
                    0.0
                };
                out[j] = (flux_out - flux_in) / cell[j];
            }
            Ok(out)
        }
        Stencil::Sphere => {
            let constant = field.iter().all(|&f| f == field[0]);
            if !constant {
                return Err(Error::UnsupportedRepresentation(
                    "analytic sphere supports the Laplacian of constant fields only",
                ));
            }
            Ok(vec![0.0; field.len()])
        }
    }
}

/// Arclength derivative of a per-sample scalar field.
///
/// Periodic central differences on curves; on a meridian the field is even
/// through the poles, so the derivative vanishes there.
pub fn deriv_arclength(frame: &GeometryFrame, field: &[f64]) -> Result<Vec<f64>> {
    if field.len() != frame.samples() {
        return Err(Error::LengthMismatch {
            expected: frame.samples(),
            got: field.len(),
        });
    }
    match &frame.stencil {
        Stencil::Curve { edge_len } => {
            let m = field.len();
            let mut out = vec![0.0; m];
            for j in 0..m {
                let prev = (j + m - 1) % m;
                let next = (j + 1) % m;
                out[j] = (field[next] - field[prev]) / (edge_len[prev] + edge_len[j]);
            }
            Ok(out)
        }
        Stencil::Revolution { edge_len, .. } => {
            let m = field.len();
            let mut out = vec![0.0; m];
            for j in 1..m - 1 {
                out[j] = (field[j + 1] - field[j - 1]) / (edge_len[j - 1] + edge_len[j]);
            }
            Ok(out)
        }
        Stencil::Sphere => Ok(vec![0.0; field.len()]),
    }
}

/// Position derivative with respect to the sample parameter, as used by the
/// normal-evolution residual. Curves use the periodic half-chord; meridians
/// use the ghost-reflected central stencil.
pub fn position_derivative(imm: &Immersion) -> Result<Vec<Vec2>> {
    match imm {
        Immersion::PlaneCurve { points } => {
            let m = points.len();
            let mut out = Vec::with_capacity(m);
            for j in 0..m {
                let chord = sub(points[(j + 1) % m], points[(j + m - 1) % m]);
                out.push([chord[0] / 2.0, chord[1] / 2.0]);
            }
            Ok(out)
        }
        Immersion::Revolution { axis, radius, .. } => {
            let (xp, rp, _, _) = meridian_derivatives(axis, radius);
            Ok(xp.into_iter().zip(rp).map(|(x, r)| [x, r]).collect())
        }
        Immersion::AnalyticSphere { .. } => Err(Error::UnsupportedRepresentation(
            "analytic sphere has no sampled parameterization",
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    pub fn circle(r: f64, m: usize) -> Immersion {
        let points = (0..m)
            .map(|j| {
                let th = 2.0 * PI * j as f64 / m as f64;
                [r * th.cos(), r * th.sin()]
            })
            .collect();
        Immersion::plane_curve(points).unwrap()
    }

    pub fn ellipse(a: f64, b: f64, m: usize) -> Immersion {
        let points = (0..m)
            .map(|j| {
                let th = 2.0 * PI * j as f64 / m as f64;
                [a * th.cos(), b * th.sin()]
            })
            .collect();
        Immersion::plane_curve(points).unwrap()
    }

    pub fn sphere_profile(r: f64, m: usize, n: usize) -> Immersion {
        let mut axis = Vec::with_capacity(m);
        let mut radius = Vec::with_capacity(m);
        for j in 0..m {
            let u = PI * j as f64 / (m - 1) as f64;
            axis.push(-r * u.cos());
            radius.push(r * u.sin());
        }
        radius[0] = 0.0;
        radius[m - 1] = 0.0;
        Immersion::revolution(axis, radius, n).unwrap()
    }

    #[test]
    fn analytic_sphere_round_identities() {
        let imm = Immersion::analytic_sphere(1.0, 2).unwrap();
        let f = compute_geometry(&imm).unwrap();
        assert_eq!(f.mean[0], 2.0);
        assert_eq!(f.a2[0], 2.0);
        assert!((f.area() - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn circle_curvature_exact_everywhere() {
        let imm = circle(0.5, 256);
        let f = compute_geometry(&imm).unwrap();
        for h in &f.mean {
            assert!((h - 2.0).abs() < 1e-3, "H = {h}");
        }
    }

    #[test]
    fn ellipse_vertex_curvature() {
        // brute-force oracle: kappa(theta) = a*b / (a^2 sin^2 + b^2 cos^2)^{3/2},
        // at the vertex (2, 0) this is a/b^2 = 2.
        let imm = ellipse(2.0, 1.0, 512);
        let f = compute_geometry(&imm).unwrap();
        assert!((f.mean[0] - 2.0).abs() < 1e-2, "vertex H = {}", f.mean[0]);
    }

    #[test]
    fn ellipse_curvature_against_closed_form() {
        let m = 512;
        let (a, b) = (2.0, 1.0);
        let imm = ellipse(a, b, m);
        let f = compute_geometry(&imm).unwrap();
        for j in 0..m {
            let th = 2.0 * PI * j as f64 / m as f64;
            let exact = a * b / (a * a * th.sin().powi(2) + b * b * th.cos().powi(2)).powf(1.5);
            assert!(
                (f.mean[j] - exact).abs() < 5e-3 * exact.max(1.0),
                "sample {j}: {} vs {exact}",
                f.mean[j]
            );
        }
    }

    #[test]
    fn curvature_refinement_order_on_ellipse() {
        let err = |m: usize| {
            let imm = ellipse(2.0, 1.0, m);
            let f = compute_geometry(&imm).unwrap();
            let mut worst: f64 = 0.0;
            for j in 0..m {
                let th = 2.0 * PI * j as f64 / m as f64;
                let exact =
                    2.0 / (4.0 * th.sin().powi(2) + th.cos().powi(2)).powf(1.5);
                worst = worst.max((f.mean[j] - exact).abs());
            }
            worst
        };
        let order = (err(256) / err(512)).log2();
        assert!(
            (order - 2.0).abs() <= 0.3,
            "measured refinement order {order}"
        );
    }

    #[test]
    fn cw_orientation_still_gives_outward_normals() {
        let m = 64;
        let points: Vec<[f64; 2]> = (0..m)
            .map(|j| {
                let th = -2.0 * PI * j as f64 / m as f64;
                [th.cos(), th.sin()]
            })
            .collect();
        let imm = Immersion::plane_curve(points.clone()).unwrap();
        let f = compute_geometry(&imm).unwrap();
        for (p, nu) in points.iter().zip(&f.normal) {
            let dot = p[0] * nu[0] + p[1] * nu[1];
            assert!(dot > 0.99, "normal should point outward, dot = {dot}");
        }
        assert!(f.mean.iter().all(|&h| h > 0.0));
    }

    #[test]
    fn cauchy_schwarz_gap_and_unit_normals() {
        for imm in [
            circle(1.0, 128),
            ellipse(2.0, 1.0, 256),
            sphere_profile(1.0, 128, 2),
            Immersion::analytic_sphere(3.0, 4).unwrap(),
        ] {
            let n = imm.dimension() as f64;
            let f = compute_geometry(&imm).unwrap();
            for j in 0..f.samples() {
                let gap = f.a2[j] - f.mean[j] * f.mean[j] / n;
                assert!(gap >= -1e-12, "Cauchy-Schwarz violated: {gap}");
                assert!((norm(f.normal[j]) - 1.0).abs() < 1e-12);
                assert!(f.dmu[j] > 0.0);
            }
        }
    }

    #[test]
    fn umbilic_equality_on_discretized_round_shapes() {
        let f = compute_geometry(&circle(1.0, 1024)).unwrap();
        for j in 0..f.samples() {
            assert!((f.a2[j] - f.mean[j] * f.mean[j]).abs() < 1e-6);
        }
        let f = compute_geometry(&sphere_profile(1.0, 1024, 2)).unwrap();
        for j in 0..f.samples() {
            let gap = f.a2[j] - f.mean[j] * f.mean[j] / 2.0;
            assert!(gap.abs() < 1e-6, "gap {gap} at {j}");
        }
    }

    #[test]
    fn sphere_profile_area_and_curvature() {
        let imm = sphere_profile(1.0, 512, 2);
        let f = compute_geometry(&imm).unwrap();
        assert!(
            (f.area() - 4.0 * PI).abs() / (4.0 * PI) < 1e-3,
            "area {}",
            f.area()
        );
        for (j, h) in f.mean.iter().enumerate() {
            assert!((h - 2.0).abs() < 2e-3, "H at {j} = {h}");
        }
    }

    #[test]
    fn area_integral_examples() {
        let f = compute_geometry(&circle(1.0, 256)).unwrap();
        let ones = vec![1.0; 256];
        assert!((area_integral(&f, &ones).unwrap() - 2.0 * PI).abs() < 1e-3);
        let h2: Vec<f64> = f.mean.iter().map(|h| h * h).collect();
        assert!((area_integral(&f, &h2).unwrap() - 2.0 * PI).abs() < 1e-2);

        let fs = compute_geometry(&Immersion::analytic_sphere(1.0, 2).unwrap()).unwrap();
        let val = area_integral(&fs, &[4.0]).unwrap();
        assert!((val - 16.0 * PI).abs() < 1e-12);

        assert!(matches!(
            area_integral(&f, &[1.0]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn laplacian_eigenfunction_on_circles() {
        for (r, tol) in [(1.0, 5e-3), (2.0, 5e-3)] {
            let m = 512;
            let imm = circle(r, m);
            let f = compute_geometry(&imm).unwrap();
            let field: Vec<f64> = (0..m)
                .map(|j| (2.0 * PI * j as f64 / m as f64).sin())
                .collect();
            let lap = laplace_beltrami(&f, &field).unwrap();
            for j in 0..m {
                let expect = -field[j] / (r * r);
                assert!((lap[j] - expect).abs() < tol, "{} vs {expect}", lap[j]);
            }
        }
    }

    #[test]
    fn laplacian_annihilates_constants() {
        for imm in [
            circle(1.0, 64),
            sphere_profile(1.0, 64, 2),
            Immersion::analytic_sphere(1.0, 3).unwrap(),
        ] {
            let f = compute_geometry(&imm).unwrap();
            let c = vec![3.25; f.samples()];
            let lap = laplace_beltrami(&f, &c).unwrap();
            assert!(lap.iter().all(|&v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn laplacian_ambient_coordinate_on_sphere_profile() {
        // x restricted to S^2(r) is an eigenfunction: Lap x = -2 x / r^2
        let r = 1.5;
        let m = 512;
        let imm = sphere_profile(r, m, 2);
        let f = compute_geometry(&imm).unwrap();
        let axis: Vec<f64> = match &imm {
            Immersion::Revolution { axis, .. } => axis.clone(),
            _ => unreachable!(),
        };
        let lap = laplace_beltrami(&f, &axis).unwrap();
        for j in 0..m {
            let expect = -2.0 * axis[j] / (r * r);
            assert!(
                (lap[j] - expect).abs() < 5e-3,
                "sample {j}: {} vs {expect}",
                lap[j]
            );
        }
    }

    #[test]
    fn laplacian_rejects_nonconstant_on_analytic_sphere() {
        let f = compute_geometry(&Immersion::analytic_sphere(1.0, 2).unwrap()).unwrap();
        assert!(laplace_beltrami(&f, &[1.0]).is_ok());
        let err = {
            let fs = GeometryFrame {
                mean: vec![1.0, 2.0],
                a2: vec![1.0, 2.0],
                dmu: vec![1.0, 1.0],
                metric: vec![[1.0, 1.0]; 2],
                kappa: vec![[1.0, 1.0]; 2],
                normal: vec![[1.0, 0.0]; 2],
                ..f
            };
            laplace_beltrami(&fs, &[1.0, 2.0])
        };
        assert!(matches!(err, Err(Error::UnsupportedRepresentation(_))));
    }

    #[test]
    fn degenerate_geometry_is_rejected() {
        let mut pts: Vec<[f64; 2]> = (0..16)
            .map(|j| {
                let th = 2.0 * PI * j as f64 / 16.0;
                [th.cos(), th.sin()]
            })
            .collect();
        pts[3] = pts[2];
        assert!(Immersion::plane_curve(pts).is_err());

        // collapsed interior profile radius
        let m = 32;
        let mut axis = vec![0.0; m];
        let mut radius = vec![0.0; m];
        for j in 0..m {
            let u = PI * j as f64 / (m - 1) as f64;
            axis[j] = -u.cos();
            radius[j] = u.sin().max(0.0);
        }
        radius[0] = 0.0;
        radius[m - 1] = 0.0;
        radius[m / 2] = 1e-13;
        let imm = Immersion::revolution(axis, radius, 2).unwrap();
        assert!(matches!(
            compute_geometry(&imm),
            Err(Error::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn ball_volumes_and_sphere_areas() {
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
        assert!((unit_ball_volume(5) - 8.0 * PI * PI / 15.0).abs() < 1e-14);
        assert!((unit_sphere_area(1) - 2.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(2) - 4.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(3) - 2.0 * PI * PI).abs() < 1e-13);
    }
}
