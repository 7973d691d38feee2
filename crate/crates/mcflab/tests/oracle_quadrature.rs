//! Independent quadrature oracle for the closed-form sphere norms.
//!
//! The closed form is cross-checked against adaptive Simpson quadrature of
//! |H(t)|^alpha * area(t). The endpoint singularity at the maximal time is
//! removed by the substitution t = T - tau^2, under which the integrand
//! becomes proportional to tau^{n - alpha + 1}.

use mcflab::*;

/// Composite Simpson on 2^16 panels; the substituted integrands are smooth
/// on their domains, so this is accurate to well below the 1e-8 gates.
fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let n = 1usize << 16;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + k as f64 * h);
    }
    sum * h / 3.0
}

/// Quadrature of the sphere space-time norm with the tau = sqrt(T - t)
/// substitution.
fn quadrature_norm(n: usize, r0: f64, quantity: Quantity, alpha: f64, t_end: f64) -> f64 {
    let sol = SphereSolution::new(n, r0).unwrap();
    let t_max = sol.maximal_time();
    let ratio = match quantity {
        Quantity::H => 1.0,
        Quantity::A => (n as f64).powf(-alpha / 2.0),
    };
    // under t = T - tau^2 the radius is exactly r = sqrt(2n) tau, which is
    // stable where the closed-form r(t) = sqrt(r0^2 - 2nt) cancels near T
    let nf = n as f64;
    let orbit = geometry::unit_sphere_area(n);
    let g = move |tau: f64| {
        let r = (2.0 * nf).sqrt() * tau;
        (nf / r).powf(alpha) * orbit * r.powi(n as i32) * 2.0 * tau
    };
    // avoid the 0 * inf endpoint exactly at the maximal time; the integrand
    // is bounded there for every case below, so the truncation is < 1e-10
    let lo = (t_max - t_end).max(0.0).sqrt().max(1e-12);
    ratio * integrate(g, lo, t_max.sqrt())
}

#[test]
fn closed_form_matches_quadrature() {
    let cases = [
        // (n, r0, quantity, alpha, t_end_fraction)
        (1usize, 1.0, Quantity::H, 2.0, 1.0),
        (2, 1.0, Quantity::H, 3.0, 1.0),
        (2, 1.0, Quantity::H, 2.0, 0.7),
        (2, 1.0, Quantity::A, 3.0, 1.0),
        (3, 1.0, Quantity::H, 4.0, 0.9),
        (3, 2.0, Quantity::H, 5.0, 0.5),
        (4, 1.0, Quantity::A, 2.5, 0.8),
        (1, 0.5, Quantity::H, 2.0, 1.0),
    ];
    for (n, r0, q, alpha, frac) in cases {
        let t_max = SphereSolution::new(n, r0).unwrap().maximal_time();
        let t_end = frac * t_max;
        let closed = sphere_spacetime_norm(n, r0, q, alpha, t_end).unwrap();
        let quad = quadrature_norm(n, r0, q, alpha, t_end);
        assert!(
            (closed - quad).abs() <= 1e-8 * quad.abs().max(1.0),
            "n={n} r0={r0} alpha={alpha} frac={frac}: closed {closed} vs quadrature {quad}"
        );
    }
}

#[test]
fn divergent_side_markers() {
    // alpha >= n + 2 at the maximal time diverges
    let t1 = SphereSolution::new(1, 1.0).unwrap().maximal_time();
    assert!(sphere_spacetime_norm(1, 1.0, Quantity::H, 3.0, t1)
        .unwrap()
        .is_infinite());
    let t3 = SphereSolution::new(3, 1.0).unwrap().maximal_time();
    assert!(sphere_spacetime_norm(3, 1.0, Quantity::H, 5.0, t3)
        .unwrap()
        .is_infinite());
    assert!(sphere_spacetime_norm(3, 1.0, Quantity::A, 6.0, t3)
        .unwrap()
        .is_infinite());
    // but stays finite strictly before T, matching quadrature
    let closed = sphere_spacetime_norm(3, 1.0, Quantity::H, 5.0, 0.9 * t3).unwrap();
    let quad = quadrature_norm(3, 1.0, Quantity::H, 5.0, 0.9 * t3);
    assert!((closed - quad).abs() <= 1e-8 * quad);
}

#[test]
fn logarithmic_case_against_quadrature() {
    // alpha = n + 2 exactly, away from T: the closed form switches to the
    // logarithmic antiderivative
    for (n, frac) in [(1usize, 0.6), (2, 0.9), (3, 0.99)] {
        let alpha = (n + 2) as f64;
        let t_max = SphereSolution::new(n, 1.0).unwrap().maximal_time();
        let t_end = frac * t_max;
        let closed = sphere_spacetime_norm(n, 1.0, Quantity::H, alpha, t_end).unwrap();
        let quad = quadrature_norm(n, 1.0, Quantity::H, alpha, t_end);
        assert!(
            (closed - quad).abs() <= 1e-8 * quad,
            "n={n}: {closed} vs {quad}"
        );
    }
}

#[test]
fn oracle_parameter_validation() {
    let t1 = SphereSolution::new(1, 1.0).unwrap().maximal_time();
    assert!(sphere_spacetime_norm(1, 1.0, Quantity::H, 2.0, 2.0 * t1).is_err());
    assert!(sphere_spacetime_norm(1, 1.0, Quantity::H, -1.0, 0.5 * t1).is_err());
    assert!(sphere_spacetime_norm(1, -1.0, Quantity::H, 2.0, 0.1).is_err());
    assert!(sphere_spacetime_norm(0, 1.0, Quantity::H, 2.0, 0.1).is_err());
}
