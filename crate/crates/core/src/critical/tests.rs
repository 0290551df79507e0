use super::*;
use crate::mapping::catalog;
use crate::numerics::{Poly, I, ONE};

fn c(re: f64, im: f64) -> Cx {
    Cx::new(re, im)
}

fn check_parametrization(f: &HarmonicMap, set: &CriticalSet) {
    let omega = set.omega.as_ref().unwrap();
    for curve in &set.curves {
        let s = &curve.samples;
        assert!((s[0].z - s[s.len() - 1].z).norm() <= 1e-8);
        assert!(curve.turns() >= 1);
        assert!((curve.t_span() - TAU * curve.turns() as f64).abs() < 1e-6);
        for w in s.windows(2) {
            assert!(w[1].t > w[0].t);
        }
        for p in s {
            let r = (omega.w.eval_raw(p.z) * Cx::from_polar(1.0, -p.t) - 1.0).norm();
            assert!(r <= 1e-9, "residual {r} at {}", p.z);
            let (a, b) = f.wirtinger_raw(p.z);
            let jac = f.jacobian_raw(p.z);
            assert!(jac.abs() <= 1e-7 * (a.norm_sqr() + b.norm_sqr()).max(1.0), "J = {jac}");
        }
    }
}

/// Left of the curve is sense-preserving.
fn check_sense_sides(f: &HarmonicMap, set: &CriticalSet) {
    let omega = set.omega.as_ref().unwrap();
    let eps = 1e-4 * set.scale;
    for curve in &set.curves {
        for p in curve.samples.iter().filter(|p| !p.vertex).step_by(7) {
            if set.vertices.iter().any(|v| (v.z - p.z).norm() < 1e-2) {
                continue;
            }
            let n = omega.tangent(p.z);
            let n = I * n / n.norm();
            assert!(f.jacobian_raw(p.z + n * eps) > 0.0, "left side at {}", p.z);
            assert!(f.jacobian_raw(p.z - n * eps) < 0.0, "right side at {}", p.z);
        }
    }
}

#[test]
fn nexp_unit_circle_and_origin() {
    let f = catalog::nexp();
    let set = critical_set(&f).unwrap();
    assert_eq!(set.curves.len(), 1);
    let curve = &set.curves[0];
    assert_eq!(curve.turns(), 1);
    for p in &curve.samples {
        assert!((p.z.norm() - 1.0).abs() < 1e-10);
        // gamma(t) = e^{-it}
        assert!((p.z - Cx::from_polar(1.0, -p.t)).norm() < 1e-9);
    }
    let area = curve.signed_area();
    assert!((area + std::f64::consts::PI).abs() < 0.01 * std::f64::consts::PI);
    assert_eq!(set.isolated.len(), 1);
    assert!(set.isolated[0].z.norm() < 1e-12);
    assert!(set.isolated[0].omega_limit_abs.is_infinite());
    check_parametrization(&f, &set);
    check_sense_sides(&f, &set);
}

#[test]
fn nexp_seeds_on_unit_circle() {
    let seeds = critical_seeds(&catalog::nexp()).unwrap();
    assert_eq!(seeds.len(), 8);
    for s in seeds {
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn wilmshurst_three_stitches_through_zero_and_one() {
    let f = catalog::wilmshurst(3).unwrap();
    let set = critical_set(&f).unwrap();
    assert_eq!(set.vertices.len(), 2);
    for target in [ZERO, ONE] {
        let v = set.vertices.iter().find(|v| (v.z - target).norm() < 1e-9).unwrap();
        assert_eq!(v.order, 2);
    }
    assert_eq!(set.curves.len(), 1);
    assert_eq!(set.curves[0].pieces.len(), 4);
    assert!(set.isolated.is_empty());
    check_parametrization(&f, &set);
    check_sense_sides(&f, &set);
}

#[test]
fn wilmshurst_four_has_six_arcs_per_vertex() {
    let f = catalog::wilmshurst(4).unwrap();
    let set = critical_set(&f).unwrap();
    assert_eq!(set.vertices.len(), 2);
    assert!(set.vertices.iter().all(|v| v.order == 3));
    assert_eq!(set.curves.len(), 1);
    assert_eq!(set.curves[0].pieces.len(), 6);
    check_parametrization(&f, &set);
}

#[test]
fn mpw_has_two_curves() {
    let f = catalog::mpw();
    let set = critical_set(&f).unwrap();
    assert_eq!(set.curves.len(), 2);
    assert!(set.vertices.is_empty());
    assert!(set.isolated.is_empty());
    check_parametrization(&f, &set);
    check_sense_sides(&f, &set);
}

#[test]
fn log_example_curves() {
    let f = catalog::log_example();
    let set = critical_set(&f).unwrap();
    assert!(!set.curves.is_empty());
    check_parametrization(&f, &set);
    check_sense_sides(&f, &set);
}

#[test]
fn double_caustic_lemniscate_meets_at_origin() {
    let f = catalog::double_caustic();
    let set = critical_set(&f).unwrap();
    assert_eq!(set.vertices.len(), 1);
    assert!(set.vertices[0].z.norm() < 1e-9);
    assert_eq!(set.curves.len(), 1);
    assert!(set.isolated.is_empty());
    check_parametrization(&f, &set);
    for p in &set.curves[0].samples {
        assert!(((p.z * p.z - 1.0).norm() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn tangent_matches_finite_differences() {
    let f = catalog::mpw();
    let set = critical_set(&f).unwrap();
    let omega = set.omega.as_ref().unwrap();
    for curve in &set.curves {
        for w in curve.samples.windows(3).step_by(11) {
            let (a, b, m) = (w[0], w[2], w[1]);
            let fd = (b.z - a.z) / (b.t - a.t);
            let exact = omega.tangent(m.z);
            let curvature_bound = 1e-4 + 0.5 * (b.t - a.t).powi(2) * 10.0;
            assert!((fd - exact).norm() / exact.norm() < curvature_bound.max(1e-4));
        }
    }
}

#[test]
fn every_seed_is_reached() {
    for f in [catalog::mpw(), catalog::log_example(), catalog::wilmshurst(3).unwrap()] {
        let set = critical_set(&f).unwrap();
        let omega = set.omega.as_ref().unwrap();
        let opts = CriticalOptions::default();
        let tracer = Tracer { omega, vertices: &set.vertices, opts: &opts, scale: set.scale };
        for (z, t) in seeds_with_phase(omega, 8).unwrap() {
            let hit = set.curves.iter().any(|cv| {
                tracer.phase_points(&cv.samples, t).iter().any(|p| (p - z).norm() < 1e-6)
            }) || set.vertices.iter().any(|v| (v.z - z).norm() < 1e-3);
            assert!(hit, "seed {z} missed");
        }
    }
}

#[test]
fn analytic_map_has_no_curves() {
    let f = HarmonicMap::polynomial(Poly::monomial(ONE, 2), Poly::zero()).unwrap();
    let set = critical_set(&f).unwrap();
    assert!(set.curves.is_empty());
    assert_eq!(set.isolated.len(), 1);
    assert!(set.isolated[0].z.norm() < 1e-12);
}

#[test]
fn unit_constant_dilatation_is_degenerate() {
    let f = HarmonicMap::polynomial(Poly::monomial(ONE, 1), Poly::monomial(c(0.0, 1.0), 1)).unwrap();
    assert_eq!(critical_seeds(&f), Err(Error::DegenerateDilatation));
}

#[test]
fn trace_single_curve_from_seed() {
    let f = catalog::nexp();
    let curve = trace_curve(&f, c(0.0, 1.0)).unwrap();
    assert_eq!(curve.turns(), 1);
    assert!(matches!(
        trace_curve(&catalog::wilmshurst(3).unwrap(), c(0.5, 0.5)),
        Err(Error::HitBranchPoint { .. }) | Err(Error::DegenerateMap(_))
    ));
}
