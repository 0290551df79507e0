use super::*;
use crate::caustic::caustics;
use crate::critical::critical_set;
use crate::mapping::catalog;
use crate::numerics::ZERO;

fn c(re: f64, im: f64) -> Cx {
    Cx::new(re, im)
}

#[test]
fn hermite_interpolation_conditions() {
    let (z1, z2, eps) = (c(0.3, -1.2), c(-0.7, 0.4), 1e-3);
    let p = hermite_perturbation(z1, z2, eps).unwrap();
    let dp = p.derivative();
    assert!((p.eval(z1) - eps).norm() < 1e-12);
    assert!((p.eval(z2) + eps).norm() < 1e-12);
    assert!(dp.eval(z1).norm() < 1e-12);
    assert!(dp.eval(z2).norm() < 1e-12);
    let q = hermite_perturbation(z2, z1, eps).unwrap();
    for z in [ZERO, c(1.0, 1.0), c(-2.0, 0.5)] {
        assert!((p.eval(z) + q.eval(z)).norm() < 1e-12);
    }
    assert!(matches!(hermite_perturbation(z1, z1, eps), Err(Error::CoincidentPoints)));
}

fn pairs(f: &HarmonicMap) -> Vec<(Cx, Cx)> {
    let set = critical_set(f).unwrap();
    let cs = caustics(f, &set).unwrap();
    detect_multiple_caustic(f, &set, &cs)
}

#[test]
fn double_caustic_pairs_are_symmetric() {
    let f = catalog::double_caustic();
    let found = pairs(&f);
    assert!(!found.is_empty());
    for &(z1, z2) in &found {
        assert!((f.eval(z1) - f.eval(z2)).norm() < 1e-6);
        assert!((z1 + z2).norm() < 1e-4, "{z1} {z2}");
    }
}

#[test]
fn doubly_covered_circle_is_detected() {
    let f = catalog::power_pair(4, 2).unwrap();
    let found = pairs(&f);
    assert!(!found.is_empty());
    for &(z1, z2) in &found {
        assert!((f.eval(z1) - f.eval(z2)).norm() < 1e-6);
    }
}

#[test]
fn simple_caustics_have_no_pairs() {
    assert!(pairs(&catalog::mpw()).is_empty());
}

#[test]
fn perturbation_separates_images() {
    let f = catalog::double_caustic();
    let (z1, z2) = pairs(&f)[0];
    let eps = default_perturbation_eps(&f);
    let g = f.add_analytic(&hermite_perturbation(z1, z2, eps).unwrap()).unwrap();
    assert!((g.eval(z1) - g.eval(z2)).norm() >= eps);
}

#[test]
fn perturbation_does_not_lose_zeros() {
    let f = catalog::double_caustic();
    let (z1, z2) = pairs(&f)[0];
    let r = perturbation_monotonicity(&f, z1, z2, ZERO, default_perturbation_eps(&f)).unwrap();
    assert_eq!(r.before, 8);
    assert!(r.holds, "{r:?}");
}

#[test]
fn wilmshurst_scan_reaches_all_odd_counts() {
    let k = Counter::new(&catalog::wilmshurst(3).unwrap()).unwrap();
    let s = valence_scan(&k, "wilmshurst:3", ZERO, c(40.0, 14.3), 200).unwrap();
    for n in [3, 5, 7, 9] {
        assert!(s.achieved_counts.contains(&n), "{:?} {:?}", s.achieved_counts, s.crossings);
    }
    assert!(s.crossings.iter().all(|x| !x.multiple));
}

#[test]
fn mpw_radial_scan() {
    let k = Counter::new(&catalog::mpw()).unwrap();
    let s = valence_scan(&k, "mpw", c(1e-3, 2e-3), c(10.0, 10.0), 100).unwrap();
    for n in [4, 6, 8, 10] {
        assert!(s.achieved_counts.contains(&n), "{:?} {:?}", s.achieved_counts, s.crossings);
    }
    for w in s.records.windows(2) {
        assert!((w[1].n - w[0].n).abs() <= 2);
    }
}

#[test]
fn analytic_scan_is_constant() {
    let f = HarmonicMap::polynomial(Poly::monomial(Cx::new(1.0, 0.0), 2), Poly::zero()).unwrap();
    let k = Counter::new(&f).unwrap();
    let s = valence_scan(&k, "z^2", c(0.5, 0.1), c(5.0, -3.0), 20).unwrap();
    assert_eq!(s.achieved_counts.into_iter().collect::<Vec<_>>(), vec![2]);
    assert!(s.crossings.is_empty());
}
