use super::*;
use crate::mapping::catalog;
use crate::numerics::Poly;

fn c(re: f64, im: f64) -> Cx {
    Cx::new(re, im)
}

#[test]
fn mpw_golden_counts() {
    let k = Counter::new(&catalog::mpw()).unwrap();
    let r = k.count(ZERO).unwrap();
    assert_eq!((r.winding_sum(), r.p, r.ind_infinity, r.n), (3, 3, -1, 10));
    let mut w: Vec<i64> = r.windings.iter().map(|w| w.1).collect();
    w.sort();
    assert_eq!(w, vec![1, 2]);
    let r = k.count(c(10.0, 10.0)).unwrap();
    assert_eq!((r.winding_sum(), r.n), (0, 4));
}

#[test]
fn wilmshurst_origin_has_n_squared() {
    let r = count_preimages(&catalog::wilmshurst(3).unwrap(), ZERO).unwrap();
    assert_eq!(r.n, 9);
}

#[test]
fn eta_on_caustic_is_refused() {
    let k = Counter::new(&catalog::mpw()).unwrap();
    let w = k.caustics()[0].samples[10].w;
    assert!(matches!(k.count(w), Err(Error::EtaOnCaustic { .. })));
}

#[test]
fn degenerate_map_is_refused() {
    let f = HarmonicMap::polynomial(Poly::from_real(&[0.0, 1.0]), Poly::from_real(&[0.0, 0.0, 1.0])).unwrap();
    assert!(matches!(Counter::new(&f), Err(Error::DegenerateMap(_))));
}

#[test]
fn component_counts_sum_to_formula() {
    for key in catalog::KEYS {
        let k = Counter::new(&catalog::by_key(key).unwrap()).unwrap();
        let comps = k.components().unwrap();
        assert_eq!(comps.iter().filter(|a| a.is_unbounded).count(), 1, "{key}");
        let outer = comps.iter().find(|a| a.is_unbounded).unwrap();
        assert_eq!(outer.sense, Sense::Preserving);
        assert_eq!(comps.iter().map(|a| a.pole_count).sum::<i64>(), k.pole_count());
        for eta in [c(0.013, 0.021), c(0.31, -0.17), c(5.0, 4.0)] {
            let Ok(total) = k.count(eta) else { continue };
            let parts: Vec<i64> = comps.iter().map(|a| k.count_in_component(eta, a).unwrap()).collect();
            assert!(parts.iter().all(|&n| n >= 0), "{key}: {parts:?}");
            assert_eq!(parts.iter().sum::<i64>(), total.n, "{key} at {eta}");
        }
    }
}

#[test]
fn mpw_components_and_senses() {
    let k = Counter::new(&catalog::mpw()).unwrap();
    let comps = k.components().unwrap();
    for a in comps {
        let jac = k.map().jacobian_raw(a.probe);
        assert_eq!(jac > 0.0, a.sense == Sense::Preserving, "{a:?}");
    }
    let zero_parts: Vec<i64> = comps.iter().map(|a| k.count_in_component(ZERO, a).unwrap()).collect();
    assert_eq!(zero_parts.iter().sum::<i64>(), 10);
}

#[test]
fn component_without_poles_away_from_image_is_empty() {
    let k = Counter::new(&catalog::nexp()).unwrap();
    let comps = k.components().unwrap();
    let inner = comps.iter().find(|a| !a.is_unbounded).unwrap();
    assert_eq!(inner.pole_count, 0);
    assert_eq!(k.count_in_component(c(40.0, 40.0), inner).unwrap(), 0);
}

#[test]
fn relative_count_steps_by_two() {
    let k = Counter::new(&catalog::mpw()).unwrap();
    let far = c(10.0, 10.0);
    assert_eq!(k.relative_count(far, c(10.5, 9.0), 4).unwrap(), 4);
    assert_eq!(k.relative_count(far, ZERO, 4).unwrap(), 10);
}

#[test]
fn large_eta_mpw_and_log() {
    let f = catalog::mpw();
    let loc = large_eta_localization(&f, c(1e6, 3e5), 0.05).unwrap();
    let poles: Vec<i64> = loc
        .iter()
        .filter(|l| matches!(l.region, LocalRegion::PoleDisk { .. }))
        .map(|l| l.expected)
        .collect();
    assert_eq!(poles, vec![1, 1, 1]);
    assert_eq!(loc.iter().map(|l| l.expected).sum::<i64>(), 4);

    let f = catalog::log_example();
    let loc = large_eta_localization(&f, c(-2e6, 1e6), 0.05).unwrap();
    let exterior = loc.iter().find(|l| matches!(l.region, LocalRegion::Exterior { .. })).unwrap();
    assert_eq!(exterior.expected, 2);
    assert_eq!(loc.iter().map(|l| l.expected).sum::<i64>(), 4);

    assert!(matches!(
        large_eta_localization(&catalog::mpw(), c(1.0, 0.0), 0.05),
        Err(Error::EtaTooSmall { .. })
    ));
}

#[test]
fn large_eta_polynomial_all_near_infinity() {
    let f = catalog::wilmshurst(3).unwrap();
    let loc = large_eta_localization(&f, c(1e9, 0.0), 0.01).unwrap();
    assert_eq!(loc.len(), 2);
    assert_eq!(loc[0].expected, 3);
}

#[test]
fn oracle_agrees_on_golden_values() {
    let mpw = catalog::mpw();
    assert_eq!(brute_force_count(&mpw, ZERO).unwrap(), 10);
    assert_eq!(brute_force_count(&mpw, c(10.0, 10.0)).unwrap(), 4);
    let w3 = catalog::wilmshurst(3).unwrap();
    let zeros = brute_force_zeros(&w3, ZERO, &OracleOptions::default()).unwrap();
    assert_eq!(zeros.len(), 9);
    assert!(zeros.iter().all(|z| z.polished));
    let identity = HarmonicMap::polynomial(Poly::from_real(&[0.0, 1.0]), Poly::zero()).unwrap();
    let z = brute_force_zeros(&identity, c(0.3, -0.2), &OracleOptions::default()).unwrap();
    assert_eq!(z.len(), 1);
    assert!((z[0].z - c(0.3, -0.2)).norm() < 1e-12);
}

#[test]
fn oracle_index_sum_matches_argument_principle() {
    // sum of zero indices = W on a large circle = -ind(f - eta; inf) - sum of pole indices
    let f = catalog::log_example();
    let eta = c(0.2, 0.1);
    let zeros = brute_force_zeros(&f, eta, &OracleOptions::default()).unwrap();
    let idx: i64 = zeros.iter().map(|z| z.index).sum();
    let poles: i64 = pole_records(&f).unwrap().iter().map(|r| r.index).sum();
    let inf = index_at_infinity(&f, eta).unwrap().index;
    assert_eq!(idx + poles + inf, 0);
}

