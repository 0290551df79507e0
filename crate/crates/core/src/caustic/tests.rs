use super::*;
use crate::critical::critical_set;
use crate::mapping::catalog;
use crate::numerics::Poly;
use std::collections::BTreeSet;
use std::f64::consts::TAU;

fn pipeline(f: &HarmonicMap) -> (CriticalSet, Vec<CausticCurve>) {
    let set = critical_set(f).unwrap();
    let c = caustics(f, &set).unwrap();
    (set, c)
}

#[test]
fn nexp_cusp_count_matches_dense_sampling() {
    let f = catalog::nexp();
    let (_, cs) = pipeline(&f);
    assert_eq!(cs.len(), 1);
    // gamma(t) = e^{-it}; psi = Re(e^{it/2} tau) with tau by central differences
    let n = 100_000;
    let h = 1e-6;
    let psi = |t: f64| {
        let tau = (f.eval(Cx::from_polar(1.0, -(t + h))) - f.eval(Cx::from_polar(1.0, -(t - h)))) / (2.0 * h);
        (Cx::from_polar(1.0, t / 2.0) * tau).re
    };
    let mut changes = 0;
    let mut prev = psi(0.1);
    for k in 1..=n {
        let cur = psi(0.1 + TAU * k as f64 / n as f64);
        if cur.signum() != prev.signum() {
            changes += 1;
        }
        prev = cur;
    }
    assert_eq!(changes, 5);
    assert_eq!(cs[0].cusps.len(), changes);
}

#[test]
fn tangent_relation_holds_on_samples() {
    for f in [catalog::mpw(), catalog::log_example(), catalog::nexp()] {
        let (_, cs) = pipeline(&f);
        for c in &cs {
            for s in c.samples.iter().filter(|s| s.psi.is_finite()) {
                let lhs = s.tau;
                let rhs = Cx::from_polar(s.psi, -s.t / 2.0);
                assert!((lhs - rhs).norm() <= 1e-9 * lhs.norm().max(1.0));
            }
        }
    }
}

#[test]
fn curvature_law_on_catalog_caustics() {
    for key in catalog::KEYS {
        let f = catalog::by_key(key).unwrap();
        let (set, _) = pipeline(&f);
        let omega = set.omega.as_ref().unwrap();
        for curve in &set.curves {
            let dev = curvature_check(&f, omega, curve, 1e-4);
            assert!(dev < 1e-3, "{key}: {dev}");
        }
    }
}

#[test]
fn cusp_condition_holds_at_cusps() {
    for key in catalog::KEYS {
        let f = catalog::by_key(key).unwrap();
        let (_, cs) = pipeline(&f);
        for c in &cs {
            for k in &c.cusps {
                assert!(k.condition_residual < 1e-6, "{key}: {k:?}");
            }
        }
    }
}

#[test]
fn mpw_windings_about_origin() {
    let f = catalog::mpw();
    let (set, cs) = pipeline(&f);
    let omega = set.omega.as_ref().unwrap();
    let mut w: Vec<i64> = cs
        .iter()
        .map(|c| caustic_winding(&f, omega, &set.curves[c.source], c, ZERO).unwrap())
        .collect();
    w.sort();
    assert_eq!(w, vec![1, 2]);
}

fn counts(tiles: &[CausticTile]) -> BTreeSet<i64> {
    tiles.iter().map(|t| t.preimage_count).collect()
}

#[test]
fn mpw_tile_spectrum() {
    let f = catalog::mpw();
    let (set, cs) = pipeline(&f);
    let tiles = tile_decomposition(&f, &set, &cs).unwrap();
    assert_eq!(counts(&tiles), BTreeSet::from([4, 6, 8, 10]));
    let outer: Vec<_> = tiles.iter().filter(|t| t.shape == TileShape::Outer).collect();
    assert_eq!(outer.len(), 1);
    assert_eq!(outer[0].preimage_count, 4);
    assert!(outer[0].winding_vector.iter().all(|&v| v == 0));
    for t in &tiles {
        assert_eq!(t.preimage_count % 2, 0);
        for &n in &t.neighbours {
            assert_eq!((t.preimage_count - tiles[n].preimage_count).abs(), 2);
        }
    }
}

#[test]
fn log_example_tiles_and_shapes() {
    let f = catalog::log_example();
    let (set, cs) = pipeline(&f);
    let tiles = tile_decomposition(&f, &set, &cs).unwrap();
    assert_eq!(counts(&tiles), BTreeSet::from([2, 4, 6]));
    for t in &tiles {
        match t.preimage_count {
            6 => assert_eq!(t.shape, TileShape::DeltoidLike),
            2 => assert_eq!(t.shape, TileShape::CardioidLike),
            _ => {}
        }
    }
}

#[test]
fn no_caustics_single_outer_tile() {
    let f = HarmonicMap::polynomial(Poly::from_real(&[0.0, 1.0]), Poly::zero()).unwrap();
    let (set, cs) = pipeline(&f);
    let tiles = tile_decomposition(&f, &set, &cs).unwrap();
    assert_eq!(tiles.len(), 1);
    assert_eq!(tiles[0].shape, TileShape::Outer);
    assert_eq!(tiles[0].preimage_count, 1);
}

#[test]
fn crossing_delta_on_circle() {
    let samples: Vec<CausticSample> = (0..=64)
        .map(|k| {
            let t = TAU * k as f64 / 64.0;
            CausticSample { t, w: Cx::from_polar(1.0, t), tau: Cx::from_polar(1.0, t) * I, psi: 1.0 }
        })
        .collect();
    let c = CausticCurve { source: 0, samples, cusps: vec![], touch_points: vec![], degenerate: false };
    assert_eq!(crossing_delta(&c, Cx::new(2.0, 0.1), Cx::new(0.0, 0.1)).unwrap(), 1);
    assert_eq!(crossing_delta(&c, Cx::new(0.0, 0.1), Cx::new(2.0, 0.1)).unwrap(), -1);
    assert_eq!(crossing_delta(&c, Cx::new(0.3, 0.1), Cx::new(0.3, 0.1)).unwrap(), 0);
    assert!(matches!(
        crossing_delta(&c, Cx::new(-2.0, 0.1), Cx::new(2.0, 0.1)),
        Err(Error::MultipleCrossings { count: 2 })
    ));
}

#[test]
fn crossing_delta_matches_winding_difference() {
    let f = catalog::mpw();
    let (set, cs) = pipeline(&f);
    let omega = set.omega.as_ref().unwrap();
    let mut checked = 0;
    for c in &cs {
        let curve = &set.curves[c.source];
        for i in (0..c.samples.len() - 1).step_by(97) {
            let (a, b) = (c.samples[i], c.samples[i + 1]);
            if !(a.psi.is_finite() && b.psi.is_finite() && a.psi.abs() > 1e-3 && b.psi.signum() == a.psi.signum()) {
                continue;
            }
            let mid = (a.w + b.w) * 0.5;
            let n = left_normal(b.w - a.w) * 1e-4;
            let (e1, e2) = (mid - n, mid + n);
            let Ok(delta) = crossing_delta(c, e1, e2) else { continue };
            let w1 = caustic_winding(&f, omega, curve, c, e1).unwrap();
            let w2 = caustic_winding(&f, omega, curve, c, e2).unwrap();
            assert_eq!(delta, 1);
            assert_eq!(delta, w2 - w1);
            checked += 1;
        }
    }
    assert!(checked > 5);
}
