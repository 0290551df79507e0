use super::{HarmonicMap, LocalExpansion};
use crate::error::{Error, Result};
use crate::numerics::{Cx, ZERO};
use serde::{Deserialize, Serialize};

/// Relative tolerance for `|a_n| = |b_n|` ties.
pub const INDEX_TIE_TOLERANCE: f64 = 1e-9;

const EXPANSION_ORDER: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Finite(Cx),
    Infinity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexKind {
    Zero,
    Pole,
    Infinity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexRecord {
    pub location: Location,
    pub kind: IndexKind,
    pub index: i64,
    pub basis: LocalExpansion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularityKind {
    Removable,
    Pole,
    LogPole,
    Indeterminate,
}

fn tied(a: Cx, b: Cx) -> bool {
    let (x, y) = (a.norm(), b.norm());
    (x - y).abs() <= INDEX_TIE_TOLERANCE * x.max(y)
}

/// Index of an isolated zero: `+n` if `|a_n| > |b_n|`, `-n` otherwise.
pub fn zero_index(e: &LocalExpansion) -> Result<i64> {
    let n = e.lead;
    if n < 1 || e.has_log() {
        return Err(Error::IndeterminateIndex {
            detail: format!("not a zero (lead {n})"),
        });
    }
    let (a, b) = (e.a(n), e.b(n));
    if tied(a, b) {
        return Err(Error::IndeterminateIndex {
            detail: format!("|a_{n}| = |b_{n}| at {}", e.center),
        });
    }
    Ok(if a.norm() > b.norm() { n as i64 } else { -(n as i64) })
}

/// Index of a pole: `-n` if `|a_-n| > |b_-n|`, `+n` otherwise, `0` for a pure log pole.
pub fn pole_index(e: &LocalExpansion) -> Result<i64> {
    if e.lead >= 0 {
        if e.has_log() {
            return Ok(0);
        }
        return Err(Error::IndeterminateIndex {
            detail: format!("no pole at {}", e.center),
        });
    }
    let n = -e.lead;
    let (a, b) = (e.a(-n), e.b(-n));
    if tied(a, b) {
        return Err(Error::IndeterminateIndex {
            detail: format!("|a_-{n}| = |b_-{n}| at {}", e.center),
        });
    }
    Ok(if a.norm() > b.norm() { -(n as i64) } else { n as i64 })
}

pub fn classify_singularity(f: &HarmonicMap, z0: Cx) -> Result<SingularityKind> {
    let e = f.local_expansion(z0, EXPANSION_ORDER)?;
    Ok(if e.lead < 0 {
        if tied(e.a(e.lead), e.b(e.lead)) {
            SingularityKind::Indeterminate
        } else {
            SingularityKind::Pole
        }
    } else if e.has_log() {
        SingularityKind::LogPole
    } else {
        SingularityKind::Removable
    })
}

/// Index of `f - eta` at infinity, i.e. of `w -> f(1/w) - eta` at `0`.
pub fn index_at_infinity(f: &HarmonicMap, eta: Cx) -> Result<IndexRecord> {
    let inv = f.inverted()?;
    let e = inv.local_expansion_shifted(ZERO, EXPANSION_ORDER, eta)?;
    let index = if e.lead < 0 || e.has_log() {
        pole_index(&e)?
    } else if e.lead == 0 {
        0
    } else {
        zero_index(&e)?
    };
    Ok(IndexRecord {
        location: Location::Infinity,
        kind: IndexKind::Infinity,
        index,
        basis: e,
    })
}

/// One record per finite pole or log anchor of `f`.
pub fn pole_records(f: &HarmonicMap) -> Result<Vec<IndexRecord>> {
    let mut out = Vec::new();
    for &z in f.singular_points() {
        let e = f.local_expansion(z, EXPANSION_ORDER)?;
        if e.lead >= 0 && !e.has_log() {
            continue;
        }
        out.push(IndexRecord {
            location: Location::Finite(z),
            kind: IndexKind::Pole,
            index: pole_index(&e)?,
            basis: e,
        });
    }
    Ok(out)
}

/// `P(f)`: finite poles counted with the absolute values of their indices.
pub fn total_pole_index(f: &HarmonicMap) -> Result<i64> {
    Ok(pole_records(f)?.iter().map(|r| r.index.abs()).sum())
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NonDegeneracyReport {
    pub ok: bool,
    pub violations: Vec<String>,
    pub notes: Vec<String>,
}

/// Checks the standing assumptions: every singularity is a pole with a
/// well-defined index, and the analytic part dominates at infinity.
pub fn is_non_degenerate(f: &HarmonicMap) -> NonDegeneracyReport {
    let mut r = NonDegeneracyReport::default();
    if f.analytic_derivative().is_zero() {
        r.violations.push("analytic derivative vanishes identically".into());
    }
    for &z in f.singular_points() {
        match classify_singularity(f, z) {
            Ok(SingularityKind::Indeterminate) => r
                .violations
                .push(format!("pole at {z} has |a_-n| = |b_-n|")),
            Ok(SingularityKind::LogPole) => r
                .notes
                .push(format!("pure logarithmic pole at {z} has index 0")),
            Ok(_) => {}
            Err(e) => r.violations.push(format!("singularity at {z}: {e}")),
        }
    }
    match f.inverted().and_then(|inv| inv.local_expansion(ZERO, EXPANSION_ORDER)) {
        Ok(e) => {
            if e.lead < 0 {
                if e.a(e.lead).norm() <= e.b(e.lead).norm() * (1.0 + INDEX_TIE_TOLERANCE) {
                    r.violations
                        .push("co-analytic part dominates or ties at infinity".into());
                }
            } else if e.has_log() {
                r.violations
                    .push("logarithmic growth dominates at infinity".into());
            } else {
                let k = (1..=EXPANSION_ORDER as i32).find(|&k| e.a(k) != ZERO || e.b(k) != ZERO);
                match k {
                    Some(k) if e.a(k).norm() > e.b(k).norm() * (1.0 + INDEX_TIE_TOLERANCE) => {}
                    _ => r
                        .violations
                        .push("map is not sense-preserving near infinity".into()),
                }
            }
        }
        Err(e) => r.violations.push(format!("expansion at infinity: {e}")),
    }
    r.ok = r.violations.is_empty();
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::{catalog, LogTerm};
    use crate::numerics::{Poly, RationalFn};

    fn c(re: f64, im: f64) -> Cx {
        Cx::new(re, im)
    }

    #[test]
    fn zero_indices() {
        let f = HarmonicMap::polynomial(Poly::monomial(c(1.0, 0.0), 3), Poly::monomial(c(0.5, 0.0), 3)).unwrap();
        assert_eq!(zero_index(&f.local_expansion(ZERO, 6).unwrap()).unwrap(), 3);
        let g = HarmonicMap::polynomial(Poly::monomial(c(0.5, 0.0), 2), Poly::monomial(c(1.0, 0.0), 2)).unwrap();
        assert_eq!(zero_index(&g.local_expansion(ZERO, 6).unwrap()).unwrap(), -2);
        let tie = HarmonicMap::polynomial(Poly::monomial(c(1.0, 0.0), 2), Poly::monomial(c(0.0, 1.0), 2)).unwrap();
        assert!(matches!(
            zero_index(&tie.local_expansion(ZERO, 6).unwrap()),
            Err(Error::IndeterminateIndex { .. })
        ));
    }

    #[test]
    fn pole_indices() {
        let log = catalog::log_example();
        assert_eq!(classify_singularity(&log, ZERO).unwrap(), SingularityKind::Pole);
        assert_eq!(pole_index(&log.local_expansion(ZERO, 6).unwrap()).unwrap(), 1);
        assert_eq!(classify_singularity(&log, c(-1.0, 0.0)).unwrap(), SingularityKind::Pole);
        assert_eq!(total_pole_index(&log).unwrap(), 2);

        let analytic_pole = HarmonicMap::new(
            RationalFn::simple_pole(c(1.0, 0.0), ZERO),
            RationalFn::new(Poly::zero(), Poly::one()),
            Vec::new(),
        )
        .unwrap();
        assert_eq!(pole_records(&analytic_pole).unwrap()[0].index, -1);
        assert_eq!(total_pole_index(&analytic_pole).unwrap(), 1);

        let pure = HarmonicMap::new(
            RationalFn::from(Poly::monomial(c(1.0, 0.0), 1)),
            RationalFn::zero(),
            vec![LogTerm { s: c(0.5, 0.0), c: c(1.0, 0.0) }],
        )
        .unwrap();
        assert_eq!(classify_singularity(&pure, c(0.5, 0.0)).unwrap(), SingularityKind::LogPole);
        assert_eq!(total_pole_index(&pure).unwrap(), 0);
    }

    #[test]
    fn infinity_index_catalog() {
        let mpw = catalog::mpw();
        assert_eq!(index_at_infinity(&mpw, c(0.1, 0.2)).unwrap().index, -1);
        assert_eq!(total_pole_index(&mpw).unwrap(), 3);
        let log = catalog::log_example();
        assert_eq!(index_at_infinity(&log, c(3.0, 1.0)).unwrap().index, -2);
        for n in 3..=5 {
            let w = catalog::wilmshurst(n).unwrap();
            assert_eq!(index_at_infinity(&w, c(0.3, 0.0)).unwrap().index, -(n as i64));
        }
        assert_eq!(index_at_infinity(&catalog::nexp(), c(1.0, 1.0)).unwrap().index, -3);
    }

    #[test]
    fn catalog_is_non_degenerate() {
        for key in catalog::KEYS {
            let f = catalog::by_key(key).unwrap();
            let r = is_non_degenerate(&f);
            assert!(r.ok, "{key}: {:?}", r.violations);
        }
        let bad = HarmonicMap::polynomial(Poly::monomial(c(1.0, 0.0), 1), Poly::monomial(c(1.0, 0.0), 2)).unwrap();
        assert!(!is_non_degenerate(&bad).ok);
    }
}
