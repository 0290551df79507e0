//! The harmonic mapping data model: evaluation, Wirtinger derivatives,
//! dilatation, local expansions and Poincaré indices.

pub mod catalog;
mod expansion;
mod index;
pub mod spec_file;

pub use expansion::LocalExpansion;
pub use spec_file::{load_map, parse_map, MapSpec};
pub use index::{
    classify_singularity, index_at_infinity, is_non_degenerate, pole_index, pole_records,
    total_pole_index, zero_index, IndexKind, IndexRecord, Location, NonDegeneracyReport,
    SingularityKind, INDEX_TIE_TOLERANCE,
};

use crate::error::{Error, Result};
use crate::numerics::{cluster_roots, Cx, Poly, RationalFn, MAX_DEGREE, ZERO};
use serde::{Deserialize, Serialize};

/// Distance below which a point counts as sitting on a singularity.
pub const SINGULARITY_RADIUS: f64 = 1e-12;

/// `c * log|z - s|`
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogTerm {
    pub s: Cx,
    pub c: Cx,
}

/// `f(z) = h(z) + conj(g(z)) + sum_j c_j log|z - s_j|` with rational `h`, `g`.
#[derive(Clone, Debug)]
pub struct HarmonicMap {
    h: RationalFn,
    g: RationalFn,
    logs: Vec<LogTerm>,
    dh: RationalFn,
    dg: RationalFn,
    singular: Vec<Cx>,
}

impl HarmonicMap {
    pub fn new(h: RationalFn, g: RationalFn, logs: Vec<LogTerm>) -> Result<Self> {
        for (name, r) in [("h", &h), ("g", &g)] {
            for p in [r.num(), r.den()] {
                if let Some(d) = p.degree() {
                    if d > MAX_DEGREE {
                        return Err(Error::InvalidSpec(format!(
                            "{name} has degree {d} > {MAX_DEGREE}"
                        )));
                    }
                }
            }
        }
        let logs: Vec<LogTerm> = logs.into_iter().filter(|t| t.c != ZERO).collect();
        for (i, a) in logs.iter().enumerate() {
            if !(a.s.is_finite() && a.c.is_finite()) {
                return Err(Error::InvalidSpec("non-finite log term".into()));
            }
            if logs[..i].iter().any(|b| (a.s - b.s).norm() <= SINGULARITY_RADIUS) {
                return Err(Error::InvalidSpec(format!(
                    "duplicate log anchor at {}",
                    a.s
                )));
            }
        }
        let mut pts: Vec<Cx> = Vec::new();
        for r in [&h, &g] {
            pts.extend(r.den().roots()?);
        }
        pts.extend(logs.iter().map(|t| t.s));
        let singular = cluster_roots(&pts, 1e-6).into_iter().map(|(z, _)| z).collect();
        Ok(HarmonicMap {
            dh: h.derivative(),
            dg: g.derivative(),
            h,
            g,
            logs,
            singular,
        })
    }

    /// Harmonic polynomial `p(z) + conj(q(z))`.
    pub fn polynomial(p: Poly, q: Poly) -> Result<Self> {
        HarmonicMap::new(p.into(), q.into(), Vec::new())
    }

    pub fn h(&self) -> &RationalFn {
        &self.h
    }

    pub fn g(&self) -> &RationalFn {
        &self.g
    }

    pub fn logs(&self) -> &[LogTerm] {
        &self.logs
    }

    /// Poles of `h` or `g` and log anchors, merged.
    pub fn singular_points(&self) -> &[Cx] {
        &self.singular
    }

    pub fn is_polynomial(&self) -> bool {
        self.logs.is_empty() && self.h.den().degree() == Some(0) && self.g.den().degree() == Some(0)
    }

    fn check_regular(&self, z: Cx) -> Result<()> {
        if !z.is_finite() {
            return Err(Error::AtSingularity { at: z });
        }
        if self
            .singular
            .iter()
            .any(|s| (z - s).norm() <= SINGULARITY_RADIUS * (1.0 + s.norm()))
        {
            return Err(Error::AtSingularity { at: z });
        }
        Ok(())
    }

    pub fn evaluate(&self, z: Cx) -> Result<Cx> {
        self.check_regular(z)?;
        Ok(self.eval(z))
    }

    /// Evaluation without the singularity check.
    pub fn eval(&self, z: Cx) -> Cx {
        let mut v = self.h.eval_raw(z) + self.g.eval_raw(z).conj();
        for t in &self.logs {
            v += t.c * (z - t.s).norm().ln();
        }
        v
    }

    pub fn wirtinger(&self, z: Cx) -> Result<(Cx, Cx)> {
        self.check_regular(z)?;
        Ok(self.wirtinger_raw(z))
    }

    /// `(d/dz f, d/dzbar f)` without the singularity check.
    pub fn wirtinger_raw(&self, z: Cx) -> (Cx, Cx) {
        let mut dz = self.dh.eval_raw(z);
        let mut dzbar = self.dg.eval_raw(z).conj();
        for t in &self.logs {
            let u = z - t.s;
            dz += t.c / (u * 2.0);
            dzbar += t.c / (u.conj() * 2.0);
        }
        (dz, dzbar)
    }

    pub fn jacobian(&self, z: Cx) -> Result<f64> {
        let (a, b) = self.wirtinger(z)?;
        Ok(a.norm_sqr() - b.norm_sqr())
    }

    pub fn jacobian_raw(&self, z: Cx) -> f64 {
        let (a, b) = self.wirtinger_raw(z);
        a.norm_sqr() - b.norm_sqr()
    }

    /// `d/dz f` as a rational function (log terms contribute `c / (2 (z - s))`).
    pub fn analytic_derivative(&self) -> RationalFn {
        self.logs.iter().fold(self.dh.clone(), |acc, t| {
            acc.add(&RationalFn::simple_pole(t.c * 0.5, t.s))
        })
    }

    /// `conj(d/dzbar f)` as a rational function.
    pub fn coanalytic_derivative(&self) -> RationalFn {
        self.logs.iter().fold(self.dg.clone(), |acc, t| {
            acc.add(&RationalFn::simple_pole(t.c.conj() * 0.5, t.s))
        })
    }

    /// Second complex dilatation `conj(f_zbar) / f_z`.
    pub fn dilatation(&self) -> Result<RationalFn> {
        let a = self.analytic_derivative();
        if a.is_zero() {
            return Err(Error::DegenerateAnalyticPart);
        }
        Ok(self.coanalytic_derivative().div(&a))
    }

    /// `f + p` with `p` added to the analytic part.
    pub fn add_analytic(&self, p: &Poly) -> Result<HarmonicMap> {
        HarmonicMap::new(
            self.h.add(&p.clone().into()),
            self.g.clone(),
            self.logs.clone(),
        )
    }

    /// `conj(f)`, which swaps the roles of `h` and `g`.
    pub fn conjugate(&self) -> Result<HarmonicMap> {
        HarmonicMap::new(
            self.g.clone(),
            self.h.clone(),
            self.logs
                .iter()
                .map(|t| LogTerm {
                    s: t.s,
                    c: t.c.conj(),
                })
                .collect(),
        )
    }

    /// `w -> f(1/w)` expressed again as a harmonic map; the additive
    /// constant produced by the log terms is folded into `h`.
    pub fn inverted(&self) -> Result<HarmonicMap> {
        let mut h = self.h.invert_argument();
        let g = self.g.invert_argument();
        let mut logs: Vec<LogTerm> = Vec::new();
        let mut push = |s: Cx, c: Cx| {
            if let Some(t) = logs
                .iter_mut()
                .find(|t| (t.s - s).norm() <= SINGULARITY_RADIUS)
            {
                t.c += c;
            } else {
                logs.push(LogTerm { s, c });
            }
        };
        let mut constant = ZERO;
        for t in &self.logs {
            push(ZERO, -t.c);
            if t.s != ZERO {
                push(t.s.inv(), t.c);
                constant += t.c * t.s.norm().ln();
            }
        }
        logs.retain(|t| t.c.norm() > 1e-14);
        if constant != ZERO {
            h = h.add(&RationalFn::constant(constant));
        }
        HarmonicMap::new(h, g, logs)
    }

    /// Magnitude scale of the singular points (at least 1).
    pub fn singular_radius(&self) -> f64 {
        self.singular.iter().map(|z| z.norm()).fold(1.0, f64::max)
    }

    /// Polynomial growth order at infinity and the dominant leading coefficient
    /// (analytic part wins ties in degree when strictly larger in modulus).
    pub fn growth_at_infinity(&self) -> (i64, Cx) {
        let gh = self.h.growth().unwrap_or(i64::MIN);
        let gg = self.g.growth().unwrap_or(i64::MIN);
        if gh >= gg {
            (gh, self.h.leading())
        } else {
            (gg, self.g.leading())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::I;

    fn c(re: f64, im: f64) -> Cx {
        Cx::new(re, im)
    }

    #[test]
    fn evaluate_examples() {
        let nexp = catalog::nexp();
        assert!((nexp.evaluate(c(1.0, 0.0)).unwrap() - c(5.0 / 6.0, 0.0)).norm() < 1e-15);
        let mpw = catalog::mpw();
        assert!(mpw.evaluate(ZERO).unwrap().norm() < 1e-15);
        let log = catalog::log_example();
        assert!((log.evaluate(c(1.0, 0.0)).unwrap() - c(2.5, 0.0)).norm() < 1e-14);
        assert!(matches!(log.evaluate(ZERO), Err(Error::AtSingularity { .. })));
        assert!(matches!(mpw.evaluate(c(0.6, 0.0)), Err(Error::AtSingularity { .. })));
    }

    #[test]
    fn wirtinger_monomials() {
        let nexp = catalog::nexp();
        let z = c(0.7, -0.4);
        let (dz, dzbar) = nexp.wirtinger(z).unwrap();
        assert!((dz - z * z).norm() < 1e-14);
        assert!((dzbar - z.conj()).norm() < 1e-14);
        let pure = HarmonicMap::new(RationalFn::zero(), RationalFn::zero(), vec![LogTerm { s: ZERO, c: c(2.0, 0.0) }]).unwrap();
        let (dz, dzbar) = pure.wirtinger(c(1.0, 0.0)).unwrap();
        assert!((dz - 1.0).norm() < 1e-15 && (dzbar - 1.0).norm() < 1e-15);
    }

    #[test]
    fn wirtinger_matches_finite_differences() {
        let log = catalog::log_example();
        for z in [c(2.0, 0.0), c(0.4, 0.9), c(-1.7, -0.3)] {
            let h = 1e-6;
            let fx = (log.eval(z + h) - log.eval(z - h)) / (2.0 * h);
            let fy = (log.eval(z + I * h) - log.eval(z - I * h)) / (2.0 * h);
            let dz = (fx - I * fy) * 0.5;
            let dzbar = (fx + I * fy) * 0.5;
            let (a, b) = log.wirtinger(z).unwrap();
            assert!((a - dz).norm() / a.norm() < 1e-7);
            assert!((b - dzbar).norm() / b.norm() < 1e-7);
        }
    }

    #[test]
    fn jacobian_examples() {
        let nexp = catalog::nexp();
        let z = Cx::from_polar(2.0, 0.3);
        assert!((nexp.jacobian(z).unwrap() - 12.0).abs() < 1e-12);
        for k in 0..8 {
            let z = Cx::from_polar(1.0, k as f64 * 0.7);
            assert!(nexp.jacobian(z).unwrap().abs() < 1e-14);
        }
        let id = HarmonicMap::polynomial(Poly::monomial(c(1.0, 0.0), 1), Poly::zero()).unwrap();
        assert_eq!(id.jacobian(c(3.0, 4.0)).unwrap(), 1.0);
    }

    #[test]
    fn dilatation_examples() {
        let nexp = catalog::nexp();
        let w = nexp.dilatation().unwrap();
        for k in 0..6 {
            let z = Cx::from_polar(1.0, 0.9 * k as f64);
            assert!((w.eval_raw(z).norm() - 1.0).abs() < 1e-14);
            assert!((w.eval_raw(z) - z.inv()).norm() < 1e-14);
        }
        let analytic = HarmonicMap::polynomial(Poly::from_real(&[0.0, 1.0, 1.0]), Poly::zero()).unwrap();
        assert!(analytic.dilatation().unwrap().is_zero());
        let zero = HarmonicMap::polynomial(Poly::zero(), Poly::from_real(&[0.0, 1.0])).unwrap();
        assert_eq!(zero.dilatation(), Err(Error::DegenerateAnalyticPart));
    }

    #[test]
    fn jacobian_under_affine_change() {
        // J_{f o phi}(z) = J_f(phi(z)) |phi'|^2 for phi(z) = a z + b
        let f = catalog::mpw();
        let (a, b) = (c(0.8, -0.3), c(0.1, 0.2));
        let composed = HarmonicMap::new(
            f.h().compose_linear(a, b),
            f.g().compose_linear(a, b),
            Vec::new(),
        )
        .unwrap();
        for z in [c(0.3, 0.4), c(-0.9, 0.2), c(1.5, -1.1)] {
            let lhs = composed.jacobian(z).unwrap();
            let rhs = f.jacobian(a * z + b).unwrap() * a.norm_sqr();
            assert!((lhs - rhs).abs() < 1e-10 * rhs.abs().max(1.0));
        }
    }

    #[test]
    fn inversion_matches_evaluation() {
        let log = catalog::log_example();
        let inv = log.inverted().unwrap();
        for w in [c(0.2, 0.1), c(-0.3, 0.05)] {
            assert!((inv.eval(w) - log.eval(w.inv())).norm() < 1e-12);
        }
    }
}
