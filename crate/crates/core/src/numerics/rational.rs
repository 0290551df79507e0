use super::poly::Poly;
use super::roots::cluster_roots;
use super::{Cx, ZERO};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Relative distance below which a numerator and denominator root are cancelled.
pub const CLUSTER_TOLERANCE: f64 = 1e-8;
/// Relative radius for grouping the spread-out roots of a multiple root.
pub const MULTIPLICITY_TOLERANCE: f64 = 1e-5;

/// Quotient of two polynomials kept in lowest terms with a monic denominator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalFn {
    num: Poly,
    den: Poly,
}

/// Result of evaluating a [`RationalFn`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RationalValue {
    Finite(Cx),
    Pole,
}

impl RationalValue {
    pub fn finite(self) -> Option<Cx> {
        match self {
            RationalValue::Finite(v) => Some(v),
            RationalValue::Pole => None,
        }
    }
}

impl From<Poly> for RationalFn {
    fn from(p: Poly) -> Self {
        RationalFn {
            num: p,
            den: Poly::one(),
        }
    }
}

impl RationalFn {
    /// Builds `num / den` and cancels common roots.
    ///
    /// Panics if `den` is the zero polynomial.
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        let mut r = RationalFn { num, den };
        r.normalize();
        r
    }

    /// Like [`RationalFn::new`] but without root cancellation; used when the
    /// caller knows the terms are coprime.
    pub fn new_unreduced(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        let mut r = RationalFn { num, den };
        r.make_monic();
        r
    }

    pub fn zero() -> Self {
        Poly::zero().into()
    }

    pub fn constant(c: Cx) -> Self {
        Poly::constant(c).into()
    }

    /// `c / (z - s)`
    pub fn simple_pole(c: Cx, s: Cx) -> Self {
        RationalFn::new_unreduced(Poly::constant(c), Poly::linear_factor(s))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Degree of numerator minus degree of denominator; `None` for zero.
    pub fn growth(&self) -> Option<i64> {
        Some(self.num.degree()? as i64 - self.den.degree().unwrap() as i64)
    }

    /// Leading coefficient ratio at infinity.
    pub fn leading(&self) -> Cx {
        self.num.leading() / self.den.leading()
    }

    fn make_monic(&mut self) {
        let lead = self.den.leading();
        if lead != Cx::new(1.0, 0.0) {
            self.num = self.num.scale(lead.inv());
            self.den = self.den.scale(lead.inv());
        }
    }

    fn normalize(&mut self) {
        self.make_monic();
        if self.num.is_zero() {
            self.den = Poly::one();
            return;
        }
        loop {
            if self.den.degree() == Some(0) || self.num.degree() == Some(0) {
                break;
            }
            let (Ok(nr), Ok(dr)) = (self.num.roots(), self.den.roots()) else {
                break;
            };
            let mut best: Option<(f64, Cx)> = None;
            for &a in &nr {
                for &b in &dr {
                    let d = (a - b).norm() / a.norm().max(b.norm()).max(1.0);
                    if best.is_none_or(|(bd, _)| d < bd) {
                        best = Some((d, (a + b) * 0.5));
                    }
                }
            }
            let Some((dist, mid)) = best else { break };
            let common = dist <= CLUSTER_TOLERANCE
                || (dist <= MULTIPLICITY_TOLERANCE
                    && self.num.eval(mid).norm() <= 1e-12 * self.num.abs_eval(mid.norm())
                    && self.den.eval(mid).norm() <= 1e-12 * self.den.abs_eval(mid.norm()));
            if !common {
                break;
            }
            self.num = self.num.deflate(mid);
            self.den = self.den.deflate(mid);
            self.make_monic();
        }
    }

    pub fn eval(&self, z: Cx) -> Result<RationalValue> {
        let n = self.num.eval(z);
        let d = self.den.eval(z);
        let r = z.norm();
        let dfloor = 1e-13 * self.den.abs_eval(r);
        let nfloor = 1e-13 * self.num.abs_eval(r);
        if d.norm() <= dfloor {
            if n.norm() <= nfloor {
                return Err(Error::Indeterminate { at: z });
            }
            return Ok(RationalValue::Pole);
        }
        Ok(RationalValue::Finite(n / d))
    }

    /// Plain quotient without pole detection; infinite or NaN at exact poles.
    pub fn eval_raw(&self, z: Cx) -> Cx {
        self.num.eval(z) / self.den.eval(z)
    }

    /// Value and derivative at a regular point.
    pub fn eval_with_derivative(&self, z: Cx) -> (Cx, Cx) {
        let (n, dn) = self.num.eval_with_derivative(z);
        let (d, dd) = self.den.eval_with_derivative(z);
        (n / d, (dn * d - n * dd) / (d * d))
    }

    pub fn derivative(&self) -> RationalFn {
        let num = self
            .num
            .derivative()
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative()));
        RationalFn::new(num, self.den.mul(&self.den))
    }

    pub fn add(&self, other: &RationalFn) -> RationalFn {
        if self.den == other.den {
            return RationalFn::new(self.num.add(&other.num), self.den.clone());
        }
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        RationalFn::new(num, self.den.mul(&other.den))
    }

    pub fn sub(&self, other: &RationalFn) -> RationalFn {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RationalFn {
        RationalFn {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn scale(&self, s: Cx) -> RationalFn {
        RationalFn::new(self.num.scale(s), self.den.clone())
    }

    pub fn mul(&self, other: &RationalFn) -> RationalFn {
        RationalFn::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    /// `self / other`; `other` must not be identically zero.
    pub fn div(&self, other: &RationalFn) -> RationalFn {
        RationalFn::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    /// Substitutes `z -> a z + b`.
    pub fn compose_linear(&self, a: Cx, b: Cx) -> RationalFn {
        RationalFn::new(self.num.compose_linear(a, b), self.den.compose_linear(a, b))
    }

    /// `r(1/w)` as a rational function of `w`.
    pub fn invert_argument(&self) -> RationalFn {
        if self.is_zero() {
            return RationalFn::zero();
        }
        let dn = self.num.degree().unwrap();
        let dd = self.den.degree().unwrap();
        let rn = self.num.reversed(dn);
        let rd = self.den.reversed(dd);
        if dd >= dn {
            RationalFn::new(rn.shift_up(dd - dn), rd)
        } else {
            RationalFn::new(rn, rd.shift_up(dn - dd))
        }
    }

    /// Denominator roots grouped by multiplicity.
    pub fn poles(&self) -> Result<Vec<(Cx, usize)>> {
        Ok(cluster_roots(&self.den.roots()?, MULTIPLICITY_TOLERANCE))
    }

    /// Laurent coefficients at `z0` for `k` in `[k_min, k_max]`.
    ///
    /// The pole order at `z0` is the number of denominator roots in a
    /// `1e-6` relative neighbourhood; a distinct root closer than `1e-4`
    /// makes the expansion ambiguous and is reported as `NotIsolated`.
    pub fn laurent_coeffs(&self, z0: Cx, k_min: i32, k_max: i32) -> Result<BTreeMap<i32, Cx>> {
        let scale = z0.norm().max(1.0);
        let mut order = 0usize;
        for r in self.den.roots()? {
            let d = (r - z0).norm() / scale;
            if d <= 1e-6 {
                order += 1;
            } else if d <= 1e-4 {
                return Err(Error::NotIsolated { at: z0 });
            }
        }
        let one = Cx::new(1.0, 0.0);
        let num = self.num.compose_linear(one, z0);
        let den = self.den.compose_linear(one, z0);
        let reduced: Vec<Cx> = den.coeffs().iter().skip(order).copied().collect();
        let mut out = BTreeMap::new();
        if k_max < k_min {
            return Ok(out);
        }
        let needed = (k_max + order as i32).max(-1) + 1;
        let series = series_divide(num.coeffs(), &reduced, needed.max(0) as usize);
        for k in k_min..=k_max {
            let idx = k + order as i32;
            let v = if idx < 0 { ZERO } else { series[idx as usize] };
            out.insert(k, v);
        }
        Ok(out)
    }
}

/// First `n` power-series coefficients of `a(u) / b(u)`, `b[0] != 0`.
fn series_divide(a: &[Cx], b: &[Cx], n: usize) -> Vec<Cx> {
    let mut s = vec![ZERO; n];
    if b.is_empty() {
        return s;
    }
    for k in 0..n {
        let mut acc = a.get(k).copied().unwrap_or(ZERO);
        for j in 1..=k.min(b.len() - 1) {
            acc -= b[j] * s[k - j];
        }
        s[k] = acc / b[0];
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn c(re: f64, im: f64) -> Cx {
        Cx::new(re, im)
    }

    fn mpw_g() -> RationalFn {
        RationalFn::new(
            Poly::monomial(c(1.0, 0.0), 2),
            Poly::from_real(&[-0.216, 0.0, 0.0, 1.0]),
        )
    }

    #[test]
    fn eval_regular_pole_and_indeterminate() {
        let r = mpw_g();
        let v = r.eval(c(1.0, 0.0)).unwrap().finite().unwrap();
        assert!((v - c(1.0 / 0.784, 0.0)).norm() < 1e-14);
        assert_eq!(r.eval(c(0.6, 0.0)).unwrap(), RationalValue::Pole);
        // (z-1)/(z-1) normalizes to 1, so z = 1 is regular afterwards
        let q = RationalFn::new(Poly::linear_factor(c(1.0, 0.0)), Poly::linear_factor(c(1.0, 0.0)));
        assert_eq!(q.num().degree(), Some(0));
        assert_eq!(q.eval(c(1.0, 0.0)).unwrap(), RationalValue::Finite(c(1.0, 0.0)));
        let raw = RationalFn::new_unreduced(Poly::linear_factor(c(1.0, 0.0)), Poly::linear_factor(c(1.0, 0.0)));
        assert!(matches!(raw.eval(c(1.0, 0.0)), Err(Error::Indeterminate { .. })));
    }

    #[test]
    fn derivative_of_reciprocal() {
        let r = RationalFn::simple_pole(c(1.0, 0.0), ZERO).derivative();
        assert_eq!(r.num().coeffs(), &[c(-1.0, 0.0)]);
        assert_eq!(r.den(), &Poly::monomial(c(1.0, 0.0), 2));
    }

    #[test]
    fn derivative_matches_central_differences() {
        let r = mpw_g();
        let dr = r.derivative();
        let pts = [c(0.1, 0.2), c(-1.3, 0.4), c(2.0, -0.5), c(0.3, -0.9), c(-0.2, -0.1)];
        for z in pts {
            let h = 1e-5;
            let fd = (r.eval_raw(z + h) - r.eval_raw(z - h)) / (2.0 * h);
            let exact = dr.eval_raw(z);
            assert!((fd - exact).norm() / exact.norm() < 1e-8, "{z}");
        }
    }

    #[test]
    fn compose_linear_shifts() {
        let r = RationalFn::simple_pole(c(1.0, 0.0), ZERO).compose_linear(c(1.0, 0.0), c(1.0, 0.0));
        assert_eq!(r.den(), &Poly::from_real(&[1.0, 1.0]));
        assert_eq!(r.num(), &Poly::one());
    }

    #[test]
    fn cancellation_of_common_root() {
        // z / z^2 -> 1 / z
        let r = RationalFn::new(Poly::monomial(c(1.0, 0.0), 1), Poly::monomial(c(1.0, 0.0), 2));
        assert_eq!(r.num(), &Poly::one());
        assert_eq!(r.den(), &Poly::monomial(c(1.0, 0.0), 1));
    }

    #[test]
    fn residue_of_simple_pole() {
        let r = mpw_g();
        let z0 = c(0.6, 0.0);
        let coeffs = r.laurent_coeffs(z0, -2, 1).unwrap();
        assert_eq!(coeffs[&-2], ZERO);
        // limit oracle: (z - z0) r(z) for z -> z0
        let eps = 1e-7;
        let limit = r.eval_raw(z0 + eps) * eps;
        assert!((coeffs[&-1] - limit).norm() < 1e-6);
        // contour oracle: (1/2 pi i) \oint r dz on |z - z0| = 0.05
        let n = 4096;
        let mut sum = ZERO;
        for k in 0..n {
            let th = TAU * k as f64 / n as f64;
            let u = Cx::from_polar(0.05, th);
            sum += r.eval_raw(z0 + u) * u * Cx::new(0.0, 1.0) * (TAU / n as f64);
        }
        let contour = sum / Cx::new(0.0, TAU);
        assert!((coeffs[&-1] - contour).norm() < 1e-10);
        assert!((coeffs[&-1] - c(1.0 / 3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn taylor_at_regular_point_matches_differences() {
        let r = mpw_g();
        let z0 = c(0.2, 0.3);
        let coeffs = r.laurent_coeffs(z0, -1, 2).unwrap();
        assert_eq!(coeffs[&-1], ZERO);
        assert!((coeffs[&0] - r.eval_raw(z0)).norm() < 1e-13);
        let h = 1e-4;
        let d1 = (r.eval_raw(z0 + h) - r.eval_raw(z0 - h)) / (2.0 * h);
        let d2 = (r.eval_raw(z0 + h) - r.eval_raw(z0) * 2.0 + r.eval_raw(z0 - h)) / (h * h);
        assert!((coeffs[&1] - d1).norm() < 1e-6);
        assert!((coeffs[&2] - d2 / 2.0).norm() < 1e-4);
    }

    #[test]
    fn reciprocal_laurent() {
        let r = RationalFn::simple_pole(c(1.0, 0.0), ZERO);
        let coeffs = r.laurent_coeffs(ZERO, -1, 1).unwrap();
        assert_eq!(coeffs[&-1], c(1.0, 0.0));
        assert_eq!(coeffs[&0], ZERO);
    }

    #[test]
    fn not_isolated_when_poles_nearly_collide() {
        let den = Poly::linear_factor(c(0.0, 0.0)).mul(&Poly::linear_factor(c(2e-5, 0.0)));
        let r = RationalFn::new(Poly::one(), den);
        assert!(matches!(r.laurent_coeffs(ZERO, -2, 0), Err(Error::NotIsolated { .. })));
    }

    #[test]
    fn inversion() {
        let r = mpw_g();
        let inv = r.invert_argument();
        let w = c(0.3, 0.1);
        assert!((inv.eval_raw(w) - r.eval_raw(w.inv())).norm() < 1e-13);
    }
}
