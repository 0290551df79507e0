use super::{Cx, ZERO};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Coefficients below this fraction of the largest coefficient are treated as exact zeros.
pub const NORMALIZATION_FLOOR: f64 = 1e-13;

/// Complex polynomial with coefficients in ascending powers.
///
/// The coefficient vector is normalized on construction: entries whose
/// magnitude falls below [`NORMALIZATION_FLOOR`] relative to the largest
/// coefficient are set to zero and trailing zeros are dropped, so the zero
/// polynomial is the empty vector.
#[derive(Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "Vec<Cx>", into = "Vec<Cx>")]
pub struct Poly {
    coeffs: Vec<Cx>,
}

impl From<Vec<Cx>> for Poly {
    fn from(coeffs: Vec<Cx>) -> Self {
        Poly::new(coeffs)
    }
}

impl From<Poly> for Vec<Cx> {
    fn from(p: Poly) -> Self {
        p.coeffs
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<Cx>) -> Self {
        let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if !(max > 0.0) || !max.is_finite() {
            if max.is_finite() {
                coeffs.clear();
            }
            return Poly { coeffs };
        }
        let floor = NORMALIZATION_FLOOR * max;
        for c in coeffs.iter_mut() {
            if c.norm() <= floor {
                *c = ZERO;
            }
        }
        while coeffs.last().is_some_and(|c| *c == ZERO) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Cx::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Cx::new(1.0, 0.0))
    }

    pub fn constant(c: Cx) -> Self {
        Poly::new(vec![c])
    }

    /// `c * z^k`
    pub fn monomial(c: Cx, k: usize) -> Self {
        let mut coeffs = vec![ZERO; k + 1];
        coeffs[k] = c;
        Poly::new(coeffs)
    }

    /// `z - r`
    pub fn linear_factor(r: Cx) -> Self {
        Poly::new(vec![-r, Cx::new(1.0, 0.0)])
    }

    pub fn coeffs(&self) -> &[Cx] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Cx {
        self.coeffs.last().copied().unwrap_or(ZERO)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Cx) -> Cx {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: Cx) -> (Cx, Cx) {
        let mut p = ZERO;
        let mut dp = ZERO;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `sum |c_i| |z|^i`, the natural scale for the rounding error of [`Poly::eval`].
    pub fn abs_eval(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[Cx], k: usize| v.get(k).copied().unwrap_or(ZERO);
        Poly::new(
            (0..n)
                .map(|k| get(&self.coeffs, k) + get(&other.coeffs, k))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, s: Cx) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, k: u32) -> Poly {
        (0..k).fold(Poly::one(), |acc, _| acc.mul(self))
    }

    /// Substitutes `z -> a z + b`.
    pub fn compose_linear(&self, a: Cx, b: Cx) -> Poly {
        let lin = Poly::new(vec![b, a]);
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, &c| acc.mul(&lin).add(&Poly::constant(c)))
    }

    /// Synthetic division by `z - r`; returns the quotient and drops the remainder.
    pub fn deflate(&self, r: Cx) -> Poly {
        let n = self.coeffs.len();
        if n <= 1 {
            return Poly::zero();
        }
        let mut q = vec![ZERO; n - 1];
        let mut acc = ZERO;
        for k in (1..n).rev() {
            acc = acc * r + self.coeffs[k];
            q[k - 1] = acc;
        }
        Poly::new(q)
    }

    /// `z^n p(1/z)` for `n >= degree`.
    pub fn reversed(&self, n: usize) -> Poly {
        let mut coeffs = vec![ZERO; n + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            coeffs[n - k] = c;
        }
        Poly::new(coeffs)
    }

    /// Multiplies by `z^k`.
    pub fn shift_up(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { coeffs }
    }

    /// Number of exactly vanishing low-order coefficients (roots at the origin).
    pub fn trailing_zeros(&self) -> usize {
        self.coeffs.iter().take_while(|c| **c == ZERO).count()
    }
}
