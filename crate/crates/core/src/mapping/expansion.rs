use super::{HarmonicMap, SINGULARITY_RADIUS};
use crate::error::Result;
use crate::numerics::{Cx, ZERO};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Coefficients below this fraction of the largest one count as zero
/// when locating the leading order.
const LEAD_TOLERANCE: f64 = 1e-10;

/// `f(z) = sum a_k u^k + conj(sum b_k u^k) + c log|u|` with `u = z - center`.
///
/// `b_0` is always folded into `a_0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalExpansion {
    pub center: Cx,
    pub a: BTreeMap<i32, Cx>,
    pub b: BTreeMap<i32, Cx>,
    pub c: Cx,
    /// Smallest `k` with `a_k` or `b_k` nonzero; `order + 1` when none is.
    pub lead: i32,
}

impl LocalExpansion {
    pub fn a(&self, k: i32) -> Cx {
        self.a.get(&k).copied().unwrap_or(ZERO)
    }

    pub fn b(&self, k: i32) -> Cx {
        self.b.get(&k).copied().unwrap_or(ZERO)
    }

    pub fn has_log(&self) -> bool {
        self.c != ZERO
    }

    /// Evaluates the truncated expansion.
    pub fn eval(&self, z: Cx) -> Cx {
        let u = z - self.center;
        let sa: Cx = self.a.iter().map(|(&k, &v)| v * u.powi(k)).sum();
        let sb: Cx = self.b.iter().map(|(&k, &v)| v * u.powi(k)).sum();
        let log = if self.has_log() { self.c * u.norm().ln() } else { ZERO };
        sa + sb.conj() + log
    }

    fn with_lead(mut self, order: i32) -> Self {
        let big = self
            .a
            .values()
            .chain(self.b.values())
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        let floor = LEAD_TOLERANCE * big;
        for v in self.a.values_mut().chain(self.b.values_mut()) {
            if v.norm() <= floor {
                *v = ZERO;
            }
        }
        self.lead = (-order..=order)
            .find(|&k| self.a(k) != ZERO || self.b(k) != ZERO)
            .unwrap_or(order + 1);
        self
    }
}

impl HarmonicMap {
    /// Local expansion of `f - eta` at `z0`, coefficients `k` in `[-order, order]`.
    pub fn local_expansion_shifted(&self, z0: Cx, order: usize, eta: Cx) -> Result<LocalExpansion> {
        let order = order as i32;
        let mut a = self.h().laurent_coeffs(z0, -order, order)?;
        let mut b = self.g().laurent_coeffs(z0, -order, order)?;
        let mut c = ZERO;
        let radius = SINGULARITY_RADIUS * (1.0 + z0.norm());
        for t in self.logs() {
            let d = z0 - t.s;
            if d.norm() <= radius {
                c += t.c;
                continue;
            }
            // log(z - s) = log d + sum_{k>=1} (-1)^{k+1} u^k / (k d^k)
            *a.entry(0).or_insert(ZERO) += t.c * d.norm().ln();
            let mut dk = Cx::new(1.0, 0.0);
            for k in 1..=order {
                dk *= d;
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                let term = dk.inv() * (sign / k as f64);
                *a.entry(k).or_insert(ZERO) += t.c * 0.5 * term;
                *b.entry(k).or_insert(ZERO) += t.c.conj() * 0.5 * term;
            }
        }
        let b0 = b.insert(0, ZERO).unwrap_or(ZERO);
        *a.entry(0).or_insert(ZERO) += b0.conj() - eta;
        Ok(LocalExpansion {
            center: z0,
            a,
            b,
            c,
            lead: 0,
        }
        .with_lead(order))
    }

    pub fn local_expansion(&self, z0: Cx, order: usize) -> Result<LocalExpansion> {
        self.local_expansion_shifted(z0, order, ZERO)
    }
}
