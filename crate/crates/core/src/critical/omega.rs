use crate::error::Result;
use crate::mapping::HarmonicMap;
use crate::numerics::{Cx, RationalFn, I, ZERO};

/// Residual tolerance of the corrector on `omega(z) = e^{it}`.
pub const CORRECTOR_TOL: f64 = 1e-11;
const CORRECTOR_ITERATIONS: usize = 12;

/// The dilatation together with its derivative.
#[derive(Clone, Debug)]
pub struct Omega {
    pub w: RationalFn,
    pub dw: RationalFn,
}

impl Omega {
    pub fn new(f: &HarmonicMap) -> Result<Self> {
        let w = f.dilatation()?;
        let dw = w.derivative();
        Ok(Omega { w, dw })
    }

    pub fn eval(&self, z: Cx) -> (Cx, Cx) {
        (self.w.eval_raw(z), self.dw.eval_raw(z))
    }

    /// `gamma'(t) = i omega / omega'`
    pub fn tangent(&self, z: Cx) -> Cx {
        let (w, dw) = self.eval(z);
        I * w / dw
    }

    /// Newton's method on `omega(z) = e^{it}`; returns the root and the iteration count.
    pub fn correct(&self, z0: Cx, t: f64) -> Option<(Cx, usize)> {
        let target = Cx::from_polar(1.0, t);
        let mut z = z0;
        for it in 0..=CORRECTOR_ITERATIONS {
            let (w, dw) = self.eval(z);
            let r = w - target;
            if !r.is_finite() {
                return None;
            }
            if r.norm() <= CORRECTOR_TOL {
                return Some((z, it));
            }
            if dw == ZERO || !dw.is_finite() {
                return None;
            }
            z -= r / dw;
        }
        None
    }
}
