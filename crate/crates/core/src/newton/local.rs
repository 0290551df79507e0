use crate::caustic::theta_of;
use crate::error::{Error, Result};
use crate::mapping::{HarmonicMap, LocalExpansion};
use crate::numerics::{Cx, I, ZERO};
use serde::{Deserialize, Serialize};

/// Relative cusp residual separating folds from cusps.
pub const CUSP_RESIDUAL_TOLERANCE: f64 = 1e-5;

/// Pre-images of `f(z0) + delta * c_dir` near a fold point `z0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldPrediction {
    pub z0: Cx,
    pub theta: f64,
    pub c_dir: Cx,
    pub delta: f64,
    pub w_plus: Cx,
    pub w_minus: Cx,
    /// `f(z0) + delta * c_dir`, two local pre-images.
    pub eta_plus: Cx,
    /// `f(z0) - delta * c_dir`, no local pre-image.
    pub eta_minus: Cx,
}

/// Newton seed `w1` for `f(z0) + delta * c_dir` near a cusp point `z0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CuspPrediction {
    pub z0: Cx,
    pub theta: f64,
    pub c_tilde: Cx,
    pub c_dir: Cx,
    pub delta: f64,
    pub w1: Cx,
    pub eta_target: Cx,
}

struct Local {
    e: LocalExpansion,
    theta: f64,
    rot: Cx,
    c_dir: Cx,
    c_tilde: Cx,
    residual: f64,
}

fn local(f: &HarmonicMap, z0: Cx) -> Result<Local> {
    let e = f.local_expansion(z0, 2)?;
    let (a1, a2, b1, b2) = (e.a(1), e.a(2), e.b(1), e.b(2));
    if a1 == ZERO || b1 == ZERO {
        return Err(Error::DegenerateA1);
    }
    let theta = theta_of(a1, b1);
    let rot = Cx::from_polar(1.0, theta);
    let rot2 = rot * rot;
    let c_dir = -a2 * rot2 - (b2 * rot2).conj();
    let c_tilde = -(a2 / a1) * rot - ((b2 / b1) * rot).conj();
    let residual = c_tilde.im.abs() / ((a2 / a1).norm() + (b2 / b1).norm()).max(f64::MIN_POSITIVE);
    Ok(Local {
        e,
        theta,
        rot,
        c_dir,
        c_tilde,
        residual,
    })
}

/// `w+- = z0 +- i e^{i theta} sqrt(delta)` with `conj(b1) = a1 e^{2 i theta}`
/// and `c = -a2 e^{2 i theta} - conj(b2 e^{2 i theta})`.
pub fn fold_predict(f: &HarmonicMap, z0: Cx, delta: f64) -> Result<FoldPrediction> {
    let l = local(f, z0)?;
    if l.residual < CUSP_RESIDUAL_TOLERANCE || l.c_dir == ZERO {
        return Err(Error::NotAFold);
    }
    let s = I * l.rot * delta.sqrt();
    let eta = l.e.a(0);
    Ok(FoldPrediction {
        z0,
        theta: l.theta,
        c_dir: l.c_dir,
        delta,
        w_plus: z0 + s,
        w_minus: z0 - s,
        eta_plus: eta + l.c_dir * delta,
        eta_minus: eta - l.c_dir * delta,
    })
}

/// `w1 = z0 + (1 - sqrt(1 - delta c~^2)) / c~ e^{i theta}`, principal root.
pub fn cusp_predict(f: &HarmonicMap, z0: Cx, delta: f64) -> Result<CuspPrediction> {
    let l = local(f, z0)?;
    if l.residual >= CUSP_RESIDUAL_TOLERANCE {
        return Err(Error::NotACusp);
    }
    let scale = (l.e.a(2) / l.e.a(1)).norm() + (l.e.b(2) / l.e.b(1)).norm();
    if l.c_tilde.norm() <= 1e-12 * scale.max(1.0) {
        return Err(Error::DegenerateCtilde);
    }
    let ct = l.c_tilde;
    let w1 = z0 + (1.0 - (1.0 - ct * ct * delta).sqrt()) / ct * l.rot;
    Ok(CuspPrediction {
        z0,
        theta: l.theta,
        c_tilde: ct,
        c_dir: l.c_dir,
        delta,
        w1,
        eta_target: l.e.a(0) + l.c_dir * delta,
    })
}
