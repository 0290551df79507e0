//! Caustics `f o gamma`, their tangents, folds and cusps, and the caustic
//! tiles of the `eta`-plane.

mod tiles;

pub use tiles::{tile_decomposition, tile_decomposition_with, CausticTile, TileOptions, TileShape};

use crate::critical::{bounding_box, CriticalCurve, CriticalSet, CurveSample, Omega};
use crate::counting::winding::{angle_sum_refined, curve_scale, distance_to_closed, winding_number_refined};
use crate::error::{Error, Result};
use crate::mapping::HarmonicMap;
use crate::numerics::{Cx, I, ZERO};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Bisection tolerance in `t` for cusp location.
pub const CUSP_T_TOLERANCE: f64 = 1e-9;
/// `|psi|` below this is excluded from the curvature check.
pub const PSI_FLOOR: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CausticSample {
    pub t: f64,
    pub w: Cx,
    /// `NaN` at vertices of the critical curve.
    pub tau: Cx,
    pub psi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cusp {
    pub t: f64,
    pub z: Cx,
    pub w: Cx,
    /// Relative residual of `Im(a2/a1 e^{i theta} + conj(b2/b1 e^{i theta})) = 0`.
    pub condition_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CausticCurve {
    pub source: usize,
    pub samples: Vec<CausticSample>,
    pub cusps: Vec<Cusp>,
    /// Parameters where `psi` touches zero without changing sign.
    pub touch_points: Vec<f64>,
    /// `psi` vanishes identically and the caustic is a single point.
    pub degenerate: bool,
}

impl CausticCurve {
    pub fn points(&self) -> Vec<Cx> {
        self.samples.iter().map(|s| s.w).collect()
    }

    pub fn distance(&self, eta: Cx) -> f64 {
        distance_to_closed(&self.points(), eta)
    }
}

/// `(tau, psi)` at a regular point `z` of the curve with parameter `t`.
pub fn tangent_data(f: &HarmonicMap, omega: &Omega, z: Cx, t: f64) -> (Cx, f64) {
    let (dz, dzbar) = f.wirtinger_raw(z);
    let g = omega.tangent(z);
    let tau = dz * g + dzbar * g.conj();
    let psi = 2.0 * (Cx::from_polar(1.0, t / 2.0) * dz * g).re;
    (tau, psi)
}

pub(crate) fn point_at(omega: &Omega, a: &CurveSample, b: &CurveSample, t: f64) -> Option<Cx> {
    let frac = (t - a.t) / (b.t - a.t);
    let guess = a.z + (b.z - a.z) * frac;
    if a.vertex || b.vertex {
        return Some(guess);
    }
    omega.correct(guess, t).map(|(z, _)| z)
}

/// Relative residual of the cusp condition at `z`.
pub fn cusp_condition_residual(f: &HarmonicMap, z: Cx) -> Result<f64> {
    let e = f.local_expansion(z, 2)?;
    let (a1, a2, b1, b2) = (e.a(1), e.a(2), e.b(1), e.b(2));
    if a1 == ZERO || b1 == ZERO {
        return Err(Error::DegenerateA1);
    }
    let theta = theta_of(a1, b1);
    let e1 = Cx::from_polar(1.0, theta);
    let x = a2 / a1 * e1 + (b2 / b1 * e1).conj();
    Ok(x.im.abs() / ((a2 / a1).norm() + (b2 / b1).norm()).max(1e-300))
}

/// `theta` in `[0, pi)` with `conj(b1) = a1 e^{2 i theta}`.
pub fn theta_of(a1: Cx, b1: Cx) -> f64 {
    let two_theta = (b1.conj() / a1).arg();
    (two_theta / 2.0).rem_euclid(std::f64::consts::PI)
}

pub fn caustic_from_curve(f: &HarmonicMap, omega: &Omega, curve: &CriticalCurve) -> Result<CausticCurve> {
    let nan = Cx::new(f64::NAN, f64::NAN);
    let mut samples = Vec::with_capacity(curve.samples.len());
    for s in &curve.samples {
        let w = f
            .evaluate(s.z)
            .map_err(|_| Error::SingularSample { at: s.z })?;
        let (tau, psi) = if s.vertex {
            (nan, f64::NAN)
        } else {
            tangent_data(f, omega, s.z, s.t)
        };
        samples.push(CausticSample { t: s.t, w, tau, psi });
    }
    let pts: Vec<Cx> = samples.iter().map(|s| s.w).collect();
    let diameter = bounding_box(pts.iter().copied())
        .map(|(lo, hi)| (hi - lo).norm())
        .unwrap_or(0.0);
    let degenerate = diameter <= 1e-12 * (1.0 + pts[0].norm());
    let mut cusps = Vec::new();
    let mut touch_points = Vec::new();
    if !degenerate {
        let psi_at = |a: &CurveSample, b: &CurveSample, t: f64| -> Option<(Cx, f64)> {
            let z = point_at(omega, a, b, t)?;
            Some((z, tangent_data(f, omega, z, t).1))
        };
        let psi_max = samples
            .iter()
            .filter(|s| s.psi.is_finite())
            .map(|s| s.psi.abs())
            .fold(0.0, f64::max);
        for i in 0..samples.len() - 1 {
            let (p, q) = (samples[i].psi, samples[i + 1].psi);
            if !(p.is_finite() && q.is_finite()) {
                continue;
            }
            let (ca, cb) = (&curve.samples[i], &curve.samples[i + 1]);
            if p == 0.0 || p.signum() != q.signum() {
                let (mut lo, mut hi, mut plo) = (ca.t, cb.t, p);
                let mut z = ca.z;
                while hi - lo > CUSP_T_TOLERANCE {
                    let mid = 0.5 * (lo + hi);
                    let Some((zm, pm)) = psi_at(ca, cb, mid) else { break };
                    z = zm;
                    if pm.signum() == plo.signum() && pm != 0.0 {
                        lo = mid;
                        plo = pm;
                    } else {
                        hi = mid;
                    }
                }
                let t = 0.5 * (lo + hi);
                if let Some((zc, _)) = psi_at(ca, cb, t) {
                    z = zc;
                }
                cusps.push(Cusp {
                    t,
                    z,
                    w: f.eval(z),
                    condition_residual: cusp_condition_residual(f, z).unwrap_or(f64::NAN),
                });
            } else if i > 0 {
                let r = samples[i - 1].psi;
                if r.is_finite()
                    && p.abs() < r.abs()
                    && p.abs() < q.abs()
                    && p.abs() <= 1e-8 * psi_max
                {
                    touch_points.push(samples[i].t);
                }
            }
        }
    }
    Ok(CausticCurve {
        source: curve.component_id,
        samples,
        cusps,
        touch_points,
        degenerate,
    })
}

/// Caustics of all critical curves.
pub fn caustics(f: &HarmonicMap, set: &CriticalSet) -> Result<Vec<CausticCurve>> {
    let Some(omega) = set.omega.as_ref() else {
        return Ok(Vec::new());
    };
    set.curves
        .par_iter()
        .map(|c| caustic_from_curve(f, omega, c))
        .collect()
}

/// `(t, w)` of the cusps.
pub fn cusp_points(c: &CausticCurve) -> Vec<(f64, Cx)> {
    c.cusps.iter().map(|k| (k.t, k.w)).collect()
}

/// Largest deviation of the finite-difference `d/dt arg tau` from `-1/2`,
/// with central step `h`, skipping samples with `|psi| < PSI_FLOOR` or a sign
/// change of `psi` within the stencil.
pub fn curvature_check(f: &HarmonicMap, omega: &Omega, curve: &CriticalCurve, h: f64) -> f64 {
    let s = &curve.samples;
    let mut worst: f64 = 0.0;
    for i in 1..s.len().saturating_sub(1) {
        let (a, m, b) = (&s[i - 1], &s[i], &s[i + 1]);
        if a.vertex || m.vertex || b.vertex || m.t - h <= a.t || m.t + h >= b.t {
            continue;
        }
        let (Some(zl), Some(zr)) = (point_at(omega, a, m, m.t - h), point_at(omega, m, b, m.t + h)) else {
            continue;
        };
        let (tl, pl) = tangent_data(f, omega, zl, m.t - h);
        let (tr, pr) = tangent_data(f, omega, zr, m.t + h);
        let (_, pm) = tangent_data(f, omega, m.z, m.t);
        if pl.abs() < PSI_FLOOR || pr.abs() < PSI_FLOOR || pm.abs() < PSI_FLOOR {
            continue;
        }
        if pl.signum() != pm.signum() || pr.signum() != pm.signum() {
            continue;
        }
        let rate = (tr / tl).arg() / (2.0 * h);
        worst = worst.max((rate + 0.5).abs());
    }
    worst
}

/// Winding number of a caustic about `eta`, refining through the critical curve.
pub fn caustic_winding(
    f: &HarmonicMap,
    omega: &Omega,
    curve: &CriticalCurve,
    caustic: &CausticCurve,
    eta: Cx,
) -> Result<i64> {
    let samples: Vec<(f64, Cx)> = caustic.samples.iter().map(|s| (s.t, s.w)).collect();
    let eval = |t: f64, i: usize| -> Option<Cx> {
        point_at(omega, &curve.samples[i], &curve.samples[i + 1], t).map(|z| f.eval(z))
    };
    winding_number_refined(&samples, eta, &eval)
}

/// Angle swept about `eta` by the caustic over samples `start..=end`.
pub fn caustic_angle(
    f: &HarmonicMap,
    omega: &Omega,
    curve: &CriticalCurve,
    caustic: &CausticCurve,
    (start, end): (usize, usize),
    eta: Cx,
) -> Result<f64> {
    let samples: Vec<(f64, Cx)> = caustic.samples[start..=end].iter().map(|s| (s.t, s.w)).collect();
    let eval = |t: f64, i: usize| -> Option<Cx> {
        point_at(omega, &curve.samples[start + i], &curve.samples[start + i + 1], t).map(|z| f.eval(z))
    };
    angle_sum_refined(&samples, eta, &eval, curve_scale(&caustic.points()))
}

/// `n(c; eta2) - n(c; eta1)` for a segment crossing the caustic once.
pub fn crossing_delta(c: &CausticCurve, eta1: Cx, eta2: Cx) -> Result<i64> {
    let d = eta2 - eta1;
    if d.norm() == 0.0 {
        return Ok(0);
    }
    let side = |p: Cx| (d.conj() * (p - eta1)).im > 0.0;
    let mut hits = Vec::new();
    for w in c.samples.windows(2) {
        let (p, q) = (w[0].w, w[1].w);
        if side(p) == side(q) {
            continue;
        }
        let (sp, sq) = ((d.conj() * (p - eta1)).im, (d.conj() * (q - eta1)).im);
        let x = p + (q - p) * (sp / (sp - sq));
        let s = (d.conj() * (x - eta1)).re / d.norm_sqr();
        if (0.0..=1.0).contains(&s) {
            hits.push(q - p);
        }
    }
    match hits.len() {
        0 => Ok(0),
        1 => {
            let e = hits[0];
            let cross = (d.conj() * e).im / (d.norm() * e.norm());
            if cross.abs() < 1e-8 {
                return Err(Error::TangentialCrossing);
            }
            Ok(if cross > 0.0 { -1 } else { 1 })
        }
        n => Err(Error::MultipleCrossings { count: n }),
    }
}

/// Unit normal pointing to the left of the caustic tangent.
pub fn left_normal(tau: Cx) -> Cx {
    I * tau / tau.norm()
}

#[cfg(test)]
mod tests;
