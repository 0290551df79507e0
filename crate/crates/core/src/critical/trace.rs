//! Predictor-corrector continuation along `omega(z) = e^{it}`.

use super::omega::Omega;
use super::{CriticalOptions, CurveSample, Vertex};
use crate::error::{Error, Result};
use crate::numerics::{Cx, I};
use std::f64::consts::TAU;

/// Largest tangent turn accepted in one step.
const MAX_TURN: f64 = 0.4;
/// `|omega'|` below this along a Jordan curve means a branch point was hit.
const BRANCH_DERIVATIVE: f64 = 1e-7;
/// A Jordan curve closes when it returns this close (relative) to its seed.
const CLOSE_TOLERANCE: f64 = 1e-6;
const MAX_TURNS: f64 = 512.0;

#[derive(Clone, Copy, Debug)]
struct State {
    t: f64,
    z: Cx,
    h: f64,
    tangent: Cx,
}

/// A traced piece between two vertices.
#[derive(Clone, Debug)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub samples: Vec<CurveSample>,
}

pub struct Tracer<'a> {
    pub omega: &'a Omega,
    pub vertices: &'a [Vertex],
    pub opts: &'a CriticalOptions,
    pub scale: f64,
}

fn wrap(x: f64) -> f64 {
    x - TAU * (x / TAU).round()
}

impl Tracer<'_> {
    fn spatial_cap(&self, z: Cx) -> f64 {
        let mut cap = self.opts.spatial_step * self.scale;
        for v in self.vertices {
            cap = cap.min(0.5 * (z - v.z).norm());
        }
        cap
    }

    fn step(&self, s: &mut State) -> Result<usize> {
        let mut h = s.h;
        let floor = 1e-15 * (1.0 + s.t.abs());
        loop {
            let speed = s.tangent.norm();
            let dt = h.min(self.spatial_cap(s.z) / speed);
            if !(dt > floor) {
                return Err(Error::HitBranchPoint { at: s.z });
            }
            let ds = speed * dt;
            let pred = s.z + s.tangent * dt;
            if let Some((z1, iters)) = self.omega.correct(pred, s.t + dt) {
                let tan1 = self.omega.tangent(z1);
                let turn = (tan1 / s.tangent).arg().abs();
                if tan1.is_finite() && (z1 - pred).norm() <= 0.25 * ds && turn < MAX_TURN {
                    s.t += dt;
                    s.z = z1;
                    s.tangent = tan1;
                    s.h = if iters <= 3 {
                        (h * 1.3).min(self.opts.max_dt)
                    } else {
                        h
                    };
                    return Ok(iters);
                }
            }
            h = dt * 0.5;
        }
    }

    /// Radius of the excluded disk around a vertex.
    pub fn vertex_radius(&self, v: &Vertex) -> f64 {
        let k = v.order as f64;
        (self.opts.branch_radius * self.scale).max((1e-8 / v.kappa.norm()).powf(1.0 / k))
    }

    /// Traces the `branch`-th outgoing arc of vertex `start` until it reaches a vertex.
    pub fn trace_arc(&self, start: usize, branch: usize) -> Result<Arc> {
        let v = &self.vertices[start];
        let k = v.order as f64;
        let r = self.vertex_radius(v);
        let root = (I * v.omega / v.kappa).powf(1.0 / k) * Cx::from_polar(1.0, TAU * branch as f64 / k);
        let t0 = v.t + v.kappa.norm() * r.powf(k);
        let z0 = v.z + root / root.norm() * r;
        let (z0, _) = self
            .omega
            .correct(z0, t0)
            .ok_or(Error::HitBranchPoint { at: z0 })?;
        let mut samples = vec![
            CurveSample { t: v.t, z: v.z, vertex: true },
            CurveSample { t: t0, z: z0, vertex: false },
        ];
        let mut s = State {
            t: t0,
            z: z0,
            h: self.opts.max_dt,
            tangent: self.omega.tangent(z0),
        };
        let mut left = false;
        for _ in 0..self.opts.max_steps {
            self.step(&mut s)?;
            samples.push(CurveSample { t: s.t, z: s.z, vertex: false });
            if !left && (s.z - v.z).norm() > 3.0 * r {
                left = true;
            }
            for (j, w) in self.vertices.iter().enumerate() {
                if (j != start || left) && (s.z - w.z).norm() <= 1.5 * self.vertex_radius(w) {
                    let t_end = s.t + wrap(w.t - s.t).max(1e-12);
                    samples.push(CurveSample { t: t_end, z: w.z, vertex: true });
                    return Ok(Arc { from: start, to: j, samples });
                }
            }
        }
        Err(Error::MaxSteps { steps: self.opts.max_steps })
    }

    /// Traces a closed curve through `seed`, where `omega(seed) = e^{i t_seed}`.
    pub fn trace_closed(&self, seed: Cx, t_seed: f64) -> Result<Vec<CurveSample>> {
        let (_, dw) = self.omega.eval(seed);
        if dw.norm() < BRANCH_DERIVATIVE {
            return Err(Error::HitBranchPoint { at: seed });
        }
        let mut samples = vec![CurveSample { t: t_seed, z: seed, vertex: false }];
        let mut s = State {
            t: t_seed,
            z: seed,
            h: self.opts.max_dt,
            tangent: self.omega.tangent(seed),
        };
        let mut turns = 0.0;
        for _ in 0..self.opts.max_steps {
            let prev = s;
            self.step(&mut s)?;
            if self.omega.eval(s.z).1.norm() < BRANCH_DERIVATIVE
                || self
                    .vertices
                    .iter()
                    .any(|v| (s.z - v.z).norm() <= 3.0 * self.vertex_radius(v))
            {
                return Err(Error::HitBranchPoint { at: s.z });
            }
            let m = ((s.t - t_seed) / TAU).floor();
            if m > turns {
                turns = m;
                let tt = t_seed + TAU * m;
                let frac = (tt - prev.t) / (s.t - prev.t);
                let guess = prev.z + (s.z - prev.z) * frac;
                if let Some((zc, _)) = self.omega.correct(guess, tt) {
                    if (zc - seed).norm() <= CLOSE_TOLERANCE * self.scale {
                        samples.push(CurveSample { t: tt, z: zc, vertex: false });
                        return Ok(samples);
                    }
                }
                if turns > MAX_TURNS {
                    break;
                }
            }
            samples.push(CurveSample { t: s.t, z: s.z, vertex: false });
        }
        Err(Error::MaxSteps { steps: self.opts.max_steps })
    }

    /// Points of the sampled piece where `t = t_u (mod 2 pi)`, corrected onto the curve.
    pub fn phase_points(&self, samples: &[CurveSample], t_u: f64) -> Vec<Cx> {
        let mut out = Vec::new();
        for w in samples.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a.vertex || b.vertex {
                continue;
            }
            let mut j = ((a.t - t_u) / TAU).floor() + 1.0;
            while t_u + TAU * j <= b.t {
                let tt = t_u + TAU * j;
                let frac = (tt - a.t) / (b.t - a.t);
                let guess = a.z + (b.z - a.z) * frac;
                if let Some((z, _)) = self.omega.correct(guess, tt) {
                    out.push(z);
                }
                j += 1.0;
            }
        }
        out
    }

    /// Point on the curve at parameter `t` between two neighbouring samples.
    pub fn point_between(&self, a: &CurveSample, b: &CurveSample, t: f64) -> Option<Cx> {
        let frac = (t - a.t) / (b.t - a.t);
        let guess = a.z + (b.z - a.z) * frac;
        if a.vertex || b.vertex {
            return Some(guess);
        }
        self.omega.correct(guess, t).map(|(z, _)| z)
    }
}
