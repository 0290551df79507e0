//! Harmonic Newton iteration, multi-start pre-image solving, and the local
//! fold and cusp predictions.

mod local;

pub use local::{cusp_predict, fold_predict, CuspPrediction, FoldPrediction, CUSP_RESIDUAL_TOLERANCE};

use crate::counting::{Counter, Sense};
use crate::critical::bounding_box;
use crate::error::{Error, Result};
use crate::mapping::{pole_records, HarmonicMap, Location};
use crate::numerics::{Cx, DEFAULT_SEED, ZERO};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Relative Jacobian floor below which a step is refused.
pub const JACOBIAN_FLOOR: f64 = 1e-14;

/// One step `z - (conj(f_z) F - f_zbar conj(F)) / J` for `F = f - eta`.
pub fn newton_step(f: &HarmonicMap, z: Cx, eta: Cx) -> Result<Cx> {
    let (dz, dzbar) = f.wirtinger(z)?;
    let jac = dz.norm_sqr() - dzbar.norm_sqr();
    if jac.abs() <= JACOBIAN_FLOOR * (dz.norm_sqr() + dzbar.norm_sqr()).max(f64::MIN_POSITIVE) {
        return Err(Error::SingularJacobian { at: z });
    }
    let r = f.evaluate(z)? - eta;
    Ok(z - (dz.conj() * r - dzbar * r.conj()) / jac)
}

/// Iterates `(z_k, |f(z_k) - eta|)` starting from `z0`, stopping once the
/// residual drops below `tol` or after `max_iter` steps.
pub fn newton_iterates(f: &HarmonicMap, z0: Cx, eta: Cx, max_iter: usize, tol: f64) -> Vec<(Cx, f64)> {
    let mut out = vec![(z0, (f.eval(z0) - eta).norm())];
    let mut z = z0;
    for _ in 0..max_iter {
        let Ok(next) = newton_step(f, z, eta) else { break };
        z = next;
        let r = (f.eval(z) - eta).norm();
        out.push((z, r));
        if r < tol || !r.is_finite() {
            break;
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Seeds per side of the initial uniform grid.
    pub grid: usize,
    pub max_grid: usize,
    pub ring_seeds: usize,
    pub max_iter: usize,
    /// Residual tolerance relative to `max(scale, |eta|)`.
    pub tol: f64,
    /// Merge distance relative to the scale.
    pub dedupe: f64,
    /// Seed of the grid jitter.
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            grid: 40,
            max_grid: 160,
            ring_seeds: 16,
            max_iter: 80,
            tol: 1e-11,
            dedupe: 1e-7,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreImage {
    pub z: Cx,
    pub sense: Sense,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreimageReport {
    pub eta: Cx,
    pub points: Vec<PreImage>,
    /// Point count agrees with the counting formula.
    pub certified: bool,
    pub expected: Option<i64>,
    pub grid: usize,
    pub warnings: Vec<String>,
}

/// Geometry shared by all seeds of one map.
struct SeedFrame {
    center: Cx,
    half: f64,
    scale: f64,
    critical_radius: f64,
    poles: Vec<(Cx, i64, Cx)>,
}

impl SeedFrame {
    fn new(counter: &Counter) -> Result<Self> {
        let f = counter.map();
        let set = counter.critical_set();
        let pts = set
            .curves
            .iter()
            .flat_map(|c| c.samples.iter().map(|s| s.z))
            .chain(f.singular_points().iter().copied())
            .chain(set.isolated.iter().map(|p| p.z))
            .chain([Cx::new(-1.0, -1.0), Cx::new(1.0, 1.0)]);
        let (lo, hi) = bounding_box(pts).unwrap();
        let span = (hi.re - lo.re).max(hi.im - lo.im);
        let poles = pole_records(f)?
            .into_iter()
            .filter_map(|r| match r.location {
                Location::Finite(z) => Some((z, -r.basis.lead as i64, r.basis.a(r.basis.lead) + r.basis.b(r.basis.lead))),
                Location::Infinity => None,
            })
            .collect();
        Ok(SeedFrame {
            center: (lo + hi) * 0.5,
            half: 0.75 * span,
            scale: set.scale.max(f.singular_radius()).max(1.0),
            critical_radius: set.radius(),
            poles,
        })
    }

    fn ring(center: Cx, r: f64, n: usize, phase: f64) -> impl Iterator<Item = Cx> {
        (0..n).map(move |k| center + Cx::from_polar(r, phase + TAU * k as f64 / n as f64))
    }

    fn seeds(&self, counter: &Counter, eta: Cx, grid: usize, ring: usize, seed: u64) -> Vec<Cx> {
        let f = counter.map();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seeds = Vec::with_capacity(grid * grid + 64);
        let step = 2.0 * self.half / grid as f64;
        let lo = self.center - Cx::new(self.half, self.half);
        for j in 0..grid {
            for i in 0..grid {
                // slight shear keeps seeds off symmetry lines
                let jitter = Cx::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1));
                let base = Cx::new(i as f64 + 0.5 + 0.013 * j as f64, j as f64 + 0.5 + 0.017 * i as f64);
                seeds.push(lo + (base + jitter) * step);
            }
        }
        let eps = 0.01 * self.scale;
        for &(p, order, lead) in &self.poles {
            for r in [2.0 * eps, 4.0 * eps] {
                seeds.extend(Self::ring(p, r, ring, 0.1));
            }
            if order > 0 && eta != ZERO {
                let r = (lead.norm() / eta.norm()).powf(1.0 / order as f64);
                if r < self.half {
                    seeds.extend(Self::ring(p, r, ring, 0.2));
                }
            }
        }
        let r = 2.0 * self.critical_radius.max(self.half.min(self.scale));
        seeds.extend(Self::ring(ZERO, r, 2 * ring, 0.05));
        let (n, lead) = f.growth_at_infinity();
        if n >= 1 && lead != ZERO {
            let r = (eta.norm() / lead.norm()).powf(1.0 / n as f64);
            if r > self.half {
                seeds.extend(Self::ring(ZERO, r, (4 * n as usize + 8).max(ring), 0.3));
            }
        }
        seeds.extend(self.local_seeds(counter, eta));
        seeds
    }

    /// Fold and cusp predictions at critical points whose images lie close to `eta`.
    fn local_seeds(&self, counter: &Counter, eta: Cx) -> Vec<Cx> {
        let f = counter.map();
        let set = counter.critical_set();
        let mut out = Vec::new();
        for c in counter.caustics() {
            let pts = c.points();
            let Some((lo, hi)) = bounding_box(pts.iter().copied()) else { continue };
            let reach = 0.05 * (hi - lo).norm().max(1e-12);
            let d: Vec<f64> = pts.iter().map(|w| (w - eta).norm()).collect();
            for i in 1..d.len().saturating_sub(1) {
                if d[i] > reach || d[i] > d[i - 1] || d[i] > d[i + 1] {
                    continue;
                }
                let z0 = set.curves[c.source].samples[i].z;
                if let Ok(p) = fold_predict(f, z0, 1.0) {
                    let delta = d[i] / p.c_dir.norm();
                    if let Ok(p) = fold_predict(f, z0, delta) {
                        out.extend([p.w_plus, p.w_minus]);
                    }
                }
                for k in c.cusps.iter().filter(|k| (k.w - pts[i]).norm() <= reach) {
                    if let Ok(p) = cusp_predict(f, k.z, 1.0) {
                        let delta = (eta - k.w).norm() / p.c_dir.norm();
                        for s in [delta, -delta] {
                            if let Ok(q) = cusp_predict(f, k.z, s) {
                                out.push(q.w1);
                            }
                        }
                    }
                }
                out.extend(Self::ring(z0, d[i].sqrt().max(1e-6), 8, 0.0));
            }
        }
        out
    }
}

struct Converged {
    z: Cx,
    residual: f64,
    iterations: usize,
}

fn run_seed(f: &HarmonicMap, z0: Cx, eta: Cx, opts: &SolveOptions, tol: f64, guard: f64, max_step: f64) -> Option<Converged> {
    let mut z = z0;
    for k in 1..=opts.max_iter {
        let next = newton_step(f, z, eta).ok()?;
        if !(next.re.is_finite() && next.im.is_finite()) || next.norm() > guard || (next - z).norm() > max_step {
            return None;
        }
        z = next;
        let r = (f.eval(z) - eta).norm();
        if r < tol {
            // two extra steps settle the last digits
            for _ in 0..2 {
                match newton_step(f, z, eta) {
                    Ok(w) if (f.eval(w) - eta).norm() <= r => z = w,
                    _ => break,
                }
            }
            return Some(Converged {
                z,
                residual: (f.eval(z) - eta).norm(),
                iterations: k,
            });
        }
    }
    None
}

fn sense_at(f: &HarmonicMap, z: Cx) -> Sense {
    if f.jacobian_raw(z) > 0.0 {
        Sense::Preserving
    } else {
        Sense::Reversing
    }
}

fn dedupe(f: &HarmonicMap, found: Vec<Converged>, radius: f64, warnings: &mut Vec<String>) -> Vec<PreImage> {
    let mut out: Vec<PreImage> = Vec::new();
    for c in found {
        let sense = sense_at(f, c.z);
        let near = out.iter_mut().find(|p| (p.z - c.z).norm() < radius);
        match near {
            Some(p) if p.sense == sense => {
                if c.residual < p.residual {
                    *p = PreImage {
                        z: c.z,
                        sense,
                        residual: c.residual,
                        iterations: c.iterations,
                    };
                }
            }
            Some(p) => {
                warnings.push(format!("fold pair near {} suggests eta close to a caustic", p.z));
                out.push(PreImage {
                    z: c.z,
                    sense,
                    residual: c.residual,
                    iterations: c.iterations,
                });
            }
            None => out.push(PreImage {
                z: c.z,
                sense,
                residual: c.residual,
                iterations: c.iterations,
            }),
        }
    }
    out.sort_by(|a, b| a.z.re.total_cmp(&b.z.re).then(a.z.im.total_cmp(&b.z.im)));
    out
}

/// Multi-start solve certified against the counting formula; the seed grid
/// doubles up to `max_grid` while the counts disagree.
pub fn solve_with(counter: &Counter, eta: Cx, opts: &SolveOptions) -> Result<PreimageReport> {
    let f = counter.map();
    let frame = SeedFrame::new(counter)?;
    let expected = match counter.count(eta) {
        Ok(r) => Some(r.n),
        Err(Error::EtaOnCaustic { .. }) => None,
        Err(e) => return Err(e),
    };
    let tol = opts.tol * frame.scale.max(eta.norm());
    let reach = frame.scale.max(frame.half).max(eta.norm().powf(1.0 / f.growth_at_infinity().0.max(1) as f64));
    let guard = 1e3 * reach;
    let max_step = 2.0 * std::f64::consts::SQRT_2 * reach;
    let mut grid = opts.grid;
    loop {
        let seeds = frame.seeds(counter, eta, grid, opts.ring_seeds, opts.seed);
        let found: Vec<Converged> = seeds
            .par_iter()
            .filter_map(|&s| run_seed(f, s, eta, opts, tol, guard, max_step))
            .collect();
        let mut warnings = Vec::new();
        let points = dedupe(f, found, opts.dedupe * frame.scale, &mut warnings);
        let n = points.len() as i64;
        match expected {
            Some(e) if e == n => {
                return Ok(PreimageReport {
                    eta,
                    points,
                    certified: true,
                    expected,
                    grid,
                    warnings,
                })
            }
            Some(e) if grid * 2 > opts.max_grid => {
                return Err(Error::CountMismatch { found: n as usize, expected: e });
            }
            None => {
                warnings.push("eta is within the caustic margin; count not certified".into());
                return Ok(PreimageReport {
                    eta,
                    points,
                    certified: false,
                    expected,
                    grid,
                    warnings,
                });
            }
            _ => grid *= 2,
        }
    }
}

pub fn solve_preimages(f: &HarmonicMap, eta: Cx) -> Result<PreimageReport> {
    solve_with(&Counter::new(f)?, eta, &SolveOptions::default())
}
