//! Simultaneous root finding by the Aberth–Ehrlich iteration.

use super::poly::Poly;
use super::{Cx, ZERO};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

pub const MAX_DEGREE: usize = 64;
pub const DEFAULT_MAX_ITERATIONS: usize = 1000;
pub const DEFAULT_SEED: u64 = 42;
const RESTART_EVERY: usize = 150;

/// Settings for [`Poly::roots_with`].
#[derive(Clone, Copy, Debug)]
pub struct RootOptions {
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            max_iterations: DEFAULT_MAX_ITERATIONS,
            seed: DEFAULT_SEED,
        }
    }
}

impl Poly {
    /// All complex roots with multiplicity.
    pub fn roots(&self) -> Result<Vec<Cx>> {
        self.roots_with(RootOptions::default())
    }

    pub fn roots_with(&self, opts: RootOptions) -> Result<Vec<Cx>> {
        let Some(degree) = self.degree() else {
            return Ok(Vec::new());
        };
        if degree > MAX_DEGREE {
            return Err(Error::DegreeTooLarge {
                degree,
                max: MAX_DEGREE,
            });
        }
        let zeros = self.trailing_zeros();
        let mut roots = vec![ZERO; zeros];
        let reduced = Poly::new(self.coeffs()[zeros..].to_vec());
        match reduced.degree() {
            Some(0) | None => {}
            Some(1) => {
                let c = reduced.coeffs();
                roots.push(-c[0] / c[1]);
            }
            Some(_) => roots.extend(aberth(&reduced, opts)?),
        }
        Ok(roots)
    }
}

fn converged(p: &Poly, z: Cx) -> bool {
    let r = z.norm();
    p.eval(z).norm() <= 8.0 * f64::EPSILON * p.abs_eval(r)
}

fn initial_guesses(p: &Poly, rng: &mut ChaCha8Rng) -> Vec<Cx> {
    let n = p.degree().unwrap();
    let c = p.coeffs();
    let lead = c[n].norm();
    // Fujiwara-style radius estimate
    let radius = (0..n)
        .filter(|&k| c[k].norm() > 0.0)
        .map(|k| (c[k].norm() / lead).powf(1.0 / (n - k) as f64))
        .fold(0.0, f64::max)
        .max(1e-12);
    let centroid = -c[n - 1] / (c[n] * n as f64);
    let offset: f64 = rng.gen_range(0.0..TAU);
    (0..n)
        .map(|k| {
            let angle = TAU * k as f64 / n as f64 + offset + 0.4;
            centroid + Cx::from_polar(radius, angle)
        })
        .collect()
}

fn aberth(p: &Poly, opts: RootOptions) -> Result<Vec<Cx>> {
    let n = p.degree().unwrap();
    let dp = p.derivative();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut z = initial_guesses(p, &mut rng);
    let mut done = vec![false; n];
    let scale = z.iter().map(|w| w.norm()).fold(1e-12, f64::max);

    for iteration in 1..=opts.max_iterations {
        let mut all_done = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let zi = z[i];
            let pv = p.eval(zi);
            if pv == ZERO || converged(p, zi) {
                done[i] = true;
                continue;
            }
            all_done = false;
            let ratio = pv / dp.eval(zi);
            let repulsion: Cx = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = zi - z[j];
                    if d == ZERO {
                        ZERO
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let denom = Cx::new(1.0, 0.0) - ratio * repulsion;
            let step = if denom.is_finite() && denom != ZERO && ratio.is_finite() {
                ratio / denom
            } else {
                Cx::from_polar(1e-3 * scale, rng.gen_range(0.0..TAU))
            };
            z[i] = zi - step;
            if step.norm() <= f64::EPSILON * zi.norm().max(f64::MIN_POSITIVE) {
                done[i] = true;
            }
        }
        if all_done {
            polish(p, &dp, &mut z);
            return Ok(z);
        }
        if iteration % RESTART_EVERY == 0 {
            for i in (0..n).filter(|&i| !done[i]) {
                let kick = Cx::from_polar(1e-3 * scale.max(z[i].norm()), rng.gen_range(0.0..TAU));
                z[i] += kick;
            }
        }
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iterations,
    })
}

/// Two Newton steps per root, kept only when they reduce the residual.
fn polish(p: &Poly, dp: &Poly, z: &mut [Cx]) {
    for zi in z.iter_mut() {
        for _ in 0..2 {
            let pv = p.eval(*zi);
            let d = dp.eval(*zi);
            if d == ZERO {
                break;
            }
            let cand = *zi - pv / d;
            if p.eval(cand).norm() < pv.norm() {
                *zi = cand;
            } else {
                break;
            }
        }
    }
}

/// Groups roots lying within `rel_tol * max(1, |r|)` of each other; returns centroids with counts.
pub fn cluster_roots(roots: &[Cx], rel_tol: f64) -> Vec<(Cx, usize)> {
    let mut groups: Vec<(Cx, usize)> = Vec::new();
    for &r in roots {
        let tol = rel_tol * r.norm().max(1.0);
        match groups
            .iter_mut()
            .find(|(c, _)| (*c - r).norm() <= tol.max(rel_tol * c.norm()))
        {
            Some((c, m)) => {
                *c = (*c * *m as f64 + r) / (*m as f64 + 1.0);
                *m += 1;
            }
            None => groups.push((r, 1)),
        }
    }
    groups
}
