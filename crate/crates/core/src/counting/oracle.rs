//! Brute-force zero counting by recursive cell subdivision, independent of the
//! critical set and caustics.

use super::winding::{angle_sum_refined, turns_of};
use crate::error::{Error, Result};
use crate::mapping::{index_at_infinity, HarmonicMap};
use crate::newton::newton_step;
use crate::numerics::{Cx, ZERO};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Clone, Debug)]
pub struct OracleOptions {
    /// Smallest cell edge, relative to the search radius.
    pub min_size: f64,
    /// Boundary samples per cell edge before refinement.
    pub side_samples: usize,
    /// Cells whose edge exceeds this fraction of the box are always split.
    pub trust_size: f64,
    pub max_cells: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            min_size: 1e-6,
            side_samples: 16,
            trust_size: 1.0 / 16.0,
            max_cells: 4_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleZero {
    pub z: Cx,
    /// `+1` sense-preserving, `-1` sense-reversing.
    pub index: i64,
    /// Newton polish converged inside the cell.
    pub polished: bool,
}

#[derive(Clone, Copy)]
struct Cell {
    lo: Cx,
    size: f64,
}

impl Cell {
    fn center(&self) -> Cx {
        self.lo + Cx::new(0.5 * self.size, 0.5 * self.size)
    }

    fn contains(&self, z: Cx, slack: f64) -> bool {
        let d = z - self.lo;
        d.re >= -slack && d.im >= -slack && d.re <= self.size + slack && d.im <= self.size + slack
    }

    fn split(&self) -> [Cell; 4] {
        let h = 0.5 * self.size;
        [(0.0, 0.0), (h, 0.0), (0.0, h), (h, h)].map(|(x, y)| Cell {
            lo: self.lo + Cx::new(x, y),
            size: h,
        })
    }

    /// Point at perimeter parameter `t` in `[0, 4]`, counter-clockwise.
    fn perimeter(&self, t: f64) -> Cx {
        let s = self.size;
        let (side, frac) = ((t.floor() as usize).min(3), t - t.floor().min(3.0));
        self.lo
            + match side {
                0 => Cx::new(frac * s, 0.0),
                1 => Cx::new(s, frac * s),
                2 => Cx::new((1.0 - frac) * s, s),
                _ => Cx::new(0.0, (1.0 - frac) * s),
            }
    }
}

enum Outcome {
    Discard,
    Split,
    Zeros(Vec<OracleZero>),
}

struct Ctx<'a> {
    f: &'a HarmonicMap,
    eta: Cx,
    min_size: f64,
    trust_size: f64,
    side_samples: usize,
    scale: f64,
}

impl Ctx<'_> {
    fn winding(&self, cell: &Cell) -> Option<i64> {
        let n = 4 * self.side_samples;
        let samples: Vec<(f64, Cx)> = (0..=n)
            .map(|k| {
                let t = 4.0 * k as f64 / n as f64;
                (t, self.f.eval(cell.perimeter(t)))
            })
            .collect();
        if samples.iter().any(|s| !(s.1.re.is_finite() && s.1.im.is_finite())) {
            return None;
        }
        let eval = |t: f64, _| Some(self.f.eval(cell.perimeter(t)));
        let total = angle_sum_refined(&samples, self.eta, &eval, self.scale).ok()?;
        turns_of(total).ok()
    }

    fn polish(&self, cell: &Cell) -> Option<Cx> {
        let mut z = cell.center();
        for _ in 0..60 {
            z = newton_step(self.f, z, self.eta).ok()?;
            if !cell.contains(z, 0.5 * cell.size) {
                return None;
            }
            let r = (self.f.eval(z) - self.eta).norm();
            if r <= 1e-12 * self.scale.max(self.eta.norm()) {
                return cell.contains(z, 1e-9 * cell.size).then_some(z);
            }
        }
        None
    }

    fn unresolved(&self, cell: &Cell, w: i64) -> Outcome {
        let index = w.signum();
        Outcome::Zeros(
            (0..w.abs())
                .map(|_| OracleZero {
                    z: cell.center(),
                    index,
                    polished: false,
                })
                .collect(),
        )
    }

    fn process(&self, cell: &Cell) -> Outcome {
        let small = cell.size < self.min_size;
        let at_singularity = self
            .f
            .singular_points()
            .iter()
            .any(|&s| cell.contains(s, 1e-9 * cell.size));
        if at_singularity {
            return if small { Outcome::Discard } else { Outcome::Split };
        }
        let mut min_abs = f64::INFINITY;
        let mut lipschitz: f64 = 0.0;
        let mut signs = (false, false);
        for j in 0..5 {
            for i in 0..5 {
                let z = cell.lo + Cx::new(i as f64, j as f64) * (cell.size / 4.0);
                let (dz, dzbar) = self.f.wirtinger_raw(z);
                let v = (self.f.eval(z) - self.eta).norm();
                let jac = dz.norm_sqr() - dzbar.norm_sqr();
                if !(v.is_finite() && jac.is_finite()) {
                    return if small { Outcome::Discard } else { Outcome::Split };
                }
                min_abs = min_abs.min(v);
                lipschitz = lipschitz.max(dz.norm() + dzbar.norm());
                if jac > 0.0 {
                    signs.0 = true;
                } else {
                    signs.1 = true;
                }
            }
        }
        let trusted = cell.size <= self.trust_size;
        if trusted && min_abs > 0.5 * lipschitz * cell.size {
            return Outcome::Discard;
        }
        let uniform = signs.0 != signs.1;
        let Some(w) = self.winding(cell) else {
            return if small { Outcome::Discard } else { Outcome::Split };
        };
        if !trusted {
            return Outcome::Split;
        }
        if uniform && w == 0 {
            return Outcome::Discard;
        }
        if uniform && w.abs() == 1 {
            if let Some(z) = self.polish(cell) {
                return Outcome::Zeros(vec![OracleZero {
                    z,
                    index: w,
                    polished: true,
                }]);
            }
        }
        if small {
            return if w == 0 { Outcome::Discard } else { self.unresolved(cell, w) };
        }
        Outcome::Split
    }
}

/// Radius outside of which `f - eta` provably stays away from zero by the
/// dominance of the leading term, checked on three nested circles.
pub fn search_radius(f: &HarmonicMap, eta: Cx) -> Result<f64> {
    let (n, _) = f.growth_at_infinity();
    let base = (2.0 * f.singular_radius()).max(1.0);
    let circle = |r: f64| (0..1024).map(move |k| Cx::from_polar(r, TAU * k as f64 / 1024.0));
    let mut r = base;
    if n >= 1 {
        let lead = |p: &crate::numerics::RationalFn| if p.growth() == Some(n) { p.leading() } else { ZERO };
        let (a, b) = (lead(f.h()), lead(f.g()));
        let gap = a.norm() - b.norm();
        if gap <= 0.0 {
            return Err(Error::DegenerateMap("co-analytic part dominates at infinity".into()));
        }
        for _ in 0..80 {
            let ok = [r, 2.0 * r, 4.0 * r].into_iter().all(|rr| {
                circle(rr).all(|z| {
                    let zn = z.powi(n as i32);
                    (f.eval(z) - eta - a * zn - (b * zn).conj()).norm() <= 0.5 * gap * rr.powi(n as i32)
                })
            });
            if ok {
                return Ok(r);
            }
            r *= 2.0;
        }
    } else {
        let c = index_at_infinity(f, ZERO)?.basis.a(0);
        let gap = (c - eta).norm();
        if gap == 0.0 {
            return Err(Error::DegenerateMap("eta equals the limit at infinity".into()));
        }
        for _ in 0..80 {
            if [r, 2.0 * r, 4.0 * r]
                .into_iter()
                .all(|rr| circle(rr).all(|z| (f.eval(z) - c).norm() <= 0.5 * gap))
            {
                return Ok(r);
            }
            r *= 2.0;
        }
    }
    Err(Error::DegenerateMap("no radius isolates the zeros".into()))
}

/// Zeros of `f - eta` found by recursive subdivision of `[-R, R]^2`; a cell of
/// single Jacobian sign holds exactly `|W(f - eta; boundary)|` zeros.
pub fn brute_force_zeros(f: &HarmonicMap, eta: Cx, opts: &OracleOptions) -> Result<Vec<OracleZero>> {
    let r = search_radius(f, eta)?;
    let ctx = Ctx {
        f,
        eta,
        min_size: opts.min_size * r,
        trust_size: opts.trust_size * 2.0 * r,
        side_samples: opts.side_samples,
        scale: r.max(1.0),
    };
    // off-centre box so that cell edges avoid symmetric zero locations
    let mut cells = vec![Cell {
        lo: Cx::new(-1.0137 * r, -1.0291 * r),
        size: 2.0437 * r,
    }];
    let mut zeros = Vec::new();
    let mut visited = 0;
    while !cells.is_empty() {
        visited += cells.len();
        if visited > opts.max_cells {
            return Err(Error::OracleBudget { cells: visited });
        }
        let outcomes: Vec<(Cell, Outcome)> = cells.par_iter().map(|c| (*c, ctx.process(c))).collect();
        cells = Vec::new();
        for (c, o) in outcomes {
            match o {
                Outcome::Discard => {}
                Outcome::Split => cells.extend(c.split()),
                Outcome::Zeros(z) => zeros.extend(z),
            }
        }
    }
    Ok(zeros)
}

pub fn brute_force_count(f: &HarmonicMap, eta: Cx) -> Result<usize> {
    Ok(brute_force_zeros(f, eta, &OracleOptions::default())?.len())
}
