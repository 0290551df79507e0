//! Zero counts of harmonic polynomials along `eta`-paths, and the Hermite
//! perturbation that separates coinciding caustic arcs.

use crate::caustic::{point_at, tile_decomposition, CausticCurve, CausticTile};
use crate::counting::{brute_force_count, Counter};
use crate::critical::{bounding_box, CriticalSet};
use crate::error::{Error, Result};
use crate::mapping::HarmonicMap;
use crate::numerics::{segment_distance, Cx, Poly, I};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Image coincidence tolerance, relative to the caustic scale.
pub const COINCIDENCE_TOLERANCE: f64 = 1e-6;
/// Coinciding samples needed for an arc overlap, excluding transversal crossings.
const MIN_RUN: usize = 4;
const MAX_DETOURS: usize = 5;
const MAX_BISECTIONS: usize = 40;

/// Cubic `p` with `p(z1) = eps`, `p(z2) = -eps` and `p'(z1) = p'(z2) = 0`.
pub fn hermite_perturbation(z1: Cx, z2: Cx, eps: f64) -> Result<Poly> {
    let d = z2 - z1;
    if d.norm() <= 1e-14 * (1.0 + z1.norm()) {
        return Err(Error::CoincidentPoints);
    }
    // eps (1 - 6u^2 + 4u^3) with u = (z - z1) / d
    let shape = Poly::from_real(&[eps, 0.0, -6.0 * eps, 4.0 * eps]);
    Ok(shape.compose_linear(1.0 / d, -z1 / d))
}

fn caustic_scale(caustics: &[CausticCurve]) -> f64 {
    bounding_box(caustics.iter().flat_map(|c| c.samples.iter().map(|s| s.w)))
        .map(|(lo, hi)| (hi - lo).norm())
        .unwrap_or(0.0)
        .max(1.0)
}

/// Piece index of sample `i`, or `None` at a vertex.
fn piece_of(set: &CriticalSet, curve: usize, i: usize) -> Option<usize> {
    let c = &set.curves[curve];
    if c.samples[i].vertex {
        return None;
    }
    c.pieces.iter().position(|p| p.start <= i && i <= p.end)
}

/// Closest point of caustic `c` to `w` near sample segment `j`, by golden
/// section in `t`; returns `(distance, z)`.
fn closest_on(f: &HarmonicMap, set: &CriticalSet, c: &CausticCurve, j: usize, w: Cx) -> Option<(f64, Cx)> {
    let omega = set.omega.as_ref()?;
    let s = &set.curves[c.source].samples;
    let (a, b) = (&s[j], &s[j + 1]);
    let dist = |t: f64| point_at(omega, a, b, t).map(|z| ((f.eval(z) - w).norm(), z));
    let (mut lo, mut hi) = (a.t, b.t);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let (x1, x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
        let (d1, d2) = (dist(x1)?.0, dist(x2)?.0);
        if d1 < d2 {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    dist(0.5 * (lo + hi))
}

/// Pairs `(z1, z2)` of critical points on different arcs with `f(z1) = f(z2)`,
/// one representative per run of at least `MIN_RUN` coinciding samples.
pub fn detect_multiple_caustic(f: &HarmonicMap, set: &CriticalSet, caustics: &[CausticCurve]) -> Vec<(Cx, Cx)> {
    let tol = COINCIDENCE_TOLERANCE * caustic_scale(caustics);
    let separation = 1e-3 * set.scale;
    let spacing = caustics
        .iter()
        .flat_map(|c| c.samples.windows(2).map(|w| (w[1].w - w[0].w).norm()))
        .fold(0.0, f64::max);
    // (curve A, piece A, curve B, piece B, sample index on A, z1, z2)
    let mut hits: Vec<(usize, usize, usize, usize, usize, Cx, Cx)> = Vec::new();
    for ca in caustics.iter().filter(|c| !c.degenerate) {
        let sa = &set.curves[ca.source].samples;
        for (i, s) in ca.samples.iter().enumerate() {
            let Some(pa) = piece_of(set, ca.source, i) else { continue };
            for cb in caustics.iter().filter(|c| !c.degenerate && c.source >= ca.source) {
                let sb = &set.curves[cb.source].samples;
                let mut best: Option<(f64, Cx, usize)> = None;
                for j in 0..cb.samples.len() - 1 {
                    let near = segment_distance(s.w, cb.samples[j].w, cb.samples[j + 1].w) <= spacing;
                    let apart = (sb[j].z - sa[i].z).norm() > separation && (sb[j + 1].z - sa[i].z).norm() > separation;
                    if !(near && apart) {
                        continue;
                    }
                    if let Some((d, z)) = closest_on(f, set, cb, j, s.w) {
                        if (z - sa[i].z).norm() > separation && best.is_none_or(|b| d < b.0) {
                            best = Some((d, z, j));
                        }
                    }
                }
                let Some((d, z2, j)) = best else { continue };
                let Some(pb) = piece_of(set, cb.source, j).or_else(|| piece_of(set, cb.source, j + 1)) else {
                    continue;
                };
                let ordered = (cb.source, pb) > (ca.source, pa)
                    || ((cb.source, pb) == (ca.source, pa) && sb[j].t > sa[i].t);
                if d <= tol && ordered {
                    hits.push((ca.source, pa, cb.source, pb, i, sa[i].z, z2));
                }
            }
        }
    }
    let mut out = Vec::new();
    let mut k = 0;
    while k < hits.len() {
        let mut end = k;
        while end + 1 < hits.len()
            && (hits[end + 1].0, hits[end + 1].1, hits[end + 1].2, hits[end + 1].3)
                == (hits[k].0, hits[k].1, hits[k].2, hits[k].3)
            && hits[end + 1].4 <= hits[end].4 + 2
        {
            end += 1;
        }
        if end - k + 1 >= MIN_RUN {
            let mid = &hits[(k + end) / 2];
            out.push((mid.5, mid.6));
        }
        k = end + 1;
    }
    out
}

/// Outcome of the zero-count monotonicity check under a Hermite perturbation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationCheck {
    pub eps: f64,
    pub before: usize,
    pub after: usize,
    /// `|f~(z1) - f~(z2)|`.
    pub separation: f64,
    pub holds: bool,
}

/// Adds the Hermite cubic for `(z1, z2)` to the analytic part, halving `eps`
/// from `eps0` until the brute-force zero count of `f~ - eta` is at least
/// that of `f - eta` or `eps < 1e-10`.
pub fn perturbation_monotonicity(f: &HarmonicMap, z1: Cx, z2: Cx, eta: Cx, eps0: f64) -> Result<PerturbationCheck> {
    let before = brute_force_count(f, eta)?;
    let mut eps = eps0;
    loop {
        let p = hermite_perturbation(z1, z2, eps)?;
        let g = f.add_analytic(&p)?;
        let after = brute_force_count(&g, eta)?;
        let separation = (g.eval(z1) - g.eval(z2)).norm();
        if after >= before || eps < 1e-10 {
            return Ok(PerturbationCheck {
                eps,
                before,
                after,
                separation,
                holds: after >= before,
            });
        }
        eps *= 0.5;
    }
}

/// Starting `eps` for the perturbation: `1e-3` of the largest coefficient.
pub fn default_perturbation_eps(f: &HarmonicMap) -> f64 {
    1e-3 * f.h().num().max_coeff().max(f.g().num().max_coeff()).max(1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub eta: Cx,
    pub n: i64,
    pub tile: Option<usize>,
    /// Waypoint moved off the straight path.
    pub detoured: bool,
}

/// Caustic crossing between two consecutive records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub from: i64,
    pub to: i64,
    pub eta: Cx,
    /// Count realized on the caustic itself, inferred from the fold theorem.
    pub inferred: Option<i64>,
    /// `|dN| > 2` at a single location: several arcs crossed at once.
    pub multiple: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValenceScan {
    pub map_id: String,
    pub path: Vec<Cx>,
    pub records: Vec<ScanRecord>,
    pub crossings: Vec<Crossing>,
    /// Counts certified by the formula off the caustics.
    pub achieved_counts: BTreeSet<i64>,
    /// Counts at crossed fold points, `min + 1` across a jump of two.
    pub inferred_counts: BTreeSet<i64>,
}

struct Scanner<'a> {
    counter: &'a Counter,
    tiles: Vec<CausticTile>,
    cusps: Vec<Cx>,
    clearance: f64,
}

impl Scanner<'_> {
    fn admissible(&self, eta: Cx, prev: Option<Cx>) -> bool {
        if self.counter.caustic_distance(eta) <= self.counter.margin() {
            return false;
        }
        self.cusps.iter().all(|&c| match prev {
            Some(p) => segment_distance(c, p, eta) > self.clearance,
            None => (c - eta).norm() > self.clearance,
        })
    }

    fn record(&self, eta: Cx, detoured: bool) -> Result<ScanRecord> {
        let r = self.counter.count(eta)?;
        let v: Vec<i64> = r.windings.iter().map(|w| w.1).collect();
        let tile = self.tiles.iter().find(|t| t.winding_vector == v).map(|t| t.id);
        Ok(ScanRecord { eta, n: r.n, tile, detoured })
    }

    /// Waypoint at `eta`, shifted across the path direction `dir` if needed.
    fn place(&self, eta: Cx, dir: Cx, prev: Option<Cx>) -> Result<(Cx, bool)> {
        if self.admissible(eta, prev) {
            return Ok((eta, false));
        }
        let normal = I * dir / dir.norm();
        for k in 1..=MAX_DETOURS {
            for sign in [1.0, -1.0] {
                let q = eta + normal * (sign * 2.0 * k as f64 * self.clearance);
                if self.admissible(q, prev) {
                    return Ok((q, true));
                }
            }
        }
        Err(Error::PathBlocked { attempts: MAX_DETOURS })
    }

    /// Inserts records between `a` and `b` until each step changes `N` by at most 2.
    fn resolve(&self, a: &ScanRecord, b: &ScanRecord, depth: usize, out: &mut Vec<ScanRecord>, crossings: &mut Vec<Crossing>) -> Result<()> {
        let jump = (b.n - a.n).abs();
        if jump == 0 {
            return Ok(());
        }
        let mid = (a.eta + b.eta) * 0.5;
        let placed = if jump == 2 || depth >= MAX_BISECTIONS {
            None
        } else {
            self.place(mid, b.eta - a.eta, None).ok()
        };
        let Some((mid, shifted)) = placed else {
            crossings.push(Crossing {
                from: a.n,
                to: b.n,
                eta: mid,
                inferred: (jump == 2).then(|| a.n.min(b.n) + 1),
                multiple: jump > 2,
            });
            return Ok(());
        };
        let m = self.record(mid, shifted || a.detoured || b.detoured)?;
        self.resolve(a, &m, depth + 1, out, crossings)?;
        out.push(m.clone());
        self.resolve(&m, b, depth + 1, out, crossings)
    }
}

/// Counts along the straight path `eta_start -> eta_end` sampled at `steps`
/// intervals, with detours around cusps and caustic contacts.
pub fn valence_scan(counter: &Counter, map_id: &str, eta_start: Cx, eta_end: Cx, steps: usize) -> Result<ValenceScan> {
    let tiles = tile_decomposition(counter.map(), counter.critical_set(), counter.caustics())?;
    let diag = counter.margin() * 1e3;
    let scanner = Scanner {
        counter,
        tiles,
        cusps: counter.caustics().iter().flat_map(|c| c.cusps.iter().map(|k| k.w)).collect(),
        clearance: 1e-2 * diag.max(f64::MIN_POSITIVE),
    };
    let dir = if eta_end == eta_start { Cx::new(1.0, 0.0) } else { eta_end - eta_start };
    let steps = steps.max(1);
    let mut path = Vec::with_capacity(steps + 1);
    let mut records: Vec<ScanRecord> = Vec::new();
    let mut crossings = Vec::new();
    for k in 0..=steps {
        let eta = eta_start + (eta_end - eta_start) * (k as f64 / steps as f64);
        let prev = path.last().copied();
        let (q, detoured) = scanner.place(eta, dir, prev)?;
        path.push(q);
        let rec = scanner.record(q, detoured)?;
        if let Some(last) = records.last().cloned() {
            let mut inserted = Vec::new();
            scanner.resolve(&last, &rec, 0, &mut inserted, &mut crossings)?;
            records.extend(inserted);
        }
        records.push(rec);
    }
    let achieved_counts = records.iter().map(|r| r.n).collect();
    let inferred_counts = crossings.iter().filter_map(|c| c.inferred).collect();
    Ok(ValenceScan {
        map_id: map_id.to_string(),
        path,
        records,
        crossings,
        achieved_counts,
        inferred_counts,
    })
}

#[cfg(test)]
mod tests;
