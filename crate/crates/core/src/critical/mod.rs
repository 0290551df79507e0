//! The critical set: isolated points and closed critical curves
//! parametrized by `omega(gamma(t)) = e^{it}`.

mod omega;
mod stitch;
mod trace;

pub use omega::{Omega, CORRECTOR_TOL};
pub use stitch::euler_circuits;

use crate::error::{Error, Result};
use crate::mapping::{classify_singularity, HarmonicMap, SingularityKind};
use crate::numerics::{cluster_roots, polyline_distance, Cx, RationalValue, MULTIPLICITY_TOLERANCE, ZERO};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use trace::{Arc, Tracer};

/// `| |omega| - 1 |` below this puts a point on the unit level set.
pub const UNIT_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct CriticalOptions {
    pub probe_phases: usize,
    /// Vertex neighbourhood radius, relative to the curve scale.
    pub branch_radius: f64,
    pub max_steps: usize,
    pub max_dt: f64,
    /// Spatial step cap, relative to the curve scale.
    pub spatial_step: f64,
    /// Image steps are refined below `caustic diameter / image_resolution`.
    pub image_resolution: f64,
}

impl Default for CriticalOptions {
    fn default() -> Self {
        CriticalOptions {
            probe_phases: 8,
            branch_radius: 1e-5,
            max_steps: 200_000,
            max_dt: 0.1,
            spatial_step: 0.02,
            image_resolution: 500.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub t: f64,
    pub z: Cx,
    /// Sample sits exactly on a zero of `omega'`.
    pub vertex: bool,
}

/// A zero of `omega'` on the unit level set, where `2 * order` arcs meet.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub z: Cx,
    pub t: f64,
    pub omega: Cx,
    pub order: usize,
    /// Leading Taylor coefficient: `omega(z) - omega(v) ~ kappa (z - v)^order`.
    pub kappa: Cx,
}

/// Sample range `[start, end]` of a curve running between two vertices
/// (`None` for a curve without vertices).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub start: usize,
    pub end: usize,
    pub from: Option<usize>,
    pub to: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalCurve {
    pub component_id: usize,
    pub samples: Vec<CurveSample>,
    /// `(z, branching)` for every vertex on the curve.
    pub vertices: Vec<(Cx, usize)>,
    pub pieces: Vec<Piece>,
}

impl CriticalCurve {
    pub fn points(&self) -> Vec<Cx> {
        self.samples.iter().map(|s| s.z).collect()
    }

    pub fn t_span(&self) -> f64 {
        self.samples.last().unwrap().t - self.samples[0].t
    }

    /// Number of turns of `omega` along the curve.
    pub fn turns(&self) -> i64 {
        (self.t_span() / TAU).round() as i64
    }

    pub fn closed(&self) -> bool {
        true
    }

    /// Signed area enclosed by the sample polygon.
    pub fn signed_area(&self) -> f64 {
        signed_area(&self.points())
    }
}

pub fn signed_area(pts: &[Cx]) -> f64 {
    let n = pts.len();
    (0..n)
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            a.re * b.im - b.re * a.im
        })
        .sum::<f64>()
        * 0.5
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsolatedCriticalPoint {
    pub z: Cx,
    pub omega_limit_abs: f64,
}

#[derive(Clone, Debug)]
pub struct CriticalSet {
    pub curves: Vec<CriticalCurve>,
    pub isolated: Vec<IsolatedCriticalPoint>,
    pub vertices: Vec<Vertex>,
    pub scale: f64,
    pub omega: Option<Omega>,
}

impl CriticalSet {
    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    /// Bounding box `(min, max)` of the curve samples.
    pub fn bounding_box(&self) -> Option<(Cx, Cx)> {
        bounding_box(self.curves.iter().flat_map(|c| c.samples.iter().map(|s| s.z)))
    }

    /// Largest modulus of a curve sample.
    pub fn radius(&self) -> f64 {
        self.curves
            .iter()
            .flat_map(|c| c.samples.iter())
            .map(|s| s.z.norm())
            .fold(0.0, f64::max)
    }
}

pub fn bounding_box(pts: impl Iterator<Item = Cx>) -> Option<(Cx, Cx)> {
    pts.fold(None, |acc, z| match acc {
        None => Some((z, z)),
        Some((lo, hi)) => Some((
            Cx::new(lo.re.min(z.re), lo.im.min(z.im)),
            Cx::new(hi.re.max(z.re), hi.im.max(z.im)),
        )),
    })
}

fn probe_phases(n: usize) -> Vec<f64> {
    (0..n).map(|k| TAU * (k as f64 + 0.37) / n as f64).collect()
}

/// Points with `omega(z) = e^{it}` for each probe phase `t`.
fn seeds_with_phase(omega: &Omega, phases: usize) -> Result<Vec<(Cx, f64)>> {
    let (num, den) = (omega.w.num(), omega.w.den());
    let mut out = Vec::new();
    for t in probe_phases(phases) {
        let u = Cx::from_polar(1.0, t);
        for z in num.sub(&den.scale(u)).roots()? {
            if let Some((z, _)) = omega.correct(z, t) {
                if !out.iter().any(|(w, _): &(Cx, f64)| (w - z).norm() < 1e-9 * (1.0 + z.norm())) {
                    out.push((z, t));
                }
            }
        }
    }
    Ok(out)
}

fn check_dilatation(omega: &Omega) -> Result<bool> {
    let w = &omega.w;
    if w.is_zero() {
        return Ok(false);
    }
    if w.num().degree() == Some(0) && w.den().degree() == Some(0) {
        if (w.leading().norm() - 1.0).abs() <= UNIT_TOLERANCE {
            return Err(Error::DegenerateDilatation);
        }
        return Ok(false);
    }
    Ok(true)
}

/// Solutions of `omega(z) = u` over the probe phases.
pub fn critical_seeds(f: &HarmonicMap) -> Result<Vec<Cx>> {
    let omega = Omega::new(f)?;
    if !check_dilatation(&omega)? {
        return Ok(Vec::new());
    }
    Ok(seeds_with_phase(&omega, CriticalOptions::default().probe_phases)?
        .into_iter()
        .map(|(z, _)| z)
        .collect())
}

/// Zeros of `omega'` with `|omega| = 1`.
pub fn find_vertices(omega: &Omega) -> Result<Vec<Vertex>> {
    let (n, d) = (omega.w.num(), omega.w.den());
    let wprime = n.derivative().mul(d).sub(&n.mul(&d.derivative()));
    let mut out = Vec::new();
    for (z, mult) in cluster_roots(&wprime.roots()?, MULTIPLICITY_TOLERANCE) {
        let w = match omega.w.eval(z) {
            Ok(RationalValue::Finite(w)) => w,
            _ => continue,
        };
        if (w.norm() - 1.0).abs() > UNIT_TOLERANCE {
            continue;
        }
        let order = mult + 1;
        let taylor = omega.w.laurent_coeffs(z, order as i32, order as i32)?;
        let kappa = taylor[&(order as i32)];
        if kappa == ZERO {
            continue;
        }
        out.push(Vertex {
            z,
            t: w.arg(),
            omega: w / w.norm(),
            order,
            kappa,
        });
    }
    Ok(out)
}

/// Common zeros of both Wirtinger derivatives where `|omega| != 1`.
pub fn isolated_points(f: &HarmonicMap) -> Result<Vec<IsolatedCriticalPoint>> {
    let a = f.analytic_derivative();
    let b = f.coanalytic_derivative();
    if a.is_zero() {
        return Err(Error::DegenerateAnalyticPart);
    }
    let mut out = Vec::new();
    for (z, _) in cluster_roots(&a.num().roots()?, MULTIPLICITY_TOLERANCE) {
        let bn = b.num();
        if bn.eval(z).norm() > 1e-9 * bn.abs_eval(z.norm()).max(1.0) {
            continue;
        }
        let limit = if b.is_zero() {
            0.0
        } else {
            match f.dilatation()?.eval(z) {
                Ok(RationalValue::Finite(w)) => w.norm(),
                _ => f64::INFINITY,
            }
        };
        if (limit - 1.0).abs() > UNIT_TOLERANCE {
            out.push(IsolatedCriticalPoint {
                z,
                omega_limit_abs: limit,
            });
        }
    }
    Ok(out)
}

fn mark_covered(
    tracer: &Tracer,
    samples: &[CurveSample],
    seeds: &[(Cx, f64)],
    covered: &mut [bool],
    tol: f64,
) {
    let mut phases: Vec<f64> = seeds.iter().map(|s| s.1).collect();
    phases.dedup();
    for t in phases {
        let pts = tracer.phase_points(samples, t);
        for (i, (z, ts)) in seeds.iter().enumerate() {
            if *ts == t && !covered[i] && pts.iter().any(|p| (p - z).norm() <= tol) {
                covered[i] = true;
            }
        }
    }
}

fn refine(
    f: &HarmonicMap,
    tracer: &Tracer,
    samples: &[CurveSample],
    max_image: f64,
    max_space: f64,
) -> Vec<CurveSample> {
    fn split(
        f: &HarmonicMap,
        tracer: &Tracer,
        a: CurveSample,
        b: CurveSample,
        max_image: f64,
        max_space: f64,
        depth: u32,
        out: &mut Vec<CurveSample>,
    ) {
        let coarse = (f.eval(b.z) - f.eval(a.z)).norm() > max_image || (b.z - a.z).norm() > max_space;
        if depth < 24 && coarse && !(a.vertex || b.vertex) {
            let tm = 0.5 * (a.t + b.t);
            if let Some(zm) = tracer.point_between(&a, &b, tm) {
                let m = CurveSample { t: tm, z: zm, vertex: false };
                split(f, tracer, a, m, max_image, max_space, depth + 1, out);
                split(f, tracer, m, b, max_image, max_space, depth + 1, out);
                return;
            }
        }
        out.push(b);
    }
    let mut out = vec![samples[0]];
    for w in samples.windows(2) {
        split(f, tracer, w[0], w[1], max_image, max_space, 0, &mut out);
    }
    out
}

/// Traces the closed curve through `seed`; fails with `HitBranchPoint` if
/// the curve passes through a zero of `omega'`.
pub fn trace_curve(f: &HarmonicMap, seed: Cx) -> Result<CriticalCurve> {
    let omega = Omega::new(f)?;
    let vertices = find_vertices(&omega)?;
    let opts = CriticalOptions::default();
    let w = omega.w.eval_raw(seed);
    if (w.norm() - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::DegenerateMap(format!("{seed} is not on the critical set")));
    }
    let tracer = Tracer {
        omega: &omega,
        vertices: &vertices,
        opts: &opts,
        scale: seed.norm().max(1.0),
    };
    let samples = tracer.trace_closed(seed, w.arg())?;
    let end = samples.len() - 1;
    Ok(CriticalCurve {
        component_id: 0,
        samples,
        vertices: Vec::new(),
        pieces: vec![Piece { start: 0, end, from: None, to: None }],
    })
}

pub fn critical_set(f: &HarmonicMap) -> Result<CriticalSet> {
    critical_set_with(f, &CriticalOptions::default())
}

pub fn critical_set_with(f: &HarmonicMap, opts: &CriticalOptions) -> Result<CriticalSet> {
    let isolated = isolated_points(f)?;
    let omega = Omega::new(f)?;
    if !check_dilatation(&omega)? {
        return Ok(CriticalSet {
            curves: Vec::new(),
            isolated,
            vertices: Vec::new(),
            scale: 1.0,
            omega: Some(omega),
        });
    }
    for t in f.logs() {
        if classify_singularity(f, t.s)? == SingularityKind::LogPole {
            if let Ok(RationalValue::Finite(w)) = omega.w.eval(t.s) {
                if (w.norm() - 1.0).abs() <= UNIT_TOLERANCE {
                    return Err(Error::DegenerateMap(format!(
                        "critical set reaches the logarithmic pole {}",
                        t.s
                    )));
                }
            }
        }
    }
    let seeds = seeds_with_phase(&omega, opts.probe_phases)?;
    let vertices = find_vertices(&omega)?;
    let scale = seeds
        .iter()
        .map(|s| s.0.norm())
        .chain(vertices.iter().map(|v| v.z.norm()))
        .fold(1.0, f64::max);
    let tracer = Tracer {
        omega: &omega,
        vertices: &vertices,
        opts,
        scale,
    };
    let tol = 1e-6 * scale;

    let jobs: Vec<(usize, usize)> = vertices
        .iter()
        .enumerate()
        .flat_map(|(i, v)| (0..v.order).map(move |b| (i, b)))
        .collect();
    let arcs: Vec<Arc> = jobs
        .par_iter()
        .map(|&(i, b)| tracer.trace_arc(i, b))
        .collect::<Result<_>>()?;

    let mut covered: Vec<bool> = seeds
        .iter()
        .map(|(z, _)| {
            vertices
                .iter()
                .any(|v| (z - v.z).norm() <= 10.0 * tracer.vertex_radius(v))
        })
        .collect();
    for a in &arcs {
        mark_covered(&tracer, &a.samples, &seeds, &mut covered, tol);
    }
    let mut loops: Vec<Vec<CurveSample>> = Vec::new();
    for i in 0..seeds.len() {
        if covered[i] {
            continue;
        }
        let (z, t) = seeds[i];
        match tracer.trace_closed(z, t) {
            Ok(samples) => {
                covered[i] = true;
                mark_covered(&tracer, &samples, &seeds, &mut covered, tol);
                loops.push(samples);
            }
            Err(Error::HitBranchPoint { at }) => {
                let near_arc = arcs.iter().any(|a| {
                    let pts: Vec<Cx> = a.samples.iter().map(|s| s.z).collect();
                    polyline_distance(z, &pts) <= 1e-3 * scale
                });
                if !near_arc {
                    return Err(Error::HitBranchPoint { at });
                }
            }
            Err(e) => return Err(e),
        }
    }

    let images = arcs
        .iter()
        .flat_map(|a| a.samples.iter())
        .chain(loops.iter().flatten())
        .map(|s| f.eval(s.z));
    let diameter = bounding_box(images)
        .map(|(lo, hi)| (hi - lo).norm())
        .unwrap_or(0.0);
    let max_image = if diameter > 0.0 {
        diameter / opts.image_resolution
    } else {
        f64::INFINITY
    };
    let max_space = 0.01 * scale;
    let arcs: Vec<Arc> = arcs
        .into_par_iter()
        .map(|a| Arc {
            samples: refine(f, &tracer, &a.samples, max_image, max_space),
            ..a
        })
        .collect();
    let loops: Vec<Vec<CurveSample>> = loops
        .into_par_iter()
        .map(|s| refine(f, &tracer, &s, max_image, max_space))
        .collect();

    let mut curves = Vec::new();
    for circuit in euler_circuits(&stitch::arc_edges(&arcs), vertices.len())? {
        let mut samples: Vec<CurveSample> = Vec::new();
        let mut pieces = Vec::new();
        let mut on_curve: Vec<usize> = Vec::new();
        for &ai in &circuit {
            let arc = &arcs[ai];
            let start = samples.len().saturating_sub(1);
            if samples.is_empty() {
                samples.extend(arc.samples.iter().copied());
            } else {
                let last = samples.last().unwrap().t;
                let shift = TAU * ((last - arc.samples[0].t) / TAU).round();
                samples.extend(arc.samples[1..].iter().map(|s| CurveSample { t: s.t + shift, ..*s }));
            }
            pieces.push(Piece {
                start,
                end: samples.len() - 1,
                from: Some(arc.from),
                to: Some(arc.to),
            });
            for v in [arc.from, arc.to] {
                if !on_curve.contains(&v) {
                    on_curve.push(v);
                }
            }
        }
        curves.push(CriticalCurve {
            component_id: curves.len(),
            samples,
            vertices: on_curve
                .iter()
                .map(|&v| (vertices[v].z, vertices[v].order))
                .collect(),
            pieces,
        });
    }
    for samples in loops {
        let end = samples.len() - 1;
        curves.push(CriticalCurve {
            component_id: curves.len(),
            samples,
            vertices: Vec::new(),
            pieces: vec![Piece { start: 0, end, from: None, to: None }],
        });
    }
    Ok(CriticalSet {
        curves,
        isolated,
        vertices,
        scale,
        omega: Some(omega),
    })
}

#[cfg(test)]
mod tests;
