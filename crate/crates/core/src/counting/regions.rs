//! Components of the complement of the critical set.

use crate::critical::{bounding_box, CriticalSet};
use crate::error::{Error, Result};
use crate::mapping::{HarmonicMap, IndexRecord, Location};
use crate::numerics::{segment_distance, Cx, I};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

const RESOLUTIONS: [usize; 4] = [128, 256, 512, 1024];
const PROBES_PER_PIECE: usize = 5;
const FREE: usize = usize::MAX - 1;
const BLOCKED: usize = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Preserving,
    Reversing,
}

/// Piece `piece` of critical curve `curve`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PieceRef {
    pub curve: usize,
    pub piece: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionComponent {
    pub id: usize,
    pub sense: Sense,
    pub boundary_curve_ids: Vec<usize>,
    pub boundary_pieces: Vec<PieceRef>,
    pub is_unbounded: bool,
    /// `P(f; A)`.
    pub pole_count: i64,
    pub probe: Cx,
}

struct Raster {
    res: usize,
    lo: Cx,
    cell: f64,
    label: Vec<usize>,
}

impl Raster {
    fn center(&self, c: usize) -> Cx {
        let (i, j) = (c % self.res, c / self.res);
        self.lo + Cx::new((i as f64 + 0.5) * self.cell, (j as f64 + 0.5) * self.cell)
    }

    fn cell_of(&self, p: Cx) -> Option<usize> {
        let x = ((p.re - self.lo.re) / self.cell).floor();
        let y = ((p.im - self.lo.im) / self.cell).floor();
        let r = self.res as f64;
        (x >= 0.0 && y >= 0.0 && x < r && y < r).then(|| y as usize * self.res + x as usize)
    }

    fn label_at(&self, p: Cx) -> Option<usize> {
        self.cell_of(p).map(|c| self.label[c]).filter(|&l| l != BLOCKED)
    }

    fn build(polys: &[Vec<Cx>], lo: Cx, size: f64, res: usize) -> Raster {
        let cell = size / res as f64;
        let reach = 0.75 * cell;
        let mut label = vec![FREE; res * res];
        let to_cell = |v: f64, o: f64| (((v - o) / cell).floor().max(0.0) as usize).min(res - 1);
        for poly in polys {
            for w in poly.windows(2) {
                let (a, b) = (w[0], w[1]);
                let (i0, i1) = (to_cell(a.re.min(b.re) - reach, lo.re), to_cell(a.re.max(b.re) + reach, lo.re));
                let (j0, j1) = (to_cell(a.im.min(b.im) - reach, lo.im), to_cell(a.im.max(b.im) + reach, lo.im));
                for j in j0..=j1 {
                    for i in i0..=i1 {
                        let c = j * res + i;
                        if label[c] == FREE {
                            let p = lo + Cx::new((i as f64 + 0.5) * cell, (j as f64 + 0.5) * cell);
                            if segment_distance(p, a, b) <= reach {
                                label[c] = BLOCKED;
                            }
                        }
                    }
                }
            }
        }
        let mut raster = Raster { res, lo, cell, label };
        raster.fill();
        raster
    }

    fn neighbours(&self, c: usize) -> impl Iterator<Item = usize> {
        let res = self.res;
        let (i, j) = (c % res, c / res);
        [
            (i > 0).then(|| c - 1),
            (i + 1 < res).then(|| c + 1),
            (j > 0).then(|| c - res),
            (j + 1 < res).then(|| c + res),
        ]
        .into_iter()
        .flatten()
    }

    /// Labels free cells by 4-connected component; the border component is `0`.
    fn fill(&mut self) {
        let res = self.res;
        let mut next = 1;
        let border = (0..res).flat_map(|k| [k, (res - 1) * res + k, k * res, k * res + res - 1]);
        let starts: Vec<usize> = border.chain(0..res * res).collect();
        let mut border_done = false;
        for (n, start) in starts.into_iter().enumerate() {
            if n == 4 * res {
                border_done = true;
            }
            if self.label[start] != FREE {
                continue;
            }
            let id = if border_done { next } else { 0 };
            if border_done {
                next += 1;
            }
            self.label[start] = id;
            let mut queue = VecDeque::from([start]);
            while let Some(c) = queue.pop_front() {
                let nbrs: Vec<usize> = self.neighbours(c).collect();
                for m in nbrs {
                    if self.label[m] == FREE {
                        self.label[m] = id;
                        queue.push_back(m);
                    }
                }
            }
        }
    }

    /// Label of the first free cell met when stepping from `p` along `dir`.
    fn march(&self, p: Cx, dir: Cx) -> Option<(usize, Cx)> {
        (1..=8).find_map(|k| {
            let q = p + dir * (0.5 * k as f64 * self.cell);
            self.label_at(q).map(|l| (l, q))
        })
    }

    fn nearest_label(&self, p: Cx) -> Option<usize> {
        self.label_at(p).or_else(|| {
            (1..=4).find_map(|k| {
                (0..16).find_map(|a| {
                    let dir = Cx::from_polar(1.0, std::f64::consts::TAU * a as f64 / 16.0);
                    self.label_at(p + dir * (0.5 * k as f64 * self.cell))
                })
            })
        })
    }
}

struct Sides {
    left: usize,
    right: usize,
}

fn probe_indices(start: usize, end: usize) -> Vec<usize> {
    if end <= start + 2 {
        return vec![(start + end) / 2];
    }
    (1..=PROBES_PER_PIECE)
        .map(|k| start + 1 + (end - start - 2) * k / (PROBES_PER_PIECE + 1))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

fn piece_sides(f: &HarmonicMap, set: &CriticalSet, raster: &Raster, r: PieceRef) -> Option<Sides> {
    let curve = &set.curves[r.curve];
    let piece = curve.pieces[r.piece];
    let s = &curve.samples;
    let clear = 4.0 * raster.cell;
    let mut idx: Vec<usize> = probe_indices(piece.start, piece.end)
        .into_iter()
        .filter(|&i| !s[i].vertex && set.vertices.iter().all(|v| (v.z - s[i].z).norm() > clear))
        .collect();
    if idx.is_empty() {
        idx.push((piece.start + piece.end) / 2);
    }
    let mut sides: Option<(usize, usize)> = None;
    for i in idx {
        let (a, b) = (s[i.saturating_sub(1)].z, s[(i + 1).min(s.len() - 1)].z);
        let d = b - a;
        if d.norm() == 0.0 {
            continue;
        }
        let n = I * d / d.norm();
        let (l, ql) = raster.march(s[i].z, n)?;
        let (rt, qr) = raster.march(s[i].z, -n)?;
        if f.jacobian_raw(ql) <= 0.0 || f.jacobian_raw(qr) >= 0.0 || l == rt {
            return None;
        }
        match sides {
            None => sides = Some((l, rt)),
            Some(prev) if prev != (l, rt) => return None,
            _ => {}
        }
    }
    sides.map(|(left, right)| Sides { left, right })
}

fn attempt(
    f: &HarmonicMap,
    set: &CriticalSet,
    poles: &[IndexRecord],
    refs: &[PieceRef],
    raster: &Raster,
) -> Option<Vec<RegionComponent>> {
    let mut sense: BTreeMap<usize, Sense> = BTreeMap::from([(0, Sense::Preserving)]);
    let mut pieces: BTreeMap<usize, Vec<PieceRef>> = BTreeMap::new();
    for &r in refs {
        let sides = piece_sides(f, set, raster, r)?;
        for (label, s) in [(sides.left, Sense::Preserving), (sides.right, Sense::Reversing)] {
            if *sense.entry(label).or_insert(s) != s {
                return None;
            }
            pieces.entry(label).or_default().push(r);
        }
    }
    let mut pole_count: BTreeMap<usize, i64> = BTreeMap::new();
    for p in poles {
        let Location::Finite(z) = p.location else { continue };
        let label = raster.nearest_label(z)?;
        if !sense.contains_key(&label) {
            return None;
        }
        *pole_count.entry(label).or_default() += p.index.abs();
    }
    let mut probe: BTreeMap<usize, Cx> = BTreeMap::new();
    for c in 0..raster.label.len() {
        let l = raster.label[c];
        if l == BLOCKED || probe.contains_key(&l) || !sense.contains_key(&l) {
            continue;
        }
        let inner = raster.neighbours(c).all(|m| raster.label[m] == l);
        if inner {
            probe.insert(l, raster.center(c));
        }
    }
    Some(
        sense
            .iter()
            .enumerate()
            .map(|(id, (&label, &s))| {
                let bp = pieces.remove(&label).unwrap_or_default();
                let curves: BTreeSet<usize> = bp.iter().map(|r| r.curve).collect();
                RegionComponent {
                    id,
                    sense: s,
                    boundary_curve_ids: curves.into_iter().collect(),
                    boundary_pieces: bp,
                    is_unbounded: label == 0,
                    pole_count: pole_count.get(&label).copied().unwrap_or(0),
                    probe: probe.get(&label).copied().unwrap_or(raster.lo),
                }
            })
            .collect(),
    )
}

/// Components of `C \ crit(f)`: each critical piece bounds the sense-preserving
/// component on its left and the sense-reversing one on its right.
pub fn region_components(f: &HarmonicMap, set: &CriticalSet, poles: &[IndexRecord]) -> Result<Vec<RegionComponent>> {
    let refs: Vec<PieceRef> = set
        .curves
        .iter()
        .enumerate()
        .flat_map(|(c, cv)| (0..cv.pieces.len()).map(move |p| PieceRef { curve: c, piece: p }))
        .collect();
    let pole_pts = poles.iter().filter_map(|p| match p.location {
        Location::Finite(z) => Some(z),
        Location::Infinity => None,
    });
    let pts = set
        .curves
        .iter()
        .flat_map(|c| c.samples.iter().map(|s| s.z))
        .chain(pole_pts);
    let Some((lo, hi)) = bounding_box(pts) else {
        return Ok(vec![RegionComponent {
            id: 0,
            sense: Sense::Preserving,
            boundary_curve_ids: Vec::new(),
            boundary_pieces: Vec::new(),
            is_unbounded: true,
            pole_count: 0,
            probe: Cx::new(0.0, 0.0),
        }]);
    };
    let span = (hi.re - lo.re).max(hi.im - lo.im).max(1e-3 * set.scale);
    let half = 0.75 * span;
    let center = (lo + hi) * 0.5;
    let box_lo = center - Cx::new(half, half);
    let polys: Vec<Vec<Cx>> = set.curves.iter().map(|c| c.points()).collect();
    for res in RESOLUTIONS {
        let raster = Raster::build(&polys, box_lo, 2.0 * half, res);
        if let Some(found) = attempt(f, set, poles, &refs, &raster) {
            return Ok(found);
        }
    }
    Err(Error::DegenerateMap(
        "critical pieces could not be assigned to components".into(),
    ))
}
