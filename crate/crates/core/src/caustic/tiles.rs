use super::{caustic_winding, CausticCurve};
use crate::counting::winding::{distance_to_closed, winding_number};
use crate::critical::{bounding_box, CriticalSet};
use crate::error::{Error, Result};
use crate::mapping::{index_at_infinity, total_pole_index, HarmonicMap};
use crate::numerics::{segment_distance, Cx, ZERO};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, VecDeque};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TileShape {
    DeltoidLike,
    CardioidLike,
    Mixed,
    Outer,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CausticTile {
    pub id: usize,
    pub representative: Cx,
    pub winding_vector: Vec<i64>,
    pub preimage_count: i64,
    pub shape: TileShape,
    /// Tiles sharing a single caustic arc with this one.
    pub neighbours: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct TileOptions {
    /// Grid resolutions tried in order.
    pub resolutions: Vec<usize>,
    /// Resolution accepted once the tiles are winding-consistent.
    pub min_resolution: usize,
    /// Representative clearance, relative to the caustic bounding-box diagonal.
    pub margin: f64,
}

impl Default for TileOptions {
    fn default() -> Self {
        TileOptions {
            resolutions: vec![64, 256, 1024],
            min_resolution: 256,
            margin: 1e-3,
        }
    }
}

struct Grid {
    res: usize,
    lo: Cx,
    cell: f64,
    vectors: Vec<Vec<i32>>,
    blocked: Vec<bool>,
}

impl Grid {
    fn center(&self, i: usize, j: usize) -> Cx {
        self.lo + Cx::new((i as f64 + 0.5) * self.cell, (j as f64 + 0.5) * self.cell)
    }

    fn build(polys: &[Vec<Cx>], lo: Cx, size: f64, res: usize, margin: f64) -> Grid {
        let cell = size / res as f64;
        let k = polys.len();
        let mut vectors = vec![vec![0i32; k]; res * res];
        for j in 0..res {
            let y = lo.im + (j as f64 + 0.5) * cell;
            for (c, poly) in polys.iter().enumerate() {
                let mut crossings: Vec<(f64, i32)> = Vec::new();
                let n = poly.len();
                for s in 0..n {
                    let (a, b) = (poly[s], poly[(s + 1) % n]);
                    let up = a.im <= y && b.im > y;
                    let down = b.im <= y && a.im > y;
                    if up || down {
                        let x = a.re + (y - a.im) / (b.im - a.im) * (b.re - a.re);
                        crossings.push((x, if up { 1 } else { -1 }));
                    }
                }
                crossings.sort_by(|p, q| p.0.total_cmp(&q.0));
                let mut acc = 0;
                let mut next = crossings.len();
                for i in (0..res).rev() {
                    let x = lo.re + (i as f64 + 0.5) * cell;
                    while next > 0 && crossings[next - 1].0 > x {
                        next -= 1;
                        acc += crossings[next].1;
                    }
                    vectors[j * res + i][c] = acc;
                }
            }
        }
        let mut buckets: Vec<Vec<(usize, usize)>> = vec![Vec::new(); res * res];
        let to_cell = |v: f64, o: f64| (((v - o) / cell).floor().max(0.0) as usize).min(res - 1);
        for (c, poly) in polys.iter().enumerate() {
            let n = poly.len();
            for s in 0..n {
                let (a, b) = (poly[s], poly[(s + 1) % n]);
                let (i0, i1) = (to_cell(a.re.min(b.re) - margin, lo.re), to_cell(a.re.max(b.re) + margin, lo.re));
                let (j0, j1) = (to_cell(a.im.min(b.im) - margin, lo.im), to_cell(a.im.max(b.im) + margin, lo.im));
                for j in j0..=j1 {
                    for i in i0..=i1 {
                        buckets[j * res + i].push((c, s));
                    }
                }
            }
        }
        let mut grid = Grid {
            res,
            lo,
            cell,
            vectors,
            blocked: vec![false; res * res],
        };
        for j in 0..res {
            for i in 0..res {
                let p = grid.center(i, j);
                grid.blocked[j * res + i] = buckets[j * res + i].iter().any(|&(c, s)| {
                    let poly = &polys[c];
                    segment_distance(p, poly[s], poly[(s + 1) % poly.len()]) <= margin
                });
            }
        }
        grid
    }
}

struct Group {
    cells: Vec<usize>,
    vector: Vec<i32>,
    outer: bool,
}

fn flood_fill(grid: &Grid) -> (Vec<Group>, Vec<usize>) {
    let res = grid.res;
    let mut label = vec![usize::MAX; res * res];
    let mut groups: Vec<Group> = Vec::new();
    for start in 0..res * res {
        if grid.blocked[start] || label[start] != usize::MAX {
            continue;
        }
        let id = groups.len();
        let mut cells = vec![start];
        label[start] = id;
        let mut queue = VecDeque::from([start]);
        let mut border = false;
        while let Some(c) = queue.pop_front() {
            let (i, j) = (c % res, c / res);
            if i == 0 || j == 0 || i == res - 1 || j == res - 1 {
                border = true;
            }
            let nbrs = [
                (i > 0).then(|| c - 1),
                (i + 1 < res).then(|| c + 1),
                (j > 0).then(|| c - res),
                (j + 1 < res).then(|| c + res),
            ];
            for n in nbrs.into_iter().flatten() {
                if !grid.blocked[n] && label[n] == usize::MAX && grid.vectors[n] == grid.vectors[start] {
                    label[n] = id;
                    cells.push(n);
                    queue.push_back(n);
                }
            }
        }
        let vector = grid.vectors[start].clone();
        let outer = border && vector.iter().all(|&v| v == 0);
        groups.push(Group { cells, vector, outer });
    }
    // merge all border groups with zero vector into one outer group
    let outer_ids: Vec<usize> = (0..groups.len()).filter(|&g| groups[g].outer).collect();
    if outer_ids.len() > 1 {
        let keep = outer_ids[0];
        for &g in &outer_ids[1..] {
            let cells = std::mem::take(&mut groups[g].cells);
            for &c in &cells {
                label[c] = keep;
            }
            groups[keep].cells.extend(cells);
        }
        let mut remap = vec![usize::MAX; groups.len()];
        let mut kept = Vec::new();
        for (g, grp) in groups.into_iter().enumerate() {
            if !grp.cells.is_empty() {
                remap[g] = kept.len();
                kept.push(grp);
            }
        }
        for l in label.iter_mut().filter(|l| **l != usize::MAX) {
            *l = remap[*l];
        }
        groups = kept;
    }
    (groups, label)
}

/// Group cells ordered by decreasing depth (distance from the group boundary).
fn cells_by_depth(grid: &Grid, group: &Group, label: &[usize], id: usize) -> Vec<usize> {
    let res = grid.res;
    let mut depth = vec![usize::MAX; res * res];
    let mut queue = VecDeque::new();
    for &c in &group.cells {
        let (i, j) = (c % res, c / res);
        let at_edge = i == 0 || j == 0 || i == res - 1 || j == res - 1;
        let nbrs = [
            (i > 0).then(|| c - 1),
            (i + 1 < res).then(|| c + 1),
            (j > 0).then(|| c - res),
            (j + 1 < res).then(|| c + res),
        ];
        let boundary = nbrs.into_iter().flatten().any(|n| label[n] != id) || (at_edge && !group.outer);
        if boundary {
            depth[c] = 0;
            queue.push_back(c);
        }
    }
    if queue.is_empty() {
        queue.push_back(group.cells[0]);
        depth[group.cells[0]] = 0;
    }
    while let Some(c) = queue.pop_front() {
        let (i, j) = (c % res, c / res);
        let nbrs = [
            (i > 0).then(|| c - 1),
            (i + 1 < res).then(|| c + 1),
            (j > 0).then(|| c - res),
            (j + 1 < res).then(|| c + res),
        ];
        for n in nbrs.into_iter().flatten() {
            if label[n] == id && depth[n] == usize::MAX {
                depth[n] = depth[c] + 1;
                queue.push_back(n);
            }
        }
    }
    let mut cells = group.cells.clone();
    cells.sort_by_key(|&c| std::cmp::Reverse((depth[c], usize::MAX - c)));
    cells
}

fn adjacency(grid: &Grid, groups: &[Group], label: &[usize]) -> Vec<BTreeSet<usize>> {
    let res = grid.res as isize;
    let mut adj = vec![BTreeSet::new(); groups.len()];
    for (g, grp) in groups.iter().enumerate() {
        for &c in &grp.cells {
            let (i, j) = ((c as isize) % res, (c as isize) / res);
            for dj in -2..=2 {
                for di in -2..=2 {
                    let (x, y) = (i + di, j + dj);
                    if x < 0 || y < 0 || x >= res || y >= res {
                        continue;
                    }
                    let h = label[(y * res + x) as usize];
                    if h == usize::MAX || h == g {
                        continue;
                    }
                    let diff: i32 = grp
                        .vector
                        .iter()
                        .zip(&groups[h].vector)
                        .map(|(a, b)| (a - b).abs())
                        .sum();
                    if diff == 1 {
                        adj[g].insert(h);
                    }
                }
            }
        }
    }
    adj
}

pub fn tile_decomposition(f: &HarmonicMap, set: &CriticalSet, caustics: &[CausticCurve]) -> Result<Vec<CausticTile>> {
    tile_decomposition_with(f, set, caustics, &TileOptions::default())
}

pub fn tile_decomposition_with(
    f: &HarmonicMap,
    set: &CriticalSet,
    caustics: &[CausticCurve],
    opts: &TileOptions,
) -> Result<Vec<CausticTile>> {
    let poles = total_pole_index(f)?;
    let count = |eta: Cx, vector: &[i64]| -> Result<i64> {
        Ok(2 * vector.iter().sum::<i64>() + poles - index_at_infinity(f, eta)?.index)
    };
    let live: Vec<&CausticCurve> = caustics.iter().filter(|c| !c.degenerate).collect();
    let all = live.iter().flat_map(|c| c.samples.iter().map(|s| s.w));
    let Some((lo, hi)) = bounding_box(all) else {
        let eta = ZERO;
        let vector = vec![0; caustics.len()];
        return Ok(vec![CausticTile {
            id: 0,
            representative: eta,
            preimage_count: count(eta, &vector)?,
            winding_vector: vector,
            shape: TileShape::Outer,
            neighbours: Vec::new(),
        }]);
    };
    let diag = (hi - lo).norm();
    let margin = opts.margin * diag;
    let span = (hi.re - lo.re).max(hi.im - lo.im).max(1e-12);
    let center = (lo + hi) * 0.5;
    let half = 0.75 * span;
    let box_lo = center - Cx::new(half, half);
    let polys: Vec<Vec<Cx>> = live.iter().map(|c| c.points()).collect();
    let omega = set.omega.as_ref();

    let mut result = Vec::new();
    for (level, &res) in opts.resolutions.iter().enumerate() {
        let grid = Grid::build(&polys, box_lo, 2.0 * half, res, margin);
        let (groups, label) = flood_fill(&grid);
        let adj = adjacency(&grid, &groups, &label);
        let mut tiles = Vec::new();
        let mut consistent = true;
        for (g, grp) in groups.iter().enumerate() {
            let mut rep = None;
            for &c in cells_by_depth(&grid, grp, &label, g).iter().take(64) {
                let p = grid.center(c % res, c / res);
                if polys.iter().all(|poly| distance_to_closed(poly, p) > margin) {
                    rep = Some(p);
                    break;
                }
            }
            let Some(p) = rep else {
                return Err(Error::TooClose { margin });
            };
            let mut vector = Vec::with_capacity(caustics.len());
            let mut li = 0;
            for c in caustics.iter() {
                if c.degenerate {
                    vector.push(0);
                    continue;
                }
                let exact = match omega {
                    Some(om) => caustic_winding(f, om, &set.curves[c.source], c, p)?,
                    None => winding_number(&polys[li], p)?,
                };
                if exact != grp.vector[li] as i64 {
                    consistent = false;
                }
                vector.push(exact);
                li += 1;
            }
            tiles.push(CausticTile {
                id: g,
                representative: p,
                preimage_count: count(p, &vector)?,
                winding_vector: vector,
                shape: if grp.outer { TileShape::Outer } else { TileShape::Mixed },
                neighbours: adj[g].iter().copied().collect(),
            });
        }
        for g in 0..tiles.len() {
            if tiles[g].shape == TileShape::Outer || tiles[g].neighbours.is_empty() {
                continue;
            }
            let own = tiles[g].preimage_count;
            let ns: Vec<i64> = tiles[g].neighbours.iter().map(|&h| tiles[h].preimage_count).collect();
            tiles[g].shape = if ns.iter().all(|&n| n < own) {
                TileShape::DeltoidLike
            } else if ns.iter().all(|&n| n > own) {
                TileShape::CardioidLike
            } else {
                TileShape::Mixed
            };
        }
        result = tiles;
        let last = level + 1 == opts.resolutions.len();
        if last || (consistent && res >= opts.min_resolution) {
            break;
        }
    }
    Ok(result)
}
