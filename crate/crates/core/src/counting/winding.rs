use crate::error::{Error, Result};
use crate::numerics::{segment_distance, Cx};
use std::f64::consts::{FRAC_PI_2, TAU};

/// Distance (relative to the curve scale) below which `eta` is on the curve.
pub const ON_CURVE_TOLERANCE: f64 = 1e-9;
/// Largest accepted distance of `turns` from an integer.
pub const INTEGER_TOLERANCE: f64 = 0.45;
const MAX_DEPTH: u32 = 30;

fn closed_pairs(pts: &[Cx]) -> impl Iterator<Item = (Cx, Cx)> + '_ {
    let n = pts.len();
    let wrap = n > 1 && pts[0] != pts[n - 1];
    pts.windows(2)
        .map(|w| (w[0], w[1]))
        .chain(wrap.then(|| (pts[n - 1], pts[0])))
}

pub(crate) fn curve_scale(pts: &[Cx]) -> f64 {
    pts.iter().map(|p| p.norm()).fold(1.0, f64::max)
}

fn round_turns(total: f64) -> Result<i64> {
    let turns = total / TAU;
    let n = turns.round();
    if (turns - n).abs() > INTEGER_TOLERANCE {
        return Err(Error::NonInteger { value: turns });
    }
    Ok(n as i64)
}

/// Minimum distance from `eta` to a closed polyline.
pub fn distance_to_closed(pts: &[Cx], eta: Cx) -> f64 {
    closed_pairs(pts)
        .map(|(a, b)| segment_distance(eta, a, b))
        .fold(f64::INFINITY, f64::min)
}

/// Winding number of the closed polyline `pts` about `eta`.
pub fn winding_number(pts: &[Cx], eta: Cx) -> Result<i64> {
    let d = distance_to_closed(pts, eta);
    if d <= ON_CURVE_TOLERANCE * curve_scale(pts) {
        return Err(Error::OnCurve { distance: d });
    }
    let total: f64 = closed_pairs(pts)
        .map(|(a, b)| ((b - eta) / (a - eta)).arg())
        .sum();
    round_turns(total)
}

/// Angle swept about `eta` by the open sampled arc `samples = (t, point)`;
/// increments above `pi/2` are split by evaluating `eval(t, i)` between
/// samples `i` and `i + 1`. `scale` sets the on-curve floor.
pub fn angle_sum_refined(
    samples: &[(f64, Cx)],
    eta: Cx,
    eval: &dyn Fn(f64, usize) -> Option<Cx>,
    scale: f64,
) -> Result<f64> {
    let floor = ON_CURVE_TOLERANCE * scale;
    let mut total = 0.0;
    for (i, w) in samples.windows(2).enumerate() {
        let d = segment_distance(eta, w[0].1, w[1].1);
        if d <= floor {
            return Err(Error::OnCurve { distance: d });
        }
        total += refine(eval, i, w[0], w[1], eta, floor, 0)?;
    }
    Ok(total)
}

fn refine(
    eval: &dyn Fn(f64, usize) -> Option<Cx>,
    i: usize,
    (ta, a): (f64, Cx),
    (tb, b): (f64, Cx),
    eta: Cx,
    floor: f64,
    depth: u32,
) -> Result<f64> {
    let inc = ((b - eta) / (a - eta)).arg();
    if inc.abs() <= FRAC_PI_2 || depth >= MAX_DEPTH {
        return Ok(inc);
    }
    let tm = 0.5 * (ta + tb);
    match eval(tm, i) {
        Some(m) => {
            if (m - eta).norm() <= floor {
                return Err(Error::OnCurve {
                    distance: (m - eta).norm(),
                });
            }
            Ok(refine(eval, i, (ta, a), (tm, m), eta, floor, depth + 1)?
                + refine(eval, i, (tm, m), (tb, b), eta, floor, depth + 1)?)
        }
        None => Ok(inc),
    }
}

/// Winding number of a parametrized closed curve given by samples `(t, point)`;
/// increments above `pi/2` are split by evaluating `eval` at midpoints.
pub fn winding_number_refined(
    samples: &[(f64, Cx)],
    eta: Cx,
    eval: &dyn Fn(f64, usize) -> Option<Cx>,
) -> Result<i64> {
    let pts: Vec<Cx> = samples.iter().map(|s| s.1).collect();
    let scale = curve_scale(&pts);
    let mut total = angle_sum_refined(samples, eta, eval, scale)?;
    let (first, last) = (pts[0], pts[pts.len() - 1]);
    if first != last {
        let d = segment_distance(eta, last, first);
        if d <= ON_CURVE_TOLERANCE * scale {
            return Err(Error::OnCurve { distance: d });
        }
        total += ((first - eta) / (last - eta)).arg();
    }
    round_turns(total)
}

/// Rounds an accumulated angle to whole turns.
pub fn turns_of(total: f64) -> Result<i64> {
    round_turns(total)
}
