//! Complex polynomial and rational-function arithmetic.

mod poly;
mod rational;
mod roots;

pub use poly::{Poly, NORMALIZATION_FLOOR};
pub use rational::{RationalFn, RationalValue, CLUSTER_TOLERANCE, MULTIPLICITY_TOLERANCE};
pub use roots::{cluster_roots, RootOptions, DEFAULT_SEED, MAX_DEGREE};

pub type Cx = num_complex::Complex64;

pub const ZERO: Cx = Cx::new(0.0, 0.0);
pub const ONE: Cx = Cx::new(1.0, 0.0);
pub const I: Cx = Cx::new(0.0, 1.0);

/// `1 + |z|`, a convenient magnitude scale for relative tolerances.
pub fn scale_of(z: Cx) -> f64 {
    1.0 + z.norm()
}

/// Distance from `p` to the segment `[a, b]`.
pub fn segment_distance(p: Cx, a: Cx, b: Cx) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let s = ((p - a) * d.conj()).re / len2;
    (p - (a + d * s.clamp(0.0, 1.0))).norm()
}

/// Minimum distance from `p` to a polyline.
pub fn polyline_distance(p: Cx, pts: &[Cx]) -> f64 {
    match pts.len() {
        0 => f64::INFINITY,
        1 => (p - pts[0]).norm(),
        _ => pts
            .windows(2)
            .map(|w| segment_distance(p, w[0], w[1]))
            .fold(f64::INFINITY, f64::min),
    }
}
