//! Localization of the pre-images of large `eta` near the poles and infinity.

use crate::error::{Error, Result};
use crate::mapping::{index_at_infinity, pole_records, HarmonicMap, Location};
use crate::numerics::Cx;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

const CIRCLE_SAMPLES: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalRegion {
    PoleDisk { center: Cx, radius: f64 },
    /// `|z| > radius`.
    Exterior { radius: f64 },
    Remainder,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Localization {
    pub region: LocalRegion,
    pub expected: i64,
}

fn circle(center: Cx, r: f64) -> impl Iterator<Item = Cx> {
    (0..CIRCLE_SAMPLES).map(move |k| center + Cx::from_polar(r, TAU * k as f64 / CIRCLE_SAMPLES as f64))
}

fn single_sense(f: &HarmonicMap, pts: impl Iterator<Item = Cx>) -> bool {
    let mut sign = 0.0;
    for z in pts {
        let j = f.jacobian_raw(z);
        if j == 0.0 || !j.is_finite() {
            return false;
        }
        if sign == 0.0 {
            sign = j.signum();
        } else if j.signum() != sign {
            return false;
        }
    }
    true
}

/// Expected counts in the `eps`-disks about the poles, in `|z| > 1/eps`, and
/// in the rest of the plane.
pub fn large_eta_localization(f: &HarmonicMap, eta: Cx, eps: f64) -> Result<Vec<Localization>> {
    let poles: Vec<(Cx, i64)> = pole_records(f)?
        .into_iter()
        .filter_map(|r| match r.location {
            Location::Finite(z) => Some((z, r.index)),
            Location::Infinity => None,
        })
        .collect();
    let outer = 1.0 / eps;
    let bad = Error::LocalizationRadius { eps };
    for (i, &(a, _)) in poles.iter().enumerate() {
        if a.norm() + eps >= outer || poles[i + 1..].iter().any(|&(b, _)| (a - b).norm() <= 2.0 * eps) {
            return Err(bad);
        }
        let rings = [0.25, 0.5, 1.0].into_iter().flat_map(|s| circle(a, s * eps));
        if !single_sense(f, rings) {
            return Err(bad);
        }
    }
    let rings = [1.0, 2.0, 4.0].into_iter().flat_map(|s| circle(Cx::new(0.0, 0.0), s * outer));
    if !single_sense(f, rings) {
        return Err(bad);
    }
    let boundary = poles
        .iter()
        .flat_map(|&(a, _)| circle(a, eps))
        .chain(circle(Cx::new(0.0, 0.0), outer));
    let threshold = boundary.map(|z| f.eval(z).norm()).fold(0.0, f64::max);
    if eta.norm() <= threshold {
        return Err(Error::EtaTooSmall { threshold });
    }
    let mut out: Vec<Localization> = poles
        .iter()
        .map(|&(center, index)| Localization {
            region: LocalRegion::PoleDisk { center, radius: eps },
            expected: index.abs(),
        })
        .collect();
    out.push(Localization {
        region: LocalRegion::Exterior { radius: outer },
        expected: -index_at_infinity(f, eta)?.index,
    });
    out.push(Localization {
        region: LocalRegion::Remainder,
        expected: 0,
    });
    Ok(out)
}
