//! Winding numbers and pre-image counts.

pub mod large_eta;
pub mod oracle;
pub mod regions;
pub mod winding;

pub use large_eta::{large_eta_localization, LocalRegion, Localization};
pub use oracle::{brute_force_count, brute_force_zeros, OracleOptions, OracleZero};
pub use regions::{region_components, PieceRef, RegionComponent, Sense};
pub use winding::{distance_to_closed, winding_number, winding_number_refined};

use crate::caustic::{caustic_angle, caustic_winding, caustics, CausticCurve, TileOptions};
use crate::critical::{bounding_box, critical_set, CriticalSet};
use crate::error::{Error, Result};
use crate::mapping::{index_at_infinity, is_non_degenerate, pole_records, HarmonicMap, IndexRecord};
use crate::numerics::{Cx, ZERO};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Formula,
    Newton,
    BruteForce,
}

/// `N = 2 * sum(windings) + P - ind_infinity` for the formula route.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub eta: Cx,
    /// `(critical curve id, n(f o gamma; eta))`.
    pub windings: Vec<(usize, i64)>,
    #[serde(rename = "P")]
    pub p: i64,
    pub ind_infinity: i64,
    #[serde(rename = "N")]
    pub n: i64,
    pub route: Route,
}

impl CountReport {
    pub fn winding_sum(&self) -> i64 {
        self.windings.iter().map(|w| w.1).sum()
    }
}

/// Critical set, caustics and pole data of one map, shared by all counts.
pub struct Counter {
    f: HarmonicMap,
    set: CriticalSet,
    caustics: Vec<CausticCurve>,
    poles: Vec<IndexRecord>,
    p: i64,
    fixed_infinity: Option<i64>,
    margin: f64,
    components: OnceLock<Result<Vec<RegionComponent>>>,
}

impl Counter {
    /// Runs the critical-set and caustic pipeline for a non-degenerate `f`.
    pub fn new(f: &HarmonicMap) -> Result<Self> {
        let report = is_non_degenerate(f);
        if !report.ok {
            return Err(Error::DegenerateMap(report.violations.join("; ")));
        }
        let set = critical_set(f)?;
        let cs = caustics(f, &set)?;
        Self::from_parts(f, set, cs)
    }

    pub fn from_parts(f: &HarmonicMap, set: CriticalSet, caustics: Vec<CausticCurve>) -> Result<Self> {
        let poles = pole_records(f)?;
        let p = poles.iter().map(|r| r.index.abs()).sum();
        let log_sum: Cx = f.logs().iter().map(|l| l.c).sum();
        let fixed_infinity = if f.growth_at_infinity().0 >= 1 || log_sum != ZERO {
            Some(index_at_infinity(f, ZERO)?.index)
        } else {
            None
        };
        let diag = bounding_box(caustics.iter().flat_map(|c| c.samples.iter().map(|s| s.w)))
            .map(|(lo, hi)| (hi - lo).norm())
            .unwrap_or(0.0);
        Ok(Counter {
            f: f.clone(),
            set,
            caustics,
            poles,
            p,
            fixed_infinity,
            margin: TileOptions::default().margin * diag,
            components: OnceLock::new(),
        })
    }

    pub fn map(&self) -> &HarmonicMap {
        &self.f
    }

    pub fn critical_set(&self) -> &CriticalSet {
        &self.set
    }

    pub fn caustics(&self) -> &[CausticCurve] {
        &self.caustics
    }

    pub fn poles(&self) -> &[IndexRecord] {
        &self.poles
    }

    /// `P(f)`.
    pub fn pole_count(&self) -> i64 {
        self.p
    }

    /// Clearance required between `eta` and the caustics.
    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn caustic_distance(&self, eta: Cx) -> f64 {
        self.caustics
            .iter()
            .map(|c| c.distance(eta))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn index_at_infinity(&self, eta: Cx) -> Result<i64> {
        match self.fixed_infinity {
            Some(i) => Ok(i),
            None => Ok(index_at_infinity(&self.f, eta)?.index),
        }
    }

    fn check_clearance(&self, eta: Cx) -> Result<()> {
        let distance = self.caustic_distance(eta);
        if distance <= self.margin {
            return Err(Error::EtaOnCaustic {
                distance,
                margin: self.margin,
            });
        }
        Ok(())
    }

    /// `n(f o gamma; eta)` for every critical curve.
    pub fn windings(&self, eta: Cx) -> Result<Vec<(usize, i64)>> {
        self.check_clearance(eta)?;
        let Some(omega) = self.set.omega.as_ref() else {
            return Ok(Vec::new());
        };
        self.caustics
            .iter()
            .map(|c| {
                let n = caustic_winding(&self.f, omega, &self.set.curves[c.source], c, eta).map_err(|e| match e {
                    Error::OnCurve { distance } => Error::EtaOnCaustic {
                        distance,
                        margin: self.margin,
                    },
                    e => e,
                })?;
                Ok((c.source, n))
            })
            .collect()
    }

    pub fn count(&self, eta: Cx) -> Result<CountReport> {
        let windings = self.windings(eta)?;
        let ind_infinity = self.index_at_infinity(eta)?;
        let sum: i64 = windings.iter().map(|w| w.1).sum();
        Ok(CountReport {
            eta,
            windings,
            p: self.p,
            ind_infinity,
            n: 2 * sum + self.p - ind_infinity,
            route: Route::Formula,
        })
    }

    pub fn components(&self) -> Result<&[RegionComponent]> {
        self.components
            .get_or_init(|| region_components(&self.f, &self.set, &self.poles))
            .as_ref()
            .map(|v| v.as_slice())
            .map_err(Clone::clone)
    }

    /// `N_eta(f; A)` from the boundary windings of `A`.
    pub fn count_in_component(&self, eta: Cx, a: &RegionComponent) -> Result<i64> {
        let mut total = 0.0;
        if let Some(omega) = self.set.omega.as_ref() {
            for r in &a.boundary_pieces {
                let curve = &self.set.curves[r.curve];
                let piece = curve.pieces[r.piece];
                let caustic = self
                    .caustics
                    .iter()
                    .find(|c| c.source == r.curve)
                    .ok_or_else(|| Error::DegenerateMap(format!("no caustic for curve {}", r.curve)))?;
                total += caustic_angle(&self.f, omega, curve, caustic, (piece.start, piece.end), eta).map_err(
                    |e| match e {
                        Error::OnCurve { distance } => Error::EtaOnBoundaryImage { distance },
                        e => e,
                    },
                )?;
            }
        }
        let w = winding::turns_of(total)?;
        let inf = if a.is_unbounded { self.index_at_infinity(eta)? } else { 0 };
        Ok(w + a.pole_count - inf)
    }

    /// `N_eta2` from `N_eta1` and the winding differences.
    pub fn relative_count(&self, eta1: Cx, eta2: Cx, n1: i64) -> Result<i64> {
        if self.fixed_infinity.is_none() {
            let c = index_at_infinity(&self.f, ZERO)?.basis.a(0);
            let radius = (c - eta1).norm();
            if (eta2 - eta1).norm() >= radius {
                return Err(Error::OutsideRelativeDisk { radius });
            }
        }
        let w1 = self.windings(eta1)?;
        let w2 = self.windings(eta2)?;
        let diff: i64 = w1.iter().zip(&w2).map(|(a, b)| b.1 - a.1).sum();
        Ok(n1 + 2 * diff)
    }
}

/// `N_eta(f)` by the counting formula.
pub fn count_preimages(f: &HarmonicMap, eta: Cx) -> Result<CountReport> {
    Counter::new(f)?.count(eta)
}

/// `N_eta(f; A)` for a component `A` of `C \ crit(f)`.
pub fn count_in_component(f: &HarmonicMap, eta: Cx, a: &RegionComponent) -> Result<i64> {
    Counter::new(f)?.count_in_component(eta, a)
}

pub fn relative_count(f: &HarmonicMap, eta1: Cx, eta2: Cx, n1: i64) -> Result<i64> {
    Counter::new(f)?.relative_count(eta1, eta2, n1)
}

#[cfg(test)]
mod tests;
