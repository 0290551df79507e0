//! Invariant checks over one or all catalog maps.

use crate::commands::solve_options;
use crate::export::{self, cx, num};
use crate::{Failure, RunConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use valence_core::caustic::curvature_check;
use valence_core::counting::{brute_force_count, Counter, Sense};
use valence_core::critical::bounding_box;
use valence_core::mapping::catalog::KEYS;
use valence_core::mapping::{index_at_infinity, is_non_degenerate, load_map, pole_records};
use valence_core::newton::{solve_with, SolveOptions};
use valence_core::{Cx, Error, HarmonicMap};

pub const CURVATURE_TOLERANCE: f64 = 1e-3;
const CURVATURE_STEP: f64 = 1e-4;
/// Sampled targets keep this many caustic margins away from the caustics.
const SAMPLE_CLEARANCE: f64 = 10.0;

#[derive(Serialize, Debug)]
pub struct Check {
    pub map: String,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn check(map: &str, name: &'static str, pass: bool, detail: String) -> Check {
    println!("{} {map} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    Check {
        map: map.to_string(),
        name,
        pass,
        detail,
    }
}

/// Off-caustic targets, alternately uniform in the inflated caustic box and
/// offset from a random caustic sample so that small tiles are reached.
pub fn sample_targets(counter: &Counter, n: usize, rng: &mut ChaCha8Rng) -> Vec<Cx> {
    let pts: Vec<Cx> = counter.caustics().iter().flat_map(|c| c.samples.iter().map(|s| s.w)).collect();
    let (lo, hi) = bounding_box(pts.iter().copied()).unwrap_or((Cx::new(-1.0, -1.0), Cx::new(1.0, 1.0)));
    let c = (lo + hi) * 0.5;
    let half = 0.75 * (hi - lo).re.max((hi - lo).im).max(1.0);
    let clearance = SAMPLE_CLEARANCE * counter.margin();
    let mut out = Vec::with_capacity(n);
    let mut tries = 0;
    while out.len() < n && tries < 1000 * n.max(1) {
        tries += 1;
        let eta = if pts.is_empty() || out.len() % 2 == 0 {
            c + Cx::new(rng.gen_range(-half..half), rng.gen_range(-half..half))
        } else {
            let r = rng.gen_range(clearance..(0.05 * (hi - lo).norm()).max(2.0 * clearance));
            pts[rng.gen_range(0..pts.len())] + Cx::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
        };
        if counter.caustic_distance(eta) > clearance {
            out.push(eta);
        }
    }
    out
}

fn starved() -> SolveOptions {
    SolveOptions {
        grid: 1,
        max_grid: 1,
        ring_seeds: 0,
        max_iter: 2,
        ..SolveOptions::default()
    }
}

fn validate_map(key: &str, f: &HarmonicMap, cfg: &RunConfig, samples: usize, inject_fault: bool) -> Vec<Check> {
    let mut out = Vec::new();
    let report = is_non_degenerate(f);
    out.push(check(key, "non-degeneracy", report.ok, report.violations.join("; ")));
    if !report.ok {
        return out;
    }
    let counter = match Counter::new(f) {
        Ok(c) => c,
        Err(e) => {
            out.push(check(key, "pipeline", false, e.to_string()));
            return out;
        }
    };
    let set = counter.critical_set();
    let worst = match &set.omega {
        Some(omega) => set
            .curves
            .iter()
            .map(|c| curvature_check(f, omega, c, CURVATURE_STEP))
            .fold(0.0, f64::max),
        None => 0.0,
    };
    out.push(check(key, "curvature", worst < CURVATURE_TOLERANCE, format!("max deviation {}", num(worst))));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let targets = sample_targets(&counter, samples, &mut rng);
    let opts = if inject_fault { starved() } else { solve_options(cfg) };
    let poles: i64 = pole_records(f).map(|r| r.iter().map(|p| p.index).sum()).unwrap_or(0);
    let mut agree = 0;
    let mut balanced = 0;
    let mut counts = Vec::new();
    let mut failures = Vec::new();
    for &eta in &targets {
        let formula = match counter.count(eta) {
            Ok(r) => r.n,
            Err(e) => {
                failures.push(format!("{}: {e}", cx(eta)));
                continue;
            }
        };
        counts.push(formula);
        let run = || -> Result<(usize, usize, i64), Error> {
            let newton = solve_with(&counter, eta, &opts)?;
            let oracle = brute_force_count(f, eta)?;
            let signed: i64 = newton
                .points
                .iter()
                .map(|p| if p.sense == Sense::Preserving { 1 } else { -1 })
                .sum();
            let balance = signed + poles + index_at_infinity(f, eta)?.index;
            Ok((newton.points.len(), oracle, balance))
        };
        match run() {
            Ok((newton, oracle, balance)) => {
                if formula == newton as i64 && formula == oracle as i64 {
                    agree += 1;
                } else {
                    failures.push(format!("{}: formula {formula}, newton {newton}, oracle {oracle}", cx(eta)));
                }
                if balance == 0 {
                    balanced += 1;
                }
            }
            Err(e) => failures.push(format!("{}: {e}", cx(eta))),
        }
    }
    let n = targets.len();
    let mut detail = format!("{agree}/{n} targets");
    if let Some(first) = failures.first() {
        detail.push_str(&format!("; first failure {first}"));
    }
    out.push(check(key, "triple-agreement", n > 0 && agree == n, detail));
    out.push(check(key, "index-balance", balanced == n, format!("{balanced}/{n} targets")));
    let parity = !counts.is_empty() && counts.windows(2).all(|w| (w[0] - w[1]) % 2 == 0);
    let mut distinct = counts.clone();
    distinct.sort();
    distinct.dedup();
    out.push(check(key, "parity", parity, format!("counts {distinct:?}")));
    out
}

pub fn run(cfg: &RunConfig, samples: usize, all: bool, inject_fault: bool) -> Result<(), Failure> {
    let keys: Vec<String> = if all { KEYS.iter().map(|k| k.to_string()).collect() } else { vec![cfg.map.clone()] };
    let mut checks = Vec::new();
    for key in &keys {
        match load_map(key) {
            Ok(f) => checks.extend(validate_map(key, &f, cfg, samples, inject_fault)),
            Err(e) => checks.push(check(key, "non-degeneracy", false, e.to_string())),
        }
    }
    if let Some(d) = &cfg.out {
        std::fs::create_dir_all(d)?;
        export::write_json(&d.join("validate.json"), &checks)?;
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Checks(failed))
    }
}
