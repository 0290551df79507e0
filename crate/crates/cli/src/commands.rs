use crate::export::{self, cx, num};
use crate::{Failure, Format, RunConfig};
use serde::Serialize;
use std::fs;
use std::path::PathBuf;
use valence_core::caustic::{caustics, tile_decomposition};
use valence_core::counting::Counter;
use valence_core::critical::{critical_set, CriticalSet, IsolatedCriticalPoint};
use valence_core::mapping::{index_at_infinity, is_non_degenerate, load_map, pole_records, IndexRecord, NonDegeneracyReport};
use valence_core::newton::{solve_with, SolveOptions};
use valence_core::valence::valence_scan;
use valence_core::{Cx, HarmonicMap};

const PHASE_GRID: usize = 200;

pub fn load(cfg: &RunConfig) -> Result<HarmonicMap, Failure> {
    Ok(load_map(&cfg.map)?)
}

pub fn solve_options(cfg: &RunConfig) -> SolveOptions {
    let mut o = SolveOptions {
        seed: cfg.seed,
        ..SolveOptions::default()
    };
    if let Some(t) = cfg.tol {
        o.tol = t;
    }
    if let Some(g) = cfg.grid {
        o.grid = g.max(1);
        o.max_grid = o.max_grid.max(4 * o.grid);
    }
    o
}

/// Output directory, created on demand; `None` when no files are requested.
fn out_dir(cfg: &RunConfig) -> Result<Option<PathBuf>, Failure> {
    match &cfg.out {
        Some(p) => {
            fs::create_dir_all(p)?;
            Ok(Some(p.clone()))
        }
        None => Ok(None),
    }
}

#[derive(Serialize)]
struct IndexTable {
    poles: Vec<IndexRecord>,
    infinity: IndexRecord,
    isolated_critical_points: Vec<IsolatedCriticalPoint>,
}

fn phase_rows(f: &HarmonicMap, set: &CriticalSet) -> Vec<Vec<String>> {
    let (lo, hi) = set.bounding_box().unwrap_or((Cx::new(-1.0, -1.0), Cx::new(1.0, 1.0)));
    let c = (lo + hi) * 0.5;
    let half = 0.75 * (hi - lo).re.max((hi - lo).im).max(1.0);
    let step = 2.0 * half / PHASE_GRID as f64;
    let mut rows = Vec::with_capacity(PHASE_GRID * PHASE_GRID);
    for j in 0..PHASE_GRID {
        for i in 0..PHASE_GRID {
            let z = c + Cx::new(-half + (i as f64 + 0.5) * step, -half + (j as f64 + 0.5) * step);
            let phase = f.evaluate(z).map(|w| w.arg()).unwrap_or(f64::NAN);
            rows.push(vec![num(z.re), num(z.im), num(phase)]);
        }
    }
    rows
}

pub fn analyze(cfg: &RunConfig) -> Result<(), Failure> {
    let f = load(cfg)?;
    let report: NonDegeneracyReport = is_non_degenerate(&f);
    let dir = out_dir(cfg)?;
    if let Some(d) = &dir {
        if cfg.wants(Format::Json) {
            export::write_json(&d.join("nondegeneracy.json"), &report)?;
        }
    }
    println!("non-degenerate: {}", report.ok);
    for v in &report.violations {
        println!("  violation: {v}");
    }
    if !report.ok {
        return Err(Failure::Usage(format!("{} is degenerate: {}", cfg.map, report.violations.join("; "))));
    }
    let set = critical_set(&f)?;
    let cs = caustics(&f, &set)?;
    let table = IndexTable {
        poles: pole_records(&f)?,
        infinity: index_at_infinity(&f, Cx::new(0.0, 0.0))?,
        isolated_critical_points: set.isolated.clone(),
    };
    println!("critical curves: {}", set.curves.len());
    for (k, c) in set.curves.iter().enumerate() {
        println!(
            "  curve {k}: {} samples, t-span {}, {} vertices, {} cusps",
            c.samples.len(),
            num(c.t_span()),
            c.vertices.len(),
            cs.iter().find(|x| x.source == k).map_or(0, |x| x.cusps.len())
        );
    }
    for p in &set.isolated {
        println!("  isolated critical point {}", cx(p.z));
    }
    for r in &table.poles {
        println!("pole index {}: {}", r.index, serde_json::to_string(&r.location).unwrap_or_default());
    }
    println!("index at infinity: {}", table.infinity.index);
    if let Some(d) = &dir {
        if cfg.wants(Format::Csv) {
            export::write_csv(&d.join("critical_curves.csv"), &export::CRITICAL_HEADER, export::critical_rows(&set))?;
            export::write_csv(&d.join("caustics.csv"), &export::CAUSTIC_HEADER, export::caustic_rows(&cs))?;
            export::write_csv(&d.join("phase.csv"), &["re", "im", "arg"], phase_rows(&f, &set))?;
        }
        if cfg.wants(Format::Svg) {
            fs::write(d.join("critical_curves.svg"), export::critical_svg(&set))?;
            fs::write(d.join("caustics.svg"), export::caustic_svg(&cs, &[]))?;
        }
        if cfg.wants(Format::Json) {
            export::write_json(&d.join("indices.json"), &table)?;
        }
    }
    Ok(())
}

pub fn count(cfg: &RunConfig) -> Result<(), Failure> {
    let eta = cfg.eta()?;
    let counter = Counter::new(&load(cfg)?)?;
    let r = counter.count(eta)?;
    let w: Vec<String> = r.windings.iter().map(|(c, n)| format!("{c}:{n}")).collect();
    println!("eta = {}", cx(eta));
    println!("windings = [{}]", w.join(", "));
    println!("P = {}", r.p);
    println!("ind_infinity = {}", r.ind_infinity);
    println!("N = {}", r.n);
    if let Some(d) = out_dir(cfg)? {
        if cfg.wants(Format::Json) {
            export::write_json(&d.join("count.json"), &r)?;
        }
        if cfg.wants(Format::Csv) {
            let rows = r.windings.iter().map(|(c, n)| vec![c.to_string(), n.to_string()]);
            export::write_csv(&d.join("windings.csv"), &["curve", "winding"], rows)?;
        }
    }
    Ok(())
}

pub fn tiles(cfg: &RunConfig) -> Result<(), Failure> {
    let counter = Counter::new(&load(cfg)?)?;
    let tiles = tile_decomposition(counter.map(), counter.critical_set(), counter.caustics())?;
    for t in &tiles {
        println!(
            "tile {}: N = {}, representative {}, shape {:?}, windings {:?}",
            t.id,
            t.preimage_count,
            cx(t.representative),
            t.shape,
            t.winding_vector
        );
    }
    if let Some(d) = out_dir(cfg)? {
        if cfg.wants(Format::Json) {
            export::write_json(&d.join("tiles.json"), &tiles)?;
        }
        if cfg.wants(Format::Csv) {
            let rows = tiles.iter().map(|t| {
                let w: Vec<String> = t.winding_vector.iter().map(|x| x.to_string()).collect();
                vec![
                    t.id.to_string(),
                    num(t.representative.re),
                    num(t.representative.im),
                    t.preimage_count.to_string(),
                    format!("{:?}", t.shape),
                    w.join(";"),
                ]
            });
            export::write_csv(&d.join("tiles.csv"), &["tile", "re", "im", "N", "shape", "windings"], rows)?;
        }
        if cfg.wants(Format::Svg) {
            fs::write(d.join("tiles.svg"), export::caustic_svg(counter.caustics(), &tiles))?;
        }
    }
    Ok(())
}

pub fn solve(cfg: &RunConfig) -> Result<(), Failure> {
    let eta = cfg.eta()?;
    let counter = Counter::new(&load(cfg)?)?;
    let r = solve_with(&counter, eta, &solve_options(cfg))?;
    println!("eta = {}", cx(eta));
    for p in &r.points {
        println!("{} {:?} residual {} iterations {}", cx(p.z), p.sense, num(p.residual), p.iterations);
    }
    println!("pre-images = {} (formula {}, certified {})", r.points.len(), r.expected.map_or("n/a".into(), |e| e.to_string()), r.certified);
    for w in &r.warnings {
        println!("warning: {w}");
    }
    if let Some(d) = out_dir(cfg)? {
        if cfg.wants(Format::Json) {
            export::write_json(&d.join("preimages.json"), &r)?;
        }
        if cfg.wants(Format::Csv) {
            let rows = r.points.iter().map(|p| {
                vec![num(p.z.re), num(p.z.im), format!("{:?}", p.sense), num(p.residual), p.iterations.to_string()]
            });
            export::write_csv(&d.join("preimages.csv"), &["re", "im", "sense", "residual", "iterations"], rows)?;
        }
    }
    Ok(())
}

pub fn scan(cfg: &RunConfig, to: Cx, steps: usize) -> Result<(), Failure> {
    let from = cfg.eta()?;
    let counter = Counter::new(&load(cfg)?)?;
    let s = valence_scan(&counter, &cfg.map, from, to, steps)?;
    let achieved: Vec<String> = s.achieved_counts.iter().map(|n| n.to_string()).collect();
    let inferred: Vec<String> = s.inferred_counts.iter().map(|n| n.to_string()).collect();
    println!("records = {}", s.records.len());
    println!("crossings = {}", s.crossings.len());
    println!("achieved = {{{}}}", achieved.join(", "));
    println!("on caustic = {{{}}}", inferred.join(", "));
    if let Some(d) = out_dir(cfg)? {
        if cfg.wants(Format::Csv) {
            let rows = s.records.iter().map(|r| {
                vec![
                    num(r.eta.re),
                    num(r.eta.im),
                    r.n.to_string(),
                    r.tile.map_or(String::new(), |t| t.to_string()),
                    u8::from(r.detoured).to_string(),
                ]
            });
            export::write_csv(&d.join("scan.csv"), &["re", "im", "N", "tile", "detoured"], rows)?;
        }
        if cfg.wants(Format::Json) {
            export::write_json(&d.join("scan.json"), &s)?;
        }
    }
    Ok(())
}
