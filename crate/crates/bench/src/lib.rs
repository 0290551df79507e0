//! Fixtures shared by the benchmarks.

use valence_core::counting::Counter;
use valence_core::mapping::catalog;
use valence_core::{Cx, HarmonicMap};

/// Catalog maps with an off-caustic target each.
pub fn fixtures() -> Vec<(&'static str, HarmonicMap, Cx)> {
    vec![
        ("mpw", catalog::mpw(), Cx::new(0.0, 0.0)),
        ("log-example", catalog::log_example(), Cx::new(3.0, 0.5)),
        ("wilmshurst:3", catalog::wilmshurst(3).unwrap(), Cx::new(0.0, 0.0)),
        ("nexp", catalog::nexp(), Cx::new(0.05, 0.02)),
    ]
}

pub fn counter(f: &HarmonicMap) -> Counter {
    Counter::new(f).expect("catalog maps are non-degenerate")
}
