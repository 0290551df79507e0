//! JSON description of a map:
//! `{"h": {"num": [[re, im], ...], "den": [...]}, "g": {...}, "log": [{"s": [re, im], "c": [re, im]}]}`.
//!
//! Coefficients are in ascending powers; `den` defaults to `[[1, 0]]`.

use super::{catalog, HarmonicMap, LogTerm};
use crate::error::{Error, Result};
use crate::numerics::{Cx, Poly, RationalFn};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalSpec {
    pub num: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub den: Option<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogSpec {
    pub s: [f64; 2],
    pub c: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub h: RationalSpec,
    pub g: RationalSpec,
    #[serde(default)]
    pub log: Vec<LogSpec>,
}

fn to_cx(v: &[[f64; 2]]) -> Vec<Cx> {
    v.iter().map(|[a, b]| Cx::new(*a, *b)).collect()
}

fn from_cx(v: &[Cx]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

impl RationalSpec {
    fn build(&self) -> Result<RationalFn> {
        let num = Poly::new(to_cx(&self.num));
        let den = match &self.den {
            Some(d) => Poly::new(to_cx(d)),
            None => Poly::one(),
        };
        if den.is_zero() {
            return Err(Error::InvalidSpec("zero denominator".into()));
        }
        if self
            .num
            .iter()
            .chain(self.den.iter().flatten())
            .any(|[a, b]| !(a.is_finite() && b.is_finite()))
        {
            return Err(Error::InvalidSpec("non-finite coefficient".into()));
        }
        Ok(RationalFn::new(num, den))
    }

    fn from_rational(r: &RationalFn) -> Self {
        let den = r.den();
        RationalSpec {
            num: from_cx(r.num().coeffs()),
            den: (den.degree() != Some(0) || den.coeffs()[0] != Cx::new(1.0, 0.0))
                .then(|| from_cx(den.coeffs())),
        }
    }
}

impl MapSpec {
    pub fn build(&self) -> Result<HarmonicMap> {
        let logs = self
            .log
            .iter()
            .map(|l| LogTerm {
                s: Cx::new(l.s[0], l.s[1]),
                c: Cx::new(l.c[0], l.c[1]),
            })
            .collect();
        HarmonicMap::new(self.h.build()?, self.g.build()?, logs)
    }

    pub fn from_map(f: &HarmonicMap) -> Self {
        MapSpec {
            h: RationalSpec::from_rational(f.h()),
            g: RationalSpec::from_rational(f.g()),
            log: f
                .logs()
                .iter()
                .map(|t| LogSpec {
                    s: [t.s.re, t.s.im],
                    c: [t.c.re, t.c.im],
                })
                .collect(),
        }
    }
}

pub fn parse_map(json: &str) -> Result<HarmonicMap> {
    let spec: MapSpec =
        serde_json::from_str(json).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    spec.build()
}

/// Resolves a catalog key or a path to a JSON map file.
pub fn load_map(source: &str) -> Result<HarmonicMap> {
    match catalog::by_key(source) {
        Ok(f) => Ok(f),
        Err(err) => {
            let path = Path::new(source);
            if path.is_file() {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::InvalidSpec(format!("{source}: {e}")))?;
                parse_map(&text)
            } else {
                Err(err)
            }
        }
    }
}
