//! CSV, JSON and SVG writers. Every number is printed with 15 significant digits.

use serde::Serialize;
use serde_json::Value;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use valence_core::caustic::{CausticCurve, CausticTile};
use valence_core::critical::{bounding_box, CriticalSet};
use valence_core::Cx;

pub const SIGNIFICANT_DIGITS: usize = 15;

/// `x` with 15 significant digits, trailing zeros trimmed.
pub fn num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
        let (mantissa, e) = s.split_once('e').unwrap();
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{e}")
    }
}

pub fn cx(z: Cx) -> String {
    if z.im < 0.0 {
        format!("{}-{}i", num(z.re), num(-z.im))
    } else {
        format!("{}+{}i", num(z.re), num(z.im))
    }
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap();
            if let Some(r) = num(x).parse::<f64>().ok().and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    serde_json::to_string_pretty(&v)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let text = to_json(value).map_err(std::io::Error::other)?;
    fs::write(path, text + "\n")
}

/// Writes a header and rows of pre-formatted fields.
pub fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()
}

pub fn critical_rows(set: &CriticalSet) -> Vec<Vec<String>> {
    set.curves
        .iter()
        .enumerate()
        .flat_map(|(k, c)| {
            c.samples.iter().map(move |s| {
                vec![
                    k.to_string(),
                    c.component_id.to_string(),
                    num(s.t),
                    num(s.z.re),
                    num(s.z.im),
                    u8::from(s.vertex).to_string(),
                ]
            })
        })
        .collect()
}

pub const CRITICAL_HEADER: [&str; 6] = ["curve", "component", "t", "re", "im", "vertex"];

pub fn caustic_rows(caustics: &[CausticCurve]) -> Vec<Vec<String>> {
    caustics
        .iter()
        .flat_map(|c| {
            c.samples
                .iter()
                .map(move |s| vec![c.source.to_string(), num(s.t), num(s.w.re), num(s.w.im), num(s.psi)])
        })
        .collect()
}

pub const CAUSTIC_HEADER: [&str; 5] = ["curve", "t", "re", "im", "psi"];

/// Plane drawing with `y` pointing up.
pub struct Svg {
    lo: Cx,
    hi: Cx,
    body: String,
}

impl Svg {
    pub fn new(points: impl Iterator<Item = Cx>) -> Self {
        let (lo, hi) = bounding_box(points).unwrap_or((Cx::new(-1.0, -1.0), Cx::new(1.0, 1.0)));
        let pad = 0.05 * (hi - lo).norm().max(1e-9);
        Svg {
            lo: lo - Cx::new(pad, pad),
            hi: hi + Cx::new(pad, pad),
            body: String::new(),
        }
    }

    fn xy(&self, z: Cx) -> (String, String) {
        (num(z.re), num(self.hi.im + self.lo.im - z.im))
    }

    pub fn polyline(&mut self, pts: &[Cx], color: &str) {
        let coords: Vec<String> = pts
            .iter()
            .filter(|z| z.re.is_finite() && z.im.is_finite())
            .map(|&z| {
                let (x, y) = self.xy(z);
                format!("{x},{y}")
            })
            .collect();
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5" vector-effect="non-scaling-stroke"/>"#,
            coords.join(" ")
        );
    }

    pub fn dot(&mut self, z: Cx, color: &str) {
        let (x, y) = self.xy(z);
        let r = num(0.006 * (self.hi - self.lo).norm());
        let _ = writeln!(self.body, r#"<circle cx="{x}" cy="{y}" r="{r}" fill="{color}"/>"#);
    }

    pub fn label(&mut self, z: Cx, text: &str) {
        let (x, y) = self.xy(z);
        let size = num(0.03 * (self.hi - self.lo).norm());
        let _ = writeln!(
            self.body,
            r#"<text x="{x}" y="{y}" font-size="{size}" text-anchor="middle" dominant-baseline="middle">{text}</text>"#
        );
    }

    pub fn finish(&self) -> String {
        let d = self.hi - self.lo;
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"800\" height=\"{}\">\n{}</svg>\n",
            num(self.lo.re),
            num(self.lo.im),
            num(d.re),
            num(d.im),
            (800.0 * d.im / d.re).round().max(1.0),
            self.body
        )
    }
}

pub fn critical_svg(set: &CriticalSet) -> String {
    let mut svg = Svg::new(set.curves.iter().flat_map(|c| c.samples.iter().map(|s| s.z)).chain(set.isolated.iter().map(|p| p.z)));
    for c in &set.curves {
        svg.polyline(&c.points(), "#1f4e9c");
    }
    for v in &set.vertices {
        svg.dot(v.z, "#c0392b");
    }
    for p in &set.isolated {
        svg.dot(p.z, "#000000");
    }
    svg.finish()
}

pub fn caustic_svg(caustics: &[CausticCurve], tiles: &[CausticTile]) -> String {
    let mut svg = Svg::new(caustics.iter().flat_map(|c| c.samples.iter().map(|s| s.w)));
    for c in caustics {
        let mut pts = c.points();
        if let Some(&first) = pts.first() {
            pts.push(first);
        }
        svg.polyline(&pts, "#b03a2e");
        for k in &c.cusps {
            svg.dot(k.w, "#000000");
        }
    }
    for t in tiles {
        svg.label(t.representative, &t.preimage_count.to_string());
    }
    svg.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifteen_significant_digits() {
        assert_eq!(num(1.0), "1");
        assert_eq!(num(-0.216), "-0.216");
        assert_eq!(num(std::f64::consts::PI), "3.14159265358979");
        assert_eq!(num(1.0 / 3.0 * 1e-7), "3.33333333333333e-8");
        assert_eq!(num(2.5e20), "2.5e20");
        assert_eq!(num(123456.0), "123456");
    }

    #[test]
    fn json_floats_are_rounded() {
        let s = to_json(&vec![std::f64::consts::E, 2.0]).unwrap();
        assert!(s.contains("2.71828182845905"), "{s}");
    }

    #[test]
    fn complex_formatting() {
        assert_eq!(cx(Cx::new(1.5, -2.0)), "1.5-2i");
        assert_eq!(cx(Cx::new(0.0, 0.25)), "0+0.25i");
    }
}
