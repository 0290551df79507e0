//! Named example maps.

use super::{HarmonicMap, LogTerm};
use crate::error::{Error, Result};
use crate::numerics::{Cx, Poly, RationalFn, I, ONE, ZERO};

/// Keys accepted by [`by_key`]; `wilmshurst:n` takes any `n >= 2`.
pub const KEYS: [&str; 4] = ["mpw", "log-example", "wilmshurst:3", "nexp"];

pub fn by_key(key: &str) -> Result<HarmonicMap> {
    match key {
        "mpw" => Ok(mpw()),
        "log-example" => Ok(log_example()),
        "nexp" => Ok(nexp()),
        "double-caustic" => Ok(double_caustic()),
        _ => {
            if let Some(n) = key.strip_prefix("wilmshurst:") {
                let n: usize = n
                    .parse()
                    .map_err(|_| Error::InvalidSpec(format!("bad degree in {key}")))?;
                return wilmshurst(n);
            }
            if let Some(rest) = key.strip_prefix("power:") {
                let parts: Vec<&str> = rest.split(':').collect();
                if let [n, m] = parts[..] {
                    let n = n.parse().map_err(|_| Error::InvalidSpec(key.into()))?;
                    let m = m.parse().map_err(|_| Error::InvalidSpec(key.into()))?;
                    return power_pair(n, m);
                }
            }
            Err(Error::InvalidSpec(format!("unknown map '{key}'")))
        }
    }
}

/// `z + conj(-z^2 / (z^3 - 0.216))`
pub fn mpw() -> HarmonicMap {
    let g = RationalFn::new(
        Poly::monomial(-ONE, 2),
        Poly::from_real(&[-0.216, 0.0, 0.0, 1.0]),
    );
    HarmonicMap::new(Poly::monomial(ONE, 1).into(), g, Vec::new()).unwrap()
}

/// `z^2 + conj(1/z + 1/(z+1)) + 2 log|z|`
pub fn log_example() -> HarmonicMap {
    let g = RationalFn::simple_pole(ONE, ZERO).add(&RationalFn::simple_pole(ONE, -ONE));
    HarmonicMap::new(
        Poly::monomial(ONE, 2).into(),
        g,
        vec![LogTerm {
            s: ZERO,
            c: Cx::new(2.0, 0.0),
        }],
    )
    .unwrap()
}

/// `z^n + (z-1)^n + conj(i z^n - i (z-1)^n)`
pub fn wilmshurst(n: usize) -> Result<HarmonicMap> {
    if n < 2 {
        return Err(Error::InvalidSpec(format!("wilmshurst needs n >= 2, got {n}")));
    }
    let zn = Poly::monomial(ONE, n);
    let shifted = Poly::linear_factor(ONE).pow(n as u32);
    HarmonicMap::polynomial(zn.add(&shifted), zn.sub(&shifted).scale(I))
}

/// `z^3/3 + conj(z^2/2)`
pub fn nexp() -> HarmonicMap {
    power_pair(3, 2).unwrap()
}

/// `z^n/n + conj(z^m/m)` with `n > m >= 1`.
pub fn power_pair(n: usize, m: usize) -> Result<HarmonicMap> {
    if !(n > m && m >= 1) {
        return Err(Error::InvalidSpec(format!("power pair needs n > m >= 1, got {n}, {m}")));
    }
    HarmonicMap::polynomial(
        Poly::monomial(Cx::new(1.0 / n as f64, 0.0), n),
        Poly::monomial(Cx::new(1.0 / m as f64, 0.0), m),
    )
}

/// `p^2/2 + conj(p)` with `p = z^2 - 1`; its caustic is traced twice.
pub fn double_caustic() -> HarmonicMap {
    let p = Poly::from_real(&[-1.0, 0.0, 1.0]);
    HarmonicMap::polynomial(p.mul(&p).scale(Cx::new(0.5, 0.0)), p).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_resolve() {
        for k in KEYS {
            assert!(by_key(k).is_ok(), "{k}");
        }
        assert!(by_key("wilmshurst:7").is_ok());
        assert!(by_key("power:4:2").is_ok());
        assert!(by_key("double-caustic").is_ok());
        assert!(by_key("nope").is_err());
        assert!(by_key("wilmshurst:x").is_err());
    }

    #[test]
    fn wilmshurst_coefficients() {
        let w = wilmshurst(3).unwrap();
        // (z-1)^3 = z^3 - 3z^2 + 3z - 1
        let h: Vec<Cx> = w.h().num().coeffs().to_vec();
        assert_eq!(h, vec![-ONE, Cx::new(3.0, 0.0), Cx::new(-3.0, 0.0), Cx::new(2.0, 0.0)]);
        let g = w.g().num().coeffs();
        assert_eq!(g.len(), 3);
        assert!((g[2] - Cx::new(0.0, 3.0)).norm() < 1e-15);
    }
}
