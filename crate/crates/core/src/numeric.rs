//! Exact-rational and log-space helpers shared by the ensemble and
//! entanglement code.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// The deformation parameter `q`, kept exact when it was given as a rational.
#[derive(Clone, Debug, PartialEq)]
pub struct Deformation {
    value: f64,
    exact: Option<BigRational>,
}

impl Deformation {
    pub fn new(value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidParameter(format!("q must be positive, got {value}")));
        }
        Ok(Deformation { value, exact: BigRational::from_float(value) })
    }

    pub fn rational(q: BigRational) -> Result<Self> {
        if !q.is_positive() {
            return Err(Error::InvalidParameter(format!("q must be positive, got {q}")));
        }
        let value = ratio_to_f64(&q);
        Ok(Deformation { value, exact: Some(q) })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact(&self) -> Option<&BigRational> {
        self.exact.as_ref()
    }

    pub fn ln(&self) -> f64 {
        match &self.exact {
            Some(r) => ln_ratio(r),
            None => self.value.ln(),
        }
    }
}

impl fmt::Display for Deformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl FromStr for Deformation {
    type Err = Error;

    /// Accepts `p/q` fractions and decimal literals (optionally with an
    /// exponent); both are converted exactly.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidParameter(format!("cannot parse q from {s:?}"));
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            return Deformation::rational(BigRational::new(n, d));
        }
        let (mant, exp) = match s.find(['e', 'E']) {
            Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
            None => (s, 0),
        };
        let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        let digits = format!("{int}{frac}");
        let num: BigInt = digits.parse().map_err(|_| bad())?;
        let scale = exp - frac.len() as i32;
        let ten = BigInt::from(10u32);
        let r = if scale >= 0 {
            BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
        } else {
            BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
        };
        Deformation::rational(r)
    }
}

/// `x^k` for an integer exponent of either sign.
pub fn ratio_pow(x: &BigRational, k: i64) -> BigRational {
    let p = num_traits::pow(x.clone(), k.unsigned_abs() as usize);
    if k >= 0 {
        p
    } else {
        p.recip()
    }
}

/// Natural log of a positive big integer without overflowing `f64`.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(1.0);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn ln_ratio(x: &BigRational) -> f64 {
    assert!(x.is_positive(), "log of a non-positive rational");
    let n = x.numer().magnitude();
    let d = x.denom().magnitude();
    ln_biguint(n) - ln_biguint(d)
}

/// Converts a rational to `f64` by way of its logarithm when the parts are
/// too large for a direct conversion.
pub fn ratio_to_f64(x: &BigRational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    if let Some(v) = x.to_f64() {
        if v.is_finite() && v != 0.0 {
            return v;
        }
    }
    let sign = if x.numer().sign() == Sign::Minus { -1.0 } else { 1.0 };
    sign * ln_ratio(&x.abs()).exp()
}

/// `ln Σ exp(x_i)` computed stably.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|&x| (x - m).exp()).sum::<f64>().ln()
}

/// Evaluates `Σ_k c_k t^k` exactly.
pub fn poly_eval_exact(coeffs: &[u64], t: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for &c in coeffs.iter().rev() {
        acc = acc * t + BigRational::from_integer(BigInt::from(c));
    }
    acc
}

/// `ln Σ_k c_k exp(k·ln_t)` for nonnegative coefficients.
pub fn poly_ln_eval(coeffs: &[u64], ln_t: f64) -> f64 {
    let terms: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(k, &c)| (c as f64).ln() + k as f64 * ln_t)
        .collect();
    log_sum_exp(&terms)
}

pub fn one() -> BigRational {
    BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_exact_decimals() {
        let q: Deformation = "0.8".parse().unwrap();
        assert_eq!(q.exact().unwrap(), &BigRational::new(4.into(), 5.into()));
        let q: Deformation = "1/2".parse().unwrap();
        assert_eq!(q.value(), 0.5);
        let q: Deformation = "1.25e0".parse().unwrap();
        assert_eq!(q.exact().unwrap(), &BigRational::new(5.into(), 4.into()));
        let q: Deformation = "1e-2".parse().unwrap();
        assert_eq!(q.exact().unwrap(), &BigRational::new(1.into(), 100.into()));
        assert!("0".parse::<Deformation>().is_err());
        assert!("-1".parse::<Deformation>().is_err());
        assert!("abc".parse::<Deformation>().is_err());
    }

    #[test]
    fn big_logs() {
        let x = BigUint::from(3u32).pow(2000);
        assert!((ln_biguint(&x) - 2000.0 * 3f64.ln()).abs() < 1e-9);
        let r = BigRational::new(BigInt::from(7u32).pow(900), BigInt::from(5u32).pow(1000));
        assert!((ln_ratio(&r) - (900.0 * 7f64.ln() - 1000.0 * 5f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn lse_matches_direct() {
        let xs = [0.1, -2.0, 3.5];
        let direct: f64 = xs.iter().map(|x: &f64| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(&xs) - direct).abs() < 1e-12);
    }
}
