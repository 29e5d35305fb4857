use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A coordinate value: an exact rational in lowest terms or a finite binary64.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn float(x: f64) -> Result<Self> {
        if x.is_finite() {
            Ok(Scalar::Float(x))
        } else {
            Err(Error::NonFinite)
        }
    }

    pub fn ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(Scalar::Exact(BigRational::new(num.into(), den.into())))
    }

    pub fn int(n: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(n.into()))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => rational_to_f64(q),
            Scalar::Float(x) => *x,
        }
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Both parts overflow f64: shift them down together.
    let bits = q.numer().bits().max(q.denom().bits());
    let shift = bits.saturating_sub(1000);
    let n: BigInt = q.numer() >> shift;
    let d: BigInt = q.denom() >> shift;
    n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
}

/// Convert a big integer to f64, scaled by 2^-shift.
pub fn int_to_f64_scaled(n: &BigInt, shift: u64) -> f64 {
    let v: BigInt = if shift > 0 { n >> shift } else { n.clone() };
    let x = v.to_f64().unwrap_or(0.0);
    if n.is_negative() && x == 0.0 && !n.is_zero() {
        -0.0
    } else {
        x
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => write!(f, "{}:{}", q.numer(), q.denom()),
            Scalar::Float(x) => write!(f, "{}", fmt_f64(*x)),
        }
    }
}

/// 17 significant digits, exponent form; negative zero prints as zero.
pub fn fmt_f64(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once(':') {
            let n: BigInt = n.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
            let d: BigInt = d.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            return Ok(Scalar::Exact(BigRational::new(n, d)));
        }
        if let Ok(n) = s.parse::<BigInt>() {
            return Ok(Scalar::Exact(BigRational::from_integer(n)));
        }
        let x: f64 = s.parse().map_err(|_| Error::Parse(format!("bad number {s:?}")))?;
        Scalar::float(x)
    }
}
