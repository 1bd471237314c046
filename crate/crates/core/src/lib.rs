//! Exact riffle-shuffle measures for finite Coxeter groups and real
//! hyperplane arrangements.
//!
//! * [`coxeter`]: root systems, element enumeration, descents, parabolics.
//! * [`descent`]: the descent algebra, its idempotents and the shuffle
//!   measures they generate.
//! * [`arrangement`]: intersection lattices, faces, the hyperplane walk and
//!   its spectrum.
//! * [`cellini`]: the affine cyclic-descent measures and their convolution.
//! * [`shuffle`]: physical shuffle models, exact laws and Monte Carlo.

pub mod algebra;
pub mod arrangement;
pub mod cellini;
pub mod coxeter;
pub mod descent;
pub mod error;
pub mod field;
pub mod linalg;
pub mod poly;
pub mod shuffle;
pub mod verify;

pub use error::{Error, Result};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

/// Formats a rational as `"p/q"`, always with an explicit denominator.
pub fn format_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"0.25"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = whole.starts_with('-');
        let w: BigInt = if whole.is_empty() || whole == "-" { BigInt::zero() } else { whole.parse().map_err(|_| bad())? };
        let f: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let f = BigRational::new(f, scale);
        let w = BigRational::from_integer(w);
        return Ok(if neg { w - f } else { w + f });
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;

    #[test]
    fn rational_round_trip() {
        assert_eq!(format_rational(&rat(3, 1)), "3/1");
        assert_eq!(format_rational(&rat(-2, 4)), "-1/2");
        assert_eq!(parse_rational("-1/2").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), rat(7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }
}
