//! Parsers for command-line values: rationals, words, windows and grids.

use std::ops::RangeInclusive;
use std::str::FromStr;

use cfmetric_core::cf::Word;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow};

/// `"p/q"`, an integer, or a finite decimal such as `"0.7"`, exactly.
pub fn rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    if let Ok(r) = BigRational::from_str(s) {
        return Ok(r);
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').ok_or_else(|| format!("{s:?} is not a rational (use p/q)"))?;
    if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || !int.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("{s:?} is not a rational (use p/q)"));
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| format!("{s:?} is not a rational"))?;
    let den: BigInt = BigInt::from(10u32).pow(frac.len());
    let r = BigRational::new(digits, den);
    Ok(if neg { -r } else { r })
}

/// Quotients separated by spaces or commas; `""` is the empty word.
pub fn word(s: &str) -> Result<Word, String> {
    let q: Result<Vec<BigUint>, String> = s
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<BigUint>().map_err(|_| format!("{t:?} is not a positive integer")))
        .collect();
    Word::new(q?).map_err(|e| e.to_string())
}

/// `"a:b"` as an inclusive window.
pub fn window(s: &str) -> Result<RangeInclusive<usize>, String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("window {s:?} must look like start:end"))?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad window start in {s:?}"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad window end in {s:?}"))?;
    if a == 0 || a > b {
        return Err(format!("window {s:?} must satisfy 1 <= start <= end"));
    }
    Ok(a..=b)
}

/// Comma-separated floats.
pub fn grid(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| format!("{t:?} is not a number")))
        .collect()
}

/// Rational as `p/q`, or `p` for integers.
pub fn show_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        assert_eq!(show_rational(&rational("7/10").unwrap()), "7/10");
        assert_eq!(show_rational(&rational("0.7").unwrap()), "7/10");
        assert_eq!(show_rational(&rational("3").unwrap()), "3");
        assert_eq!(show_rational(&rational("-1.25").unwrap()), "-5/4");
        assert!(rational("x").is_err() && rational("1.").is_err() && rational("1/0").is_err());
    }

    #[test]
    fn words_windows_grids() {
        assert_eq!(word("1 2,3").unwrap().to_string(), "1 2 3");
        assert!(word("").unwrap().is_empty());
        assert!(word("1 0").is_err());
        assert_eq!(window("100:10000").unwrap(), 100..=10000);
        assert!(window("5:4").is_err() && window("0:3").is_err() && window("7").is_err());
        assert_eq!(grid("1.5, 2,4").unwrap(), vec![1.5, 2.0, 4.0]);
    }
}
