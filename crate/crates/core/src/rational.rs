//! Exact scalar arithmetic: arbitrary-precision rationals and permutation signs.
//!
//! Every coefficient in the library is a [`Rational`]. There is no floating
//! point anywhere; all equality checks are exact.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};
use std::str::FromStr;

use crate::error::{AlgebraError, Result};

/// The base field: reduced fractions of arbitrary-precision integers.
///
/// `BigRational` keeps gcd(numerator, denominator) = 1 and denominator > 0
/// after every operation, so structural equality is mathematical equality.
pub type Rational = BigRational;

/// Rational from an integer numerator and denominator. Panics on zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Rational from an integer.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Trait-free zero test, for callers without the `num` traits in scope.
pub fn is_zero(r: &Rational) -> bool {
    r.numer().is_zero()
}

/// Canonical text form: `p` for integers, `p/q` with q > 1 and gcd(|p|, q) = 1 otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse a rational in canonical text form only.
///
/// Rejects non-reduced fractions (`4/6`), redundant denominators (`3/1`),
/// signs on the denominator, leading zeros and anything `BigInt` would not
/// print back identically. This keeps file round-trips byte-stable.
pub fn parse_rational(s: &str) -> std::result::Result<Rational, String> {
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let num = BigInt::from_str(num_str).map_err(|_| format!("bad integer `{num_str}`"))?;
    if num.to_string() != num_str {
        return Err(format!("non-canonical integer `{num_str}`"));
    }
    let den = match den_str {
        None => BigInt::one(),
        Some(d) => {
            let den = BigInt::from_str(d).map_err(|_| format!("bad integer `{d}`"))?;
            if den.to_string() != d {
                return Err(format!("non-canonical integer `{d}`"));
            }
            if !den.is_positive() {
                return Err(format!("denominator must be positive in `{s}`"));
            }
            if den.is_one() {
                return Err(format!("redundant denominator in `{s}`"));
            }
            den
        }
    };
    if num.gcd(&den) != BigInt::one() && !(num.is_zero() && den.is_one()) {
        return Err(format!("non-reduced fraction `{s}`"));
    }
    Ok(Rational::new_raw(num, den))
}

/// Signature of a permutation of `1..=k`, given 1-based.
///
/// Returns +1 or -1 as a [`Rational`]; errors when the input is not a
/// permutation.
pub fn perm_sign(perm: &[usize]) -> Result<Rational> {
    let k = perm.len();
    let mut seen = vec![false; k];
    for &p in perm {
        if p == 0 || p > k || seen[p - 1] {
            return Err(AlgebraError::NotAPermutation {
                input: perm.to_vec(),
                expected: k,
            });
        }
        seen[p - 1] = true;
    }
    let mut inversions = 0usize;
    for i in 0..k {
        for j in i + 1..k {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    Ok(if inversions % 2 == 0 { int(1) } else { int(-1) })
}

/// Sort a slice ascending, returning `None` on a repeated value and
/// otherwise whether the sort permutation was odd.
pub(crate) fn sort_with_sign(slice: &mut [usize]) -> Option<bool> {
    let mut odd = false;
    for i in 1..slice.len() {
        let mut j = i;
        while j > 0 && slice[j - 1] > slice[j] {
            slice.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
        if j > 0 && slice[j - 1] == slice[j] {
            return None;
        }
    }
    Some(odd)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perm_sign_identity_is_plus_one() {
        assert_eq!(perm_sign(&[1, 2, 3]).unwrap(), int(1));
    }

    #[test]
    fn perm_sign_transposition_is_minus_one() {
        assert_eq!(perm_sign(&[2, 1, 3]).unwrap(), int(-1));
    }

    #[test]
    fn perm_sign_three_cycle() {
        // (2,3,1) has inversions (2,1) and (3,1): even.
        assert_eq!(perm_sign(&[2, 3, 1]).unwrap(), int(1));
    }

    #[test]
    fn perm_sign_rejects_non_permutations() {
        assert!(perm_sign(&[1, 1, 2]).is_err());
        assert!(perm_sign(&[0, 1]).is_err());
        assert!(perm_sign(&[1, 3]).is_err());
    }

    #[test]
    fn parse_canonical_round_trip() {
        for s in ["0", "1", "-1", "3/2", "-7/3", "100000000000000000000/7"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
    }

    #[test]
    fn parse_rejects_non_canonical() {
        for s in ["4/6", "3/1", "1/-2", "-0", "+1", "01", "0/5", "", "1/0", "a"] {
            assert!(parse_rational(s).is_err(), "should reject `{s}`");
        }
    }

    #[test]
    fn sort_with_sign_counts_parity() {
        let mut v = vec![3, 1, 2];
        assert_eq!(sort_with_sign(&mut v), Some(false));
        assert_eq!(v, vec![1, 2, 3]);
        let mut w = vec![2, 1];
        assert_eq!(sort_with_sign(&mut w), Some(true));
        let mut dup = vec![1, 1];
        assert_eq!(sort_with_sign(&mut dup), None);
    }
}
