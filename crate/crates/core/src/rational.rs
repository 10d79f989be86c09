//! Exact arithmetic helpers shared by the rule kernels and the measures.

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};

/// Arbitrary precision fraction, always kept in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

pub fn from_uint(v: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(v.clone()))
}

pub fn from_u64(v: u64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: u64, den: u64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `n choose k` as an exact integer (zero when `k > n`).
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Renders `num/den` (integers render without a denominator).
pub fn format_exact(r: &Rational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Plain decimal with 15 significant digits, trailing zeros trimmed.
pub fn format_decimal(r: &Rational) -> String {
    format_f64(to_f64(r))
}

pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = 14 - magnitude;
    if !(0..=40).contains(&decimals) {
        return format!("{:.14e}", x);
    }
    let s = format!("{:.*}", decimals as usize, x);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
