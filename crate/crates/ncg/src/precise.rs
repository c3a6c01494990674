//! High-precision fixed-point arithmetic for the component-size constant.
//!
//! The constant for a margin `eps` is the smallest integer `N >= 26` such
//! that for all component sizes `s >= N`
//!
//! ```text
//! (16/eps) * 5^(2*sqrt(2*log5(s)) + 10) / s  <  1/16
//! ```
//!
//! i.e. the degree upper bound drops below the universal `2 + 1/16` lower
//! bound. The left side is strictly decreasing for `s > 25` (its log-domain
//! derivative is negative exactly when `log5(s) > 2`), so the set of sizes
//! satisfying the inequality is upward closed and the threshold is found by
//! galloping followed by bisection.
//!
//! The thresholds sit near 10^19..10^21 where consecutive integers move the
//! inequality by only ~10^-20, far below what `f64` resolves. All evaluation
//! here happens in fixed-point arithmetic with 384 fractional bits (about 115
//! decimal digits); comparisons inside the guard margin abort rather
//! than return a wrong answer.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PreciseError {
    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(String),
}

/// Fractional bits of the fixed-point representation.
const FRAC_BITS: u64 = 384;

/// Comparisons are trusted only when the sides differ by more than 2^-128
/// (about 3e-39); accumulated rounding error stays below 2^-370, and near the
/// thresholds consecutive integers move the sides by ~1e-22.
const GUARD_SHIFT: u64 = 128;

/// Fixed-point number: `value = inner / 2^FRAC_BITS`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Fix(BigInt);

impl Fix {
    fn from_int(v: u64) -> Fix {
        Fix(BigInt::from(v) << FRAC_BITS)
    }

    fn from_biguint(v: &BigUint) -> Fix {
        Fix(BigInt::from(v.clone()) << FRAC_BITS)
    }

    /// `p / q` rounded toward zero; one ulp of error.
    fn from_ratio(p: &BigInt, q: &BigInt) -> Fix {
        Fix((p << FRAC_BITS) / q)
    }

    fn add(&self, other: &Fix) -> Fix {
        Fix(&self.0 + &other.0)
    }

    fn sub(&self, other: &Fix) -> Fix {
        Fix(&self.0 - &other.0)
    }

    fn mul(&self, other: &Fix) -> Fix {
        Fix((&self.0 * &other.0) >> FRAC_BITS)
    }

    fn mul_int(&self, k: u64) -> Fix {
        Fix(&self.0 * BigInt::from(k))
    }

    fn div_int(&self, k: u64) -> Fix {
        Fix(&self.0 / BigInt::from(k))
    }

    fn div(&self, other: &Fix) -> Fix {
        Fix((&self.0 << FRAC_BITS) / &other.0)
    }

    /// Floor square root; requires a nonnegative value.
    fn sqrt(&self) -> Fix {
        assert!(
            !self.0.is_negative(),
            "sqrt of a negative fixed-point value"
        );
        Fix((&self.0 << FRAC_BITS).sqrt())
    }
}

fn ln2() -> &'static Fix {
    static LN2: OnceLock<Fix> = OnceLock::new();
    // ln 2 = 2 atanh(1/3).
    LN2.get_or_init(|| atanh(&Fix::from_ratio(&BigInt::one(), &BigInt::from(3))).mul_int(2))
}

/// atanh via its power series; the argument must satisfy |z| <= 1/3, where
/// the terms decay by at least 9x per step.
fn atanh(z: &Fix) -> Fix {
    let z2 = z.mul(z);
    let mut power = z.clone();
    let mut sum = z.clone();
    let mut odd = 1u64;
    loop {
        power = power.mul(&z2);
        odd += 2;
        let term = power.div_int(odd);
        if term.0.is_zero() {
            break;
        }
        sum = sum.add(&term);
    }
    sum
}

/// Natural log of a positive fixed-point value: normalize into [1, 2) and
/// apply `ln x = k ln 2 + 2 atanh((y-1)/(y+1))`.
fn ln(x: &Fix) -> Fix {
    assert!(x.0.is_positive(), "ln of a nonpositive fixed-point value");
    let bits = x.0.bits();
    let k = bits as i64 - 1 - FRAC_BITS as i64;
    let y = if k >= 0 {
        Fix(&x.0 >> k as u64)
    } else {
        Fix(&x.0 << (-k) as u64)
    };
    let one = Fix::from_int(1);
    let z = y.sub(&one).div(&y.add(&one));
    let mantissa_ln = atanh(&z).mul_int(2);
    let scale = Fix(&ln2().0 * BigInt::from(k));
    mantissa_ln.add(&scale)
}

fn ln_biguint(v: &BigUint) -> Fix {
    ln(&Fix::from_biguint(v))
}

/// Whether `(16/eps) * 5^(2*sqrt(2*log5(size)) + 10) / size < 1/16`, decided
/// in log domain: `ln(256/eps) + (2*sqrt(2 L) + 10) ln 5 < ln size` with
/// `L = ln size / ln 5`.
pub fn size_inequality_holds(size: &BigUint, eps: &BigRational) -> Result<bool, PreciseError> {
    if !eps.is_positive() {
        return Err(PreciseError::NonPositiveEpsilon(eps.to_string()));
    }
    let ln_n = ln_biguint(size);
    let ln5 = ln_biguint(&BigUint::from(5u32));
    let log5_n = ln_n.div(&ln5);
    let root = log5_n.mul_int(2).sqrt();
    let lhs = ln_biguint(&BigUint::from(256u32))
        .add(&ln(&Fix::from_ratio(eps.denom(), eps.numer())))
        .add(&ln5.mul_int(10))
        .add(&root.mul(&ln5).mul_int(2));
    let rhs = ln_n;
    let diff = rhs.sub(&lhs);
    let guard = BigInt::one() << (FRAC_BITS - GUARD_SHIFT);
    assert!(
        diff.0.magnitude() >= guard.magnitude(),
        "comparison within the fixed-point guard margin; raise FRAC_BITS"
    );
    Ok(diff.0.is_positive())
}

/// Smallest integer `N >= 26` from which the size inequality holds for every
/// larger component size. Strict monotone decrease beyond 25 makes the
/// satisfying set upward closed, so galloping plus bisection finds the
/// threshold without touching the (astronomically many) sizes in between.
pub fn component_size_bound(eps: &BigRational) -> Result<BigUint, PreciseError> {
    if !eps.is_positive() {
        return Err(PreciseError::NonPositiveEpsilon(eps.to_string()));
    }
    let start = BigUint::from(26u32);
    if size_inequality_holds(&start, eps)? {
        return Ok(start);
    }
    let mut lo = start;
    let mut hi = BigUint::from(52u32);
    while !size_inequality_holds(&hi, eps)? {
        lo = hi.clone();
        hi = &hi * BigUint::from(4u32);
    }
    // invariant: inequality fails at lo, holds at hi
    while &hi - &lo > BigUint::one() {
        let mid = (&lo + &hi) >> 1;
        if size_inequality_holds(&mid, eps)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
