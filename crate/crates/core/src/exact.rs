//! Exact threshold arithmetic.
//!
//! Parameters arrive as `f64`, but every comparison between an integer count
//! and a real threshold is decided on the exact dyadic value of the float.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(x: f64) -> Q {
    BigRational::from_float(x).expect("finite parameter")
}

pub fn qi(x: i64) -> Q {
    BigRational::from_integer(BigInt::from(x))
}

pub fn ratio(num: usize, den: usize) -> Q {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn ceil_i64(x: &Q) -> i64 {
    x.ceil().to_integer().to_i64().expect("threshold fits i64")
}

pub fn floor_i64(x: &Q) -> i64 {
    x.floor().to_integer().to_i64().expect("threshold fits i64")
}

/// Smallest integer `k` with `k >= x`.
pub fn at_least(x: &Q) -> i64 {
    ceil_i64(x)
}

/// Largest integer `k` with `k <= x`.
pub fn at_most(x: &Q) -> i64 {
    floor_i64(x)
}

/// Smallest integer `k` with `k > x`.
pub fn above(x: &Q) -> i64 {
    floor_i64(x) + 1
}

/// Largest integer `k` with `k < x`.
pub fn below(x: &Q) -> i64 {
    ceil_i64(x) - 1
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// Integer window `[lo, hi]` for counts `c` with `(center - slack) * size <= c <= (center + slack) * size`.
pub fn window(center: &Q, slack: &Q, size: usize) -> (i64, i64) {
    let s = qi(size as i64);
    (
        at_least(&((center - slack) * &s)),
        at_most(&((center + slack) * &s)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundaries_are_exact() {
        // the double nearest 0.1 is slightly above it, so the product sits just under 4
        let lo = (q(0.5) - q(0.1)) * qi(10);
        assert_eq!(at_least(&lo), 4);
        assert_eq!(above(&qi(3)), 4);
        assert_eq!(below(&qi(3)), 2);
        assert_eq!(at_least(&ratio(7, 2)), 4);
        assert_eq!(at_most(&ratio(7, 2)), 3);
        assert_eq!(below(&ratio(7, 2)), 3);
        assert_eq!(above(&(qi(-1) / qi(2))), 0);
    }

    #[test]
    fn window_of_integral_thresholds() {
        let (lo, hi) = window(&ratio(1, 2), &ratio(1, 4), 8);
        assert_eq!((lo, hi), (2, 6));
    }
}
