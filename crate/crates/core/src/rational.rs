//! Exact integer and rational helpers for the combinatorial prefactors.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `binom(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Nearest double; panics only if the value overflows `f64`.
pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().expect("rational fits in f64")
}

/// `1 / ((2m+1)! binom(2m, m))`, the prefactor of the optimal short-time coefficient.
pub fn coefficient_prefactor(m: u64) -> BigRational {
    ratio(BigInt::one(), factorial(2 * m + 1) * binomial(2 * m, m))
}

/// `2 binom(2m, m) / (2m+1)!`, the prefactor of a single trajectory's coefficient.
pub fn trajectory_prefactor(m: u64) -> BigRational {
    ratio(BigInt::from(2) * binomial(2 * m, m), factorial(2 * m + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(factorial(0), BigInt::one());
        assert_eq!(factorial(7), BigInt::from(5040));
        assert_eq!(binomial(6, 3), BigInt::from(20));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(binomial(40, 20), BigInt::from(137_846_528_820u64));
    }

    #[test]
    fn prefactors() {
        assert_eq!(coefficient_prefactor(0), int(1));
        assert_eq!(coefficient_prefactor(1), ratio(1.into(), 12.into()));
        assert_eq!(coefficient_prefactor(3), ratio(1.into(), 100_800.into()));
        assert_eq!(trajectory_prefactor(1), ratio(2.into(), 3.into()));
    }
}
