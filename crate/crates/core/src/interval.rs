//! Certified fixed-point interval arithmetic.
//!
//! A value is a pair of integer mantissas `lo <= hi` at scale `2^BITS`;
//! the represented real always lies in `[lo, hi] / 2^BITS`. Every operation
//! rounds the lower end down and the upper end up, so enclosures stay
//! valid through arbitrarily long recurrences.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::rational::{to_f64, Rational};

#[derive(Clone, PartialEq, Eq)]
pub struct FixedInterval<const BITS: u32> {
    lo: BigInt,
    hi: BigInt,
}

/// The precision used for high-order asymptotic checks.
pub type Interval256 = FixedInterval<256>;

fn div_ceil(a: &BigInt, d: &BigInt) -> BigInt {
    -((-a).div_floor(d))
}

impl<const BITS: u32> FixedInterval<BITS> {
    fn scale() -> BigInt {
        BigInt::from(1) << BITS
    }

    pub fn zero() -> Self {
        FixedInterval {
            lo: BigInt::zero(),
            hi: BigInt::zero(),
        }
    }

    pub fn one() -> Self {
        FixedInterval {
            lo: Self::scale(),
            hi: Self::scale(),
        }
    }

    /// Tightest enclosure of `r` at this precision.
    pub fn from_rational(r: &Rational) -> Self {
        let scaled = r.numer() * Self::scale();
        FixedInterval {
            lo: scaled.div_floor(r.denom()),
            hi: div_ceil(&scaled, r.denom()),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        FixedInterval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        FixedInterval {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let scale = Self::scale();
        let (lo, hi) = if !self.lo.is_negative() && !o.lo.is_negative() {
            (&self.lo * &o.lo, &self.hi * &o.hi)
        } else {
            let products = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
            let lo = products.iter().min().expect("four products").clone();
            let hi = products.iter().max().expect("four products").clone();
            (lo, hi)
        };
        FixedInterval {
            lo: lo.div_floor(&scale),
            hi: div_ceil(&hi, &scale),
        }
    }

    pub fn mul_u64(&self, k: u64) -> Self {
        FixedInterval {
            lo: &self.lo * k,
            hi: &self.hi * k,
        }
    }

    pub fn div_u64(&self, d: u64) -> Self {
        let d = BigInt::from(d);
        FixedInterval {
            lo: self.lo.div_floor(&d),
            hi: div_ceil(&self.hi, &d),
        }
    }

    pub fn lower(&self) -> Rational {
        Rational::new(self.lo.clone(), Self::scale())
    }

    pub fn upper(&self) -> Rational {
        Rational::new(self.hi.clone(), Self::scale())
    }

    pub fn contains(&self, r: &Rational) -> bool {
        &self.lower() <= r && r <= &self.upper()
    }

    pub fn is_zero(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }

    pub fn midpoint(&self) -> f64 {
        to_f64(&Rational::new(&self.lo + &self.hi, Self::scale() * 2))
    }

    /// `hi - lo` as a real number.
    pub fn width(&self) -> f64 {
        let w = &self.hi - &self.lo;
        w.to_f64().unwrap_or(f64::INFINITY) * 2f64.powi(-(BITS as i32))
    }
}

impl<const BITS: u32> fmt::Debug for FixedInterval<BITS> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} ± {:e}", self.midpoint(), self.width() / 2.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    type I = FixedInterval<64>;

    #[test]
    fn enclosures_hold() {
        let third = I::from_rational(&ratio(1, 3));
        assert!(third.contains(&ratio(1, 3)));
        let sum = third.add(&third).add(&third);
        assert!(sum.contains(&ratio(1, 1)));
        let prod = third.mul(&I::from_rational(&ratio(-3, 7)));
        assert!(prod.contains(&ratio(-1, 7)));
        let q = I::from_rational(&ratio(5, 1)).div_u64(3).mul_u64(3);
        assert!(q.contains(&ratio(5, 1)));
        assert!(sum.sub(&I::one()).contains(&ratio(0, 1)));
        assert!(prod.width() < 1e-17);
    }

    #[test]
    fn long_products_stay_certified() {
        let mut acc = I::one();
        let mut exact = ratio(1, 1);
        for i in 1..200i64 {
            let f = ratio(i + 1, i + 2) * ratio(-1, 1);
            acc = acc.mul(&I::from_rational(&f));
            exact *= f;
        }
        assert!(acc.contains(&exact));
        assert!((acc.midpoint() - crate::rational::to_f64(&exact)).abs() < 1e-15);
    }
}
