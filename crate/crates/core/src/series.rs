//! Truncated power series with exact (or certified-interval) coefficients,
//! and the generating functions for fixed points on matchings and for
//! permutations conjugate into `S_a wr S_n`.
//!
//! Even series in `t` are stored in `u = t^2`: index `n` of a stored series
//! is the coefficient of `t^{2n}`. Orders passed to the matchings
//! generators are orders in `u`.

use std::fmt;

use num_traits::{One, Zero};
use serde_json::json;

use crate::error::{domain, Error, Result};
use crate::interval::FixedInterval;
use crate::partitions::{cycle_count_proportions, rising_factorial_sum};
use crate::rational::{factorial, from_u64, from_uint, ratio, to_fraction_string, Rational};
use crate::special::{gamma, zeta};

/// Arithmetic a series coefficient must support.
pub trait Coefficient: Clone + Send + Sync + fmt::Debug {
    fn zero_value() -> Self;
    fn one_value() -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn mul_u64(&self, k: u64) -> Self;
    fn div_u64(&self, d: u64) -> Self;
    fn is_zero_value(&self) -> bool;
}

impl Coefficient for Rational {
    fn zero_value() -> Self {
        <Rational as Zero>::zero()
    }
    fn one_value() -> Self {
        <Rational as One>::one()
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn mul_u64(&self, k: u64) -> Self {
        self * from_u64(k)
    }
    fn div_u64(&self, d: u64) -> Self {
        self / from_u64(d)
    }
    fn is_zero_value(&self) -> bool {
        <Rational as Zero>::is_zero(self)
    }
}

impl<const BITS: u32> Coefficient for FixedInterval<BITS> {
    fn zero_value() -> Self {
        FixedInterval::zero()
    }
    fn one_value() -> Self {
        FixedInterval::one()
    }
    fn from_rational(r: &Rational) -> Self {
        FixedInterval::from_rational(r)
    }
    fn add(&self, o: &Self) -> Self {
        FixedInterval::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        FixedInterval::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        FixedInterval::mul(self, o)
    }
    fn mul_u64(&self, k: u64) -> Self {
        FixedInterval::mul_u64(self, k)
    }
    fn div_u64(&self, d: u64) -> Self {
        FixedInterval::div_u64(self, d)
    }
    fn is_zero_value(&self) -> bool {
        FixedInterval::is_zero(self)
    }
}

/// Coefficients `0..=order`; no operation reads or writes past `order`.
#[derive(Clone, PartialEq, Eq)]
pub struct PowerSeries<C = Rational> {
    coeffs: Vec<C>,
}

impl<C: Coefficient> PowerSeries<C> {
    /// Pads with zeros or truncates to exactly `order + 1` coefficients.
    pub fn new(mut coeffs: Vec<C>, order: usize) -> Self {
        coeffs.resize(order + 1, C::zero_value());
        PowerSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        PowerSeries::new(Vec::new(), order)
    }

    pub fn one(order: usize) -> Self {
        PowerSeries::new(vec![C::one_value()], order)
    }

    /// Builds from sparse `(degree, rational)` terms; degrees past `order`
    /// are dropped.
    pub fn from_terms(terms: &[(usize, Rational)], order: usize) -> Self {
        let mut s = Self::zero(order);
        for (d, c) in terms {
            if *d <= order {
                s.coeffs[*d] = s.coeffs[*d].add(&C::from_rational(c));
            }
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &C {
        &self.coeffs[n]
    }

    pub fn coefficients(&self) -> &[C] {
        &self.coeffs
    }

    fn check_same_order(&self, o: &Self) {
        assert_eq!(self.order(), o.order(), "series orders differ");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check_same_order(o);
        PowerSeries {
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.check_same_order(o);
        PowerSeries {
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check_same_order(o);
        let t = self.order();
        let mut out = vec![C::zero_value(); t + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero_value() {
                continue;
            }
            for (j, b) in o.coeffs[..=t - i].iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        PowerSeries { coeffs: out }
    }

    /// Product with a series given by its few nonzero `(degree, coeff)`
    /// terms.
    pub fn mul_sparse(&self, factor: &[(usize, C)]) -> Self {
        let t = self.order();
        let mut out = vec![C::zero_value(); t + 1];
        for (d, c) in factor {
            if *d > t {
                continue;
            }
            for (i, a) in self.coeffs[..=t - d].iter().enumerate() {
                out[i + d] = out[i + d].add(&a.mul(c));
            }
        }
        PowerSeries { coeffs: out }
    }

    /// `exp(self)` for a series with zero constant term, via
    /// `n B_n = sum_{k=1}^{n} k A_k B_{n-k}`.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero_value() {
            return domain("exp needs a zero constant term");
        }
        let t = self.order();
        let mut b = Vec::with_capacity(t + 1);
        b.push(C::one_value());
        let weighted: Vec<C> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| a.mul_u64(k as u64))
            .collect();
        for n in 1..=t {
            let mut acc = C::zero_value();
            for k in 1..=n {
                if !weighted[k].is_zero_value() {
                    acc = acc.add(&weighted[k].mul(&b[n - k]));
                }
            }
            b.push(acc.div_u64(n as u64));
        }
        Ok(PowerSeries { coeffs: b })
    }

    /// Reciprocal of a series with constant term one.
    pub fn inverse_unit(&self) -> Self {
        let t = self.order();
        let mut c = Vec::with_capacity(t + 1);
        c.push(C::one_value());
        for n in 1..=t {
            let mut acc = C::zero_value();
            for k in 1..=n {
                acc = acc.add(&self.coeffs[k].mul(&c[n - k]));
            }
            c.push(C::zero_value().sub(&acc));
        }
        PowerSeries { coeffs: c }
    }
}

impl PowerSeries<Rational> {
    /// `log(self)` for constant term one, via `n A_n = n B_n - sum k A_k B_{n-k}`.
    pub fn log(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return domain("log needs constant term 1");
        }
        let t = self.order();
        let mut a = vec![<Rational as Zero>::zero(); t + 1];
        for n in 1..=t {
            let mut acc = &self.coeffs[n] * from_u64(n as u64);
            for k in 1..n {
                acc -= &a[k] * from_u64(k as u64) * &self.coeffs[n - k];
            }
            a[n] = acc / from_u64(n as u64);
        }
        Ok(PowerSeries { coeffs: a })
    }

    /// Re-encodes every coefficient in another representation.
    pub fn convert<D: Coefficient>(&self) -> PowerSeries<D> {
        PowerSeries {
            coeffs: self.coeffs.iter().map(D::from_rational).collect(),
        }
    }

    /// `{"variable", "order", "coefficients": ["p/q", ...]}`. With
    /// [`Variable::T`] the stored `u`-series is written out in `t = sqrt(u)`,
    /// odd coefficients zero.
    pub fn to_json(&self, variable: Variable) -> serde_json::Value {
        let coeffs: Vec<String> = match variable {
            Variable::U => self.coeffs.iter().map(to_fraction_string).collect(),
            Variable::T => {
                let mut out = Vec::with_capacity(2 * self.coeffs.len());
                for (i, c) in self.coeffs.iter().enumerate() {
                    if i > 0 {
                        out.push("0/1".to_string());
                    }
                    out.push(to_fraction_string(c));
                }
                out
            }
        };
        let order = match variable {
            Variable::U => self.order(),
            Variable::T => 2 * self.order(),
        };
        json!({ "variable": variable.name(), "order": order, "coefficients": coeffs })
    }
}

impl<C: Coefficient> fmt::Debug for PowerSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.coeffs).finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    T,
    U,
}

impl Variable {
    pub fn name(&self) -> &'static str {
        match self {
            Variable::T => "t",
            Variable::U => "u",
        }
    }
}

/// `(1 - u)^{-1/2}`, coefficients `C(2n, n) / 4^n`.
pub fn inverse_sqrt_one_minus<C: Coefficient>(order: usize) -> PowerSeries<C> {
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut c = <Rational as One>::one();
    for n in 0..=order {
        if n > 0 {
            c = c * from_u64(2 * n as u64 - 1) / from_u64(2 * n as u64);
        }
        coeffs.push(C::from_rational(&c));
    }
    PowerSeries { coeffs }
}

/// `sum over n of (1 - P_{2n}(0)) u^n`, the probability that a uniform
/// element of `S_{2n}` fixes some perfect matching:
/// `prod over odd d of cosh(t^d / d)`, divided by `sqrt(1 - t^2)`.
pub fn matchings_nonderangement_series<C: Coefficient>(order: usize) -> PowerSeries<C> {
    let mut s = inverse_sqrt_one_minus::<C>(order);
    for d in (1..=order).step_by(2) {
        // cosh(t^d / d) = sum_m t^{2dm} / (d^{2m} (2m)!) = sum_m u^{dm} / ...
        let mut factor = vec![(0, C::one_value())];
        let mut m = 1;
        while d * m <= order {
            let denom = from_uint(&(num_bigint::BigUint::from(d as u64).pow(2 * m as u32) * factorial(2 * m as u64)));
            factor.push((d * m, C::from_rational(&(<Rational as One>::one() / denom))));
            m += 1;
        }
        s = s.mul_sparse(&factor);
    }
    s
}

/// One summand of `P_j`: a polynomial in `u` over `1 + c u^d`.
#[derive(Debug, Clone)]
pub struct RationalFunctionTerm {
    pub numerator: Vec<(usize, Rational)>,
    pub denominator: Option<(Rational, usize)>,
}

impl RationalFunctionTerm {
    pub fn at_one(&self) -> Rational {
        let num: Rational = self.numerator.iter().map(|(_, c)| c.clone()).sum();
        match &self.denominator {
            Some((c, _)) => num / (<Rational as One>::one() + c),
            None => num,
        }
    }

    pub fn expand<C: Coefficient>(&self, order: usize) -> PowerSeries<C> {
        let num = PowerSeries::<C>::from_terms(&self.numerator, order);
        match &self.denominator {
            None => num,
            Some((c, d)) => {
                // 1 / (1 + c u^d) = sum_m (-c)^m u^{dm}
                let mut terms = Vec::new();
                let mut power = <Rational as One>::one();
                let mut m = 0;
                while d * m <= order {
                    terms.push((d * m, C::from_rational(&power)));
                    power *= -c.clone();
                    m += 1;
                }
                num.mul_sparse(&terms)
            }
        }
    }
}

fn poly_product(scalar: Rational, factors: &[&[(usize, (i64, i64))]]) -> Vec<(usize, Rational)> {
    let mut acc: Vec<(usize, Rational)> = vec![(0, scalar)];
    for f in factors {
        let mut next: Vec<(usize, Rational)> = Vec::new();
        for (d1, c1) in &acc {
            for &(d2, (p, q)) in f.iter() {
                let d = d1 + d2;
                let c = c1 * ratio(p, q);
                match next.iter_mut().find(|(e, _)| *e == d) {
                    Some((_, existing)) => *existing += c,
                    None => next.push((d, c)),
                }
            }
        }
        acc = next;
    }
    acc.sort_by_key(|(d, _)| *d);
    acc
}

/// The rational functions `P_j`, written in `u = t^2`, for `j` in
/// `{1, 3, 5, 7}`.
pub fn pj_terms(j: usize) -> Result<Vec<RationalFunctionTerm>> {
    const ONE_PLUS_HALF_U: &[(usize, (i64, i64))] = &[(0, (1, 1)), (1, (1, 2))];
    let plain = |numerator| RationalFunctionTerm {
        numerator,
        denominator: None,
    };
    match j {
        1 => Ok(vec![plain(poly_product(ratio(1, 1), &[ONE_PLUS_HALF_U]))]),
        3 => Ok(vec![plain(poly_product(
            ratio(1, 1),
            &[&[(2, (1, 6)), (3, (1, 18)), (4, (1, 36))]],
        ))]),
        5 => Ok(vec![
            // (1/2)(1 + t^2/2)(t^4/4)^2 / (1 + t^4/4)
            RationalFunctionTerm {
                numerator: poly_product(ratio(1, 2), &[ONE_PLUS_HALF_U, &[(4, (1, 16))]]),
                denominator: Some((ratio(1, 4), 2)),
            },
            // (1/2)(1 + t^2/2)(t^5/5)^2
            plain(poly_product(ratio(1, 2), &[ONE_PLUS_HALF_U, &[(5, (1, 25))]])),
        ]),
        7 => Ok(vec![
            // (1/2)(1 + t^2/2)(t^6/6)^2 / (1 + t^6/6)
            RationalFunctionTerm {
                numerator: poly_product(ratio(1, 2), &[ONE_PLUS_HALF_U, &[(6, (1, 36))]]),
                denominator: Some((ratio(1, 6), 3)),
            },
            // (1/6)(t^2/2)^3
            plain(poly_product(ratio(1, 6), &[&[(3, (1, 8))]])),
            // (1/2)(1 + t^2/2)(t^7/7)^2
            plain(poly_product(ratio(1, 2), &[ONE_PLUS_HALF_U, &[(7, (1, 49))]])),
        ]),
        _ => {
            if j.is_multiple_of(2) {
                domain(format!("j = {j} is even; nonzero even fixed-point counts are impossible"))
            } else {
                Err(Error::Unsupported(format!("no closed form for P_{j}; only j in {{1, 3, 5, 7}}")))
            }
        }
    }
}

/// `P_j(1)`, the rational constant `C(j)` in the asymptotics of `P_{2n}(j)`.
pub fn pj_at_one(j: usize) -> Result<Rational> {
    Ok(pj_terms(j)?.iter().map(|t| t.at_one()).sum())
}

/// `sum over n of P_{2n}(j) u^n` for odd `j <= 7`:
/// `P_j(u) prod_{i >= 1} (1 + u^i / (2i))`.
pub fn matchings_j_series<C: Coefficient>(j: usize, order: usize) -> Result<PowerSeries<C>> {
    let terms = pj_terms(j)?;
    let mut pj = PowerSeries::<C>::zero(order);
    for t in &terms {
        pj = pj.add(&t.expand(order));
    }
    let mut prod = PowerSeries::<C>::one(order);
    for i in 1..=order {
        let c = Rational::new(1.into(), (2 * i as i64).into());
        prod = prod.mul_sparse(&[(0, C::one_value()), (i, C::from_rational(&c))]);
    }
    Ok(pj.mul(&prod))
}

/// A floating constant with a rigorous bound on its truncation error.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticConstant {
    pub value: f64,
    pub tail_bound: f64,
    pub description: String,
}

const HEAD_TERMS: usize = 1000;
const PI: f64 = std::f64::consts::PI;

/// `prod_{i <= n} cosh(1 / (2i - 1))` with no tail correction.
pub fn a1_partial_product(n: usize) -> f64 {
    (1..=n).rev().map(|i| (1.0 / (2 * i - 1) as f64).cosh().ln()).sum::<f64>().exp()
}

/// `A(1) = prod_{i >= 1} cosh(1 / (2i - 1))`, summing `ln cosh` directly for
/// `i <= head` and using `ln cosh x = x^2/2 - x^4/12 + R`, `|R| <= x^6/45`,
/// on the tail with the odd zeta sums `pi^2/8` and `pi^4/96`.
pub fn a1_with_head(head: usize) -> AsymptoticConstant {
    let x = |i: usize| 1.0 / (2 * i - 1) as f64;
    let head_log: f64 = (1..=head).rev().map(|i| x(i).cosh().ln()).sum();
    let head2: f64 = (1..=head).rev().map(|i| x(i).powi(2)).sum();
    let head4: f64 = (1..=head).rev().map(|i| x(i).powi(4)).sum();
    let tail2 = PI * PI / 8.0 - head2;
    let tail4 = PI.powi(4) / 96.0 - head4;
    let log_a = head_log + tail2 / 2.0 - tail4 / 12.0;
    // sum_{i > head} (2i - 1)^{-6} <= 1 / (10 (2 head - 1)^5)
    let remainder = 1.0 / (45.0 * 10.0 * ((2 * head - 1) as f64).powi(5));
    let rounding = 4.0 * head as f64 * f64::EPSILON;
    let value = log_a.exp();
    AsymptoticConstant {
        value,
        tail_bound: value * 1.01 * (remainder + rounding),
        description: "A(1) = prod_{i>=1} cosh(1/(2i-1))".into(),
    }
}

pub fn a1_constant() -> AsymptoticConstant {
    a1_with_head(HEAD_TERMS)
}

/// `B(1) = prod_{i >= 1} (1 + 1/(2i)) e^{-1/(2i)}`, with the tail handled by
/// `ln(1 + y) - y = -y^2/2 + y^3/3 - y^4/4 + R`, `|R| <= y^5/5`.
pub fn b1_with_head(head: usize) -> AsymptoticConstant {
    let y = |i: usize| 1.0 / (2 * i) as f64;
    let head_log: f64 = (1..=head).rev().map(|i| y(i).ln_1p() - y(i)).sum();
    let (z2, e2) = zeta(2);
    let (z3, e3) = zeta(3);
    let h2: f64 = (1..=head).rev().map(|i| 1.0 / (i as f64).powi(2)).sum();
    let h3: f64 = (1..=head).rev().map(|i| 1.0 / (i as f64).powi(3)).sum();
    let tail2 = (z2 - h2) / 4.0;
    let h4: f64 = (1..=head).rev().map(|i| 1.0 / (i as f64).powi(4)).sum();
    let tail3 = (z3 - h3) / 8.0;
    let tail4 = (PI.powi(4) / 90.0 - h4) / 16.0;
    let log_b = head_log - tail2 / 2.0 + tail3 / 3.0 - tail4 / 4.0;
    // sum_{i > head} (2i)^{-5} / 5 <= 1 / (160 * 4 head^4)
    let remainder = 1.0 / (640.0 * (head as f64).powi(4));
    let rounding = 4.0 * head as f64 * f64::EPSILON + e2 / 8.0 + e3 / 24.0;
    let value = log_b.exp();
    AsymptoticConstant {
        value,
        tail_bound: value * 1.01 * (remainder + rounding),
        description: "B(1) = prod_{i>=1} (1 + 1/(2i)) e^{-1/(2i)}".into(),
    }
}

pub fn b1_constant() -> AsymptoticConstant {
    b1_with_head(HEAD_TERMS)
}

/// `exp(sum_{k >= 1} u^k (1/k)(1/k + 1)...(1/k + a - 1) / a!)`, whose `u^n`
/// coefficient bounds the proportion of `S_{an}` conjugate into
/// `S_a wr S_n`.
pub fn wreath_bound_series<C: Coefficient>(a: usize, order: usize) -> Result<PowerSeries<C>> {
    if a == 0 {
        return domain("wreath_bound_series needs a >= 1");
    }
    let mut inner = vec![C::zero_value()];
    for k in 1..=order {
        inner.push(C::from_rational(&rising_factorial_sum(a, k)?));
    }
    PowerSeries::new(inner, order).exp()
}

/// Leading asymptotics `constant * n^exponent` of the wreath bound
/// coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct WreathAsymptotic {
    pub constant: AsymptoticConstant,
    pub exponent: f64,
}

/// `exp(sum_{r=2}^{a} p(a, r) zeta(r)) / Gamma(1/a)` and exponent
/// `1/a - 1`. For `a = 1` the sum is empty and this degenerates to `1 * n^0`.
pub fn wreath_bound_asymptotic(a: usize) -> Result<WreathAsymptotic> {
    let props = cycle_count_proportions(a)?;
    let mut log_sum = 0.0;
    let mut log_err = 0.0;
    for (r, p) in props.iter().enumerate().skip(1) {
        let (z, e) = zeta(r as u32 + 1);
        let p = crate::rational::to_f64(p);
        log_sum += p * z;
        log_err += p * e + f64::EPSILON * (p * z).abs();
    }
    let (g, g_rel) = gamma(1.0 / a as f64);
    let value = log_sum.exp() / g;
    let rel = log_err * 1.01 + g_rel * 1.01 + 4.0 * f64::EPSILON;
    Ok(WreathAsymptotic {
        constant: AsymptoticConstant {
            value,
            tail_bound: value * rel,
            description: format!("exp(sum_r p({a},r) zeta(r)) / Gamma(1/{a})"),
        },
        exponent: 1.0 / a as f64 - 1.0,
    })
}

/// Coefficient of `u^m` in the `a = m` wreath bound series, bounding the
/// proportion of `S_{m^2}` fixing a system of `m` blocks of size `m`.
pub fn block_system_bound(m: usize) -> Result<Rational> {
    if m == 0 {
        return domain("block_system_bound needs m >= 1");
    }
    Ok(wreath_bound_series::<Rational>(m, m)?.coeff(m).clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{derangement_proportion, distribution_matchings};
    use crate::interval::Interval256;
    use crate::rational::to_f64;
    use num_bigint::BigUint;
    use proptest::prelude::*;

    #[test]
    fn nonderangement_series_low_order() {
        let s = matchings_nonderangement_series::<Rational>(8);
        assert_eq!(s.coeff(0), &ratio(1, 1));
        assert_eq!(s.coeff(1), &ratio(1, 1));
        for n in 1..=8 {
            let d = distribution_matchings(2 * n).unwrap();
            assert_eq!(s.coeff(n), &(<Rational as One>::one() - derangement_proportion(&d)), "2n = {}", 2 * n);
        }
    }

    #[test]
    fn j_series_match_distributions() {
        for j in [1usize, 3, 5, 7] {
            let s = matchings_j_series::<Rational>(j, 8).unwrap();
            for n in 1..=8 {
                let d = distribution_matchings(2 * n).unwrap();
                assert_eq!(s.coeff(n), &d.probability(&BigUint::from(j)), "j = {j}, 2n = {}", 2 * n);
            }
        }
        assert_eq!(matchings_j_series::<Rational>(1, 3).unwrap().coeff(1), &ratio(1, 1));
    }

    #[test]
    fn pj_forms() {
        let p1 = pj_terms(1).unwrap();
        assert_eq!(p1[0].numerator, vec![(0, ratio(1, 1)), (1, ratio(1, 2))]);
        assert_eq!(pj_at_one(1).unwrap(), ratio(3, 2));
        assert_eq!(pj_at_one(3).unwrap(), ratio(1, 4));
        assert_eq!(pj_at_one(5).unwrap(), ratio(27, 400));
        assert_eq!(pj_at_one(7).unwrap(), ratio(127, 2352));
        assert!(matches!(pj_terms(4), Err(Error::Domain(_))));
        assert!(matches!(pj_terms(9), Err(Error::Unsupported(_))));
    }

    #[test]
    fn constants() {
        let a = a1_constant();
        assert!(a.tail_bound < 1e-10);
        let a_small = a1_with_head(100);
        assert!((a.value - a_small.value).abs() < 1e-10);
        let (a5, a6) = (a1_with_head(100_000), a1_with_head(1_000_000));
        assert!((a5.value - a6.value).abs() < 1e-10);
        // The raw partial product undershoots by about 1/(8N).
        let raw = a1_partial_product(1_000_000);
        assert!(raw < a.value && a.value - raw < 1.0 / (8.0 * 1e6) * a.value * 1.01);

        let b = b1_constant();
        assert!(b.tail_bound < 1e-10);
        // Weierstrass product for 1/Gamma at 1/2: B(1) = 2 / (sqrt(pi) e^{gamma/2}).
        let euler_gamma = 0.577_215_664_901_532_9_f64;
        let closed = 2.0 / (PI.sqrt() * (euler_gamma / 2.0).exp());
        assert!((b.value - closed).abs() < 1e-12, "{} vs {closed}", b.value);
    }

    #[test]
    fn matchings_darboux_ratios() {
        let n = 200;
        let s = matchings_nonderangement_series::<Interval256>(n);
        let a = a1_constant();
        let ratio0 = s.coeff(n).midpoint() * (PI * n as f64).sqrt() / a.value;
        assert!((0.97..=1.03).contains(&ratio0), "{ratio0}");
        let b = b1_constant();
        for j in [1, 3] {
            let sj = matchings_j_series::<Interval256>(j, n).unwrap();
            let c = to_f64(&pj_at_one(j).unwrap());
            let r = sj.coeff(n).midpoint() * (PI * n as f64).sqrt() / (c * b.value);
            assert!((0.95..=1.05).contains(&r), "j = {j}: {r}");
        }
    }

    #[test]
    fn interval_series_enclose_exact() {
        let exact = matchings_nonderangement_series::<Rational>(20);
        let approx = matchings_nonderangement_series::<Interval256>(20);
        for n in 0..=20 {
            assert!(approx.coeff(n).contains(exact.coeff(n)));
        }
    }

    #[test]
    fn wreath_series_basics() {
        let s = wreath_bound_series::<Rational>(1, 12).unwrap();
        assert!(s.coefficients().iter().all(|c| c == &ratio(1, 1)));
        let s2 = wreath_bound_series::<Rational>(2, 2).unwrap();
        assert_eq!(s2.coeff(2), &ratio(7, 8));
        for a in 2..=5 {
            let s = wreath_bound_series::<Rational>(a, 30).unwrap();
            for c in s.coefficients() {
                assert!(c > &<Rational as Zero>::zero() && c <= &<Rational as One>::one());
            }
        }
    }

    #[test]
    fn wreath_constants() {
        let w2 = wreath_bound_asymptotic(2).unwrap();
        let expect = (PI * PI / 12.0).exp() / PI.sqrt();
        assert!((w2.constant.value - expect).abs() < 1e-12);
        assert_eq!(w2.exponent, -0.5);
        let w3 = wreath_bound_asymptotic(3).unwrap();
        let expect3 = (0.5 * PI * PI / 6.0 + zeta(3).0 / 6.0).exp() / gamma(1.0 / 3.0).0;
        assert!((w3.constant.value - expect3).abs() < 1e-12);
        let w1 = wreath_bound_asymptotic(1).unwrap();
        assert!((w1.constant.value - 1.0).abs() < 1e-12);
        assert_eq!(w1.exponent, 0.0);
    }

    #[test]
    fn wreath_a2_asymptotic_ratio() {
        let n = 2000;
        let s = wreath_bound_series::<Interval256>(2, n).unwrap();
        let c = wreath_bound_asymptotic(2).unwrap().constant.value;
        let r = s.coeff(n).midpoint() * (n as f64).sqrt() / c;
        assert!((r - 1.0).abs() < 0.02, "{r}");
        assert!(s.coeff(n).width() < 1e-40);
    }

    #[test]
    fn block_bounds() {
        assert_eq!(block_system_bound(1).unwrap(), ratio(1, 1));
        // exp(u + (3/8) u^2): [u^2] = 1/2 + 3/8
        assert_eq!(block_system_bound(2).unwrap(), ratio(7, 8));
    }

    #[test]
    fn block_bound_trend() {
        // value * m^{3/2} stays bounded and shrinks over the grid.
        let scaled: Vec<f64> = [4usize, 8, 16, 32]
            .iter()
            .map(|&m| to_f64(&block_system_bound(m).unwrap()) * (m as f64).powf(1.5))
            .collect();
        assert!(scaled.windows(2).all(|w| w[1] < w[0]), "{scaled:?}");
        assert!(scaled[0] < 4.0);
    }

    #[test]
    fn exp_log_round_trip() {
        let a = PowerSeries::<Rational>::from_terms(&[(1, ratio(1, 3)), (2, ratio(-2, 5)), (5, ratio(7, 2))], 12);
        let b = a.exp().unwrap();
        assert_eq!(b.log().unwrap(), a);
        assert!(b.mul(&b.inverse_unit()) == PowerSeries::one(12));
        assert!(PowerSeries::<Rational>::one(3).exp().is_err());
    }

    #[test]
    fn json_shapes() {
        let s = matchings_nonderangement_series::<Rational>(2);
        let u = s.to_json(Variable::U);
        assert_eq!(u["variable"], "u");
        assert_eq!(u["order"], 2);
        assert_eq!(u["coefficients"][1], "1/1");
        let t = s.to_json(Variable::T);
        assert_eq!(t["order"], 4);
        assert_eq!(t["coefficients"].as_array().unwrap().len(), 5);
        assert_eq!(t["coefficients"][1], "0/1");
    }

    proptest! {
        #[test]
        fn exp_is_a_homomorphism(c1 in -5i64..5, c2 in -5i64..5, d in 1usize..4) {
            let a = PowerSeries::<Rational>::from_terms(&[(1, ratio(c1, 2))], 8);
            let b = PowerSeries::<Rational>::from_terms(&[(d, ratio(c2, 3))], 8);
            prop_assert_eq!(a.add(&b).exp().unwrap(), a.exp().unwrap().mul(&b.exp().unwrap()));
        }
    }
}

