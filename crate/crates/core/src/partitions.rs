//! Cycle types of the symmetric group, stored as multiplicity vectors.
//!
//! Partitions of `n` are streamed in lexicographically descending order of
//! their part lists, `[n], [n-1, 1], [n-2, 2], [n-2, 1, 1], ...`. Every
//! stream can be split by largest part so independent consumers can
//! re-enumerate disjoint ranges.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::rational::{factorial, from_uint, Rational};

/// Largest degree [`enumerate_cycle_types`] accepts; `p(80)` is about
/// 1.6e7.
pub const DEFAULT_DEGREE_CAP: usize = 80;

/// A partition of `n` recorded as `a_i = number of cycles of length i`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleType {
    // multiplicities[i - 1] = a_i; length is exactly `degree`.
    multiplicities: Vec<u64>,
}

impl CycleType {
    /// Builds a cycle type from `(a_1, a_2, ...)`. Trailing entries beyond
    /// the degree must be zero; shorter vectors are padded.
    pub fn from_multiplicities(mults: &[u64]) -> Result<Self> {
        let degree: u64 = mults
            .iter()
            .enumerate()
            .map(|(i, &a)| (i as u64 + 1) * a)
            .sum();
        let degree = degree as usize;
        if mults[degree.min(mults.len())..].iter().any(|&a| a != 0) {
            return domain("multiplicities extend beyond the degree");
        }
        let mut multiplicities = mults[..degree.min(mults.len())].to_vec();
        multiplicities.resize(degree, 0);
        Ok(CycleType { multiplicities })
    }

    /// Builds a cycle type from cycle lengths in any order.
    pub fn from_parts(parts: &[usize]) -> Result<Self> {
        if parts.contains(&0) {
            return domain("cycle lengths must be positive");
        }
        let degree: usize = parts.iter().sum();
        let mut multiplicities = vec![0u64; degree];
        for &p in parts {
            multiplicities[p - 1] += 1;
        }
        Ok(CycleType { multiplicities })
    }

    /// The cycle type of the identity of `S_n`.
    pub fn identity(n: usize) -> Self {
        let mut multiplicities = vec![0; n];
        if n > 0 {
            multiplicities[0] = n as u64;
        }
        CycleType { multiplicities }
    }

    /// The cycle type of a single `n`-cycle.
    pub fn full_cycle(n: usize) -> Self {
        let mut multiplicities = vec![0; n];
        if n > 0 {
            multiplicities[n - 1] = 1;
        }
        CycleType { multiplicities }
    }

    pub fn degree(&self) -> usize {
        self.multiplicities.len()
    }

    /// `a_i`, zero for lengths outside `1..=degree`.
    pub fn count(&self, len: usize) -> u64 {
        if len == 0 {
            return 0;
        }
        self.multiplicities.get(len - 1).copied().unwrap_or(0)
    }

    pub fn multiplicities(&self) -> &[u64] {
        &self.multiplicities
    }

    pub fn num_cycles(&self) -> u64 {
        self.multiplicities.iter().sum()
    }

    /// Cycle lengths in descending order.
    pub fn parts(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for len in (1..=self.degree()).rev() {
            for _ in 0..self.count(len) {
                out.push(len);
            }
        }
        out
    }

    /// Order of the centralizer of any element of this class,
    /// `prod_i i^{a_i} a_i!`.
    pub fn centralizer_order(&self) -> BigUint {
        let mut z = BigUint::one();
        for (i, &a) in self.multiplicities.iter().enumerate() {
            if a > 0 {
                z *= BigUint::from(i as u64 + 1).pow(a as u32);
                z *= factorial(a);
            }
        }
        z
    }

    pub fn class_size(&self) -> BigUint {
        factorial(self.degree() as u64) / self.centralizer_order()
    }

    pub fn is_even_permutation(&self) -> bool {
        let even_cycles: u64 = self
            .multiplicities
            .iter()
            .enumerate()
            .filter(|(i, _)| (i + 1) % 2 == 0)
            .map(|(_, &a)| a)
            .sum();
        even_cycles.is_multiple_of(2)
    }
}

impl fmt::Debug for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycleType{self}")
    }
}

/// Exponential notation, e.g. `(1^2 2^1)`.
impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        let mut first = true;
        for len in 1..=self.degree() {
            let a = self.count(len);
            if a > 0 {
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{len}^{a}")?;
                first = false;
            }
        }
        write!(f, ")")
    }
}

/// Streams the partitions of `n` in descending lexicographic order.
#[derive(Debug, Clone)]
pub struct CycleTypes {
    parts: Vec<usize>,
    degree: usize,
    // Stop once the largest part differs from this value.
    largest: Option<usize>,
    done: bool,
}

impl CycleTypes {
    fn starting_at(degree: usize, parts: Vec<usize>, largest: Option<usize>) -> Self {
        CycleTypes {
            parts,
            degree,
            largest,
            done: false,
        }
    }

    fn advance(&mut self) {
        let Some(i) = self.parts.iter().rposition(|&p| p > 1) else {
            self.done = true;
            return;
        };
        let v = self.parts[i] - 1;
        let mut rem = self.parts.len() - i;
        self.parts.truncate(i);
        self.parts.push(v);
        while rem > v {
            self.parts.push(v);
            rem -= v;
        }
        if rem > 0 {
            self.parts.push(rem);
        }
        if let Some(m) = self.largest {
            if self.parts[0] != m {
                self.done = true;
            }
        }
    }
}

impl Iterator for CycleTypes {
    type Item = CycleType;

    fn next(&mut self) -> Option<CycleType> {
        if self.done {
            return None;
        }
        let mut multiplicities = vec![0u64; self.degree];
        for &p in &self.parts {
            multiplicities[p - 1] += 1;
        }
        if self.parts.is_empty() {
            self.done = true;
        } else {
            self.advance();
        }
        Some(CycleType { multiplicities })
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::Capacity {
            what: "degree",
            requested: n,
            cap,
        });
    }
    Ok(())
}

/// All cycle types of `S_n` under the default degree cap.
pub fn enumerate_cycle_types(n: usize) -> Result<CycleTypes> {
    enumerate_cycle_types_capped(n, DEFAULT_DEGREE_CAP)
}

pub fn enumerate_cycle_types_capped(n: usize, cap: usize) -> Result<CycleTypes> {
    check_cap(n, cap)?;
    let parts = if n == 0 { Vec::new() } else { vec![n] };
    Ok(CycleTypes::starting_at(n, parts, None))
}

/// The cycle types of `S_n` whose longest cycle has length exactly
/// `largest`. Concatenating these ranges for `largest = n, n-1, ..., 1`
/// reproduces [`enumerate_cycle_types`].
pub fn cycle_types_with_largest_part(n: usize, largest: usize) -> Result<CycleTypes> {
    check_cap(n, DEFAULT_DEGREE_CAP)?;
    if largest == 0 || largest > n {
        return domain(format!("largest part {largest} outside 1..={n}"));
    }
    let mut parts = vec![largest];
    let mut rem = n - largest;
    while rem > 0 {
        let p = rem.min(largest);
        parts.push(p);
        rem -= p;
    }
    Ok(CycleTypes::starting_at(n, parts, Some(largest)))
}

/// Folds `f` over every cycle type of `S_n` in parallel, one task per
/// largest part, then merges the partial results with `merge`.
pub fn par_fold_cycle_types<T, F, M>(n: usize, identity: impl Fn() -> T + Sync, f: F, merge: M) -> Result<T>
where
    T: Send,
    F: Fn(T, &CycleType) -> T + Sync,
    M: Fn(T, T) -> T + Sync,
{
    if n == 0 {
        let ct = CycleType::identity(0);
        return Ok(f(identity(), &ct));
    }
    check_cap(n, DEFAULT_DEGREE_CAP)?;
    let parts: Vec<T> = (1..=n)
        .into_par_iter()
        .map(|m| {
            cycle_types_with_largest_part(n, m)
                .expect("range within cap")
                .fold(identity(), |acc, ct| f(acc, &ct))
        })
        .collect();
    Ok(parts.into_iter().fold(identity(), merge))
}

/// Number of partitions of `n`, by the part-size dynamic programme.
pub fn partition_count(n: usize) -> BigUint {
    let mut ways = vec![BigUint::zero(); n + 1];
    ways[0] = BigUint::one();
    for part in 1..=n {
        for total in part..=n {
            let add = ways[total - part].clone();
            ways[total] += add;
        }
    }
    ways.swap_remove(n)
}

/// Probability that a uniform element of `S_n` has this cycle type.
pub fn class_probability(ct: &CycleType) -> Rational {
    Rational::one() / from_uint(&ct.centralizer_order())
}

/// `(p(a,1), ..., p(a,a))` where `p(a,r)` is the proportion of `S_a` with
/// exactly `r` cycles.
pub fn cycle_count_proportions(a: usize) -> Result<Vec<Rational>> {
    if a == 0 {
        return domain("cycle_count_proportions needs a >= 1");
    }
    // Coefficients of x(x+1)...(x+a-1); coeffs[r] = c(a, r).
    let mut coeffs = vec![BigUint::zero(); a + 1];
    coeffs[0] = BigUint::one();
    for m in 0..a {
        let mut next = vec![BigUint::zero(); a + 1];
        for r in 0..=m {
            if coeffs[r].is_zero() {
                continue;
            }
            next[r + 1] += &coeffs[r];
            next[r] += &coeffs[r] * BigUint::from(m as u64);
        }
        coeffs = next;
    }
    let total = from_uint(&factorial(a as u64));
    Ok(coeffs[1..].iter().map(|c| from_uint(c) / &total).collect())
}

/// `(1/k)(1/k + 1)...(1/k + a - 1) / a!`.
pub fn rising_factorial_sum(a: usize, k: usize) -> Result<Rational> {
    if a == 0 || k == 0 {
        return domain("rising_factorial_sum needs a >= 1 and k >= 1");
    }
    let x = Rational::new(1.into(), (k as i64).into());
    let mut acc = Rational::one();
    for m in 0..a {
        acc *= &x + Rational::from_integer((m as i64).into());
    }
    Ok(acc / from_uint(&factorial(a as u64)))
}

/// `sum over |lambda| = a of 1 / prod_i (ik)^{n_i} n_i!`, the class-sum
/// side of the identity matched by [`rising_factorial_sum`].
pub fn rising_factorial_sum_by_partitions(a: usize, k: usize) -> Result<Rational> {
    if a == 0 || k == 0 {
        return domain("rising_factorial_sum_by_partitions needs a >= 1 and k >= 1");
    }
    let mut total = Rational::zero();
    for ct in enumerate_cycle_types(a)? {
        let mut denom = BigUint::one();
        for len in 1..=a {
            let n_i = ct.count(len);
            if n_i > 0 {
                denom *= BigUint::from((len * k) as u64).pow(n_i as u32) * factorial(n_i);
            }
        }
        total += Rational::one() / from_uint(&denom);
    }
    Ok(total)
}
