//! Fixed-point and orbit counts of a single permutation, as functions of
//! its cycle type, for the actions of `S_n` on k-subsets, on perfect
//! matchings, and on 2-subsets.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{domain, Result};
use crate::partitions::{enumerate_cycle_types, CycleType};
use crate::perm::Permutation;
use crate::rational::{binomial, odd_double_factorial, ratio, Rational};

/// Number of points of the acted-on set left fixed by a permutation.
pub type FixedPointCount = BigUint;

/// Number of k-subsets of `{1..n}` fixed setwise by a permutation of cycle
/// type `ct`: a fixed k-set is a union of whole cycles, so this is
/// `sum over |lambda| = k of prod_i C(a_i, alpha_i(lambda))`.
pub fn fixed_ksets(ct: &CycleType, k: usize) -> Result<FixedPointCount> {
    if k > ct.degree() {
        return domain(format!("k = {k} exceeds degree {}", ct.degree()));
    }
    let mut total = BigUint::zero();
    for lambda in enumerate_cycle_types(k)? {
        let mut term = BigUint::one();
        for (i, &alpha) in lambda.multiplicities().iter().enumerate() {
            if alpha == 0 {
                continue;
            }
            term *= binomial(ct.count(i + 1), alpha);
            if term.is_zero() {
                break;
            }
        }
        total += term;
    }
    Ok(total)
}

/// Contribution of the `a` cycles of one length to the fixed matchings.
fn matching_factor(len: u64, a: u64) -> BigUint {
    if a == 0 {
        return BigUint::one();
    }
    if len % 2 == 1 {
        if a % 2 == 1 {
            return BigUint::zero();
        }
        // Pair the cycles up, then align each pair in one of `len` ways.
        return odd_double_factorial(a / 2) * BigUint::from(len).pow((a / 2) as u32);
    }
    // Pair 2k of the cycles, and split each remaining cycle into antipodal pairs.
    let mut total = BigUint::one();
    for k in 1..=a / 2 {
        total += odd_double_factorial(k) * binomial(a, 2 * k) * BigUint::from(len).pow(k as u32);
    }
    total
}

/// Number of perfect matchings of `{1..2n}` fixed by a permutation of
/// cycle type `ct`.
pub fn fixed_matchings(ct: &CycleType) -> Result<FixedPointCount> {
    if ct.degree() % 2 == 1 {
        return domain(format!("matchings need an even degree, got {}", ct.degree()));
    }
    let mut total = BigUint::one();
    for len in 1..=ct.degree() {
        total *= matching_factor(len as u64, ct.count(len));
        if total.is_zero() {
            break;
        }
    }
    Ok(total)
}

/// Orbits of a permutation on 2-sets whose two symbols share a cycle:
/// `m/2 - (sum over odd i of a_i)/2`.
pub fn orbits_on_2sets_within_cycles(ct: &CycleType) -> Rational {
    let odd: u64 = (1..=ct.degree()).step_by(2).map(|i| ct.count(i)).sum();
    ratio(ct.degree() as i64, 2) - ratio(odd as i64, 2)
}

/// Cycles laid out on consecutive symbols, longest first.
pub fn canonical_representative(ct: &CycleType) -> Permutation {
    let mut images = Vec::with_capacity(ct.degree());
    let mut start = 0;
    for len in ct.parts() {
        for j in 0..len {
            images.push(start + (j + 1) % len);
        }
        start += len;
    }
    Permutation::from_vec_unchecked(images)
}

/// Number of cycles, fixed points included, of the permutation induced on
/// all `C(m, 2)` two-element subsets.
pub fn total_cycles_on_2sets(ct: &CycleType) -> Result<FixedPointCount> {
    let m = ct.degree();
    if m < 2 {
        return domain("the 2-set action needs degree >= 2");
    }
    let w = canonical_representative(ct);
    let index = |a: usize, b: usize| {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        // Pairs ordered by (hi, lo).
        hi * (hi - 1) / 2 + lo
    };
    let pairs = m * (m - 1) / 2;
    let mut image = vec![0usize; pairs];
    for hi in 1..m {
        for lo in 0..hi {
            image[index(lo, hi)] = index(w.apply(lo), w.apply(hi));
        }
    }
    let induced = Permutation::from_vec_unchecked(image);
    Ok(BigUint::from(induced.cycle_lengths().len()))
}

/// Involution counts when `m <= 9`, summed over cycle types `2^t 1^{m-2t}`.
fn involution_counts_direct(m: u64) -> (BigUint, BigUint) {
    let mut even = BigUint::zero();
    let mut odd = BigUint::zero();
    for t in 0..=m / 2 {
        let count = binomial(m, 2 * t) * odd_double_factorial(t);
        if t % 2 == 0 {
            even += count;
        } else {
            odd += count;
        }
    }
    (even, odd)
}

/// `(a(m), b(m))`: involutions of `S_m` (identity included) that are even,
/// and those that are odd.
pub fn involution_counts(m: usize) -> Result<(BigUint, BigUint)> {
    if m == 0 {
        return domain("involution_counts needs m >= 1");
    }
    if m <= 9 {
        return Ok(involution_counts_direct(m as u64));
    }
    let mut a: Vec<BigUint> = Vec::with_capacity(m + 1);
    let mut b: Vec<BigUint> = Vec::with_capacity(m + 1);
    for n in 0..=9u64 {
        let (x, y) = involution_counts_direct(n);
        a.push(x);
        b.push(y);
    }
    for n in 10..=m {
        let an = &a[n - 1] + BigUint::from(n - 1) * &b[n - 2];
        let bn = &b[n - 1] + BigUint::from(n - 1) * &a[n - 2];
        a.push(an);
        b.push(bn);
    }
    Ok((a.swap_remove(m), b.swap_remove(m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::all_permutations;
    use proptest::prelude::*;

    fn ct(parts: &[usize]) -> CycleType {
        CycleType::from_parts(parts).unwrap()
    }

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn kset_examples() {
        for n in 1..=9 {
            for k in 0..=n {
                assert_eq!(fixed_ksets(&CycleType::identity(n), k).unwrap(), binomial(n as u64, k as u64));
            }
        }
        assert_eq!(fixed_ksets(&ct(&[2, 1, 1]), 2).unwrap(), big(2));
        assert_eq!(fixed_ksets(&ct(&[5]), 2).unwrap(), big(0));
        assert!(fixed_ksets(&ct(&[2, 1]), 4).is_err());
    }

    #[test]
    fn one_sets_are_ordinary_fixed_points() {
        for n in 1..=12 {
            for c in enumerate_cycle_types(n).unwrap() {
                assert_eq!(fixed_ksets(&c, 1).unwrap(), big(c.count(1)));
            }
        }
    }

    #[test]
    fn matching_examples() {
        assert_eq!(fixed_matchings(&ct(&[3, 3])).unwrap(), big(3));
        assert_eq!(fixed_matchings(&CycleType::identity(4)).unwrap(), big(3));
        assert_eq!(fixed_matchings(&ct(&[4])).unwrap(), big(1));
        assert_eq!(fixed_matchings(&CycleType::identity(0)).unwrap(), big(1));
        assert_eq!(fixed_matchings(&CycleType::identity(10)).unwrap(), odd_double_factorial(5));
        assert!(fixed_matchings(&ct(&[3])).is_err());
    }

    #[test]
    fn matching_factor_conventions() {
        assert_eq!(matching_factor(3, 0), big(1));
        assert_eq!(matching_factor(4, 0), big(1));
        for i in 1..6 {
            assert_eq!(matching_factor(2 * i - 1, 2), big(2 * i - 1));
        }
        // F_2(2) = 1 + 1 * 1 * 2; F_2(3) = 1 + 3 * 2.
        assert_eq!(matching_factor(2, 2), big(3));
        assert_eq!(matching_factor(2, 3), big(7));
    }

    #[test]
    fn matching_parity_law() {
        for half in 0..=12 {
            for c in enumerate_cycle_types(2 * half).unwrap() {
                let f = fixed_matchings(&c).unwrap();
                let some_odd_count_odd = (1..=c.degree()).step_by(2).any(|i| c.count(i) % 2 == 1);
                assert_eq!(f.is_zero(), some_odd_count_odd, "{c}");
                if !f.is_zero() {
                    assert!(f.bit(0), "{c} has even fixed-point count {f}");
                }
            }
        }
    }

    #[test]
    fn two_set_orbit_examples() {
        assert_eq!(orbits_on_2sets_within_cycles(&CycleType::identity(6)), ratio(0, 1));
        assert_eq!(orbits_on_2sets_within_cycles(&ct(&[4])), ratio(2, 1));
        assert_eq!(orbits_on_2sets_within_cycles(&ct(&[5])), ratio(2, 1));

        assert_eq!(total_cycles_on_2sets(&CycleType::identity(4)).unwrap(), big(6));
        // (12) fixes {1,2} and {3,4} and swaps {1,3}<->{2,3}, {1,4}<->{2,4}.
        assert_eq!(total_cycles_on_2sets(&ct(&[2, 1, 1])).unwrap(), big(4));
        assert_eq!(total_cycles_on_2sets(&ct(&[5])).unwrap(), big(2));
        assert!(total_cycles_on_2sets(&ct(&[1])).is_err());
    }

    #[test]
    fn within_cycle_orbits_match_brute_force() {
        // Count orbits on same-cycle pairs directly on explicit permutations.
        for m in 1..=7 {
            for w in all_permutations(m) {
                let mut cycle_of = vec![0; m];
                let mut seen = vec![false; m];
                let mut label = 0;
                for s in 0..m {
                    if seen[s] {
                        continue;
                    }
                    let mut x = s;
                    while !seen[x] {
                        seen[x] = true;
                        cycle_of[x] = label;
                        x = w.apply(x);
                    }
                    label += 1;
                }
                let mut visited = std::collections::HashSet::new();
                let mut orbits = 0;
                for a in 0..m {
                    for b in a + 1..m {
                        if cycle_of[a] != cycle_of[b] || visited.contains(&(a, b)) {
                            continue;
                        }
                        orbits += 1;
                        let (mut x, mut y) = (a, b);
                        loop {
                            visited.insert((x.min(y), x.max(y)));
                            x = w.apply(x);
                            y = w.apply(y);
                            if (x.min(y), x.max(y)) == (a, b) {
                                break;
                            }
                        }
                    }
                }
                assert_eq!(orbits_on_2sets_within_cycles(&w.cycle_type()), ratio(orbits, 1), "{w:?}");
            }
        }
    }

    #[test]
    fn two_set_cycle_bound() {
        for m in 2..=10 {
            for c in enumerate_cycle_types(m).unwrap() {
                let cycles = total_cycles_on_2sets(&c).unwrap();
                assert!(BigUint::from(12u32) * cycles >= big(m as u64), "{c}");
            }
        }
    }

    #[test]
    fn involution_examples() {
        assert_eq!(involution_counts(2).unwrap(), (big(1), big(1)));
        assert_eq!(involution_counts(4).unwrap(), (big(4), big(6)));
        let (a, b) = involution_counts(8).unwrap();
        assert_eq!((a.clone() % 4u32, b.clone() % 4u32), (big(0), big(0)));
        assert_eq!((a, b), (big(316), big(448)));
        assert!(involution_counts(0).is_err());
    }

    #[test]
    fn involutions_by_brute_force_parity() {
        for m in 1..=8 {
            let (mut even, mut odd) = (0u64, 0u64);
            for w in all_permutations(m) {
                if w.compose(&w).is_identity() {
                    if w.cycle_type().is_even_permutation() {
                        even += 1;
                    } else {
                        odd += 1;
                    }
                }
            }
            assert_eq!(involution_counts(m).unwrap(), (big(even), big(odd)), "m = {m}");
        }
    }

    #[test]
    fn involution_totals_follow_the_classical_recurrence() {
        let mut total = vec![big(1), big(1)];
        for m in 2..=60usize {
            let next = &total[m - 1] + BigUint::from(m - 1) * &total[m - 2];
            total.push(next);
        }
        for m in 1..=60 {
            let (a, b) = involution_counts(m).unwrap();
            assert_eq!(&a + &b, total[m], "m = {m}");
            if m >= 8 {
                assert!((a % 4u32).is_zero() && (b % 4u32).is_zero(), "m = {m}");
            }
        }
    }

    proptest! {
        #[test]
        fn complementary_ksets(n in 1usize..=14, k_frac in 0.0f64..=1.0) {
            let k = ((n as f64) * k_frac) as usize;
            for c in enumerate_cycle_types(n).unwrap().take(40) {
                prop_assert_eq!(fixed_ksets(&c, k).unwrap(), fixed_ksets(&c, n - k).unwrap());
            }
        }
    }
}
