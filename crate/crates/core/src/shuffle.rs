//! The top-k-to-random shuffle on `S_n`: take the top `k` cards off the deck
//! and riffle them back in, all `C(n, k)` interleavings equally likely.
//!
//! States are deck orders, indexed by lexicographic rank. A step is right
//! multiplication by a fixed position permutation, so the chain is a random
//! walk on the group.

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;

use crate::actions::fixed_ksets;
use crate::error::{domain, Error, Result};
use crate::partitions::enumerate_cycle_types;
use crate::perm::{all_permutations, Permutation};
use crate::rational::{binomial, from_u64, from_uint, Rational};

/// Largest deck the dense state space is built for (`7! = 5040` states).
pub const MAX_DECK: usize = 7;

#[derive(Debug, Clone)]
pub struct ShuffleChain {
    n: usize,
    k: usize,
    interleavings: Vec<Permutation>,
    successors: Vec<Vec<u32>>,
}

/// Position maps for every interleaving. Entry `p` of a map is the old
/// position of the card that lands at new position `p`.
pub fn interleavings(n: usize, k: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let (mut top, mut rest) = (0, k);
        let images = (0..n)
            .map(|p| {
                if mask >> p & 1 == 1 {
                    top += 1;
                    top - 1
                } else {
                    rest += 1;
                    rest - 1
                }
            })
            .collect();
        out.push(Permutation::from_vec_unchecked(images));
    }
    out
}

impl ShuffleChain {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n > MAX_DECK {
            return Err(Error::Capacity {
                what: "shuffle deck size",
                requested: n,
                cap: MAX_DECK,
            });
        }
        if k == 0 || k > n {
            return domain(format!("shuffle needs 1 <= k <= n, got n = {n}, k = {k}"));
        }
        let moves = interleavings(n, k);
        let states = (1..=n).product::<usize>();
        let successors = (0..states)
            .into_par_iter()
            .map(|s| {
                let deck = Permutation::unrank(n, s);
                moves.iter().map(|m| deck.compose(m).rank() as u32).collect()
            })
            .collect();
        Ok(ShuffleChain { n, k, interleavings: moves, successors })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_states(&self) -> usize {
        self.successors.len()
    }

    /// Number of interleavings, `C(n, k)`.
    pub fn branching(&self) -> u64 {
        self.interleavings.len() as u64
    }

    pub fn interleaving_maps(&self) -> &[Permutation] {
        &self.interleavings
    }

    pub fn successors(&self, state: usize) -> &[u32] {
        &self.successors[state]
    }

    /// Exact transition probability between two ranked states.
    pub fn transition(&self, from: usize, to: usize) -> Rational {
        let hits = self.successors[from].iter().filter(|&&s| s as usize == to).count();
        from_u64(hits as u64) / from_u64(self.branching())
    }

    pub fn row_sum(&self, from: usize) -> Rational {
        let mut targets: Vec<u32> = self.successors[from].clone();
        targets.sort_unstable();
        targets.dedup();
        targets.iter().map(|&t| self.transition(from, t as usize)).sum()
    }

    /// Walk counts returning to `start` after `1..=r_max` steps.
    pub fn return_walks(&self, start: usize, r_max: usize) -> Vec<BigUint> {
        let mut cur = vec![0u128; self.num_states()];
        cur[start] = 1;
        let mut out = Vec::with_capacity(r_max);
        let mut big: Option<Vec<BigUint>> = None;
        for _ in 0..r_max {
            match &mut big {
                None => {
                    let mut next = vec![0u128; cur.len()];
                    let mut overflow = false;
                    for (s, &c) in cur.iter().enumerate() {
                        if c == 0 {
                            continue;
                        }
                        for &t in &self.successors[s] {
                            match next[t as usize].checked_add(c) {
                                Some(v) => next[t as usize] = v,
                                None => overflow = true,
                            }
                        }
                    }
                    if overflow {
                        let mut b: Vec<BigUint> = cur.iter().map(|&c| BigUint::from(c)).collect();
                        b = self.step_big(&b);
                        out.push(b[start].clone());
                        big = Some(b);
                    } else {
                        out.push(BigUint::from(next[start]));
                        cur = next;
                    }
                }
                Some(b) => {
                    *b = self.step_big(b);
                    out.push(b[start].clone());
                }
            }
        }
        out
    }

    fn step_big(&self, cur: &[BigUint]) -> Vec<BigUint> {
        let mut next = vec![BigUint::zero(); cur.len()];
        for (s, c) in cur.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for &t in &self.successors[s] {
                next[t as usize] += c;
            }
        }
        next
    }

    /// `Tr(M^r)` for `r = 1..=r_max`, summing the full diagonal for decks of
    /// at most six cards. For seven cards every diagonal entry equals the
    /// identity's return probability (the chain is a group walk), which is
    /// used instead.
    pub fn traces(&self, r_max: usize) -> Vec<Rational> {
        let totals: Vec<BigUint> = if self.n < MAX_DECK {
            (0..self.num_states())
                .into_par_iter()
                .map(|s| self.return_walks(s, r_max))
                .reduce(
                    || vec![BigUint::zero(); r_max],
                    |mut a, b| {
                        for (x, y) in a.iter_mut().zip(b) {
                            *x += y;
                        }
                        a
                    },
                )
        } else {
            let states = BigUint::from(self.num_states());
            self.return_walks(0, r_max).into_iter().map(|w| w * &states).collect()
        };
        let c = BigUint::from(self.branching());
        totals
            .into_iter()
            .enumerate()
            .map(|(i, w)| Rational::new(w.into(), c.pow(i as u32 + 1).into()))
            .collect()
    }

    pub fn trace_power(&self, r: usize) -> Result<Rational> {
        if r == 0 {
            return domain("trace_power needs r >= 1");
        }
        Ok(self.traces(r).pop().expect("r >= 1"))
    }

    /// Probability of being back at the starting order after `r` steps.
    pub fn return_probability(&self, r: usize) -> Result<Rational> {
        Ok(self.trace_power(r)? / from_u64(self.num_states() as u64))
    }
}

/// `sum over w in S_n of (F_k(w) / C(n, k))^r`, by conjugacy class.
pub fn spectral_power_sum(n: usize, k: usize, r: usize) -> Result<Rational> {
    let c = from_uint(&binomial(n as u64, k as u64));
    let mut total = Rational::zero();
    for ct in enumerate_cycle_types(n)? {
        let f = from_uint(&fixed_ksets(&ct, k)?) / &c;
        total += from_uint(&ct.class_size()) * num_traits::pow(f, r);
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub n: usize,
    pub k: usize,
    pub traces: Vec<Rational>,
    pub power_sums: Vec<Rational>,
    pub max_abs_difference: Rational,
}

impl SpectrumReport {
    pub fn exact_match(&self) -> bool {
        self.max_abs_difference.is_zero()
    }
}

/// Compares `Tr(M^r)` with the power sums of the claimed spectrum
/// `{F_k(w) / C(n, k)}` for `r = 1..=r_max`. Agreement for many `r` is a
/// strong probe, not a proof, unless `r_max >= n!`.
pub fn eigenvalue_multiset_check(chain: &ShuffleChain, r_max: usize) -> Result<SpectrumReport> {
    let traces = chain.traces(r_max);
    let mut power_sums = Vec::with_capacity(r_max);
    let mut max = Rational::zero();
    for (i, t) in traces.iter().enumerate() {
        let p = spectral_power_sum(chain.n, chain.k, i + 1)?;
        let d = num_traits::abs(t - &p);
        if d > max {
            max = d;
        }
        power_sums.push(p);
    }
    Ok(SpectrumReport {
        n: chain.n,
        k: chain.k,
        traces,
        power_sums,
        max_abs_difference: max,
    })
}

/// CSV rows `r,trace,return_probability`.
pub fn trace_table_csv(chain: &ShuffleChain, r_max: usize) -> String {
    use crate::rational::to_fraction_string;
    let states = from_u64(chain.num_states() as u64);
    let mut out = String::from("r,trace,return_probability\n");
    for (i, t) in chain.traces(r_max).iter().enumerate() {
        out.push_str(&format!("{},{},{}\n", i + 1, to_fraction_string(t), to_fraction_string(&(t / &states))));
    }
    out
}

/// Decks reachable from the sorted deck in one step, found by filtering
/// all of `S_n` for orders keeping both blocks internally sorted.
pub fn one_step_orders_by_filter(n: usize, k: usize) -> Vec<Permutation> {
    all_permutations(n)
        .filter(|w| {
            let (top, rest): (Vec<usize>, Vec<usize>) = w.images().iter().partition(|&&c| c < k);
            top.windows(2).all(|p| p[0] < p[1]) && rest.windows(2).all(|p| p[0] < p[1])
        })
        .collect()
}
