//! Limit laws of the fixed k-set count as `n -> infinity`, where the cycle
//! counts become independent `X_i ~ Poisson(1/i)` and `F_k` becomes the
//! polynomial `sum over |lambda| = k of prod_i C(X_i, alpha_i)`.

use std::collections::HashMap;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::partitions::enumerate_cycle_types;
use crate::rational::{factorial, from_uint, ratio, to_f64, Rational};
use crate::rng::{poisson_inversion, substream};

/// A floating value with a rigorous absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifiedReal {
    pub value: f64,
    pub error: f64,
}

impl CertifiedReal {
    pub fn contains(&self, x: f64) -> bool {
        (self.value - x).abs() <= self.error
    }
}

/// Series terms used for every `exp(-s)` enclosure.
const EXP_TERMS: usize = 80;

/// Rational enclosure `[lo, hi]` of `exp(-s)` for `0 <= s <= 2`, from two
/// consecutive partial sums of the alternating Taylor series.
pub fn exp_neg_enclosure(s: &Rational) -> (Rational, Rational) {
    let mut sum = Rational::zero();
    let mut term = Rational::one();
    for m in 0..EXP_TERMS {
        sum += &term;
        term = -term * s / Rational::from_integer((m as i64 + 1).into());
    }
    let next = &sum + &term;
    if sum <= next {
        (sum, next)
    } else {
        (next, sum)
    }
}

// `x^m / m!` for rational x.
fn poisson_weight(lambda: &Rational, m: u64) -> Rational {
    let mut w = Rational::one();
    for _ in 0..m {
        w *= lambda;
    }
    w / from_uint(&factorial(m))
}

fn choose(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// `lim P(F_k = j)` for `k <= 3` as a sum `sum_t c_t exp(-s_t)` with exact
/// rational `c_t, s_t`.
fn limit_terms(k: usize, j: u64) -> Result<Vec<(Rational, Rational)>> {
    let half = ratio(1, 2);
    let third = ratio(1, 3);
    match k {
        1 => Ok(vec![(Rational::one() / from_uint(&factorial(j)), ratio(1, 1))]),
        2 => {
            // C(X1, 2) + X2 = j
            let mut c = Rational::zero();
            let mut x1 = 0;
            while choose(x1, 2) <= j {
                c += poisson_weight(&Rational::one(), x1) * poisson_weight(&half, j - choose(x1, 2));
                x1 += 1;
            }
            Ok(vec![(c, ratio(3, 2))])
        }
        3 => {
            // C(X1, 3) + X1 X2 + X3 = j. With X1 = 0 the value is X3 and X2 sums out.
            let free = poisson_weight(&third, j);
            let mut c = Rational::zero();
            let mut x1 = 1;
            while choose(x1, 3) <= j {
                let base = choose(x1, 3);
                let mut x2 = 0;
                while base + x1 * x2 <= j {
                    let x3 = j - base - x1 * x2;
                    c += poisson_weight(&Rational::one(), x1) * poisson_weight(&half, x2) * poisson_weight(&third, x3);
                    x2 += 1;
                }
                x1 += 1;
            }
            Ok(vec![(free, ratio(4, 3)), (c, ratio(11, 6))])
        }
        _ => Err(Error::Unsupported(format!(
            "no exact limit evaluator for k = {k}; use limit_prob_mc or limit_prob_dp"
        ))),
    }
}

/// Rational enclosure of `lim_n P(F_k = j)` for `k` in `{1, 2, 3}`.
pub fn limit_prob_enclosure(k: usize, j: u64) -> Result<(Rational, Rational)> {
    let mut lo = Rational::zero();
    let mut hi = Rational::zero();
    for (c, s) in limit_terms(k, j)? {
        let (elo, ehi) = exp_neg_enclosure(&s);
        lo += &c * elo;
        hi += c * ehi;
    }
    Ok((lo, hi))
}

/// `lim_n P(F_k = j)` for `k` in `{1, 2, 3}`, with an error bound below
/// `1e-12`.
pub fn limit_prob_exact(k: usize, j: u64) -> Result<CertifiedReal> {
    let (lo, hi) = limit_prob_enclosure(k, j)?;
    let mid = (&lo + &hi) / Rational::from_integer(2.into());
    let half_width = to_f64(&((hi - lo) / Rational::from_integer(2.into())));
    let value = to_f64(&mid);
    Ok(CertifiedReal {
        value,
        error: half_width + 2.0 * f64::EPSILON * value.abs(),
    })
}

/// `e^{-4/3} (1 + (3/2) e^{-1/2})`, the closed form of `lim P(F_3 = 0)`.
pub fn k3_derangement_closed_form() -> f64 {
    (-4.0f64 / 3.0).exp() * (1.0 + 1.5 * (-0.5f64).exp())
}

/// The limit polynomial for one `k`, as lists of `(cycle length, alpha)`.
#[derive(Debug, Clone)]
pub struct PoissonLimitLaw {
    k: usize,
    monomials: Vec<Vec<(usize, u64)>>,
}

impl PoissonLimitLaw {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return domain("limit laws need k >= 1");
        }
        let monomials = enumerate_cycle_types(k)?
            .map(|lambda| {
                (1..=k)
                    .filter(|&i| lambda.count(i) > 0)
                    .map(|i| (i, lambda.count(i)))
                    .collect()
            })
            .collect();
        Ok(PoissonLimitLaw { k, monomials })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Evaluates the polynomial at `x[i - 1] = X_i`, saturating at `u64::MAX`.
    pub fn evaluate(&self, x: &[u64]) -> u64 {
        let mut total = 0u64;
        for mono in &self.monomials {
            let mut term = 1u64;
            for &(i, alpha) in mono {
                term = term.saturating_mul(choose(x[i - 1], alpha));
                if term == 0 {
                    break;
                }
            }
            total = total.saturating_add(term);
        }
        total
    }
}

/// Draws per substream; fixes the work split independently of thread count.
const MC_CHUNK: u64 = 1 << 16;

/// Monte Carlo estimate of `lim P(F_k = j)` with its standard error. The
/// sample budget is split into fixed chunks, chunk `c` drawing from
/// substream `c` of `seed`, so the result does not depend on threading.
pub fn limit_prob_mc(k: usize, j: u64, samples: u64, seed: u64) -> Result<(f64, f64)> {
    if samples == 0 {
        return domain("limit_prob_mc needs at least one sample");
    }
    let law = PoissonLimitLaw::new(k)?;
    let lambdas: Vec<f64> = (1..=k).map(|i| 1.0 / i as f64).collect();
    let chunks = samples.div_ceil(MC_CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = substream(seed, c);
            let draws = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut x = vec![0u64; k];
            let mut hits = 0;
            for _ in 0..draws {
                for (xi, &l) in x.iter_mut().zip(&lambdas) {
                    *xi = poisson_inversion(&mut rng, l);
                }
                if law.evaluate(&x) == j {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let p = hits as f64 / samples as f64;
    Ok((p, (p * (1.0 - p) / samples as f64).sqrt()))
}

/// `(k, estimate, standard error)` of `lim P(F_k = 0)` for `k = 1..=k_max`.
/// Whether this increases in `k` is open; the probe only reports.
pub fn derangement_limit_probe(k_max: usize, samples: u64, seed: u64) -> Result<Vec<(usize, f64, f64)>> {
    (1..=k_max)
        .map(|k| {
            let (p, se) = limit_prob_mc(k, 0, samples, seed.wrapping_add(k as u64))?;
            Ok((k, p, se))
        })
        .collect()
}

/// Result of [`limit_prob_dp`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedEvaluation {
    pub probability: f64,
    /// Total Poisson mass left outside the enumerated box.
    pub neglected_mass: f64,
}

/// Deterministic evaluation of `lim P(F_k = j)` over the box where each
/// `X_i` stops at the first value whose upper tail is below `tail`.
///
/// `F_k` counts sub-multisets of the cycles summing to `k`, i.e. the
/// coefficient of `z^k` in `prod_i (1 + z^i)^{X_i}`. The dynamic programme
/// carries that truncated polynomial, coefficients capped at `j + 1`, as its
/// state while folding in one cycle length at a time.
pub fn limit_prob_dp(k: usize, j: u64, tail: f64) -> Result<TruncatedEvaluation> {
    if k == 0 {
        return domain("limit laws need k >= 1");
    }
    if !(tail > 0.0 && tail < 1.0) {
        return domain("tail must lie in (0, 1)");
    }
    let cap = (j + 1).min(u8::MAX as u64) as u8;
    if j + 1 > cap as u64 {
        return Err(Error::Unsupported(format!("j = {j} too large for the capped state")));
    }
    let mut states: HashMap<Vec<u8>, f64> = HashMap::new();
    let mut start = vec![0u8; k + 1];
    start[0] = 1;
    states.insert(start, 1.0);
    let mut neglected = 0.0;

    for i in 1..=k {
        let lambda = 1.0 / i as f64;
        // Masses P(X_i = x) up to the cutoff.
        let mut masses = Vec::new();
        let mut p = (-lambda).exp();
        let mut cdf = 0.0;
        let mut x = 0u64;
        loop {
            masses.push(p);
            cdf += p;
            if 1.0 - cdf < tail {
                break;
            }
            x += 1;
            p *= lambda / x as f64;
        }
        neglected += (1.0 - cdf).max(0.0);

        let mut next: HashMap<Vec<u8>, f64> = HashMap::new();
        for (state, weight) in &states {
            let mut poly = state.clone();
            for (count, &mass) in masses.iter().enumerate() {
                if count > 0 {
                    // Multiply by (1 + z^i), truncated at degree k.
                    for deg in (i..=k).rev() {
                        poly[deg] = poly[deg].saturating_add(poly[deg - i]).min(cap);
                    }
                }
                *next.entry(poly.clone()).or_insert(0.0) += weight * mass;
            }
        }
        states = next;
    }

    let probability = states
        .iter()
        .filter(|(s, _)| s[k] as u64 == j)
        .map(|(_, w)| w)
        .sum();
    Ok(TruncatedEvaluation {
        probability,
        neglected_mass: neglected,
    })
}

/// The explicit finite-k bound from the cycle-pair argument:
/// `1 - prod over 1 <= j <= (k-1)/2 of [1 - (1 - e^{-1/j})(1 - e^{-1/(k-j)})]`.
///
/// This is a lower bound on `lim P(F_k > 0)`; one minus it bounds
/// `lim P(F_k = 0)` from above.
pub fn derangement_upper_bound(k: usize) -> Result<f64> {
    if k < 2 {
        return domain("derangement_upper_bound needs k >= 2");
    }
    let a = |j: usize| 1.0 - (-1.0 / j as f64).exp();
    let prod: f64 = (1..=(k - 1) / 2).map(|j| 1.0 - a(j) * a(k - j)).product();
    Ok(1.0 - prod)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{derangement_proportion, distribution_ksets};

    #[test]
    fn exp_enclosure_is_tight() {
        let (lo, hi) = exp_neg_enclosure(&ratio(1, 1));
        assert!(lo <= hi);
        let e = to_f64(&lo);
        assert!((e - (-1f64).exp()).abs() < 1e-16);
        assert!(to_f64(&(hi - lo)) < 1e-100);
    }

    #[test]
    fn known_limit_values() {
        for (k, want) in [(1, 0.36788), (2, 0.44626), (3, 0.50342)] {
            let got = limit_prob_exact(k, 0).unwrap();
            assert!(got.error < 1e-12);
            assert!((got.value - want).abs() < 5e-6, "k = {k}: {}", got.value);
        }
        let k2 = limit_prob_exact(2, 0).unwrap();
        assert!(k2.contains(2.0 * (-1.5f64).exp()));
    }

    #[test]
    fn k3_closed_form_matches_summation() {
        let exact = limit_prob_exact(3, 0).unwrap();
        assert!((exact.value - k3_derangement_closed_form()).abs() < 1e-10);
    }

    #[test]
    fn montmort_law() {
        let e = (-1f64).exp();
        let mut f = 1.0;
        for j in 0..10u64 {
            if j > 0 {
                f *= j as f64;
            }
            assert!(limit_prob_exact(1, j).unwrap().contains(e / f));
        }
    }

    #[test]
    fn limit_laws_sum_to_one() {
        for k in 1..=3 {
            let total: f64 = (0..120).map(|j| limit_prob_exact(k, j).unwrap().value).sum();
            assert!((total - 1.0).abs() < 1e-6, "k = {k}: {total}");
        }
    }

    #[test]
    fn unsupported_k_points_to_mc() {
        match limit_prob_exact(4, 0) {
            Err(Error::Unsupported(msg)) => assert!(msg.contains("limit_prob_mc")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn polynomial_matches_closed_forms() {
        let law2 = PoissonLimitLaw::new(2).unwrap();
        let law3 = PoissonLimitLaw::new(3).unwrap();
        for x1 in 0..6 {
            for x2 in 0..4 {
                assert_eq!(law2.evaluate(&[x1, x2]), choose(x1, 2) + x2);
                for x3 in 0..3 {
                    assert_eq!(law3.evaluate(&[x1, x2, x3]), choose(x1, 3) + x1 * x2 + x3);
                }
            }
        }
    }

    #[test]
    fn mc_is_deterministic_and_consistent() {
        let a = limit_prob_mc(2, 0, 200_000, 11).unwrap();
        assert_eq!(a, limit_prob_mc(2, 0, 200_000, 11).unwrap());
        for k in 1..=3 {
            for j in 0..=2 {
                let (est, se) = limit_prob_mc(k, j, 200_000, 5 + k as u64).unwrap();
                let exact = limit_prob_exact(k, j).unwrap().value;
                assert!((est - exact).abs() <= 4.0 * se, "k = {k}, j = {j}: {est} vs {exact}");
            }
        }
    }

    #[test]
    fn dp_matches_exact_for_small_k() {
        for k in 1..=3 {
            for j in 0..=3 {
                let dp = limit_prob_dp(k, j, 1e-12).unwrap();
                let exact = limit_prob_exact(k, j).unwrap().value;
                assert!((dp.probability - exact).abs() < 1e-10, "k = {k}, j = {j}");
            }
        }
    }

    #[test]
    fn dp_matches_mc_at_k10() {
        let dp = limit_prob_dp(10, 0, 1e-9).unwrap();
        assert!(dp.neglected_mass < 1e-8);
        let (est, se) = limit_prob_mc(10, 0, 1_000_000, 3).unwrap();
        assert!((est - dp.probability).abs() <= 4.0 * se);
        // Three significant figures.
        assert!((est - dp.probability).abs() / dp.probability < 5e-3);
    }

    #[test]
    fn cycle_pair_bound() {
        let e1 = 1.0 - (-1f64).exp();
        // No pair of distinct lengths sums to 2.
        assert_eq!(derangement_upper_bound(2).unwrap(), 0.0);
        let k3 = e1 * (1.0 - (-0.5f64).exp());
        assert!((derangement_upper_bound(3).unwrap() - k3).abs() < 1e-15);
        let b = derangement_upper_bound(100).unwrap();
        let scaled = b * 100.0 / 100f64.ln();
        assert!((0.5..=2.0).contains(&scaled), "{scaled}");
        assert!(derangement_upper_bound(1).is_err());
        for k in 2..=3 {
            let limit = limit_prob_exact(k, 0).unwrap().value;
            assert!(1.0 - derangement_upper_bound(k).unwrap() >= limit);
        }
    }

    #[test]
    fn finite_n_approaches_limit() {
        for k in 1..=3usize {
            let (lo, hi) = limit_prob_enclosure(k, 0).unwrap();
            let gap = |n: usize| {
                let p = derangement_proportion(&distribution_ksets(n, k).unwrap());
                // Certified |p - L| as an interval [glo, ghi].
                let a = &p - &hi;
                let b = &p - &lo;
                if a >= Rational::zero() {
                    (a, b)
                } else if b <= Rational::zero() {
                    (-b, -a)
                } else {
                    (Rational::zero(), if -&a > b { -a } else { b })
                }
            };
            let mut prev = gap(2 * k);
            let mut n = 2 * k + 4;
            while n <= 40 {
                let cur = gap(n);
                assert!(cur.1 < prev.0, "k = {k}, n = {n}");
                prev = cur;
                n += 4;
            }
            assert!(to_f64(&prev.1) < 1e-3);
        }
    }
}
