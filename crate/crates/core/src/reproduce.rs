//! The acceptance suite as a library: one check per claim, each returning a
//! pass/fail outcome with a human-readable detail line. Shared by the
//! `reproduce` subcommand and the `acceptance` test target.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde_json::json;

use crate::actions::{canonical_representative, involution_counts, orbits_on_2sets_within_cycles, total_cycles_on_2sets};
use crate::distributions::{derangement_proportion, distribution_ksets, distribution_matchings, rank_bounds_for, ExactDistribution};
use crate::error::Result;
use crate::interval::Interval256;
use crate::limits::limit_prob_exact;
use crate::oracle::{brute_force_fixed_points, OracleAction};
use crate::partitions::{enumerate_cycle_types, partition_count, rising_factorial_sum, rising_factorial_sum_by_partitions};
use crate::rational::{binomial, from_u64, from_uint, ratio, to_f64, to_fraction_string, Rational};
use crate::rng::seeded;
use crate::samplers::{derangement_uniformity, payne_derangement, payne_exact_distribution, rejection_derangement, PayneVariant, Start};
use crate::series::{
    a1_constant, b1_constant, block_system_bound, matchings_j_series, matchings_nonderangement_series, pj_at_one, wreath_bound_asymptotic,
    wreath_bound_series,
};
use crate::shuffle::{eigenvalue_multiset_check, ShuffleChain};

/// Pinned tolerances and sizes.
pub mod pinned {
    pub const SEED: u64 = 20_240_601;
    pub const LIMIT_DECIMALS: usize = 5;
    pub const FINITE_N_TOLERANCE: f64 = 1e-3;
    pub const MATCHINGS_ORDER: usize = 200;
    pub const RATIO_BAND_ZERO: (f64, f64) = (0.97, 1.03);
    pub const RATIO_BAND_J: (f64, f64) = (0.95, 1.05);
    pub const WREATH_N: usize = 2000;
    pub const WREATH_TOLERANCE: f64 = 0.02;
    pub const SHUFFLE_R_MAX: usize = 10;
    pub const SAMPLES: usize = 100_000;
    pub const MIN_P_VALUE: f64 = 0.001;
}

#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: u8,
    pub claim: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:>2}: {} ({:.1}s) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.claim,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "id": self.id,
            "claim": self.claim,
            "passed": self.passed,
            "detail": self.detail,
            "seconds": self.elapsed.as_secs_f64(),
        })
    }
}

pub const CRITERIA: u8 = 11;

pub fn claim(id: u8) -> &'static str {
    match id {
        1 => "formula distributions equal brute force (k-sets n <= 8, matchings 2n <= 8)",
        2 => "E(F_k) = 1, Var(F_k) = k for n in 4..=30; matchings E = 1, Var = p(n) - 1 for 2n <= 20",
        3 => "limit P(F_k = 0) = 0.36788, 0.44626, 0.50342; n = 40 within 1e-3",
        4 => "matchings asymptotics at 2n = 400 and exact C(j) values",
        5 => "generating-function coefficients equal exact laws for 2n <= 16",
        6 => "rising-factorial identity, a = 2 wreath asymptotic, S_4 block-system bound",
        7 => "shuffle traces equal spectral power sums for n <= 6, r <= 10",
        8 => "rank sandwich (r-1)/|X| <= P(F=0) <= 1 - 1/(4r) on criteria 1-3 laws",
        9 => "even and odd involution counts divisible by 4 for 8 <= m <= 40",
        10 => "derangement samplers: rejection uniform, exact one-pass swap audit",
        11 => "desk-scale boundary: constructive sub-pieces of out-of-reach claims",
        _ => "unknown criterion",
    }
}

type Check = (bool, String);

pub fn run(id: u8) -> CriterionOutcome {
    let start = Instant::now();
    let result = match id {
        1 => oracle_equivalence(),
        2 => moments(),
        3 => poisson_limits(),
        4 => matchings_asymptotics(),
        5 => series_cross_check(),
        6 => wreath_bound(),
        7 => shuffle_spectrum(),
        8 => rank_sandwich(),
        9 => involution_parity(),
        10 => samplers(),
        11 => desk_scale_boundary(),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    let (passed, detail) = result.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionOutcome {
        id,
        claim: claim(id),
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

pub fn run_all() -> Vec<CriterionOutcome> {
    (1..=CRITERIA).map(run).collect()
}

fn oracle_laws() -> Result<Vec<ExactDistribution>> {
    let mut out = Vec::new();
    for n in 2..=8 {
        for k in 1..=n / 2 {
            out.push(distribution_ksets(n, k)?);
        }
    }
    for two_n in (2..=8).step_by(2) {
        out.push(distribution_matchings(two_n)?);
    }
    Ok(out)
}

fn oracle_equivalence() -> Result<Check> {
    let mut checked = 0;
    for n in 2..=8 {
        for k in 1..=n / 2 {
            let brute = brute_force_fixed_points(n, OracleAction::KSets(k))?.distribution()?;
            if brute != distribution_ksets(n, k)? {
                return Ok((false, format!("k-sets differ at n = {n}, k = {k}")));
            }
            checked += 1;
        }
    }
    for two_n in (2..=8).step_by(2) {
        let brute = brute_force_fixed_points(two_n, OracleAction::Matchings)?.distribution()?;
        if brute != distribution_matchings(two_n)? {
            return Ok((false, format!("matchings differ at 2n = {two_n}")));
        }
        checked += 1;
    }
    Ok((true, format!("{checked} laws identical")))
}

fn moments() -> Result<Check> {
    let mut laws = 0;
    for n in 4..=30 {
        for k in (1..=3usize).filter(|&k| 2 * k <= n) {
            laws += 1;
            let d = distribution_ksets(n, k)?;
            if d.mean() != Rational::one() || d.variance() != from_u64(k as u64) {
                return Ok((false, format!("n = {n}, k = {k}: mean {}, var {}", d.mean(), d.variance())));
            }
        }
    }
    for two_n in (2..=20).step_by(2) {
        let d = distribution_matchings(two_n)?;
        let expect = from_uint(&partition_count(two_n / 2)) - Rational::one();
        if d.mean() != Rational::one() || d.variance() != expect {
            return Ok((false, format!("2n = {two_n}: mean {}, var {}", d.mean(), d.variance())));
        }
    }
    Ok((true, format!("{laws} k-set laws (2k <= n) and 10 matching laws exact")))
}

const LIMITS: [(usize, &str); 3] = [(1, "0.36788"), (2, "0.44626"), (3, "0.50342")];

fn poisson_limits() -> Result<Check> {
    let mut parts = Vec::new();
    let mut ok = true;
    for (k, expect) in LIMITS {
        let lim = limit_prob_exact(k, 0)?;
        let shown = format!("{:.*}", pinned::LIMIT_DECIMALS, lim.value);
        let finite = to_f64(&derangement_proportion(&distribution_ksets(40, k)?));
        let gap = (finite - lim.value).abs();
        ok &= shown == expect && lim.error < 1e-9 && gap < pinned::FINITE_N_TOLERANCE;
        parts.push(format!("k={k}: {shown} (n=40 gap {gap:.1e})"));
    }
    Ok((ok, parts.join(", ")))
}

fn in_band(x: f64, band: (f64, f64)) -> bool {
    band.0 <= x && x <= band.1
}

fn matchings_asymptotics() -> Result<Check> {
    use std::f64::consts::PI;
    let n = pinned::MATCHINGS_ORDER;
    let scale = (PI * n as f64).sqrt();
    let s0 = matchings_nonderangement_series::<Interval256>(n);
    let r0 = s0.coeff(n).midpoint() * scale / a1_constant().value;
    let mut ok = in_band(r0, pinned::RATIO_BAND_ZERO);
    let mut detail = format!("zero-class ratio {r0:.4}");
    for j in [1, 3] {
        let sj = matchings_j_series::<Interval256>(j, n)?;
        let c = to_f64(&pj_at_one(j)?);
        let r = sj.coeff(n).midpoint() * scale / (c * b1_constant().value);
        ok &= in_band(r, pinned::RATIO_BAND_J);
        detail.push_str(&format!(", j={j} ratio {r:.4}"));
    }
    let expected = [(1, ratio(3, 2)), (3, ratio(1, 4)), (5, ratio(27, 400)), (7, ratio(127, 2352))];
    for (j, c) in expected {
        ok &= pj_at_one(j)? == c;
    }
    detail.push_str(", C(1,3,5,7) = 3/2, 1/4, 27/400, 127/2352");
    Ok((ok, detail))
}

fn series_cross_check() -> Result<Check> {
    let order = 8;
    let s0 = matchings_nonderangement_series::<Rational>(order);
    let js: Vec<_> = [1, 3, 5, 7]
        .iter()
        .map(|&j| Ok((j, matchings_j_series::<Rational>(j, order)?)))
        .collect::<Result<_>>()?;
    for n in 1..=order {
        let d = distribution_matchings(2 * n)?;
        if s0.coeff(n) != &(Rational::one() - derangement_proportion(&d)) {
            return Ok((false, format!("zero class differs at 2n = {}", 2 * n)));
        }
        for (j, s) in &js {
            if s.coeff(n) != &d.probability(&BigUint::from(*j as u64)) {
                return Ok((false, format!("j = {j} differs at 2n = {}", 2 * n)));
            }
        }
    }
    Ok((true, "j in {0,1,3,5,7}, 2n = 2..16 exact".into()))
}

fn wreath_bound() -> Result<Check> {
    for a in 1..=8 {
        for k in 1..=8 {
            if rising_factorial_sum(a, k)? != rising_factorial_sum_by_partitions(a, k)? {
                return Ok((false, format!("identity fails at a = {a}, k = {k}")));
            }
        }
    }
    let n = pinned::WREATH_N;
    let s = wreath_bound_series::<Interval256>(2, n)?;
    let asym = wreath_bound_asymptotic(2)?;
    let r = s.coeff(n).midpoint() * (n as f64).powf(-asym.exponent) / asym.constant.value;
    let brute = brute_force_fixed_points(4, OracleAction::Blocks(2))?.proportion_fixing_some();
    let bound = wreath_bound_series::<Rational>(2, 2)?.coeff(2).clone();
    let ok = (r - 1.0).abs() < pinned::WREATH_TOLERANCE && brute <= bound;
    Ok((
        ok,
        format!(
            "identity exact for a,k <= 8; n = {n} ratio {r:.5}; S_4 proportion {} <= {}",
            to_fraction_string(&brute),
            to_fraction_string(&bound)
        ),
    ))
}

fn shuffle_spectrum() -> Result<Check> {
    let mut chains = 0;
    for n in 1..=6 {
        for k in 1..=n {
            let chain = ShuffleChain::new(n, k)?;
            let report = eigenvalue_multiset_check(&chain, pinned::SHUFFLE_R_MAX)?;
            if !report.exact_match() {
                return Ok((false, format!("n = {n}, k = {k}: max difference {}", report.max_abs_difference)));
            }
            let c = from_uint(&binomial(n as u64, k as u64));
            let rank = from_u64(k.min(n - k) as u64 + 1);
            let r1 = chain.return_probability(1)?;
            let r2 = chain.return_probability(2)?;
            if r1 != Rational::one() / &c || r2 != &rank / (&c * &c) {
                return Ok((false, format!("n = {n}, k = {k}: return probabilities {r1}, {r2}")));
            }
            chains += 1;
        }
    }
    Ok((true, format!("{chains} chains exact; return probabilities 1/C and (k+1)/C^2 (k <= n/2)")))
}

fn rank_sandwich() -> Result<Check> {
    let mut laws = oracle_laws()?;
    for n in 4..=30 {
        for k in (1..=3).filter(|&k| 2 * k <= n) {
            laws.push(distribution_ksets(n, k)?);
        }
    }
    for two_n in (2..=20).step_by(2) {
        laws.push(distribution_matchings(two_n)?);
    }
    for k in 1..=3 {
        laws.push(distribution_ksets(40, k)?);
    }
    for d in &laws {
        let b = rank_bounds_for(d)?;
        let p = derangement_proportion(d);
        if !b.contains(&p) {
            return Ok((false, format!("{} degree {}: {} outside [{}, {}]", d.action().tag(), d.degree(), p, b.lower, b.upper)));
        }
    }
    Ok((true, format!("{} laws inside their bounds", laws.len())))
}

fn involutions_by_recurrence(m: usize) -> BigUint {
    let (mut prev, mut cur) = (BigUint::one(), BigUint::one());
    for i in 2..=m {
        let next = &cur + &prev * BigUint::from(i - 1);
        prev = cur;
        cur = next;
    }
    cur
}

fn involution_parity() -> Result<Check> {
    let four = BigUint::from(4u32);
    for m in 8..=40 {
        let (a, b) = involution_counts(m)?;
        if !(&a % &four).is_zero() || !(&b % &four).is_zero() {
            return Ok((false, format!("m = {m}: a = {a}, b = {b}")));
        }
        if a + b != involutions_by_recurrence(m) {
            return Ok((false, format!("m = {m}: total differs from recurrence")));
        }
    }
    Ok((true, "m = 8..40 divisible by 4, totals match".into()))
}

fn samplers() -> Result<Check> {
    let mut rng = seeded(pinned::SEED);
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [4, 5] {
        let p = derangement_uniformity(n, pinned::SAMPLES, || Ok(rejection_derangement(&mut rng, n)?.permutation))?;
        ok &= p > pinned::MIN_P_VALUE;
        parts.push(format!("rejection n={n} p={p:.3}"));
    }
    for _ in 0..pinned::SAMPLES / 10 {
        for v in PayneVariant::ALL {
            ok &= payne_derangement(&mut rng, 6, v)?.is_derangement();
        }
    }
    for n in [3, 4, 5] {
        let mut verdicts = Vec::new();
        for v in PayneVariant::ALL {
            let r = payne_exact_distribution(n, Start::Uniform, v)?;
            ok &= r.total == Rational::one();
            if v != PayneVariant::Any {
                ok &= r.non_derangement_mass.is_zero();
            }
            let ratio = r.max_min_ratio().map_or("unreached".into(), |x| to_fraction_string(&x));
            verdicts.push(format!("{}={}{}", v.name(), ratio, if r.is_uniform() { " uniform" } else { " non-uniform" }));
        }
        parts.push(format!("one-pass n={n}: {}", verdicts.join(" ")));
    }
    Ok((ok, parts.join("; ")))
}

/// Claims deliberately left unchecked: asymptotic results whose proofs are
/// non-constructive or rest on external results.
pub const OUT_OF_REACH: [&str; 3] = [
    "asymptotic derangement bounds for primitive actions (non-constructive)",
    "the n^(-2/3 + alpha) rate for actions on partitions (depends on an external estimate)",
    "surveyed results on number fields, classical groups and fixed-point ratios",
];

fn brute_orbits_within_cycles(w: &crate::perm::Permutation) -> u64 {
    let n = w.len();
    let mut seen = vec![false; n * n];
    let mut label = vec![0usize; n];
    for (c, cycle) in cycles(w).iter().enumerate() {
        for &i in cycle {
            label[i] = c;
        }
    }
    let mut orbits = 0;
    for a in 0..n {
        for b in a + 1..n {
            if label[a] != label[b] || seen[a * n + b] {
                continue;
            }
            orbits += 1;
            let (mut x, mut y) = (a, b);
            loop {
                let (lo, hi) = (x.min(y), x.max(y));
                if seen[lo * n + hi] {
                    break;
                }
                seen[lo * n + hi] = true;
                x = w.apply(x);
                y = w.apply(y);
            }
        }
    }
    orbits
}

fn cycles(w: &crate::perm::Permutation) -> Vec<Vec<usize>> {
    let n = w.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut c = Vec::new();
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            c.push(x);
            x = w.apply(x);
        }
        out.push(c);
    }
    out
}

fn desk_scale_boundary() -> Result<Check> {
    let mut ok = true;
    for m in 2..=7 {
        for ct in enumerate_cycle_types(m)? {
            let w = canonical_representative(&ct);
            ok &= from_u64(brute_orbits_within_cycles(&w)) == orbits_on_2sets_within_cycles(&ct);
        }
    }
    for m in 2..=10 {
        for ct in enumerate_cycle_types(m)? {
            ok &= from_uint(&total_cycles_on_2sets(&ct)?) >= ratio(m as i64, 12);
        }
    }
    let scaled: Vec<f64> = [4usize, 8, 16, 32]
        .iter()
        .map(|&m| Ok(to_f64(&block_system_bound(m)?) * (m as f64).powf(1.5)))
        .collect::<Result<_>>()?;
    ok &= scaled.windows(2).all(|w| w[1] <= w[0]);
    let trend: Vec<String> = scaled.iter().map(|s| format!("{s:.3}")).collect();
    Ok((
        ok,
        format!(
            "not reproduced: {}; checked: within-cycle 2-set orbits m <= 7, m/12 cycle bound m <= 10, block bound * m^1.5 = [{}]",
            OUT_OF_REACH.join(" | "),
            trend.join(", ")
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_criteria() {
        for id in [2, 5, 9] {
            let o = run(id);
            assert!(o.passed, "{}", o.line());
        }
        assert!(!run(12).passed);
    }

    #[test]
    fn involution_recurrence() {
        let first: Vec<u32> = (1..=6).map(|m| involutions_by_recurrence(m).try_into().unwrap()).collect();
        assert_eq!(first, vec![1, 2, 4, 10, 26, 76]);
    }
}
