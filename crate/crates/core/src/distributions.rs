//! Exact laws of the fixed-point count of a uniform random permutation,
//! aggregated class by class over cycle types.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::actions::{fixed_ksets, fixed_matchings, FixedPointCount};
use crate::error::{domain, Error, Result};
use crate::partitions::{class_probability, enumerate_cycle_types, par_fold_cycle_types, partition_count, CycleType};
use crate::rational::{binomial, from_u64, from_uint, odd_double_factorial, parse_fraction, to_fraction_string, Rational};

/// Which set `S_n` acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    /// The k-element subsets of `{1..n}`.
    KSets { k: usize },
    /// The perfect matchings of `{1..2n}`.
    Matchings,
}

impl Action {
    pub fn tag(&self) -> &'static str {
        match self {
            Action::KSets { .. } => "ksets",
            Action::Matchings => "matchings",
        }
    }

    pub fn k(&self) -> Option<usize> {
        match *self {
            Action::KSets { k } => Some(k),
            Action::Matchings => None,
        }
    }

    /// Fixed points of any permutation with cycle type `ct`.
    pub fn fixed_points(&self, ct: &CycleType) -> Result<FixedPointCount> {
        match *self {
            Action::KSets { k } => fixed_ksets(ct, k),
            Action::Matchings => fixed_matchings(ct),
        }
    }
}

/// Law of `F(w)` for `w` uniform in `S_degree`, keyed by the exact value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactDistribution {
    degree: usize,
    action: Action,
    support: BTreeMap<FixedPointCount, Rational>,
}

impl ExactDistribution {
    /// Builds the law from the fixed-point counts of an explicit list of
    /// equally likely permutations.
    pub fn from_counts<I>(degree: usize, action: Action, counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = FixedPointCount>,
    {
        let mut tally: BTreeMap<FixedPointCount, u64> = BTreeMap::new();
        let mut total = 0u64;
        for c in counts {
            *tally.entry(c).or_default() += 1;
            total += 1;
        }
        if total == 0 {
            return domain("empty table");
        }
        let support = tally
            .into_iter()
            .map(|(v, c)| (v, from_u64(c) / from_u64(total)))
            .collect();
        Ok(ExactDistribution { degree, action, support })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn action(&self) -> Action {
        self.action
    }

    pub fn support(&self) -> &BTreeMap<FixedPointCount, Rational> {
        &self.support
    }

    pub fn probability(&self, value: &FixedPointCount) -> Rational {
        self.support.get(value).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total(&self) -> Rational {
        self.support.values().sum()
    }

    /// `E(F^r)`.
    pub fn moment(&self, r: u32) -> Rational {
        self.support
            .iter()
            .map(|(v, p)| from_uint(&v.pow(r)) * p)
            .sum()
    }

    pub fn mean(&self) -> Rational {
        self.moment(1)
    }

    pub fn variance(&self) -> Rational {
        let m = self.mean();
        self.moment(2) - &m * &m
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(DistributionWire::from(self)).expect("plain data")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let wire: DistributionWire =
            serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        wire.try_into()
    }
}

/// `{"degree", "action", "k", "support": [["value", "p/q"], ...]}`.
#[derive(Serialize, Deserialize)]
struct DistributionWire {
    degree: usize,
    action: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    k: Option<usize>,
    support: Vec<(String, String)>,
}

impl From<&ExactDistribution> for DistributionWire {
    fn from(d: &ExactDistribution) -> Self {
        DistributionWire {
            degree: d.degree,
            action: d.action.tag().to_string(),
            k: d.action.k(),
            support: d
                .support
                .iter()
                .map(|(v, p)| (v.to_string(), to_fraction_string(p)))
                .collect(),
        }
    }
}

impl TryFrom<DistributionWire> for ExactDistribution {
    type Error = Error;

    fn try_from(w: DistributionWire) -> Result<Self> {
        let action = match (w.action.as_str(), w.k) {
            ("ksets", Some(k)) => Action::KSets { k },
            ("matchings", None) => Action::Matchings,
            (a, k) => return Err(Error::Parse(format!("bad action {a:?} with k = {k:?}"))),
        };
        let mut support = BTreeMap::new();
        for (v, p) in w.support {
            let v: BigUint = v.parse().map_err(|_| Error::Parse(format!("bad value {v:?}")))?;
            support.insert(v, parse_fraction(&p)?);
        }
        Ok(ExactDistribution {
            degree: w.degree,
            action,
            support,
        })
    }
}

fn aggregate(n: usize, action: Action) -> Result<ExactDistribution> {
    type Acc = Result<BTreeMap<FixedPointCount, Rational>>;
    let support = par_fold_cycle_types(
        n,
        || Ok(BTreeMap::new()),
        |acc: Acc, ct| {
            let mut acc = acc?;
            let f = action.fixed_points(ct)?;
            *acc.entry(f).or_insert_with(Rational::zero) += class_probability(ct);
            Ok(acc)
        },
        |a: Acc, b: Acc| {
            let mut a = a?;
            for (v, p) in b? {
                *a.entry(v).or_insert_with(Rational::zero) += p;
            }
            Ok(a)
        },
    )??;
    Ok(ExactDistribution {
        degree: n,
        action,
        support,
    })
}

/// Law of the number of fixed k-sets. Requires `2k <= n`, except that the
/// natural action `k = 1` is accepted for every `n >= 1`.
pub fn distribution_ksets(n: usize, k: usize) -> Result<ExactDistribution> {
    if k == 0 || n == 0 {
        return domain("distribution_ksets needs n >= 1 and k >= 1");
    }
    if k > 1 && 2 * k > n {
        return domain(format!("k = {k} > n/2 = {n}/2; use the complementary k"));
    }
    aggregate(n, Action::KSets { k })
}

/// Law of the number of fixed perfect matchings of `{1..two_n}`.
pub fn distribution_matchings(two_n: usize) -> Result<ExactDistribution> {
    if two_n < 2 || two_n % 2 == 1 {
        return domain(format!("matchings need an even degree >= 2, got {two_n}"));
    }
    aggregate(two_n, Action::Matchings)
}

/// `P(F = 0)`.
pub fn derangement_proportion(d: &ExactDistribution) -> Rational {
    d.probability(&BigUint::zero())
}

/// Burnside-type bounds on the derangement proportion of a transitive
/// action of degree `omega` and rank `rank`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankBounds {
    pub omega: BigUint,
    pub rank: BigUint,
    pub lower: Rational,
    pub upper: Rational,
}

impl RankBounds {
    pub fn new(omega: BigUint, rank: BigUint) -> Self {
        let r = from_uint(&rank);
        let lower = (&r - Rational::one()) / from_uint(&omega);
        let upper = Rational::one() - Rational::one() / (from_u64(4) * &r);
        RankBounds { omega, rank, lower, upper }
    }

    pub fn contains(&self, p: &Rational) -> bool {
        &self.lower <= p && p <= &self.upper
    }
}

/// Degree and rank of `S_n` on k-sets (`n` is the permuted degree) or on
/// matchings (`n` is `2m`, the number of points matched).
pub fn rank_bounds(action: Action, n: usize) -> Result<RankBounds> {
    match action {
        Action::KSets { k } => {
            if n == 0 || k == 0 || k > n {
                return domain(format!("no k-set action with n = {n}, k = {k}"));
            }
            let omega = binomial(n as u64, k as u64);
            let rank = BigUint::from(k.min(n - k) as u64 + 1);
            Ok(RankBounds::new(omega, rank))
        }
        Action::Matchings => {
            if n < 2 || n % 2 == 1 {
                return domain(format!("matchings need an even degree >= 2, got {n}"));
            }
            let half = n / 2;
            Ok(RankBounds::new(odd_double_factorial(half as u64), partition_count(half)))
        }
    }
}

/// Rank bounds matching a computed distribution.
pub fn rank_bounds_for(d: &ExactDistribution) -> Result<RankBounds> {
    rank_bounds(d.action, d.degree)
}

/// `E(X^r)` for `X ~ Poisson(lambda)`, by Touchard's formula
/// `sum_j S(r, j) lambda^j` with Stirling numbers of the second kind.
pub fn poisson_moment(lambda: &Rational, r: usize) -> Rational {
    // stirling[j] = S(m, j), built row by row.
    let mut stirling = vec![BigUint::zero(); r + 1];
    stirling[0] = BigUint::one();
    for m in 1..=r {
        for j in (1..=m).rev() {
            let keep = &stirling[j] * BigUint::from(j as u64);
            stirling[j] = keep + &stirling[j - 1];
        }
        stirling[0] = BigUint::zero();
    }
    let mut total = Rational::zero();
    let mut power = Rational::one();
    for s in stirling.iter() {
        total += from_uint(s) * &power;
        power *= lambda;
    }
    total
}

/// `E(prod_i A_i^{b_i})` over uniform `S_n`, where `A_i` counts i-cycles and
/// `exponents[i - 1] = b_i`.
pub fn cycle_count_moment(n: usize, exponents: &[u32]) -> Result<Rational> {
    let mut total = Rational::zero();
    for ct in enumerate_cycle_types(n)? {
        let mut value = BigUint::one();
        for (i, &b) in exponents.iter().enumerate() {
            value *= BigUint::from(ct.count(i + 1)).pow(b);
        }
        if !value.is_zero() {
            total += from_uint(&value) * class_probability(&ct);
        }
    }
    Ok(total)
}

/// `prod_i E(X_i^{b_i})` for independent `X_i ~ Poisson(1/i)`.
pub fn poisson_product_moment(exponents: &[u32]) -> Rational {
    exponents
        .iter()
        .enumerate()
        .map(|(i, &b)| poisson_moment(&Rational::new(1.into(), (i as i64 + 1).into()), b as usize))
        .product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::all_permutations;
    use crate::rational::{ratio, to_f64};

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn s4_points() {
        let d = distribution_ksets(4, 1).unwrap();
        let expect: BTreeMap<_, _> = [(0, 9), (1, 8), (2, 6), (4, 1)]
            .into_iter()
            .map(|(v, c)| (big(v), ratio(c, 24)))
            .collect();
        assert_eq!(d.support(), &expect);
        assert_eq!(derangement_proportion(&d), ratio(9, 24));
    }

    #[test]
    fn natural_action_moments() {
        for n in 2..=20 {
            let d = distribution_ksets(n, 1).unwrap();
            assert_eq!(d.total(), Rational::one());
            assert_eq!(d.mean(), Rational::one());
            assert_eq!(d.variance(), Rational::one());
        }
    }

    #[test]
    fn montmort_at_twelve() {
        let p0 = to_f64(&derangement_proportion(&distribution_ksets(12, 1).unwrap()));
        assert!((p0 - (-1f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn derangements_match_inclusion_exclusion() {
        // D_n = sum_j (-1)^j n!/j!
        for n in 1..=15u64 {
            let mut dn = Rational::zero();
            let mut term = Rational::one();
            for j in 0..=n {
                if j > 0 {
                    term /= from_u64(j);
                }
                let signed = if j % 2 == 0 { term.clone() } else { -term.clone() };
                dn += signed;
            }
            assert_eq!(derangement_proportion(&distribution_ksets(n as usize, 1).unwrap()), dn);
        }
    }

    #[test]
    fn degenerate_single_point() {
        let d = distribution_ksets(1, 1).unwrap();
        assert_eq!(derangement_proportion(&d), Rational::zero());
        let b = rank_bounds_for(&d).unwrap();
        assert_eq!(b.lower, Rational::zero());
        assert!(b.contains(&Rational::zero()));
    }

    #[test]
    fn preconditions() {
        assert!(distribution_ksets(5, 3).is_err());
        assert!(distribution_ksets(0, 1).is_err());
        assert!(distribution_matchings(7).is_err());
        assert!(distribution_matchings(0).is_err());
    }

    #[test]
    fn matchings_moments_and_parity() {
        let d4 = distribution_matchings(4).unwrap();
        assert_eq!(d4.mean(), Rational::one());
        let d8 = distribution_matchings(8).unwrap();
        assert_eq!(d8.variance(), ratio(4, 1));
        let d6 = distribution_matchings(6).unwrap();
        assert!(d6.support().keys().all(|v| v.is_zero() || v.bit(0)));
        let b = rank_bounds(Action::Matchings, 6).unwrap();
        assert_eq!((b.lower.clone(), b.rank.clone()), (ratio(2, 15), big(3)));
        assert!(b.contains(&derangement_proportion(&d6)));
    }

    #[test]
    fn rank_bound_examples() {
        let b = rank_bounds(Action::KSets { k: 2 }, 10).unwrap();
        assert_eq!(b.lower, ratio(2, 45));
        assert_eq!(b.upper, ratio(11, 12));
        assert_eq!(rank_bounds(Action::Matchings, 8).unwrap().rank, big(5));
        assert_eq!(rank_bounds(Action::KSets { k: 1 }, 7).unwrap().lower, ratio(1, 7));
    }

    #[test]
    fn agrees_with_direct_enumeration() {
        for n in 2..=7 {
            for k in 1..=n / 2 {
                let action = Action::KSets { k };
                let direct = ExactDistribution::from_counts(
                    n,
                    action,
                    all_permutations(n).map(|w| action.fixed_points(&w.cycle_type()).unwrap()),
                )
                .unwrap();
                assert_eq!(direct, distribution_ksets(n, k).unwrap());
            }
        }
    }

    #[test]
    fn json_shape() {
        let d = distribution_ksets(4, 2).unwrap();
        let j = d.to_json();
        assert_eq!(j["action"], "ksets");
        assert_eq!(j["k"], 2);
        assert_eq!(j["degree"], 4);
        assert_eq!(j["support"][0][0], "0");
        assert_eq!(ExactDistribution::from_json(&j).unwrap(), d);
        let m = distribution_matchings(6).unwrap().to_json();
        assert!(m.get("k").is_none());
        assert_eq!(m["support"][1][0], "1");
    }

    #[test]
    fn poisson_moments() {
        let one = Rational::one();
        // Bell numbers for lambda = 1.
        let bell = [1, 1, 2, 5, 15, 52, 203];
        for (r, b) in bell.iter().enumerate() {
            assert_eq!(poisson_moment(&one, r), ratio(*b, 1));
        }
        let half = ratio(1, 2);
        assert_eq!(poisson_moment(&half, 2), ratio(3, 4));
    }

    #[test]
    fn cycle_moments_match_poisson_products() {
        // All exponent vectors with sum i * b_i <= 6.
        fn vectors(max_weight: usize, len: usize) -> Vec<Vec<u32>> {
            if len == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for prefix in vectors(max_weight, len - 1) {
                let used: usize = prefix.iter().enumerate().map(|(i, &b)| (i + 1) * b as usize).sum();
                let mut b = 0u32;
                while used + len * b as usize <= max_weight {
                    let mut v = prefix.clone();
                    v.push(b);
                    out.push(v);
                    b += 1;
                }
            }
            out
        }
        for b in vectors(6, 6) {
            let weight: usize = b.iter().enumerate().map(|(i, &x)| (i + 1) * x as usize).sum();
            let expect = poisson_product_moment(&b);
            for n in weight.max(1)..=12 {
                assert_eq!(cycle_count_moment(n, &b).unwrap(), expect, "b = {b:?}, n = {n}");
            }
        }
    }
}
