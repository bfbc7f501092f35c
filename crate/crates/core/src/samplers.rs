//! Random permutations and derangements, with an exact choice-tree audit of
//! the single-pass fixed-point-swapping derangement sampler.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::RngCore;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{domain, Error, Result};
use crate::perm::{all_permutations, Permutation};
use crate::rational::{factorial, from_u64, from_uint, to_fraction_string, Rational};
use crate::rng::uniform_below;

/// Fisher-Yates with rejection-sampled indices.
pub fn random_permutation<R: RngCore>(rng: &mut R, n: usize) -> Permutation {
    let mut images: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = uniform_below(rng, i + 1);
        images.swap(i, j);
    }
    Permutation::from_vec_unchecked(images)
}

/// A derangement and the number of uniform draws it took.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectionDraw {
    pub permutation: Permutation,
    pub attempts: u64,
}

pub fn rejection_derangement<R: RngCore>(rng: &mut R, n: usize) -> Result<RejectionDraw> {
    if n < 2 {
        return domain(format!("no derangements of {n} points"));
    }
    let mut attempts = 0;
    loop {
        attempts += 1;
        let w = random_permutation(rng, n);
        if w.is_derangement() {
            return Ok(RejectionDraw { permutation: w, attempts });
        }
    }
}

/// Where a fixed point at position `i` is swapped to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PayneVariant {
    /// Uniform over `j != i`.
    #[default]
    Distinct,
    /// Uniform over `j > i`; the last position falls back to `j != i`.
    Later,
    /// Uniform over all `j`, so a self-swap can leave the fixed point.
    Any,
}

impl PayneVariant {
    pub const ALL: [PayneVariant; 3] = [PayneVariant::Distinct, PayneVariant::Later, PayneVariant::Any];

    pub fn name(&self) -> &'static str {
        match self {
            PayneVariant::Distinct => "distinct",
            PayneVariant::Later => "later",
            PayneVariant::Any => "any",
        }
    }

    fn targets(&self, n: usize, i: usize) -> Vec<usize> {
        match self {
            PayneVariant::Distinct => (0..n).filter(|&j| j != i).collect(),
            PayneVariant::Later if i + 1 < n => (i + 1..n).collect(),
            PayneVariant::Later => (0..n).filter(|&j| j != i).collect(),
            PayneVariant::Any => (0..n).collect(),
        }
    }
}

impl fmt::Display for PayneVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PayneVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PayneVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown variant {s:?}; expected distinct, later or any")))
    }
}

/// One left-to-right pass, swapping images at each current fixed point.
pub fn payne_pass<R: RngCore>(rng: &mut R, mut w: Permutation, variant: PayneVariant) -> Permutation {
    let n = w.len();
    for i in 0..n {
        if w.apply(i) == i {
            let targets = variant.targets(n, i);
            let j = targets[uniform_below(rng, targets.len())];
            w.swap_images(i, j);
        }
    }
    w
}

/// Uniform start, then passes until no fixed point remains. Only
/// [`PayneVariant::Any`] can need more than one pass.
pub fn payne_derangement<R: RngCore>(rng: &mut R, n: usize, variant: PayneVariant) -> Result<Permutation> {
    if n < 2 {
        return domain(format!("no derangements of {n} points"));
    }
    let start = random_permutation(rng, n);
    let mut w = payne_pass(rng, start, variant);
    while !w.is_derangement() {
        w = payne_pass(rng, w, variant);
    }
    Ok(w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Start {
    Uniform,
    Identity,
}

impl Start {
    pub fn name(&self) -> &'static str {
        match self {
            Start::Uniform => "uniform",
            Start::Identity => "identity",
        }
    }
}

impl FromStr for Start {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Start::Uniform),
            "identity" => Ok(Start::Identity),
            _ => Err(Error::Parse(format!("unknown start {s:?}; expected uniform or identity"))),
        }
    }
}

pub const MAX_AUDIT_DEGREE: usize = 6;

/// Exact law of one pass, by enumerating every start and swap choice.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiceTreeResult {
    pub n: usize,
    pub start: Start,
    pub variant: PayneVariant,
    pub distribution: BTreeMap<Permutation, Rational>,
    pub total: Rational,
    /// Mass on outputs that still have a fixed point.
    pub non_derangement_mass: Rational,
    pub derangement_count: u64,
}

impl ChoiceTreeResult {
    fn derangement_probabilities(&self) -> impl Iterator<Item = &Rational> {
        self.distribution.iter().filter(|(w, _)| w.is_derangement()).map(|(_, p)| p)
    }

    /// `max / min` over all derangements, counting unreached ones as zero.
    /// `None` when some derangement is never produced.
    pub fn max_min_ratio(&self) -> Option<Rational> {
        let reached = self.derangement_probabilities().count() as u64;
        if reached < self.derangement_count {
            return None;
        }
        let max = self.derangement_probabilities().max()?;
        let min = self.derangement_probabilities().min()?;
        Some(max / min)
    }

    /// Exactly `1 / D_n` on every derangement and nothing else.
    pub fn is_uniform(&self) -> bool {
        self.non_derangement_mass.is_zero() && self.max_min_ratio().is_some_and(|r| r.is_one())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let dist: Vec<serde_json::Value> = self
            .distribution
            .iter()
            .map(|(w, p)| serde_json::json!([w.images(), to_fraction_string(p)]))
            .collect();
        serde_json::json!({
            "n": self.n,
            "start": self.start.name(),
            "variant": self.variant.name(),
            "total": to_fraction_string(&self.total),
            "non_derangement_mass": to_fraction_string(&self.non_derangement_mass),
            "derangements": self.derangement_count,
            "max_min_ratio": self.max_min_ratio().map(|r| to_fraction_string(&r)),
            "uniform": self.is_uniform(),
            "distribution": dist,
        })
    }
}

fn walk(w: &mut Permutation, pos: usize, weight: &Rational, variant: PayneVariant, out: &mut BTreeMap<Permutation, Rational>) {
    let n = w.len();
    let mut i = pos;
    while i < n && w.apply(i) != i {
        i += 1;
    }
    if i == n {
        *out.entry(w.clone()).or_insert_with(Rational::zero) += weight;
        return;
    }
    let targets = variant.targets(n, i);
    let branch = weight / from_u64(targets.len() as u64);
    for j in targets {
        w.swap_images(i, j);
        walk(w, i + 1, &branch, variant, out);
        w.swap_images(i, j);
    }
}

pub fn payne_exact_distribution(n: usize, start: Start, variant: PayneVariant) -> Result<ChoiceTreeResult> {
    if n > MAX_AUDIT_DEGREE {
        return Err(Error::Capacity {
            what: "choice-tree degree",
            requested: n,
            cap: MAX_AUDIT_DEGREE,
        });
    }
    if n < 2 {
        return domain(format!("no derangements of {n} points"));
    }
    let starts: Vec<Permutation> = match start {
        Start::Uniform => all_permutations(n).collect(),
        Start::Identity => vec![Permutation::identity(n)],
    };
    let weight = Rational::one() / from_u64(starts.len() as u64);
    let distribution = starts
        .into_par_iter()
        .map(|mut w| {
            let mut out = BTreeMap::new();
            walk(&mut w, 0, &weight, variant, &mut out);
            out
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (w, p) in b {
                *a.entry(w).or_insert_with(Rational::zero) += p;
            }
            a
        });
    let total = distribution.values().sum();
    let non_derangement_mass = distribution.iter().filter(|(w, _)| !w.is_derangement()).map(|(_, p)| p).sum();
    Ok(ChoiceTreeResult {
        n,
        start,
        variant,
        distribution,
        total,
        non_derangement_mass,
        derangement_count: derangement_number(n),
    })
}

/// `D_n` by `D_n = (n - 1)(D_{n-1} + D_{n-2})`.
pub fn derangement_number(n: usize) -> u64 {
    let (mut a, mut b) = (1u64, 0u64);
    if n == 0 {
        return a;
    }
    for m in 2..=n as u64 {
        let c = (m - 1) * (a + b);
        a = b;
        b = c;
    }
    b
}

/// Pearson statistic against equal cell probabilities and its upper-tail
/// p-value.
pub fn chi_square_uniform(counts: &[u64]) -> Result<(f64, f64)> {
    if counts.len() < 2 {
        return domain("chi-square needs at least two cells");
    }
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    let stat = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let dist = ChiSquared::new((counts.len() - 1) as f64).map_err(|e| Error::Domain(e.to_string()))?;
    Ok((stat, dist.sf(stat)))
}

/// Chi-square p-value of `samples` draws from `draw`, binned over all
/// derangements of `n`. Errors if any draw has a fixed point.
pub fn derangement_uniformity<F>(n: usize, samples: usize, mut draw: F) -> Result<f64>
where
    F: FnMut() -> Result<Permutation>,
{
    let cells: BTreeMap<Permutation, usize> = all_permutations(n)
        .filter(|w| w.is_derangement())
        .enumerate()
        .map(|(i, w)| (w, i))
        .collect();
    let mut counts = vec![0u64; cells.len()];
    for _ in 0..samples {
        let w = draw()?;
        match cells.get(&w) {
            Some(&i) => counts[i] += 1,
            None => return domain(format!("sampler emitted {w}, which has a fixed point")),
        }
    }
    Ok(chi_square_uniform(&counts)?.1)
}

/// Inverse of `n!` as a rational, for callers comparing exact laws.
pub fn uniform_mass(n: usize) -> Rational {
    Rational::one() / from_uint(&factorial(n as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::rng::seeded;

    #[test]
    fn fisher_yates_uniform() {
        let mut rng = seeded(11);
        assert!(random_permutation(&mut rng, 1).is_identity());
        let mut counts = vec![0u64; 24];
        for _ in 0..100_000 {
            counts[random_permutation(&mut rng, 4).rank()] += 1;
        }
        let (stat, _) = chi_square_uniform(&counts).unwrap();
        // 0.999 quantile of chi-square with 23 degrees of freedom.
        assert!(stat < 49.728, "{stat}");
    }

    #[test]
    fn determinism() {
        let a = random_permutation(&mut seeded(5), 5);
        let b = random_permutation(&mut seeded(5), 5);
        assert_eq!(a, b);
    }

    #[test]
    fn derangement_numbers() {
        let brute: Vec<u64> = (0..=7).map(|n| all_permutations(n).filter(|w| w.is_derangement()).count() as u64).collect();
        let rec: Vec<u64> = (0..=7).map(derangement_number).collect();
        assert_eq!(brute, rec);
        assert_eq!(derangement_number(4), 9);
        assert_eq!(derangement_number(5), 44);
    }

    #[test]
    fn rejection_sampler() {
        let mut rng = seeded(3);
        let two = rejection_derangement(&mut rng, 2).unwrap();
        assert_eq!(two.permutation.images(), &[1, 0]);
        assert!(rejection_derangement(&mut rng, 1).is_err());
        for n in [4, 5] {
            let p = derangement_uniformity(n, 100_000, || Ok(rejection_derangement(&mut rng, n)?.permutation)).unwrap();
            assert!(p > 0.001, "n = {n}: p = {p}");
        }
        let runs = 100_000;
        let attempts: u64 = (0..runs).map(|_| rejection_derangement(&mut rng, 10).unwrap().attempts).sum();
        let mean = attempts as f64 / runs as f64;
        assert!((mean - std::f64::consts::E).abs() < 0.1, "{mean}");
    }

    #[test]
    fn payne_pass_basics() {
        let mut rng = seeded(8);
        let d = Permutation::new(vec![1, 2, 0]).unwrap();
        assert_eq!(payne_pass(&mut rng, d.clone(), PayneVariant::Distinct), d);
        let id = Permutation::identity(2);
        assert_eq!(payne_pass(&mut rng, id, PayneVariant::Distinct).images(), &[1, 0]);
        for _ in 0..1000 {
            assert!(payne_derangement(&mut rng, 6, PayneVariant::Distinct).unwrap().is_derangement());
            assert!(payne_derangement(&mut rng, 6, PayneVariant::Any).unwrap().is_derangement());
        }
    }

    #[test]
    fn exact_laws_are_distributions() {
        for n in 2..=5 {
            for start in [Start::Uniform, Start::Identity] {
                for v in PayneVariant::ALL {
                    let r = payne_exact_distribution(n, start, v).unwrap();
                    assert_eq!(r.total, ratio(1, 1));
                    if v != PayneVariant::Any {
                        assert!(r.non_derangement_mass.is_zero());
                    }
                }
            }
            let r = payne_exact_distribution(n, Start::Uniform, PayneVariant::Distinct).unwrap();
            assert_eq!(r.distribution.len() as u64, derangement_number(n));
        }
        let two = payne_exact_distribution(2, Start::Identity, PayneVariant::Distinct).unwrap();
        assert!(two.is_uniform());
        assert!(payne_exact_distribution(7, Start::Identity, PayneVariant::Distinct).is_err());
    }

    #[test]
    fn empirical_matches_exact_law_n4() {
        let exact = payne_exact_distribution(4, Start::Uniform, PayneVariant::Distinct).unwrap();
        let mut rng = seeded(21);
        let samples = 200_000;
        let mut counts: BTreeMap<Permutation, u64> = BTreeMap::new();
        for _ in 0..samples {
            *counts.entry(payne_derangement(&mut rng, 4, PayneVariant::Distinct).unwrap()).or_default() += 1;
        }
        let mut stat = 0.0;
        for (w, p) in &exact.distribution {
            let e = crate::rational::to_f64(p) * samples as f64;
            let o = *counts.get(w).unwrap_or(&0) as f64;
            stat += (o - e).powi(2) / e;
        }
        let df = (exact.distribution.len() - 1) as f64;
        let p = ChiSquared::new(df).unwrap().sf(stat);
        assert!(p > 0.001, "p = {p}");
    }

    #[test]
    fn parsing() {
        assert_eq!("later".parse::<PayneVariant>().unwrap(), PayneVariant::Later);
        assert!("sideways".parse::<PayneVariant>().is_err());
        assert_eq!("identity".parse::<Start>().unwrap(), Start::Identity);
    }
}
