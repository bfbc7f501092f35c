//! Brute-force ground truth on explicit permutations and explicit acted-on
//! sets. Nothing here calls the closed-form counts it is used to check.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;

use crate::distributions::{Action, ExactDistribution};
use crate::error::{domain, Error, Result};
use crate::partitions::{enumerate_cycle_types, CycleType};
use crate::perm::{all_permutations, Permutation};
use crate::rational::{from_u64, from_uint, Rational};

pub const MAX_ORACLE_DEGREE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OracleAction {
    KSets(usize),
    Matchings,
    /// Partitions of the points into blocks of size `a`.
    Blocks(usize),
}

/// Fixed-point counts for every element of `S_n`, indexed by rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionTable {
    pub n: usize,
    pub action: OracleAction,
    pub set_size: usize,
    pub counts: Vec<u64>,
}

fn ksets(n: usize, k: usize) -> Vec<u32> {
    (0u32..1 << n).filter(|m| m.count_ones() as usize == k).collect()
}

fn image_mask(w: &Permutation, mask: u32) -> u32 {
    (0..w.len()).filter(|&i| mask >> i & 1 == 1).map(|i| 1u32 << w.apply(i)).sum()
}

/// All perfect matchings as partner arrays.
fn matchings(n: usize) -> Vec<Vec<usize>> {
    fn rec(partner: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let Some(i) = partner.iter().position(|&p| p == usize::MAX) else {
            out.push(partner.clone());
            return;
        };
        for j in i + 1..partner.len() {
            if partner[j] == usize::MAX {
                partner[i] = j;
                partner[j] = i;
                rec(partner, out);
                partner[i] = usize::MAX;
                partner[j] = usize::MAX;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut vec![usize::MAX; n], &mut out);
    out
}

/// Partitions into blocks of size `a`, each a list of block masks sorted by
/// minimum element.
fn block_systems(n: usize, a: usize) -> Vec<Vec<u32>> {
    fn rec(free: u32, a: usize, blocks: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if free == 0 {
            out.push(blocks.clone());
            return;
        }
        let low = free & free.wrapping_neg();
        let rest = free & !low;
        // Every block containing the lowest free point.
        let mut sub = rest;
        loop {
            if sub.count_ones() as usize == a - 1 {
                blocks.push(low | sub);
                rec(rest & !sub, a, blocks, out);
                blocks.pop();
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    let mut out = Vec::new();
    rec((1u32 << n) - 1, a, &mut Vec::new(), &mut out);
    for b in &mut out {
        b.sort_by_key(|m| m.trailing_zeros());
    }
    out
}

pub fn brute_force_fixed_points(n: usize, action: OracleAction) -> Result<ActionTable> {
    if n > MAX_ORACLE_DEGREE {
        return Err(Error::Capacity {
            what: "oracle degree",
            requested: n,
            cap: MAX_ORACLE_DEGREE,
        });
    }
    let perms: Vec<Permutation> = all_permutations(n).collect();
    let (set_size, counts): (usize, Vec<u64>) = match action {
        OracleAction::KSets(k) => {
            if k > n {
                return domain(format!("k = {k} exceeds n = {n}"));
            }
            let sets = ksets(n, k);
            let counts = perms
                .par_iter()
                .map(|w| sets.iter().filter(|&&m| image_mask(w, m) == m).count() as u64)
                .collect();
            (sets.len(), counts)
        }
        OracleAction::Matchings => {
            if n % 2 == 1 || n == 0 {
                return domain(format!("matchings need an even degree >= 2, got {n}"));
            }
            let ms = matchings(n);
            let counts = perms
                .par_iter()
                .map(|w| {
                    ms.iter()
                        .filter(|p| (0..n).all(|i| p[w.apply(i)] == w.apply(p[i])))
                        .count() as u64
                })
                .collect();
            (ms.len(), counts)
        }
        OracleAction::Blocks(a) => {
            if a == 0 || n == 0 || !n.is_multiple_of(a) {
                return domain(format!("block size {a} must divide n = {n}"));
            }
            let systems = block_systems(n, a);
            let counts = perms
                .par_iter()
                .map(|w| {
                    systems
                        .iter()
                        .filter(|blocks| {
                            let mut img: Vec<u32> = blocks.iter().map(|&b| image_mask(w, b)).collect();
                            img.sort_by_key(|m| m.trailing_zeros());
                            &img == *blocks
                        })
                        .count() as u64
                })
                .collect();
            (systems.len(), counts)
        }
    };
    Ok(ActionTable { n, action, set_size, counts })
}

impl ActionTable {
    pub fn mean(&self) -> Rational {
        let s: u64 = self.counts.iter().sum();
        from_u64(s) / from_u64(self.counts.len() as u64)
    }

    /// Proportion of elements with at least one fixed point.
    pub fn proportion_fixing_some(&self) -> Rational {
        let hits = self.counts.iter().filter(|&&c| c > 0).count() as u64;
        from_u64(hits) / from_u64(self.counts.len() as u64)
    }

    /// Counts per cycle type, or an error if two conjugate elements disagree.
    pub fn by_cycle_type(&self) -> Result<BTreeMap<CycleType, u64>> {
        let mut out = BTreeMap::new();
        for (rank, &c) in self.counts.iter().enumerate() {
            let ct = Permutation::unrank(self.n, rank).cycle_type();
            if let Some(prev) = out.insert(ct.clone(), c) {
                if prev != c {
                    return domain(format!("fixed-point count not a class function at {ct}"));
                }
            }
        }
        Ok(out)
    }

    /// The induced law as an [`ExactDistribution`], for k-sets and matchings.
    pub fn distribution(&self) -> Result<ExactDistribution> {
        let action = match self.action {
            OracleAction::KSets(k) => Action::KSets { k },
            OracleAction::Matchings => Action::Matchings,
            OracleAction::Blocks(_) => return Err(Error::Unsupported("no distribution type for block actions".into())),
        };
        ExactDistribution::from_counts(self.n, action, self.counts.iter().map(|&c| BigUint::from(c)))
    }
}

/// Fixed k-sets of one class, computed two ways from the subgroup
/// `H = S_k x S_{n-k}` stabilising `{0..k-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassIntersectionRow {
    pub cycle_type: CycleType,
    pub class_size: BigUint,
    /// `|C n H|`, counted over explicit elements of `H`.
    pub intersection: BigUint,
    /// `|C n H| |X| / |C|`.
    pub via_intersection: Rational,
    /// `|C_G(g)| sum over H-classes in C of 1 / |C_H(g_i)|`.
    pub via_centralizers: Rational,
}

fn embed_pair(sigma: &Permutation, tau: &Permutation) -> Permutation {
    let k = sigma.len();
    let images = sigma.images().iter().copied().chain(tau.images().iter().map(|&t| t + k)).collect();
    Permutation::from_vec_unchecked(images)
}

fn sum_types(a: &CycleType, b: &CycleType) -> CycleType {
    let n = a.degree() + b.degree();
    let mults: Vec<u64> = (1..=n).map(|l| a.count(l) + b.count(l)).collect();
    CycleType::from_multiplicities(&mults).expect("sum of partitions")
}

pub fn fixed_points_via_class_intersection(n: usize, k: usize) -> Result<Vec<ClassIntersectionRow>> {
    if n > MAX_ORACLE_DEGREE {
        return Err(Error::Capacity {
            what: "oracle degree",
            requested: n,
            cap: MAX_ORACLE_DEGREE,
        });
    }
    if k == 0 || 2 * k > n {
        return domain(format!("class intersection needs 1 <= k <= n/2, got n = {n}, k = {k}"));
    }
    let mut hits: BTreeMap<CycleType, u64> = BTreeMap::new();
    let left: Vec<Permutation> = all_permutations(k).collect();
    for tau in all_permutations(n - k) {
        for sigma in &left {
            *hits.entry(embed_pair(sigma, &tau).cycle_type()).or_default() += 1;
        }
    }
    let mut centralizer_sums: BTreeMap<CycleType, Rational> = BTreeMap::new();
    let right: Vec<CycleType> = enumerate_cycle_types(n - k)?.collect();
    for mu in enumerate_cycle_types(k)? {
        for nu in &right {
            let lambda = sum_types(&mu, nu);
            let w = Rational::new(1.into(), (mu.centralizer_order() * nu.centralizer_order()).into());
            *centralizer_sums.entry(lambda).or_insert_with(Rational::zero) += w;
        }
    }
    let x = from_uint(&crate::rational::binomial(n as u64, k as u64));
    enumerate_cycle_types(n)?
        .map(|ct| {
            let class_size = ct.class_size();
            let intersection = BigUint::from(*hits.get(&ct).unwrap_or(&0));
            let via_intersection = from_uint(&intersection) * &x / from_uint(&class_size);
            let via_centralizers = centralizer_sums
                .get(&ct)
                .map(|s| s * from_uint(&ct.centralizer_order()))
                .unwrap_or_else(Rational::zero);
            Ok(ClassIntersectionRow {
                cycle_type: ct,
                class_size,
                intersection,
                via_intersection,
                via_centralizers,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::{fixed_ksets, fixed_matchings};
    use crate::rational::ratio;
    use crate::series::wreath_bound_series;

    #[test]
    fn set_sizes() {
        assert_eq!(matchings(6).len(), 15);
        assert_eq!(matchings(8).len(), 105);
        assert_eq!(block_systems(6, 3).len(), 10);
        assert_eq!(block_systems(8, 2).len(), 105);
        assert_eq!(block_systems(8, 4).len(), 35);
    }

    #[test]
    fn ksets_mean_one() {
        let t = brute_force_fixed_points(4, OracleAction::KSets(2)).unwrap();
        assert_eq!(t.mean(), ratio(1, 1));
        assert_eq!(t.set_size, 6);
    }

    #[test]
    fn matchings_against_formula() {
        let t = brute_force_fixed_points(6, OracleAction::Matchings).unwrap();
        for (ct, c) in t.by_cycle_type().unwrap() {
            assert_eq!(BigUint::from(c), fixed_matchings(&ct).unwrap(), "{ct}");
        }
    }

    #[test]
    fn block_systems_in_s4() {
        let t = brute_force_fixed_points(4, OracleAction::Blocks(2)).unwrap();
        assert_eq!(t.set_size, 3);
        let p = t.proportion_fixing_some();
        assert_eq!(p, ratio(2, 3));
        let bound = wreath_bound_series::<Rational>(2, 2).unwrap().coeff(2).clone();
        assert!(p <= bound);
    }

    #[test]
    fn class_intersection_forms() {
        let rows = fixed_points_via_class_intersection(4, 1).unwrap();
        let transposition = CycleType::from_parts(&[2, 1, 1]).unwrap();
        let row = rows.iter().find(|r| r.cycle_type == transposition).unwrap();
        assert_eq!(row.class_size, BigUint::from(6u32));
        assert_eq!(row.intersection, BigUint::from(3u32));
        assert_eq!(row.via_intersection, ratio(2, 1));
        for n in 2..=8 {
            for k in 1..=n / 2 {
                let rows = fixed_points_via_class_intersection(n, k).unwrap();
                for r in rows {
                    let f = from_uint(&fixed_ksets(&r.cycle_type, k).unwrap());
                    assert_eq!(r.via_intersection, f);
                    assert_eq!(r.via_centralizers, f);
                }
            }
        }
        assert_eq!(fixed_points_via_class_intersection(6, 2).unwrap().len(), 11);
    }

    #[test]
    fn errors() {
        assert!(matches!(brute_force_fixed_points(9, OracleAction::Matchings), Err(Error::Capacity { .. })));
        assert!(brute_force_fixed_points(5, OracleAction::Matchings).is_err());
        assert!(brute_force_fixed_points(6, OracleAction::Blocks(4)).is_err());
    }
}
