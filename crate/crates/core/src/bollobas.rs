//! Set-pair inequalities in exact rational arithmetic.
//!
//! Parts are bitmasks over elements `0..=63` (bit `e` is element `e`). No
//! floating point is used anywhere in this module; decimal output is produced
//! by exact long division.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::combinatorics::choose;
use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Largest ground set accepted by [`permutation_oracle`] (`9! = 362880`).
pub const ORACLE_CAP: usize = 9;

/// `1 / C(a+b, a)`.
fn inv_binom(a: u32, b: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(choose(a + b, a)))
}

fn size(mask: u64) -> u32 {
    mask.count_ones()
}

/// `p/q`, always with an explicit denominator.
pub fn fraction_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Decimal rounded half-up to `digits` places, computed exactly.
pub fn decimal_string(r: &Rational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let num: BigInt = r.numer().abs() * &scale * 2 + r.denom();
    let scaled = num.div_floor(&(r.denom() * 2));
    let (int, frac) = scaled.div_rem(&scale);
    let mut out = String::new();
    if r.is_negative() && !scaled.is_zero() {
        out.push('-');
    }
    write!(out, "{int}").unwrap();
    if digits > 0 {
        write!(
            out,
            ".{:0>width$}",
            frac.to_string(),
            width = digits as usize
        )
        .unwrap();
    }
    out
}

fn ser_fraction<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fraction_string(r))
}

fn mask_elements(mask: u64) -> Vec<u32> {
    (0..64).filter(|b| mask >> b & 1 == 1).collect()
}

/// Classic condition: `A_i ∩ B_i = ∅` and `A_i ∩ B_j ≠ ∅` for `i ≠ j`.
pub fn check_classic(pairs: &[[u64; 2]]) -> Result<()> {
    for (i, [a, b]) in pairs.iter().enumerate() {
        if a & b != 0 {
            return Err(Error::Validation(format!(
                "pair {}: A and B intersect",
                i + 1
            )));
        }
    }
    for (i, [a, _]) in pairs.iter().enumerate() {
        for (j, [_, b]) in pairs.iter().enumerate() {
            if i != j && a & b == 0 {
                return Err(Error::Validation(format!(
                    "A_{} and B_{} are disjoint",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(())
}

/// `Σ 1 / C(|A_i|+|B_i|, |A_i|)`.
pub fn classic_lhs(pairs: &[[u64; 2]]) -> Result<Rational> {
    check_classic(pairs)?;
    Ok(pairs
        .iter()
        .map(|&[a, b]| inv_binom(size(a), size(b)))
        .fold(Rational::zero(), |acc, t| acc + t))
}

/// `(A, B)` and `(B, A)` for every input pair.
pub fn doubled_pairs(pairs: &[[u64; 2]]) -> Vec<[u64; 2]> {
    pairs
        .iter()
        .map(|&[a, b]| [a, b])
        .chain(pairs.iter().rev().map(|&[a, b]| [b, a]))
        .collect()
}

/// α disjoint pairs followed by β pairwise-disjoint triples, where every part
/// of one item meets every part of every other item.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetPairSystem {
    pairs: Vec<[u64; 2]>,
    triples: Vec<[u64; 3]>,
}

#[derive(Debug, Default, Deserialize)]
struct SystemJson {
    #[serde(default)]
    pairs: Vec<[Vec<u32>; 2]>,
    #[serde(default)]
    triples: Vec<[Vec<u32>; 3]>,
}

/// Parts as read from JSON, before any validation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawSystem {
    pub pairs: Vec<[u64; 2]>,
    pub triples: Vec<[u64; 3]>,
}

fn to_mask(elements: &[u32]) -> Result<u64> {
    let mut mask = 0u64;
    for &e in elements {
        if e > 63 {
            return Err(Error::Range(format!("element {e} exceeds 63")));
        }
        if mask >> e & 1 == 1 {
            return Err(Error::Validation(format!("element {e} repeated in a part")));
        }
        mask |= 1 << e;
    }
    Ok(mask)
}

impl RawSystem {
    /// `{"pairs": [[[A],[B]], ...], "triples": [[[A],[B],[C]], ...]}`
    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: SystemJson = serde_json::from_str(text)?;
        let pairs = parsed
            .pairs
            .iter()
            .map(|[a, b]| Ok([to_mask(a)?, to_mask(b)?]))
            .collect::<Result<Vec<_>>>()?;
        let triples = parsed
            .triples
            .iter()
            .map(|[a, b, c]| Ok([to_mask(a)?, to_mask(b)?, to_mask(c)?]))
            .collect::<Result<Vec<_>>>()?;
        Ok(RawSystem { pairs, triples })
    }
}

impl SetPairSystem {
    pub fn new(pairs: Vec<[u64; 2]>, triples: Vec<[u64; 3]>) -> Result<Self> {
        let sys = SetPairSystem { pairs, triples };
        sys.validate()?;
        Ok(sys)
    }

    pub fn from_raw(raw: RawSystem) -> Result<Self> {
        SetPairSystem::new(raw.pairs, raw.triples)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        SetPairSystem::from_raw(RawSystem::from_json(text)?)
    }

    fn validate(&self) -> Result<()> {
        let items = self.items();
        for (i, parts) in items.iter().enumerate() {
            if parts.contains(&0) {
                return Err(Error::Validation(format!("item {}: empty part", i + 1)));
            }
            for x in 0..parts.len() {
                for y in x + 1..parts.len() {
                    if parts[x] & parts[y] != 0 {
                        return Err(Error::Validation(format!(
                            "item {}: parts {} and {} intersect",
                            i + 1,
                            x + 1,
                            y + 1
                        )));
                    }
                }
            }
        }
        for i in 0..items.len() {
            for j in i + 1..items.len() {
                if !items_compatible(items[i], items[j]) {
                    return Err(Error::Validation(format!(
                        "items {} and {} have disjoint parts",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn pairs(&self) -> &[[u64; 2]] {
        &self.pairs
    }

    pub fn triples(&self) -> &[[u64; 3]] {
        &self.triples
    }

    /// Pairs first, then triples.
    pub fn items(&self) -> Vec<&[u64]> {
        self.pairs
            .iter()
            .map(|p| p.as_slice())
            .chain(self.triples.iter().map(|t| t.as_slice()))
            .collect()
    }

    /// Union of all parts.
    pub fn ground(&self) -> u64 {
        self.items()
            .iter()
            .flat_map(|p| p.iter())
            .fold(0, |acc, p| acc | p)
    }

    pub fn m(&self) -> usize {
        self.ground().count_ones() as usize
    }
}

fn items_compatible(x: &[u64], y: &[u64]) -> bool {
    x.iter().all(|p| y.iter().all(|q| p & q != 0))
}

/// Contribution of a triple beyond its `(A, B)` term:
/// `2/C(a+c,a) + 2/C(b+c,b) - 2/C(a+b+c,a) - 2/C(a+b+c,b)`.
fn triple_extra(a: u32, b: u32, c: u32) -> Rational {
    let two = Rational::from_integer(BigInt::from(2));
    two * (inv_binom(a, c) + inv_binom(b, c) - inv_binom(a, b + c) - inv_binom(b, a + c))
}

/// The generalised left-hand side exactly as printed: `Σ_items 2/C(|A|+|B|,|A|)`
/// plus [`triple_extra`] for each triple.
pub fn lemma5_lhs(sys: &SetPairSystem) -> Rational {
    let two = Rational::from_integer(BigInt::from(2));
    let mut total = Rational::zero();
    for &[a, b] in &sys.pairs {
        total += &two * inv_binom(size(a), size(b));
    }
    for &[a, b, c] in &sys.triples {
        total += &two * inv_binom(size(a), size(b));
        total += triple_extra(size(a), size(b), size(c));
    }
    total
}

/// Every element of `s` comes before every element of `t` in `perm`.
pub fn precedes(perm: &[u32], s: u64, t: u64) -> bool {
    let mut pending = s.count_ones();
    for &e in perm {
        if pending == 0 {
            return true;
        }
        let bit = 1u64 << e;
        if t & bit != 0 {
            return false;
        }
        if s & bit != 0 {
            pending -= 1;
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DoubledCount {
    pub s: Vec<u32>,
    pub t: Vec<u32>,
    /// Permutations with `S <_π T`, by enumeration.
    pub count: u64,
    /// `|S|! |T|! (m-|S|-|T|)! C(m, |S|+|T|)`.
    pub formula: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ItemCount {
    /// Permutations in which some ordered pair of this item's parts is
    /// separated (`X <_π Y`).
    pub union_count: u64,
    /// The item's term of the left-hand side times `m!`, assembled from
    /// enumerated counts.
    pub weighted_count: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub m: usize,
    pub permutations: u64,
    pub doubled: Vec<DoubledCount>,
    pub counts_match: bool,
    pub max_hits_per_permutation: u32,
    /// At most one doubled index `j` has `S_j <_π T_j` for each `π`.
    pub at_most_one: bool,
    pub items: Vec<ItemCount>,
    /// Largest number of items with a separated pair in one permutation.
    pub max_items_per_permutation: u32,
    /// `weighted_count <= union_count` for every item.
    pub item_bounds_hold: bool,
    #[serde(serialize_with = "ser_fraction")]
    pub lhs: Rational,
    #[serde(serialize_with = "ser_fraction")]
    pub lhs_from_counts: Rational,
    pub lhs_le_one: bool,
}

#[derive(Clone, Default)]
struct Tally {
    doubled: Vec<u64>,
    max_hits: u32,
    union: Vec<u64>,
    /// per triple: N(A,C), N(B,C), N(A, B∪C), N(B, A∪C)
    triple: Vec<[u64; 4]>,
    max_items: u32,
}

impl Tally {
    fn new(doubled: usize, items: usize, triples: usize) -> Self {
        Tally {
            doubled: vec![0; doubled],
            union: vec![0; items],
            triple: vec![[0; 4]; triples],
            ..Default::default()
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self.doubled.iter_mut().zip(&other.doubled) {
            *a += b;
        }
        for (a, b) in self.union.iter_mut().zip(&other.union) {
            *a += b;
        }
        for (a, b) in self.triple.iter_mut().zip(&other.triple) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        self.max_hits = self.max_hits.max(other.max_hits);
        self.max_items = self.max_items.max(other.max_items);
        self
    }
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Exhaustive count over all permutations of the ground set, mirroring the
/// double-counting argument: per doubled pair `(S_j, T_j)` the number of
/// permutations with `S_j <_π T_j`, the at-most-one property, and per item the
/// number of permutations that separate some pair of its parts.
pub fn permutation_oracle(sys: &SetPairSystem) -> Result<OracleReport> {
    let ground = mask_elements(sys.ground());
    let m = ground.len();
    if m > ORACLE_CAP {
        return Err(Error::Resource(format!(
            "permutation oracle limited to |M| <= {ORACLE_CAP}, got {m}"
        )));
    }
    let items: Vec<Vec<u64>> = sys.items().iter().map(|p| p.to_vec()).collect();
    let base_pairs: Vec<[u64; 2]> = items.iter().map(|p| [p[0], p[1]]).collect();
    let doubled = doubled_pairs(&base_pairs);
    let alpha = sys.pairs.len();
    let triples = sys.triples.clone();

    let scan = |first: usize| -> Tally {
        let mut tally = Tally::new(doubled.len(), items.len(), triples.len());
        let mut rest: Vec<u32> = ground
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != first)
            .map(|(_, &e)| e)
            .collect();
        let mut perm = Vec::with_capacity(m);
        let mut pos = [0u8; 64];
        each_permutation(&mut rest, &mut |tail| {
            perm.clear();
            perm.push(ground[first]);
            perm.extend_from_slice(tail);
            for (i, &e) in perm.iter().enumerate() {
                pos[e as usize] = i as u8;
            }
            let before = |s: u64, t: u64| last(&pos, s) < first_pos(&pos, t);

            let mut hits = 0;
            for (j, &[s, t]) in doubled.iter().enumerate() {
                if before(s, t) {
                    tally.doubled[j] += 1;
                    hits += 1;
                }
            }
            tally.max_hits = tally.max_hits.max(hits);

            let mut touched = 0;
            for (i, parts) in items.iter().enumerate() {
                let separated = parts.iter().enumerate().any(|(x, &p)| {
                    parts
                        .iter()
                        .enumerate()
                        .any(|(y, &q)| x != y && before(p, q))
                });
                if separated {
                    tally.union[i] += 1;
                    touched += 1;
                }
            }
            tally.max_items = tally.max_items.max(touched);

            for (i, &[a, b, c]) in triples.iter().enumerate() {
                let row = &mut tally.triple[i];
                row[0] += before(a, c) as u64;
                row[1] += before(b, c) as u64;
                row[2] += before(a, b | c) as u64;
                row[3] += before(b, a | c) as u64;
            }
        });
        tally
    };

    let tally = if m == 0 {
        Tally::new(doubled.len(), items.len(), triples.len())
    } else {
        (0..m).into_par_iter().map(scan).reduce(
            || Tally::new(doubled.len(), items.len(), triples.len()),
            Tally::merge,
        )
    };

    let perms = factorial(m);
    let doubled_counts: Vec<DoubledCount> = doubled
        .iter()
        .zip(&tally.doubled)
        .map(|(&[s, t], &count)| {
            let (a, b) = (size(s) as usize, size(t) as usize);
            let formula = factorial(a)
                * factorial(b)
                * factorial(m - a - b)
                * choose(m as u32, (a + b) as u32);
            DoubledCount {
                s: mask_elements(s),
                t: mask_elements(t),
                count,
                formula,
            }
        })
        .collect();
    let counts_match = doubled_counts.iter().all(|d| d.count == d.formula);

    let n_items = items.len();
    let mut item_counts = Vec::with_capacity(n_items);
    let mut weighted_total: i64 = 0;
    for i in 0..n_items {
        // (S_j, T_j) and its mirror (T_j, S_j)
        let mut w = (tally.doubled[i] + tally.doubled[2 * n_items - 1 - i]) as i64;
        if i >= alpha {
            let [ac, bc, a_bc, b_ac] = tally.triple[i - alpha];
            w += 2 * (ac as i64 + bc as i64) - 2 * (a_bc as i64 + b_ac as i64);
        }
        weighted_total += w;
        item_counts.push(ItemCount {
            union_count: tally.union[i],
            weighted_count: w,
        });
    }
    let item_bounds_hold = item_counts
        .iter()
        .all(|c| c.weighted_count <= c.union_count as i64);

    let lhs = lemma5_lhs(sys);
    let lhs_from_counts = if perms == 0 {
        Rational::zero()
    } else {
        Rational::new(BigInt::from(weighted_total), BigInt::from(perms))
    };
    let lhs_le_one = lhs <= Rational::one();
    Ok(OracleReport {
        m,
        permutations: perms,
        doubled: doubled_counts,
        counts_match,
        max_hits_per_permutation: tally.max_hits,
        at_most_one: tally.max_hits <= 1,
        items: item_counts,
        max_items_per_permutation: tally.max_items,
        item_bounds_hold,
        lhs,
        lhs_from_counts,
        lhs_le_one,
    })
}

#[inline]
fn last(pos: &[u8; 64], mask: u64) -> i16 {
    let mut rest = mask;
    let mut out = -1i16;
    while rest != 0 {
        let e = rest.trailing_zeros() as usize;
        out = out.max(pos[e] as i16);
        rest &= rest - 1;
    }
    out
}

#[inline]
fn first_pos(pos: &[u8; 64], mask: u64) -> i16 {
    let mut rest = mask;
    let mut out = i16::MAX;
    while rest != 0 {
        let e = rest.trailing_zeros() as usize;
        out = out.min(pos[e] as i16);
        rest &= rest - 1;
    }
    out
}

/// Heap's algorithm; `visit` sees every permutation of `items` once.
fn each_permutation(items: &mut [u32], visit: &mut impl FnMut(&[u32])) {
    let n = items.len();
    let mut c = vec![0usize; n];
    visit(items);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            visit(items);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Eq3Report {
    pub k: u32,
    pub m2: u64,
    pub m3: u64,
    #[serde(serialize_with = "ser_fraction")]
    pub lhs: Rational,
    /// `lhs <= 1`.
    pub holds: bool,
    /// `C(3k,k) >= 3 C(2k,k)`, which turns the inequality into `m2 + m3 <= C(2k-1,k-1)`.
    pub relaxation_applies: bool,
    /// `C(2k-1,k-1)`.
    pub sum_bound: u64,
    pub sum_within_bound: bool,
}

/// `2(m2-m3)/C(2k,k) + 6 m3/C(2k,k) - 6 m3/C(3k,k) <= 1`, coefficients as
/// printed. The uniform-size value of [`lemma5_lhs`] per triple is
/// `6/C(2k,k) - 4/C(3k,k)`, which is at least the term used here.
pub fn eq3_check(k: u32, m2: u64, m3: u64) -> Result<Eq3Report> {
    if k < 2 || 3 * k > 64 {
        return Err(Error::Range(format!("k = {k} outside 2..=21")));
    }
    if m3 > m2 {
        return Err(Error::Parameter(format!("m3 = {m3} exceeds m2 = {m2}")));
    }
    let c2 = BigInt::from(choose(2 * k, k));
    let c3 = BigInt::from(choose(3 * k, k));
    let lhs = Rational::new(BigInt::from(2 * (m2 - m3)), c2.clone())
        + Rational::new(BigInt::from(6 * m3), c2.clone())
        - Rational::new(BigInt::from(6 * m3), c3.clone());
    let sum_bound = choose(2 * k - 1, k - 1);
    Ok(Eq3Report {
        k,
        m2,
        m3,
        holds: lhs <= Rational::one(),
        lhs,
        relaxation_applies: c3 >= c2 * 3,
        sum_bound,
        sum_within_bound: m2 + m3 <= sum_bound,
    })
}

/// All nonempty subsets of `0..ground` with at most `max_part` elements.
fn small_parts(ground: u32, max_part: u32) -> Vec<u64> {
    (1u64..1 << ground)
        .filter(|m| m.count_ones() <= max_part)
        .collect()
}

/// Visits every nonempty valid classic system (as a set of pairs, listed in a
/// fixed item order) with parts of size `1..=max_part` over `0..ground`.
pub fn for_each_classic_system(ground: u32, max_part: u32, mut visit: impl FnMut(&[[u64; 2]])) {
    let parts = small_parts(ground, max_part);
    let items: Vec<[u64; 2]> = parts
        .iter()
        .flat_map(|&a| {
            parts
                .iter()
                .filter(move |&&b| a & b == 0)
                .map(move |&b| [a, b])
        })
        .collect();
    let compatible = |x: &[u64; 2], y: &[u64; 2]| x[0] & y[1] != 0 && y[0] & x[1] != 0;
    each_clique(&items, &compatible, &mut |chosen: &[usize]| {
        let sys: Vec<[u64; 2]> = chosen.iter().map(|&i| items[i]).collect();
        visit(&sys);
    });
}

/// Visits every nonempty valid [`SetPairSystem`] with parts of size
/// `1..=max_part` over `0..ground`.
pub fn for_each_lemma5_system(ground: u32, max_part: u32, mut visit: impl FnMut(&SetPairSystem)) {
    let parts = small_parts(ground, max_part);
    let mut items: Vec<Vec<u64>> = Vec::new();
    for &a in &parts {
        for &b in parts.iter().filter(|&&b| a & b == 0) {
            items.push(vec![a, b]);
        }
    }
    for &a in &parts {
        for &b in parts.iter().filter(|&&b| a & b == 0) {
            for &c in parts.iter().filter(|&&c| (a | b) & c == 0) {
                items.push(vec![a, b, c]);
            }
        }
    }
    let compatible = |x: &Vec<u64>, y: &Vec<u64>| items_compatible(x, y);
    each_clique(&items, &compatible, &mut |chosen: &[usize]| {
        let mut pairs = Vec::new();
        let mut triples = Vec::new();
        for &i in chosen {
            match *items[i].as_slice() {
                [a, b] => pairs.push([a, b]),
                [a, b, c] => triples.push([a, b, c]),
                _ => unreachable!(),
            }
        }
        visit(&SetPairSystem { pairs, triples });
    });
}

fn each_clique<T>(
    items: &[T],
    compatible: &impl Fn(&T, &T) -> bool,
    visit: &mut impl FnMut(&[usize]),
) {
    fn grow<T>(
        items: &[T],
        compatible: &impl Fn(&T, &T) -> bool,
        chosen: &mut Vec<usize>,
        cands: &[usize],
        visit: &mut impl FnMut(&[usize]),
    ) {
        for (i, &v) in cands.iter().enumerate() {
            chosen.push(v);
            visit(chosen);
            let next: Vec<usize> = cands[i + 1..]
                .iter()
                .copied()
                .filter(|&u| compatible(&items[v], &items[u]))
                .collect();
            grow(items, compatible, chosen, &next, visit);
            chosen.pop();
        }
    }
    let all: Vec<usize> = (0..items.len()).collect();
    grow(items, compatible, &mut Vec::new(), &all, visit);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(elements: &[u32]) -> u64 {
        to_mask(elements).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn classic_examples() {
        let crossing = [[m(&[1]), m(&[2])], [m(&[2]), m(&[1])]];
        assert_eq!(classic_lhs(&crossing).unwrap(), q(1, 1));
        let single = [[m(&[1, 2, 3, 4]), m(&[5, 6, 7, 8])]];
        assert_eq!(classic_lhs(&single).unwrap(), q(1, 70));
        let bad = [[m(&[1]), m(&[2])], [m(&[3]), m(&[4])]];
        let err = classic_lhs(&bad).unwrap_err().to_string();
        assert!(err.contains("A_1 and B_2"), "{err}");
    }

    #[test]
    fn doubling_gives_two_m2_over_central_binomial() {
        // pairs of disjoint 4-sets, each pair meeting the other pairs' sets
        let pairs = [
            [m(&[1, 2, 3, 4]), m(&[5, 6, 7, 8])],
            [m(&[1, 2, 5, 6]), m(&[3, 4, 7, 8])],
            [m(&[1, 3, 5, 7]), m(&[2, 4, 6, 8])],
        ];
        let lhs = classic_lhs(&doubled_pairs(&pairs)).unwrap();
        assert_eq!(lhs, q(6, 70));
    }

    #[test]
    fn lemma5_examples() {
        let one = SetPairSystem::new(vec![[m(&[1]), m(&[2])]], vec![]).unwrap();
        assert_eq!(lemma5_lhs(&one), q(1, 1));
        let triple =
            SetPairSystem::new(vec![], vec![[m(&[1, 2]), m(&[3, 4]), m(&[5, 6])]]).unwrap();
        assert_eq!(lemma5_lhs(&triple), q(11, 15));
        // k = 1 triple: 1 + 1 + 1 - 2/3 - 2/3
        let singletons = SetPairSystem::new(vec![], vec![[m(&[1]), m(&[2]), m(&[3])]]).unwrap();
        assert_eq!(lemma5_lhs(&singletons), q(5, 3));
    }

    #[test]
    fn system_validation() {
        let dup = SetPairSystem::new(vec![[m(&[1]), m(&[2])], [m(&[1]), m(&[2])]], vec![]);
        assert!(matches!(dup, Err(Error::Validation(_))));
        let overlap = SetPairSystem::new(vec![[m(&[1, 2]), m(&[2])]], vec![]);
        assert!(overlap.is_err());
        let empty = SetPairSystem::new(vec![[0, m(&[2])]], vec![]);
        assert!(empty.is_err());
    }

    #[test]
    fn precedence() {
        assert!(precedes(&[1, 2, 3], m(&[1]), m(&[3])));
        assert!(!precedes(&[1, 2, 3], m(&[2]), m(&[1])));
        assert!(precedes(&[1, 3, 2], m(&[1, 3]), m(&[2])));
    }

    #[test]
    fn oracle_two_elements() {
        let sys = SetPairSystem::new(vec![[m(&[1]), m(&[2])]], vec![]).unwrap();
        let r = permutation_oracle(&sys).unwrap();
        assert_eq!(r.permutations, 2);
        assert_eq!(
            r.doubled.iter().map(|d| d.count).collect::<Vec<_>>(),
            vec![1, 1]
        );
        assert!(r.counts_match && r.at_most_one);
        assert_eq!(r.lhs_from_counts, r.lhs);
    }

    #[test]
    fn oracle_singleton_triple() {
        let sys = SetPairSystem::new(vec![], vec![[m(&[1]), m(&[2]), m(&[3])]]).unwrap();
        let r = permutation_oracle(&sys).unwrap();
        assert_eq!(r.permutations, 6);
        assert!(r.counts_match);
        assert!(r.at_most_one);
        assert_eq!(r.lhs_from_counts, q(5, 3));
        assert_eq!(r.items[0].union_count, 6);
        assert_eq!(r.items[0].weighted_count, 10);
        assert!(!r.item_bounds_hold);
        assert!(!r.lhs_le_one);
    }

    #[test]
    fn oracle_cap() {
        let sys =
            SetPairSystem::new(vec![[m(&[0, 1, 2, 3, 4]), m(&[5, 6, 7, 8, 9])]], vec![]).unwrap();
        assert!(matches!(permutation_oracle(&sys), Err(Error::Resource(_))));
    }

    #[test]
    fn eq3_examples() {
        let r = eq3_check(4, 35, 0).unwrap();
        assert_eq!(r.lhs, q(1, 1));
        assert!(r.holds);
        let r = eq3_check(4, 35, 1).unwrap();
        assert_eq!(r.lhs, q(68, 70) + q(6, 70) - q(6, 495));
        assert!(!r.holds);
        let r = eq3_check(3, 0, 0).unwrap();
        assert!(r.holds && r.relaxation_applies);
        assert_eq!(r.sum_bound, 10);
        assert!(eq3_check(4, 1, 2).is_err());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal_string(&q(11, 15), 6), "0.733333");
        assert_eq!(decimal_string(&q(2, 3), 3), "0.667");
        assert_eq!(decimal_string(&q(1, 1), 2), "1.00");
        assert_eq!(decimal_string(&q(-1, 8), 2), "-0.13");
        assert_eq!(fraction_string(&q(2, 2)), "1/1");
    }

    #[test]
    fn json_format() {
        let sys = SetPairSystem::from_json(r#"{"triples": [[[1,2],[3,4],[5,6]]]}"#).unwrap();
        assert_eq!(lemma5_lhs(&sys), q(11, 15));
        assert!(SetPairSystem::from_json("{\"pairs\": [[[1],[1]]]}").is_err());
        assert!(RawSystem::from_json("{\"pairs\": [[[64],[1]]]}").is_err());
        assert!(RawSystem::from_json("not json").is_err());
    }
}
