//! k-subsets of `[n]` as single-word bitmasks, binomial coefficients, colex
//! ranking, families of k-sets and the plain-text family file format.
//!
//! Ground-set elements are 1-based: element `i` lives in bit `i - 1`. Masks are
//! `u64`, so the ground set is capped at 64 elements.

use std::collections::HashSet;
use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported ground-set size.
pub const MAX_N: u32 = 64;

static PASCAL: [[u64; 65]; 65] = pascal_table();

const fn pascal_table() -> [[u64; 65]; 65] {
    let mut t = [[0u64; 65]; 65];
    let mut n = 0;
    while n <= 64 {
        t[n][0] = 1;
        let mut k = 1;
        while k <= n {
            let right = if k < n { t[n - 1][k] } else { 0 };
            t[n][k] = t[n - 1][k - 1] + right;
            k += 1;
        }
        n += 1;
    }
    t
}

/// `C(n, k)` for `n <= 64`; zero when `k > n`.
///
/// Panics if `n > 64`. Use [`binomial`] for checked access.
#[inline]
pub fn choose(n: u32, k: u32) -> u64 {
    assert!(n <= MAX_N, "choose: n = {n} exceeds {MAX_N}");
    if k > n {
        0
    } else {
        PASCAL[n as usize][k as usize]
    }
}

/// Exact binomial coefficient. Negative or oversized `k` gives 0.
pub fn binomial(n: u64, k: i64) -> Result<u64> {
    if n > MAX_N as u64 {
        return Err(Error::Range(format!("binomial: n = {n} exceeds {MAX_N}")));
    }
    if k < 0 || k as u64 > n {
        return Ok(0);
    }
    Ok(PASCAL[n as usize][k as usize])
}

fn check_ground(n: u32) -> Result<()> {
    if n > MAX_N {
        return Err(Error::Range(format!("ground set size {n} exceeds {MAX_N}")));
    }
    Ok(())
}

#[inline]
fn ground_mask(n: u32) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// A subset of `[n]` stored as a bitmask. `k` is the popcount.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct KSet {
    mask: u64,
    n: u8,
}

impl KSet {
    pub fn from_mask(mask: u64, n: u32) -> Result<Self> {
        check_ground(n)?;
        if mask & !ground_mask(n) != 0 {
            return Err(Error::Range(format!(
                "mask {mask:#x} has elements outside [{n}]"
            )));
        }
        Ok(KSet { mask, n: n as u8 })
    }

    /// Builds a set from 1-based elements. Duplicates are rejected.
    pub fn from_elements(elements: &[u32], n: u32) -> Result<Self> {
        check_ground(n)?;
        let mut mask = 0u64;
        for &e in elements {
            if e == 0 || e > n {
                return Err(Error::Range(format!("element {e} is not in [{n}]")));
            }
            let bit = 1u64 << (e - 1);
            if mask & bit != 0 {
                return Err(Error::Parameter(format!("element {e} repeated")));
            }
            mask |= bit;
        }
        Ok(KSet { mask, n: n as u8 })
    }

    /// Parses a comma-separated list such as `1,2,5`.
    pub fn parse_list(text: &str, n: u32) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Err(Error::Parameter("empty set".into()));
        }
        let elements = text
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parameter(format!("bad element `{}`", tok.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        KSet::from_elements(&elements, n)
    }

    #[inline]
    pub fn mask(self) -> u64 {
        self.mask
    }

    #[inline]
    pub fn n(self) -> u32 {
        self.n as u32
    }

    #[inline]
    pub fn k(self) -> u32 {
        self.mask.count_ones()
    }

    #[inline]
    pub fn contains(self, element: u32) -> bool {
        (1..=64).contains(&element) && self.mask >> (element - 1) & 1 == 1
    }

    #[inline]
    pub fn is_disjoint(self, other: KSet) -> bool {
        self.mask & other.mask == 0
    }

    #[inline]
    pub fn intersection_size(self, other: KSet) -> u32 {
        (self.mask & other.mask).count_ones()
    }

    /// Elements in ascending order (1-based).
    pub fn iter(self) -> impl Iterator<Item = u32> {
        let mut rest = self.mask;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let bit = rest.trailing_zeros();
            rest &= rest - 1;
            Some(bit + 1)
        })
    }

    pub fn elements(self) -> Vec<u32> {
        self.iter().collect()
    }

    /// `1,2,5`, the file and command-line form.
    pub fn to_list_string(self) -> String {
        let parts: Vec<String> = self.iter().map(|e| e.to_string()).collect();
        parts.join(",")
    }
}

impl PartialOrd for KSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Colex order: for equal `n`, comparing masks as integers is colex.
impl Ord for KSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.mask.cmp(&other.mask).then(self.n.cmp(&other.n))
    }
}

impl fmt::Debug for KSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.to_list_string())
    }
}

impl fmt::Display for KSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.to_list_string())
    }
}

impl Serialize for KSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.k() as usize))?;
        for e in self.iter() {
            seq.serialize_element(&e)?;
        }
        seq.end()
    }
}

/// Colex-ordered stream of all k-subsets of `[n]` (Gosper's successor).
#[derive(Clone, Debug)]
pub struct KSets {
    next: Option<u128>,
    n: u32,
}

impl Iterator for KSets {
    type Item = KSet;

    fn next(&mut self) -> Option<KSet> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            let low = cur & cur.wrapping_neg();
            let ripple = cur + low;
            let succ = ripple + (((ripple ^ cur) / low) >> 2);
            (succ >> self.n == 0).then_some(succ)
        };
        Some(KSet {
            mask: cur as u64,
            n: self.n as u8,
        })
    }
}

pub fn enumerate_ksets(n: u32, k: u32) -> Result<KSets> {
    check_ground(n)?;
    if k > n {
        return Err(Error::Range(format!("k = {k} exceeds n = {n}")));
    }
    Ok(KSets {
        next: Some((1u128 << k) - 1),
        n,
    })
}

/// Position of `s` in [`enumerate_ksets`] order.
pub fn rank_colex(s: KSet) -> u64 {
    s.iter()
        .enumerate()
        .map(|(i, e)| choose(e - 1, i as u32 + 1))
        .sum()
}

pub fn unrank_colex(rank: u64, n: u32, k: u32) -> Result<KSet> {
    check_ground(n)?;
    if k > n || rank >= choose(n, k) {
        return Err(Error::Range(format!(
            "rank {rank} out of range for C({n},{k}) = {}",
            if k > n { 0 } else { choose(n, k) }
        )));
    }
    let mut rest = rank;
    let mut mask = 0u64;
    let mut top = n;
    for i in (1..=k).rev() {
        // largest c < top with C(c, i) <= rest
        let mut c = top - 1;
        while choose(c, i) > rest {
            c -= 1;
        }
        mask |= 1u64 << c;
        rest -= choose(c, i);
        top = c;
    }
    Ok(KSet { mask, n: n as u8 })
}

/// An ordered list of distinct k-subsets of `[n]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    n: u32,
    k: u32,
    sets: Vec<KSet>,
}

impl Family {
    pub fn new(n: u32, k: u32, sets: Vec<KSet>) -> Result<Self> {
        check_ground(n)?;
        let mut seen = HashSet::with_capacity(sets.len());
        for s in &sets {
            if s.n() != n || s.k() != k {
                return Err(Error::Parameter(format!(
                    "set {s} does not belong to C([{n}],{k})"
                )));
            }
            if !seen.insert(s.mask()) {
                return Err(Error::Parameter(format!("set {s} repeated in family")));
            }
        }
        Ok(Family { n, k, sets })
    }

    pub fn empty(n: u32, k: u32) -> Self {
        Family {
            n,
            k,
            sets: Vec::new(),
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[KSet] {
        &self.sets
    }

    pub fn iter(&self) -> std::slice::Iter<'_, KSet> {
        self.sets.iter()
    }

    pub fn contains(&self, s: KSet) -> bool {
        self.sets.contains(&s)
    }

    /// Same members, colex-sorted.
    pub fn canonical(&self) -> Family {
        let mut sets = self.sets.clone();
        sets.sort();
        Family {
            n: self.n,
            k: self.k,
            sets,
        }
    }

    pub fn into_sets(self) -> Vec<KSet> {
        self.sets
    }

    /// Members as 1-based element lists, for JSON output.
    pub fn to_lists(&self) -> Vec<Vec<u32>> {
        self.sets.iter().map(|s| s.elements()).collect()
    }
}

impl<'a> IntoIterator for &'a Family {
    type Item = &'a KSet;
    type IntoIter = std::slice::Iter<'a, KSet>;

    fn into_iter(self) -> Self::IntoIter {
        self.sets.iter()
    }
}

/// Families `F_1, ..., F_h` over a common `(n, k)`.
///
/// Construction only enforces uniform parameters and nonempty families; the
/// three cross-family conditions are checked by
/// [`crate::families::validate_system`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySystem {
    n: u32,
    k: u32,
    families: Vec<Family>,
}

impl FamilySystem {
    pub fn new(n: u32, k: u32, families: Vec<Family>) -> Result<Self> {
        check_ground(n)?;
        if k > n {
            return Err(Error::Range(format!("k = {k} exceeds n = {n}")));
        }
        for (i, f) in families.iter().enumerate() {
            if f.n() != n || f.k() != k {
                return Err(Error::Parameter(format!(
                    "family {} has parameters ({},{}) instead of ({n},{k})",
                    i + 1,
                    f.n(),
                    f.k()
                )));
            }
            if f.is_empty() {
                return Err(Error::Parameter(format!("family {} is empty", i + 1)));
            }
        }
        Ok(FamilySystem { n, k, families })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn families(&self) -> &[Family] {
        &self.families
    }

    /// Number of families.
    pub fn h(&self) -> usize {
        self.families.len()
    }

    /// Largest family size (0 for an empty system).
    pub fn t(&self) -> usize {
        self.families.iter().map(Family::len).max().unwrap_or(0)
    }

    /// `Σ |F_i|`.
    pub fn total(&self) -> usize {
        self.families.iter().map(Family::len).sum()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.families.iter().map(Family::len).collect()
    }

    /// All member sets, family by family.
    pub fn all_sets(&self) -> impl Iterator<Item = KSet> + '_ {
        self.families.iter().flat_map(|f| f.iter().copied())
    }
}

/// `h`, `t` and `m_j = #{i : |F_i| >= j}` for `j = 1..=t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProfileVector {
    pub h: usize,
    pub t: usize,
    /// `m[j - 1]` is `m_j`.
    pub m: Vec<usize>,
}

impl ProfileVector {
    /// `m_j` with 1-based `j`; zero beyond `t`.
    pub fn m(&self, j: usize) -> usize {
        if j == 0 {
            return self.h;
        }
        self.m.get(j - 1).copied().unwrap_or(0)
    }

    /// `h + Σ_{j=2..t} m_j`, which equals `Σ |F_i|`.
    pub fn layered_total(&self) -> usize {
        self.h + self.m.iter().skip(1).sum::<usize>()
    }
}

pub fn profile(sys: &FamilySystem) -> ProfileVector {
    let t = sys.t();
    let mut m = vec![0usize; t];
    for size in sys.sizes() {
        for slot in m.iter_mut().take(size) {
            *slot += 1;
        }
    }
    ProfileVector { h: sys.h(), t, m }
}

/// Parses the family file format.
///
/// ```text
/// n=4 k=2
/// 1,2
/// 1,3;2,4
/// ```
///
/// Each non-empty line is one family with `;`-separated sets. If the body
/// contains a `--` line, `--` separates families instead and all sets between
/// two separators form one family. Lines starting with `#` are ignored.
pub fn parse_family_file(text: &str) -> Result<FamilySystem> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing `n=<int> k=<int>` header"))?;
    let (n, k) = parse_header(header).ok_or_else(|| {
        Error::parse(
            header_line,
            format!("bad header `{header}`, expected `n=<int> k=<int>`"),
        )
    })?;
    if n > MAX_N || k > n {
        return Err(Error::parse(
            header_line,
            format!("unsupported parameters n={n} k={k}"),
        ));
    }

    let body: Vec<(usize, &str)> = lines.collect();
    let dashed = body.iter().any(|(_, l)| *l == "--");

    let mut families = Vec::new();
    let mut current: Vec<KSet> = Vec::new();
    let mut seen: HashSet<u64> = HashSet::new();
    let mut block_start = header_line + 1;

    let mut close = |current: &mut Vec<KSet>, seen: &mut HashSet<u64>, line: usize| -> Result<()> {
        if current.is_empty() {
            return Err(Error::parse(line, "empty family"));
        }
        families.push(Family {
            n,
            k,
            sets: std::mem::take(current),
        });
        seen.clear();
        Ok(())
    };

    for &(line_no, line) in &body {
        if line == "--" {
            close(&mut current, &mut seen, line_no)?;
            block_start = line_no + 1;
            continue;
        }
        for piece in line.split(';') {
            let s = parse_set(piece, n, k).map_err(|msg| Error::parse(line_no, msg))?;
            if !seen.insert(s.mask()) {
                return Err(Error::parse(
                    line_no,
                    format!("set {s} repeated within a family"),
                ));
            }
            current.push(s);
        }
        if !dashed {
            close(&mut current, &mut seen, line_no)?;
        }
    }
    if dashed {
        let last = body.last().map(|(l, _)| *l).unwrap_or(block_start);
        close(&mut current, &mut seen, last.max(block_start))?;
    }

    FamilySystem::new(n, k, families)
}

fn parse_header(line: &str) -> Option<(u32, u32)> {
    let mut n = None;
    let mut k = None;
    for tok in line.split_whitespace() {
        let (key, value) = tok.split_once('=')?;
        let value: u32 = value.parse().ok()?;
        match key {
            "n" => n = Some(value),
            "k" => k = Some(value),
            _ => return None,
        }
    }
    Some((n?, k?))
}

fn parse_set(piece: &str, n: u32, k: u32) -> std::result::Result<KSet, String> {
    let piece = piece.trim();
    if piece.is_empty() {
        return Err("empty set".into());
    }
    let mut elements = Vec::with_capacity(k as usize);
    for tok in piece.split(',') {
        let tok = tok.trim();
        let e: u32 = tok.parse().map_err(|_| format!("bad element `{tok}`"))?;
        if e == 0 || e > n {
            return Err(format!("element {e} is not in [{n}]"));
        }
        elements.push(e);
    }
    let s = KSet::from_elements(&elements, n).map_err(|e| e.to_string())?;
    if s.k() != k {
        return Err(format!("set {s} has {} elements, expected {k}", s.k()));
    }
    Ok(s)
}

/// Canonical text: header, then one `;`-joined line per family with sets in
/// colex order and elements ascending.
pub fn serialize_family_file(sys: &FamilySystem) -> String {
    let mut out = format!("n={} k={}\n", sys.n(), sys.k());
    for f in sys.families() {
        let line: Vec<String> = f.canonical().iter().map(|s| s.to_list_string()).collect();
        out.push_str(&line.join(";"));
        out.push('\n');
    }
    out
}
