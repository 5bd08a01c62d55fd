//! Intersecting-family predicates, extremal constructions and systems of
//! pairwise-disjoint, cross-intersecting families.

use serde::Serialize;

use crate::combinatorics::{choose, enumerate_ksets, profile, Family, FamilySystem, KSet};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Largest `C(n,k)` accepted by [`max_le1_almost_intersecting_bruteforce`].
pub const BRUTE_FORCE_CAP: u64 = 21;

pub fn is_pairwise_disjoint(f: &Family) -> bool {
    let sets = f.sets();
    sets.iter()
        .enumerate()
        .all(|(i, a)| sets[i + 1..].iter().all(|b| a.is_disjoint(*b)))
}

pub fn is_intersecting(f: &Family) -> bool {
    let sets = f.sets();
    sets.iter()
        .enumerate()
        .all(|(i, a)| sets[i + 1..].iter().all(|b| !a.is_disjoint(*b)))
}

/// Every member of `f1` meets every member of `f2` (vacuous if either is empty).
pub fn are_cross_intersecting(f1: &Family, f2: &Family) -> bool {
    f1.iter().all(|a| f2.iter().all(|b| !a.is_disjoint(*b)))
}

/// Intersection of all members; `None` for an empty family.
pub fn common_intersection(f: &Family) -> Option<u64> {
    f.iter().map(|s| s.mask()).reduce(|acc, m| acc & m)
}

/// First violated condition of a family system, with 1-based indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "condition")]
pub enum SystemViolation {
    /// Condition 1: families must not share a set.
    #[serde(rename = "1")]
    SharedSet { families: (usize, usize), set: KSet },
    /// Condition 2: sets inside one family must be pairwise disjoint.
    #[serde(rename = "2")]
    NotDisjoint { family: usize, sets: (KSet, KSet) },
    /// Condition 3: sets from different families must intersect.
    #[serde(rename = "3")]
    NotCrossIntersecting {
        families: (usize, usize),
        sets: (KSet, KSet),
    },
}

impl SystemViolation {
    pub fn condition(&self) -> u8 {
        match self {
            SystemViolation::SharedSet { .. } => 1,
            SystemViolation::NotDisjoint { .. } => 2,
            SystemViolation::NotCrossIntersecting { .. } => 3,
        }
    }
}

impl std::fmt::Display for SystemViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SystemViolation::SharedSet { families, set } => write!(
                f,
                "condition 1: families {} and {} both contain {set}",
                families.0, families.1
            ),
            SystemViolation::NotDisjoint { family, sets } => write!(
                f,
                "condition 2: family {family} has intersecting members {} and {}",
                sets.0, sets.1
            ),
            SystemViolation::NotCrossIntersecting { families, sets } => write!(
                f,
                "condition 3: {} (family {}) and {} (family {}) are disjoint",
                sets.0, families.0, sets.1, families.1
            ),
        }
    }
}

/// Checks the three conditions in order: families share no set, each family
/// is pairwise disjoint, different families cross-intersect.
pub fn validate_system(sys: &FamilySystem) -> std::result::Result<(), SystemViolation> {
    let fams = sys.families();
    for i in 0..fams.len() {
        for j in i + 1..fams.len() {
            if let Some(&set) = fams[i].iter().find(|s| fams[j].contains(**s)) {
                return Err(SystemViolation::SharedSet {
                    families: (i + 1, j + 1),
                    set,
                });
            }
        }
    }
    for (i, f) in fams.iter().enumerate() {
        let sets = f.sets();
        for a in 0..sets.len() {
            if let Some(b) = sets[a + 1..].iter().find(|b| !sets[a].is_disjoint(**b)) {
                return Err(SystemViolation::NotDisjoint {
                    family: i + 1,
                    sets: (sets[a], *b),
                });
            }
        }
    }
    for i in 0..fams.len() {
        for j in i + 1..fams.len() {
            for a in fams[i].iter() {
                if let Some(b) = fams[j].iter().find(|b| a.is_disjoint(**b)) {
                    return Err(SystemViolation::NotCrossIntersecting {
                        families: (i + 1, j + 1),
                        sets: (*a, *b),
                    });
                }
            }
        }
    }
    Ok(())
}

/// All k-sets containing `x`.
pub fn star(n: u32, k: u32, x: u32) -> Result<Family> {
    if x == 0 || x > n {
        return Err(Error::Range(format!("centre {x} is not in [{n}]")));
    }
    let sets = enumerate_ksets(n, k)?.filter(|s| s.contains(x)).collect();
    Family::new(n, k, sets)
}

/// `{G} ∪ {F : x ∈ F, F ∩ G ≠ ∅}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HmFamily {
    pub x: u32,
    pub g: KSet,
    pub members: Family,
}

/// `C(n-1,k-1) - C(n-k-1,k-1) + 1`.
pub fn hilton_milner_size(n: u32, k: u32) -> u64 {
    let avoid = if n > k { choose(n - k - 1, k - 1) } else { 0 };
    choose(n - 1, k - 1) - avoid + 1
}

pub fn hilton_milner(n: u32, k: u32, x: u32, g: KSet) -> Result<HmFamily> {
    if k == 0 || n < 2 * k {
        return Err(Error::Parameter(format!(
            "Hilton–Milner family needs n >= 2k, got n={n} k={k}"
        )));
    }
    if g.n() != n || g.k() != k {
        return Err(Error::Parameter(format!(
            "{g} is not a {k}-subset of [{n}]"
        )));
    }
    if x == 0 || x > n {
        return Err(Error::Range(format!("centre {x} is not in [{n}]")));
    }
    if g.contains(x) {
        return Err(Error::Parameter(format!("centre {x} lies in {g}")));
    }
    let mut sets = vec![g];
    sets.extend(enumerate_ksets(n, k)?.filter(|f| f.contains(x) && !f.is_disjoint(g)));
    Ok(HmFamily {
        x,
        g,
        members: Family::new(n, k, sets)?,
    })
}

/// Every member is disjoint from at most one other member.
pub fn is_le1_almost_intersecting(f: &Family) -> bool {
    let sets = f.sets();
    sets.iter()
        .all(|a| sets.iter().filter(|b| a.is_disjoint(**b)).count() <= 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlmostIntersectingMax {
    pub n: u32,
    pub k: u32,
    pub max_size: usize,
    pub witness_family: Vec<Vec<u32>>,
}

/// Largest (≤1)-almost intersecting family in `C([n],k)`, by branch and bound
/// over colex-ordered candidates. The witness is the first optimum found.
pub fn max_le1_almost_intersecting_bruteforce(n: u32, k: u32) -> Result<AlmostIntersectingMax> {
    let all: Vec<KSet> = enumerate_ksets(n, k)?.collect();
    if all.len() as u64 > BRUTE_FORCE_CAP {
        return Err(Error::Resource(format!(
            "C({n},{k}) = {} exceeds brute-force cap {BRUTE_FORCE_CAP}",
            all.len()
        )));
    }
    let mut search = AlmostSearch {
        all: &all,
        chosen: Vec::new(),
        partners: Vec::new(),
        best: Vec::new(),
    };
    search.run(0);
    let best = search.best;
    Ok(AlmostIntersectingMax {
        n,
        k,
        max_size: best.len(),
        witness_family: best.iter().map(|&i| all[i].elements()).collect(),
    })
}

struct AlmostSearch<'a> {
    all: &'a [KSet],
    chosen: Vec<usize>,
    /// disjoint-partner count of each chosen set
    partners: Vec<u8>,
    best: Vec<usize>,
}

impl AlmostSearch<'_> {
    fn run(&mut self, next: usize) {
        if self.chosen.len() > self.best.len() {
            self.best = self.chosen.clone();
        }
        for v in next..self.all.len() {
            if self.chosen.len() + (self.all.len() - v) <= self.best.len() {
                return;
            }
            let cand = self.all[v];
            let hits: Vec<usize> = (0..self.chosen.len())
                .filter(|&i| self.all[self.chosen[i]].is_disjoint(cand))
                .collect();
            if hits.len() > 1 || hits.iter().any(|&i| self.partners[i] >= 1) {
                continue;
            }
            for &i in &hits {
                self.partners[i] += 1;
            }
            self.chosen.push(v);
            self.partners.push(hits.len() as u8);
            self.run(v + 1);
            self.chosen.pop();
            self.partners.pop();
            for &i in &hits {
                self.partners[i] -= 1;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FisherReport {
    /// Common pairwise intersection size.
    pub lambda: u32,
    /// Size of the union of the members.
    pub ground: u32,
    pub members: usize,
    /// `members <= ground`.
    pub bound_holds: bool,
}

/// `Some` when all pairwise intersections have the same size.
pub fn fisher_uniform_intersection(f: &Family) -> Result<Option<FisherReport>> {
    let sets = f.sets();
    if sets.len() < 2 {
        return Err(Error::Parameter("need at least two sets".into()));
    }
    let lambda = sets[0].intersection_size(sets[1]);
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            if sets[i].intersection_size(sets[j]) != lambda {
                return Ok(None);
            }
        }
    }
    let ground = sets.iter().fold(0u64, |acc, s| acc | s.mask()).count_ones();
    Ok(Some(FisherReport {
        lambda,
        ground,
        members: sets.len(),
        bound_holds: sets.len() as u32 <= ground,
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Theorem4Bound {
    pub total: usize,
    /// `C(n-1,k-1)`.
    pub bound: u64,
    pub satisfied: bool,
    /// `n >= 2k+2` and `k >= 4`.
    pub within_hypothesis: bool,
}

/// `Σ|F_i|` against `C(n-1,k-1)` for a valid system.
pub fn theorem4_bound(sys: &FamilySystem) -> Result<Theorem4Bound> {
    validate_system(sys).map_err(|v| Error::Validation(v.to_string()))?;
    let (n, k) = (sys.n(), sys.k());
    let total = sys.total();
    let bound = if k == 0 { 0 } else { choose(n - 1, k - 1) };
    Ok(Theorem4Bound {
        total,
        bound,
        satisfied: total as u64 <= bound,
        within_hypothesis: n >= 2 * k + 2 && k >= 4,
    })
}

/// `C(2k-1,k-1)`, the bound on the number of families of size at least two.
pub fn m2_bound(k: u32) -> u64 {
    if k == 0 {
        0
    } else {
        choose(2 * k - 1, k - 1)
    }
}

/// Greedy random maximal system.
///
/// All k-sets are shuffled (SplitMix64 Fisher–Yates, see [`crate::rng`]). Each
/// set in turn is placed uniformly among its legal placements: joining family
/// `i` (disjoint from every member of `F_i`, meeting every other set), or
/// opening a new family last (meeting every set). Sets with no placement are
/// skipped. The legality tests are monotone, so one pass yields a maximal
/// system.
pub fn random_maximal_system(n: u32, k: u32, seed: u64) -> Result<FamilySystem> {
    if k == 0 || n < 2 * k + 1 {
        return Err(Error::Parameter(format!("need n >= 2k+1, got n={n} k={k}")));
    }
    let mut rng = SplitMix64::new(seed);
    let mut order: Vec<KSet> = enumerate_ksets(n, k)?.collect();
    rng.shuffle(&mut order);

    let mut families: Vec<Vec<KSet>> = Vec::new();
    let mut options = Vec::new();
    for x in order {
        options.clear();
        for (i, fam) in families.iter().enumerate() {
            if fits(&families, i, x, fam) {
                options.push(i);
            }
        }
        let opens = families.iter().flatten().all(|s| !s.is_disjoint(x));
        if opens {
            options.push(families.len());
        }
        if options.is_empty() {
            continue;
        }
        let pick = options[rng.below(options.len())];
        if pick == families.len() {
            families.push(vec![x]);
        } else {
            families[pick].push(x);
        }
    }

    let fams = families
        .into_iter()
        .map(|sets| Family::new(n, k, sets))
        .collect::<Result<Vec<_>>>()?;
    FamilySystem::new(n, k, fams)
}

fn fits(families: &[Vec<KSet>], i: usize, x: KSet, fam: &[KSet]) -> bool {
    fam.iter().all(|s| s.is_disjoint(x))
        && families
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .all(|(_, other)| other.iter().all(|s| !s.is_disjoint(x)))
}

/// No k-set can be added anywhere without breaking a condition.
pub fn is_maximal(sys: &FamilySystem) -> Result<bool> {
    let families: Vec<Vec<KSet>> = sys.families().iter().map(|f| f.sets().to_vec()).collect();
    for x in enumerate_ksets(sys.n(), sys.k())? {
        if families.iter().flatten().any(|s| *s == x) {
            continue;
        }
        if families.iter().flatten().all(|s| !s.is_disjoint(x)) {
            return Ok(false);
        }
        if (0..families.len()).any(|i| fits(&families, i, x, &families[i])) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Summary of one random maximal system, used by the stress runs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SystemStats {
    pub h: usize,
    pub t: usize,
    pub total: usize,
    pub m2: usize,
    pub m3: usize,
}

pub fn system_stats(sys: &FamilySystem) -> SystemStats {
    let p = profile(sys);
    SystemStats {
        h: p.h,
        t: p.t,
        total: sys.total(),
        m2: p.m(2),
        m3: p.m(3),
    }
}
