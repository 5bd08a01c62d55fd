//! Desk-scale verification of the general-position results, each run
//! producing a JSON [`VerificationReport`].

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bollobas::{
    classic_lhs, for_each_classic_system, for_each_lemma5_system, fraction_string, lemma5_lhs,
    permutation_oracle, Rational, SetPairSystem,
};
use crate::combinatorics::{choose, enumerate_ksets, serialize_family_file, KSet};
use crate::error::{Error, Result};
use crate::families::{
    hilton_milner_size, m2_bound, max_le1_almost_intersecting_bruteforce, random_maximal_system,
    star, system_stats, BRUTE_FORCE_CAP,
};
use crate::geodesy::check_gp_direct;
use crate::kneser::{
    self, all_pairs_distances_capped, distance_closed_form_2k1, meets_diam3_bound,
    single_source_distances, DistanceMatrix, KneserParams, DEFAULT_BFS_CAP,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Verified,
    Refuted,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Verified => "verified",
            Status::Refuted => "refuted",
            Status::Skipped => "skipped",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub claim: String,
    pub params: BTreeMap<String, Value>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub evidence: Value,
    /// Wall-clock time; the only field that varies between identical runs.
    pub runtime_ms: u64,
}

impl VerificationReport {
    fn new(claim: Claim, params: &[(&str, Value)], status: Status, evidence: Value) -> Self {
        VerificationReport {
            claim: claim.id().to_string(),
            params: params
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
            status,
            reason: None,
            evidence,
            runtime_ms: 0,
        }
    }

    fn skipped(claim: Claim, params: &[(&str, Value)], reason: String, evidence: Value) -> Self {
        let mut r = VerificationReport::new(claim, params, Status::Skipped, evidence);
        r.reason = Some(reason);
        r
    }

    /// `k=4;n=10`
    pub fn params_label(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| format!("{k}={}", plain(v)))
            .collect::<Vec<_>>()
            .join(";")
    }

    /// `star-gp_k4_n10`
    pub fn file_stem(&self) -> String {
        let mut stem = self.claim.clone();
        for (k, v) in &self.params {
            stem.push('_');
            stem.push_str(k);
            stem.push_str(&plain(v));
        }
        stem
    }

    /// JSON without the runtime, for byte-wise comparison of runs.
    pub fn canonical_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v.as_object_mut().unwrap().remove("runtime_ms");
        serde_json::to_string(&v).unwrap()
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn timed(f: impl FnOnce() -> Result<VerificationReport>) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut r = f()?;
    r.runtime_ms = start.elapsed().as_millis() as u64;
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Claim {
    DistanceFormula,
    StarGp,
    Counterexample,
    N2k1Pattern,
    ClosingInequalities,
    Threshold,
    HBound,
    BollobasSuite,
    Lemma5Suite,
    AlmostIntersecting,
}

impl Claim {
    pub const ALL: [Claim; 10] = [
        Claim::DistanceFormula,
        Claim::StarGp,
        Claim::Counterexample,
        Claim::N2k1Pattern,
        Claim::ClosingInequalities,
        Claim::Threshold,
        Claim::HBound,
        Claim::BollobasSuite,
        Claim::Lemma5Suite,
        Claim::AlmostIntersecting,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Claim::DistanceFormula => "distance-formula",
            Claim::StarGp => "star-gp",
            Claim::Counterexample => "counterexample",
            Claim::N2k1Pattern => "n2k1-pattern",
            Claim::ClosingInequalities => "closing-inequalities",
            Claim::Threshold => "threshold",
            Claim::HBound => "h-bound",
            Claim::BollobasSuite => "bollobas-suite",
            Claim::Lemma5Suite => "lemma5-suite",
            Claim::AlmostIntersecting => "almost-intersecting",
        }
    }
}

impl FromStr for Claim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Claim::ALL
            .into_iter()
            .find(|c| c.id() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown claim '{s}'")))
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Largest `C(n,k)` for all-pairs BFS.
    pub bfs: u64,
    /// Largest `C(n,k)` for the star check.
    pub star: u64,
    /// Largest `C(n,k)` for the single-source BFS confirming the path length.
    pub counterexample_bfs: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            bfs: DEFAULT_BFS_CAP,
            star: 3500,
            counterexample_bfs: 10_000,
        }
    }
}

/// Shared settings for a verification run.
#[derive(Clone, Debug, Default)]
pub struct VerifyContext {
    pub caps: Caps,
    /// Distance matrices are read from and written to this directory when set.
    pub cache_dir: Option<PathBuf>,
}

impl VerifyContext {
    fn distances(&self, p: KneserParams, cap: u64) -> Result<DistanceMatrix> {
        match &self.cache_dir {
            Some(dir) => kneser::load_or_compute(dir, p, cap),
            None => all_pairs_distances_capped(p, cap),
        }
    }
}

fn sets(p: KneserParams) -> Vec<KSet> {
    p.vertices().collect()
}

// ---------------------------------------------------------------- distances

pub fn verify_distance_formula(k: u32, ctx: &VerifyContext) -> Result<VerificationReport> {
    timed(|| {
        let params = [("k", json!(k))];
        let p = KneserParams::new(2 * k + 1, k)?;
        if k > 7 || p.order() > ctx.caps.bfs {
            return Ok(VerificationReport::skipped(
                Claim::DistanceFormula,
                &params,
                format!("C({},{k}) = {} above the BFS cap", 2 * k + 1, p.order()),
                json!({}),
            ));
        }
        let dm = ctx.distances(p, ctx.caps.bfs)?;
        let vs = sets(p);
        let mut mismatch = Value::Null;
        let mut checked = 0u64;
        'outer: for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                checked += 1;
                let s = vs[i].intersection_size(vs[j]);
                let formula = distance_closed_form_2k1(k, s)?;
                let bfs = dm.get(i, j) as u32;
                if bfs != formula {
                    mismatch = json!({"u": vs[i], "v": vs[j], "intersection": s, "bfs": bfs, "formula": formula});
                    break 'outer;
                }
            }
        }
        let status = if mismatch.is_null() {
            Status::Verified
        } else {
            Status::Refuted
        };
        Ok(VerificationReport::new(
            Claim::DistanceFormula,
            &params,
            status,
            json!({"vertices": vs.len(), "pairs_checked": checked, "diameter": dm.max(), "mismatch": mismatch}),
        ))
    })
}

// --------------------------------------------------------------------- star

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StarOutcome {
    pub n: u32,
    pub k: u32,
    pub star_size: usize,
    pub passes: bool,
    /// `n >= 2.5k - 0.5`.
    pub predicted_pass: bool,
    /// `k >= 4`, the range stated for the general-position theorem.
    pub within_hypothesis: bool,
    pub witness: Option<StarWitness>,
}

/// `z` on a geodesic from `x` to `y`, all three containing element 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StarWitness {
    pub x: KSet,
    pub z: KSet,
    pub y: KSet,
    pub d_xz: u8,
    pub d_zy: u8,
    pub d_xy: u8,
}

/// Runs the direct checker on the star centred at 1.
pub fn star_outcome(n: u32, k: u32, dm: &DistanceMatrix) -> Result<StarOutcome> {
    let p = KneserParams::new(n, k)?;
    if dm.order() as u64 != p.order() {
        return Err(Error::Parameter(format!(
            "distance matrix has order {}, Kn({n},{k}) has {}",
            dm.order(),
            p.order()
        )));
    }
    let s = star(n, k, 1)?;
    let idx = s
        .iter()
        .map(|&v| p.rank(v).map(|r| r as usize))
        .collect::<Result<Vec<_>>>()?;
    let verdict = check_gp_direct(dm, &idx)?;
    let witness = verdict.witness().map(|w| {
        Ok::<_, Error>(StarWitness {
            x: p.vertex(w.x as u64)?,
            z: p.vertex(w.z as u64)?,
            y: p.vertex(w.y as u64)?,
            d_xz: dm.get(w.x, w.z),
            d_zy: dm.get(w.z, w.y),
            d_xy: dm.get(w.x, w.y),
        })
    });
    Ok(StarOutcome {
        n,
        k,
        star_size: s.len(),
        passes: verdict.is_pass(),
        predicted_pass: meets_diam3_bound(n, k),
        within_hypothesis: k >= 4,
        witness: witness.transpose()?,
    })
}

pub fn verify_star_gp(n: u32, k: u32, ctx: &VerifyContext) -> Result<VerificationReport> {
    timed(|| {
        let params = [("k", json!(k)), ("n", json!(n))];
        let p = KneserParams::new(n, k)?;
        if p.order() > ctx.caps.star {
            return Ok(VerificationReport::skipped(
                Claim::StarGp,
                &params,
                format!(
                    "C({n},{k}) = {} above the star cap {}",
                    p.order(),
                    ctx.caps.star
                ),
                json!({}),
            ));
        }
        let dm = ctx.distances(p, ctx.caps.star)?;
        let out = star_outcome(n, k, &dm)?;
        let status = if out.passes == out.predicted_pass {
            Status::Verified
        } else {
            Status::Refuted
        };
        Ok(VerificationReport::new(
            Claim::StarGp,
            &params,
            status,
            serde_json::to_value(&out)?,
        ))
    })
}

// ----------------------------------------------------------- counterexample

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub k: u32,
    pub m: u32,
    pub n: u32,
    pub f1: KSet,
    pub f2: KSet,
    /// `[n] \ (F1 ∪ F2)`
    pub c: KSet,
    pub x: u32,
    pub y: u32,
    pub z: u32,
    /// `F1, C+x, F2-x+y, C+z, F2`
    pub path: Vec<KSet>,
    pub c_size_ok: bool,
    pub consecutive_disjoint: bool,
    pub middle_contains_one: bool,
}

impl Counterexample {
    pub fn middle(&self) -> KSet {
        self.path[2]
    }

    pub fn structure_ok(&self) -> bool {
        self.c_size_ok
            && self.consecutive_disjoint
            && self.middle_contains_one
            && self.path[0] == self.f1
            && self.path[4] == self.f2
    }
}

/// Two star members at distance 4 joined through a third star member, for
/// `n = 2k + M`, `k >= 4`, `1 <= M < (k-1)/2`. Ties are broken by taking the
/// smallest `x` in `F2 \ F1` and the smallest `y < z` in `F1 \ F2`.
pub fn build_counterexample(k: u32, m: u32) -> Result<Counterexample> {
    if k < 4 || m < 1 || 2 * m + 1 >= k {
        return Err(Error::Parameter(format!(
            "need k >= 4 and 1 <= M < 0.5k - 0.5, got k={k} M={m}"
        )));
    }
    let n = 2 * k + m;
    if n > crate::combinatorics::MAX_N {
        return Err(Error::Range(format!(
            "n = {n} exceeds {}",
            crate::combinatorics::MAX_N
        )));
    }
    let range = |lo: u32, hi: u32| (lo..=hi).collect::<Vec<u32>>();
    let f1 = KSet::from_elements(&range(1, k), n)?;
    let mut f2e = range(1, k - m - 1);
    f2e.extend(range(k + 1, k + m + 1));
    let f2 = KSet::from_elements(&f2e, n)?;
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let c = KSet::from_mask(full & !(f1.mask() | f2.mask()), n)?;

    let x = (f2.mask() & !f1.mask()).trailing_zeros() + 1;
    let only1 = f1.mask() & !f2.mask();
    let y = only1.trailing_zeros() + 1;
    let z = (only1 & (only1 - 1)).trailing_zeros() + 1;
    let bit = |e: u32| 1u64 << (e - 1);
    let path = vec![
        f1,
        KSet::from_mask(c.mask() | bit(x), n)?,
        KSet::from_mask((f2.mask() & !bit(x)) | bit(y), n)?,
        KSet::from_mask(c.mask() | bit(z), n)?,
        f2,
    ];
    let consecutive_disjoint = path.windows(2).all(|w| w[0].is_disjoint(w[1]));
    let middle_contains_one = path[2].contains(1);
    Ok(Counterexample {
        k,
        m,
        n,
        f1,
        f2,
        c,
        x,
        y,
        z,
        c_size_ok: c.k() == k - 1,
        consecutive_disjoint,
        middle_contains_one,
        path,
    })
}

/// BFS distances along the constructed path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CounterexampleDistances {
    pub d_f1_f2: u8,
    pub d_f1_mid: u8,
    pub d_mid_f2: u8,
}

impl CounterexampleDistances {
    /// The middle vertex lies on an `F1`–`F2` geodesic of length 4.
    pub fn confirms(&self) -> bool {
        self.d_f1_f2 == 4 && self.d_f1_mid + self.d_mid_f2 == 4
    }
}

pub fn counterexample_distances(ce: &Counterexample, cap: u64) -> Result<CounterexampleDistances> {
    let p = KneserParams::new(ce.n, ce.k)?;
    let mid = p.rank(ce.middle())? as usize;
    let from1 = single_source_distances(p, ce.f1, cap)?;
    let from2 = single_source_distances(p, ce.f2, cap)?;
    Ok(CounterexampleDistances {
        d_f1_f2: from1[p.rank(ce.f2)? as usize],
        d_f1_mid: from1[mid],
        d_mid_f2: from2[mid],
    })
}

pub fn verify_counterexample(k: u32, m: u32, ctx: &VerifyContext) -> Result<VerificationReport> {
    timed(|| {
        let params = [("k", json!(k)), ("m", json!(m))];
        let ce = build_counterexample(k, m)?;
        let mut evidence = json!({ "construction": ce });
        if !ce.structure_ok() {
            return Ok(VerificationReport::new(
                Claim::Counterexample,
                &params,
                Status::Refuted,
                evidence,
            ));
        }
        let order = choose(ce.n, k);
        if order > ctx.caps.counterexample_bfs {
            return Ok(VerificationReport::skipped(
                Claim::Counterexample,
                &params,
                format!(
                    "structure checks passed; BFS on C({},{k}) = {order} vertices above cap {}",
                    ce.n, ctx.caps.counterexample_bfs
                ),
                evidence,
            ));
        }
        let d = counterexample_distances(&ce, ctx.caps.counterexample_bfs)?;
        let status = if d.confirms() {
            Status::Verified
        } else {
            Status::Refuted
        };
        evidence["distances"] = serde_json::to_value(&d)?;
        Ok(VerificationReport::new(
            Claim::Counterexample,
            &params,
            status,
            evidence,
        ))
    })
}

/// `M` values allowed for `k`.
pub fn counterexample_ms(k: u32) -> Vec<u32> {
    (1..).take_while(|m| 2 * m + 1 < k).collect()
}

// ------------------------------------------------------------ n = 2k+1 scan

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternScan {
    pub k: u32,
    pub scanned: usize,
    /// Sets `G` other than `F`, `F'` equidistant from both.
    pub qualifying: usize,
    pub expected_intersection: u32,
    pub violation: Option<KSet>,
}

impl PatternScan {
    pub fn holds(&self) -> bool {
        self.violation.is_none() && self.qualifying > 0
    }
}

/// `F = [k]`, `F' = {k+1..2k}`, `x = 2k+1`. Every equidistant `G` must meet
/// both in `⌊k/2⌋` elements and contain `x` (odd `k`) or avoid it (even `k`).
pub fn n2k1_pattern_scan(k: u32) -> Result<PatternScan> {
    if k == 0 || k > 6 {
        return Err(Error::Range(format!(
            "pattern scan needs 1 <= k <= 6, got {k}"
        )));
    }
    let n = 2 * k + 1;
    let f = KSet::from_mask((1 << k) - 1, n)?;
    let f2 = KSet::from_mask(((1 << k) - 1) << k, n)?;
    let half = k / 2;
    let mut scanned = 0;
    let mut qualifying = 0;
    let mut violation = None;
    for g in enumerate_ksets(n, k)? {
        scanned += 1;
        if g == f || g == f2 {
            continue;
        }
        let (s, s2) = (g.intersection_size(f), g.intersection_size(f2));
        if distance_closed_form_2k1(k, s)? != distance_closed_form_2k1(k, s2)? {
            continue;
        }
        qualifying += 1;
        let forced = s == half && s2 == half && g.contains(n) == (k % 2 == 1);
        if !forced && violation.is_none() {
            violation = Some(g);
        }
    }
    Ok(PatternScan {
        k,
        scanned,
        qualifying,
        expected_intersection: half,
        violation,
    })
}

pub fn verify_n2k1_pattern(k: u32) -> Result<VerificationReport> {
    timed(|| {
        let params = [("k", json!(k))];
        if k > 6 {
            return Ok(VerificationReport::skipped(
                Claim::N2k1Pattern,
                &params,
                format!("k = {k} above the scan cap 6"),
                json!({}),
            ));
        }
        let scan = n2k1_pattern_scan(k)?;
        let status = if scan.holds() {
            Status::Verified
        } else {
            Status::Refuted
        };
        Ok(VerificationReport::new(
            Claim::N2k1Pattern,
            &params,
            status,
            serde_json::to_value(&scan)?,
        ))
    })
}

// ----------------------------------------------------------------- closing

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InequalityCheck {
    pub name: &'static str,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
    /// The inequality is asserted for this `k`.
    pub claimed: bool,
}

impl InequalityCheck {
    pub fn contradicted(&self) -> bool {
        self.claimed && !self.holds
    }
}

/// Exact evaluation of the final inequalities of the sum bound at one `k`.
pub fn closing_inequalities(k: u32) -> Result<Vec<InequalityCheck>> {
    if !(2..=20).contains(&k) {
        return Err(Error::Range(format!(
            "closing inequalities need 2 <= k <= 20, got {k}"
        )));
    }
    let kk = k as u128;
    let c = |n: u32, r: u32| choose(n, r) as u128;
    let mut out = Vec::new();

    let lhs = kk * (2 * kk + 1) * 2 * kk;
    let rhs = (2 * kk + 2) * (kk + 2) * (kk + 1);
    out.push(InequalityCheck {
        name: "k(2k+1)2k > (2k+2)(k+2)(k+1)",
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
        holds: lhs > rhs,
        claimed: k >= 5,
    });

    let num = 2 * kk * (2 * kk + 2);
    let central = c(2 * k, k);
    let ratio = Rational::new(num.into(), (kk - 1).into());
    out.push(InequalityCheck {
        name: "2k(2k+2)/(k-1) < C(2k,k)",
        lhs: fraction_string(&ratio),
        rhs: central.to_string(),
        holds: num < central * (kk - 1),
        claimed: k >= 4,
    });

    // k C(n0-k-1,k-1) > (n0-k) C(2k-1,k-1), monotone in n from n0 on
    let n0 = if k == 4 { 17 } else { 3 * k + 2 };
    let lhs = kk * c(n0 - k - 1, k - 1);
    let rhs = (n0 - k) as u128 * c(2 * k - 1, k - 1);
    out.push(InequalityCheck {
        name: "k C(n0-k-1,k-1) > (n0-k) C(2k-1,k-1)",
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
        holds: lhs > rhs,
        claimed: k >= 4,
    });

    if k == 4 {
        let premise = (c(12, 4), 6 * c(8, 4));
        out.push(InequalityCheck {
            name: "C(12,4) > 6 C(8,4)",
            lhs: premise.0.to_string(),
            rhs: premise.1.to_string(),
            holds: premise.0 > premise.1,
            claimed: true,
        });
        let chain = c(15, 3) - c(11, 3) + 1 + c(8, 4);
        out.push(InequalityCheck {
            name: "C(15,3) - C(11,3) + 1 + C(8,4) < C(15,3)",
            lhs: chain.to_string(),
            rhs: c(15, 3).to_string(),
            holds: chain < c(15, 3),
            claimed: true,
        });
    }
    Ok(out)
}

pub fn verify_closing_inequalities(k: u32) -> Result<VerificationReport> {
    timed(|| {
        let checks = closing_inequalities(k)?;
        let status = if checks.iter().any(InequalityCheck::contradicted) {
            Status::Refuted
        } else {
            Status::Verified
        };
        Ok(VerificationReport::new(
            Claim::ClosingInequalities,
            &[("k", json!(k))],
            status,
            json!({ "inequalities": checks }),
        ))
    })
}

// --------------------------------------------------------------- threshold

fn big_choose(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::from(0u32);
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `k^t C(n-t,k-t) + t <= C(n-1,k-1)`.
pub fn old_condition(n: u64, k: u64, t: u64) -> bool {
    BigUint::from(k).pow(t as u32) * big_choose(n - t, k - t) + t <= big_choose(n - 1, k - 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThresholdRow {
    pub k: u32,
    /// Least `n >= 3k-1` meeting the old condition for every `t` in `2..=k`,
    /// scanning up to `k^4`.
    pub old_n_threshold: Option<u64>,
    /// `max(2k+1, ceil(2.5k - 0.5))`.
    pub new_n_threshold: u64,
    /// `k^3 - k^2 + 2k - 1`.
    pub remark_n: u64,
    /// The `t = 2` condition holds at `remark_n`.
    pub remark_t2_holds: bool,
    /// Least `n >= 3k-1` meeting the `t = 2` condition.
    pub t2_minimal_n: Option<u64>,
}

pub fn threshold_comparison(k: u32) -> Result<ThresholdRow> {
    if !(2..=40).contains(&k) {
        return Err(Error::Range(format!(
            "threshold comparison needs 2 <= k <= 40, got {k}"
        )));
    }
    let k = k as u64;
    let limit = k.pow(4);
    let start = 3 * k - 1;
    let old = (start..=limit).find(|&n| (2..=k).all(|t| old_condition(n, k, t)));
    let t2 = (start..=limit).find(|&n| old_condition(n, k, 2));
    let remark_n = k * k * k - k * k + 2 * k - 1;
    Ok(ThresholdRow {
        k: k as u32,
        old_n_threshold: old,
        new_n_threshold: (2 * k + 1).max(5 * k / 2),
        remark_n,
        remark_t2_holds: old_condition(remark_n, k, 2),
        t2_minimal_n: t2,
    })
}

pub fn verify_threshold(k: u32) -> Result<VerificationReport> {
    timed(|| {
        let params = [("k", json!(k))];
        let row = threshold_comparison(k)?;
        let evidence = serde_json::to_value(&row)?;
        let Some(old) = row.old_n_threshold else {
            return Ok(VerificationReport::skipped(
                Claim::Threshold,
                &params,
                format!(
                    "no old threshold found up to n = k^4 = {}",
                    (k as u64).pow(4)
                ),
                evidence,
            ));
        };
        let improved = k < 4 || row.new_n_threshold < old;
        let status = if improved && row.remark_t2_holds {
            Status::Verified
        } else {
            Status::Refuted
        };
        Ok(VerificationReport::new(
            Claim::Threshold,
            &params,
            status,
            evidence,
        ))
    })
}

// ------------------------------------------------------------------ h bound

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HBoundViolation {
    pub trial: u64,
    pub seed: u64,
    pub bound: &'static str,
    /// The offending system in family-file format.
    pub system: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HBoundRun {
    pub n: u32,
    pub k: u32,
    pub trials: u64,
    pub seed: u64,
    /// Trials with every family a singleton, where only the total bound applies.
    pub intersecting_trials: u64,
    pub max_h: usize,
    /// `C(n-1,k-1) - C(n-k-1,k-1) + 1`.
    pub h_bound: u64,
    pub max_total: usize,
    /// `C(n-1,k-1)`.
    pub total_bound: u64,
    pub max_m2: usize,
    /// `C(2k-1,k-1)`.
    pub m2_bound: u64,
    pub violation: Option<HBoundViolation>,
}

/// Random maximal systems for seeds `seed, seed+1, ...`, checked against the
/// Hilton–Milner bound on `h` (when some family has two sets), the total
/// `Σ|F_i| <= C(n-1,k-1)` and `m_2 <= C(2k-1,k-1)`.
pub fn h_bound_run(n: u32, k: u32, trials: u64, seed: u64) -> Result<HBoundRun> {
    if k < 4 || n < 2 * k + 2 {
        return Err(Error::Parameter(format!(
            "need k >= 4 and n >= 2k+2, got n={n} k={k}"
        )));
    }
    let h_bound = hilton_milner_size(n, k);
    let total_bound = choose(n - 1, k - 1);
    let m2_max = m2_bound(k);
    let mut run = HBoundRun {
        n,
        k,
        trials,
        seed,
        intersecting_trials: 0,
        max_h: 0,
        h_bound,
        max_total: 0,
        total_bound,
        max_m2: 0,
        m2_bound: m2_max,
        violation: None,
    };
    for i in 0..trials {
        let s = seed.wrapping_add(i);
        let sys = random_maximal_system(n, k, s)?;
        let st = system_stats(&sys);
        run.max_total = run.max_total.max(st.total);
        run.max_m2 = run.max_m2.max(st.m2);
        let broken = if st.t < 2 {
            run.intersecting_trials += 1;
            None
        } else {
            run.max_h = run.max_h.max(st.h);
            (st.h as u64 > h_bound).then_some("h")
        };
        let broken = broken
            .or((st.total as u64 > total_bound).then_some("total"))
            .or((st.m2 as u64 > m2_max).then_some("m2"));
        if let (Some(bound), None) = (broken, &run.violation) {
            run.violation = Some(HBoundViolation {
                trial: i,
                seed: s,
                bound,
                system: serialize_family_file(&sys),
            });
        }
    }
    Ok(run)
}

pub fn verify_h_bound(n: u32, k: u32, trials: u64, seed: u64) -> Result<VerificationReport> {
    timed(|| {
        let run = h_bound_run(n, k, trials, seed)?;
        let status = if run.violation.is_none() {
            Status::Verified
        } else {
            Status::Refuted
        };
        Ok(VerificationReport::new(
            Claim::HBound,
            &[
                ("k", json!(k)),
                ("n", json!(n)),
                ("seed", json!(seed)),
                ("trials", json!(trials)),
            ],
            status,
            serde_json::to_value(&run)?,
        ))
    })
}

// ---------------------------------------------------------------- bollobas

fn parts_json(parts: &[u64]) -> Value {
    Value::Array(
        parts
            .iter()
            .map(|&p| json!((0..64).filter(|b| p >> b & 1 == 1).collect::<Vec<u32>>()))
            .collect(),
    )
}

/// The `{"pairs": ..., "triples": ...}` input format.
pub fn system_json(sys: &SetPairSystem) -> Value {
    json!({
        "pairs": sys.pairs().iter().map(|p| parts_json(p)).collect::<Vec<_>>(),
        "triples": sys.triples().iter().map(|t| parts_json(t)).collect::<Vec<_>>(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassicSuite {
    pub ground: u32,
    pub max_part: u32,
    pub systems: u64,
    /// Systems with left-hand side exactly 1.
    pub tight: u64,
    pub max_lhs: String,
    pub all_at_most_one: bool,
    pub violation: Option<Value>,
}

pub fn classic_suite(ground: u32, max_part: u32) -> Result<ClassicSuite> {
    check_suite_size(ground, max_part)?;
    let one = Rational::one();
    let mut systems = 0;
    let mut tight = 0;
    let mut max = Rational::from_integer(0.into());
    let mut violation = None;
    let mut failure = None;
    for_each_classic_system(ground, max_part, |pairs| {
        if failure.is_some() {
            return;
        }
        systems += 1;
        match classic_lhs(pairs) {
            Ok(lhs) => {
                if lhs == one {
                    tight += 1;
                }
                if lhs > one && violation.is_none() {
                    violation = Some(
                        json!({"pairs": pairs.iter().map(|p| parts_json(p)).collect::<Vec<_>>(), "lhs": fraction_string(&lhs)}),
                    );
                }
                if lhs > max {
                    max = lhs;
                }
            }
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(ClassicSuite {
        ground,
        max_part,
        systems,
        tight,
        max_lhs: fraction_string(&max),
        all_at_most_one: violation.is_none(),
        violation,
    })
}

fn check_suite_size(ground: u32, max_part: u32) -> Result<()> {
    if !(1..=6).contains(&ground) || !(1..=2).contains(&max_part) {
        return Err(Error::Range(format!(
            "exhaustive suites need ground <= 6 and parts <= 2, got {ground}, {max_part}"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma5Suite {
    pub ground: u32,
    pub max_part: u32,
    pub systems: u64,
    pub systems_with_triples: u64,
    /// Every doubled pair matches the factorial count.
    pub counts_match: bool,
    /// No permutation separates two doubled pairs.
    pub at_most_one: bool,
    /// The count-assembled left-hand side equals the formula everywhere.
    pub lhs_matches_counts: bool,
    pub lhs_violations: u64,
    pub max_lhs: String,
    pub all_at_most_one: bool,
    /// The smallest violating system found (fewest items, then ground size).
    pub violation: Option<Value>,
}

pub fn lemma5_suite(ground: u32, max_part: u32) -> Result<Lemma5Suite> {
    check_suite_size(ground, max_part)?;
    let one = Rational::one();
    let mut s = Lemma5Suite {
        ground,
        max_part,
        systems: 0,
        systems_with_triples: 0,
        counts_match: true,
        at_most_one: true,
        lhs_matches_counts: true,
        lhs_violations: 0,
        max_lhs: String::new(),
        all_at_most_one: true,
        violation: None,
    };
    let mut max = Rational::from_integer(0.into());
    let mut best_key = None;
    let mut failure = None;
    for_each_lemma5_system(ground, max_part, |sys| {
        if failure.is_some() {
            return;
        }
        s.systems += 1;
        if !sys.triples().is_empty() {
            s.systems_with_triples += 1;
        }
        let lhs = lemma5_lhs(sys);
        let oracle = match permutation_oracle(sys) {
            Ok(o) => o,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        s.counts_match &= oracle.counts_match;
        s.at_most_one &= oracle.at_most_one;
        s.lhs_matches_counts &= oracle.lhs_from_counts == lhs;
        if lhs > one {
            s.lhs_violations += 1;
            let key = (sys.items().len(), sys.m());
            if best_key.is_none_or(|b| key < b) {
                best_key = Some(key);
                s.violation = Some(json!({
                    "system": system_json(sys),
                    "lhs": fraction_string(&lhs),
                    "item_union_counts": oracle.items,
                    "permutations": oracle.permutations,
                }));
            }
        }
        if lhs > max {
            max = lhs;
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    s.max_lhs = fraction_string(&max);
    s.all_at_most_one = s.lhs_violations == 0;
    Ok(s)
}

pub fn verify_bollobas_suite(ground: u32, max_part: u32) -> Result<VerificationReport> {
    timed(|| {
        let suite = classic_suite(ground, max_part)?;
        let status = if suite.all_at_most_one {
            Status::Verified
        } else {
            Status::Refuted
        };
        Ok(VerificationReport::new(
            Claim::BollobasSuite,
            &[("ground", json!(ground)), ("max_part", json!(max_part))],
            status,
            serde_json::to_value(&suite)?,
        ))
    })
}

pub fn verify_lemma5_suite(ground: u32, max_part: u32) -> Result<VerificationReport> {
    timed(|| {
        let suite = lemma5_suite(ground, max_part)?;
        let ok = suite.all_at_most_one
            && suite.counts_match
            && suite.at_most_one
            && suite.lhs_matches_counts;
        let status = if ok {
            Status::Verified
        } else {
            Status::Refuted
        };
        Ok(VerificationReport::new(
            Claim::Lemma5Suite,
            &[("ground", json!(ground)), ("max_part", json!(max_part))],
            status,
            serde_json::to_value(&suite)?,
        ))
    })
}

// ------------------------------------------------------ almost intersecting

pub fn verify_almost_intersecting(n: u32, k: u32) -> Result<VerificationReport> {
    timed(|| {
        let params = [("k", json!(k)), ("n", json!(n))];
        if k == 0 || n < 2 * k {
            return Err(Error::Parameter(format!(
                "need n >= 2k >= 2, got n={n} k={k}"
            )));
        }
        let order = choose(n, k);
        if order > BRUTE_FORCE_CAP {
            return Ok(VerificationReport::skipped(
                Claim::AlmostIntersecting,
                &params,
                format!("C({n},{k}) = {order} above brute-force cap {BRUTE_FORCE_CAP}"),
                json!({}),
            ));
        }
        let best = max_le1_almost_intersecting_bruteforce(n, k)?;
        let bound = choose(n - 1, k - 1);
        let within = best.max_size as u64 <= bound;
        let evidence = json!({"max": best, "bound": bound, "within_bound": within});
        if n < 2 * k + 2 {
            return Ok(VerificationReport::skipped(
                Claim::AlmostIntersecting,
                &params,
                format!("bound stated for n >= 2k+2 = {}", 2 * k + 2),
                evidence,
            ));
        }
        let status = if within {
            Status::Verified
        } else {
            Status::Refuted
        };
        Ok(VerificationReport::new(
            Claim::AlmostIntersecting,
            &params,
            status,
            evidence,
        ))
    })
}

// ------------------------------------------------------------------- sweep

/// Parameters for a single claim; unset fields take per-claim defaults.
#[derive(Clone, Debug, Default)]
pub struct ClaimArgs {
    pub n: Option<u32>,
    pub k: Option<u32>,
    pub m: Option<u32>,
    pub trials: Option<u64>,
    pub seed: u64,
}

const DEFAULT_TRIALS: u64 = 100;

fn need(v: Option<u32>, name: &str, claim: Claim) -> Result<u32> {
    v.ok_or_else(|| Error::Parameter(format!("{claim} needs --{name}")))
}

/// Runs one claim. Claims without a natural single instance expand to several
/// reports (all `M` for the counterexample when `--m` is absent).
pub fn run_claim(
    claim: Claim,
    args: &ClaimArgs,
    ctx: &VerifyContext,
) -> Result<Vec<VerificationReport>> {
    let one = |r: Result<VerificationReport>| r.map(|r| vec![r]);
    match claim {
        Claim::DistanceFormula => one(verify_distance_formula(need(args.k, "k", claim)?, ctx)),
        Claim::StarGp => one(verify_star_gp(
            need(args.n, "n", claim)?,
            need(args.k, "k", claim)?,
            ctx,
        )),
        Claim::Counterexample => {
            let k = need(args.k, "k", claim)?;
            let ms = match args.m {
                Some(m) => vec![m],
                None => counterexample_ms(k),
            };
            if ms.is_empty() {
                return Err(Error::Parameter(format!("no valid M for k = {k}")));
            }
            ms.into_iter()
                .map(|m| verify_counterexample(k, m, ctx))
                .collect()
        }
        Claim::N2k1Pattern => one(verify_n2k1_pattern(need(args.k, "k", claim)?)),
        Claim::ClosingInequalities => one(verify_closing_inequalities(need(args.k, "k", claim)?)),
        Claim::Threshold => one(verify_threshold(need(args.k, "k", claim)?)),
        Claim::HBound => one(verify_h_bound(
            need(args.n, "n", claim)?,
            need(args.k, "k", claim)?,
            args.trials.unwrap_or(DEFAULT_TRIALS),
            args.seed,
        )),
        Claim::BollobasSuite => one(verify_bollobas_suite(
            args.n.unwrap_or(6),
            args.k.unwrap_or(2),
        )),
        Claim::Lemma5Suite => one(verify_lemma5_suite(
            args.n.unwrap_or(6),
            args.k.unwrap_or(2),
        )),
        Claim::AlmostIntersecting => one(verify_almost_intersecting(
            need(args.n, "n", claim)?,
            need(args.k, "k", claim)?,
        )),
    }
}

/// Every claim over a parameter grid bounded by `max_k`. Jobs run in
/// parallel; the result order is fixed.
pub fn verify_all(
    max_k: u32,
    trials: u64,
    seed: u64,
    ctx: &VerifyContext,
) -> Result<Vec<VerificationReport>> {
    if max_k < 2 {
        return Err(Error::Range(format!(
            "max-k must be at least 2, got {max_k}"
        )));
    }
    let mut jobs: Vec<(Claim, ClaimArgs)> = Vec::new();
    let args = |n: Option<u32>, k: u32, m: Option<u32>| ClaimArgs {
        n,
        k: Some(k),
        m,
        trials: Some(trials),
        seed,
    };
    for k in 2..=max_k.min(7) {
        jobs.push((Claim::DistanceFormula, args(None, k, None)));
    }
    for k in 2..=max_k {
        for n in 2 * k + 1..=3 * k + 2 {
            if n <= crate::combinatorics::MAX_N && choose(n, k) <= ctx.caps.star {
                jobs.push((Claim::StarGp, args(Some(n), k, None)));
            }
        }
    }
    for k in 4..=max_k {
        for m in counterexample_ms(k) {
            jobs.push((Claim::Counterexample, args(None, k, Some(m))));
        }
    }
    for k in 1..=max_k.min(6) {
        jobs.push((Claim::N2k1Pattern, args(None, k, None)));
    }
    for k in 2..=max_k.min(20) {
        jobs.push((Claim::ClosingInequalities, args(None, k, None)));
        jobs.push((Claim::Threshold, args(None, k, None)));
    }
    for k in 4..=max_k {
        for n in [2 * k + 2, 3 * k] {
            jobs.push((Claim::HBound, args(Some(n), k, None)));
        }
    }
    jobs.push((
        Claim::BollobasSuite,
        ClaimArgs {
            n: Some(6),
            k: Some(2),
            ..Default::default()
        },
    ));
    jobs.push((
        Claim::Lemma5Suite,
        ClaimArgs {
            n: Some(6),
            k: Some(2),
            ..Default::default()
        },
    ));
    for k in 2..=max_k {
        for n in 2 * k..=crate::combinatorics::MAX_N {
            if choose(n, k) > BRUTE_FORCE_CAP {
                break;
            }
            jobs.push((Claim::AlmostIntersecting, args(Some(n), k, None)));
        }
    }
    let results: Vec<Result<Vec<VerificationReport>>> = jobs
        .par_iter()
        .map(|(claim, a)| run_claim(*claim, a, ctx))
        .collect();
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

// ----------------------------------------------------------------- output

pub const SUMMARY_FILE: &str = "summary.csv";

/// Writes `<stem>.json` for each report (atomically) and rebuilds
/// `summary.csv` from every report in `dir`.
pub fn write_reports(dir: &Path, reports: &[VerificationReport]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for r in reports {
        let path = dir.join(format!("{}.json", r.file_stem()));
        atomic_write(&path, serde_json::to_string_pretty(r)?.as_bytes())?;
    }
    let mut all = Vec::new();
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    entries.sort();
    for path in entries {
        let text = fs::read_to_string(&path)?;
        if let Ok(r) = serde_json::from_str::<VerificationReport>(&text) {
            all.push(r);
        }
    }
    let mut csv = String::from("claim,params,status\n");
    for r in &all {
        csv.push_str(&format!("{},{},{}\n", r.claim, r.params_label(), r.status));
    }
    atomic_write(&dir.join(SUMMARY_FILE), csv.as_bytes())
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> VerifyContext {
        VerifyContext::default()
    }

    #[test]
    fn distance_formula_small() {
        for k in 2..=3 {
            let r = verify_distance_formula(k, &ctx()).unwrap();
            assert_eq!(r.status, Status::Verified);
        }
        let r = verify_distance_formula(2, &ctx()).unwrap();
        assert_eq!(r.evidence["pairs_checked"], 45);
    }

    #[test]
    fn star_regimes() {
        let r = verify_star_gp(5, 2, &ctx()).unwrap();
        assert_eq!(r.status, Status::Verified);
        assert_eq!(r.evidence["passes"], true);
        let r = verify_star_gp(9, 4, &ctx()).unwrap();
        assert_eq!(r.status, Status::Verified);
        assert_eq!(r.evidence["passes"], false);
        let r = verify_star_gp(20, 6, &ctx()).unwrap();
        assert_eq!(r.status, Status::Skipped);
    }

    #[test]
    fn counterexample_k6() {
        let ce = build_counterexample(6, 2).unwrap();
        assert_eq!(ce.n, 14);
        assert_eq!(ce.f2.elements(), vec![1, 2, 3, 7, 8, 9]);
        assert_eq!(ce.c.elements(), vec![10, 11, 12, 13, 14]);
        assert_eq!((ce.x, ce.y, ce.z), (7, 4, 5));
        assert_eq!(ce.path[1].elements(), vec![7, 10, 11, 12, 13, 14]);
        assert_eq!(ce.path[2].elements(), vec![1, 2, 3, 4, 8, 9]);
        assert_eq!(ce.path[3].elements(), vec![5, 10, 11, 12, 13, 14]);
        assert!(ce.structure_ok());
        assert!(build_counterexample(5, 2).is_err());
        assert!(build_counterexample(3, 1).is_err());
    }

    #[test]
    fn counterexample_k7_structure_only() {
        let ce = build_counterexample(7, 2).unwrap();
        assert!(ce.structure_ok());
        let r = verify_counterexample(7, 2, &ctx()).unwrap();
        assert_eq!(r.status, Status::Skipped);
        assert_eq!(counterexample_ms(7), vec![1, 2]);
        assert_eq!(counterexample_ms(4), vec![1]);
    }

    #[test]
    fn pattern_scans() {
        for k in 1..=6 {
            let s = n2k1_pattern_scan(k).unwrap();
            assert!(s.holds(), "k={k}: {s:?}");
        }
        assert_eq!(n2k1_pattern_scan(5).unwrap().scanned, 462);
    }

    #[test]
    fn closing_values() {
        let k5 = closing_inequalities(5).unwrap();
        assert_eq!(
            (k5[0].lhs.as_str(), k5[0].rhs.as_str(), k5[0].holds),
            ("550", "504", true)
        );
        let k4 = closing_inequalities(4).unwrap();
        assert!(!k4[0].holds && !k4[0].claimed);
        assert_eq!(k4[1].lhs, "80/3");
        assert!(k4[1].holds);
        assert_eq!(k4[4].lhs, "361");
        assert_eq!(k4[4].rhs, "455");
        assert_eq!(
            verify_closing_inequalities(4).unwrap().status,
            Status::Verified
        );
    }

    #[test]
    fn threshold_rows() {
        let r = threshold_comparison(2).unwrap();
        assert_eq!(r.new_n_threshold, 5);
        let r = threshold_comparison(4).unwrap();
        assert_eq!(r.new_n_threshold, 10);
        assert_eq!(r.remark_n, 55);
        assert!(r.remark_t2_holds);
        // brute-force minimum of 16 C(n-2,2) + 2 <= C(n-1,3)
        let direct =
            (11u64..).find(|&n| 16 * (n - 2) * (n - 3) / 2 + 2 <= (n - 1) * (n - 2) * (n - 3) / 6);
        assert_eq!(r.t2_minimal_n, direct);
    }

    #[test]
    fn h_bound_small_run() {
        let run = h_bound_run(10, 4, 5, 42).unwrap();
        assert_eq!(run.h_bound, 75);
        assert!(run.violation.is_none());
        assert!(h_bound_run(9, 4, 1, 0).is_err());
    }

    #[test]
    fn suites_small() {
        let c = classic_suite(3, 1).unwrap();
        assert!(c.all_at_most_one && c.systems > 0);
        let l = lemma5_suite(3, 1).unwrap();
        assert!(l.counts_match && l.at_most_one && l.lhs_matches_counts);
        assert!(!l.all_at_most_one);
    }

    #[test]
    fn almost_intersecting_reports() {
        let r = verify_almost_intersecting(7, 2).unwrap();
        assert_eq!(r.status, Status::Verified);
        let r = verify_almost_intersecting(5, 2).unwrap();
        assert_eq!(r.status, Status::Skipped);
        let r = verify_almost_intersecting(8, 3).unwrap();
        assert_eq!(r.status, Status::Skipped);
    }

    #[test]
    fn claim_ids_round_trip() {
        for c in Claim::ALL {
            assert_eq!(c.id().parse::<Claim>().unwrap(), c);
        }
        assert!("bogus".parse::<Claim>().is_err());
    }

    #[test]
    fn reports_and_summary() {
        let dir = tempfile::tempdir().unwrap();
        let r = verify_n2k1_pattern(3).unwrap();
        write_reports(dir.path(), std::slice::from_ref(&r)).unwrap();
        let r2 = verify_closing_inequalities(5).unwrap();
        write_reports(dir.path(), &[r2]).unwrap();
        let csv = fs::read_to_string(dir.path().join(SUMMARY_FILE)).unwrap();
        assert_eq!(
            csv,
            "claim,params,status\nclosing-inequalities,k=5,verified\nn2k1-pattern,k=3,verified\n"
        );
        let text = fs::read_to_string(dir.path().join("n2k1-pattern_k3.json")).unwrap();
        let back: VerificationReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.canonical_json(), r.canonical_json());
    }
}
