//! The Kneser graph `Kn(n,k)`: vertices are the k-subsets of `[n]`, edges join
//! disjoint subsets. Vertices are indexed by colex rank.

use std::collections::VecDeque;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::{choose, enumerate_ksets, rank_colex, unrank_colex, KSet, MAX_N};
use crate::error::{Error, Result};

/// Default cap on `C(n,k)` for BFS-based operations.
pub const DEFAULT_BFS_CAP: u64 = 100_000;

const CACHE_MAGIC: &[u8; 5] = b"GPKN1";

/// `(n, k)` with `n >= 2k + 1`, the connected regime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct KneserParams {
    n: u32,
    k: u32,
}

impl KneserParams {
    pub fn new(n: u32, k: u32) -> Result<Self> {
        if k == 0 || n > MAX_N || n < 2 * k + 1 {
            return Err(Error::Parameter(format!(
                "Kn({n},{k}) requires 1 <= k and 2k+1 <= n <= {MAX_N}"
            )));
        }
        Ok(KneserParams { n, k })
    }

    pub fn n(self) -> u32 {
        self.n
    }

    pub fn k(self) -> u32 {
        self.k
    }

    /// Number of vertices, `C(n,k)`.
    pub fn order(self) -> u64 {
        choose(self.n, self.k)
    }

    pub fn vertex(self, rank: u64) -> Result<KSet> {
        unrank_colex(rank, self.n, self.k)
    }

    pub fn rank(self, s: KSet) -> Result<u64> {
        self.check_member(s)?;
        Ok(rank_colex(s))
    }

    pub fn vertices(self) -> impl Iterator<Item = KSet> {
        enumerate_ksets(self.n, self.k).expect("validated parameters")
    }

    fn check_member(self, s: KSet) -> Result<()> {
        if s.n() != self.n || s.k() != self.k {
            return Err(Error::Parameter(format!(
                "{s} is not a vertex of Kn({},{})",
                self.n, self.k
            )));
        }
        Ok(())
    }

    /// Neighbours of `s`: the k-subsets of its complement, in colex order.
    pub fn neighbors(self, s: KSet) -> impl Iterator<Item = KSet> {
        let n = self.n;
        let free = !s.mask() & if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let width = free.count_ones();
        enumerate_ksets(width, self.k)
            .expect("k <= n - k")
            .map(move |packed| KSet::from_mask(deposit(packed.mask(), free), n).expect("in range"))
    }

    fn check_cap(self, cap: u64) -> Result<()> {
        if self.order() > cap {
            return Err(Error::Resource(format!(
                "Kn({},{}) has {} vertices, cap is {cap}",
                self.n,
                self.k,
                self.order()
            )));
        }
        Ok(())
    }
}

/// Scatters the low bits of `bits` onto the set bits of `mask` (software PDEP).
fn deposit(mut bits: u64, mut mask: u64) -> u64 {
    let mut out = 0u64;
    while mask != 0 && bits != 0 {
        let low = mask & mask.wrapping_neg();
        if bits & 1 == 1 {
            out |= low;
        }
        bits >>= 1;
        mask ^= low;
    }
    out
}

pub fn adjacent(a: KSet, b: KSet) -> Result<bool> {
    if a.n() != b.n() || a.k() != b.k() {
        return Err(Error::Parameter(format!(
            "{a} and {b} live in different Kneser graphs"
        )));
    }
    Ok(a != b && a.is_disjoint(b))
}

/// Symmetric hop-distance matrix, row-major, `u8` entries.
#[derive(Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    order: usize,
    d: Vec<u8>,
}

impl std::fmt::Debug for DistanceMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DistanceMatrix")
            .field("order", &self.order)
            .field("max", &self.max())
            .finish()
    }
}

impl DistanceMatrix {
    /// Marker for vertex pairs in different components.
    pub const UNREACHABLE: u8 = u8::MAX;

    pub fn from_raw(order: usize, d: Vec<u8>) -> Result<Self> {
        if d.len() != order * order {
            return Err(Error::Parameter(format!(
                "{} entries for order {order}",
                d.len()
            )));
        }
        Ok(DistanceMatrix { order, d })
    }

    /// BFS from every vertex of a graph given by adjacency lists.
    pub fn from_adjacency(adj: &[Vec<usize>]) -> Result<Self> {
        let order = adj.len();
        let mut offsets = Vec::with_capacity(order + 1);
        let mut targets = Vec::new();
        offsets.push(0u32);
        for row in adj {
            targets.extend(row.iter().map(|&v| v as u32));
            offsets.push(targets.len() as u32);
        }
        bfs_all_pairs(order, &offsets, &targets)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.d[i * self.order + j]
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.d[i * self.order..(i + 1) * self.order]
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.d
    }

    /// Largest entry, i.e. the diameter of a connected graph.
    pub fn max(&self) -> u8 {
        self.d.iter().copied().max().unwrap_or(0)
    }

    pub fn is_connected(&self) -> bool {
        !self.d.contains(&Self::UNREACHABLE)
    }

    /// Checks zero diagonal, symmetry and the triangle inequality.
    pub fn is_metric(&self) -> bool {
        let n = self.order;
        for i in 0..n {
            if self.get(i, i) != 0 {
                return false;
            }
            for j in 0..n {
                if self.get(i, j) != self.get(j, i) || (i != j && self.get(i, j) == 0) {
                    return false;
                }
            }
        }
        for l in 0..n {
            let row_l = self.row(l);
            for i in 0..n {
                let dil = self.get(i, l) as u16;
                let row_i = self.row(i);
                if row_i
                    .iter()
                    .zip(row_l)
                    .any(|(&dij, &dlj)| dij as u16 > dil + dlj as u16)
                {
                    return false;
                }
            }
        }
        true
    }
}

fn bfs_all_pairs(order: usize, offsets: &[u32], targets: &[u32]) -> Result<DistanceMatrix> {
    let mut d = vec![DistanceMatrix::UNREACHABLE; order * order];
    if order == 0 {
        return Ok(DistanceMatrix { order, d });
    }
    d.par_chunks_mut(order)
        .enumerate()
        .try_for_each(|(src, row)| bfs_row(src, row, offsets, targets))?;
    Ok(DistanceMatrix { order, d })
}

fn bfs_row(src: usize, row: &mut [u8], offsets: &[u32], targets: &[u32]) -> Result<()> {
    let mut queue = VecDeque::new();
    row[src] = 0;
    queue.push_back(src as u32);
    while let Some(u) = queue.pop_front() {
        let du = row[u as usize];
        if du == DistanceMatrix::UNREACHABLE - 1 {
            return Err(Error::Resource("distance exceeds 254".into()));
        }
        let (lo, hi) = (
            offsets[u as usize] as usize,
            offsets[u as usize + 1] as usize,
        );
        for &v in &targets[lo..hi] {
            let slot = &mut row[v as usize];
            if *slot == DistanceMatrix::UNREACHABLE {
                *slot = du + 1;
                queue.push_back(v);
            }
        }
    }
    Ok(())
}

pub fn all_pairs_distances(p: KneserParams) -> Result<DistanceMatrix> {
    all_pairs_distances_capped(p, DEFAULT_BFS_CAP)
}

/// Exact all-pairs distances by BFS from every vertex.
pub fn all_pairs_distances_capped(p: KneserParams, cap: u64) -> Result<DistanceMatrix> {
    p.check_cap(cap)?;
    let order = p.order() as usize;
    let mut offsets = Vec::with_capacity(order + 1);
    let degree = choose(p.n - p.k, p.k) as usize;
    let mut targets = Vec::with_capacity(order * degree);
    offsets.push(0u32);
    for s in p.vertices() {
        targets.extend(p.neighbors(s).map(|t| rank_colex(t) as u32));
        offsets.push(targets.len() as u32);
    }
    bfs_all_pairs(order, &offsets, &targets)
}

/// Distances from one vertex, neighbours generated on the fly (O(V) memory).
pub fn single_source_distances(p: KneserParams, source: KSet, cap: u64) -> Result<Vec<u8>> {
    p.check_cap(cap)?;
    p.check_member(source)?;
    let order = p.order() as usize;
    let mut dist = vec![DistanceMatrix::UNREACHABLE; order];
    let mut queue = VecDeque::new();
    dist[rank_colex(source) as usize] = 0;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let du = dist[rank_colex(u) as usize];
        for v in p.neighbors(u) {
            let slot = &mut dist[rank_colex(v) as usize];
            if *slot == DistanceMatrix::UNREACHABLE {
                *slot = du + 1;
                queue.push_back(v);
            }
        }
    }
    Ok(dist)
}

/// Distance in the odd graph `Kn(2k+1,k)` between sets meeting in `s` elements:
/// `min(2(k - s), 2s + 1)`.
pub fn distance_closed_form_2k1(k: u32, s: u32) -> Result<u32> {
    if s > k {
        return Err(Error::Range(format!(
            "intersection size {s} exceeds k = {k}"
        )));
    }
    Ok((2 * (k - s)).min(2 * s + 1))
}

pub fn diameter(p: KneserParams) -> Result<u32> {
    diameter_capped(p, DEFAULT_BFS_CAP)
}

/// Diameter via the eccentricity of the first vertex; Kneser graphs are
/// vertex-transitive, so every eccentricity is the same.
pub fn diameter_capped(p: KneserParams, cap: u64) -> Result<u32> {
    let src = p.vertex(0)?;
    let dist = single_source_distances(p, src, cap)?;
    Ok(dist.into_iter().max().unwrap_or(0) as u32)
}

/// `n >= 2.5k - 0.5`, i.e. `2n >= 5k - 1`.
pub fn meets_diam3_bound(n: u32, k: u32) -> bool {
    2 * n + 1 >= 5 * k
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diam3Threshold {
    pub k: u32,
    /// `max(2k+1, ceil(2.5k - 0.5))`.
    pub n: u32,
    /// BFS diameter at `n`, when within the cap.
    pub diam_at_n: Option<u32>,
    /// BFS diameter at `n - 1`, when `n - 1 >= 2k + 1` and within the cap.
    pub diam_below: Option<u32>,
}

impl Diam3Threshold {
    /// False if BFS contradicts minimality; true if every available check agrees.
    pub fn consistent(&self) -> bool {
        self.diam_at_n.is_none_or(|d| d <= 3) && self.diam_below.is_none_or(|d| d > 3)
    }
}

pub fn diam3_threshold(k: u32, cap: u64) -> Result<Diam3Threshold> {
    if k < 1 {
        return Err(Error::Parameter("k must be positive".into()));
    }
    let n = (2 * k + 1).max(5 * k / 2);
    if n > MAX_N {
        return Err(Error::Range(format!("threshold n = {n} exceeds {MAX_N}")));
    }
    let probe = |n: u32| -> Result<Option<u32>> {
        let p = KneserParams::new(n, k)?;
        if p.order() > cap {
            return Ok(None);
        }
        diameter_capped(p, cap).map(Some)
    };
    let diam_at_n = probe(n)?;
    let diam_below = if n > 2 * k + 1 { probe(n - 1)? } else { None };
    Ok(Diam3Threshold {
        k,
        n,
        diam_at_n,
        diam_below,
    })
}

/// `<dir>/kn_<n>_<k>.gpkn`
pub fn cache_path(dir: &Path, p: KneserParams) -> PathBuf {
    dir.join(format!("kn_{}_{}.gpkn", p.n, p.k))
}

/// Writes `GPKN1`, `n` and `k` as u16 LE, then the row-major distances.
pub fn write_cache(path: &Path, p: KneserParams, dm: &DistanceMatrix) -> Result<()> {
    if dm.order() as u64 != p.order() {
        return Err(Error::Parameter(
            "matrix order does not match parameters".into(),
        ));
    }
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("gpkn.tmp");
    {
        let mut f = std::io::BufWriter::new(fs::File::create(&tmp)?);
        f.write_all(CACHE_MAGIC)?;
        f.write_all(&(p.n as u16).to_le_bytes())?;
        f.write_all(&(p.k as u16).to_le_bytes())?;
        f.write_all(dm.as_bytes())?;
        f.flush()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_cache(path: &Path) -> Result<(KneserParams, DistanceMatrix)> {
    let bytes = fs::read(path)?;
    if bytes.len() < 9 || &bytes[..5] != CACHE_MAGIC {
        return Err(Error::Cache(format!("{}: bad header", path.display())));
    }
    let n = u16::from_le_bytes([bytes[5], bytes[6]]) as u32;
    let k = u16::from_le_bytes([bytes[7], bytes[8]]) as u32;
    let p = KneserParams::new(n, k).map_err(|e| Error::Cache(e.to_string()))?;
    let order = p.order() as usize;
    let body = &bytes[9..];
    if body.len() != order * order {
        return Err(Error::Cache(format!(
            "{}: expected {} distance bytes, found {}",
            path.display(),
            order * order,
            body.len()
        )));
    }
    Ok((p, DistanceMatrix::from_raw(order, body.to_vec())?))
}

/// Reads the cached matrix for `p`, computing and storing it on a miss.
/// Unreadable or mismatched files are overwritten.
pub fn load_or_compute(dir: &Path, p: KneserParams, cap: u64) -> Result<DistanceMatrix> {
    let path = cache_path(dir, p);
    if path.exists() {
        match read_cache(&path) {
            Ok((cached, dm)) if cached == p => return Ok(dm),
            Ok(_) | Err(Error::Cache(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let dm = all_pairs_distances_capped(p, cap)?;
    write_cache(&path, p, &dm)?;
    Ok(dm)
}
