//! General position in finite connected graphs.
//!
//! A vertex `z` lies on a geodesic between `x` and `y` exactly when
//! `d(x,z) + d(z,y) == d(x,y)`, so every check here is a lookup in a
//! [`DistanceMatrix`]. General-position sets are the independent sets of the
//! 3-uniform hypergraph of such blocked triples.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::combinatorics::KSet;
use crate::error::{Error, Result};
use crate::kneser::{self, DistanceMatrix, KneserParams};
use crate::rng::SplitMix64;

/// Largest order accepted by [`gp_solve_naive`].
pub const NAIVE_CAP: usize = 20;

/// Simple undirected connected graph with bitset rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    order: usize,
    rows: Vec<Vec<u64>>,
}

impl SimpleGraph {
    pub fn new(order: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if order == 0 {
            return Err(Error::Parameter(
                "graph must have at least one vertex".into(),
            ));
        }
        let words = order.div_ceil(64);
        let mut rows = vec![vec![0u64; words]; order];
        for &(u, v) in edges {
            if u >= order || v >= order {
                return Err(Error::Range(format!("edge ({u},{v}) outside 0..{order}")));
            }
            if u == v {
                return Err(Error::Parameter(format!("loop at vertex {u}")));
            }
            rows[u][v / 64] |= 1 << (v % 64);
            rows[v][u / 64] |= 1 << (u % 64);
        }
        let g = SimpleGraph { order, rows };
        if !g.connected() {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    pub fn from_kneser(p: KneserParams) -> Result<Self> {
        let vertices: Vec<KSet> = p.vertices().collect();
        let mut edges = Vec::new();
        for (i, &a) in vertices.iter().enumerate() {
            for b in p.neighbors(a) {
                let j = kneser_rank(b);
                if i < j {
                    edges.push((i, j));
                }
            }
        }
        SimpleGraph::new(vertices.len(), &edges)
    }

    pub fn complete(order: usize) -> Result<Self> {
        let edges: Vec<_> = (0..order)
            .flat_map(|u| (u + 1..order).map(move |v| (u, v)))
            .collect();
        SimpleGraph::new(order, &edges)
    }

    pub fn path(order: usize) -> Result<Self> {
        let edges: Vec<_> = (1..order).map(|v| (v - 1, v)).collect();
        SimpleGraph::new(order, &edges)
    }

    pub fn cycle(order: usize) -> Result<Self> {
        let mut edges: Vec<_> = (1..order).map(|v| (v - 1, v)).collect();
        if order > 2 {
            edges.push((order - 1, 0));
        }
        SimpleGraph::new(order, &edges)
    }

    /// Random connected graph: vertex `v > 0` attaches to `below(v)`, then
    /// every other pair is added when `below(100) < density_percent`.
    pub fn random_connected(order: usize, density_percent: usize, seed: u64) -> Result<Self> {
        let mut rng = SplitMix64::new(seed);
        let mut edges = Vec::new();
        for v in 1..order {
            edges.push((rng.below(v), v));
        }
        for u in 0..order {
            for v in u + 1..order {
                if rng.below(100) < density_percent {
                    edges.push((u, v));
                }
            }
        }
        SimpleGraph::new(order, &edges)
    }

    /// Edge-list text: `order=<int>` then one `u v` pair per line, 0-based.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line_no, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing `order=<int>` header"))?;
        let order: usize = header
            .strip_prefix("order=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::parse(line_no, format!("bad header `{header}`")))?;
        let mut edges = Vec::new();
        for (line_no, line) in lines {
            let mut toks = line.split_whitespace();
            let parse = |t: Option<&str>| -> Result<usize> {
                t.and_then(|t| t.parse().ok())
                    .ok_or_else(|| Error::parse(line_no, format!("bad edge `{line}`")))
            };
            let u = parse(toks.next())?;
            let v = parse(toks.next())?;
            if toks.next().is_some() {
                return Err(Error::parse(line_no, format!("bad edge `{line}`")));
            }
            if u >= order || v >= order || u == v {
                return Err(Error::parse(line_no, format!("invalid edge ({u},{v})")));
            }
            edges.push((u, v));
        }
        SimpleGraph::new(order, &edges)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.rows[u][v / 64] >> (v % 64) & 1 == 1
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.rows[u].iter().enumerate().flat_map(|(w, &bits)| {
            let mut rest = bits;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * 64 + b)
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        self.rows
            .iter()
            .map(|r| r.iter().map(|w| w.count_ones() as usize).sum::<usize>())
            .sum::<usize>()
            / 2
    }

    fn connected(&self) -> bool {
        let mut seen = vec![false; self.order];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for v in self.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.order
    }

    pub fn distances(&self) -> Result<DistanceMatrix> {
        let adj: Vec<Vec<usize>> = (0..self.order)
            .map(|u| self.neighbors(u).collect())
            .collect();
        DistanceMatrix::from_adjacency(&adj)
    }
}

fn kneser_rank(s: KSet) -> usize {
    crate::combinatorics::rank_colex(s) as usize
}

/// Ordered triple certifying that `z` lies on a geodesic from `x` to `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GpWitness {
    pub x: usize,
    pub z: usize,
    pub y: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GpVerdict {
    Pass,
    Blocked(GpWitness),
}

impl GpVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, GpVerdict::Pass)
    }

    pub fn witness(&self) -> Option<GpWitness> {
        match self {
            GpVerdict::Pass => None,
            GpVerdict::Blocked(w) => Some(*w),
        }
    }
}

fn check_index(dm: &DistanceMatrix, v: usize) -> Result<()> {
    if v >= dm.order() {
        return Err(Error::Range(format!(
            "vertex {v} outside 0..{}",
            dm.order()
        )));
    }
    Ok(())
}

/// `d(x,z) + d(z,y) == d(x,y)`.
pub fn on_geodesic(dm: &DistanceMatrix, x: usize, z: usize, y: usize) -> Result<bool> {
    for v in [x, z, y] {
        check_index(dm, v)?;
    }
    if x == y || z == x || z == y {
        return Err(Error::Parameter(format!(
            "vertices ({x},{z},{y}) not distinct"
        )));
    }
    Ok(between(dm, x, z, y))
}

#[inline]
fn between(dm: &DistanceMatrix, x: usize, z: usize, y: usize) -> bool {
    dm.get(x, z) as u16 + dm.get(z, y) as u16 == dm.get(x, y) as u16
}

/// Some vertex of `{a, b, c}` lies on a geodesic between the other two.
#[inline]
fn blocked(dm: &DistanceMatrix, a: usize, b: usize, c: usize) -> bool {
    between(dm, a, b, c) || between(dm, b, a, c) || between(dm, a, c, b)
}

fn sorted_members(dm: &DistanceMatrix, set: &[usize]) -> Result<Vec<usize>> {
    for &v in set {
        check_index(dm, v)?;
    }
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    Ok(s)
}

/// Definition-based check over all ordered triples of distinct members.
/// Returns the lexicographically smallest `(x, z, y)` witness on failure.
pub fn check_gp_direct(dm: &DistanceMatrix, set: &[usize]) -> Result<GpVerdict> {
    let s = sorted_members(dm, set)?;
    for &x in &s {
        let row_x = dm.row(x);
        for &z in &s {
            if z == x {
                continue;
            }
            let dxz = row_x[z] as u16;
            let row_z = dm.row(z);
            for &y in &s {
                if y != x && y != z && dxz + row_z[y] as u16 == row_x[y] as u16 {
                    return Ok(GpVerdict::Blocked(GpWitness { x, z, y }));
                }
            }
        }
    }
    Ok(GpVerdict::Pass)
}

/// Components `S_1..S_h` of `G[S]` and the table `d(S_i, S_j)` (taken from
/// the smallest member of each component).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentDecomposition {
    pub components: Vec<Vec<usize>>,
    pub distances: Vec<Vec<u8>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComponentCheck {
    Pass(ComponentDecomposition),
    /// Component `i` is not a clique of `G`.
    NotClique {
        component: usize,
    },
    /// Distances between components `i` and `j` are not constant.
    UnevenDistance {
        i: usize,
        j: usize,
    },
    /// `d(S_i,S_j) == d(S_i,S_l) + d(S_l,S_j)`.
    Between {
        i: usize,
        l: usize,
        j: usize,
    },
}

impl ComponentCheck {
    pub fn is_pass(&self) -> bool {
        matches!(self, ComponentCheck::Pass(_))
    }
}

/// Component-based characterisation: `S` is in general position iff every
/// component of `G[S]` is a clique, inter-component distances are constant,
/// and no component distance splits through a third component.
pub fn check_gp_components(dm: &DistanceMatrix, set: &[usize]) -> Result<ComponentCheck> {
    let s = sorted_members(dm, set)?;
    let components = induced_components(dm, &s);

    for (c, comp) in components.iter().enumerate() {
        for (i, &u) in comp.iter().enumerate() {
            if comp[i + 1..].iter().any(|&v| dm.get(u, v) != 1) {
                return Ok(ComponentCheck::NotClique { component: c });
            }
        }
    }

    let h = components.len();
    let mut table = vec![vec![0u8; h]; h];
    for i in 0..h {
        for j in i + 1..h {
            let d = dm.get(components[i][0], components[j][0]);
            let uniform = components[i]
                .iter()
                .all(|&u| components[j].iter().all(|&v| dm.get(u, v) == d));
            if !uniform {
                return Ok(ComponentCheck::UnevenDistance { i, j });
            }
            table[i][j] = d;
            table[j][i] = d;
        }
    }

    for i in 0..h {
        for j in i + 1..h {
            for l in 0..h {
                if l != i && l != j && table[i][j] as u16 == table[i][l] as u16 + table[l][j] as u16
                {
                    return Ok(ComponentCheck::Between { i, l, j });
                }
            }
        }
    }

    Ok(ComponentCheck::Pass(ComponentDecomposition {
        components,
        distances: table,
    }))
}

fn induced_components(dm: &DistanceMatrix, s: &[usize]) -> Vec<Vec<usize>> {
    let mut assigned = vec![false; s.len()];
    let mut out = Vec::new();
    for start in 0..s.len() {
        if assigned[start] {
            continue;
        }
        assigned[start] = true;
        let mut comp = vec![s[start]];
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..s.len() {
                if !assigned[j] && dm.get(s[i], s[j]) == 1 {
                    assigned[j] = true;
                    comp.push(s[j]);
                    stack.push(j);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GpSolution {
    pub size: usize,
    /// Sorted vertex indices; the lexicographically smallest optimum when
    /// `optimal` is true.
    pub set: Vec<usize>,
    /// False when the search stopped early and `size` is only a lower bound.
    pub optimal: bool,
}

/// Exhaustive `gp(G)` over all `2^order` subsets.
pub fn gp_solve_naive(dm: &DistanceMatrix) -> Result<GpSolution> {
    let order = dm.order();
    if order > NAIVE_CAP {
        return Err(Error::Resource(format!(
            "naive solver limited to order {NAIVE_CAP}, got {order}"
        )));
    }
    let mut best: Vec<usize> = Vec::new();
    for mask in 0u32..(1u32 << order) {
        let size = mask.count_ones() as usize;
        if size < best.len() {
            continue;
        }
        let members: Vec<usize> = (0..order).filter(|&v| mask >> v & 1 == 1).collect();
        if size == best.len() && members >= best {
            continue;
        }
        if check_gp_direct(dm, &members)?.is_pass() {
            best = members;
        }
    }
    Ok(GpSolution {
        size: best.len(),
        set: best,
        optimal: true,
    })
}

#[derive(Clone, Debug)]
pub struct SolveLimits {
    pub max_order: usize,
    pub time_limit: Option<Duration>,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits {
            max_order: 2000,
            time_limit: None,
        }
    }
}

struct Search<'a> {
    dm: &'a DistanceMatrix,
    deadline: Option<Instant>,
    nodes: u64,
    timed_out: bool,
    best: Vec<usize>,
    floor: usize,
}

impl Search<'_> {
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes.is_multiple_of(1024) {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    self.timed_out = true;
                }
            }
        }
        self.timed_out
    }

    fn extend(&self, chosen: &[usize], v: usize, rest: &[usize]) -> Vec<usize> {
        rest.iter()
            .copied()
            .filter(|&u| chosen.iter().all(|&a| !blocked(self.dm, a, v, u)))
            .collect()
    }

    /// Branch-and-bound maximisation.
    fn maximise(&mut self, chosen: &mut Vec<usize>, cands: &[usize]) {
        if chosen.len() > self.floor {
            self.floor = chosen.len();
            self.best = chosen.clone();
        }
        for (i, &v) in cands.iter().enumerate() {
            if chosen.len() + cands.len() - i <= self.floor || self.tick() {
                return;
            }
            let next = self.extend(chosen, v, &cands[i + 1..]);
            chosen.push(v);
            self.maximise(chosen, &next);
            chosen.pop();
        }
    }

    /// First set of size `target` in index order, i.e. the lexicographically
    /// smallest one.
    fn first_of_size(&mut self, chosen: &mut Vec<usize>, cands: &[usize], target: usize) -> bool {
        if chosen.len() == target {
            return true;
        }
        for (i, &v) in cands.iter().enumerate() {
            if chosen.len() + cands.len() - i < target || self.tick() {
                return false;
            }
            let next = self.extend(chosen, v, &cands[i + 1..]);
            chosen.push(v);
            if self.first_of_size(chosen, &next, target) {
                return true;
            }
            chosen.pop();
        }
        false
    }
}

/// Exact `gp(G)` by branch and bound over the blocked-triple hypergraph.
///
/// Vertices are branched in order of blocked-triple degree (descending),
/// candidates are filtered against every chosen pair, and a branch is cut when
/// chosen plus remaining candidates cannot beat the incumbent. A second pass in
/// index order returns the lexicographically smallest optimum.
pub fn gp_solve_exact(
    dm: &DistanceMatrix,
    lower_hint: Option<usize>,
    limits: &SolveLimits,
) -> Result<GpSolution> {
    let order = dm.order();
    if order > limits.max_order {
        return Err(Error::Resource(format!(
            "exact solver limited to order {}, got {order}",
            limits.max_order
        )));
    }
    if order <= 2 {
        return Ok(GpSolution {
            size: order,
            set: (0..order).collect(),
            optimal: true,
        });
    }

    let mut degree = vec![0u64; order];
    for a in 0..order {
        for b in a + 1..order {
            for c in b + 1..order {
                if blocked(dm, a, b, c) {
                    degree[a] += 1;
                    degree[b] += 1;
                    degree[c] += 1;
                }
            }
        }
    }
    let mut by_degree: Vec<usize> = (0..order).collect();
    by_degree.sort_by_key(|&v| (std::cmp::Reverse(degree[v]), v));

    let mut search = Search {
        dm,
        deadline: limits.time_limit.map(|t| Instant::now() + t),
        nodes: 0,
        timed_out: false,
        best: Vec::new(),
        floor: 0,
    };
    let hinted_floor = lower_hint.map_or(0, |h| h.saturating_sub(1).min(order));
    if hinted_floor > 2 {
        // sets of exactly the hinted size stay reachable
        search.floor = hinted_floor;
        search.maximise(&mut Vec::new(), &by_degree);
    }
    if search.best.is_empty() && !search.timed_out {
        // no hint, or the hint overshot the optimum
        search.best = vec![0, 1];
        search.floor = 2;
        search.maximise(&mut Vec::new(), &by_degree);
    }

    if search.timed_out {
        let size = search.best.len();
        let mut set = search.best;
        set.sort_unstable();
        return Ok(GpSolution {
            size,
            set,
            optimal: false,
        });
    }

    let size = search.best.len();
    let phase_one = {
        let mut s = search.best.clone();
        s.sort_unstable();
        s
    };
    let ascending: Vec<usize> = (0..order).collect();
    let mut chosen = Vec::new();
    let set = if search.first_of_size(&mut chosen, &ascending, size) {
        chosen
    } else {
        phase_one
    };
    Ok(GpSolution {
        size,
        set,
        optimal: true,
    })
}

/// Distance matrix of a Kneser graph as a convenience for callers that only
/// hold parameters.
pub fn kneser_distances(p: KneserParams, cap: u64) -> Result<DistanceMatrix> {
    kneser::all_pairs_distances_capped(p, cap)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dm(g: &SimpleGraph) -> DistanceMatrix {
        g.distances().unwrap()
    }

    #[test]
    fn geodesic_on_path_and_triangle() {
        let p3 = dm(&SimpleGraph::path(3).unwrap());
        assert!(on_geodesic(&p3, 0, 1, 2).unwrap());
        let k3 = dm(&SimpleGraph::complete(3).unwrap());
        assert!(!on_geodesic(&k3, 0, 1, 2).unwrap());
        assert!(on_geodesic(&k3, 0, 0, 2).is_err());
        assert!(on_geodesic(&k3, 0, 1, 7).is_err());
    }

    #[test]
    fn direct_checker_basics() {
        let p5 = dm(&SimpleGraph::path(5).unwrap());
        assert!(check_gp_direct(&p5, &[0, 4]).unwrap().is_pass());
        assert_eq!(
            check_gp_direct(&p5, &[4, 2, 0]).unwrap(),
            GpVerdict::Blocked(GpWitness { x: 0, z: 2, y: 4 })
        );
        let k5 = dm(&SimpleGraph::complete(5).unwrap());
        assert!(check_gp_direct(&k5, &[0, 1, 2, 3, 4]).unwrap().is_pass());
    }

    #[test]
    fn component_checker_examples() {
        let p5 = dm(&SimpleGraph::path(5).unwrap());
        assert_eq!(
            check_gp_components(&p5, &[0, 2, 4]).unwrap(),
            ComponentCheck::Between { i: 0, l: 1, j: 2 }
        );
        // independent set {0,2,4} in C6 has all distances 2
        let c6 = dm(&SimpleGraph::cycle(6).unwrap());
        match check_gp_components(&c6, &[0, 2, 4]).unwrap() {
            ComponentCheck::Pass(dec) => {
                assert_eq!(dec.components, vec![vec![0], vec![2], vec![4]]);
                assert_eq!(dec.distances[0][1], 2);
            }
            other => panic!("{other:?}"),
        }
        // an induced P3 is not a clique
        assert_eq!(
            check_gp_components(&p5, &[0, 1, 2]).unwrap(),
            ComponentCheck::NotClique { component: 0 }
        );
    }

    #[test]
    fn small_gp_values() {
        let naive = |g: SimpleGraph| gp_solve_naive(&dm(&g)).unwrap().size;
        assert_eq!(naive(SimpleGraph::path(4).unwrap()), 2);
        assert_eq!(naive(SimpleGraph::complete(5).unwrap()), 5);
        assert_eq!(naive(SimpleGraph::cycle(6).unwrap()), 3);
        let exact =
            |g: SimpleGraph| gp_solve_exact(&dm(&g), None, &SolveLimits::default()).unwrap();
        assert_eq!(exact(SimpleGraph::complete(9).unwrap()).size, 9);
        assert_eq!(exact(SimpleGraph::path(7).unwrap()).size, 2);
        assert_eq!(exact(SimpleGraph::new(1, &[]).unwrap()).size, 1);
    }

    #[test]
    fn exact_with_hint_still_returns_a_set() {
        let d = dm(&SimpleGraph::cycle(6).unwrap());
        let sol = gp_solve_exact(&d, Some(3), &SolveLimits::default()).unwrap();
        assert_eq!(sol.size, 3);
        assert_eq!(sol, gp_solve_naive(&d).unwrap());
    }

    #[test]
    fn graph_construction_errors() {
        assert!(matches!(
            SimpleGraph::new(3, &[(0, 1)]),
            Err(Error::Disconnected)
        ));
        assert!(SimpleGraph::new(3, &[(0, 0), (1, 2)]).is_err());
        assert!(SimpleGraph::new(2, &[(0, 5)]).is_err());
    }

    #[test]
    fn edge_list_format() {
        let g = SimpleGraph::parse_edge_list("order=4\n0 1\n1 2\n# c\n2 3\n").unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(g.edge_count(), 3);
        assert!(matches!(
            SimpleGraph::parse_edge_list("order=3\n0 1\n1 x\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            SimpleGraph::parse_edge_list("order=3\n0 1\n"),
            Err(Error::Disconnected)
        ));
    }

    #[test]
    fn kneser_graph_matches_kneser_distances() {
        let p = KneserParams::new(6, 2).unwrap();
        let g = SimpleGraph::from_kneser(p).unwrap();
        assert_eq!(g.order(), 15);
        assert_eq!(g.distances().unwrap(), kneser_distances(p, 1000).unwrap());
    }
}
