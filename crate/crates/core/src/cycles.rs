//! Edge-space linear algebra over GF(2) and minimum cycle bases.
//!
//! An [`EdgeVector`] is a subset of a host graph's edges stored as a bitset
//! addressed by edge index; addition is symmetric difference.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{betti, Graph};
use crate::power::ReducedPowerGraph;

const WORD: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgeVector {
    host: u64,
    len: usize,
    words: Vec<u64>,
}

impl EdgeVector {
    pub fn zero(host: &Graph) -> Self {
        Self::zero_raw(host.host_id(), host.edge_count())
    }

    fn zero_raw(host: u64, len: usize) -> Self {
        EdgeVector {
            host,
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    /// Sum of the given edges; repeated indices cancel.
    pub fn from_edges<I: IntoIterator<Item = usize>>(host: &Graph, edges: I) -> Self {
        let mut v = Self::zero(host);
        for e in edges {
            v.toggle(e);
        }
        v
    }

    pub fn host_id(&self) -> u64 {
        self.host
    }

    /// Dimension of the host edge space.
    pub fn dimension(&self) -> usize {
        self.len
    }

    pub fn toggle(&mut self, e: usize) {
        assert!(e < self.len, "edge index {e} out of range {}", self.len);
        self.words[e / WORD] ^= 1 << (e % WORD);
    }

    pub fn contains(&self, e: usize) -> bool {
        e < self.len && self.words[e / WORD] & (1 << (e % WORD)) != 0
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Number of edges in the subgraph.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(wi * WORD + b)
            })
        })
    }

    fn lowest(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn add_assign(&mut self, other: &EdgeVector) -> Result<()> {
        if self.host != other.host || self.len != other.len {
            return Err(Error::MixedHosts);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    pub fn add(&self, other: &EdgeVector) -> Result<EdgeVector> {
        let mut out = self.clone();
        out.add_assign(other)?;
        Ok(out)
    }

    /// Lexicographic comparison of the sorted edge-index sets.
    pub fn cmp_edge_sets(&self, other: &EdgeVector) -> Ordering {
        self.ones().cmp(other.ones())
    }
}

/// Odd-degree vertices of the subgraph `x` (its image under the boundary map).
pub fn boundary(host: &Graph, x: &EdgeVector) -> Result<Vec<usize>> {
    if x.host_id() != host.host_id() {
        return Err(Error::MixedHosts);
    }
    let mut odd = vec![false; host.vertex_count()];
    for e in x.ones() {
        let (a, b) = host.edge(e);
        odd[a] ^= true;
        odd[b] ^= true;
    }
    Ok(odd
        .iter()
        .enumerate()
        .filter(|(_, &o)| o)
        .map(|(v, _)| v)
        .collect())
}

pub fn is_cycle(host: &Graph, x: &EdgeVector) -> Result<bool> {
    Ok(boundary(host, x)?.is_empty())
}

/// Incremental row-echelon form over GF(2), keyed by lowest set bit.
#[derive(Clone, Debug)]
pub struct Echelon {
    host: Option<(u64, usize)>,
    pivots: BTreeMap<usize, EdgeVector>,
}

impl Default for Echelon {
    fn default() -> Self {
        Self::new()
    }
}

impl Echelon {
    pub fn new() -> Self {
        Echelon {
            host: None,
            pivots: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    fn check_host(&mut self, v: &EdgeVector) -> Result<()> {
        match self.host {
            None => {
                self.host = Some((v.host, v.len));
                Ok(())
            }
            Some(h) if h == (v.host, v.len) => Ok(()),
            Some(_) => Err(Error::MixedHosts),
        }
    }

    fn reduce(&self, v: &EdgeVector) -> EdgeVector {
        let mut r = v.clone();
        while let Some(b) = r.lowest() {
            match self.pivots.get(&b) {
                Some(p) => {
                    for (a, x) in r.words.iter_mut().zip(&p.words) {
                        *a ^= x;
                    }
                }
                None => break,
            }
        }
        r
    }

    /// Adds `v`; returns whether it was independent of the vectors so far.
    pub fn insert(&mut self, v: &EdgeVector) -> Result<bool> {
        self.check_host(v)?;
        let r = self.reduce(v);
        match r.lowest() {
            Some(b) => {
                self.pivots.insert(b, r);
                Ok(true)
            }
            None => Ok(false),
        }
    }

    pub fn in_span(&self, v: &EdgeVector) -> Result<bool> {
        if let Some(h) = self.host {
            if h != (v.host, v.len) {
                return Err(Error::MixedHosts);
            }
        }
        Ok(self.reduce(v).is_zero())
    }
}

/// GF(2) rank of a family of edge vectors over one host.
pub fn rank<'a, I>(vectors: I) -> Result<usize>
where
    I: IntoIterator<Item = &'a EdgeVector>,
{
    let mut ech = Echelon::new();
    for v in vectors {
        ech.insert(v)?;
    }
    Ok(ech.rank())
}

/// Projection of a reduced-power edge vector onto the base edge space:
/// each edge `a f -- b f` maps to `ab`, pairs cancelling mod 2.
pub fn p_star(rp: &ReducedPowerGraph, x: &EdgeVector) -> Result<EdgeVector> {
    if x.host_id() != rp.graph().host_id() {
        return Err(Error::Unannotated);
    }
    let base = rp.base();
    let mut out = EdgeVector::zero(base);
    for e in x.ones() {
        let gen = rp.generator(e);
        out.toggle(
            base.edge_id(gen.low, gen.high)
                .expect("generator is a base edge"),
        );
    }
    if is_cycle(rp.graph(), x)? {
        assert!(
            is_cycle(base, &out)?,
            "projection of a cycle must be a cycle"
        );
    }
    Ok(out)
}

/// Where a basis element came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Fundamental,
    Horton,
    /// A base cycle embedded as `C f`.
    Embedded,
    Upsilon,
    Omega,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisKind {
    Fundamental,
    Theorem1,
    GreedyMcb,
}

/// A simple cycle with a fixed traversal: `vertices[0] -> vertices[1] -> ...
/// -> vertices[n-1] -> vertices[0]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    vertices: Vec<usize>,
    edges: EdgeVector,
    provenance: Provenance,
}

impl Cycle {
    /// Validates that `vertices` is a simple closed walk of length >= 3 in `host`.
    pub fn from_vertices(
        host: &Graph,
        vertices: Vec<usize>,
        provenance: Provenance,
    ) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::NotACycle(format!("{n} vertices")));
        }
        let distinct: HashSet<usize> = vertices.iter().copied().collect();
        if distinct.len() != n {
            return Err(Error::NotACycle("repeated vertex".into()));
        }
        let mut edges = EdgeVector::zero(host);
        for t in 0..n {
            let (a, b) = (vertices[t], vertices[(t + 1) % n]);
            if a >= host.vertex_count() || b >= host.vertex_count() {
                return Err(Error::IndexOutOfRange(a.max(b)));
            }
            let id = host.edge_id(a, b).ok_or_else(|| {
                Error::NotACycle(format!(
                    "{} -- {} is not an edge",
                    host.label(a),
                    host.label(b)
                ))
            })?;
            edges.toggle(id);
        }
        Ok(Cycle {
            vertices,
            edges,
            provenance,
        })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn edges(&self) -> &EdgeVector {
        &self.edges
    }

    pub fn edge_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.edges.ones()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Same edge set, traversed the other way round.
    pub fn reversed(&self) -> Cycle {
        let mut vertices = self.vertices.clone();
        vertices[1..].reverse();
        Cycle {
            vertices,
            edges: self.edges.clone(),
            provenance: self.provenance,
        }
    }
}

/// An ordered family of cycles over one host graph.
#[derive(Clone, Debug)]
pub struct CycleBasis {
    host: u64,
    kind: BasisKind,
    elements: Vec<Cycle>,
}

impl CycleBasis {
    pub fn new(host: &Graph, kind: BasisKind, elements: Vec<Cycle>) -> Self {
        CycleBasis {
            host: host.host_id(),
            kind,
            elements,
        }
    }

    pub fn host_id(&self) -> u64 {
        self.host
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn elements(&self) -> &[Cycle] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn total_length(&self) -> usize {
        self.elements.iter().map(Cycle::len).sum()
    }

    pub fn rank(&self) -> Result<usize> {
        rank(self.elements.iter().map(Cycle::edges))
    }

    /// Checks the basis invariants against `host`: every element is a cycle,
    /// the elements are independent, and there are `betti(host)` of them.
    pub fn is_valid_basis(&self, host: &Graph) -> Result<bool> {
        if self.host != host.host_id() {
            return Err(Error::MixedHosts);
        }
        for c in &self.elements {
            if !is_cycle(host, c.edges())? {
                return Ok(false);
            }
        }
        Ok(self.rank()? == self.len() && self.len() == betti(host)?)
    }
}

/// Shortest-path tree from `root` with ascending-index tie-breaking.
fn bfs_parents(host: &Graph, root: usize) -> (Vec<Option<usize>>, Vec<usize>) {
    let n = host.vertex_count();
    let mut parent = vec![None; n];
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    dist[root] = 0;
    queue.push_back(root);
    while let Some(u) = queue.pop_front() {
        for &w in host.neighbors(u) {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                parent[w] = Some(u);
                queue.push_back(w);
            }
        }
    }
    (parent, dist)
}

/// Horton candidates: for every root `x` and edge `uw`, the closed walk
/// `P(x,u) + uw + P(w,x)` when the two tree paths meet only at `x`.
/// Deduplicated by edge set.
pub fn horton_candidates(host: &Graph) -> Vec<Cycle> {
    let mut found: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for x in 0..host.vertex_count() {
        let (parent, dist) = bfs_parents(host, x);
        let up = |mut v: usize| {
            let mut path = vec![v];
            while let Some(p) = parent[v] {
                path.push(p);
                v = p;
            }
            path
        };
        for &(u, w) in host.edges() {
            if dist[u] == usize::MAX || parent[u] == Some(w) || parent[w] == Some(u) {
                continue;
            }
            let pu = up(u);
            let pw = up(w);
            let on_u: HashSet<usize> = pu.iter().copied().collect();
            if pw[..pw.len() - 1].iter().any(|v| on_u.contains(v)) {
                continue;
            }
            // x ... u, then w ... (excluding x)
            let mut walk: Vec<usize> = pu.iter().rev().copied().collect();
            walk.extend(pw[..pw.len() - 1].iter().copied());
            if walk.len() < 3 {
                continue;
            }
            let mut key: Vec<usize> = (0..walk.len())
                .map(|t| {
                    host.edge_id(walk[t], walk[(t + 1) % walk.len()])
                        .expect("walk follows edges")
                })
                .collect();
            key.sort_unstable();
            found.entry(key).or_insert(walk);
        }
    }
    found
        .into_values()
        .map(|walk| Cycle::from_vertices(host, walk, Provenance::Horton).expect("simple cycle"))
        .collect()
}

/// Sorts candidates by (length, sorted edge-index set) and keeps each one
/// that is independent of those already chosen, stopping at `target`.
fn greedy_select(candidates: Vec<Cycle>, target: usize) -> Result<Vec<Cycle>> {
    let mut sorted = candidates;
    sorted.sort_by(|a, b| {
        a.len()
            .cmp(&b.len())
            .then_with(|| a.edges().cmp_edge_sets(b.edges()))
    });
    let mut ech = Echelon::new();
    let mut chosen = Vec::with_capacity(target);
    for c in sorted {
        if chosen.len() == target {
            break;
        }
        if ech.insert(c.edges())? {
            chosen.push(c);
        }
    }
    Ok(chosen)
}

/// Minimum cycle basis by the greedy matroid algorithm over Horton's
/// candidate family.
pub fn greedy_mcb(host: &Graph) -> Result<CycleBasis> {
    let beta = betti(host)?;
    let chosen = greedy_select(horton_candidates(host), beta)?;
    if chosen.len() != beta {
        return Err(Error::NotACycle(format!(
            "candidate family spans only {} of {} dimensions",
            chosen.len(),
            beta
        )));
    }
    Ok(CycleBasis::new(host, BasisKind::GreedyMcb, chosen))
}

/// Every simple cycle of `host` (each once, one orientation), or an error
/// once more than `budget` have been found.
pub fn enumerate_simple_cycles(host: &Graph, budget: usize) -> Result<Vec<Cycle>> {
    let n = host.vertex_count();
    let mut out = Vec::new();
    let mut on_path = vec![false; n];
    for start in 0..n {
        let mut path = vec![start];
        on_path[start] = true;
        extend_cycles(host, start, &mut path, &mut on_path, &mut out, budget)?;
        on_path[start] = false;
    }
    Ok(out)
}

fn extend_cycles(
    host: &Graph,
    start: usize,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    out: &mut Vec<Cycle>,
    budget: usize,
) -> Result<()> {
    let last = *path.last().unwrap();
    for &w in host.neighbors(last) {
        if w == start && path.len() >= 3 && path[1] < last {
            if out.len() == budget {
                return Err(Error::BudgetExceeded {
                    needed: budget as u128 + 1,
                    budget: budget as u128,
                });
            }
            out.push(Cycle::from_vertices(
                host,
                path.clone(),
                Provenance::Horton,
            )?);
        }
        if w > start && !on_path[w] {
            on_path[w] = true;
            path.push(w);
            extend_cycles(host, start, path, on_path, out, budget)?;
            path.pop();
            on_path[w] = false;
        }
    }
    Ok(())
}

/// Minimum total length of a cycle basis, computed by running the greedy
/// algorithm over every simple cycle. Exponential; for small hosts only.
pub fn mcb_length_by_enumeration(host: &Graph, budget: usize) -> Result<usize> {
    let beta = betti(host)?;
    let chosen = greedy_select(enumerate_simple_cycles(host, budget)?, beta)?;
    Ok(chosen.iter().map(Cycle::len).sum())
}

/// Direct minimality certificate: every simple cycle `C` of `host` must lie
/// in the span of the basis elements no longer than `C`. Returns the first
/// cycle that fails, if any.
pub fn certify_minimum(host: &Graph, basis: &CycleBasis, budget: usize) -> Result<Option<Cycle>> {
    if !basis.is_valid_basis(host)? {
        return Err(Error::NotACycle("input is not a cycle basis".into()));
    }
    let mut cycles = enumerate_simple_cycles(host, budget)?;
    cycles.sort_by_key(Cycle::len);
    let mut elements: Vec<&Cycle> = basis.elements().iter().collect();
    elements.sort_by_key(|c| c.len());
    let mut ech = Echelon::new();
    let mut next = 0;
    for c in cycles {
        while next < elements.len() && elements[next].len() <= c.len() {
            ech.insert(elements[next].edges())?;
            next += 1;
        }
        if !ech.in_span(c.edges())? {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// Splits an Eulerian subgraph into edge-disjoint simple cycles.
pub fn decompose_simple_cycles(host: &Graph, x: &EdgeVector) -> Result<Vec<Cycle>> {
    if !is_cycle(host, x)? {
        return Err(Error::NotACycle("subgraph has odd-degree vertices".into()));
    }
    let mut remaining: Vec<HashSet<usize>> = vec![HashSet::new(); host.vertex_count()];
    for e in x.ones() {
        let (a, b) = host.edge(e);
        remaining[a].insert(b);
        remaining[b].insert(a);
    }
    let mut out = Vec::new();
    for start in 0..host.vertex_count() {
        while !remaining[start].is_empty() {
            // walk until a vertex repeats, then peel off that loop
            let mut walk = vec![start];
            let mut pos_in_walk = std::collections::HashMap::new();
            pos_in_walk.insert(start, 0usize);
            loop {
                let cur = *walk.last().unwrap();
                let &next = remaining[cur].iter().min().expect("even degree");
                remaining[cur].remove(&next);
                remaining[next].remove(&cur);
                if let Some(&p) = pos_in_walk.get(&next) {
                    let cyc: Vec<usize> = walk[p..].to_vec();
                    for v in &cyc[1..] {
                        pos_in_walk.remove(v);
                    }
                    walk.truncate(p + 1);
                    out.push(Cycle::from_vertices(host, cyc, Provenance::Horton)?);
                    if walk.len() == 1 && next == start {
                        break;
                    }
                } else {
                    pos_in_walk.insert(next, walk.len());
                    walk.push(next);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{bfs_spanning_tree, fundamental_cycles};
    use crate::power::build_reduced_power;

    #[test]
    fn boundary_examples() {
        let p = Graph::path(3);
        let e0 = EdgeVector::from_edges(&p, [0]);
        assert_eq!(boundary(&p, &e0).unwrap(), vec![0, 1]);
        let both = EdgeVector::from_edges(&p, [0, 1]);
        assert_eq!(boundary(&p, &both).unwrap(), vec![0, 2]);
        let c = Graph::cycle(4);
        let all = EdgeVector::from_edges(&c, 0..4);
        assert!(boundary(&c, &all).unwrap().is_empty());
        assert!(!is_cycle(&c, &EdgeVector::from_edges(&c, [1])).unwrap());
    }

    #[test]
    fn two_disjoint_triangles_form_a_cycle() {
        let g = Graph::from_labeled(
            &["a", "b", "c", "d", "e"],
            &[
                ("a", "b"),
                ("b", "c"),
                ("c", "a"),
                ("c", "d"),
                ("d", "e"),
                ("e", "c"),
            ],
        )
        .unwrap();
        let x = EdgeVector::from_edges(&g, 0..g.edge_count());
        assert!(is_cycle(&g, &x).unwrap());
        let parts = decompose_simple_cycles(&g, &x).unwrap();
        assert_eq!(parts.len(), 2);
        assert!(parts.iter().all(|c| c.len() == 3));
    }

    #[test]
    fn rank_examples() {
        let c5 = Graph::cycle(5);
        let c = EdgeVector::from_edges(&c5, 0..5);
        assert_eq!(rank([&c, &c]).unwrap(), 1);
        assert_eq!(rank(std::iter::empty()).unwrap(), 0);
        let other = EdgeVector::zero(&Graph::cycle(6));
        assert!(matches!(rank([&c, &other]), Err(Error::MixedHosts)));

        let p = build_reduced_power(&c5, 2).unwrap();
        let t = bfs_spanning_tree(p.graph(), 0).unwrap();
        let basis = fundamental_cycles(p.graph(), &t).unwrap();
        assert_eq!(basis.len(), 11);
        assert_eq!(basis.rank().unwrap(), 11);
    }

    #[test]
    fn greedy_examples() {
        let c5 = Graph::cycle(5);
        let b = greedy_mcb(&c5).unwrap();
        assert_eq!((b.len(), b.total_length()), (1, 5));

        let c3sq = build_reduced_power(&Graph::cycle(3), 2).unwrap();
        let b = greedy_mcb(c3sq.graph()).unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!(b.total_length(), 12);
        assert!(b.elements().iter().all(|c| c.len() == 3));

        let c5sq = build_reduced_power(&c5, 2).unwrap();
        let b = greedy_mcb(c5sq.graph()).unwrap();
        assert_eq!(b.total_length(), 45);
        assert!(b.is_valid_basis(c5sq.graph()).unwrap());
    }

    #[test]
    fn greedy_rejects_disconnected() {
        let g = Graph::from_labeled(&["a", "b", "c"], &[("a", "b")]).unwrap();
        assert!(matches!(greedy_mcb(&g), Err(Error::Disconnected(_))));
    }

    #[test]
    fn exhaustive_cycle_count() {
        // K4 has 4 triangles and 3 four-cycles
        let cycles = enumerate_simple_cycles(&Graph::complete(4), 1000).unwrap();
        assert_eq!(cycles.len(), 7);
        assert!(enumerate_simple_cycles(&Graph::complete(6), 10).is_err());
    }

    #[test]
    fn certificate_flags_non_minimum_basis() {
        let k4 = Graph::complete(4);
        let t = bfs_spanning_tree(&k4, 0).unwrap();
        let star = fundamental_cycles(&k4, &t).unwrap();
        // star tree at a: every fundamental cycle is a triangle, so it is minimum
        assert!(certify_minimum(&k4, &star, 1000).unwrap().is_none());

        let path_tree =
            crate::graph::RootedTree::from_edges(&k4, 0, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let long = fundamental_cycles(&k4, &path_tree).unwrap();
        assert!(long.total_length() > 9);
        assert!(certify_minimum(&k4, &long, 1000).unwrap().is_some());
    }

    #[test]
    fn p_star_single_edge_and_host_check() {
        let c5 = Graph::cycle(5);
        let p = build_reduced_power(&c5, 2).unwrap();
        let id = p
            .graph()
            .edge_id(
                p.state_by_label("a^2").unwrap(),
                p.state_by_label("ab").unwrap(),
            )
            .unwrap();
        let x = EdgeVector::from_edges(p.graph(), [id]);
        let y = p_star(&p, &x).unwrap();
        assert_eq!(
            y.ones().collect::<Vec<_>>(),
            vec![c5.edge_id(0, 1).unwrap()]
        );
        assert!(matches!(
            p_star(&p, &EdgeVector::zero(&c5)),
            Err(Error::Unannotated)
        ));
    }

    #[test]
    fn reversed_cycle_keeps_edges() {
        let c =
            Cycle::from_vertices(&Graph::cycle(4), vec![0, 1, 2, 3], Provenance::Horton).unwrap();
        let r = c.reversed();
        assert_eq!(r.vertices(), &[0, 3, 2, 1]);
        assert_eq!(r.edges(), c.edges());
        assert!(
            Cycle::from_vertices(&Graph::cycle(4), vec![0, 2, 1, 3], Provenance::Horton).is_err()
        );
        assert!(Cycle::from_vertices(&Graph::path(2), vec![0, 1], Provenance::Horton).is_err());
    }
}
