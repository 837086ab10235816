//! Reduced k-th powers: direct construction, the Cartesian-power quotient
//! oracle, and the closed-form counts.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::monomial::Monomial;

/// Default ceiling on the number of k-tuples enumerated by [`cartesian_power`].
pub const DEFAULT_TUPLE_BUDGET: u128 = 1_000_000;

/// The generator of a reduced-power edge: base edge `{low, high}` (as input
/// indices, `low < high`) and the cofactor `f` of degree `k - 1`. The edge
/// joins `a_low * f` and `a_high * f`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgeGenerator {
    pub low: usize,
    pub high: usize,
    pub cofactor: Monomial,
}

/// `G^(k)`: states are the degree-`k` monomials in canonical order, and the
/// state graph carries their string forms as vertex labels.
#[derive(Clone, Debug)]
pub struct ReducedPowerGraph {
    base: Graph,
    k: usize,
    states: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    graph: Graph,
    generators: Vec<EdgeGenerator>,
}

impl PartialEq for ReducedPowerGraph {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base
            && self.k == other.k
            && self.states == other.states
            && self.graph == other.graph
            && self.generators == other.generators
    }
}

impl ReducedPowerGraph {
    fn assemble(
        base: &Graph,
        k: usize,
        states: Vec<Monomial>,
        edges: Vec<(usize, usize, EdgeGenerator)>,
    ) -> Result<Self> {
        let index: HashMap<Monomial, usize> = states
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let labels: Vec<String> = states.iter().map(|m| m.format(base.labels())).collect();
        let graph = Graph::new(labels, edges.iter().map(|&(x, y, _)| (x, y)))?;
        let mut generators = vec![None; graph.edge_count()];
        for (x, y, gen) in edges {
            let id = graph.edge_id(x, y).expect("edge was just inserted");
            generators[id] = Some(gen);
        }
        Ok(ReducedPowerGraph {
            base: base.clone(),
            k,
            states,
            index,
            graph,
            generators: generators.into_iter().map(Option::unwrap).collect(),
        })
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn states(&self) -> &[Monomial] {
        &self.states
    }

    pub fn state(&self, idx: usize) -> &Monomial {
        &self.states[idx]
    }

    pub fn state_index(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn state_label(&self, idx: usize) -> &str {
        self.graph.label(idx)
    }

    /// The state graph (vertices labeled by monomial strings).
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Generator of the state-graph edge with index `edge`.
    pub fn generator(&self, edge: usize) -> &EdgeGenerator {
        &self.generators[edge]
    }

    pub fn generators(&self) -> &[EdgeGenerator] {
        &self.generators
    }

    /// Parses a monomial string against the base labels and looks it up.
    pub fn state_by_label(&self, text: &str) -> Result<usize> {
        let m = Monomial::parse(text, self.base.labels())?;
        self.state_index(&m)
            .ok_or_else(|| Error::UnknownState(text.to_string()))
    }

    pub fn to_json_string(&self) -> String {
        self.graph.to_json_string()
    }

    pub fn to_dot(&self) -> String {
        self.graph.to_dot(&format!("reduced power k={}", self.k))
    }
}

/// Builds `G^(k)` directly: for every base edge `{i, j}` and every
/// `f` of degree `k - 1`, joins `a_i f` and `a_j f`.
pub fn build_reduced_power(g: &Graph, k: usize) -> Result<ReducedPowerGraph> {
    if k == 0 {
        return Err(Error::InvalidPower(0, 1));
    }
    g.ensure_connected()?;
    vertex_count(g.vertex_count(), k)?;
    edge_count(g.edge_count(), g.vertex_count(), k)?;
    let v = g.vertex_count();
    let states = Monomial::all(v, k);
    let index: HashMap<&Monomial, usize> = states.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut edges = Vec::new();
    for f in Monomial::all(v, k - 1) {
        for &(i, j) in g.edges() {
            let x = index[&f.times(i)];
            let y = index[&f.times(j)];
            edges.push((
                x,
                y,
                EdgeGenerator {
                    low: i,
                    high: j,
                    cofactor: f.clone(),
                },
            ));
        }
    }
    ReducedPowerGraph::assemble(g, k, states, edges)
}

/// `C(n, r)` with overflow detection.
pub fn binomial(n: u64, r: u64) -> Option<u64> {
    if r > n {
        return Some(0);
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// `|V(G^(k))| = C(k + v - 1, k)`.
pub fn vertex_count(v: usize, k: usize) -> Result<u64> {
    if v == 0 || k == 0 {
        return Err(Error::InvalidPower(k, 1));
    }
    binomial((k + v - 1) as u64, k as u64).ok_or(Error::Overflow("vertex count"))
}

/// `|E(G^(k))| = e * C(k + v - 2, k - 1)`.
pub fn edge_count(e: usize, v: usize, k: usize) -> Result<u64> {
    if v == 0 || k == 0 {
        return Err(Error::InvalidPower(k, 1));
    }
    binomial((k + v - 2) as u64, (k - 1) as u64)
        .and_then(|c| c.checked_mul(e as u64))
        .ok_or(Error::Overflow("edge count"))
}

/// `beta(G^(k)) = e C(k+v-2, k-1) - C(k+v-1, k) + 1` for connected `G`.
pub fn power_betti(e: usize, v: usize, k: usize) -> Result<u64> {
    let edges = edge_count(e, v, k)?;
    let vertices = vertex_count(v, k)?;
    (edges + 1)
        .checked_sub(vertices)
        .ok_or(Error::Overflow("betti number (graph not connected?)"))
}

/// Size of the first square family: `(v-1) C(k+v-2, k-1) - C(k+v-1, k) + 1`.
pub fn upsilon_count(v: usize, k: usize) -> Result<u64> {
    if k < 2 {
        return Ok(0);
    }
    let a = binomial((k + v - 2) as u64, (k - 1) as u64)
        .and_then(|c| c.checked_mul(v as u64 - 1))
        .ok_or(Error::Overflow("upsilon count"))?;
    let b = vertex_count(v, k)?;
    (a + 1)
        .checked_sub(b)
        .ok_or(Error::Overflow("upsilon count"))
}

/// Size of the second square family: `beta C(k+v-2, k-1) - beta`.
pub fn omega_count(beta: usize, v: usize, k: usize) -> Result<u64> {
    if k < 2 {
        return Ok(0);
    }
    binomial((k + v - 2) as u64, (k - 1) as u64)
        .and_then(|c| c.checked_mul(beta as u64))
        .and_then(|c| c.checked_sub(beta as u64))
        .ok_or(Error::Overflow("omega count"))
}

/// Multinomial `k! / (n_1! ... n_v!)`: the number of k-tuples in the orbit.
pub fn orbit_size(m: &Monomial) -> Result<u64> {
    let mut acc: u64 = 1;
    let mut placed: u64 = 0;
    for &n in m.exponents() {
        placed += n as u64;
        let c = binomial(placed, n as u64).ok_or(Error::Overflow("orbit size"))?;
        acc = acc.checked_mul(c).ok_or(Error::Overflow("orbit size"))?;
    }
    Ok(acc)
}

/// Degree of a state by the token-moving argument: the sum of base degrees
/// over occupied vertices.
pub fn degree_of(rp: &ReducedPowerGraph, m: &Monomial) -> Result<usize> {
    if rp.state_index(m).is_none() {
        let text = if m.arity() == rp.base().vertex_count() {
            m.format(rp.base().labels())
        } else {
            format!("{:?}", m.exponents())
        };
        return Err(Error::UnknownState(text));
    }
    Ok(m.support().map(|i| rp.base().degree(i)).sum())
}

/// The k-fold Cartesian power `G^k` with its tuple coordinates.
#[derive(Clone, Debug)]
pub struct CartesianPower {
    pub graph: Graph,
    pub tuples: Vec<Vec<usize>>,
}

/// Builds `G^k` with vertices in lexicographic tuple order, labeled
/// `(a,b,...)`. Refuses when `v^k` exceeds `budget`.
pub fn cartesian_power(g: &Graph, k: usize, budget: u128) -> Result<CartesianPower> {
    if k == 0 {
        return Err(Error::InvalidPower(0, 1));
    }
    let v = g.vertex_count();
    let needed = (v as u128)
        .checked_pow(k as u32)
        .ok_or(Error::Overflow("tuple count"))?;
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let n = needed as usize;
    let mut tuples = Vec::with_capacity(n);
    let mut current = vec![0usize; k];
    for _ in 0..n {
        tuples.push(current.clone());
        for pos in (0..k).rev() {
            current[pos] += 1;
            if current[pos] < v {
                break;
            }
            current[pos] = 0;
        }
    }
    let stride: Vec<usize> = (0..k).map(|pos| v.pow((k - 1 - pos) as u32)).collect();
    let mut edges = Vec::new();
    for (idx, t) in tuples.iter().enumerate() {
        for pos in 0..k {
            for &w in g.neighbors(t[pos]) {
                if w > t[pos] {
                    edges.push((idx, idx + (w - t[pos]) * stride[pos]));
                }
            }
        }
    }
    let labels = tuples
        .iter()
        .map(|t| {
            let parts: Vec<&str> = t.iter().map(|&x| g.label(x)).collect();
            format!("({})", parts.join(","))
        })
        .collect();
    Ok(CartesianPower {
        graph: Graph::new(labels, edges)?,
        tuples,
    })
}

/// Quotient of `G^k` by coordinate permutations: each tuple maps to its
/// multiset, and two orbits are adjacent when some tuple edge joins them.
pub fn quotient_by_symmetry(
    power: &CartesianPower,
    g: &Graph,
    k: usize,
) -> Result<ReducedPowerGraph> {
    let v = g.vertex_count();
    let bad = |msg: String| Error::InvalidCartesianPower(msg);
    if k == 0 {
        return Err(Error::InvalidPower(0, 1));
    }
    g.ensure_connected()?;
    let expected_vertices = (v as u128).pow(k as u32);
    if power.tuples.len() as u128 != expected_vertices
        || power.graph.vertex_count() != power.tuples.len()
    {
        return Err(bad(format!(
            "{} vertices, expected v^k = {}",
            power.tuples.len(),
            expected_vertices
        )));
    }
    let distinct: BTreeSet<&Vec<usize>> = power.tuples.iter().collect();
    if distinct.len() != power.tuples.len()
        || power
            .tuples
            .iter()
            .any(|t| t.len() != k || t.iter().any(|&x| x >= v))
    {
        return Err(bad("tuples are not the distinct k-tuples over V(G)".into()));
    }
    let expected_edges = k as u128 * g.edge_count() as u128 * (v as u128).pow(k as u32 - 1);
    if power.graph.edge_count() as u128 != expected_edges {
        return Err(bad(format!(
            "{} edges, expected k e v^(k-1) = {}",
            power.graph.edge_count(),
            expected_edges
        )));
    }

    let mut states: BTreeSet<Monomial> = BTreeSet::new();
    let orbit: Vec<Monomial> = power
        .tuples
        .iter()
        .map(|t| Monomial::from_tokens(v, t))
        .collect();
    states.extend(orbit.iter().cloned());
    let states: Vec<Monomial> = states.into_iter().collect();
    let index: HashMap<&Monomial, usize> = states.iter().enumerate().map(|(i, m)| (m, i)).collect();

    let mut seen = HashMap::new();
    for &(x, y) in power.graph.edges() {
        let (tx, ty) = (&power.tuples[x], &power.tuples[y]);
        let moved: Vec<usize> = (0..k).filter(|&p| tx[p] != ty[p]).collect();
        if moved.len() != 1 || !g.has_edge(tx[moved[0]], ty[moved[0]]) {
            return Err(bad(format!(
                "edge {} -- {} is not a single-coordinate move along G",
                power.graph.label(x),
                power.graph.label(y)
            )));
        }
        let (from, to) = (tx[moved[0]], ty[moved[0]]);
        let cofactor = orbit[x].divide(from).expect("moved coordinate is present");
        let (sx, sy) = (index[&orbit[x]], index[&orbit[y]]);
        let key = (sx.min(sy), sx.max(sy));
        seen.entry(key).or_insert(EdgeGenerator {
            low: from.min(to),
            high: from.max(to),
            cofactor,
        });
    }
    let mut edges: Vec<(usize, usize, EdgeGenerator)> =
        seen.into_iter().map(|((x, y), gen)| (x, y, gen)).collect();
    edges.sort_by_key(|e| (e.0, e.1));
    ReducedPowerGraph::assemble(g, k, states, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_examples() {
        assert_eq!(vertex_count(5, 2).unwrap(), 15);
        assert_eq!(edge_count(5, 5, 2).unwrap(), 25);
        assert_eq!(vertex_count(5, 3).unwrap(), 35);
        assert_eq!(edge_count(5, 5, 3).unwrap(), 75);
        assert_eq!(power_betti(5, 5, 2).unwrap(), 11);
        assert_eq!(power_betti(5, 5, 3).unwrap(), 41);
        assert_eq!(upsilon_count(5, 3).unwrap(), 26);
        assert_eq!(upsilon_count(5, 2).unwrap(), 6);
        assert_eq!(omega_count(1, 5, 3).unwrap(), 14);
        assert_eq!(omega_count(1, 5, 2).unwrap(), 4);
    }

    #[test]
    fn counts_detect_overflow() {
        assert!(matches!(vertex_count(1000, 1000), Err(Error::Overflow(_))));
        assert!(matches!(
            edge_count(usize::MAX / 2, 100, 3),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn binomial_small_table() {
        assert_eq!(binomial(0, 0), Some(1));
        assert_eq!(binomial(6, 2), Some(15));
        assert_eq!(binomial(3, 5), Some(0));
        assert_eq!(binomial(60, 30), Some(118264581564861424));
    }

    #[test]
    fn c5_powers() {
        let c5 = Graph::cycle(5);
        let p2 = build_reduced_power(&c5, 2).unwrap();
        assert_eq!((p2.states().len(), p2.graph().edge_count()), (15, 25));
        let p3 = build_reduced_power(&c5, 3).unwrap();
        assert_eq!((p3.states().len(), p3.graph().edge_count()), (35, 75));
    }

    #[test]
    fn k_zero_rejected() {
        assert!(matches!(
            build_reduced_power(&Graph::cycle(3), 0),
            Err(Error::InvalidPower(0, _))
        ));
    }

    #[test]
    fn k2_power_is_a_path() {
        let k2 = Graph::path(2);
        let p = build_reduced_power(&k2, 4).unwrap();
        let labels: Vec<&str> = (0..5).map(|i| p.state_label(i)).collect();
        assert_eq!(labels, ["a^4", "a^3b", "a^2b^2", "ab^3", "b^4"]);
        assert_eq!(p.graph().edges(), &[(0, 1), (1, 2), (2, 3), (3, 4)]);
    }

    #[test]
    fn first_power_matches_base() {
        let g = Graph::from_labeled(
            &["p", "q", "r", "s"],
            &[("p", "q"), ("q", "r"), ("r", "s"), ("s", "q")],
        )
        .unwrap();
        let p = build_reduced_power(&g, 1).unwrap();
        assert_eq!(p.graph().labels(), g.labels());
        assert_eq!(p.graph().edges(), g.edges());
    }

    #[test]
    fn edges_move_one_token() {
        let p = build_reduced_power(&Graph::cycle(4), 3).unwrap();
        for (id, &(x, y)) in p.graph().edges().iter().enumerate() {
            let gen = p.generator(id);
            let (mx, my) = (p.state(x), p.state(y));
            let a = gen.cofactor.times(gen.low);
            let b = gen.cofactor.times(gen.high);
            assert!((mx == &a && my == &b) || (mx == &b && my == &a));
        }
    }

    #[test]
    fn orbit_sizes() {
        let labels = crate::graph::default_labels(5);
        let m = |s: &str| Monomial::parse(s, &labels).unwrap();
        assert_eq!(orbit_size(&m("a^3")).unwrap(), 1);
        assert_eq!(orbit_size(&m("abd")).unwrap(), 6);
        assert_eq!(orbit_size(&m("ad^2")).unwrap(), 3);
    }

    #[test]
    fn degree_formula_examples() {
        let p = build_reduced_power(&Graph::cycle(5), 3).unwrap();
        let labels = p.base().labels().to_vec();
        let m = |s: &str| Monomial::parse(s, &labels).unwrap();
        assert_eq!(degree_of(&p, &m("a^3")).unwrap(), 2);
        assert_eq!(degree_of(&p, &m("a^2c")).unwrap(), 4);
        assert_eq!(degree_of(&p, &m("abc")).unwrap(), 6);
        assert!(matches!(
            degree_of(&p, &m("a^2")),
            Err(Error::UnknownState(_))
        ));
    }

    #[test]
    fn quotient_small_cases() {
        let c3 = Graph::cycle(3);
        let q = quotient_by_symmetry(
            &cartesian_power(&c3, 2, DEFAULT_TUPLE_BUDGET).unwrap(),
            &c3,
            2,
        )
        .unwrap();
        assert_eq!((q.states().len(), q.graph().edge_count()), (6, 9));
        assert_eq!(q, build_reduced_power(&c3, 2).unwrap());

        let g = Graph::complete(4);
        let q = quotient_by_symmetry(
            &cartesian_power(&g, 1, DEFAULT_TUPLE_BUDGET).unwrap(),
            &g,
            1,
        )
        .unwrap();
        assert_eq!(q.graph().edges(), g.edges());
    }

    #[test]
    fn quotient_rejects_non_power() {
        let c4 = Graph::cycle(4);
        let mut power = cartesian_power(&c4, 2, DEFAULT_TUPLE_BUDGET).unwrap();
        power.tuples.swap(0, 5);
        // tuple labels no longer match the adjacency
        assert!(matches!(
            quotient_by_symmetry(&power, &c4, 2),
            Err(Error::InvalidCartesianPower(_))
        ));
        let power = cartesian_power(&Graph::path(4), 2, DEFAULT_TUPLE_BUDGET).unwrap();
        assert!(quotient_by_symmetry(&power, &c4, 2).is_err());
    }

    #[test]
    fn cartesian_power_budget() {
        let err = cartesian_power(&Graph::cycle(10), 7, DEFAULT_TUPLE_BUDGET).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }
}
