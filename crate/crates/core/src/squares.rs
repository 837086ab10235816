//! Explicit cycle bases of reduced powers built from Cartesian squares.
//!
//! Over a rooted spanning tree `T` whose vertex positions `a_1, ..., a_v`
//! follow a breadth-first order, `e_j` is the tree edge whose deeper endpoint
//! is `a_j`. Two families of squares are generated:
//!
//! * upsilon: `(e_i [] e_j) f` for `2 <= i < j <= v`, `f` of degree `k-2` in
//!   `a_1..a_j`;
//! * omega: `(a_l a_m [] e_j) f` for every non-tree edge `a_l a_m`,
//!   `2 <= j <= v`, `f` of degree `k-2` in `a_1..a_j`.
//!
//! Together with one embedded copy `C f` of a cycle basis of `G` they form a
//! cycle basis of `G^(k)`, minimum when `G` is triangle-free and the base
//! basis is minimum.

use log::warn;
use serde::Serialize;

use crate::cycles::{greedy_mcb, p_star, rank, BasisKind, Cycle, CycleBasis, Provenance};
use crate::error::{Error, Result};
use crate::graph::{betti, bfs_spanning_tree, has_triangles, Graph, RootedTree};
use crate::monomial::Monomial;
use crate::power::{
    build_reduced_power, omega_count, power_betti, upsilon_count, ReducedPowerGraph,
};

/// `(ab [] cd) f`: the 4-cycle `acf -> bcf -> bdf -> adf` in `G^(k)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CartesianSquare {
    pub first: (usize, usize),
    pub second: (usize, usize),
    pub cofactor: Monomial,
    pub family: Provenance,
}

impl CartesianSquare {
    /// The four corner states in traversal order.
    pub fn corners(&self) -> [Monomial; 4] {
        let (a, b) = self.first;
        let (c, d) = self.second;
        let f = &self.cofactor;
        [
            f.times(a).times(c),
            f.times(b).times(c),
            f.times(b).times(d),
            f.times(a).times(d),
        ]
    }

    pub fn to_cycle(&self, rp: &ReducedPowerGraph) -> Result<Cycle> {
        let (a, b) = self.first;
        let (c, d) = self.second;
        if (a.min(b), a.max(b)) == (c.min(d), c.max(d)) {
            return Err(Error::NotACycle("square on a repeated edge is zero".into()));
        }
        let vertices = self
            .corners()
            .iter()
            .map(|m| {
                rp.state_index(m)
                    .ok_or_else(|| Error::UnknownState(m.format(rp.base().labels())))
            })
            .collect::<Result<Vec<_>>>()?;
        Cycle::from_vertices(rp.graph(), vertices, self.family)
    }

    pub fn describe(&self, labels: &[String]) -> String {
        format!(
            "({}{} [] {}{}){}",
            labels[self.first.0],
            labels[self.first.1],
            labels[self.second.0],
            labels[self.second.1],
            self.cofactor.format(labels)
        )
    }
}

fn check_tree(g: &Graph, t: &RootedTree) -> Result<()> {
    if t.host_id() != g.host_id() || t.order().len() != g.vertex_count() {
        return Err(Error::NotSpanningTree(
            "tree was built for a different graph".into(),
        ));
    }
    Ok(())
}

/// Cofactors of degree `k - 2` supported on the first `j` BFS positions
/// (`j` counted from 1).
fn cofactors(g: &Graph, t: &RootedTree, k: usize, j: usize) -> Vec<Monomial> {
    Monomial::all_over(g.vertex_count(), k - 2, &t.order()[..j])
}

pub fn upsilon(g: &Graph, t: &RootedTree, k: usize) -> Result<Vec<CartesianSquare>> {
    check_tree(g, t)?;
    if k < 2 {
        warn!("k = {k}: no Cartesian squares exist below k = 2");
        return Ok(Vec::new());
    }
    let v = g.vertex_count();
    let mut out = Vec::new();
    // positions are 0-based here: e_j with j >= 2 sits at position j - 1
    for pj in 2..v {
        let ej = t.edge_at(pj);
        let fs = cofactors(g, t, k, pj + 1);
        for pi in 1..pj {
            let ei = t.edge_at(pi);
            for f in &fs {
                out.push(CartesianSquare {
                    first: ei,
                    second: ej,
                    cofactor: f.clone(),
                    family: Provenance::Upsilon,
                });
            }
        }
    }
    Ok(out)
}

/// Non-tree edges of `g`, each oriented from the earlier BFS position.
fn non_tree_edges(g: &Graph, t: &RootedTree) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .filter(|&&(a, b)| !t.contains_edge(a, b))
        .map(|&(a, b)| {
            if t.position(a) < t.position(b) {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect();
    out.sort_by_key(|&(a, b)| (t.position(a), t.position(b)));
    out
}

pub fn omega(g: &Graph, t: &RootedTree, k: usize) -> Result<Vec<CartesianSquare>> {
    check_tree(g, t)?;
    if k < 2 {
        warn!("k = {k}: no Cartesian squares exist below k = 2");
        return Ok(Vec::new());
    }
    let chords = non_tree_edges(g, t);
    let mut out = Vec::new();
    for pj in 1..g.vertex_count() {
        let ej = t.edge_at(pj);
        let fs = cofactors(g, t, k, pj + 1);
        for &chord in &chords {
            for f in &fs {
                out.push(CartesianSquare {
                    first: chord,
                    second: ej,
                    cofactor: f.clone(),
                    family: Provenance::Omega,
                });
            }
        }
    }
    Ok(out)
}

/// Image of a base cycle under `x -> x f`, traversed in the same order.
pub fn embed_cycle(rp: &ReducedPowerGraph, c: &Cycle, f: &Monomial) -> Result<Cycle> {
    let base = rp.base();
    if c.edges().host_id() != base.host_id() {
        return Err(Error::MixedHosts);
    }
    if f.arity() != base.vertex_count() {
        return Err(Error::WrongArity {
            expected: base.vertex_count(),
            found: f.arity(),
        });
    }
    if f.degree() + 1 != rp.k() {
        return Err(Error::WrongDegree {
            expected: rp.k() - 1,
            found: f.degree(),
        });
    }
    let vertices = c
        .vertices()
        .iter()
        .map(|&x| rp.state_index(&f.times(x)).expect("x f has degree k"))
        .collect();
    Cycle::from_vertices(rp.graph(), vertices, Provenance::Embedded)
}

/// The assembled basis `C f + upsilon + omega` and its provenance.
#[derive(Clone, Debug)]
pub struct Theorem1Basis {
    pub basis: CycleBasis,
    pub base_mcb: CycleBasis,
    pub tree: RootedTree,
    pub embedding: Monomial,
    pub squares: Vec<CartesianSquare>,
    pub upsilon_len: usize,
    pub omega_len: usize,
    /// Minimality is guaranteed only for triangle-free base graphs.
    pub certified: bool,
}

/// Basis for `G^(k)` with the default choices: BFS tree rooted at the first
/// vertex and embedding monomial `a_1^(k-1)`.
pub fn theorem1_basis(g: &Graph, k: usize) -> Result<Theorem1Basis> {
    let rp = build_reduced_power(g, k)?;
    let tree = bfs_spanning_tree(g, 0)?;
    theorem1_basis_with(&rp, &tree, None)
}

/// Basis for `rp` over the given tree; `embedding` defaults to
/// `root^(k-1)`.
pub fn theorem1_basis_with(
    rp: &ReducedPowerGraph,
    tree: &RootedTree,
    embedding: Option<Monomial>,
) -> Result<Theorem1Basis> {
    let g = rp.base();
    let k = rp.k();
    if k < 2 {
        return Err(Error::InvalidPower(k, 2));
    }
    check_tree(g, tree)?;
    let base_mcb = greedy_mcb(g)?;
    let f = embedding
        .unwrap_or_else(|| Monomial::power_of(g.vertex_count(), tree.root(), (k - 1) as u32));
    let mut elements = Vec::new();
    for c in base_mcb.elements() {
        elements.push(embed_cycle(rp, c, &f)?);
    }
    let ups = upsilon(g, tree, k)?;
    let oms = omega(g, tree, k)?;
    let (upsilon_len, omega_len) = (ups.len(), oms.len());
    let squares: Vec<CartesianSquare> = ups.into_iter().chain(oms).collect();
    for s in &squares {
        elements.push(s.to_cycle(rp)?);
    }
    Ok(Theorem1Basis {
        basis: CycleBasis::new(rp.graph(), BasisKind::Theorem1, elements),
        base_mcb,
        tree: tree.clone(),
        embedding: f,
        squares,
        upsilon_len,
        omega_len,
        certified: !has_triangles(g),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub expected: u64,
    pub actual: u64,
    pub pass: bool,
}

impl Check {
    fn new(name: &'static str, expected: u64, actual: u64) -> Self {
        Check {
            name,
            expected,
            actual,
            pass: expected == actual,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SquareSpaceReport {
    pub k: usize,
    pub upsilon: usize,
    pub omega: usize,
    pub checks: Vec<Check>,
}

impl SquareSpaceReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Verifies the square families against the closed-form sizes, their
/// independence, their membership in `ker p*`, the dimension of the square
/// space, and the direct sum with one embedded copy of the base cycle space.
pub fn verify_square_space(rp: &ReducedPowerGraph, tree: &RootedTree) -> Result<SquareSpaceReport> {
    let g = rp.base();
    let k = rp.k();
    let v = g.vertex_count();
    let beta_g = betti(g)?;
    let beta_power = power_betti(g.edge_count(), v, k)?;
    let t1 = theorem1_basis_with(rp, tree, None)?;
    let square_cycles: Vec<&Cycle> = t1
        .basis
        .elements()
        .iter()
        .filter(|c| c.provenance() != Provenance::Embedded)
        .collect();
    let square_rank = rank(square_cycles.iter().map(|c| c.edges()))?;
    let mut projections_zero = 0u64;
    for c in &square_cycles {
        if p_star(rp, c.edges())?.is_zero() {
            projections_zero += 1;
        }
    }
    let n_squares = square_cycles.len() as u64;
    let checks = vec![
        Check::new("upsilon size", upsilon_count(v, k)?, t1.upsilon_len as u64),
        Check::new(
            "omega size",
            omega_count(beta_g, v, k)?,
            t1.omega_len as u64,
        ),
        Check::new("squares independent", n_squares, square_rank as u64),
        Check::new("squares in ker p*", n_squares, projections_zero),
        Check::new(
            "square space dimension",
            beta_power - beta_g as u64,
            square_rank as u64,
        ),
        Check::new("direct sum rank", beta_power, t1.basis.rank()? as u64),
    ];
    Ok(SquareSpaceReport {
        k,
        upsilon: t1.upsilon_len,
        omega: t1.omega_len,
        checks,
    })
}
