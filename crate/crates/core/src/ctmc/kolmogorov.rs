use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::master::{build_master, MasterChain};
use super::rates::RateSpec;
use crate::cycles::{greedy_mcb, CycleBasis, Provenance};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// One directed step of a cycle traversal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub from: String,
    pub to: String,
    /// Base-graph move `(from vertex, to vertex)` of the token.
    pub moved: (String, String),
    pub tokens: u32,
    #[serde(serialize_with = "ser_rational")]
    pub per_token: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub rate: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleCheck {
    pub provenance: Provenance,
    pub vertices: Vec<usize>,
    pub labels: Vec<String>,
    pub forward: Vec<Step>,
    pub backward: Vec<Step>,
    #[serde(serialize_with = "ser_rational")]
    pub forward_product: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub backward_product: BigRational,
    pub pass: bool,
}

impl CycleCheck {
    /// Base edges `{i, j}` (labels, sorted) moved along by this cycle.
    pub fn base_edges(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = self
            .forward
            .iter()
            .map(|s| {
                let (a, b) = s.moved.clone();
                if a <= b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KolmogorovReport {
    pub checks: Vec<CycleCheck>,
    pub reversible: bool,
}

impl KolmogorovReport {
    pub fn violations(&self) -> impl Iterator<Item = &CycleCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

fn ser_rational<S: serde::Serializer>(
    q: &BigRational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

fn step(mc: &MasterChain, from: usize, to: usize) -> Result<Step> {
    let g = mc.graph();
    let base = mc.power().base();
    let t = mc.transition(from, to).ok_or_else(|| {
        Error::NotACycle(format!(
            "{} -- {} is not a transition of the master chain",
            g.label(from),
            g.label(to)
        ))
    })?;
    Ok(Step {
        from: g.label(from).to_string(),
        to: g.label(to).to_string(),
        moved: (
            base.label(t.moved.0).to_string(),
            base.label(t.moved.1).to_string(),
        ),
        tokens: t.tokens,
        per_token: t.per_token.clone(),
        rate: t.rate.clone(),
    })
}

/// Compares the products of rates around each basis element in both
/// directions. Elements are traversed in their stored order.
pub fn kolmogorov_check(mc: &MasterChain, basis: &CycleBasis) -> Result<KolmogorovReport> {
    if basis.host_id() != mc.graph().host_id() {
        return Err(Error::MixedHosts);
    }
    let g = mc.graph();
    let mut checks = Vec::with_capacity(basis.len());
    for cycle in basis.elements() {
        let vs = cycle.vertices();
        let n = vs.len();
        let mut forward = Vec::with_capacity(n);
        let mut backward = Vec::with_capacity(n);
        for t in 0..n {
            let (x, y) = (vs[t], vs[(t + 1) % n]);
            forward.push(step(mc, x, y)?);
            backward.push(step(mc, y, x)?);
        }
        let product = |steps: &[Step]| {
            steps
                .iter()
                .fold(BigRational::one(), |acc, s| acc * &s.rate)
        };
        let forward_product = product(&forward);
        let backward_product = product(&backward);
        checks.push(CycleCheck {
            provenance: cycle.provenance(),
            vertices: vs.to_vec(),
            labels: vs.iter().map(|&v| g.label(v).to_string()).collect(),
            pass: forward_product == backward_product,
            forward,
            backward,
            forward_product,
            backward_product,
        });
    }
    let reversible = checks.iter().all(|c| c.pass);
    Ok(KolmogorovReport { checks, reversible })
}

/// Kolmogorov check of one isolated automaton: rates are the single-token
/// rates `q_ij[a_i]`, checked on a minimum cycle basis of `g`.
pub fn single_automaton_check(g: &Graph, spec: &RateSpec) -> Result<KolmogorovReport> {
    let mc = build_master(g, 1, spec)?;
    let basis = greedy_mcb(mc.graph())?;
    kolmogorov_check(&mc, &basis)
}
