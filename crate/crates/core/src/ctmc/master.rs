use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::rates::RateSpec;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::power::{build_reduced_power, ReducedPowerGraph};

/// One directed transition of the master chain: a token moves from base
/// vertex `moved.0` to `moved.1`. `rate = tokens * per_token`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    pub moved: (usize, usize),
    pub tokens: u32,
    pub per_token: BigRational,
    pub rate: BigRational,
}

/// The continuous-time chain of `k` indistinguishable automata on the
/// reduced power. Off-diagonal rates are stored for both orientations of
/// every state-graph edge; the diagonal is implied by zero row sums.
#[derive(Clone, Debug)]
pub struct MasterChain {
    power: ReducedPowerGraph,
    transitions: Vec<Transition>,
    lookup: HashMap<(usize, usize), usize>,
}

impl MasterChain {
    pub fn power(&self) -> &ReducedPowerGraph {
        &self.power
    }

    pub fn graph(&self) -> &Graph {
        self.power.graph()
    }

    pub fn state_count(&self) -> usize {
        self.power.states().len()
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, from: usize, to: usize) -> Option<&Transition> {
        self.lookup.get(&(from, to)).map(|&i| &self.transitions[i])
    }

    pub fn rate(&self, from: usize, to: usize) -> Option<&BigRational> {
        self.transition(from, to).map(|t| &t.rate)
    }

    /// Total outflow of `state`, i.e. `-q_xx`.
    pub fn exit_rate(&self, state: usize) -> BigRational {
        self.graph()
            .neighbors(state)
            .iter()
            .map(|&y| {
                self.rate(state, y)
                    .expect("both orientations stored")
                    .clone()
            })
            .fold(BigRational::zero(), |acc, r| acc + r)
    }

    /// Dense generator in floating point, rows summing to zero.
    pub fn generator_f64(&self) -> Vec<Vec<f64>> {
        let n = self.state_count();
        let mut q = vec![vec![0.0; n]; n];
        for t in &self.transitions {
            let r = t.rate.to_f64().expect("finite rate");
            q[t.from][t.to] += r;
            q[t.from][t.from] -= r;
        }
        q
    }
}

/// Builds the master chain of `k` automata with rates `spec` on `g`.
pub fn build_master(g: &Graph, k: usize, spec: &RateSpec) -> Result<MasterChain> {
    if spec.host_id() != g.host_id() {
        return Err(Error::MixedHosts);
    }
    let rp = build_reduced_power(g, k)?;
    build_master_on(rp, spec)
}

/// Assigns rates to an existing reduced power: for the edge generated by
/// `(i, j, f)`, the move `a_i f -> a_j f` has rate `n_i q_ij[a_i f]`.
pub fn build_master_on(power: ReducedPowerGraph, spec: &RateSpec) -> Result<MasterChain> {
    let base = power.base();
    if spec.host_id() != base.host_id() {
        return Err(Error::MixedHosts);
    }
    let mut transitions = Vec::with_capacity(2 * power.graph().edge_count());
    for (id, &(x, y)) in power.graph().edges().iter().enumerate() {
        let gen = power.generator(id);
        let low_state = gen.cofactor.times(gen.low);
        let (x_vertex, y_vertex) = if power.state(x) == &low_state {
            (gen.low, gen.high)
        } else {
            (gen.high, gen.low)
        };
        for (from, to, i, j) in [(x, y, x_vertex, y_vertex), (y, x, y_vertex, x_vertex)] {
            let state = power.state(from);
            let per_token = spec.eval_rate(i, j, state)?;
            let tokens = state.count(i);
            let rate = &per_token * BigRational::from_integer(tokens.into());
            if !rate.is_positive() {
                return Err(Error::NonPositiveRate {
                    from: power.state_label(from).to_string(),
                    to: power.state_label(to).to_string(),
                    value: rate.to_string(),
                    context: format!(" (token move {} -> {})", base.label(i), base.label(j)),
                });
            }
            transitions.push(Transition {
                from,
                to,
                moved: (i, j),
                tokens,
                per_token,
                rate,
            });
        }
    }
    let lookup = transitions
        .iter()
        .enumerate()
        .map(|(idx, t)| ((t.from, t.to), idx))
        .collect();
    Ok(MasterChain {
        power,
        transitions,
        lookup,
    })
}
