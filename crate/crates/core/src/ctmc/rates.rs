use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::monomial::Monomial;

/// Per-token rate of one directed base edge `i -> j`:
/// `q_ij[x] = base + sum_l coupling[l] * (n_l[x] - [l = i])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeRate {
    pub base: BigRational,
    pub coupling: Vec<BigRational>,
}

impl EdgeRate {
    pub fn constant(v: usize, base: BigRational) -> Self {
        EdgeRate {
            base,
            coupling: vec![BigRational::zero(); v],
        }
    }

    pub fn is_uncoupled(&self) -> bool {
        self.coupling.iter().all(Zero::is_zero)
    }
}

/// Affine occupancy-dependent rates for every directed edge of a base graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RateSpec {
    v: usize,
    host: u64,
    labels: Vec<String>,
    rates: BTreeMap<(usize, usize), EdgeRate>,
}

impl RateSpec {
    pub fn new(g: &Graph) -> Self {
        RateSpec {
            v: g.vertex_count(),
            host: g.host_id(),
            labels: g.labels().to_vec(),
            rates: BTreeMap::new(),
        }
    }

    /// Sets the rate of `from -> to`. Rejects non-edges, negative values and
    /// coupling vectors of the wrong length.
    pub fn set(&mut self, g: &Graph, from: usize, to: usize, rate: EdgeRate) -> Result<()> {
        if g.host_id() != self.host {
            return Err(Error::MixedHosts);
        }
        if from >= self.v || to >= self.v {
            return Err(Error::IndexOutOfRange(from.max(to)));
        }
        if !g.has_edge(from, to) {
            return Err(Error::InvalidRate(format!(
                "{} -> {} is not an edge of the graph",
                g.label(from),
                g.label(to)
            )));
        }
        if rate.coupling.len() != self.v {
            return Err(Error::InvalidRate(format!(
                "coupling vector has {} entries, graph has {} vertices",
                rate.coupling.len(),
                self.v
            )));
        }
        if rate.base.is_negative() || rate.coupling.iter().any(Signed::is_negative) {
            return Err(Error::InvalidRate(format!(
                "{} -> {}: rates and coupling coefficients must be >= 0",
                g.label(from),
                g.label(to)
            )));
        }
        self.rates.insert((from, to), rate);
        Ok(())
    }

    pub fn set_constant(
        &mut self,
        g: &Graph,
        from: usize,
        to: usize,
        base: BigRational,
    ) -> Result<()> {
        self.set(g, from, to, EdgeRate::constant(self.v, base))
    }

    pub fn get(&self, from: usize, to: usize) -> Option<&EdgeRate> {
        self.rates.get(&(from, to))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &EdgeRate)> {
        self.rates.iter()
    }

    pub fn vertex_count(&self) -> usize {
        self.v
    }

    pub fn host_id(&self) -> u64 {
        self.host
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Per-token rate `q_ij` at `state`. The moving token is excluded from
    /// its own occupancy count, so at the single-token state `a_i` the rate
    /// is the base rate. A directed edge with no entry has rate zero.
    pub fn eval_rate(&self, i: usize, j: usize, state: &Monomial) -> Result<BigRational> {
        if state.arity() != self.v {
            return Err(Error::WrongArity {
                expected: self.v,
                found: state.arity(),
            });
        }
        if state.count(i) == 0 {
            return Err(Error::EmptyOrigin {
                from: self.labels[i].clone(),
                to: self.labels[j].clone(),
                state: state.format(&self.labels),
            });
        }
        let Some(rate) = self.rates.get(&(i, j)) else {
            return Ok(BigRational::zero());
        };
        let mut q = rate.base.clone();
        for (l, c) in rate.coupling.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut n = state.count(l) as i64;
            if l == i {
                n -= 1;
            }
            q += c * BigRational::from_integer(n.into());
        }
        Ok(q)
    }
}
