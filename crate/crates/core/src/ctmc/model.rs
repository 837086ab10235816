//! Model specification files.
//!
//! ```json
//! {"graph": {"vertices": ["a", "b"], "edges": [["a", "b"]]},
//!  "k": 3,
//!  "rates": {"a->b": {"base": "32", "coupling": {"a": "1", "b": "1/3"}},
//!            "b->a": {"base": "2"}}}
//! ```
//!
//! Rationals are strings (`"3"`, `"1/3"`); a missing coupling map means the
//! edge is uncoupled.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::rates::{EdgeRate, RateSpec};
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphJson};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RateJson {
    pub base: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub coupling: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ModelJson {
    pub graph: GraphJson,
    pub k: usize,
    pub rates: BTreeMap<String, RateJson>,
}

/// A validated model: base graph, number of automata, rate specification.
#[derive(Clone, Debug)]
pub struct Model {
    pub graph: Graph,
    pub k: usize,
    pub rates: RateSpec,
}

pub fn parse_rational(text: &str) -> Result<BigRational> {
    BigRational::from_str(text.trim())
        .map_err(|_| Error::InvalidRate(format!("`{text}` is not a rational number")))
}

pub fn format_rational(q: &BigRational) -> String {
    q.to_string()
}

impl Model {
    pub fn from_json(json: &ModelJson) -> Result<Self> {
        let graph = Graph::from_json(&json.graph)?;
        if json.k == 0 {
            return Err(Error::InvalidPower(0, 1));
        }
        let mut rates = RateSpec::new(&graph);
        let v = graph.vertex_count();
        for (key, rate) in &json.rates {
            let (from, to) = key.split_once("->").ok_or_else(|| {
                Error::InvalidRate(format!("key `{key}` is not of the form `a->b`"))
            })?;
            let lookup = |label: &str| {
                graph
                    .index_of(label.trim())
                    .ok_or_else(|| Error::UnknownVertex(label.trim().to_string()))
            };
            let (i, j) = (lookup(from)?, lookup(to)?);
            let mut coupling = vec![BigRational::zero(); v];
            for (label, value) in &rate.coupling {
                coupling[lookup(label)?] = parse_rational(value)?;
            }
            rates.set(
                &graph,
                i,
                j,
                EdgeRate {
                    base: parse_rational(&rate.base)?,
                    coupling,
                },
            )?;
        }
        Ok(Model {
            graph,
            k: json.k,
            rates,
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let json: ModelJson = serde_json::from_str(text)?;
        Model::from_json(&json)
    }

    pub fn to_json(&self) -> ModelJson {
        let labels = self.graph.labels();
        let rates = self
            .rates
            .iter()
            .map(|(&(i, j), rate)| {
                let coupling = rate
                    .coupling
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(l, c)| (labels[l].clone(), format_rational(c)))
                    .collect();
                (
                    format!("{}->{}", labels[i], labels[j]),
                    RateJson {
                        base: format_rational(&rate.base),
                        coupling,
                    },
                )
            })
            .collect();
        ModelJson {
            graph: self.graph.to_json(),
            k: self.k,
            rates,
        }
    }
}

/// The five-state ring with one occupancy-dependent edge: `a -> b` has rate
/// `lambda + alpha (n_a - 1) + beta n_b + gamma n_c + delta n_d + epsilon n_e`,
/// the other forward edges `b->c, c->d, d->e, e->a` have rate `mu`, and every
/// backward edge has rate `nu`. `coupling` is `[alpha, beta, gamma, delta, epsilon]`.
pub fn ring_model(
    lambda: BigRational,
    mu: BigRational,
    nu: BigRational,
    coupling: [BigRational; 5],
) -> (Graph, RateSpec) {
    let g = Graph::cycle(5);
    let mut spec = RateSpec::new(&g);
    spec.set(
        &g,
        0,
        1,
        EdgeRate {
            base: lambda,
            coupling: coupling.to_vec(),
        },
    )
    .expect("valid coupled edge");
    for i in 1..5 {
        spec.set_constant(&g, i, (i + 1) % 5, mu.clone())
            .expect("valid forward edge");
    }
    for i in 0..5 {
        spec.set_constant(&g, (i + 1) % 5, i, nu.clone())
            .expect("valid backward edge");
    }
    (g, spec)
}
