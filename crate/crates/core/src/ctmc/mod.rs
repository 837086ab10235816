//! Continuous-time chains of interacting automata on reduced powers.

pub mod kolmogorov;
pub mod master;
pub mod model;
pub mod rates;
pub mod steady;

pub use num_rational::BigRational;
use serde::Serialize;

pub use kolmogorov::{
    kolmogorov_check, single_automaton_check, CycleCheck, KolmogorovReport, Step,
};
pub use master::{build_master, build_master_on, MasterChain, Transition};
pub use model::{parse_rational, ring_model, Model, ModelJson, RateJson};
pub use rates::{EdgeRate, RateSpec};
pub use steady::{
    detailed_balance_check, steady_state, BalanceReport, BalanceViolation, SolveMode, SteadyState,
};

use crate::cycles::{greedy_mcb, BasisKind};
use crate::error::Result;
use crate::graph::bfs_spanning_tree;
use crate::squares::theorem1_basis_with;

/// Everything `check-reversibility` reports.
#[derive(Clone, Debug, Serialize)]
pub struct ReversibilityReport {
    pub k: usize,
    pub states: Vec<String>,
    pub single_automaton: KolmogorovReport,
    pub basis: BasisKind,
    pub master: KolmogorovReport,
    pub steady_state: SteadyState,
    pub detailed_balance: BalanceReport,
    /// Kolmogorov verdict and detailed-balance verdict coincide.
    pub oracles_agree: bool,
    pub reversible: bool,
}

/// Runs the isolated-automaton check, the master Kolmogorov check (on the
/// square basis for `k >= 2`, on a minimum cycle basis for `k = 1`) and the
/// steady-state detailed-balance check. `root` picks the spanning-tree root.
pub fn check_reversibility(
    model: &Model,
    mode: SolveMode,
    root: Option<usize>,
) -> Result<ReversibilityReport> {
    let single_automaton = single_automaton_check(&model.graph, &model.rates)?;
    let mc = build_master(&model.graph, model.k, &model.rates)?;
    let (basis, kind) = if model.k >= 2 {
        let tree = bfs_spanning_tree(&model.graph, root.unwrap_or(0))?;
        (
            theorem1_basis_with(mc.power(), &tree, None)?.basis,
            BasisKind::Theorem1,
        )
    } else {
        (greedy_mcb(mc.graph())?, BasisKind::GreedyMcb)
    };
    let master = kolmogorov_check(&mc, &basis)?;
    let steady_state = steady_state(&mc, mode)?;
    let detailed_balance = detailed_balance_check(&steady_state, &mc);
    let oracles_agree = master.reversible == detailed_balance.balanced;
    Ok(ReversibilityReport {
        k: model.k,
        states: mc.graph().labels().to_vec(),
        single_automaton,
        basis: kind,
        reversible: master.reversible,
        master,
        steady_state,
        detailed_balance,
        oracles_agree,
    })
}
