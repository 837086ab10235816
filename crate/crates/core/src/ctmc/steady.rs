use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::master::MasterChain;
use crate::error::{Error, Result};

pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
pub const BALANCE_TOLERANCE: f64 = 1e-9;
pub const EXACT_STATE_LIMIT: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMode {
    Float,
    Exact,
}

#[derive(Clone, Debug, Serialize)]
pub struct SteadyState {
    pub mode: SolveMode,
    pub probabilities: Vec<f64>,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "ser_opt_rationals"
    )]
    pub exact: Option<Vec<BigRational>>,
    /// Max-norm of `pi Q`.
    pub residual: f64,
    /// `|sum(pi) - 1|`.
    pub normalization_error: f64,
}

fn ser_opt_rationals<S: serde::Serializer>(
    v: &Option<Vec<BigRational>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let strings: Option<Vec<String>> = v
        .as_ref()
        .map(|v| v.iter().map(|q| q.to_string()).collect());
    serde::Serialize::serialize(&strings, s)
}

#[derive(Clone, Debug, Serialize)]
pub struct BalanceViolation {
    pub from: String,
    pub to: String,
    /// `pi_x rate(x -> y)` and `pi_y rate(y -> x)`.
    pub forward_flux: f64,
    pub backward_flux: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BalanceReport {
    pub balanced: bool,
    pub violations: Vec<BalanceViolation>,
}

/// Solves `pi Q = 0`, `sum pi = 1`.
pub fn steady_state(mc: &MasterChain, mode: SolveMode) -> Result<SteadyState> {
    match mode {
        SolveMode::Float => float_solve(mc),
        SolveMode::Exact => exact_solve(mc),
    }
}

fn residuals(mc: &MasterChain, pi: &[f64]) -> (f64, f64) {
    let n = mc.state_count();
    let mut flow = vec![0.0; n];
    for t in mc.transitions() {
        let r = t.rate.to_f64().unwrap_or(f64::INFINITY);
        flow[t.to] += pi[t.from] * r;
        flow[t.from] -= pi[t.from] * r;
    }
    let residual = flow.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    (residual, (pi.iter().sum::<f64>() - 1.0).abs())
}

fn float_solve(mc: &MasterChain) -> Result<SteadyState> {
    let n = mc.state_count();
    let q = mc.generator_f64();
    let mut a = DMatrix::from_fn(n, n, |i, j| q[j][i]);
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Numerical("singular steady-state system".into()))?;
    let pi: Vec<f64> = x.iter().copied().collect();
    let (residual, normalization_error) = residuals(mc, &pi);
    if !(residual <= RESIDUAL_TOLERANCE && normalization_error <= RESIDUAL_TOLERANCE) {
        return Err(Error::Numerical(format!(
            "steady-state residual {residual:e} exceeds {RESIDUAL_TOLERANCE:e}"
        )));
    }
    if let Some(p) = pi.iter().find(|&&p| p < -RESIDUAL_TOLERANCE) {
        return Err(Error::Numerical(format!("negative probability {p:e}")));
    }
    log::debug!("float steady state: residual {residual:e}");
    Ok(SteadyState {
        mode: SolveMode::Float,
        probabilities: pi,
        exact: None,
        residual,
        normalization_error,
    })
}

fn exact_solve(mc: &MasterChain) -> Result<SteadyState> {
    let n = mc.state_count();
    if n > EXACT_STATE_LIMIT {
        return Err(Error::Numerical(format!(
            "exact solve limited to {EXACT_STATE_LIMIT} states, chain has {n}"
        )));
    }
    // augmented system [Q^T with last row of ones | e_n]
    let mut m = vec![vec![BigRational::zero(); n + 1]; n];
    for t in mc.transitions() {
        m[t.to][t.from] += &t.rate;
        m[t.from][t.from] -= &t.rate;
    }
    for x in m[n - 1].iter_mut() {
        *x = BigRational::one();
    }
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .ok_or_else(|| Error::Numerical("singular steady-state system".into()))?;
        m.swap(col, pivot);
        let inv = m[col][col].recip();
        for x in m[col].iter_mut().skip(col) {
            *x *= &inv;
        }
        let pivot_row = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(col) {
                *x -= &factor * p;
            }
        }
    }
    let exact: Vec<BigRational> = m.into_iter().map(|row| row[n].clone()).collect();
    for x in 0..n {
        let mut flow = BigRational::zero();
        for &y in mc.graph().neighbors(x) {
            flow += &exact[y] * mc.rate(y, x).expect("stored");
            flow -= &exact[x] * mc.rate(x, y).expect("stored");
        }
        if !flow.is_zero() {
            return Err(Error::Numerical("exact solution fails pi Q = 0".into()));
        }
        if exact[x].is_negative() {
            return Err(Error::Numerical("negative exact probability".into()));
        }
    }
    let probabilities: Vec<f64> = exact
        .iter()
        .map(|q| q.to_f64().unwrap_or(f64::NAN))
        .collect();
    let (residual, normalization_error) = residuals(mc, &probabilities);
    Ok(SteadyState {
        mode: SolveMode::Exact,
        probabilities,
        exact: Some(exact),
        residual,
        normalization_error,
    })
}

/// Checks `pi_x rate(x -> y) = pi_y rate(y -> x)` on every edge: exactly when
/// an exact solution is available, otherwise to relative tolerance.
pub fn detailed_balance_check(ss: &SteadyState, mc: &MasterChain) -> BalanceReport {
    let g = mc.graph();
    let mut violations = Vec::new();
    for &(x, y) in g.edges() {
        let (rxy, ryx) = (
            mc.rate(x, y).expect("stored"),
            mc.rate(y, x).expect("stored"),
        );
        let ok = match &ss.exact {
            Some(pi) => &pi[x] * rxy == &pi[y] * ryx,
            None => {
                let f = ss.probabilities[x] * rxy.to_f64().unwrap_or(f64::NAN);
                let b = ss.probabilities[y] * ryx.to_f64().unwrap_or(f64::NAN);
                (f - b).abs() <= BALANCE_TOLERANCE * f.abs().max(b.abs())
            }
        };
        if !ok {
            violations.push(BalanceViolation {
                from: g.label(x).to_string(),
                to: g.label(y).to_string(),
                forward_flux: ss.probabilities[x] * rxy.to_f64().unwrap_or(f64::NAN),
                backward_flux: ss.probabilities[y] * ryx.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    BalanceReport {
        balanced: violations.is_empty(),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctmc::master::build_master;
    use crate::ctmc::model::ring_model;
    use crate::ctmc::rates::RateSpec;
    use crate::graph::Graph;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn two_state_closed_form() {
        let g = Graph::path(2);
        let mut spec = RateSpec::new(&g);
        spec.set_constant(&g, 0, 1, r(3)).unwrap();
        spec.set_constant(&g, 1, 0, r(5)).unwrap();
        let mc = build_master(&g, 1, &spec).unwrap();
        let ss = steady_state(&mc, SolveMode::Exact).unwrap();
        let pi = ss.exact.unwrap();
        assert_eq!(pi[0], BigRational::new(5.into(), 8.into()));
        assert_eq!(pi[1], BigRational::new(3.into(), 8.into()));
        let fl = steady_state(&mc, SolveMode::Float).unwrap();
        assert!((fl.probabilities[0] - 0.625).abs() < 1e-12);
    }

    #[test]
    fn symmetric_ring_is_uniform() {
        let (g, spec) = ring_model(r(1), r(1), r(1), std::array::from_fn(|_| r(0)));
        let mc = build_master(&g, 1, &spec).unwrap();
        let ss = steady_state(&mc, SolveMode::Exact).unwrap();
        assert!(ss
            .exact
            .unwrap()
            .iter()
            .all(|p| *p == BigRational::new(1.into(), 5.into())));
    }

    #[test]
    fn balance_agrees_between_modes() {
        for (lambda, c) in [
            (32, [0, 0, 0, 0, 0]),
            (30, [1, 1, 1, 1, 1]),
            (32, [1, 1, 2, 1, 1]),
        ] {
            let (g, spec) = ring_model(r(lambda), r(1), r(2), c.map(r));
            let mc = build_master(&g, 3, &spec).unwrap();
            let fl = steady_state(&mc, SolveMode::Float).unwrap();
            let ex = steady_state(&mc, SolveMode::Exact).unwrap();
            assert!(fl.residual <= RESIDUAL_TOLERANCE);
            for (a, b) in fl.probabilities.iter().zip(&ex.probabilities) {
                assert!((a - b).abs() < 1e-12);
            }
            let expect = c[1] == c[2];
            assert_eq!(detailed_balance_check(&fl, &mc).balanced, expect);
            assert_eq!(detailed_balance_check(&ex, &mc).balanced, expect);
        }
    }

    #[test]
    fn irreversible_ring_has_violations() {
        let (g, spec) = ring_model(r(1), r(1), r(2), std::array::from_fn(|_| r(0)));
        let mc = build_master(&g, 1, &spec).unwrap();
        let ss = steady_state(&mc, SolveMode::Float).unwrap();
        let rep = detailed_balance_check(&ss, &mc);
        assert_eq!(rep.violations.len(), 5);
    }
}
