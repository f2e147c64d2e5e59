//! The approximate-Picard one-step method.
//!
//! On `[x_i, x_end]` the method starts from the constant iterate `y_i` and
//! performs `r + 1` sweeps. Each sweep samples `g(t) = f(t, l_j(t))` at `r`
//! equidistant nodes (the single node `x_i` when `r = 1`), interpolates with
//! a polynomial of degree `r - 1` and integrates it from `(x_i, y_i)`. The last
//! iterate has degree `r` and costs `r (r + 1)` evaluations of `f`.

use crate::config::MAX_ORDER;
use crate::error::{Error, Result};
use crate::interp::{equidistant_nodes, integrate_from, interpolate, LocalPolynomial};
use crate::problem::IvpProblem;
use crate::state::{StateVector, UNIT_ROUNDOFF};
use crate::trajectory::PolynomialPiece;

/// Right-hand side evaluations per local step: `r (r + 1)`.
pub fn picard_evals(order: usize) -> u64 {
    (order * (order + 1)) as u64
}

/// The method on `[x_i, x_end]`.
pub fn picard_piece(
    problem: &IvpProblem,
    x_i: f64,
    x_end: f64,
    y_i: &StateVector,
    order: usize,
) -> Result<PolynomialPiece> {
    if !(1..=MAX_ORDER).contains(&order) {
        return Err(Error::InvalidArgument(format!(
            "order {order} outside 1..={MAX_ORDER}"
        )));
    }
    if y_i.dim() != problem.dim() {
        return Err(Error::InvalidArgument("dimension mismatch".into()));
    }
    let (a, b) = (problem.a(), problem.b());
    if !(x_i < x_end) || x_end > b + 10.0 * UNIT_ROUNDOFF * (b - a) {
        return Err(Error::InvalidArgument(format!(
            "step [{x_i}, {x_end}] not inside [{a}, {b}]"
        )));
    }

    let nodes = equidistant_nodes(x_i, x_end, order)?;
    let mut iterate = LocalPolynomial::constant(x_i, y_i.as_slice());
    for _ in 0..=order {
        let samples = nodes
            .iter()
            .map(|&t| problem.eval(t, &iterate.eval(t)))
            .collect::<Result<Vec<_>>>()?;
        let q = interpolate(&nodes, &samples)?;
        iterate = integrate_from(&q, x_i, y_i)?;
    }
    PolynomialPiece::from_local(iterate, x_end)
}

/// The method on `[x_i, x_i + h]`.
pub fn picard_local_step(
    problem: &IvpProblem,
    x_i: f64,
    y_i: &StateVector,
    h: f64,
    order: usize,
) -> Result<PolynomialPiece> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step {h} must be positive")));
    }
    picard_piece(problem, x_i, x_i + h, y_i, order)
}
