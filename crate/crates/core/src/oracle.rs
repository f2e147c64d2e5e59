//! Test problems with exact local solutions, error measurement and order fits.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::meshctl::uniform_mesh;
use crate::picard::picard_piece;
use crate::problem::{IvpProblem, Rhs};
use crate::state::StateVector;
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    ClosedForm,
    ReferenceIntegrator,
}

type LocalFn = dyn Fn(f64, &[f64], f64) -> Result<Vec<f64>> + Send + Sync;

/// Exact solution `z_{x,y}(t)` of `z' = f(t, z)`, `z(x) = y`, for `t >= x`.
#[derive(Clone)]
pub struct LocalSolutionOracle {
    kind: OracleKind,
    func: Arc<LocalFn>,
}

impl LocalSolutionOracle {
    pub fn closed_form<F>(func: F) -> Self
    where
        F: Fn(f64, &[f64], f64) -> Result<Vec<f64>> + Send + Sync + 'static,
    {
        Self {
            kind: OracleKind::ClosedForm,
            func: Arc::new(func),
        }
    }

    /// Oracle backed by [`reference_local_solution`] on `problem`'s right-hand side.
    pub fn reference(problem: &IvpProblem, tol: f64, order: usize) -> Self {
        let rhs: Arc<Rhs> = Arc::clone(problem.rhs());
        let (a, b) = (problem.a(), problem.b());
        Self {
            kind: OracleKind::ReferenceIntegrator,
            func: Arc::new(move |x, y, t| {
                let y = StateVector::from_slice(y)?;
                let host = IvpProblem::from_shared(a, b, y.clone(), Arc::clone(&rhs))?;
                reference_local_solution(&host, x, &y, t, tol, order).map(StateVector::into_vec)
            }),
        }
    }

    pub fn kind(&self) -> OracleKind {
        self.kind
    }

    pub fn solve(&self, x: f64, y: &StateVector, t: f64) -> Result<StateVector> {
        if t < x {
            return Err(Error::InvalidArgument(format!(
                "oracle queried backwards: t = {t} < x = {x}"
            )));
        }
        let out = (self.func)(x, y.as_slice(), t)?;
        StateVector::new(out).map_err(|_| {
            Error::OracleFailure(format!(
                "non-finite local solution from ({x}, {y:?}) at t = {t}"
            ))
        })
    }
}

impl fmt::Debug for LocalSolutionOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LocalSolutionOracle")
            .field("kind", &self.kind)
            .finish()
    }
}

/// A named problem paired with its local-solution oracle.
#[derive(Debug)]
pub struct RegistryProblem {
    pub id: String,
    pub problem: IvpProblem,
    pub oracle: LocalSolutionOracle,
    pub note: &'static str,
}

impl RegistryProblem {
    /// Independent copy with its own evaluation counter.
    pub fn fresh(&self) -> Self {
        Self {
            id: self.id.clone(),
            problem: self.problem.fresh(),
            oracle: self.oracle.clone(),
            note: self.note,
        }
    }
}

fn scalar(v: f64) -> StateVector {
    StateVector::new(vec![v]).expect("finite")
}

/// `z' = (3/4)(z - 1)^(-3/2)` on `[0, 1]`, `z(0) = 1 + delta`.
///
/// `f` is undefined for `y <= 1`; evaluating there is a domain violation.
/// The local solution is `((15/8)(t - x) + (y - 1)^(5/2))^(2/5) + 1`.
pub fn make_test_problem(delta: f64) -> Result<RegistryProblem> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let problem = IvpProblem::new(0.0, 1.0, scalar(1.0 + delta), |_t, y, out| {
        out[0] = if y[0] > 1.0 {
            0.75 * (y[0] - 1.0).powf(-1.5)
        } else {
            f64::NAN
        };
    })?;
    let oracle = LocalSolutionOracle::closed_form(|x, y, t| {
        if !(y[0] > 1.0) {
            return Err(Error::OracleFailure(format!(
                "test problem undefined at y = {}",
                y[0]
            )));
        }
        let base = 1.875 * (t - x) + (y[0] - 1.0).powf(2.5);
        Ok(vec![base.powf(0.4) + 1.0])
    });
    Ok(RegistryProblem {
        id: "test".into(),
        problem,
        oracle,
        note: "C-infinity for y > 1; difficulty grows as delta -> 0",
    })
}

/// `z' = lambda z` on `[0, 1]`, `z(0) = 1`.
pub fn exp_problem(lambda: f64) -> RegistryProblem {
    let problem = IvpProblem::new(0.0, 1.0, scalar(1.0), move |_t, y, out| {
        out[0] = lambda * y[0]
    })
    .expect("valid interval");
    let oracle =
        LocalSolutionOracle::closed_form(move |x, y, t| Ok(vec![y[0] * (lambda * (t - x)).exp()]));
    RegistryProblem {
        id: if lambda >= 0.0 {
            "exp".into()
        } else {
            "exp-decay".into()
        },
        problem,
        oracle,
        note: "analytic",
    }
}

/// `z' = (-z_2, z_1)` on `[0, 2 pi]`, `z(0) = (1, 0)`.
pub fn rotation_problem() -> RegistryProblem {
    let eta = StateVector::new(vec![1.0, 0.0]).expect("finite");
    let problem = IvpProblem::new(0.0, 2.0 * PI, eta, |_t, y, out| {
        out[0] = -y[1];
        out[1] = y[0];
    })
    .expect("valid interval");
    let oracle = LocalSolutionOracle::closed_form(|x, y, t| {
        let (s, c) = (t - x).sin_cos();
        Ok(vec![c * y[0] - s * y[1], s * y[0] + c * y[1]])
    });
    RegistryProblem {
        id: "rotation".into(),
        problem,
        oracle,
        note: "analytic, d = 2",
    }
}

/// `z' = z (1 - z)` on `[0, 4]`, `z(0) = 1/2`.
pub fn logistic_problem() -> RegistryProblem {
    let problem = IvpProblem::new(0.0, 4.0, scalar(0.5), |_t, y, out| {
        out[0] = y[0] * (1.0 - y[0])
    })
    .expect("valid interval");
    let oracle = LocalSolutionOracle::closed_form(|x, y, t| {
        let g = (t - x).exp();
        Ok(vec![y[0] * g / (1.0 - y[0] + y[0] * g)])
    });
    RegistryProblem {
        id: "logistic".into(),
        problem,
        oracle,
        note: "analytic for 0 < y < 1",
    }
}

/// `z' = 0` on `[0, 1]`, `z(0) = 1`.
pub fn zero_problem() -> RegistryProblem {
    let problem = IvpProblem::new(0.0, 1.0, scalar(1.0), |_t, _y, out| out.fill(0.0))
        .expect("valid interval");
    let oracle = LocalSolutionOracle::closed_form(|_x, y, _t| Ok(y.to_vec()));
    RegistryProblem {
        id: "zero".into(),
        problem,
        oracle,
        note: "constant solution",
    }
}

/// Identifiers accepted by [`lookup`].
pub const REGISTRY_IDS: [&str; 6] = ["test", "exp", "exp-decay", "rotation", "logistic", "zero"];

/// Every registry problem, the test problem instantiated with `delta`.
pub fn registry(delta: f64) -> Result<Vec<RegistryProblem>> {
    REGISTRY_IDS.iter().map(|id| lookup(id, delta)).collect()
}

pub fn lookup(id: &str, delta: f64) -> Result<RegistryProblem> {
    match id {
        "test" => make_test_problem(delta),
        "exp" => Ok(exp_problem(1.0)),
        "exp-decay" => Ok(exp_problem(-1.0)),
        "rotation" => Ok(rotation_problem()),
        "logistic" => Ok(logistic_problem()),
        "zero" => Ok(zero_problem()),
        other => Err(Error::InvalidArgument(format!(
            "unknown problem '{other}', expected one of {REGISTRY_IDS:?}"
        ))),
    }
}

const MAX_HALVINGS: usize = 24;

/// Solution of the local problem from `(x, y)` at `t`, by successive halving.
///
/// Integrates with the approximate-Picard method of order `min(order + 2, 6)`
/// on uniform substeps, doubling the substep count until two successive
/// answers agree within `tol / 4`; the finer answer is returned.
pub fn reference_local_solution(
    problem: &IvpProblem,
    x: f64,
    y: &StateVector,
    t: f64,
    tol: f64,
    order: usize,
) -> Result<StateVector> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if t < x {
        return Err(Error::InvalidArgument(format!("t = {t} precedes x = {x}")));
    }
    if t == x {
        return Ok(y.clone());
    }
    let local = problem.local(x, t, y.clone())?;
    let q = (order + 2).min(6);
    let march = |n: usize| -> Result<StateVector> {
        let mesh = uniform_mesh(x, t, n)?;
        let mut state = y.clone();
        for w in mesh.windows(2) {
            state = picard_piece(&local, w[0], w[1], &state, q)?.eval(w[1])?;
        }
        Ok(state)
    };

    let mut n = 1;
    let mut previous = march(n).ok();
    for _ in 0..MAX_HALVINGS {
        n *= 2;
        let current = march(n).ok();
        if let (Some(prev), Some(cur)) = (&previous, &current) {
            if cur.distance(prev) <= tol / 4.0 {
                return Ok(current.expect("checked"));
            }
        }
        previous = current;
    }
    Err(Error::OracleFailure(format!(
        "reference solution from x = {x} to t = {t} did not settle within {MAX_HALVINGS} halvings"
    )))
}

/// Endpoint local errors `|z_i(x_{i+1}) - y_{i+1}|` of every step.
pub fn local_errors(trajectory: &Trajectory, oracle: &LocalSolutionOracle) -> Result<Vec<f64>> {
    trajectory
        .steps
        .iter()
        .map(|s| Ok(oracle.solve(s.x, &s.y, s.x_next)?.distance(&s.y_next)))
        .collect()
}

/// Largest endpoint local error over all steps.
///
/// With `sample_interior`, each piece is also compared with the local
/// solution at 8 interior points to approximate the sup over the interval.
pub fn max_local_error(
    trajectory: &Trajectory,
    oracle: &LocalSolutionOracle,
    sample_interior: bool,
) -> Result<f64> {
    let mut worst = local_errors(trajectory, oracle)?
        .into_iter()
        .fold(0.0, f64::max);
    if sample_interior {
        for (s, piece) in trajectory.steps.iter().zip(&trajectory.pieces) {
            for k in 1..=8 {
                let t = s.x + (s.x_next - s.x) * (k as f64 / 9.0);
                let e = oracle.solve(s.x, &s.y, t)?.distance(&piece.eval(t)?);
                worst = worst.max(e);
            }
        }
    }
    Ok(worst)
}

/// Least-squares slope of `ln(error)` against `ln(scale)`.
///
/// Samples with non-positive or non-finite entries are dropped; at least
/// three must remain.
pub fn empirical_order(samples: &[(f64, f64)]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(s, e)| *s > 0.0 && *e > 0.0 && s.is_finite() && e.is_finite())
        .map(|(s, e)| (s.ln(), e.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 usable samples, got {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("all scales are equal".into()));
    }
    Ok(sxy / sxx)
}
