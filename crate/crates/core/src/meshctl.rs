//! Local-coefficient estimation and mesh selection.
//!
//! Each adaptive step probes `[x_i, bar_x]` with an auxiliary approximation
//! `l_bar`, forms the order-`r` divided difference of `t -> f(t, l_bar(t))`
//! over `r + 1` equidistant nodes and turns its norm into a coefficient `G_i`
//! with `local error <= G_i h^(r+1)`. The next mesh point solves
//! `G_i h^(r+1) = eps`. There is no rejection loop: every predicted step is
//! taken.

use crate::config::{SolverConfig, MAX_ORDER};
use crate::error::{Error, Result};
use crate::interp::{divided_difference, equidistant_nodes};
use crate::picard::{picard_evals, picard_piece};
use crate::problem::IvpProblem;
use crate::state::{StateVector, UNIT_ROUNDOFF};
use crate::trajectory::{PolynomialPiece, StepRecord, Trajectory};

/// A one-step method usable by the generic controller.
///
/// The local error on `[x_i, x_next]` is assumed bounded by
/// `bar_beta * (sup |z_i^(r+1)| / r! + beta) * h^(r+1)` for fine enough meshes.
pub trait OneStepMethod {
    fn order(&self) -> usize;
    fn bar_beta(&self) -> f64;
    fn beta(&self) -> f64;
    /// Evaluations of `f` needed for one step on a given mesh.
    fn evals_per_step(&self) -> u64;
    /// Dense approximation on `[x_i, x_next]` anchored at `(x_i, y_i)`.
    fn step(
        &self,
        problem: &IvpProblem,
        x_i: f64,
        x_next: f64,
        y_i: &StateVector,
    ) -> Result<PolynomialPiece>;
}

/// The approximate-Picard method wrapped as a [`OneStepMethod`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardMethod {
    order: usize,
    bar_beta: f64,
    beta: f64,
}

impl PicardMethod {
    /// `bar_beta = 2`, `beta = 1`.
    pub fn new(order: usize) -> Self {
        Self::with_constants(order, 2.0, 1.0)
    }

    pub fn with_constants(order: usize, bar_beta: f64, beta: f64) -> Self {
        Self {
            order,
            bar_beta,
            beta,
        }
    }

    /// Constants the built-in controller uses for `cfg`.
    pub fn for_config(cfg: &SolverConfig) -> Self {
        Self::with_constants(cfg.order, cfg.effective_bar_beta(), cfg.beta)
    }
}

impl OneStepMethod for PicardMethod {
    fn order(&self) -> usize {
        self.order
    }

    fn bar_beta(&self) -> f64 {
        self.bar_beta
    }

    fn beta(&self) -> f64 {
        self.beta
    }

    fn evals_per_step(&self) -> u64 {
        picard_evals(self.order)
    }

    fn step(
        &self,
        problem: &IvpProblem,
        x_i: f64,
        x_next: f64,
        y_i: &StateVector,
    ) -> Result<PolynomialPiece> {
        picard_piece(problem, x_i, x_next, y_i, self.order)
    }
}

/// Raw evaluations per adaptive step of the built-in method: `2r^2 + 3r + 1`.
pub fn adaptive_evals_per_step(order: usize) -> u64 {
    2 * picard_evals(order) + order as u64 + 1
}

/// `x_i + min(h(eps), b - x_i)`.
pub fn auxiliary_point(x_i: f64, a: f64, b: f64, cfg: &SolverConfig) -> Result<f64> {
    if !(x_i < b) {
        return Err(Error::InvalidArgument(format!(
            "x_i = {x_i} must be below b = {b}"
        )));
    }
    let probe = cfg.aux_step_rule.length(cfg.epsilon, cfg.order);
    let gap = probe.min(b - x_i);
    let floor = 10.0 * UNIT_ROUNDOFF * (b - a);
    if !(gap >= floor) {
        return Err(Error::StepTooSmall {
            x: x_i,
            step: gap,
            min: floor,
        });
    }
    Ok(if probe >= b - x_i { b } else { x_i + probe })
}

/// Max norm of `f(t, l_bar(t))[t_0, ..., t_r]` over `r + 1` equidistant
/// nodes of `[x_i, bar_x]`; costs `r + 1` evaluations.
fn probe_divided_difference(
    problem: &IvpProblem,
    aux: &PolynomialPiece,
    x_i: f64,
    bar_x: f64,
    order: usize,
) -> Result<f64> {
    let nodes = equidistant_nodes(x_i, bar_x, order + 1)?;
    let samples = nodes
        .iter()
        .map(|&t| problem.eval(t, aux.eval(t)?.as_slice()))
        .collect::<Result<Vec<_>>>()?;
    let dd = divided_difference(&nodes, &samples)?;
    Ok(dd.norm())
}

/// `(G_i, |dd|)` for the step starting at `(x_i, y_i)`, probing `[x_i, bar_x]`
/// with `method` and using its declared `bar_beta` and `beta`.
pub fn local_coefficient(
    problem: &IvpProblem,
    x_i: f64,
    y_i: &StateVector,
    bar_x: f64,
    method: &dyn OneStepMethod,
    cfg: &SolverConfig,
) -> Result<(f64, f64)> {
    let aux = method.step(problem, x_i, bar_x, y_i)?;
    let dd_norm = probe_divided_difference(problem, &aux, x_i, bar_x, method.order())?;
    let g = cfg
        .preset
        .coefficient(dd_norm, method.bar_beta(), method.beta(), cfg.varphi);
    if !g.is_finite() {
        return Err(Error::NonFiniteValue);
    }
    Ok((g, dd_norm))
}

/// Adaptive mesh selection with the built-in approximate-Picard method.
pub fn adapt_mesh_solve(problem: &IvpProblem, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let order = cfg.order;
    let bar_beta = cfg.effective_bar_beta();
    drive(
        problem,
        cfg,
        |x, y, bar_x| {
            let aux = picard_piece(problem, x, bar_x, y, order)?;
            let dd_norm = probe_divided_difference(problem, &aux, x, bar_x, order)?;
            let g = cfg
                .preset
                .coefficient(dd_norm, bar_beta, cfg.beta, cfg.varphi);
            if g.is_finite() {
                Ok((g, dd_norm))
            } else {
                Err(Error::NonFiniteValue)
            }
        },
        |x, x_next, y| picard_piece(problem, x, x_next, y, order),
    )
}

/// Adaptive mesh selection for an arbitrary [`OneStepMethod`].
///
/// `cfg.order` must equal the method's order; `bar_beta` and `beta` come
/// from the method.
pub fn adapt_mesh_gen_solve(
    method: &dyn OneStepMethod,
    problem: &IvpProblem,
    cfg: &SolverConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    if method.order() != cfg.order {
        return Err(Error::InvalidArgument(format!(
            "method order {} differs from configured order {}",
            method.order(),
            cfg.order
        )));
    }
    drive(
        problem,
        cfg,
        |x, y, bar_x| local_coefficient(problem, x, y, bar_x, method, cfg),
        |x, x_next, y| method.step(problem, x, x_next, y),
    )
}

fn drive<P, A>(
    problem: &IvpProblem,
    cfg: &SolverConfig,
    mut predict: P,
    mut advance: A,
) -> Result<Trajectory>
where
    P: FnMut(f64, &StateVector, f64) -> Result<(f64, f64)>,
    A: FnMut(f64, f64, &StateVector) -> Result<PolynomialPiece>,
{
    let (a, b) = (problem.a(), problem.b());
    let min_step = cfg.effective_min_step(a, b);
    let exponent = 1.0 / (cfg.order as f64 + 1.0);

    problem.reset_evals();
    problem.track_distinct(true);
    let result = (|| {
        let mut x = a;
        let mut y = problem.eta().clone();
        let mut mesh = vec![a];
        let mut steps = Vec::new();
        let mut pieces = Vec::new();
        let mut distinct_total = 0;

        while x < b {
            if steps.len() as u64 >= cfg.max_steps {
                return Err(Error::MaxStepsExceeded(cfg.max_steps));
            }
            let evals_before = problem.evals();
            let bar_x = auxiliary_point(x, a, b, cfg)?;
            let (g, dd_norm) = predict(x, &y, bar_x)?;

            let h_ctrl = (cfg.epsilon / g).powf(exponent);
            if !(h_ctrl >= min_step) {
                return Err(Error::StepTooSmall {
                    x,
                    step: h_ctrl,
                    min: min_step,
                });
            }
            let remaining = b - x;
            let (x_next, h) = if h_ctrl >= remaining {
                (b, remaining)
            } else {
                let candidate = x + h_ctrl;
                if candidate <= x {
                    return Err(Error::StepTooSmall {
                        x,
                        step: h_ctrl,
                        min: min_step,
                    });
                }
                // A sliver shorter than min_step is absorbed into this step.
                if b - candidate < min_step {
                    (b, remaining)
                } else {
                    (candidate, h_ctrl)
                }
            };

            let piece = advance(x, x_next, &y)?;
            let y_next = piece.eval(x_next)?;
            let distinct = problem.take_distinct();
            distinct_total += distinct;
            steps.push(StepRecord {
                i: steps.len(),
                x,
                x_next,
                h,
                bar_x: Some(bar_x),
                g: Some(g),
                dd_norm: Some(dd_norm),
                f_evals: problem.evals() - evals_before,
                f_evals_distinct: distinct,
                y,
                y_next: y_next.clone(),
            });
            pieces.push(piece);
            mesh.push(x_next);
            x = x_next;
            y = y_next;
        }

        Ok(Trajectory {
            order: cfg.order,
            mesh,
            steps,
            pieces,
            f_evals: problem.evals(),
            f_evals_distinct: distinct_total,
        })
    })();
    problem.track_distinct(false);
    result
}

/// `a + i (b - a) / m` for `i = 0..=m`, with the last point exactly `b`.
pub fn uniform_mesh(a: f64, b: f64, m: usize) -> Result<Vec<f64>> {
    if m == 0 || !(a < b) {
        return Err(Error::InvalidArgument(
            "uniform mesh needs m >= 1 and a < b".into(),
        ));
    }
    let mut mesh: Vec<f64> = (0..=m)
        .map(|i| a + (b - a) * (i as f64 / m as f64))
        .collect();
    mesh[m] = b;
    Ok(mesh)
}

/// Drives `method` across a prescribed mesh `a = x_0 < ... < x_m = b`.
pub fn fixed_mesh_solve(
    method: &dyn OneStepMethod,
    problem: &IvpProblem,
    mesh: &[f64],
) -> Result<Trajectory> {
    let (a, b) = (problem.a(), problem.b());
    if mesh.len() < 2 || mesh[0] != a || mesh[mesh.len() - 1] != b {
        return Err(Error::InvalidArgument(format!(
            "mesh must run from {a} to {b}"
        )));
    }
    if mesh.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument(
            "mesh must be strictly increasing".into(),
        ));
    }
    if method.order() > MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "order {} too large",
            method.order()
        )));
    }

    problem.reset_evals();
    problem.track_distinct(true);
    let result = (|| {
        let mut y = problem.eta().clone();
        let mut steps = Vec::with_capacity(mesh.len() - 1);
        let mut pieces = Vec::with_capacity(mesh.len() - 1);
        let mut distinct_total = 0;
        for (i, w) in mesh.windows(2).enumerate() {
            let (x, x_next) = (w[0], w[1]);
            let before = problem.evals();
            let piece = method.step(problem, x, x_next, &y)?;
            let y_next = piece.eval(x_next)?;
            let distinct = problem.take_distinct();
            distinct_total += distinct;
            steps.push(StepRecord {
                i,
                x,
                x_next,
                h: x_next - x,
                bar_x: None,
                g: None,
                dd_norm: None,
                f_evals: problem.evals() - before,
                f_evals_distinct: distinct,
                y,
                y_next: y_next.clone(),
            });
            pieces.push(piece);
            y = y_next;
        }
        Ok(Trajectory {
            order: method.order(),
            mesh: mesh.to_vec(),
            steps,
            pieces,
            f_evals: problem.evals(),
            f_evals_distinct: distinct_total,
        })
    })();
    problem.track_distinct(false);
    result
}
