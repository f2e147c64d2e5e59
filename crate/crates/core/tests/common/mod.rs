#![allow(dead_code)]

use adaptmesh::interp::{equidistant_nodes, interpolate};
use adaptmesh::oracle::LocalSolutionOracle;
use adaptmesh::{IvpProblem, OneStepMethod, PolynomialPiece, Result, StateVector, Trajectory};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn sv(v: &[f64]) -> StateVector {
    StateVector::from_slice(v).unwrap()
}

/// Interpolates the exact local solution at `r + 1` equidistant nodes.
pub struct ExactStepper {
    pub order: usize,
    pub oracle: LocalSolutionOracle,
}

impl OneStepMethod for ExactStepper {
    fn order(&self) -> usize {
        self.order
    }
    fn bar_beta(&self) -> f64 {
        2.0
    }
    fn beta(&self) -> f64 {
        1.0
    }
    fn evals_per_step(&self) -> u64 {
        0
    }
    fn step(
        &self,
        _p: &IvpProblem,
        x_i: f64,
        x_next: f64,
        y_i: &StateVector,
    ) -> Result<PolynomialPiece> {
        let nodes = equidistant_nodes(x_i, x_next, self.order + 1)?;
        let values = nodes
            .iter()
            .map(|&t| self.oracle.solve(x_i, y_i, t))
            .collect::<Result<Vec<_>>>()?;
        let mut poly = interpolate(&nodes, &values)?;
        poly.coeffs[0] = y_i.as_slice().to_vec();
        PolynomialPiece::from_local(poly, x_next)
    }
}

/// Degree-`r` Taylor polynomial for `y' = y`: coefficients `y_i / k!`.
pub struct ExpTaylor {
    pub order: usize,
}

impl OneStepMethod for ExpTaylor {
    fn order(&self) -> usize {
        self.order
    }
    fn bar_beta(&self) -> f64 {
        2.0
    }
    fn beta(&self) -> f64 {
        1.0
    }
    fn evals_per_step(&self) -> u64 {
        0
    }
    fn step(
        &self,
        _p: &IvpProblem,
        x_i: f64,
        x_next: f64,
        y_i: &StateVector,
    ) -> Result<PolynomialPiece> {
        let mut fact = 1.0;
        let coeffs = (0..=self.order)
            .map(|k| {
                if k > 0 {
                    fact *= k as f64;
                }
                y_i.as_slice().iter().map(|v| v / fact).collect()
            })
            .collect();
        Ok(PolynomialPiece {
            start: x_i,
            end: x_next,
            coeffs,
        })
    }
}

/// Checks `G_i h_i^(r+1) = eps` on all but the last step and `<= eps` on the last.
pub fn step_equation_deviation(traj: &Trajectory, eps: f64) -> (f64, f64) {
    let p = traj.order as i32 + 1;
    let m = traj.steps.len();
    let mut worst = 0.0f64;
    for s in &traj.steps[..m - 1] {
        let lhs = s.g.unwrap() * s.h.powi(p);
        worst = worst.max((lhs - eps).abs() / eps);
    }
    let last = &traj.steps[m - 1];
    (worst, last.g.unwrap() * last.h.powi(p) / eps)
}

/// Random distinct nodes in [-2, 2] with gaps of at least 0.05.
pub fn random_nodes(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let nodes: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let ok = (0..n).all(|i| (0..i).all(|j| (nodes[i] - nodes[j]).abs() >= 0.05));
        if ok {
            return nodes;
        }
    }
}

/// Monomial coefficients of the interpolant, from `V c = values`.
pub fn vandermonde_coefficients(nodes: &[f64], values: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let v = DMatrix::from_fn(n, n, |i, j| nodes[i].powi(j as i32));
    let rhs = DVector::from_column_slice(values);
    v.lu()
        .solve(&rhs)
        .expect("distinct nodes")
        .iter()
        .copied()
        .collect()
}

/// Independently coded explicit Euler on a mesh.
pub fn euler(p: &IvpProblem, mesh: &[f64]) -> Vec<Vec<f64>> {
    let rhs = p.rhs();
    let mut y = p.eta().as_slice().to_vec();
    let mut out = vec![y.clone()];
    for w in mesh.windows(2) {
        let h = w[1] - w[0];
        let mut f = vec![0.0; y.len()];
        rhs(w[0], &y, &mut f);
        for (yk, fk) in y.iter_mut().zip(&f) {
            *yk += h * fk;
        }
        out.push(y.clone());
    }
    out
}
