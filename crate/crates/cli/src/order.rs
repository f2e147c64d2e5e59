//! Empirical convergence-order fits.

use adaptmesh::oracle::{empirical_order, RegistryProblem};
use adaptmesh::{
    adapt_mesh_solve, fixed_mesh_solve, picard_local_step, uniform_mesh, Error, PicardMethod,
    Result, SolverConfig,
};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// One step from `a` of length `(b - a) / m`; endpoint defect against `h`.
    Local,
    /// Uniform mesh with `m` intervals; endpoint global error at `b` against `h`.
    Global,
    /// Adaptive solve; `m*` against `1 / eps`.
    MeshScaling,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderFit {
    pub order: usize,
    /// `(scale, error)` pairs in input order.
    pub samples: Vec<(f64, f64)>,
    pub slope: f64,
}

/// Fits one slope per order. `scales` holds interval counts for the local and
/// global modes and tolerances for mesh scaling.
pub fn order_check(
    reg: &RegistryProblem,
    mode: Mode,
    orders: &[usize],
    scales: &[f64],
    base: &SolverConfig,
) -> Result<Vec<OrderFit>> {
    if scales.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 scales, got {}",
            scales.len()
        )));
    }
    let p = &reg.problem;
    let (a, b) = (p.a(), p.b());
    let count = |s: f64| -> Result<usize> {
        if s >= 1.0 && s.fract() == 0.0 {
            Ok(s as usize)
        } else {
            Err(Error::InvalidArgument(format!(
                "interval count must be a positive integer, got {s}"
            )))
        }
    };
    orders
        .iter()
        .map(|&r| {
            let samples = scales
                .iter()
                .map(|&s| -> Result<(f64, f64)> {
                    match mode {
                        Mode::Local => {
                            let h = (b - a) / count(s)? as f64;
                            let piece = picard_local_step(p, a, p.eta(), h, r)?;
                            let exact = reg.oracle.solve(a, p.eta(), a + h)?;
                            Ok((h, exact.distance(&piece.eval(a + h)?)))
                        }
                        Mode::Global => {
                            let m = count(s)?;
                            let traj = fixed_mesh_solve(
                                &PicardMethod::new(r),
                                p,
                                &uniform_mesh(a, b, m)?,
                            )?;
                            let exact = reg.oracle.solve(a, p.eta(), b)?;
                            Ok(((b - a) / m as f64, exact.distance(traj.final_value())))
                        }
                        Mode::MeshScaling => {
                            let cfg = SolverConfig {
                                epsilon: s,
                                order: r,
                                ..base.clone()
                            };
                            Ok((1.0 / s, adapt_mesh_solve(p, &cfg)?.intervals() as f64))
                        }
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let slope = empirical_order(&samples)?;
            Ok(OrderFit {
                order: r,
                samples,
                slope,
            })
        })
        .collect()
}
