//! Reproduction of the adaptive-vs-uniform comparison table.

use std::io::{Read, Write};
use std::time::Instant;

use adaptmesh::oracle::{self, local_errors, max_local_error};
use adaptmesh::picard::picard_evals;
use adaptmesh::{
    adapt_mesh_solve, fixed_mesh_solve, uniform_mesh, PicardMethod, Result, SolverConfig,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const HEADER: [&str; 9] = [
    "delta",
    "eps",
    "r",
    "m_star",
    "maxerr_over_eps",
    "equidist_over_eps",
    "f_evals_adaptive",
    "f_evals_uniform",
    "wall_time_ms",
];

/// One `(delta, eps, r)` cell. A failed cell has `m_star == 0` and NaN ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub delta: f64,
    #[serde(rename = "eps")]
    pub epsilon: f64,
    pub r: usize,
    pub m_star: usize,
    pub maxerr_over_eps: f64,
    pub equidist_over_eps: f64,
    pub f_evals_adaptive: u64,
    pub f_evals_uniform: u64,
    pub wall_time_ms: f64,
}

impl TableRow {
    pub fn failed(delta: f64, epsilon: f64, r: usize, wall_time_ms: f64) -> Self {
        TableRow {
            delta,
            epsilon,
            r,
            m_star: 0,
            maxerr_over_eps: f64::NAN,
            equidist_over_eps: f64::NAN,
            f_evals_adaptive: 0,
            f_evals_uniform: 0,
            wall_time_ms,
        }
    }

    pub fn is_failed(&self) -> bool {
        self.m_star == 0
    }

    /// Equality of everything except the timing column. NaN sentinels compare equal.
    pub fn same_values(&self, other: &TableRow) -> bool {
        let eq = |a: f64, b: f64| a.to_bits() == b.to_bits() || a == b;
        eq(self.delta, other.delta)
            && eq(self.epsilon, other.epsilon)
            && self.r == other.r
            && self.m_star == other.m_star
            && eq(self.maxerr_over_eps, other.maxerr_over_eps)
            && eq(self.equidist_over_eps, other.equidist_over_eps)
            && self.f_evals_adaptive == other.f_evals_adaptive
            && self.f_evals_uniform == other.f_evals_uniform
    }
}

/// Everything a cell needs besides `(delta, eps, r)`.
#[derive(Debug, Clone)]
pub struct TableSpec {
    pub problem: String,
    pub deltas: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub orders: Vec<usize>,
    /// Template configuration; `epsilon` and `order` are overwritten per cell.
    pub config: SolverConfig,
}

/// Adaptive solve, then the same method on the uniform mesh with as many intervals.
pub fn compute_cell(
    problem_id: &str,
    delta: f64,
    base: &SolverConfig,
    epsilon: f64,
    r: usize,
) -> Result<TableRow> {
    let start = Instant::now();
    let reg = oracle::lookup(problem_id, delta)?;
    let cfg = SolverConfig {
        epsilon,
        order: r,
        ..base.clone()
    };
    let traj = adapt_mesh_solve(&reg.problem, &cfg)?;
    let m = traj.intervals();
    let maxerr = max_local_error(&traj, &reg.oracle, false)?;

    let mesh = uniform_mesh(reg.problem.a(), reg.problem.b(), m)?;
    let method = PicardMethod::for_config(&cfg);
    let uniform = fixed_mesh_solve(&method, &reg.problem, &mesh)?;
    let equidist = local_errors(&uniform, &reg.oracle)?
        .into_iter()
        .fold(0.0, f64::max);

    Ok(TableRow {
        delta,
        epsilon,
        r,
        m_star: m,
        maxerr_over_eps: maxerr / epsilon,
        equidist_over_eps: equidist / epsilon,
        f_evals_adaptive: traj.f_evals,
        f_evals_uniform: picard_evals(r) * m as u64,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Runs every cell on a pool of `jobs` threads. Rows come back sorted by
/// `(delta, eps, r)`; failures are paired with their error.
pub fn run_table(spec: &TableSpec, jobs: usize) -> Vec<(TableRow, Option<adaptmesh::Error>)> {
    let mut cells = Vec::new();
    for &delta in &spec.deltas {
        for &eps in &spec.epsilons {
            for &r in &spec.orders {
                cells.push((delta, eps, r));
            }
        }
    }
    let run = || -> Vec<_> {
        cells
            .par_iter()
            .map(|&(delta, eps, r)| {
                let start = Instant::now();
                match compute_cell(&spec.problem, delta, &spec.config, eps, r) {
                    Ok(row) => (row, None),
                    Err(e) => (
                        TableRow::failed(delta, eps, r, start.elapsed().as_secs_f64() * 1e3),
                        Some(e),
                    ),
                }
            })
            .collect()
    };
    let mut rows = match rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
    {
        Ok(pool) => pool.install(run),
        Err(_) => run(),
    };
    rows.sort_by(|a, b| {
        a.0.delta
            .total_cmp(&b.0.delta)
            .then(a.0.epsilon.total_cmp(&b.0.epsilon))
            .then(a.0.r.cmp(&b.0.r))
    });
    rows
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes the header and one record per row, reals with 17 significant digits.
pub fn write_csv<W: Write>(out: W, rows: &[TableRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for row in rows {
        w.write_record([
            num(row.delta),
            num(row.epsilon),
            row.r.to_string(),
            row.m_star.to_string(),
            num(row.maxerr_over_eps),
            num(row.equidist_over_eps),
            row.f_evals_adaptive.to_string(),
            row.f_evals_uniform.to_string(),
            num(row.wall_time_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> csv::Result<Vec<TableRow>> {
    csv::Reader::from_reader(input).deserialize().collect()
}
