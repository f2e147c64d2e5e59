//! Trajectory files.

use std::io::Write;

use adaptmesh::{PolynomialPiece, SolverConfig, StepRecord, Trajectory};
use serde::Serialize;

/// JSON document for one solve: enough to replay any step from the file alone.
#[derive(Debug, Serialize)]
pub struct TrajectoryDoc<'a> {
    pub problem: &'a str,
    pub order: usize,
    pub config: &'a SolverConfig,
    pub mesh: &'a [f64],
    pub steps: &'a [StepRecord],
    pub pieces: &'a [PolynomialPiece],
}

impl<'a> TrajectoryDoc<'a> {
    pub fn new(problem: &'a str, config: &'a SolverConfig, traj: &'a Trajectory) -> Self {
        TrajectoryDoc {
            problem,
            order: traj.order,
            config,
            mesh: &traj.mesh,
            steps: &traj.steps,
            pieces: &traj.pieces,
        }
    }
}

/// Mesh points and values: `i,x,y0,y1,...`.
pub fn write_mesh_csv<W: Write>(out: W, traj: &Trajectory) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let dim = traj.final_value().dim();
    let mut header = vec!["i".to_string(), "x".to_string()];
    header.extend((0..dim).map(|k| format!("y{k}")));
    w.write_record(&header)?;
    let values = traj
        .steps
        .first()
        .map(|s| &s.y)
        .into_iter()
        .chain(traj.steps.iter().map(|s| &s.y_next));
    for (i, (x, y)) in traj.mesh.iter().zip(values).enumerate() {
        let mut rec = vec![i.to_string(), format!("{x:.16e}")];
        rec.extend(y.as_slice().iter().map(|v| format!("{v:.16e}")));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
