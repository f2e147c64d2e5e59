//! Dense local pieces, per-step records and the assembled global approximation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::LocalPolynomial;
use crate::state::{StateVector, UNIT_ROUNDOFF};

/// A polynomial approximation on one mesh interval `[start, end]`,
/// expanded in `t - start`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialPiece {
    pub start: f64,
    pub end: f64,
    /// `coeffs[k][c]` multiplies `(t - start)^k`; row 0 is the initial value.
    pub coeffs: Vec<Vec<f64>>,
}

impl PolynomialPiece {
    /// Wraps a local polynomial expanded around `start`.
    pub fn from_local(poly: LocalPolynomial, end: f64) -> Result<Self> {
        if !(poly.origin < end) {
            return Err(Error::InvalidArgument(format!(
                "piece needs start < end, got [{}, {end}]",
                poly.origin
            )));
        }
        if poly.coeffs.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue);
        }
        Ok(Self {
            start: poly.origin,
            end,
            coeffs: poly.coeffs,
        })
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].len()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn initial_value(&self) -> &[f64] {
        &self.coeffs[0]
    }

    /// Horner evaluation in `t - start`.
    ///
    /// Points up to `10 u h` outside the interval are accepted to absorb
    /// endpoint rounding.
    pub fn eval(&self, t: f64) -> Result<StateVector> {
        let slack = 10.0 * UNIT_ROUNDOFF * (self.end - self.start).max(self.end.abs());
        if !(t >= self.start - slack && t <= self.end + slack) {
            return Err(Error::OutOfRange {
                t,
                start: self.start,
                end: self.end,
            });
        }
        let s = t - self.start;
        let out: Vec<f64> = (0..self.dim())
            .map(|c| {
                self.coeffs
                    .iter()
                    .rev()
                    .fold(0.0, |acc, row| acc * s + row[c])
            })
            .collect();
        StateVector::new(out)
    }
}

/// Free-function form of [`PolynomialPiece::eval`].
pub fn evaluate_piece(piece: &PolynomialPiece, t: f64) -> Result<StateVector> {
    piece.eval(t)
}

/// Bookkeeping for one accepted step `[x, x_next]`.
///
/// `h` is the step length chosen by the controller: `(eps / G)^(1/(r+1))`,
/// or `b - x` on the final step. The mesh point is `x_next = x + h`, so
/// `x_next - x` matches `h` up to the rounding of that addition. The
/// estimator fields are `None` on fixed meshes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub i: usize,
    pub x: f64,
    pub x_next: f64,
    pub h: f64,
    pub bar_x: Option<f64>,
    #[serde(rename = "G")]
    pub g: Option<f64>,
    pub dd_norm: Option<f64>,
    /// Raw right-hand side evaluations spent on this step.
    pub f_evals: u64,
    /// Distinct `(t, y)` arguments among those evaluations.
    pub f_evals_distinct: u64,
    pub y: StateVector,
    pub y_next: StateVector,
}

/// Mesh, step records and dense pieces of a complete solve on `[a, b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub order: usize,
    pub mesh: Vec<f64>,
    pub steps: Vec<StepRecord>,
    pub pieces: Vec<PolynomialPiece>,
    pub f_evals: u64,
    pub f_evals_distinct: u64,
}

impl Trajectory {
    /// Number of subintervals `m`.
    pub fn intervals(&self) -> usize {
        self.steps.len()
    }

    pub fn final_value(&self) -> &StateVector {
        &self.steps.last().expect("non-empty trajectory").y_next
    }

    /// Global dense approximation; mesh points use the piece on their right.
    pub fn eval(&self, t: f64) -> Result<StateVector> {
        let (a, b) = (self.mesh[0], *self.mesh.last().expect("non-empty mesh"));
        if !(a..=b).contains(&t) {
            return Err(Error::OutOfRange {
                t,
                start: a,
                end: b,
            });
        }
        let k = self.mesh.partition_point(|&x| x <= t).saturating_sub(1);
        self.pieces[k.min(self.pieces.len() - 1)].eval(t)
    }

    /// Checks the structural invariants: mesh anchored at `a` and `b`,
    /// strictly increasing, pieces aligned with records and continuous.
    pub fn check_invariants(&self, a: f64, b: f64) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidArgument(msg));
        let m = self.steps.len();
        if m == 0 || self.mesh.len() != m + 1 || self.pieces.len() != m {
            return fail("inconsistent trajectory lengths".into());
        }
        if self.mesh[0] != a || self.mesh[m] != b {
            return fail(format!("mesh spans [{}, {}]", self.mesh[0], self.mesh[m]));
        }
        if self.mesh.windows(2).any(|w| w[0] >= w[1]) {
            return fail("mesh not strictly increasing".into());
        }
        for (k, (rec, piece)) in self.steps.iter().zip(&self.pieces).enumerate() {
            if rec.i != k || rec.x != self.mesh[k] || rec.x_next != self.mesh[k + 1] {
                return fail(format!("record {k} misaligned with mesh"));
            }
            if !(rec.h > 0.0)
                || (rec.h - (rec.x_next - rec.x)).abs() > 2.0 * UNIT_ROUNDOFF * rec.x_next.abs()
            {
                return fail(format!(
                    "record {k} step length {} does not span its interval",
                    rec.h
                ));
            }
            if piece.start != rec.x || piece.end != rec.x_next {
                return fail(format!("piece {k} misaligned with mesh"));
            }
            if piece.initial_value() != rec.y.as_slice() {
                return fail(format!("piece {k} not anchored at y_{k}"));
            }
            if piece.eval(rec.x_next)? != rec.y_next {
                return fail(format!("record {k} end value differs from its piece"));
            }
            if k + 1 < m && self.steps[k + 1].y != rec.y_next {
                return fail(format!("discontinuity at mesh point {}", k + 1));
            }
        }
        Ok(())
    }
}
