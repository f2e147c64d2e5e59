//! Initial value problems with instrumented right-hand side evaluation.

use std::cell::{Cell, RefCell};
use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::state::StateVector;

/// Right-hand side `f(t, y)`, written into the output slice.
///
/// A non-finite output is reported as [`Error::DomainViolation`], so a problem
/// whose `f` is only defined on part of `R^d` signals leaving the domain by
/// writing NaN.
pub type Rhs = dyn Fn(f64, &[f64], &mut [f64]) + Send + Sync;

/// `z'(t) = f(t, z(t))` on `[a, b]`, `z(a) = eta`.
///
/// The evaluation counter is per instance. Solvers reset it on entry, so an
/// instance must not be shared between concurrent solves; use
/// [`IvpProblem::fresh`] to obtain an independent copy.
pub struct IvpProblem {
    a: f64,
    b: f64,
    eta: StateVector,
    rhs: Arc<Rhs>,
    evals: Cell<u64>,
    distinct: RefCell<Option<HashSet<Vec<u64>>>>,
}

impl IvpProblem {
    pub fn new<F>(a: f64, b: f64, eta: StateVector, rhs: F) -> Result<Self>
    where
        F: Fn(f64, &[f64], &mut [f64]) + Send + Sync + 'static,
    {
        Self::from_shared(a, b, eta, Arc::new(rhs))
    }

    pub fn from_shared(a: f64, b: f64, eta: StateVector, rhs: Arc<Rhs>) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::NonFiniteValue);
        }
        if a >= b {
            return Err(Error::InvalidArgument(format!(
                "interval [{a}, {b}] requires a < b"
            )));
        }
        Ok(Self {
            a,
            b,
            eta,
            rhs,
            evals: Cell::new(0),
            distinct: RefCell::new(None),
        })
    }

    /// Same right-hand side, interval and initial value with a zeroed counter.
    pub fn fresh(&self) -> Self {
        Self {
            a: self.a,
            b: self.b,
            eta: self.eta.clone(),
            rhs: Arc::clone(&self.rhs),
            evals: Cell::new(0),
            distinct: RefCell::new(None),
        }
    }

    /// The local problem `z' = f(t, z)` on `[x, t_end]` with `z(x) = y`.
    pub fn local(&self, x: f64, t_end: f64, y: StateVector) -> Result<Self> {
        if y.dim() != self.dim() {
            return Err(Error::InvalidArgument("dimension mismatch".into()));
        }
        Self::from_shared(x, t_end, y, Arc::clone(&self.rhs))
    }

    pub fn dim(&self) -> usize {
        self.eta.dim()
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn eta(&self) -> &StateVector {
        &self.eta
    }

    pub fn rhs(&self) -> &Arc<Rhs> {
        &self.rhs
    }

    /// Evaluates `f(t, y)`, counting the call.
    pub fn eval(&self, t: f64, y: &[f64]) -> Result<StateVector> {
        debug_assert_eq!(y.len(), self.dim());
        self.evals.set(self.evals.get() + 1);
        if let Some(seen) = self.distinct.borrow_mut().as_mut() {
            let mut key = Vec::with_capacity(y.len() + 1);
            key.push(t.to_bits());
            key.extend(y.iter().map(|v| v.to_bits()));
            seen.insert(key);
        }
        let mut out = vec![0.0; self.dim()];
        (self.rhs)(t, y, &mut out);
        if out.iter().all(|v| v.is_finite()) {
            Ok(StateVector::new(out).expect("finite, non-empty"))
        } else {
            Err(Error::DomainViolation { t, y: y.to_vec() })
        }
    }

    /// Number of right-hand side evaluations since the last reset.
    pub fn evals(&self) -> u64 {
        self.evals.get()
    }

    pub fn reset_evals(&self) {
        self.evals.set(0);
    }

    /// Starts recording distinct `(t, y)` arguments; any previous record is dropped.
    pub fn track_distinct(&self, on: bool) {
        *self.distinct.borrow_mut() = on.then(HashSet::new);
    }

    /// Number of distinct arguments seen since the last call, clearing the record.
    pub fn take_distinct(&self) -> u64 {
        match self.distinct.borrow_mut().as_mut() {
            Some(seen) => {
                let n = seen.len() as u64;
                seen.clear();
                n
            }
            None => 0,
        }
    }
}

impl fmt::Debug for IvpProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IvpProblem")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("eta", &self.eta)
            .field("evals", &self.evals.get())
            .finish_non_exhaustive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay() -> IvpProblem {
        let eta = StateVector::new(vec![1.0, 2.0]).unwrap();
        IvpProblem::new(0.0, 1.0, eta, |_t, y, out| {
            out[0] = -y[0];
            out[1] = -y[1];
        })
        .unwrap()
    }

    #[test]
    fn counts_every_evaluation() {
        let p = decay();
        for k in 0..5 {
            assert_eq!(p.evals(), k);
            p.eval(0.0, &[1.0, 1.0]).unwrap();
        }
        p.reset_evals();
        assert_eq!(p.evals(), 0);
        assert_eq!(p.fresh().evals(), 0);
    }

    #[test]
    fn rejects_empty_interval() {
        let eta = StateVector::new(vec![0.0]).unwrap();
        assert!(IvpProblem::new(1.0, 1.0, eta.clone(), |_, _, _| {}).is_err());
        assert!(IvpProblem::new(2.0, 1.0, eta, |_, _, _| {}).is_err());
    }

    #[test]
    fn non_finite_rhs_is_domain_violation() {
        let eta = StateVector::new(vec![2.0]).unwrap();
        let p = IvpProblem::new(0.0, 1.0, eta, |_t, y, out| out[0] = (y[0] - 1.0).sqrt()).unwrap();
        assert!(p.eval(0.5, &[2.0]).is_ok());
        match p.eval(0.5, &[0.5]) {
            Err(Error::DomainViolation { t, y }) => {
                assert_eq!(t, 0.5);
                assert_eq!(y, vec![0.5]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(p.evals(), 2);
    }

    #[test]
    fn distinct_tracking() {
        let p = decay();
        p.track_distinct(true);
        p.eval(0.0, &[1.0, 1.0]).unwrap();
        p.eval(0.0, &[1.0, 1.0]).unwrap();
        p.eval(0.5, &[1.0, 1.0]).unwrap();
        assert_eq!(p.take_distinct(), 2);
        assert_eq!(p.take_distinct(), 0);
        assert_eq!(p.evals(), 3);
    }
}
