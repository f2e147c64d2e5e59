//! Solver configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::UNIT_ROUNDOFF;

/// Largest supported order; node counts stay at or below `MAX_ORDER + 1`.
pub const MAX_ORDER: usize = 10;

/// Machine precision assumed by [`AuxStepRule::roundoff_power`].
pub const DEFAULT_MACHEPS: f64 = 1e-15;

/// Length `h(eps)` of the probe interval used to estimate the local coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum AuxStepRule {
    /// `h = eps^(1/(r+1))`.
    EpsPower,
    /// `h = u^(1/(r+1))`, independent of `eps`.
    RoundoffPower { unit_roundoff: f64 },
    /// A fixed probe length.
    Fixed { value: f64 },
}

impl AuxStepRule {
    /// `u^(1/(r+1))` with `u = 1e-15`.
    pub fn roundoff_power() -> Self {
        AuxStepRule::RoundoffPower {
            unit_roundoff: DEFAULT_MACHEPS,
        }
    }

    pub fn length(&self, epsilon: f64, order: usize) -> f64 {
        let p = 1.0 / (order as f64 + 1.0);
        match *self {
            AuxStepRule::EpsPower => epsilon.powf(p),
            AuxStepRule::RoundoffPower { unit_roundoff } => unit_roundoff.powf(p),
            AuxStepRule::Fixed { value } => value,
        }
    }
}

/// How the local coefficient `G_i` is formed from the divided difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientPreset {
    /// `G = (4/3) bar_beta (|dd| + beta)(1 + varphi)`, which the error bound supports.
    Theory,
    /// `G = bar_beta |dd| + bar_beta / 2`: `2|dd| + 1` for `r = 1` and
    /// `4|dd| + 2` for `r = 2` with the default `bar_beta`.
    Experiment,
}

impl CoefficientPreset {
    /// Default `bar_beta` for the built-in method at a given order.
    pub fn default_bar_beta(&self, order: usize) -> f64 {
        match (self, order) {
            (CoefficientPreset::Experiment, 2) => 4.0,
            _ => 2.0,
        }
    }

    /// Coefficient from the norm of the divided difference.
    pub fn coefficient(&self, dd_norm: f64, bar_beta: f64, beta: f64, varphi: f64) -> f64 {
        match self {
            CoefficientPreset::Theory => (4.0 / 3.0) * bar_beta * (dd_norm + beta) * (1.0 + varphi),
            CoefficientPreset::Experiment => bar_beta * dd_norm + bar_beta / 2.0,
        }
    }

    /// Lower bound on the coefficient, reached when the divided difference vanishes.
    pub fn floor(&self, bar_beta: f64, beta: f64, varphi: f64) -> f64 {
        self.coefficient(0.0, bar_beta, beta, varphi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Target local error per step.
    pub epsilon: f64,
    pub beta: f64,
    pub varphi: f64,
    pub order: usize,
    pub aux_step_rule: AuxStepRule,
    pub preset: CoefficientPreset,
    /// Defaults to `100 u (b - a)`.
    pub min_step: Option<f64>,
    pub max_steps: u64,
    /// Overrides the preset's `bar_beta` for the built-in method.
    pub bar_beta: Option<f64>,
}

impl SolverConfig {
    /// Experiment preset with the roundoff probe rule, `beta = 1`, `varphi = 1/2`.
    pub fn new(epsilon: f64, order: usize) -> Self {
        Self {
            epsilon,
            beta: 1.0,
            varphi: 0.5,
            order,
            aux_step_rule: AuxStepRule::roundoff_power(),
            preset: CoefficientPreset::Experiment,
            min_step: None,
            max_steps: 100_000_000,
            bar_beta: None,
        }
    }

    pub fn theory(epsilon: f64, order: usize, beta: f64, varphi: f64) -> Self {
        Self {
            beta,
            varphi,
            preset: CoefficientPreset::Theory,
            ..Self::new(epsilon, order)
        }
    }

    pub fn with_aux_rule(mut self, rule: AuxStepRule) -> Self {
        self.aux_step_rule = rule;
        self
    }

    pub fn with_max_steps(mut self, max_steps: u64) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.to_string()));
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad("epsilon must lie in (0, 1)");
        }
        if !(self.varphi > 0.0 && self.varphi < 1.0) {
            return bad("varphi must lie in (0, 1)");
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad("beta must be positive");
        }
        if !(1..=MAX_ORDER).contains(&self.order) {
            return bad("order must lie in 1..=10");
        }
        if let Some(bb) = self.bar_beta {
            if !(bb > 0.0 && bb.is_finite()) {
                return bad("bar_beta must be positive");
            }
        }
        if let Some(ms) = self.min_step {
            if !(ms > 0.0 && ms.is_finite()) {
                return bad("min_step must be positive");
            }
        }
        if self.max_steps == 0 {
            return bad("max_steps must be positive");
        }
        match self.aux_step_rule {
            AuxStepRule::RoundoffPower { unit_roundoff }
                if !(unit_roundoff > 0.0 && unit_roundoff < 1.0) =>
            {
                bad("unit roundoff must lie in (0, 1)")
            }
            AuxStepRule::Fixed { value } if !(value > 0.0 && value.is_finite()) => {
                bad("fixed probe length must be positive")
            }
            _ => Ok(()),
        }
    }

    pub fn effective_bar_beta(&self) -> f64 {
        self.bar_beta
            .unwrap_or_else(|| self.preset.default_bar_beta(self.order))
    }

    pub fn effective_min_step(&self, a: f64, b: f64) -> f64 {
        self.min_step.unwrap_or(100.0 * UNIT_ROUNDOFF * (b - a))
    }
}
