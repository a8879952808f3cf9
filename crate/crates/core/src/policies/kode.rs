use crate::env::LgdsParams;
use crate::error::Result;
use crate::kalman::KalmanState;
use crate::matops::Vector;

use super::{kode_select, oracle_select, Policy, PolicyDecision, PolicyKind, RoundContext};

/// Exploration-free policy: play the action best aligned with the Kalman
/// prediction, then feed the observed reward back into the filter.
#[derive(Debug, Clone)]
pub struct Kode {
    params: LgdsParams,
    filter: KalmanState,
}

impl Kode {
    pub fn new(params: LgdsParams) -> Self {
        let filter = KalmanState::new(&params);
        Self { params, filter }
    }

    /// Starts from an explicit prior instead of `(0, Σ₀)`.
    pub fn with_filter(params: LgdsParams, filter: KalmanState) -> Self {
        Self { params, filter }
    }

    pub fn filter(&self) -> &KalmanState {
        &self.filter
    }
}

impl Policy for Kode {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Kode
    }

    fn select(&mut self, _ctx: &RoundContext<'_>) -> Result<PolicyDecision> {
        kode_select(&self.filter, &self.params.actions)
    }

    fn observe(&mut self, decision: &PolicyDecision, reward: f64) -> Result<()> {
        let a = self.params.action(decision.action_index)?.clone();
        self.filter.update(&a, reward, &self.params)?;
        Ok(())
    }
}

/// Reference policy that reads the hidden state. Its pseudo-regret is zero
/// by construction.
#[derive(Debug, Clone)]
pub struct Oracle {
    actions: Vec<Vector>,
}

impl Oracle {
    pub fn new(actions: Vec<Vector>) -> Self {
        Self { actions }
    }
}

impl Policy for Oracle {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Oracle
    }

    fn select(&mut self, ctx: &RoundContext<'_>) -> Result<PolicyDecision> {
        oracle_select(ctx.true_state, &self.actions)
    }

    fn observe(&mut self, _decision: &PolicyDecision, _reward: f64) -> Result<()> {
        Ok(())
    }
}
