use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;

use super::{random_select, Policy, PolicyDecision, PolicyKind, RoundContext};

#[derive(Debug, Clone)]
pub struct RandomPolicy {
    k: usize,
    rng: ChaCha8Rng,
}

impl RandomPolicy {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Policy for RandomPolicy {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Random
    }

    fn select(&mut self, _ctx: &RoundContext<'_>) -> Result<PolicyDecision> {
        random_select(self.k, &mut self.rng)
    }

    fn observe(&mut self, _decision: &PolicyDecision, _reward: f64) -> Result<()> {
        Ok(())
    }
}
