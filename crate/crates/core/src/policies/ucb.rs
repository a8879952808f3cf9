use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{Policy, PolicyDecision, PolicyKind, RoundContext};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UcbConfig {
    /// Width scale `c`; `None` uses `√(σ² + tr(Z)/d)`.
    pub c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SwUcbConfig {
    /// Number of most recent plays of each arm kept in its statistics.
    pub window: usize,
    pub c: Option<f64>,
}

impl Default for SwUcbConfig {
    fn default() -> Self {
        Self { window: 100, c: None }
    }
}

fn check_scale(c: f64) -> Result<()> {
    if !(c >= 0.0) || !c.is_finite() {
        return Err(Error::Parameter(format!("UCB scale must be finite and >= 0, got {c}")));
    }
    Ok(())
}

// mean + c·√(2 ln t / n); unplayed arms score +∞.
fn ucb_score(mean: f64, plays: usize, log_t: f64, c: f64) -> f64 {
    if plays == 0 {
        f64::INFINITY
    } else {
        mean + c * (2.0 * log_t / plays as f64).sqrt()
    }
}

/// UCB1 with a sub-Gaussian width scale.
#[derive(Debug, Clone)]
pub struct Ucb {
    c: f64,
    counts: Vec<usize>,
    sums: Vec<f64>,
    rounds: usize,
}

impl Ucb {
    pub fn new(k: usize, c: f64) -> Result<Self> {
        check_scale(c)?;
        if k == 0 {
            return Err(Error::Input("empty action set".into()));
        }
        Ok(Self {
            c,
            counts: vec![0; k],
            sums: vec![0.0; k],
            rounds: 0,
        })
    }

    pub fn scores(&self) -> Vec<f64> {
        let log_t = ((self.rounds + 1) as f64).ln();
        self.counts
            .iter()
            .zip(&self.sums)
            .map(|(&n, &s)| ucb_score(if n > 0 { s / n as f64 } else { 0.0 }, n, log_t, self.c))
            .collect()
    }
}

impl Policy for Ucb {
    fn kind(&self) -> PolicyKind {
        PolicyKind::Ucb
    }

    fn select(&mut self, _ctx: &RoundContext<'_>) -> Result<PolicyDecision> {
        PolicyDecision::from_scores(self.scores())
    }

    fn observe(&mut self, decision: &PolicyDecision, reward: f64) -> Result<()> {
        let i = decision.action_index;
        self.counts[i] += 1;
        self.sums[i] += reward;
        self.rounds += 1;
        Ok(())
    }
}

/// UCB over each arm's last `window` plays; the log term uses `min(t, window)`.
#[derive(Debug, Clone)]
pub struct SwUcb {
    c: f64,
    window: usize,
    history: Vec<VecDeque<f64>>,
    rounds: usize,
}

impl SwUcb {
    pub fn new(k: usize, window: usize, c: f64) -> Result<Self> {
        check_scale(c)?;
        if window == 0 {
            return Err(Error::Parameter("window must be at least 1".into()));
        }
        if k == 0 {
            return Err(Error::Input("empty action set".into()));
        }
        Ok(Self {
            c,
            window,
            history: vec![VecDeque::with_capacity(window); k],
            rounds: 0,
        })
    }

    pub fn scores(&self) -> Vec<f64> {
        let log_t = ((self.rounds + 1).min(self.window) as f64).ln();
        self.history
            .iter()
            .map(|h| {
                let n = h.len();
                let mean = if n > 0 { h.iter().sum::<f64>() / n as f64 } else { 0.0 };
                ucb_score(mean, n, log_t, self.c)
            })
            .collect()
    }
}

impl Policy for SwUcb {
    fn kind(&self) -> PolicyKind {
        PolicyKind::SwUcb
    }

    fn select(&mut self, _ctx: &RoundContext<'_>) -> Result<PolicyDecision> {
        PolicyDecision::from_scores(self.scores())
    }

    fn observe(&mut self, decision: &PolicyDecision, reward: f64) -> Result<()> {
        let h = &mut self.history[decision.action_index];
        if h.len() == self.window {
            h.pop_front();
        }
        h.push_back(reward);
        self.rounds += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matops::{argmax_lowest, Vector};

    fn drive(policy: &mut dyn Policy, n: usize, reward: impl Fn(usize, usize) -> f64) -> Vec<usize> {
        let z = Vector::zeros(1);
        (0..n)
            .map(|t| {
                let d = policy.select(&RoundContext { t, horizon: n, true_state: &z }).unwrap();
                assert_eq!(Some(d.action_index), argmax_lowest(&d.scores));
                policy.observe(&d, reward(t, d.action_index)).unwrap();
                d.action_index
            })
            .collect()
    }

    #[test]
    fn plays_each_arm_once_first() {
        let mut u = Ucb::new(5, 1.0).unwrap();
        let plays = drive(&mut u, 5, |_, i| i as f64 * 0.1);
        assert_eq!(plays, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn concentrates_on_better_arm() {
        let mut u = Ucb::new(2, 1.0).unwrap();
        let plays = drive(&mut u, 1000, |_, i| if i == 0 { 1.0 } else { 0.0 });
        let frac = plays.iter().filter(|&&i| i == 0).count() as f64 / 1000.0;
        assert!(frac > 0.9, "fraction {frac}");
    }

    #[test]
    fn zero_scale_is_greedy_on_means() {
        let mut u = Ucb::new(3, 0.0).unwrap();
        let rewards = [0.2, 0.7, 0.5];
        drive(&mut u, 3, |_, i| rewards[i]);
        assert_eq!(u.scores(), rewards.to_vec());
        let plays = drive(&mut u, 10, |_, i| rewards[i]);
        assert!(plays.iter().all(|&i| i == 1));
    }

    #[test]
    fn rejects_negative_scale() {
        assert!(Ucb::new(2, -1.0).is_err());
        assert!(SwUcb::new(2, 10, f64::NAN).is_err());
        assert!(SwUcb::new(2, 0, 1.0).is_err());
    }

    #[test]
    fn inactive_window_matches_ucb() {
        let reward = |t: usize, i: usize| ((t * 7 + i * 3) % 11) as f64 / 11.0 - 0.3 * i as f64;
        let mut u = Ucb::new(4, 0.8).unwrap();
        let mut s = SwUcb::new(4, 500, 0.8).unwrap();
        assert_eq!(drive(&mut u, 400, reward), drive(&mut s, 400, reward));
    }

    #[test]
    fn unit_window_scores_last_reward() {
        let mut s = SwUcb::new(3, 1, 2.0).unwrap();
        drive(&mut s, 3, |t, _| t as f64 + 0.5);
        assert_eq!(s.scores(), vec![0.5, 1.5, 2.5]);
        drive(&mut s, 1, |_, _| -4.0);
        assert_eq!(s.scores(), vec![0.5, 1.5, -4.0]);
    }

    #[test]
    fn window_tracks_a_switch() {
        let (w, k) = (100, 2);
        let reward = |t: usize, i: usize| if (t < 500) == (i == 0) { 1.0 } else { 0.0 };
        let mut s = SwUcb::new(k, w, 1.0).unwrap();
        let plays = drive(&mut s, 800, reward);
        let before = plays[400..500].iter().filter(|&&i| i == 0).count();
        assert!(before > 50);
        let start = 500 + w + k;
        let after = plays[start..start + w].iter().filter(|&&i| i == 1).count();
        assert!(after > w / 2, "arm 1 played {after} of {w} rounds after the switch");
    }
}
