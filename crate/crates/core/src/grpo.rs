//! Group-relative policy optimization arithmetic, evaluated on
//! caller-supplied per-token log-probabilities: advantage normalization
//! within a rollout group, the clipped importance-ratio surrogate, and a
//! nonnegative per-token KL estimator against a reference policy.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::float;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct GrpoConfig {
    /// Importance-ratio clip width.
    pub epsilon: f64,
    /// KL regularization coefficient.
    pub beta: f64,
}

impl Default for GrpoConfig {
    fn default() -> Self {
        GrpoConfig {
            epsilon: 0.2,
            beta: 1e-3,
        }
    }
}

impl GrpoConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err("epsilon must lie in (0, 1)".to_string());
        }
        if self.beta < 0.0 {
            return Err("beta must be nonnegative".to_string());
        }
        Ok(())
    }
}

/// A group of rollouts: one reward per sequence plus aligned per-token
/// log-probabilities under the current, rollout, and reference policies.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RolloutGroup {
    pub rewards: Vec<f64>,
    pub logp_theta: Vec<Vec<f64>>,
    pub logp_old: Vec<Vec<f64>>,
    pub logp_ref: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GrpoError {
    GroupTooSmall(usize),
    MisalignedLengths(String),
    EmptySequence(usize),
    NonFinite(String),
}

impl fmt::Display for GrpoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrpoError::GroupTooSmall(g) => write!(f, "group needs at least 2 rollouts, got {g}"),
            GrpoError::MisalignedLengths(which) => write!(f, "misaligned inputs: {which}"),
            GrpoError::EmptySequence(i) => write!(f, "sequence {i} has no tokens"),
            GrpoError::NonFinite(which) => write!(f, "non-finite input: {which}"),
        }
    }
}

impl core::error::Error for GrpoError {}

impl RolloutGroup {
    pub fn group_size(&self) -> usize {
        self.rewards.len()
    }

    pub fn validate(&self) -> Result<(), GrpoError> {
        let g = self.rewards.len();
        if g < 2 {
            return Err(GrpoError::GroupTooSmall(g));
        }
        if self.logp_theta.len() != g || self.logp_old.len() != g || self.logp_ref.len() != g {
            return Err(GrpoError::MisalignedLengths(
                "log-probability lists must have one entry per reward".to_string(),
            ));
        }
        for i in 0..g {
            if !self.rewards[i].is_finite() {
                return Err(GrpoError::NonFinite(alloc::format!("rewards[{i}]")));
            }
            let t = self.logp_theta[i].len();
            if self.logp_old[i].len() != t || self.logp_ref[i].len() != t {
                return Err(GrpoError::MisalignedLengths(alloc::format!(
                    "sequence {i}: token vectors differ in length"
                )));
            }
            if t == 0 {
                return Err(GrpoError::EmptySequence(i));
            }
            for k in 0..t {
                if !self.logp_theta[i][k].is_finite()
                    || !self.logp_old[i][k].is_finite()
                    || !self.logp_ref[i][k].is_finite()
                {
                    return Err(GrpoError::NonFinite(alloc::format!(
                        "sequence {i}, token {k}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Degenerate-spread guard below which all advantages are zeroed.
pub const STD_FLOOR: f64 = 1e-8;

/// Group-relative advantages: `(r_i - mean) / std` with the population
/// standard deviation. Groups with spread below [`STD_FLOOR`] yield all
/// zeros.
pub fn advantages(rewards: &[f64]) -> Result<Vec<f64>, GrpoError> {
    let g = rewards.len();
    if g < 2 {
        return Err(GrpoError::GroupTooSmall(g));
    }
    for (i, r) in rewards.iter().enumerate() {
        if !r.is_finite() {
            return Err(GrpoError::NonFinite(alloc::format!("rewards[{i}]")));
        }
    }
    let mean = rewards.iter().sum::<f64>() / g as f64;
    let variance = rewards.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / g as f64;
    let std = float::sqrt(variance);
    if std < STD_FLOOR {
        return Ok(alloc::vec![0.0; g]);
    }
    Ok(rewards.iter().map(|r| (r - mean) / std).collect())
}

/// Nonnegative per-token KL estimate `e^d - d - 1` with
/// `d = logp_ref - logp_theta`; zero exactly when the policies agree.
pub fn kl_estimate(logp_theta: f64, logp_ref: f64) -> f64 {
    let d = logp_ref - logp_theta;
    float::exp(d) - d - 1.0
}

/// Clipped-ratio surrogate objective: per token,
/// `min(r * A, clip(r, 1 - eps, 1 + eps) * A) - beta * KL`, averaged over
/// tokens within each sequence and then over the group.
pub fn surrogate_objective(
    group: &RolloutGroup,
    advantages: &[f64],
    cfg: &GrpoConfig,
) -> Result<f64, GrpoError> {
    group.validate()?;
    if advantages.len() != group.group_size() {
        return Err(GrpoError::MisalignedLengths(
            "advantages must have one entry per rollout".to_string(),
        ));
    }
    let g = group.group_size();
    let mut total = 0.0;
    for (i, &adv) in advantages.iter().enumerate() {
        let tokens = group.logp_theta[i].len();
        let mut seq_sum = 0.0;
        for k in 0..tokens {
            let ratio = float::exp(group.logp_theta[i][k] - group.logp_old[i][k]);
            let clipped = ratio.clamp(1.0 - cfg.epsilon, 1.0 + cfg.epsilon);
            let term = (ratio * adv).min(clipped * adv);
            let kl = kl_estimate(group.logp_theta[i][k], group.logp_ref[i][k]);
            seq_sum += term - cfg.beta * kl;
        }
        total += seq_sum / tokens as f64;
    }
    Ok(total / g as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn advantages_match_population_normalization() {
        let adv = advantages(&[1.0, 2.0, 3.0]).unwrap();
        let expected = 1.224_744_871_391_589;
        assert!((adv[0] + expected).abs() < 1e-12);
        assert!(adv[1].abs() < 1e-12);
        assert!((adv[2] - expected).abs() < 1e-12);

        let adv = advantages(&[0.0, 1.0]).unwrap();
        assert!((adv[0] + 1.0).abs() < 1e-12);
        assert!((adv[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equal_rewards_zero_out() {
        let adv = advantages(&[0.7, 0.7, 0.7, 0.7]).unwrap();
        assert!(adv.iter().all(|&a| a == 0.0));
    }

    #[test]
    fn group_of_one_is_rejected() {
        assert_eq!(advantages(&[1.0]), Err(GrpoError::GroupTooSmall(1)));
    }

    #[test]
    fn advantages_sum_to_zero() {
        let adv = advantages(&[0.3, 1.7, -2.2, 0.9, 4.1]).unwrap();
        let sum: f64 = adv.iter().sum();
        assert!(sum.abs() < 1e-9);
    }

    #[test]
    fn shift_and_scale_invariance() {
        let rewards = [0.1, 0.5, 0.9, 1.3];
        let base = advantages(&rewards).unwrap();
        let shifted: Vec<f64> = rewards.iter().map(|r| r + 11.0).collect();
        let scaled: Vec<f64> = rewards.iter().map(|r| r * 3.5).collect();
        for (a, b) in base.iter().zip(advantages(&shifted).unwrap()) {
            assert!((a - b).abs() < 1e-9);
        }
        for (a, b) in base.iter().zip(advantages(&scaled).unwrap()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn kl_estimate_values() {
        assert_eq!(kl_estimate(0.5, 0.5), 0.0);
        let e_minus_2 = core::f64::consts::E - 2.0;
        assert!((kl_estimate(-1.0, 0.0) - e_minus_2).abs() < 1e-12);
        for d in [-2.0, -0.5, 0.3, 1.7] {
            assert!(kl_estimate(0.0, d) > 0.0);
        }
    }

    #[test]
    fn identity_policies_reduce_to_mean_advantage() {
        let logp = vec![vec![-0.5, -1.0], vec![-0.2, -0.9], vec![-1.1, -0.3]];
        let group = RolloutGroup {
            rewards: vec![1.0, 2.0, 3.0],
            logp_theta: logp.clone(),
            logp_old: logp.clone(),
            logp_ref: logp,
        };
        let adv = advantages(&group.rewards).unwrap();
        let objective = surrogate_objective(&group, &adv, &GrpoConfig::default()).unwrap();
        assert!(objective.abs() < 1e-12);
    }

    #[test]
    fn clip_arithmetic() {
        // One sequence with one token; ratio and advantage chosen directly.
        let build = |logp_theta: f64, adv: f64| {
            let group = RolloutGroup {
                rewards: vec![0.0, 0.0],
                logp_theta: vec![vec![logp_theta], vec![0.0]],
                logp_old: vec![vec![0.0], vec![0.0]],
                logp_ref: vec![vec![logp_theta], vec![0.0]],
            };
            let cfg = GrpoConfig {
                epsilon: 0.2,
                beta: 0.0,
            };
            surrogate_objective(&group, &[adv, 0.0], &cfg).unwrap() * 2.0
        };
        // ratio 2, advantage 1: min(2, 1.2) = 1.2.
        let obj = build(core::f64::consts::LN_2, 1.0);
        assert!((obj - 1.2).abs() < 1e-12);
        // ratio 0.5, advantage -1: min(-0.5, -0.8) = -0.8.
        let obj = build(-core::f64::consts::LN_2, -1.0);
        assert!((obj + 0.8).abs() < 1e-12);
    }

    #[test]
    fn unclipped_region_matches_plain_ratio_term() {
        let cfg = GrpoConfig {
            epsilon: 0.2,
            beta: 0.0,
        };
        for ratio_log in [-0.15, 0.0, 0.1] {
            let group = RolloutGroup {
                rewards: vec![0.0, 0.0],
                logp_theta: vec![vec![ratio_log], vec![0.0]],
                logp_old: vec![vec![0.0], vec![0.0]],
                logp_ref: vec![vec![ratio_log], vec![0.0]],
            };
            let adv = [1.5, 0.0];
            let obj = surrogate_objective(&group, &adv, &cfg).unwrap() * 2.0;
            let ratio = ratio_log.exp();
            if (0.8..=1.2).contains(&ratio) {
                assert!((obj - ratio * 1.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn validation_rejects_bad_shapes() {
        let group = RolloutGroup {
            rewards: vec![1.0, 2.0],
            logp_theta: vec![vec![0.0], vec![0.0, 0.0]],
            logp_old: vec![vec![0.0], vec![0.0]],
            logp_ref: vec![vec![0.0], vec![0.0, 0.0]],
        };
        assert!(matches!(
            group.validate(),
            Err(GrpoError::MisalignedLengths(_))
        ));

        let group = RolloutGroup {
            rewards: vec![1.0, f64::NAN],
            logp_theta: vec![vec![0.0], vec![0.0]],
            logp_old: vec![vec![0.0], vec![0.0]],
            logp_ref: vec![vec![0.0], vec![0.0]],
        };
        assert!(matches!(group.validate(), Err(GrpoError::NonFinite(_))));
    }
}
