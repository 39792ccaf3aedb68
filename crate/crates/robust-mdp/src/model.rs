//! Base MDP data model: action representations, validation and file I/O.
//!
//! Continuous actions are represented by piecewise-linear interpolation over a
//! knot grid, so any convex mixture of two actions can be evaluated in closed
//! form. Finite action sets are plain tables.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for stochasticity checks (row sums, distributions).
pub const STOCHASTIC_TOL: f64 = 1e-9;

/// Action set of an MDP: either a finite index set or a 1-d interval
/// discretized by strictly increasing knots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ActionModel {
    Finite { count: usize },
    Grid { knots: Vec<f64> },
}

impl ActionModel {
    /// Number of tabulated actions (knot count for grids).
    pub fn num_actions(&self) -> usize {
        match self {
            ActionModel::Finite { count } => *count,
            ActionModel::Grid { knots } => knots.len(),
        }
    }

    pub fn is_grid(&self) -> bool {
        matches!(self, ActionModel::Grid { .. })
    }

    pub fn knots(&self) -> Option<&[f64]> {
        match self {
            ActionModel::Finite { .. } => None,
            ActionModel::Grid { knots } => Some(knots),
        }
    }

    /// Closed action interval for grids.
    pub fn interval(&self) -> Option<(f64, f64)> {
        self.knots().map(|k| (k[0], k[k.len() - 1]))
    }

    /// Action value of tabulated action `j` (the index itself for finite sets).
    pub fn action_value(&self, j: usize) -> f64 {
        match self {
            ActionModel::Finite { .. } => j as f64,
            ActionModel::Grid { knots } => knots[j],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ActionModel::Finite { count } => {
                if *count == 0 {
                    return Err(Error::Validation("action_model.count must be >= 1".into()));
                }
            }
            ActionModel::Grid { knots } => {
                if knots.len() < 2 {
                    return Err(Error::Validation("action_model.knots needs >= 2 knots".into()));
                }
                for (i, k) in knots.iter().enumerate() {
                    if !k.is_finite() {
                        return Err(Error::Validation(format!("action_model.knots[{i}] is not finite")));
                    }
                }
                for i in 1..knots.len() {
                    if knots[i] <= knots[i - 1] {
                        return Err(Error::Validation(format!(
                            "action_model.knots not strictly increasing at index {i}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Index of the segment containing `a`, for interpolation. Errors when `a`
    /// lies outside the interval.
    fn segment(&self, a: f64) -> Result<usize> {
        let knots = self.knots().expect("segment lookup requires a grid");
        let (lo, hi) = self.interval().unwrap();
        if !a.is_finite() || a < lo || a > hi {
            return Err(Error::OutOfDomain {
                action: a,
                reason: format!("interval is [{lo}, {hi}]"),
            });
        }
        // partition_point returns the first knot > a; segment is the one before.
        let idx = knots.partition_point(|&k| k <= a);
        Ok(idx.clamp(1, knots.len() - 1) - 1)
    }
}

/// Finite-state MDP with tabulated rewards and transitions.
///
/// For `Grid` action models, rewards and transition rows are interpreted
/// piecewise-linearly between knots (per destination state).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MdpModel {
    pub num_states: usize,
    pub gamma: f64,
    pub action_model: ActionModel,
    /// `reward[s][j]`: reward of tabulated action `j` in state `s`.
    pub reward: Vec<Vec<f64>>,
    /// `transitions[s][j][s']`: next-state distribution of action `j` in `s`.
    pub transitions: Vec<Vec<Vec<f64>>>,
    pub initial_distribution: Vec<f64>,
}

impl MdpModel {
    pub fn num_actions(&self) -> usize {
        self.action_model.num_actions()
    }

    /// Largest absolute tabulated reward; bounds `|v|` by `r_max / (1 - gamma)`.
    pub fn reward_bound(&self) -> f64 {
        self.reward
            .iter()
            .flatten()
            .fold(0.0f64, |m, r| m.max(r.abs()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_states == 0 {
            return Err(Error::Validation("num_states must be >= 1".into()));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::Validation(format!("gamma {} not in (0, 1)", self.gamma)));
        }
        self.action_model.validate()?;
        let (ns, na) = (self.num_states, self.num_actions());
        if self.reward.len() != ns {
            return Err(Error::Validation(format!(
                "reward has {} rows, expected num_states = {ns}",
                self.reward.len()
            )));
        }
        if self.transitions.len() != ns {
            return Err(Error::Validation(format!(
                "transitions has {} rows, expected num_states = {ns}",
                self.transitions.len()
            )));
        }
        for s in 0..ns {
            if self.reward[s].len() != na {
                return Err(Error::Validation(format!(
                    "reward[{s}] has {} entries, expected {na}",
                    self.reward[s].len()
                )));
            }
            for (j, r) in self.reward[s].iter().enumerate() {
                if !r.is_finite() {
                    return Err(Error::Validation(format!("reward[{s}][{j}] is not finite")));
                }
            }
            if self.transitions[s].len() != na {
                return Err(Error::Validation(format!(
                    "transitions[{s}] has {} entries, expected {na}",
                    self.transitions[s].len()
                )));
            }
            for j in 0..na {
                let row = &self.transitions[s][j];
                if row.len() != ns {
                    return Err(Error::Validation(format!(
                        "transitions[{s}][{j}] has {} entries, expected {ns}",
                        row.len()
                    )));
                }
                let mut sum = 0.0;
                for (sp, p) in row.iter().enumerate() {
                    if !p.is_finite() || *p < 0.0 {
                        return Err(Error::Validation(format!(
                            "transitions[{s}][{j}][{sp}] = {p} is negative or non-finite"
                        )));
                    }
                    sum += p;
                }
                if (sum - 1.0).abs() > STOCHASTIC_TOL {
                    return Err(Error::Validation(format!(
                        "transitions[{s}][{j}] sums to {sum}, expected 1"
                    )));
                }
            }
        }
        if self.initial_distribution.len() != ns {
            return Err(Error::Validation(format!(
                "initial_distribution has {} entries, expected {ns}",
                self.initial_distribution.len()
            )));
        }
        let mut sum = 0.0;
        for (s, p) in self.initial_distribution.iter().enumerate() {
            if !p.is_finite() || *p < 0.0 {
                return Err(Error::Validation(format!(
                    "initial_distribution[{s}] = {p} is negative or non-finite"
                )));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::Validation(format!(
                "initial_distribution sums to {sum}, expected 1"
            )));
        }
        Ok(())
    }

    /// Reward of action value `a` in state `s`. Grid models interpolate
    /// linearly between the bracketing knots; exact at knots.
    pub fn eval_reward(&self, s: usize, a: f64) -> Result<f64> {
        match &self.action_model {
            ActionModel::Finite { count } => {
                let j = a as usize;
                if a.fract() != 0.0 || a < 0.0 || j >= *count {
                    return Err(Error::OutOfDomain {
                        action: a,
                        reason: format!("finite action set of size {count}"),
                    });
                }
                Ok(self.reward[s][j])
            }
            ActionModel::Grid { knots } => {
                let i = self.action_model.segment(a)?;
                let t = (a - knots[i]) / (knots[i + 1] - knots[i]);
                Ok(self.reward[s][i] + t * (self.reward[s][i + 1] - self.reward[s][i]))
            }
        }
    }

    /// Next-state distribution of action value `a` in state `s`. Interpolation
    /// is per destination; row sums stay 1 by linearity.
    pub fn eval_transition(&self, s: usize, a: f64) -> Result<Vec<f64>> {
        match &self.action_model {
            ActionModel::Finite { count } => {
                let j = a as usize;
                if a.fract() != 0.0 || a < 0.0 || j >= *count {
                    return Err(Error::OutOfDomain {
                        action: a,
                        reason: format!("finite action set of size {count}"),
                    });
                }
                Ok(self.transitions[s][j].clone())
            }
            ActionModel::Grid { knots } => {
                let i = self.action_model.segment(a)?;
                if a == knots[i] {
                    return Ok(self.transitions[s][i].clone());
                }
                if a == knots[i + 1] {
                    return Ok(self.transitions[s][i + 1].clone());
                }
                let t = (a - knots[i]) / (knots[i + 1] - knots[i]);
                let (lo, hi) = (&self.transitions[s][i], &self.transitions[s][i + 1]);
                Ok(lo.iter().zip(hi).map(|(p0, p1)| p0 + t * (p1 - p0)).collect())
            }
        }
    }

    /// Derivative of the reward in the action at `a`, from the bracketing
    /// segment's slope. Errors when `a` coincides with an interior knot.
    pub fn reward_slope(&self, s: usize, a: f64) -> Result<f64> {
        let knots = self
            .action_model
            .knots()
            .ok_or_else(|| Error::Validation("reward_slope requires a grid action model".into()))?;
        let i = self.interior_segment(a)?;
        Ok((self.reward[s][i + 1] - self.reward[s][i]) / (knots[i + 1] - knots[i]))
    }

    /// Per-destination derivative of the transition row at `a`.
    pub fn transition_slope(&self, s: usize, a: f64) -> Result<Vec<f64>> {
        let knots = self
            .action_model
            .knots()
            .ok_or_else(|| Error::Validation("transition_slope requires a grid action model".into()))?;
        let i = self.interior_segment(a)?;
        let w = knots[i + 1] - knots[i];
        Ok(self.transitions[s][i]
            .iter()
            .zip(&self.transitions[s][i + 1])
            .map(|(p0, p1)| (p1 - p0) / w)
            .collect())
    }

    /// Segment index for slope evaluation; rejects actions on a knot so the
    /// one-sided derivative is never picked silently.
    fn interior_segment(&self, a: f64) -> Result<usize> {
        let knots = self.action_model.knots().unwrap();
        let i = self.action_model.segment(a)?;
        for &k in knots {
            if (a - k).abs() <= 1e-12 {
                return Err(Error::KnotSingularity { action: a, knot: k });
            }
        }
        Ok(i)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Numerical(format!("serialization failed: {e}")))?;
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// Loads and validates a model file (JSON schema documented in the README).
pub fn load_model(path: &Path) -> Result<MdpModel> {
    let text = std::fs::read_to_string(path)?;
    let model: MdpModel = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    model.validate()?;
    Ok(model)
}

/// Agent or adversary strategy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Policy {
    /// One action per state: a tabulated-action index for `Finite`, a real
    /// action value for `Grid`.
    Deterministic { actions: Vec<f64> },
    /// One probability vector over the tabulated action set per state.
    Stochastic { probs: Vec<Vec<f64>> },
}

impl Policy {
    /// Deterministic policy picking tabulated action `j` in every state.
    pub fn uniform_deterministic(model: &MdpModel, j: usize) -> Policy {
        let a = model.action_model.action_value(j);
        Policy::Deterministic { actions: vec![a; model.num_states] }
    }

    /// Uniform stochastic policy over the tabulated action set.
    pub fn uniform_stochastic(model: &MdpModel) -> Policy {
        let na = model.num_actions();
        Policy::Stochastic { probs: vec![vec![1.0 / na as f64; na]; model.num_states] }
    }

    /// Deterministic policy from per-state tabulated-action indices.
    pub fn from_indices(model: &MdpModel, idx: &[usize]) -> Policy {
        Policy::Deterministic {
            actions: idx.iter().map(|&j| model.action_model.action_value(j)).collect(),
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self, Policy::Deterministic { .. })
    }

    pub fn num_states(&self) -> usize {
        match self {
            Policy::Deterministic { actions } => actions.len(),
            Policy::Stochastic { probs } => probs.len(),
        }
    }

    pub fn validate(&self, model: &MdpModel) -> Result<()> {
        if self.num_states() != model.num_states {
            return Err(Error::IncompatiblePolicy(format!(
                "policy covers {} states, model has {}",
                self.num_states(),
                model.num_states
            )));
        }
        match self {
            Policy::Deterministic { actions } => {
                for (s, &a) in actions.iter().enumerate() {
                    match &model.action_model {
                        ActionModel::Finite { count } => {
                            if a.fract() != 0.0 || a < 0.0 || a as usize >= *count {
                                return Err(Error::IncompatiblePolicy(format!(
                                    "state {s}: action {a} is not an index below {count}"
                                )));
                            }
                        }
                        ActionModel::Grid { knots } => {
                            let (lo, hi) = (knots[0], knots[knots.len() - 1]);
                            if !a.is_finite() || a < lo || a > hi {
                                return Err(Error::IncompatiblePolicy(format!(
                                    "state {s}: action {a} outside [{lo}, {hi}]"
                                )));
                            }
                        }
                    }
                }
            }
            Policy::Stochastic { probs } => {
                let na = model.num_actions();
                for (s, row) in probs.iter().enumerate() {
                    if row.len() != na {
                        return Err(Error::IncompatiblePolicy(format!(
                            "state {s}: {} probabilities, expected {na}",
                            row.len()
                        )));
                    }
                    let mut sum = 0.0;
                    for &p in row {
                        if !p.is_finite() || p < 0.0 {
                            return Err(Error::IncompatiblePolicy(format!(
                                "state {s}: negative or non-finite probability {p}"
                            )));
                        }
                        sum += p;
                    }
                    if (sum - 1.0).abs() > STOCHASTIC_TOL {
                        return Err(Error::IncompatiblePolicy(format!(
                            "state {s}: probabilities sum to {sum}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Support of the per-state action distribution as (action value, weight)
    /// pairs. Deterministic policies yield a single unit-weight atom.
    pub fn support(&self, model: &MdpModel, s: usize) -> Vec<(f64, f64)> {
        match self {
            Policy::Deterministic { actions } => vec![(actions[s], 1.0)],
            Policy::Stochastic { probs } => probs[s]
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(|(j, &p)| (model.action_model.action_value(j), p))
                .collect(),
        }
    }

    /// Expected reward of this policy in state `s`.
    pub fn expected_reward(&self, model: &MdpModel, s: usize) -> Result<f64> {
        let mut acc = 0.0;
        for (a, w) in self.support(model, s) {
            acc += w * model.eval_reward(s, a)?;
        }
        Ok(acc)
    }

    /// Expected next-state distribution of this policy in state `s`.
    pub fn expected_transition(&self, model: &MdpModel, s: usize) -> Result<Vec<f64>> {
        let mut acc = vec![0.0; model.num_states];
        for (a, w) in self.support(model, s) {
            let row = model.eval_transition(s, a)?;
            for (dst, p) in acc.iter_mut().zip(row) {
                *dst += w * p;
            }
        }
        Ok(acc)
    }
}

/// Deterministic pseudo-random model generator; the same seed always yields a
/// bit-identical model.
pub fn generate_random_model(
    seed: u64,
    num_states: usize,
    action_model: ActionModel,
    reward_range: (f64, f64),
) -> MdpModel {
    assert!(num_states > 0, "num_states must be positive");
    assert!(reward_range.0 <= reward_range.1, "empty reward range");
    action_model.validate().expect("invalid action model");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let na = action_model.num_actions();
    let reward = (0..num_states)
        .map(|_| (0..na).map(|_| rng.gen_range(reward_range.0..=reward_range.1)).collect())
        .collect();
    let transitions = (0..num_states)
        .map(|_| (0..na).map(|_| random_distribution(&mut rng, num_states)).collect())
        .collect();
    let initial_distribution = random_distribution(&mut rng, num_states);
    MdpModel {
        num_states,
        gamma: 0.9,
        action_model,
        reward,
        transitions,
        initial_distribution,
    }
}

fn random_distribution(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    // 0.05 floor keeps rows well conditioned; last entry absorbs rounding so
    // the sum is exactly 1.
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut out: Vec<f64> = raw.iter().map(|x| x / total).collect();
    let head: f64 = out[..n - 1].iter().sum();
    out[n - 1] = 1.0 - head;
    out
}
