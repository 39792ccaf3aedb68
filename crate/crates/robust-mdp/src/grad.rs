//! Exact deterministic policy gradients for tabular-parameter policies.
//!
//! Each player is parameterized by one interior action value per state. The
//! objective is the initial-distribution-weighted joint value; its gradient
//! with respect to either player's parameters has a closed form: the
//! discounted state occupancy times the action-derivative of the one-step
//! backup, scaled by that player's mixing weight. Because the model is
//! piecewise-linear in the action, the action-derivative is a segment slope
//! and the whole gradient is exact — no estimation involved.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::game::{evaluate_joint, induced_reward_dynamics, JointPolicy, RobustGame, RobustKind};
use crate::model::Policy;

/// Which player a parameter vector drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Owner {
    Agent,
    Adversary,
}

/// Tabular deterministic policy: one action value per state, kept strictly
/// inside the action interval so segment slopes stay two-sided.
#[derive(Clone, Debug)]
pub struct ParamPolicy {
    pub theta: Vec<f64>,
    pub owner: Owner,
}

impl ParamPolicy {
    pub fn new(theta: Vec<f64>, owner: Owner) -> ParamPolicy {
        ParamPolicy { theta, owner }
    }

    fn validate(&self, g: &RobustGame) -> Result<()> {
        if self.theta.len() != g.num_states() {
            return Err(Error::IncompatiblePolicy(format!(
                "{} parameters for {} states",
                self.theta.len(),
                g.num_states()
            )));
        }
        let (lo, hi) = g
            .base
            .action_model
            .interval()
            .ok_or_else(|| Error::Validation("parametric policies require a grid action model".into()))?;
        for (s, &t) in self.theta.iter().enumerate() {
            if !(t > lo && t < hi) {
                return Err(Error::OutOfDomain {
                    action: t,
                    reason: format!("parameter for state {s} must lie strictly inside ({lo}, {hi})"),
                });
            }
        }
        Ok(())
    }

    fn as_policy(&self) -> Policy {
        Policy::Deterministic { actions: self.theta.clone() }
    }
}

/// Unnormalized discounted state occupancy from the initial distribution;
/// sums to `1 / (1 - gamma)`.
#[derive(Clone, Debug)]
pub struct OccupancyWeights {
    pub rho: Vec<f64>,
}

/// Exact gradients and objective value for one parameter pair.
#[derive(Clone, Debug)]
pub struct GradReport {
    pub grad_agent: Vec<f64>,
    pub grad_adversary: Vec<f64>,
    pub objective: f64,
}

fn check_pair(g: &RobustGame, agent: &ParamPolicy, adversary: &ParamPolicy) -> Result<()> {
    if agent.owner != Owner::Agent || adversary.owner != Owner::Adversary {
        return Err(Error::Validation("parameter owners do not match their roles".into()));
    }
    agent.validate(g)?;
    adversary.validate(g)
}

fn joint(agent: &ParamPolicy, adversary: &ParamPolicy) -> JointPolicy {
    JointPolicy { agent: agent.as_policy(), adversary: adversary.as_policy() }
}

/// `J = p1 . v` for the joint policy of the two parameter vectors.
pub fn objective(g: &RobustGame, agent: &ParamPolicy, adversary: &ParamPolicy) -> Result<f64> {
    check_pair(g, agent, adversary)?;
    let v = evaluate_joint(g, &joint(agent, adversary))?;
    Ok(g.base
        .initial_distribution
        .iter()
        .zip(&v.values)
        .map(|(p, v)| p * v)
        .sum())
}

/// Discounted occupancy of the joint policy's induced chain, by linear solve
/// of `(I - gamma P^T) rho = p1`.
pub fn occupancy(g: &RobustGame, jp: &JointPolicy) -> Result<OccupancyWeights> {
    let (_, dynamics) = induced_reward_dynamics(g, jp)?;
    let n = g.num_states();
    let gamma = g.base.gamma;
    let a = DMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        // transpose: entry (i, j) of P^T is P[j][i]
        id - gamma * dynamics[j][i]
    });
    let rhs = DVector::from_column_slice(&g.base.initial_distribution);
    let rho = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("singular occupancy system".into()))?;
    let rho: Vec<f64> = rho.iter().copied().collect();
    let total: f64 = rho.iter().sum();
    if (total - 1.0 / (1.0 - gamma)).abs() > 1e-8 {
        return Err(Error::Numerical(format!(
            "occupancy mass {total} differs from 1/(1-gamma)"
        )));
    }
    if rho.iter().any(|&x| x < -1e-10) {
        return Err(Error::Numerical("negative occupancy weight".into()));
    }
    Ok(OccupancyWeights { rho })
}

/// Exact gradients of the objective with respect to both parameter vectors.
///
/// For each state the action-derivative of the one-step backup
/// `Q(s, a) = r(s, a) + gamma P(.|s, a) . v` is taken at the executed action
/// (each player's own action under replacement, the mixed action under
/// noise), then weighted by the occupancy and the player's mixing weight.
pub fn exact_gradient(g: &RobustGame, agent: &ParamPolicy, adversary: &ParamPolicy) -> Result<GradReport> {
    check_pair(g, agent, adversary)?;
    let jp = joint(agent, adversary);
    let v = evaluate_joint(g, &jp)?;
    let occ = occupancy(g, &jp)?;
    let objective = g
        .base
        .initial_distribution
        .iter()
        .zip(&v.values)
        .map(|(p, v)| p * v)
        .sum();
    let gamma = g.base.gamma;
    let dq = |s: usize, a: f64| -> Result<f64> {
        let mut slope = g.base.reward_slope(s, a)?;
        let trans_slope = g.base.transition_slope(s, a)?;
        slope += gamma * trans_slope.iter().zip(&v.values).map(|(d, v)| d * v).sum::<f64>();
        Ok(slope)
    };
    let ns = g.num_states();
    let mut grad_agent = vec![0.0; ns];
    let mut grad_adversary = vec![0.0; ns];
    for s in 0..ns {
        match g.kind {
            RobustKind::Pr => {
                grad_agent[s] = (1.0 - g.alpha) * occ.rho[s] * dq(s, agent.theta[s])?;
                grad_adversary[s] = g.alpha * occ.rho[s] * dq(s, adversary.theta[s])?;
            }
            RobustKind::Nr => {
                let mixed = (1.0 - g.alpha) * agent.theta[s] + g.alpha * adversary.theta[s];
                let slope = dq(s, mixed)?;
                grad_agent[s] = (1.0 - g.alpha) * occ.rho[s] * slope;
                grad_adversary[s] = g.alpha * occ.rho[s] * slope;
            }
        }
    }
    Ok(GradReport { grad_agent, grad_adversary, objective })
}

/// Alternating-ascent configuration: `agent_steps` agent updates per single
/// adversary update (reversed under `swap_roles`).
#[derive(Clone, Debug)]
pub struct TrainConfig {
    pub agent_steps: usize,
    pub lr_agent: f64,
    pub lr_adversary: f64,
    pub max_outer: usize,
    pub grad_tol: f64,
    pub swap_roles: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            agent_steps: 5,
            lr_agent: 0.1,
            lr_adversary: 0.1,
            max_outer: 2000,
            grad_tol: 1e-7,
            swap_roles: false,
        }
    }
}

/// Training outcome; `converged` reports whether both gradient sup-norms fell
/// below the threshold before the outer-step budget ran out.
#[derive(Clone, Debug)]
pub struct TrainReport {
    pub agent: ParamPolicy,
    pub adversary: ParamPolicy,
    /// Objective value after each outer step.
    pub objective_trace: Vec<f64>,
    pub converged: bool,
}

const INTERIOR_MARGIN: f64 = 1e-6;

fn clamp_interior(theta: &mut [f64], lo: f64, hi: f64) {
    for t in theta.iter_mut() {
        *t = t.clamp(lo + INTERIOR_MARGIN, hi - INTERIOR_MARGIN);
    }
}

/// Gradient evaluation with automatic retreat from knot singularities: when
/// an evaluation action lands on a knot, both parameter vectors are nudged
/// toward the interval midpoint and the computation retried.
fn gradient_nudging(
    g: &RobustGame,
    agent: &mut ParamPolicy,
    adversary: &mut ParamPolicy,
) -> Result<GradReport> {
    let (lo, hi) = g.base.action_model.interval().unwrap();
    let mid = 0.5 * (lo + hi);
    for attempt in 0..8 {
        match exact_gradient(g, agent, adversary) {
            Err(Error::KnotSingularity { .. }) => {
                let nudge = 1e-7 * 10f64.powi(attempt);
                for t in agent.theta.iter_mut().chain(adversary.theta.iter_mut()) {
                    *t += nudge * if *t <= mid { 1.0 } else { -1.0 };
                }
                clamp_interior(&mut agent.theta, lo, hi);
                clamp_interior(&mut adversary.theta, lo, hi);
            }
            other => return other,
        }
    }
    exact_gradient(g, agent, adversary)
}

/// Alternating gradient ascent/descent on the two parameter vectors,
/// projected to the interior of the action interval after every step.
pub fn alternating_train(
    g: &RobustGame,
    agent_init: ParamPolicy,
    adversary_init: ParamPolicy,
    cfg: &TrainConfig,
) -> Result<TrainReport> {
    if cfg.agent_steps == 0 || cfg.max_outer == 0 {
        return Err(Error::Validation("step counts must be >= 1".into()));
    }
    if !(cfg.lr_agent > 0.0 && cfg.lr_adversary > 0.0 && cfg.grad_tol > 0.0) {
        return Err(Error::Validation("learning rates and grad_tol must be positive".into()));
    }
    check_pair(g, &agent_init, &adversary_init)?;
    let (lo, hi) = g.base.action_model.interval().unwrap();
    let mut agent = agent_init;
    let mut adversary = adversary_init;
    let mut trace = Vec::with_capacity(cfg.max_outer);
    let mut converged = false;
    for _ in 0..cfg.max_outer {
        // Inner repeated steps for one player, single step for the other.
        let (inner_is_agent, inner_steps) = if cfg.swap_roles {
            (false, cfg.agent_steps)
        } else {
            (true, cfg.agent_steps)
        };
        for _ in 0..inner_steps {
            let rep = gradient_nudging(g, &mut agent, &mut adversary)?;
            if inner_is_agent {
                for (t, d) in agent.theta.iter_mut().zip(&rep.grad_agent) {
                    *t += cfg.lr_agent * d;
                }
                clamp_interior(&mut agent.theta, lo, hi);
            } else {
                for (t, d) in adversary.theta.iter_mut().zip(&rep.grad_adversary) {
                    *t -= cfg.lr_adversary * d;
                }
                clamp_interior(&mut adversary.theta, lo, hi);
            }
        }
        let rep = gradient_nudging(g, &mut agent, &mut adversary)?;
        if inner_is_agent {
            for (t, d) in adversary.theta.iter_mut().zip(&rep.grad_adversary) {
                *t -= cfg.lr_adversary * d;
            }
            clamp_interior(&mut adversary.theta, lo, hi);
        } else {
            for (t, d) in agent.theta.iter_mut().zip(&rep.grad_agent) {
                *t += cfg.lr_agent * d;
            }
            clamp_interior(&mut agent.theta, lo, hi);
        }
        let rep = gradient_nudging(g, &mut agent, &mut adversary)?;
        trace.push(rep.objective);
        let ga = rep.grad_agent.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let gb = rep.grad_adversary.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if ga <= cfg.grad_tol && gb <= cfg.grad_tol {
            converged = true;
            break;
        }
    }
    Ok(TrainReport { agent, adversary, objective_trace: trace, converged })
}
