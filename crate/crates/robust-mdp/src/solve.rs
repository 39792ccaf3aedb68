//! Solvers for robust games: value iteration, policy iteration for the
//! replacement (PR) criterion with optional soft adversary updates, generic
//! zero-sum policy iteration, and brute-force duality oracles.
//!
//! All solvers report convergence telemetry: the per-iteration sup-norm
//! residual, an optional distance trace against a supplied reference value,
//! and a certified bound on the distance to the true fixed point derived from
//! the final Bellman residual (`||v - Tv|| / (1 - gamma)`).

use crate::error::{Error, Result};
use crate::game::{
    bellman_minimax_generic, bellman_minimax_pr, game_reward_dynamics, payoff_matrix, q_table,
    solve_discounted, RobustGame, RobustKind, ValueFn,
};
use crate::matrix_game::solve_matrix_game;
use crate::model::{ActionModel, MdpModel, Policy};
use crate::par;

/// Solver configuration shared by all iteration schemes.
#[derive(Clone, Debug)]
pub struct SolveConfig {
    /// Sup-norm stopping threshold for the outer iteration.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Soft step size for adversary mixing; 1 recovers the hard update.
    pub eta: f64,
    /// Tolerance for the inner fixed-opponent MDP solves.
    pub inner_solver_tolerance: f64,
    /// Optional reference value; when present the report carries a
    /// per-iteration distance-to-reference trace.
    pub reference: Option<ValueFn>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            tolerance: 1e-8,
            max_iterations: 10_000,
            eta: 1.0,
            inner_solver_tolerance: 1e-9,
            reference: None,
        }
    }
}

impl SolveConfig {
    fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) || !(self.inner_solver_tolerance > 0.0) {
            return Err(Error::Validation("tolerances must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Validation("max_iterations must be >= 1".into()));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::Validation(format!("eta {} not in (0, 1]", self.eta)));
        }
        Ok(())
    }
}

/// Outcome of a solver run.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub value: ValueFn,
    pub agent_policy: Policy,
    pub adversary_policy: Policy,
    /// Per-iteration `||v_k - v_{k-1}||_inf`.
    pub error_trace: Vec<f64>,
    /// Per-iteration `||v_k - v_ref||_inf` when a reference was supplied.
    pub ref_trace: Option<Vec<f64>>,
    pub iterations: usize,
    /// Certified upper bound on `||v - v*||_inf`, from the final minimax
    /// Bellman residual divided by `1 - gamma`.
    pub certified_gap: f64,
}

struct Trace {
    error: Vec<f64>,
    reference: Option<(ValueFn, Vec<f64>)>,
}

impl Trace {
    fn new(cfg: &SolveConfig) -> Trace {
        Trace {
            error: Vec::new(),
            reference: cfg.reference.clone().map(|r| (r, Vec::new())),
        }
    }

    fn push(&mut self, v: &ValueFn, prev: &ValueFn) -> f64 {
        let res = v.sup_dist(prev);
        self.error.push(res);
        if let Some((r, trace)) = &mut self.reference {
            trace.push(v.sup_dist(r));
        }
        res
    }

    fn into_parts(self) -> (Vec<f64>, Option<Vec<f64>>) {
        (self.error, self.reference.map(|(_, t)| t))
    }
}

fn certified_gap(g: &RobustGame, v: &ValueFn) -> Result<f64> {
    let tv = match g.kind {
        RobustKind::Pr => bellman_minimax_pr(g, v)?.0,
        RobustKind::Nr => bellman_minimax_generic(g, v)?.0,
    };
    Ok(v.sup_dist(&tv) / (1.0 - g.base.gamma))
}

/// Iterates the minimax Bellman operator to its fixed point.
pub fn value_iteration(g: &RobustGame, cfg: &SolveConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let mut v = ValueFn::zeros(g.num_states());
    let mut trace = Trace::new(cfg);
    for k in 0..cfg.max_iterations {
        let (tv, agent, adversary) = match g.kind {
            RobustKind::Pr => bellman_minimax_pr(g, &v)?,
            RobustKind::Nr => bellman_minimax_generic(g, &v)?,
        };
        let res = trace.push(&tv, &v);
        v = tv;
        if res <= cfg.tolerance {
            let gap = certified_gap(g, &v)?;
            let (error_trace, ref_trace) = trace.into_parts();
            return Ok(SolveReport {
                value: v,
                agent_policy: agent,
                adversary_policy: adversary,
                error_trace,
                ref_trace,
                iterations: k + 1,
                certified_gap: gap,
            });
        }
    }
    Err(Error::NotConverged {
        iterations: cfg.max_iterations,
        residual: *trace.error.last().unwrap_or(&f64::INFINITY),
    })
}

// ---------------------------------------------------------------------------
// Inner solver: finite candidate-action decision problems.

/// A per-state candidate-action decision problem (the inner MDP faced by one
/// player when the other is fixed). Candidate sets may differ per state.
struct Dp {
    gamma: f64,
    /// Candidate action values, per state.
    actions: Vec<Vec<f64>>,
    reward: Vec<Vec<f64>>,
    trans: Vec<Vec<Vec<f64>>>,
}

impl Dp {
    fn num_states(&self) -> usize {
        self.reward.len()
    }

    fn greedy(&self, v: &[f64], maximize: bool) -> Vec<usize> {
        (0..self.num_states())
            .map(|s| {
                let mut best = 0;
                let mut best_q = f64::NAN;
                for j in 0..self.reward[s].len() {
                    let pv: f64 = self.trans[s][j].iter().zip(v).map(|(p, v)| p * v).sum();
                    let q = self.reward[s][j] + self.gamma * pv;
                    let better = best_q.is_nan() || if maximize { q > best_q } else { q < best_q };
                    if better {
                        best = j;
                        best_q = q;
                    }
                }
                best
            })
            .collect()
    }

    fn evaluate(&self, idx: &[usize]) -> Result<Vec<f64>> {
        let r: Vec<f64> = idx.iter().enumerate().map(|(s, &j)| self.reward[s][j]).collect();
        let p: Vec<Vec<f64>> = idx
            .iter()
            .enumerate()
            .map(|(s, &j)| self.trans[s][j].clone())
            .collect();
        solve_discounted(&p, &r, self.gamma)
    }

    /// Optimal value and greedy selection: value iteration to `tol`, then
    /// policy iteration (exact linear-solve evaluation) until the greedy
    /// selection is stable, so the returned value is exact.
    fn solve(&self, maximize: bool, tol: f64, max_iterations: usize) -> Result<(Vec<f64>, Vec<usize>)> {
        let ns = self.num_states();
        let mut v = vec![0.0; ns];
        // Residual threshold guaranteeing value error <= tol.
        let shrink = tol * (1.0 - self.gamma) / self.gamma.max(1e-12);
        let mut converged = false;
        let mut last_res = f64::INFINITY;
        for _ in 0..max_iterations {
            let idx = self.greedy(&v, maximize);
            let next: Vec<f64> = (0..ns)
                .map(|s| {
                    let j = idx[s];
                    let pv: f64 = self.trans[s][j].iter().zip(&v).map(|(p, v)| p * v).sum();
                    self.reward[s][j] + self.gamma * pv
                })
                .collect();
            last_res = v
                .iter()
                .zip(&next)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            v = next;
            if last_res <= shrink {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NotConverged { iterations: max_iterations, residual: last_res });
        }
        // Exact refinement: Howard iterations terminate finitely.
        let mut idx = self.greedy(&v, maximize);
        for _ in 0..1000 {
            let exact = self.evaluate(&idx)?;
            let next_idx = self.greedy(&exact, maximize);
            if next_idx == idx {
                return Ok((exact, idx));
            }
            idx = next_idx;
        }
        Err(Error::NotConverged { iterations: max_iterations + 1000, residual: last_res })
    }

    /// Pure policy iteration from scratch: exact per-step evaluation, exact
    /// optimum on termination. Used by the enumeration oracle where a value-
    /// iteration warm-up would dominate the runtime.
    fn solve_exact(&self, maximize: bool) -> Result<Vec<f64>> {
        let mut idx = self.greedy(&vec![0.0; self.num_states()], maximize);
        for _ in 0..10_000 {
            let v = self.evaluate(&idx)?;
            let next = self.greedy(&v, maximize);
            if next == idx {
                return Ok(v);
            }
            idx = next;
        }
        Err(Error::NotConverged { iterations: 10_000, residual: f64::NAN })
    }

    fn policy(&self, idx: &[usize]) -> Policy {
        Policy::Deterministic {
            actions: idx.iter().enumerate().map(|(s, &j)| self.actions[s][j]).collect(),
        }
    }

    fn from_model(m: &MdpModel) -> Dp {
        let na = m.num_actions();
        let actions = (0..na).map(|j| m.action_model.action_value(j)).collect::<Vec<_>>();
        Dp {
            gamma: m.gamma,
            actions: vec![actions; m.num_states],
            reward: m.reward.clone(),
            trans: m.transitions.clone(),
        }
    }
}

const INNER_MAX_ITERATIONS: usize = 200_000;

/// Candidate actions for a player best-responding with the other side's
/// per-state support fixed. For the replacement criterion the payoff is
/// piecewise-linear in the tabulated coordinate, so the tabulated set is
/// exact. For the noisy criterion the response ranges over the continuum;
/// optima sit at interval endpoints or where the mixed action crosses a knot,
/// so those finitely many breakpoints are exact too.
fn response_candidates(g: &RobustGame, own_weight: f64, other_support: &[f64]) -> Vec<f64> {
    let am = &g.base.action_model;
    match (g.kind, am) {
        (RobustKind::Pr, _) | (_, ActionModel::Finite { .. }) => {
            (0..am.num_actions()).map(|j| am.action_value(j)).collect()
        }
        (RobustKind::Nr, ActionModel::Grid { knots }) => {
            let (lo, hi) = (knots[0], knots[knots.len() - 1]);
            let mut c = vec![lo, hi];
            if own_weight > 1e-12 {
                let other_weight = 1.0 - own_weight;
                for &x in other_support {
                    for &k in knots {
                        let cand = (k - other_weight * x) / own_weight;
                        if cand >= lo - 1e-12 && cand <= hi + 1e-12 {
                            c.push(cand.clamp(lo, hi));
                        }
                    }
                }
            }
            c.sort_by(|a, b| a.partial_cmp(b).unwrap());
            c.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
            c
        }
    }
}

/// Inner decision problem of the adversary when the agent is fixed.
fn adversary_response_dp(g: &RobustGame, agent: &Policy) -> Result<Dp> {
    agent.validate(&g.base)?;
    let ns = g.num_states();
    let mut dp = Dp { gamma: g.base.gamma, actions: Vec::new(), reward: Vec::new(), trans: Vec::new() };
    for s in 0..ns {
        let support = agent.support(&g.base, s);
        let sup_actions: Vec<f64> = support.iter().map(|&(a, _)| a).collect();
        let cands = response_candidates(g, g.alpha, &sup_actions);
        let mut r_row = Vec::with_capacity(cands.len());
        let mut p_row = Vec::with_capacity(cands.len());
        for &b in &cands {
            let mut r = 0.0;
            let mut p = vec![0.0; ns];
            for &(a, w) in &support {
                let (ri, pi) = game_reward_dynamics(g, s, a, b)?;
                r += w * ri;
                for (dst, x) in p.iter_mut().zip(pi) {
                    *dst += w * x;
                }
            }
            r_row.push(r);
            p_row.push(p);
        }
        dp.actions.push(cands);
        dp.reward.push(r_row);
        dp.trans.push(p_row);
    }
    Ok(dp)
}

/// Inner decision problem of the agent when the adversary is fixed.
fn agent_response_dp(g: &RobustGame, adversary: &Policy) -> Result<Dp> {
    adversary.validate(&g.base)?;
    let ns = g.num_states();
    let mut dp = Dp { gamma: g.base.gamma, actions: Vec::new(), reward: Vec::new(), trans: Vec::new() };
    for s in 0..ns {
        let support = adversary.support(&g.base, s);
        let sup_actions: Vec<f64> = support.iter().map(|&(b, _)| b).collect();
        let cands = response_candidates(g, 1.0 - g.alpha, &sup_actions);
        let mut r_row = Vec::with_capacity(cands.len());
        let mut p_row = Vec::with_capacity(cands.len());
        for &a in &cands {
            let mut r = 0.0;
            let mut p = vec![0.0; ns];
            for &(b, w) in &support {
                let (ri, pi) = game_reward_dynamics(g, s, a, b)?;
                r += w * ri;
                for (dst, x) in p.iter_mut().zip(pi) {
                    *dst += w * x;
                }
            }
            r_row.push(r);
            p_row.push(p);
        }
        dp.actions.push(cands);
        dp.reward.push(r_row);
        dp.trans.push(p_row);
    }
    Ok(dp)
}

/// Best-response value of the adversary's decision problem against a fixed
/// agent (the agent's robust value).
pub(crate) fn adversary_best_response(g: &RobustGame, agent: &Policy, tol: f64) -> Result<(Vec<f64>, Policy)> {
    let dp = adversary_response_dp(g, agent)?;
    let (v, idx) = dp.solve(false, tol, INNER_MAX_ITERATIONS)?;
    let policy = dp.policy(&idx);
    Ok((v, policy))
}

// ---------------------------------------------------------------------------
// Replacement-criterion policy iteration.

/// Single-agent MDP faced by the agent when the adversary of a replacement
/// (PR) game is fixed: `r~(s,a) = (1-alpha) r(s,a) + alpha r_adv(s)` and the
/// analogous dynamics mixture.
pub fn induced_agent_mdp(g: &RobustGame, adversary: &Policy) -> Result<MdpModel> {
    if g.kind != RobustKind::Pr {
        return Err(Error::Validation("induced agent MDP only applies to PR games".into()));
    }
    adversary.validate(&g.base)?;
    let ns = g.num_states();
    let na = g.num_actions();
    let w = g.alpha;
    let mut reward = vec![vec![0.0; na]; ns];
    let mut transitions = vec![vec![vec![0.0; ns]; na]; ns];
    for s in 0..ns {
        let r_adv = adversary.expected_reward(&g.base, s)?;
        let p_adv = adversary.expected_transition(&g.base, s)?;
        for a in 0..na {
            reward[s][a] = (1.0 - w) * g.base.reward[s][a] + w * r_adv;
            for sp in 0..ns {
                transitions[s][a][sp] = (1.0 - w) * g.base.transitions[s][a][sp] + w * p_adv[sp];
            }
        }
    }
    let m = MdpModel {
        num_states: ns,
        gamma: g.base.gamma,
        action_model: g.base.action_model.clone(),
        reward,
        transitions,
        initial_distribution: g.base.initial_distribution.clone(),
    };
    m.validate()?;
    Ok(m)
}

fn greedy_indices(q: &[Vec<f64>], maximize: bool) -> Vec<usize> {
    q.iter()
        .map(|qs| {
            let mut best = 0;
            for (j, &x) in qs.iter().enumerate().skip(1) {
                if (maximize && x > qs[best]) || (!maximize && x < qs[best]) {
                    best = j;
                }
            }
            best
        })
        .collect()
}

/// Policy iteration for replacement games: the agent exactly solves its
/// induced MDP against the current adversary, then the adversary switches to
/// the per-state greedy minimizer; terminates when the adversary's policy is
/// stable or the value residual drops below tolerance.
///
/// With `swap_updates` the roles reverse: the adversary solves its response
/// MDP exactly and the agent takes the greedy step.
pub fn pr_policy_iteration(g: &RobustGame, cfg: &SolveConfig, swap_updates: bool) -> Result<SolveReport> {
    cfg.validate()?;
    if g.kind != RobustKind::Pr {
        return Err(Error::Validation("policy iteration over replacements requires a PR game".into()));
    }
    let ns = g.num_states();
    let mut outer_idx = vec![0usize; ns]; // adversary normally, agent when swapped
    let mut trace = Trace::new(cfg);
    let mut v_prev = ValueFn::zeros(ns);
    for k in 0..cfg.max_iterations {
        let outer_policy = Policy::from_indices(&g.base, &outer_idx);
        let (v, inner_policy) = if swap_updates {
            let (v, adv) = adversary_best_response(g, &outer_policy, cfg.inner_solver_tolerance)?;
            (v, adv)
        } else {
            let m = induced_agent_mdp(g, &outer_policy)?;
            let dp = Dp::from_model(&m);
            let (v, idx) = dp.solve(true, cfg.inner_solver_tolerance, INNER_MAX_ITERATIONS)?;
            (v, dp.policy(&idx))
        };
        let v = ValueFn { values: v };
        let res = trace.push(&v, &v_prev);
        let q = q_table(&g.base, &v.values);
        let next_idx = greedy_indices(&q, swap_updates);
        let stable = next_idx == outer_idx;
        if stable || (k > 0 && res <= cfg.tolerance) {
            let gap = certified_gap(g, &v)?;
            let (error_trace, ref_trace) = trace.into_parts();
            let (agent_policy, adversary_policy) = if swap_updates {
                (outer_policy, inner_policy)
            } else {
                (inner_policy, outer_policy)
            };
            return Ok(SolveReport {
                value: v,
                agent_policy,
                adversary_policy,
                error_trace,
                ref_trace,
                iterations: k + 1,
                certified_gap: gap,
            });
        }
        outer_idx = next_idx;
        v_prev = v;
    }
    Err(Error::NotConverged {
        iterations: cfg.max_iterations,
        residual: *trace.error.last().unwrap_or(&f64::INFINITY),
    })
}

/// Soft policy iteration for replacement games: the adversary mixes toward
/// the greedy minimizer with step `eta` instead of switching outright, which
/// contracts with coefficient `1 - eta + gamma * eta` per iteration.
pub fn soft_pr_policy_iteration(g: &RobustGame, cfg: &SolveConfig) -> Result<SolveReport> {
    cfg.validate()?;
    if g.kind != RobustKind::Pr {
        return Err(Error::Validation("policy iteration over replacements requires a PR game".into()));
    }
    let ns = g.num_states();
    let na = g.num_actions();
    // Point mass on the first tabulated action, matching the hard variant's
    // start so eta = 1 reproduces its iterates exactly.
    let mut nu: Vec<Vec<f64>> = vec![
        {
            let mut row = vec![0.0; na];
            row[0] = 1.0;
            row
        };
        ns
    ];
    let mut trace = Trace::new(cfg);
    let mut v_prev = ValueFn::zeros(ns);
    for k in 0..cfg.max_iterations {
        let adversary = Policy::Stochastic { probs: nu.clone() };
        let m = induced_agent_mdp(g, &adversary)?;
        let dp = Dp::from_model(&m);
        let (v, agent_idx) = dp.solve(true, cfg.inner_solver_tolerance, INNER_MAX_ITERATIONS)?;
        let v = ValueFn { values: v };
        let res = trace.push(&v, &v_prev);
        if k > 0 && res <= cfg.tolerance {
            let gap = certified_gap(g, &v)?;
            let (error_trace, ref_trace) = trace.into_parts();
            return Ok(SolveReport {
                value: v,
                agent_policy: dp.policy(&agent_idx),
                adversary_policy: adversary,
                error_trace,
                ref_trace,
                iterations: k + 1,
                certified_gap: gap,
            });
        }
        let q = q_table(&g.base, &v.values);
        let greedy = greedy_indices(&q, false);
        for s in 0..ns {
            for j in 0..na {
                nu[s][j] *= 1.0 - cfg.eta;
            }
            nu[s][greedy[s]] += cfg.eta;
        }
        v_prev = v;
    }
    Err(Error::NotConverged {
        iterations: cfg.max_iterations,
        residual: *trace.error.last().unwrap_or(&f64::INFINITY),
    })
}

/// Generic zero-sum policy iteration: the agent best-responds exactly to the
/// current mixed adversary, the adversary re-solves the per-state one-step
/// matrix game at the resulting value (softened by `soft` when given). Works
/// for both criteria; it is the primary solver for the noisy one.
pub fn zs_policy_iteration(g: &RobustGame, cfg: &SolveConfig, soft: Option<f64>) -> Result<SolveReport> {
    cfg.validate()?;
    let eta = soft.unwrap_or(1.0);
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Validation(format!("soft step {eta} not in (0, 1]")));
    }
    let ns = g.num_states();
    let na = g.num_actions();
    let mut nu: Vec<Vec<f64>> = vec![vec![1.0 / na as f64; na]; ns];
    let mut trace = Trace::new(cfg);
    let mut v_prev = ValueFn::zeros(ns);
    for k in 0..cfg.max_iterations {
        let adversary = Policy::Stochastic { probs: nu.clone() };
        let dp = agent_response_dp(g, &adversary)?;
        let (v, agent_idx) = dp.solve(true, cfg.inner_solver_tolerance, INNER_MAX_ITERATIONS)?;
        let v = ValueFn { values: v };
        let res = trace.push(&v, &v_prev);
        let games: Vec<Result<(Vec<f64>, Vec<f64>)>> = par::map_indexed(ns, |s| {
            let m = payoff_matrix(g, &v.values, s)?;
            let sol = solve_matrix_game(&m)?;
            Ok((sol.row_strategy, sol.col_strategy))
        });
        let mut rows = Vec::with_capacity(ns);
        let mut cols = Vec::with_capacity(ns);
        for r in games {
            let (p, q) = r?;
            rows.push(p);
            cols.push(q);
        }
        if k > 0 && res <= cfg.tolerance {
            let gap = certified_gap(g, &v)?;
            let agent_policy = match g.kind {
                // PR optima are deterministic; report the exact best response.
                RobustKind::Pr => dp.policy(&agent_idx),
                // NR optima are generally mixed; report the equilibrium rows
                // of the one-step games at the converged value.
                RobustKind::Nr => Policy::Stochastic { probs: rows },
            };
            let (error_trace, ref_trace) = trace.into_parts();
            return Ok(SolveReport {
                value: v,
                agent_policy,
                adversary_policy: adversary,
                error_trace,
                ref_trace,
                iterations: k + 1,
                certified_gap: gap,
            });
        }
        for s in 0..ns {
            for j in 0..na {
                nu[s][j] = (1.0 - eta) * nu[s][j] + eta * cols[s][j];
            }
        }
        v_prev = v;
    }
    Err(Error::NotConverged {
        iterations: cfg.max_iterations,
        residual: *trace.error.last().unwrap_or(&f64::INFINITY),
    })
}

// ---------------------------------------------------------------------------
// Brute-force duality oracle.

fn decode_policy(mut idx: usize, na: usize, ns: usize) -> Vec<usize> {
    let mut out = vec![0; ns];
    for slot in out.iter_mut() {
        *slot = idx % na;
        idx /= na;
    }
    out
}

/// Enumerates deterministic tabulated policies for one side and solves the
/// other side's best response exactly, returning the componentwise
/// max-min and min-max values over deterministic policies.
pub fn brute_force_duality(g: &RobustGame) -> Result<(Vec<f64>, Vec<f64>)> {
    let ns = g.num_states();
    let na = g.num_actions();
    if ns > 6 {
        return Err(Error::TooLarge(format!("{ns} states exceed the 6-state enumeration guard")));
    }
    if g.base.action_model.is_grid() && na > 7 {
        return Err(Error::TooLarge(format!("{na} knots exceed the 7-knot enumeration guard")));
    }
    let combos = na.checked_pow(ns as u32).filter(|&c| c <= 1_000_000).ok_or_else(|| {
        Error::TooLarge(format!("{na}^{ns} deterministic policies exceed the enumeration budget"))
    })?;

    let per_agent: Vec<Result<Vec<f64>>> = par::map_indexed(combos, |i| {
        let agent = Policy::from_indices(&g.base, &decode_policy(i, na, ns));
        let dp = adversary_response_dp(g, &agent)?;
        dp.solve_exact(false)
    });
    let mut maxmin = vec![f64::NEG_INFINITY; ns];
    for r in per_agent {
        for (m, x) in maxmin.iter_mut().zip(r?) {
            *m = m.max(x);
        }
    }

    let per_adv: Vec<Result<Vec<f64>>> = par::map_indexed(combos, |i| {
        let adversary = Policy::from_indices(&g.base, &decode_policy(i, na, ns));
        let dp = agent_response_dp(g, &adversary)?;
        dp.solve_exact(true)
    });
    let mut minmax = vec![f64::INFINITY; ns];
    for r in per_adv {
        for (m, x) in minmax.iter_mut().zip(r?) {
            *m = m.min(x);
        }
    }
    Ok((maxmin, minmax))
}

/// Which iteration scheme to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverChoice {
    ValueIteration,
    /// PR policy iteration; falls back to the zero-sum scheme for NR games.
    PolicyIteration,
    ZeroSum,
}

/// Dispatches to the chosen solver, routing policy iteration to the generic
/// zero-sum scheme when the criterion requires it.
pub fn solve_with(g: &RobustGame, choice: SolverChoice, cfg: &SolveConfig) -> Result<SolveReport> {
    match (choice, g.kind) {
        (SolverChoice::ValueIteration, _) => value_iteration(g, cfg),
        (SolverChoice::PolicyIteration, RobustKind::Pr) => pr_policy_iteration(g, cfg, false),
        (SolverChoice::PolicyIteration, RobustKind::Nr) | (SolverChoice::ZeroSum, _) => {
            zs_policy_iteration(g, cfg, None)
        }
    }
}

/// Single-state noisy game with quadratic per-stage reward `r(a) = a^2`
/// tabulated on a symmetric knot grid, at mixing weight 0.25. The grid is
/// chosen so that the interesting mixed actions (`0.5` for max-min at 0.25,
/// `0.75` for min-max) are knots, making the piecewise-linear surrogate exact
/// exactly where the duality analysis samples it.
pub fn counterexample_model(gamma: f64) -> RobustGame {
    let knots = vec![-1.0, -0.75, -0.5, 0.0, 0.5, 0.75, 1.0];
    let reward: Vec<f64> = knots.iter().map(|a| a * a).collect();
    let n = knots.len();
    let m = MdpModel {
        num_states: 1,
        gamma,
        action_model: ActionModel::Grid { knots },
        reward: vec![reward],
        transitions: vec![vec![vec![1.0]; n]],
        initial_distribution: vec![1.0],
    };
    RobustGame::new(m, RobustKind::Nr, 0.25).unwrap()
}
