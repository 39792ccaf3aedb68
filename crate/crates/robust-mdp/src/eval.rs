//! Robustness evaluation: adversarial best-response values for fixed
//! policies, random-perturbation values, and sweep reports over mixing
//! weights and noise probabilities, with CSV / JSON output.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{evaluate_joint, JointPolicy, RobustGame, RobustKind, ValueFn};
use crate::model::{MdpModel, Policy};
use crate::par;
use crate::solve::{self, SolveConfig, SolverChoice};

/// What to sweep: mixing weights per criterion, and noise probabilities for
/// the perturbation evaluation of each solved policy.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepSpec {
    pub alphas: Vec<f64>,
    pub noise_probs: Vec<f64>,
    pub kinds: Vec<RobustKind>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() || self.kinds.is_empty() {
            return Err(Error::Validation("sweep needs at least one alpha and one kind".into()));
        }
        for &a in self.alphas.iter().chain(&self.noise_probs) {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::Validation(format!("sweep value {a} not in [0, 1]")));
            }
        }
        Ok(())
    }
}

/// One sweep result. Robust-solve rows carry `alpha` only; perturbation rows
/// carry `noise_prob` and, for solved policies, the `alpha` they were trained
/// at (`kind` is "baseline" for the non-robust policy). Failed rows keep the
/// error message and no values.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvalRow {
    pub kind: String,
    pub alpha: Option<f64>,
    pub noise_prob: Option<f64>,
    pub value_at_p1: Option<f64>,
    pub worst_state_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Robust value of a fixed agent: the adversary's exact best response.
pub fn best_response_value(g: &RobustGame, agent: &Policy) -> Result<ValueFn> {
    let (v, _) = solve::adversary_best_response(g, agent, 1e-9)?;
    Ok(ValueFn { values: v })
}

/// Value of the agent when, with probability `p`, a uniformly random
/// tabulated action replaces the chosen one — a replacement game against the
/// uniform stochastic adversary, evaluated exactly.
pub fn random_perturbation_value(m: &MdpModel, agent: &Policy, p: f64) -> Result<ValueFn> {
    let g = RobustGame::new(m.clone(), RobustKind::Pr, p)?;
    let jp = JointPolicy { agent: agent.clone(), adversary: Policy::uniform_stochastic(m) };
    evaluate_joint(&g, &jp)
}

fn at_p1(m: &MdpModel, v: &ValueFn) -> f64 {
    m.initial_distribution.iter().zip(&v.values).map(|(p, v)| p * v).sum()
}

fn worst(v: &ValueFn) -> f64 {
    v.values.iter().fold(f64::INFINITY, |m, &x| m.min(x))
}

fn ok_row(kind: String, alpha: Option<f64>, noise: Option<f64>, m: &MdpModel, v: &ValueFn) -> EvalRow {
    EvalRow {
        kind,
        alpha,
        noise_prob: noise,
        value_at_p1: Some(at_p1(m, v)),
        worst_state_value: Some(worst(v)),
        error: None,
    }
}

fn failed_row(kind: String, alpha: Option<f64>, noise: Option<f64>, err: &Error) -> EvalRow {
    EvalRow {
        kind,
        alpha,
        noise_prob: noise,
        value_at_p1: None,
        worst_state_value: None,
        error: Some(err.to_string()),
    }
}

/// Runs the full sweep: one robust solve per (kind, alpha), then for every
/// noise probability an exact perturbation evaluation of the non-robust
/// baseline and of each solved policy. Row order follows the `SweepSpec` lists;
/// solves run concurrently.
pub fn run_sweep(m: &MdpModel, spec: &SweepSpec, solver: SolverChoice) -> Result<Vec<EvalRow>> {
    spec.validate()?;
    m.validate()?;
    let cfg = SolveConfig::default();

    // Non-robust baseline: the plain optimum (a replacement game at alpha 0).
    let baseline_game = RobustGame::new(m.clone(), RobustKind::Pr, 0.0)?;
    let baseline = solve::solve_with(&baseline_game, solver, &cfg)?;

    let jobs: Vec<(RobustKind, f64)> = spec
        .kinds
        .iter()
        .flat_map(|&k| spec.alphas.iter().map(move |&a| (k, a)))
        .collect();
    let solved: Vec<(RobustKind, f64, Result<(ValueFn, Policy)>)> = par::map_indexed(jobs.len(), |i| {
        let (kind, alpha) = jobs[i];
        let out = RobustGame::new(m.clone(), kind, alpha)
            .and_then(|g| solve::solve_with(&g, solver, &cfg))
            .map(|rep| (rep.value, rep.agent_policy));
        (jobs[i].0, jobs[i].1, out)
    });

    let mut rows = Vec::new();
    for (kind, alpha, out) in &solved {
        match out {
            Ok((v, _)) => rows.push(ok_row(kind.to_string(), Some(*alpha), None, m, v)),
            Err(e) => rows.push(failed_row(kind.to_string(), Some(*alpha), None, e)),
        }
    }
    for &p in &spec.noise_probs {
        match random_perturbation_value(m, &baseline.agent_policy, p) {
            Ok(v) => rows.push(ok_row("baseline".into(), None, Some(p), m, &v)),
            Err(e) => rows.push(failed_row("baseline".into(), None, Some(p), &e)),
        }
        for (kind, alpha, out) in &solved {
            let row = match out {
                Ok((_, policy)) => match random_perturbation_value(m, policy, p) {
                    Ok(v) => ok_row(kind.to_string(), Some(*alpha), Some(p), m, &v),
                    Err(e) => failed_row(kind.to_string(), Some(*alpha), Some(p), &e),
                },
                Err(e) => failed_row(kind.to_string(), Some(*alpha), Some(p), e),
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Formats a float with 17 significant digits, enough to round-trip f64.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Writes rows as CSV with the fixed column order
/// `kind,alpha,noise_prob,value_at_p1,worst_state_value`; absent fields stay
/// empty, failed rows leave the value columns empty.
pub fn write_csv<W: Write>(rows: &[EvalRow], mut w: W) -> Result<()> {
    writeln!(w, "kind,alpha,noise_prob,value_at_p1,worst_state_value")?;
    for row in rows {
        let opt = |x: Option<f64>| x.map(format_value).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{}",
            csv_field(&row.kind),
            opt(row.alpha),
            opt(row.noise_prob),
            opt(row.value_at_p1),
            opt(row.worst_state_value),
        )?;
    }
    Ok(())
}

/// JSON mirror of the CSV with run metadata.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepReport {
    pub version: String,
    pub seed: Option<u64>,
    pub tolerance: f64,
    pub rows: Vec<EvalRow>,
}

impl SweepReport {
    pub fn new(rows: Vec<EvalRow>, seed: Option<u64>, tolerance: f64) -> SweepReport {
        SweepReport {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            tolerance,
            rows,
        }
    }
}
