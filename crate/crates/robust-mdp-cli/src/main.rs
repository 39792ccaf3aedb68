//! Command-line front end: solving, evaluation, duality checks, gradient
//! verification, training, and instance generation for action-robust MDPs.
//!
//! Exit codes: 0 success, 1 validation/parse problems, 2 failure to converge,
//! 3 numerical failure. All numeric output uses 17 significant digits and is
//! byte-identical across identical invocations.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use robust_mdp::error::Error;
use robust_mdp::eval::{run_sweep, write_csv, SweepReport, SweepSpec};
use robust_mdp::grad::{alternating_train, exact_gradient, objective, Owner, ParamPolicy, TrainConfig};
use robust_mdp::model::{generate_random_model, load_model, ActionModel, MdpModel, Policy};
use robust_mdp::solve::{
    brute_force_duality, counterexample_model, pr_policy_iteration, soft_pr_policy_iteration,
    value_iteration, zs_policy_iteration, SolveConfig, SolveReport, SolverChoice,
};
use robust_mdp::{par, RobustGame, RobustKind};

#[derive(Parser)]
#[command(name = "robust-mdp", version, about = "Action-robust MDP solver and evaluator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Also write the primary output to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Suppress standard output (file emission still happens).
    #[arg(long, global = true)]
    quiet: bool,
    /// Cap solver-internal worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Pr,
    Nr,
}

impl From<KindArg> for RobustKind {
    fn from(k: KindArg) -> RobustKind {
        match k {
            KindArg::Pr => RobustKind::Pr,
            KindArg::Nr => RobustKind::Nr,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AlgoArg {
    /// Minimax value iteration.
    Vi,
    /// Policy iteration (PR; zero-sum scheme for NR).
    Pi,
    /// Soft policy iteration with step eta.
    SoftPi,
    /// Generic zero-sum policy iteration.
    ZsPi,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a robust game and print the equilibrium value and policies.
    Solve {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = AlgoArg::Vi)]
        algo: AlgoArg,
        /// Soft adversary step size for --algo soft-pi.
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        /// Swap which player takes the exact inner solve (PR policy iteration).
        #[arg(long)]
        swap: bool,
    },
    /// Evaluate a fixed agent policy: adversarial best response, or random
    /// perturbation when --noise-prob is given.
    Eval {
        #[arg(long)]
        model: PathBuf,
        /// Agent policy file (JSON, same schema the solver prints with --json-policy).
        #[arg(long)]
        policy: PathBuf,
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        noise_prob: Option<f64>,
    },
    /// Solve across mixing weights and evaluate under noise; emits CSV.
    Sweep {
        #[arg(long)]
        model: PathBuf,
        /// Comma-separated list, e.g. "pr,nr".
        #[arg(long, default_value = "pr")]
        kinds: String,
        /// Comma-separated mixing weights.
        #[arg(long)]
        alphas: String,
        /// Comma-separated noise probabilities.
        #[arg(long, default_value = "")]
        noise_probs: String,
        #[arg(long, value_enum, default_value_t = AlgoArg::Vi)]
        algo: AlgoArg,
        /// Also write the JSON mirror of the report here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Recorded in the report metadata.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare exact policy gradients against central finite differences.
    Gradcheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 3)]
        states: usize,
    },
    /// Alternating gradient training of tabular agent/adversary parameters.
    Train {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        alpha: f64,
        /// Agent steps per adversary step.
        #[arg(long, default_value_t = 5)]
        agent_steps: usize,
        #[arg(long, default_value_t = 0.05)]
        lr_agent: f64,
        #[arg(long, default_value_t = 0.05)]
        lr_adversary: f64,
        #[arg(long, default_value_t = 1000)]
        max_outer: usize,
        #[arg(long, default_value_t = 1e-6)]
        grad_tol: f64,
        /// Many adversary steps per agent step instead of the reverse.
        #[arg(long)]
        swap_roles: bool,
        /// Seed for the interior parameter initialization.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Brute-force deterministic max-min / min-max versus the game value.
    Duality {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        alpha: f64,
    },
    /// Duality analysis of the built-in quadratic single-state instance.
    Counterexample {
        #[arg(long, default_value_t = 0.25)]
        alpha: f64,
        #[arg(long, default_value_t = 0.9)]
        gamma: f64,
    },
    /// Generate a random model file.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        states: usize,
        /// Finite action count (mutually exclusive with --knots).
        #[arg(long)]
        actions: Option<usize>,
        /// Comma-separated knot grid (mutually exclusive with --actions).
        #[arg(long, allow_hyphen_values = true)]
        knots: Option<String>,
        /// Reward range "lo,hi".
        #[arg(long, default_value = "-1,1", allow_hyphen_values = true)]
        reward_range: String,
    },
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(|&x| fmt(x)).collect::<Vec<_>>().join(" ")
}

fn policy_text(name: &str, p: &Policy) -> String {
    match p {
        Policy::Deterministic { actions } => {
            format!("{name} (deterministic): {}\n", fmt_vec(actions))
        }
        Policy::Stochastic { probs } => {
            let mut out = format!("{name} (stochastic):\n");
            for (s, row) in probs.iter().enumerate() {
                let _ = writeln!(out, "  state {s}: {}", fmt_vec(row));
            }
            out
        }
    }
}

fn report_text(rep: &SolveReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "iterations: {}", rep.iterations);
    let _ = writeln!(out, "value: {}", fmt_vec(&rep.value.values));
    out.push_str(&policy_text("agent", &rep.agent_policy));
    out.push_str(&policy_text("adversary", &rep.adversary_policy));
    let _ = writeln!(out, "certified_gap: {}", fmt(rep.certified_gap));
    out
}

fn parse_f64_list(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad number {t:?}: {e}")))
        })
        .collect()
}

fn parse_kinds(s: &str) -> Result<Vec<RobustKind>, Error> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| match t.trim() {
            "pr" => Ok(RobustKind::Pr),
            "nr" => Ok(RobustKind::Nr),
            other => Err(Error::Parse(format!("unknown kind {other:?}"))),
        })
        .collect()
}

fn load_policy(path: &PathBuf) -> Result<Policy, Error> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("policy file: {e}")))
}

fn solver_choice(algo: AlgoArg) -> SolverChoice {
    match algo {
        AlgoArg::Vi => SolverChoice::ValueIteration,
        AlgoArg::Pi | AlgoArg::SoftPi => SolverChoice::PolicyIteration,
        AlgoArg::ZsPi => SolverChoice::ZeroSum,
    }
}

fn at_p1(m: &MdpModel, v: &[f64]) -> f64 {
    m.initial_distribution.iter().zip(v).map(|(p, v)| p * v).sum()
}

fn run(cli: &Cli) -> Result<String, Error> {
    match &cli.command {
        Command::Solve { model, kind, alpha, algo, eta, tol, max_iter, swap } => {
            let m = load_model(model)?;
            let g = RobustGame::new(m, (*kind).into(), *alpha)?;
            let cfg = SolveConfig {
                tolerance: *tol,
                max_iterations: *max_iter,
                eta: *eta,
                inner_solver_tolerance: *tol / 10.0,
                reference: None,
            };
            let rep = match algo {
                AlgoArg::Vi => value_iteration(&g, &cfg)?,
                AlgoArg::Pi => match g.kind {
                    RobustKind::Pr => pr_policy_iteration(&g, &cfg, *swap)?,
                    RobustKind::Nr => zs_policy_iteration(&g, &cfg, None)?,
                },
                AlgoArg::SoftPi => match g.kind {
                    RobustKind::Pr => soft_pr_policy_iteration(&g, &cfg)?,
                    RobustKind::Nr => zs_policy_iteration(&g, &cfg, Some(*eta))?,
                },
                AlgoArg::ZsPi => zs_policy_iteration(&g, &cfg, None)?,
            };
            Ok(report_text(&rep))
        }
        Command::Eval { model, policy, kind, alpha, noise_prob } => {
            let m = load_model(model)?;
            let agent = load_policy(policy)?;
            let v = if let Some(p) = noise_prob {
                robust_mdp::eval::random_perturbation_value(&m, &agent, *p)?
            } else {
                let kind = kind.ok_or_else(|| {
                    Error::Validation("--kind and --alpha are required without --noise-prob".into())
                })?;
                let alpha = alpha.ok_or_else(|| {
                    Error::Validation("--kind and --alpha are required without --noise-prob".into())
                })?;
                let g = RobustGame::new(m.clone(), kind.into(), alpha)?;
                robust_mdp::eval::best_response_value(&g, &agent)?
            };
            let mut out = String::new();
            let _ = writeln!(out, "value: {}", fmt_vec(&v.values));
            let _ = writeln!(out, "value_at_p1: {}", fmt(at_p1(&m, &v.values)));
            let worst = v.values.iter().fold(f64::INFINITY, |a, &b| a.min(b));
            let _ = writeln!(out, "worst_state_value: {}", fmt(worst));
            Ok(out)
        }
        Command::Sweep { model, kinds, alphas, noise_probs, algo, json, seed } => {
            let m = load_model(model)?;
            let spec = SweepSpec {
                alphas: parse_f64_list(alphas)?,
                noise_probs: parse_f64_list(noise_probs)?,
                kinds: parse_kinds(kinds)?,
            };
            let rows = run_sweep(&m, &spec, solver_choice(*algo))?;
            if let Some(path) = json {
                let report = SweepReport::new(rows.clone(), *seed, SolveConfig::default().tolerance);
                let text = serde_json::to_string_pretty(&report)
                    .map_err(|e| Error::Numerical(e.to_string()))?;
                std::fs::write(path, text)?;
            }
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf)?;
            Ok(String::from_utf8(buf).expect("CSV is UTF-8"))
        }
        Command::Gradcheck { seed, trials, states } => {
            let (max_err, checked) = gradcheck(*seed, *trials, *states)?;
            let mut out = String::new();
            let _ = writeln!(out, "coordinates_checked: {checked}");
            let _ = writeln!(out, "max_relative_error: {}", fmt(max_err));
            if max_err > 1e-5 {
                return Err(Error::Numerical(format!(
                    "gradient check failed: max relative error {max_err:.3e} exceeds 1e-5"
                )));
            }
            Ok(out)
        }
        Command::Train {
            model,
            kind,
            alpha,
            agent_steps,
            lr_agent,
            lr_adversary,
            max_outer,
            grad_tol,
            swap_roles,
            seed,
        } => {
            let m = load_model(model)?;
            let g = RobustGame::new(m, (*kind).into(), *alpha)?;
            let (lo, hi) = g.base.action_model.interval().ok_or_else(|| {
                Error::Validation("training requires a grid action model".into())
            })?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut draw = |_: usize| lo + (hi - lo) * rng.gen_range(0.05..0.95);
            let ns = g.num_states();
            let agent = ParamPolicy::new((0..ns).map(&mut draw).collect(), Owner::Agent);
            let adversary = ParamPolicy::new((0..ns).map(&mut draw).collect(), Owner::Adversary);
            let cfg = TrainConfig {
                agent_steps: *agent_steps,
                lr_agent: *lr_agent,
                lr_adversary: *lr_adversary,
                max_outer: *max_outer,
                grad_tol: *grad_tol,
                swap_roles: *swap_roles,
            };
            let rep = alternating_train(&g, agent, adversary, &cfg)?;
            let mut out = String::new();
            let _ = writeln!(out, "outer_steps: {}", rep.objective_trace.len());
            let _ = writeln!(out, "converged: {}", rep.converged);
            let _ = writeln!(out, "objective: {}", fmt(*rep.objective_trace.last().unwrap()));
            let _ = writeln!(out, "agent_theta: {}", fmt_vec(&rep.agent.theta));
            let _ = writeln!(out, "adversary_theta: {}", fmt_vec(&rep.adversary.theta));
            Ok(out)
        }
        Command::Duality { model, kind, alpha } => {
            let m = load_model(model)?;
            let g = RobustGame::new(m, (*kind).into(), *alpha)?;
            let (maxmin, minmax) = brute_force_duality(&g)?;
            let rep = value_iteration(&g, &SolveConfig::default())?;
            let mut out = String::new();
            let _ = writeln!(out, "maxmin_det: {}", fmt_vec(&maxmin));
            let _ = writeln!(out, "minmax_det: {}", fmt_vec(&minmax));
            let _ = writeln!(out, "game_value: {}", fmt_vec(&rep.value.values));
            Ok(out)
        }
        Command::Counterexample { alpha, gamma } => {
            let base = counterexample_model(*gamma);
            let g = RobustGame::new(base.base.clone(), RobustKind::Nr, *alpha)?;
            let (maxmin, minmax) = brute_force_duality(&g)?;
            let rep = value_iteration(
                &g,
                &SolveConfig { tolerance: 1e-12, max_iterations: 1_000_000, ..SolveConfig::default() },
            )?;
            let stage = 1.0 - *gamma;
            let mut out = String::new();
            let _ = writeln!(out, "per_stage_maxmin_det: {}", fmt(maxmin[0] * stage));
            let _ = writeln!(out, "per_stage_minmax_det: {}", fmt(minmax[0] * stage));
            let _ = writeln!(out, "per_stage_game_value: {}", fmt(rep.value.values[0] * stage));
            Ok(out)
        }
        Command::Gen { seed, states, actions, knots, reward_range } => {
            let range = parse_f64_list(reward_range)?;
            if range.len() != 2 || range[0] >= range[1] {
                return Err(Error::Validation("--reward-range needs \"lo,hi\" with lo < hi".into()));
            }
            let action_model = match (actions, knots) {
                (Some(count), None) => ActionModel::Finite { count: *count },
                (None, Some(k)) => ActionModel::Grid { knots: parse_f64_list(k)? },
                _ => {
                    return Err(Error::Validation(
                        "exactly one of --actions or --knots is required".into(),
                    ))
                }
            };
            let m = generate_random_model(*seed, *states, action_model, (range[0], range[1]));
            m.validate()?;
            serde_json::to_string_pretty(&m)
                .map(|mut s| {
                    s.push('\n');
                    s
                })
                .map_err(|e| Error::Numerical(e.to_string()))
        }
    }
}

/// Finite-difference verification of the exact gradients on seeded random
/// grid instances; returns (max relative error, coordinates checked).
fn gradcheck(seed: u64, trials: usize, states: usize) -> Result<(f64, usize), Error> {
    let knots = vec![-1.0, -0.4, 0.3, 1.0];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_err = 0.0f64;
    let mut checked = 0usize;
    let mut trial = 0u64;
    while checked < trials {
        trial += 1;
        if trial > 50 * trials as u64 {
            return Err(Error::Numerical("could not sample enough interior probes".into()));
        }
        let kind = if trial % 2 == 0 { RobustKind::Pr } else { RobustKind::Nr };
        let alpha = rng.gen_range(0.05..0.6);
        let m = generate_random_model(
            seed.wrapping_add(trial),
            states,
            ActionModel::Grid { knots: knots.clone() },
            (-1.0, 1.0),
        );
        let g = RobustGame::new(m, kind, alpha)?;
        let sample = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..states)
                .map(|_| loop {
                    let x = rng.gen_range(-0.95..0.95);
                    if knots.iter().all(|&k| (x - k).abs() > 5e-3) {
                        break x;
                    }
                })
                .collect()
        };
        let agent = ParamPolicy::new(sample(&mut rng), Owner::Agent);
        let adversary = ParamPolicy::new(sample(&mut rng), Owner::Adversary);
        if kind == RobustKind::Nr {
            let near_knot = (0..states).any(|s| {
                let mix = (1.0 - alpha) * agent.theta[s] + alpha * adversary.theta[s];
                knots.iter().any(|&k| (mix - k).abs() < 5e-3)
            });
            if near_knot {
                continue;
            }
        }
        let rep = exact_gradient(&g, &agent, &adversary)?;
        let eps = 1e-6;
        for s in 0..states {
            for agent_side in [true, false] {
                let exact = if agent_side { rep.grad_agent[s] } else { rep.grad_adversary[s] };
                let mut up_a = agent.clone();
                let mut dn_a = agent.clone();
                let mut up_b = adversary.clone();
                let mut dn_b = adversary.clone();
                if agent_side {
                    up_a.theta[s] += eps;
                    dn_a.theta[s] -= eps;
                } else {
                    up_b.theta[s] += eps;
                    dn_b.theta[s] -= eps;
                }
                let fd =
                    (objective(&g, &up_a, &up_b)? - objective(&g, &dn_a, &dn_b)?) / (2.0 * eps);
                let denom = exact.abs().max(fd.abs()).max(1e-8);
                max_err = max_err.max((exact - fd).abs() / denom);
                checked += 1;
            }
        }
    }
    Ok((max_err, checked))
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse(_)
        | Error::Validation(_)
        | Error::OutOfDomain { .. }
        | Error::IncompatiblePolicy(_)
        | Error::TooLarge(_)
        | Error::Io(_) => 1,
        Error::NotConverged { .. } => 2,
        Error::Numerical(_) | Error::MatrixGame(_) | Error::KnotSingularity { .. } => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = par::configure_threads(n) {
            if !cli.quiet {
                eprintln!("warning: could not configure thread pool: {e}");
            }
        }
    }
    match run(&cli) {
        Ok(text) => {
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
            if !cli.quiet {
                print!("{text}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
