//! End-to-end acceptance checks. Each criterion prints one PASS line (visible
//! with `--nocapture`); a failed assertion marks the criterion failed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use robust_mdp::game::{
    bellman_fixed_adversary, bellman_fixed_agent, bellman_fixed_pair, bellman_minimax_generic,
    bellman_minimax_pr, evaluate_joint, JointPolicy, ValueFn,
};
use robust_mdp::grad::{exact_gradient, objective, Owner, ParamPolicy};
use robust_mdp::model::{generate_random_model, ActionModel, MdpModel, Policy};
use robust_mdp::solve::{
    brute_force_duality, counterexample_model, pr_policy_iteration, soft_pr_policy_iteration,
    value_iteration, zs_policy_iteration, SolveConfig,
};
use robust_mdp::{RobustGame, RobustKind};

fn cfg(tol: f64) -> SolveConfig {
    SolveConfig { tolerance: tol, ..SolveConfig::default() }
}

/// The 100 seeded instances shared by criteria 2, 5 and 8.
fn duality_instances() -> Vec<RobustGame> {
    (0..100u64)
        .map(|seed| {
            let ns = 2 + (seed % 4) as usize; // 2..=5 states
            let na = 2 + (seed % 3) as usize; // 2..=4 actions
            let alpha = 0.05 + 0.5 * (seed as f64 / 100.0);
            let m = generate_random_model(seed, ns, ActionModel::Finite { count: na }, (-1.0, 1.0));
            RobustGame::new(m, RobustKind::Pr, alpha).unwrap()
        })
        .collect()
}

fn enumerate_policies(na: usize, ns: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..na.pow(ns as u32)).map(move |mut i| {
        let mut out = vec![0; ns];
        for slot in out.iter_mut() {
            *slot = i % na;
            i /= na;
        }
        out
    })
}

#[test]
fn criterion_1_counterexample_reproduction() {
    let gamma = 0.9;
    let stage = 1.0 - gamma;
    let base = counterexample_model(gamma).base;

    let g = RobustGame::new(base.clone(), RobustKind::Nr, 0.25).unwrap();
    let (maxmin, minmax) = brute_force_duality(&g).unwrap();
    assert!((maxmin[0] * stage - 0.25).abs() <= 1e-8, "max-min {}", maxmin[0] * stage);
    assert!((minmax[0] * stage - 0.5625).abs() <= 1e-8, "min-max {}", minmax[0] * stage);
    let rep = value_iteration(&g, &cfg(1e-12)).unwrap();
    assert!((rep.value.values[0] * stage - 0.5625).abs() <= 1e-8, "game value");

    let strong = RobustGame::new(base, RobustKind::Nr, 0.75).unwrap();
    let (maxmin, _) = brute_force_duality(&strong).unwrap();
    assert!(maxmin[0].abs() <= 1e-8, "max-min at 0.75: {}", maxmin[0]);

    println!("criterion 1: PASS — counterexample duality values reproduced");
}

#[test]
fn criteria_2_5_8_pr_duality_cross_agreement_rmdp() {
    let instances = duality_instances();
    for (i, g) in instances.iter().enumerate() {
        let ns = g.num_states();
        let na = g.num_actions();
        let vi = value_iteration(&g, &cfg(1e-10)).unwrap();

        // Criterion 2: brute-force strong duality against the solver value,
        // and a deterministic returned agent policy.
        let (maxmin, minmax) = brute_force_duality(g).unwrap();
        for s in 0..ns {
            assert!((maxmin[s] - minmax[s]).abs() <= 1e-8, "instance {i} state {s}: duality gap");
            assert!((maxmin[s] - vi.value.values[s]).abs() <= 1e-8, "instance {i} state {s}: v*");
        }
        assert!(vi.agent_policy.is_deterministic(), "instance {i}: VI agent not deterministic");

        // Criterion 5: solver cross-agreement and operator agreement.
        let tol = 1e-9;
        let pi = pr_policy_iteration(g, &cfg(tol), false).unwrap();
        let zs = zs_policy_iteration(g, &cfg(tol), None).unwrap();
        assert!(vi.value.sup_dist(&pi.value) <= 2.0 * tol, "instance {i}: VI vs PI");
        assert!(vi.value.sup_dist(&zs.value) <= 2.0 * tol, "instance {i}: VI vs ZS");
        assert!(pi.agent_policy.is_deterministic() && zs.agent_policy.is_deterministic());
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + i as u64);
        let v = ValueFn { values: (0..ns).map(|_| rng.gen_range(-5.0..5.0)).collect() };
        let (dec, _, _) = bellman_minimax_pr(g, &v).unwrap();
        let (gen, _, _) = bellman_minimax_generic(g, &v).unwrap();
        assert!(dec.sup_dist(&gen) <= 1e-8, "instance {i}: operator mismatch");

        // Criterion 8: the solved policy is worst-case optimal over every
        // enumerated deterministic adversary.
        let mut worst = vec![f64::INFINITY; ns];
        for idx in enumerate_policies(na, ns) {
            let jp = JointPolicy {
                agent: pi.agent_policy.clone(),
                adversary: Policy::from_indices(&g.base, &idx),
            };
            let jv = evaluate_joint(g, &jp).unwrap();
            for s in 0..ns {
                worst[s] = worst[s].min(jv.values[s]);
            }
        }
        for s in 0..ns {
            assert!(
                (worst[s] - pi.value.values[s]).abs() <= 1e-8,
                "instance {i} state {s}: worst-case value"
            );
        }
    }
    println!("criterion 2: PASS — strong duality on 100 random PR instances");
    println!("criterion 5: PASS — solver and operator cross-agreement");
    println!("criterion 8: PASS — solved policies worst-case optimal under enumeration");
}

#[test]
fn criterion_3_soft_pi_contraction() {
    for seed in 0..20u64 {
        let ns = 3 + (seed % 3) as usize;
        let m = generate_random_model(200 + seed, ns, ActionModel::Finite { count: 3 }, (-1.0, 1.0));
        let g = RobustGame::new(m, RobustKind::Pr, 0.1 + 0.3 * (seed as f64 / 20.0)).unwrap();
        let reference = value_iteration(&g, &cfg(1e-12)).unwrap().value;
        let mut hard_ref_trace = None;
        for eta in [0.25, 0.5, 1.0] {
            let c = SolveConfig {
                eta,
                tolerance: 1e-9,
                reference: Some(reference.clone()),
                ..SolveConfig::default()
            };
            let rep = soft_pr_policy_iteration(&g, &c).unwrap();
            let rate = 1.0 - eta + g.base.gamma * eta;
            let trace = rep.ref_trace.clone().unwrap();
            for k in 1..trace.len() {
                assert!(
                    trace[k] <= rate * trace[k - 1] + 1e-8,
                    "seed {seed} eta {eta} iterate {k}: {} vs {}",
                    trace[k],
                    rate * trace[k - 1]
                );
            }
            if eta == 1.0 {
                let hard = pr_policy_iteration(
                    &g,
                    &SolveConfig {
                        tolerance: 1e-9,
                        reference: Some(reference.clone()),
                        ..SolveConfig::default()
                    },
                    false,
                )
                .unwrap();
                hard_ref_trace = Some((trace, hard.ref_trace.unwrap()));
            }
        }
        let (soft, hard) = hard_ref_trace.unwrap();
        let n = soft.len().min(hard.len());
        for k in 0..n {
            assert!((soft[k] - hard[k]).abs() <= 1e-10, "seed {seed} iterate {k}: trace differs");
        }
    }
    println!("criterion 3: PASS — soft policy iteration contracts at 1-eta+gamma*eta");
}

#[test]
fn criterion_4_operator_contraction_and_monotonicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut probes = 0;
    while probes < 1000 {
        let seed = rng.gen_range(0..10_000);
        let ns = rng.gen_range(2..5usize);
        let nr = rng.gen_bool(0.4);
        let g = if nr {
            let m = generate_random_model(
                seed,
                ns,
                ActionModel::Grid { knots: vec![-1.0, -0.3, 0.4, 1.0] },
                (-1.0, 1.0),
            );
            RobustGame::new(m, RobustKind::Nr, rng.gen_range(0.0..1.0)).unwrap()
        } else {
            let m = generate_random_model(seed, ns, ActionModel::Finite { count: 3 }, (-1.0, 1.0));
            RobustGame::new(m, RobustKind::Pr, rng.gen_range(0.0..1.0)).unwrap()
        };
        let jp = JointPolicy {
            agent: Policy::uniform_stochastic(&g.base),
            adversary: Policy::from_indices(
                &g.base,
                &(0..ns).map(|_| rng.gen_range(0..g.num_actions())).collect::<Vec<_>>(),
            ),
        };
        let v1 = ValueFn { values: (0..ns).map(|_| rng.gen_range(-5.0..5.0)).collect() };
        let v2 = ValueFn { values: (0..ns).map(|_| rng.gen_range(-5.0..5.0)).collect() };
        let d = v1.sup_dist(&v2);
        let gamma = g.base.gamma;
        let apply = |v: &ValueFn, which: usize| -> ValueFn {
            match which {
                0 => bellman_fixed_pair(&g, &jp, v).unwrap(),
                1 => bellman_fixed_agent(&g, &jp.agent, v).unwrap(),
                2 => bellman_fixed_adversary(&g, &jp.adversary, v).unwrap(),
                _ => {
                    if g.kind == RobustKind::Pr {
                        bellman_minimax_pr(&g, v).unwrap().0
                    } else {
                        bellman_minimax_generic(&g, v).unwrap().0
                    }
                }
            }
        };
        for which in 0..4 {
            let t1 = apply(&v1, which);
            let t2 = apply(&v2, which);
            assert!(
                t1.sup_dist(&t2) <= gamma * d + 1e-10,
                "operator {which} is not a gamma-contraction"
            );
            // Monotonicity: apply to the pointwise maximum envelope.
            let hi = ValueFn {
                values: v1.values.iter().zip(&v2.values).map(|(a, b)| a.max(*b)).collect(),
            };
            let th = apply(&hi, which);
            for s in 0..ns {
                assert!(
                    th.values[s] >= t1.values[s] - 1e-10 && th.values[s] >= t2.values[s] - 1e-10,
                    "operator {which} is not monotone"
                );
            }
            probes += 1;
        }
    }
    // Soft-PI value iterates are non-increasing and bounded below by v*.
    for seed in 0..5u64 {
        let m = generate_random_model(300 + seed, 4, ActionModel::Finite { count: 3 }, (-1.0, 1.0));
        let g = RobustGame::new(m, RobustKind::Pr, 0.3).unwrap();
        let vstar = value_iteration(&g, &cfg(1e-12)).unwrap().value;
        let c = SolveConfig { eta: 0.5, tolerance: 1e-9, ..SolveConfig::default() };
        // Track iterate values through the residual trace: rebuild them by
        // re-running with the reference set to v*.
        let rep = soft_pr_policy_iteration(
            &g,
            &SolveConfig { reference: Some(vstar.clone()), ..c },
        )
        .unwrap();
        let trace = rep.ref_trace.unwrap();
        // Distances to v* of a non-increasing sequence bounded below by v*
        // are themselves non-increasing.
        for k in 1..trace.len() {
            assert!(trace[k] <= trace[k - 1] + 1e-8, "seed {seed}: iterate moved away from v*");
        }
        for s in 0..4 {
            assert!(rep.value.values[s] >= vstar.values[s] - 1e-8, "seed {seed}: fell below v*");
        }
    }
    println!("criterion 4: PASS — 1000 operator probes contract and stay monotone");
}

#[test]
fn criterion_6_gradient_correctness() {
    let knots = vec![-1.0, -0.4, 0.3, 1.0];
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut max_err = 0.0f64;
    let mut checked = 0;
    let mut trial = 0u64;
    while checked < 200 {
        trial += 1;
        let kind = if trial % 2 == 0 { RobustKind::Pr } else { RobustKind::Nr };
        let alpha = rng.gen_range(0.05..0.6);
        let m = generate_random_model(400 + trial, 3, ActionModel::Grid { knots: clone_knots(&knots) }, (-1.0, 1.0));
        let g = RobustGame::new(m, kind, alpha).unwrap();
        let sample = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..3)
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
            let near = (0..3).any(|s| {
                let mix = (1.0 - alpha) * agent.theta[s] + alpha * adversary.theta[s];
                knots.iter().any(|&k| (mix - k).abs() < 5e-3)
            });
            if near {
                continue;
            }
        }
        let rep = exact_gradient(&g, &agent, &adversary).unwrap();
        let eps = 1e-6;
        for s in 0..3 {
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
                let fd = (objective(&g, &up_a, &up_b).unwrap()
                    - objective(&g, &dn_a, &dn_b).unwrap())
                    / (2.0 * eps);
                let denom = exact.abs().max(fd.abs()).max(1e-8);
                max_err = max_err.max((exact - fd).abs() / denom);
                checked += 1;
            }
        }
    }
    assert!(max_err <= 1e-5, "max relative FD error {max_err:.3e}");

    // Adversary gradient vanishes exactly at alpha = 0.
    let m = generate_random_model(499, 3, ActionModel::Grid { knots: clone_knots(&knots) }, (-1.0, 1.0));
    let g = RobustGame::new(m, RobustKind::Nr, 0.0).unwrap();
    let rep = exact_gradient(
        &g,
        &ParamPolicy::new(vec![0.11, -0.21, 0.52], Owner::Agent),
        &ParamPolicy::new(vec![0.5, 0.5, 0.5], Owner::Adversary),
    )
    .unwrap();
    assert!(rep.grad_adversary.iter().all(|&x| x == 0.0));

    println!("criterion 6: PASS — {checked} gradient coordinates within 1e-5 of finite differences (max {max_err:.2e})");
}

fn clone_knots(k: &[f64]) -> Vec<f64> {
    k.to_vec()
}

#[test]
fn criterion_7_greedy_matches_linearization() {
    for seed in 0..50u64 {
        let ns = 3;
        let na = 3;
        let m = generate_random_model(500 + seed, ns, ActionModel::Finite { count: na }, (-1.0, 1.0));
        let g = RobustGame::new(m, RobustKind::Pr, 0.15 + 0.4 * (seed as f64 / 50.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let agent = Policy::from_indices(
            &g.base,
            &(0..ns).map(|_| rng.gen_range(0..na)).collect::<Vec<_>>(),
        );
        let nu = vec![vec![1.0 / na as f64; na]; ns];
        let adversary = Policy::Stochastic { probs: nu.clone() };
        let jp = JointPolicy { agent: agent.clone(), adversary };
        let v = evaluate_joint(&g, &jp).unwrap();
        // One-step backup of each adversary action under the joint value.
        let q: Vec<Vec<f64>> = (0..ns)
            .map(|s| {
                (0..na)
                    .map(|b| {
                        let pv: f64 = g.base.transitions[s][b]
                            .iter()
                            .zip(&v.values)
                            .map(|(p, v)| p * v)
                            .sum();
                        g.base.reward[s][b] + g.base.gamma * pv
                    })
                    .collect()
            })
            .collect();
        let p1 = &g.base.initial_distribution;
        let value_at = |probs: Vec<Vec<f64>>| -> f64 {
            let jp = JointPolicy {
                agent: agent.clone(),
                adversary: Policy::Stochastic { probs },
            };
            let v = evaluate_joint(&g, &jp).unwrap();
            p1.iter().zip(&v.values).map(|(p, v)| p * v).sum()
        };
        for s in 0..ns {
            let eps = 1e-6;
            let fd: Vec<f64> = (0..na)
                .map(|b| {
                    let mut up = nu.clone();
                    let mut down = nu.clone();
                    for j in 0..na {
                        let delta = if j == b { 1.0 } else { 0.0 } - nu[s][j];
                        up[s][j] += eps * delta;
                        down[s][j] -= eps * delta;
                    }
                    (value_at(up) - value_at(down)) / (2.0 * eps)
                })
                .collect();
            let greedy = (0..na).fold(0, |best, b| if q[s][b] < q[s][best] { b } else { best });
            let fd_min = fd.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(
                fd[greedy] <= fd_min + 1e-5 * fd_min.abs().max(1.0),
                "seed {seed} state {s}: greedy action not a linearization minimizer"
            );
        }
    }
    println!("criterion 7: PASS — greedy adversary updates minimize the value linearization");
}

#[test]
fn criterion_9_qualitative_robustness() {
    // Reward-greedy route runs beside an absorbing catastrophic state; the
    // robust policy takes the safe self-loop instead.
    let m = MdpModel {
        num_states: 3,
        gamma: 0.9,
        action_model: ActionModel::Finite { count: 2 },
        reward: vec![vec![0.3, 0.0], vec![1.0, 0.0], vec![-1.0, -1.0]],
        transitions: vec![
            vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]],
            vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
            vec![vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 1.0]],
        ],
        initial_distribution: vec![1.0, 0.0, 0.0],
    };
    let robust = pr_policy_iteration(
        &RobustGame::new(m.clone(), RobustKind::Pr, 0.1).unwrap(),
        &SolveConfig::default(),
        false,
    )
    .unwrap();
    let plain = pr_policy_iteration(
        &RobustGame::new(m.clone(), RobustKind::Pr, 0.0).unwrap(),
        &SolveConfig::default(),
        false,
    )
    .unwrap();
    let noise = 0.2;
    let vr = robust_mdp::eval::random_perturbation_value(&m, &robust.agent_policy, noise).unwrap();
    let vp = robust_mdp::eval::random_perturbation_value(&m, &plain.agent_policy, noise).unwrap();
    let at_p1 = |v: &ValueFn| -> f64 {
        m.initial_distribution.iter().zip(&v.values).map(|(p, v)| p * v).sum()
    };
    let (r, p) = (at_p1(&vr), at_p1(&vp));
    assert!(r > p, "robust {r} not above non-robust {p}");
    println!(
        "criterion 9: PASS — robust policy beats the non-robust optimum under noise (margin {:.4})",
        r - p
    );
}
