//! Compares the crate's per-state backup dispatch (rayon under the default
//! `parallel` feature, plain iteration without it) against the
//! always-sequential reference path on the same workload.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use robust_mdp::game::{bellman_minimax_generic, payoff_matrix, ValueFn};
use robust_mdp::matrix_game::solve_matrix_game;
use robust_mdp::model::{generate_random_model, ActionModel};
use robust_mdp::par;
use robust_mdp::{RobustGame, RobustKind};

fn game(num_states: usize, num_actions: usize) -> RobustGame {
    let m = generate_random_model(
        7,
        num_states,
        ActionModel::Finite { count: num_actions },
        (-1.0, 1.0),
    );
    RobustGame::new(m, RobustKind::Pr, 0.3).unwrap()
}

/// Sequential reference for the generic minimax backup, sharing all inner
/// routines with the library path; only the per-state dispatch differs.
fn backup_seq(g: &RobustGame, v: &ValueFn) -> Vec<f64> {
    par::map_indexed_seq(g.num_states(), |s| {
        let m = payoff_matrix(g, &v.values, s).unwrap();
        solve_matrix_game(&m).unwrap().value
    })
}

fn bench_backup(c: &mut Criterion) {
    let mut group = c.benchmark_group("minimax_backup");
    for &(ns, na) in &[(16usize, 8usize), (64, 8), (256, 8), (64, 16)] {
        let g = game(ns, na);
        let v = ValueFn::zeros(ns);
        group.bench_with_input(
            BenchmarkId::new("dispatched", format!("{ns}s_{na}a")),
            &(&g, &v),
            |b, (g, v)| b.iter(|| bellman_minimax_generic(g, v).unwrap()),
        );
        group.bench_with_input(
            BenchmarkId::new("sequential", format!("{ns}s_{na}a")),
            &(&g, &v),
            |b, (g, v)| b.iter(|| backup_seq(g, v)),
        );
    }
    group.finish();
}

criterion_group!(benches, bench_backup);
criterion_main!(benches);
