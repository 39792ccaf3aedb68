//! Certified two-player zero-sum matrix game solver.
//!
//! The minimax problem is reduced to a pair of linear programs via the
//! standard positivity-shift transform and solved by a dense primal simplex
//! with Bland's rule. The returned solution is certified directly from the
//! strategies: `duality_gap` is the difference between what the column
//! strategy concedes and what the row strategy guarantees, computed against
//! the original matrix. A solve that cannot certify the requested gap fails
//! loudly instead of trusting solver status.

use crate::error::{Error, Result};

/// Gap that every solve must certify.
pub const MATRIX_GAME_TOL: f64 = 1e-8;

/// Minimax solution of a matrix game (row player maximizes).
#[derive(Clone, Debug)]
pub struct MatrixGameSolution {
    pub value: f64,
    /// Maximizer's mixed strategy over rows.
    pub row_strategy: Vec<f64>,
    /// Minimizer's mixed strategy over columns.
    pub col_strategy: Vec<f64>,
    /// Certified distance between the two players' guarantees; >= 0.
    pub duality_gap: f64,
}

/// Solves the matrix game `payoff[row][col]` for the row maximizer.
pub fn solve_matrix_game(payoff: &[Vec<f64>]) -> Result<MatrixGameSolution> {
    let m = payoff.len();
    if m == 0 || payoff[0].is_empty() {
        return Err(Error::MatrixGame("empty payoff matrix".into()));
    }
    let n = payoff[0].len();
    let mut min_entry = f64::INFINITY;
    for row in payoff {
        if row.len() != n {
            return Err(Error::MatrixGame("ragged payoff matrix".into()));
        }
        for &x in row {
            if !x.is_finite() {
                return Err(Error::MatrixGame(format!("non-finite payoff entry {x}")));
            }
            min_entry = min_entry.min(x);
        }
    }
    // Shift so the game value is strictly positive.
    let shift = 1.0 - min_entry;

    // Column player's LP: max sum(y) s.t. (M + shift) y <= 1, y >= 0.
    // The slack basis is feasible, so no phase-1 is needed. The row player's
    // strategy comes out of the duals on the slack columns.
    let (obj, y, duals) = simplex_max(payoff, shift, m, n)?;
    if obj <= 0.0 {
        return Err(Error::MatrixGame("non-positive LP objective after shift".into()));
    }
    let scale = 1.0 / obj;
    let mut col_strategy: Vec<f64> = y.iter().map(|v| (v * scale).max(0.0)).collect();
    let mut row_strategy: Vec<f64> = duals.iter().map(|v| (v * scale).max(0.0)).collect();
    normalize(&mut col_strategy)?;
    normalize(&mut row_strategy)?;

    // Certify against the original matrix.
    let mut guaranteed = f64::INFINITY; // row strategy's floor over columns
    for j in 0..n {
        let mut acc = 0.0;
        for i in 0..m {
            acc += row_strategy[i] * payoff[i][j];
        }
        guaranteed = guaranteed.min(acc);
    }
    let mut conceded = f64::NEG_INFINITY; // col strategy's ceiling over rows
    for i in 0..m {
        let mut acc = 0.0;
        for j in 0..n {
            acc += col_strategy[j] * payoff[i][j];
        }
        conceded = conceded.max(acc);
    }
    let gap = (conceded - guaranteed).max(0.0);
    if gap > MATRIX_GAME_TOL {
        return Err(Error::MatrixGame(format!(
            "could not certify duality gap: {gap:.3e} > {MATRIX_GAME_TOL:.0e}"
        )));
    }
    Ok(MatrixGameSolution {
        value: 0.5 * (guaranteed + conceded),
        row_strategy,
        col_strategy,
        duality_gap: gap,
    })
}

fn normalize(p: &mut [f64]) -> Result<()> {
    let sum: f64 = p.iter().sum();
    if !(sum > 0.0) {
        return Err(Error::MatrixGame("degenerate strategy with zero mass".into()));
    }
    for x in p.iter_mut() {
        *x /= sum;
    }
    Ok(())
}

/// Dense tableau simplex for `max 1'y  s.t. (M + shift) y <= 1, y >= 0`.
/// Returns (objective, y, constraint duals). Bland's rule keeps the pivot
/// sequence finite and platform-deterministic.
fn simplex_max(payoff: &[Vec<f64>], shift: f64, m: usize, n: usize) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let cols = n + m + 1; // variables, slacks, rhs
    let mut tab = vec![vec![0.0f64; cols]; m + 1];
    for i in 0..m {
        for j in 0..n {
            tab[i][j] = payoff[i][j] + shift;
        }
        tab[i][n + i] = 1.0;
        tab[i][cols - 1] = 1.0;
    }
    // Objective row holds reduced costs; positive entry means improvement.
    for j in 0..n {
        tab[m][j] = 1.0;
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    let max_pivots = 50 * (m + n) * (m + n) + 1000;
    for _ in 0..max_pivots {
        // Bland: entering variable is the lowest improving index.
        let Some(enter) = (0..n + m).find(|&j| tab[m][j] > 1e-12) else {
            let y = extract(&tab, &basis, 0, n, cols);
            let duals: Vec<f64> = (0..m).map(|i| -tab[m][n + i]).collect();
            let obj = -tab[m][cols - 1];
            return Ok((obj, y, duals));
        };
        // Ratio test, ties broken toward the lowest basis index (Bland).
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if tab[i][enter] > 1e-12 {
                let ratio = tab[i][cols - 1] / tab[i][enter];
                if ratio < best - 1e-15
                    || ((ratio - best).abs() <= 1e-15
                        && leave.is_some_and(|l| basis[i] < basis[l]))
                {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(leave) = leave else {
            return Err(Error::MatrixGame("unbounded LP; shift failed".into()));
        };
        pivot(&mut tab, leave, enter, cols);
        basis[leave] = enter;
    }
    Err(Error::MatrixGame("simplex exceeded pivot budget".into()))
}

fn pivot(tab: &mut [Vec<f64>], row: usize, col: usize, cols: usize) {
    let p = tab[row][col];
    for j in 0..cols {
        tab[row][j] /= p;
    }
    for i in 0..tab.len() {
        if i != row {
            let factor = tab[i][col];
            if factor != 0.0 {
                for j in 0..cols {
                    tab[i][j] -= factor * tab[row][j];
                }
            }
        }
    }
}

fn extract(tab: &[Vec<f64>], basis: &[usize], lo: usize, hi: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; hi - lo];
    for (i, &b) in basis.iter().enumerate() {
        if b >= lo && b < hi {
            out[b - lo] = tab[i][cols - 1];
        }
    }
    out
}
