//! Exact optimal-assignment solving over rational weight matrices.
//!
//! Rows play the role of slots and columns the role of bidders, with
//! `rows ≤ cols`. The primary solver is the potential-based
//! successive-shortest-path form of the Hungarian algorithm, run on costs
//! shifted to be strictly positive (a constant shift per matrix preserves the
//! set of optimal row-complete matchings). A branch-and-bound walk with an
//! exact completion bound enumerates *all* optimal assignments, and a plain
//! permutation sweep doubles as an independent oracle for small matrices.

use crate::rational::Q;
use itertools::Itertools;

fn check_shape(weights: &[Vec<Q>]) -> (usize, usize) {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    assert!(
        weights.iter().all(|row| row.len() == cols),
        "ragged weight matrix"
    );
    assert!(
        rows <= cols,
        "assignment requires at least as many columns as rows ({rows} rows, {cols} cols)"
    );
    (rows, cols)
}

/// One maximum-total-weight assignment of each row to a distinct column.
///
/// Returns the chosen column per row and the optimal total weight.
///
/// # Panics
/// Panics if the matrix is ragged or has more rows than columns.
pub fn max_weight_assignment(weights: &[Vec<Q>]) -> (Vec<usize>, Q) {
    let (rows, cols) = check_shape(weights);
    if rows == 0 {
        return (Vec::new(), Q::zero());
    }
    // Minimize shifted costs: cost = (max weight + 1) − weight ≥ 1.
    let shift = weights.iter().flatten().max().cloned().unwrap() + Q::one();
    let cost: Vec<Vec<Q>> = weights
        .iter()
        .map(|row| row.iter().map(|w| &shift - w).collect())
        .collect();

    // Potential-based successive shortest augmenting paths, 1-based with a
    // virtual column 0; `None` stands for +infinity.
    let mut u = vec![Q::zero(); rows + 1];
    let mut v = vec![Q::zero(); cols + 1];
    let mut matched_row = vec![0usize; cols + 1];
    let mut way = vec![0usize; cols + 1];
    for i in 1..=rows {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv: Vec<Option<Q>> = vec![None; cols + 1];
        let mut used = vec![false; cols + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta: Option<Q> = None;
            let mut j1 = 0usize;
            for j in 1..=cols {
                if used[j] {
                    continue;
                }
                let reduced = &cost[i0 - 1][j - 1] - &u[i0] - &v[j];
                if minv[j].as_ref().is_none_or(|m| reduced < *m) {
                    minv[j] = Some(reduced);
                    way[j] = j0;
                }
                if delta.as_ref().is_none_or(|d| minv[j].as_ref().unwrap() < d) {
                    delta = minv[j].clone();
                    j1 = j;
                }
            }
            let delta = delta.expect("an augmenting path exists whenever rows <= cols");
            for j in 0..=cols {
                if used[j] {
                    let row = matched_row[j];
                    u[row] += &delta;
                    v[j] -= &delta;
                } else if let Some(m) = minv[j].as_mut() {
                    *m -= &delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        // Unwind the alternating path recorded in `way`.
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut choice = vec![0usize; rows];
    for j in 1..=cols {
        if matched_row[j] != 0 {
            choice[matched_row[j] - 1] = j - 1;
        }
    }
    let total = choice
        .iter()
        .enumerate()
        .map(|(row, &col)| weights[row][col].clone())
        .sum();
    (choice, total)
}

/// Every maximum-total-weight assignment, in lexicographic order of the
/// column sequence, together with the optimal total weight.
///
/// Branch-and-bound over rows in order; a branch survives only if its exact
/// completion optimum (a sub-assignment solve) still reaches the target, so
/// every visited leaf is optimal.
///
/// # Panics
/// Panics if the matrix is ragged or has more rows than columns.
pub fn all_max_weight_assignments(weights: &[Vec<Q>]) -> (Vec<Vec<usize>>, Q) {
    let (rows, cols) = check_shape(weights);
    let (_, target) = max_weight_assignment(weights);
    let mut out = Vec::new();
    let mut partial = Vec::with_capacity(rows);
    let mut used = vec![false; cols];
    dfs_optimal(
        weights,
        rows,
        cols,
        &target,
        &Q::zero(),
        &mut used,
        &mut partial,
        &mut out,
    );
    (out, target)
}

#[allow(clippy::too_many_arguments)]
fn dfs_optimal(
    weights: &[Vec<Q>],
    rows: usize,
    cols: usize,
    target: &Q,
    acc: &Q,
    used: &mut Vec<bool>,
    partial: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let row = partial.len();
    if row == rows {
        debug_assert_eq!(acc, target);
        out.push(partial.clone());
        return;
    }
    let free: Vec<usize> = (0..cols).filter(|&c| !used[c]).collect();
    for &col in &free {
        let extended = acc + &weights[row][col];
        // Exact optimum of the remaining (rows−row−1) × (free−1) block.
        let remaining_cols: Vec<usize> = free.iter().copied().filter(|&c| c != col).collect();
        let sub: Vec<Vec<Q>> = weights[row + 1..]
            .iter()
            .map(|r| remaining_cols.iter().map(|&c| r[c].clone()).collect())
            .collect();
        let (_, completion) = max_weight_assignment(&sub);
        if &(extended + completion) == target {
            used[col] = true;
            partial.push(col);
            dfs_optimal(weights, rows, cols, target, &(acc + &weights[row][col]), used, partial, out);
            partial.pop();
            used[col] = false;
        }
    }
}

/// Independent oracle: all maximum-weight assignments by full permutation
/// enumeration, in lexicographic order, with the optimal total weight.
///
/// # Panics
/// Panics on shape violations or more than 8 columns (factorial blowup).
pub fn all_max_weight_assignments_bruteforce(weights: &[Vec<Q>]) -> (Vec<Vec<usize>>, Q) {
    let (rows, cols) = check_shape(weights);
    assert!(cols <= 8, "permutation oracle is limited to 8 columns");
    let mut best: Option<Q> = None;
    let mut out: Vec<Vec<usize>> = Vec::new();
    for perm in (0..cols).permutations(rows) {
        let total: Q = perm
            .iter()
            .enumerate()
            .map(|(row, &col)| weights[row][col].clone())
            .sum();
        match &best {
            Some(b) if *b > total => {}
            Some(b) if *b == total => out.push(perm),
            _ => {
                best = Some(total);
                out.clear();
                out.push(perm);
            }
        }
    }
    out.sort();
    (out, best.unwrap_or_else(Q::zero))
}
