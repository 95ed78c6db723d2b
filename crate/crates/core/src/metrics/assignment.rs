//! Exact optimal one-to-one assignment over small score matrices.
//!
//! Lane sets hold at most eight lanes, so the column side is tiny and a
//! subset dynamic program is exact, allocation-light, and deterministic:
//! among equally scored optima it reconstructs the lexicographically
//! smallest pair list (ascending row, then column).

/// Maximizes either `(pair count, total score)` lexicographically
/// (`count_first`) or total score alone. Cells where `valid` is false can
/// never pair. Columns are capped at 20 by the subset encoding.
pub(crate) fn optimal_pairs(
    rows: usize,
    cols: usize,
    score: impl Fn(usize, usize) -> f64,
    valid: impl Fn(usize, usize) -> bool,
    count_first: bool,
) -> Vec<(usize, usize)> {
    assert!(cols <= 20, "assignment is sized for small lane sets");
    if rows == 0 || cols == 0 {
        return Vec::new();
    }
    let full = (1usize << cols) - 1;
    // value[i][s]: best (count, total) using rows i.. with available-column
    // set s.
    let mut value = vec![vec![(0u32, 0.0f64); full + 1]; rows + 1];
    for i in (0..rows).rev() {
        for s in 0..=full {
            let mut best = value[i + 1][s];
            for j in 0..cols {
                if s >> j & 1 == 1 && valid(i, j) {
                    let sub = value[i + 1][s & !(1 << j)];
                    let cand = (1 + sub.0, score(i, j) + sub.1);
                    if better(cand, best, count_first) {
                        best = cand;
                    }
                }
            }
            value[i][s] = best;
        }
    }

    // Walk forward, preferring the smallest column that preserves the
    // optimum, then skipping. Candidate values recompute the exact
    // expressions used above, so float equality is reliable.
    let mut pairs = Vec::new();
    let mut s = full;
    for i in 0..rows {
        let target = value[i][s];
        let mut chosen = None;
        for j in 0..cols {
            if s >> j & 1 == 1 && valid(i, j) {
                let sub = value[i + 1][s & !(1 << j)];
                let cand = (1 + sub.0, score(i, j) + sub.1);
                if cand == target {
                    chosen = Some(j);
                    break;
                }
            }
        }
        if let Some(j) = chosen {
            pairs.push((i, j));
            s &= !(1 << j);
        } else {
            debug_assert_eq!(value[i + 1][s], target);
        }
    }
    pairs
}

fn better(a: (u32, f64), b: (u32, f64), count_first: bool) -> bool {
    if count_first {
        (a.0, a.1) > (b.0, b.1)
    } else {
        a.1 > b.1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs_for(matrix: &[Vec<f64>], tau: f64, count_first: bool) -> Vec<(usize, usize)> {
        let cols = matrix.first().map_or(0, Vec::len);
        optimal_pairs(
            matrix.len(),
            cols,
            |i, j| matrix[i][j],
            |i, j| matrix[i][j] >= tau,
            count_first,
        )
    }

    #[test]
    fn picks_the_higher_total_among_full_matchings() {
        // Diagonal total 1.7 beats anti-diagonal 1.3.
        let m = vec![vec![0.9, 0.6], vec![0.7, 0.8]];
        assert_eq!(pairs_for(&m, 0.5, true), vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn count_beats_total_when_count_first() {
        // One fat pair (0.9) vs two thin ones (0.55 + 0.55 = 1.1).
        let m = vec![vec![0.9, 0.55], vec![0.55, 0.0]];
        assert_eq!(pairs_for(&m, 0.5, true), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn total_mode_may_leave_rows_unmatched() {
        // Totals: {(0,0)} = 10 vs {(0,1),(1,0)} = 2 + 3 = 5.
        let m = vec![vec![10.0, 2.0], vec![3.0, 0.0]];
        assert_eq!(pairs_for(&m, 1.0, false), vec![(0, 0)]);
    }

    #[test]
    fn ties_resolve_to_the_lexicographically_smallest_pairs() {
        let m = vec![vec![0.7, 0.7], vec![0.7, 0.7]];
        assert_eq!(pairs_for(&m, 0.5, true), vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn empty_dimensions_yield_no_pairs() {
        assert!(pairs_for(&[], 0.5, true).is_empty());
        assert!(optimal_pairs(3, 0, |_, _| 0.0, |_, _| true, true).is_empty());
    }
}
