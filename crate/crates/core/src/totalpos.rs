//! Total positivity: exhaustive minors, TN/TP/oscillatory classification,
//! the tridiagonal dominance condition, irreducibility, and the diagonal
//! shift that turns a Jacobi matrix into an oscillatory one.

use serde::Serialize;

use crate::error::{Result, TpdsError};
use crate::linalg::{Matrix, TridiagonalSpec};

/// Largest order for which minors are enumerated exhaustively.
pub const N_MAX_EXHAUSTIVE: usize = 10;

/// Default relative minor tolerance: a minor `m` of order `k` counts as zero
/// when `|m| <= tol_minor * ||A||_inf^k`.
pub const DEFAULT_TOL_MINOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinorReport {
    pub order: usize,
    pub row_set: Vec<usize>,
    pub col_set: Vec<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TpClass {
    pub is_tn: bool,
    pub is_tp: bool,
    pub is_oscillatory: bool,
    /// Minor with the smallest normalized value `m / ||A||_inf^k`: the
    /// violating minor when not TN, otherwise the one closest to zero.
    pub witness: Option<MinorReport>,
    pub tolerance_used: f64,
}

/// Iterator over strictly increasing `k`-subsets of `0..n` in lexicographic
/// order.
struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            idx: (0..k).collect(),
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

fn check_square(a: &Matrix) -> Result<usize> {
    if !a.is_square() || a.rows() == 0 {
        return Err(TpdsError::Dimension(format!(
            "expected a non-empty square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    if n > N_MAX_EXHAUSTIVE {
        return Err(TpdsError::TooLarge {
            n,
            max: N_MAX_EXHAUSTIVE,
        });
    }
    Ok(n)
}

fn for_each_minor(a: &Matrix, order: usize, mut f: impl FnMut(&[usize], &[usize], f64)) {
    let n = a.rows();
    let row_sets: Vec<Vec<usize>> = Combinations::new(n, order).collect();
    for rows in &row_sets {
        for cols in &row_sets {
            f(rows, cols, a.submatrix(rows, cols).det());
        }
    }
}

/// Every `order x order` minor in lexicographic `(row_set, col_set)` order.
pub fn all_minors(a: &Matrix, order: usize) -> Result<Vec<MinorReport>> {
    let n = check_square(a)?;
    if order == 0 || order > n {
        return Err(TpdsError::InvalidArgument(format!(
            "minor order {order} outside 1..={n}"
        )));
    }
    let mut out = Vec::new();
    for_each_minor(a, order, |r, c, v| {
        out.push(MinorReport {
            order,
            row_set: r.to_vec(),
            col_set: c.to_vec(),
            value: v,
        })
    });
    Ok(out)
}

/// Classifies `A` as totally non-negative, totally positive and oscillatory
/// by exhaustive minor enumeration.
pub fn classify(a: &Matrix, tol_minor: f64) -> Result<TpClass> {
    let n = check_square(a)?;
    if !(tol_minor >= 0.0) {
        return Err(TpdsError::InvalidArgument(format!(
            "tol_minor must be non-negative, got {tol_minor}"
        )));
    }
    let norm = a.norm_inf();
    let mut is_tn = true;
    let mut is_tp = true;
    let mut witness: Option<(f64, MinorReport)> = None;
    let mut det = 0.0;
    for order in 1..=n {
        let scale = norm.powi(order as i32);
        let threshold = tol_minor * scale;
        for_each_minor(a, order, |r, c, v| {
            if v < -threshold {
                is_tn = false;
            }
            if v <= threshold {
                is_tp = false;
            }
            if order == n {
                det = v;
            }
            let normalized = if scale > 0.0 { v / scale } else { v };
            if witness.as_ref().map_or(true, |(w, _)| normalized < *w) {
                witness = Some((
                    normalized,
                    MinorReport {
                        order,
                        row_set: r.to_vec(),
                        col_set: c.to_vec(),
                        value: v,
                    },
                ));
            }
        });
    }
    let nonsingular = det.abs() > tol_minor * norm.powi(n as i32);
    let irreducible = is_irreducible(a, tol_minor * norm);
    Ok(TpClass {
        is_tn,
        is_tp: is_tn && is_tp,
        is_oscillatory: is_tn && nonsingular && irreducible,
        witness: witness.map(|(_, m)| m),
        tolerance_used: tol_minor,
    })
}

/// Row dominance `a_i >= b_i + c_{i-1}` with `b_n = c_0 = 0`.
pub fn dominance_holds(t: &TridiagonalSpec) -> Result<bool> {
    t.validate()?;
    if t.b.iter().chain(&t.c).any(|&v| !(v >= 0.0)) {
        return Err(TpdsError::Precondition(
            "dominance condition requires non-negative off-diagonal bands".into(),
        ));
    }
    Ok(row_slack(t).into_iter().all(|s| s >= 0.0))
}

/// `a_i - b_i - c_{i-1}` per row.
fn row_slack(t: &TridiagonalSpec) -> Vec<f64> {
    let n = t.n();
    (0..n)
        .map(|i| {
            let b = if i + 1 < n { t.b[i] } else { 0.0 };
            let c = if i > 0 { t.c[i - 1] } else { 0.0 };
            t.a[i] - b - c
        })
        .collect()
}

/// Strong connectivity of the digraph with an edge `i -> j` whenever
/// `|A_ij| > eps_entry` and `i != j`.
pub fn is_irreducible(a: &Matrix, eps_entry: f64) -> bool {
    let n = a.rows();
    if n <= 1 {
        return true;
    }
    let reaches_all = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                let w = if forward { a[(i, j)] } else { a[(j, i)] };
                if i != j && !seen[j] && w.abs() > eps_entry {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.iter().all(|&s| s)
    };
    reaches_all(true) && reaches_all(false)
}

/// Irreducibility of a tridiagonal matrix: every off-diagonal band entry is
/// larger than `eps_entry` in magnitude.
pub fn is_irreducible_tridiagonal(t: &TridiagonalSpec, eps_entry: f64) -> bool {
    t.b.iter().chain(&t.c).all(|v| v.abs() > eps_entry)
}

/// Picks `s >= 0` so that `sI + T` satisfies the dominance condition with a
/// unit of strict slack in every row, which also makes it strictly
/// diagonally dominant and hence nonsingular. Requires positive bands.
pub fn oscillatory_shift(t: &TridiagonalSpec) -> Result<(f64, Matrix)> {
    t.validate()?;
    if t.b.iter().chain(&t.c).any(|&v| !(v > 0.0)) {
        return Err(TpdsError::Precondition(
            "oscillatory shift requires strictly positive off-diagonal bands".into(),
        ));
    }
    let worst = row_slack(t)
        .into_iter()
        .map(|s| -s)
        .fold(f64::NEG_INFINITY, f64::max);
    let s = (worst + 1.0).max(0.0);
    Ok((s, t.shifted(s).to_dense()))
}
