//! Two-player zero-sum matrix games by linear programming.
//!
//! The row player minimizes. After shifting every entry to at least one, the
//! row player's problem becomes
//!
//! ```text
//! maximize  Σ_i y_i   subject to  Σ_i a_ij y_i ≤ 1 (every column j),  y ≥ 0
//! ```
//!
//! with value `1 / Σ y` and row mix `y / Σ y`. The column mix is read off the
//! slack reduced costs of the final tableau. The solver is a dense primal
//! simplex; the basis has one row per column of the game, so it stays small
//! even when there are tens of thousands of rows.

use crate::error::{Error, Result};

/// A solved matrix game; row player minimizes.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixGameSolution {
    pub value: f64,
    pub row_mix: Vec<f64>,
    pub col_mix: Vec<f64>,
    /// `max_j (p·A)_j`: what the column player gets against `row_mix`.
    pub upper: f64,
    /// `min_i (A·h)_i`: what the row player concedes against `col_mix`.
    pub lower: f64,
    /// `upper - lower`; zero at an exact equilibrium.
    pub gap: f64,
    pub pivots: usize,
}

const PIVOT_EPS: f64 = 1e-12;
const DEGENERATE_SWITCH: usize = 50;

/// Solves the game and certifies it: `gap` is recomputed from the returned
/// mixtures against the original matrix, and a gap above `tolerance` is a
/// [`Error::NumericalFailure`].
pub fn solve_matrix_game(a: &[Vec<f64>], tolerance: f64) -> Result<MatrixGameSolution> {
    let rows = a.len();
    if rows == 0 || a[0].is_empty() {
        return Err(Error::InvalidParams("empty payoff matrix".into()));
    }
    let cols = a[0].len();
    if a.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidParams("ragged payoff matrix".into()));
    }
    if a.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParams("non-finite payoff".into()));
    }
    let min = a.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let shift = if min < 1.0 { 1.0 - min } else { 0.0 };

    let width = rows + cols + 1;
    let rhs = width - 1;
    let mut t = vec![0.0f64; (cols + 1) * width];
    for j in 0..cols {
        let row = &mut t[j * width..(j + 1) * width];
        for (i, r) in a.iter().enumerate() {
            row[i] = r[j] + shift;
        }
        row[rows + j] = 1.0;
        row[rhs] = 1.0;
    }
    {
        let obj = &mut t[cols * width..];
        for x in obj.iter_mut().take(rows) {
            *x = -1.0;
        }
    }
    let mut basis: Vec<usize> = (rows..rows + cols).collect();

    let max_pivots = 50 * (rows + cols) + 1000;
    let mut pivots = 0;
    let mut degenerate_run = 0;
    loop {
        let obj = &t[cols * width..(cols + 1) * width];
        let entering = if degenerate_run > DEGENERATE_SWITCH {
            (0..rhs).find(|&c| obj[c] < -PIVOT_EPS)
        } else {
            (0..rhs)
                .filter(|&c| obj[c] < -PIVOT_EPS)
                .min_by(|&x, &y| obj[x].partial_cmp(&obj[y]).unwrap().then(x.cmp(&y)))
        };
        let Some(c) = entering else { break };
        let mut leave: Option<(usize, f64)> = None;
        for j in 0..cols {
            let coef = t[j * width + c];
            if coef > PIVOT_EPS {
                let ratio = t[j * width + rhs] / coef;
                let better = match leave {
                    None => true,
                    Some((lj, lr)) => ratio < lr - 1e-15 || (ratio <= lr + 1e-15 && basis[j] < basis[lj]),
                };
                if better {
                    leave = Some((j, ratio));
                }
            }
        }
        let Some((r, ratio)) = leave else {
            return Err(Error::NumericalFailure("unbounded pivot column".into()));
        };
        degenerate_run = if ratio.abs() < 1e-15 { degenerate_run + 1 } else { 0 };
        pivot(&mut t, width, cols + 1, r, c);
        basis[r] = c;
        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::NumericalFailure(format!("no convergence after {pivots} pivots")));
        }
    }

    let mut y = vec![0.0; rows];
    for (j, &b) in basis.iter().enumerate() {
        if b < rows {
            y[b] = t[j * width + rhs].max(0.0);
        }
    }
    let obj = &t[cols * width..(cols + 1) * width];
    let x: Vec<f64> = (0..cols).map(|j| obj[rows + j].max(0.0)).collect();
    let row_mix = normalize(y)?;
    let col_mix = normalize(x)?;
    let (upper, lower) = certificate(a, &row_mix, &col_mix);
    let gap = upper - lower;
    let value = 1.0 / obj[rhs] - shift;
    if !(gap <= tolerance) {
        return Err(Error::NumericalFailure(format!("duality gap {gap:e} exceeds tolerance {tolerance:e}")));
    }
    Ok(MatrixGameSolution { value, row_mix, col_mix, upper, lower, gap, pivots })
}

fn pivot(t: &mut [f64], width: usize, height: usize, r: usize, c: usize) {
    let p = t[r * width + c];
    for x in &mut t[r * width..(r + 1) * width] {
        *x /= p;
    }
    let pivot_row: Vec<f64> = t[r * width..(r + 1) * width].to_vec();
    for j in 0..height {
        if j == r {
            continue;
        }
        let f = t[j * width + c];
        if f == 0.0 {
            continue;
        }
        for (x, pr) in t[j * width..(j + 1) * width].iter_mut().zip(&pivot_row) {
            *x -= f * pr;
        }
        t[j * width + c] = 0.0;
    }
}

fn normalize(mut w: Vec<f64>) -> Result<Vec<f64>> {
    let total: f64 = w.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::NumericalFailure("degenerate mixed strategy".into()));
    }
    for x in &mut w {
        *x /= total;
        if *x < 1e-15 {
            *x = 0.0;
        }
    }
    let total: f64 = w.iter().sum();
    for x in &mut w {
        *x /= total;
    }
    Ok(w)
}

/// `(max_j (p·A)_j, min_i (A·h)_i)`.
pub fn certificate(a: &[Vec<f64>], row_mix: &[f64], col_mix: &[f64]) -> (f64, f64) {
    let cols = col_mix.len();
    let mut col_payoff = vec![0.0; cols];
    for (r, p) in a.iter().zip(row_mix) {
        if *p == 0.0 {
            continue;
        }
        for (acc, x) in col_payoff.iter_mut().zip(r) {
            *acc += p * x;
        }
    }
    let upper = col_payoff.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lower = a
        .iter()
        .map(|r| r.iter().zip(col_mix).map(|(x, h)| x * h).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    (upper, lower)
}

/// Closed-form value of a 2×2 game, exact over any ordered field, by checking
/// the two pure rows and the equalizing mixture. Row player minimizes;
/// returns `(weight on row 0, value)`. On ties the larger weight on row 0 wins.
pub fn solve_2x2<T>(m: [[T; 2]; 2]) -> (T, T)
where
    T: Clone + PartialOrd + num_traits::Num,
{
    let [[a, b], [c, d]] = m;
    let worst = |q: &T| -> T {
        let one_minus = T::one() - q.clone();
        let left = q.clone() * a.clone() + one_minus.clone() * c.clone();
        let right = q.clone() * b.clone() + one_minus * d.clone();
        if left >= right {
            left
        } else {
            right
        }
    };
    let mut candidates = vec![T::one()];
    let denom = (a.clone() - c.clone()) - (b.clone() - d.clone());
    if denom != T::zero() {
        let q = (d.clone() - c.clone()) / denom;
        if q >= T::zero() && q <= T::one() {
            candidates.push(q);
        }
    }
    candidates.push(T::zero());
    let mut best: Option<(T, T)> = None;
    for q in candidates {
        let v = worst(&q);
        if best.as_ref().is_none_or(|(_, bv)| v < *bv) {
            best = Some((q, v));
        }
    }
    best.expect("at least one candidate")
}
