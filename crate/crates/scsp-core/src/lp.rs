//! Feasibility of homogeneous strict/non-strict linear systems via a
//! max-margin simplex formulation.
//!
//! Strict rows are not perturbed; instead the solver maximizes a shared
//! margin `t` subject to `a.v >= t` on strict rows, `a.v >= 0` on
//! non-strict rows and `t <= 1` (the systems are homogeneous, so any
//! positive margin scales to any other). Strict feasibility is then
//! `optimal t > eps_strict`.

use thiserror::Error;

use crate::config::Config;
use crate::linearize::LinearRow;

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("simplex iteration limit exceeded")]
    IterationLimit,
    #[error("simplex reported an unbounded objective on a bounded problem")]
    Unbounded,
}

/// A conjunction of linear rows over `unknowns` coordinates.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    unknowns: usize,
    rows: Vec<LinearRow>,
}

impl LinearSystem {
    pub fn new(unknowns: usize, rows: Vec<LinearRow>) -> LinearSystem {
        debug_assert!(rows.iter().all(|r| r.coeffs.len() == unknowns));
        LinearSystem { unknowns, rows }
    }

    pub fn unknowns(&self) -> usize {
        self.unknowns
    }

    pub fn rows(&self) -> &[LinearRow] {
        &self.rows
    }

    /// Independent row-by-row check of an assignment.
    pub fn check(&self, v: &[f64], eps: f64) -> bool {
        self.rows.iter().all(|r| r.holds(v, eps))
    }
}

/// Outcome of a feasibility check.
#[derive(Clone, Debug)]
pub struct LpResult {
    pub feasible: bool,
    /// The optimal shared margin of the strict rows.
    pub margin: f64,
    pub witness: Option<Vec<f64>>,
}

/// Decide strict/non-strict feasibility and extract a witness.
pub fn check_feasible(sys: &LinearSystem, cfg: &Config) -> Result<LpResult, LpError> {
    let u = sys.unknowns();
    // Structural variables: v = p - q with p, q >= 0, plus the margin t.
    let n = 2 * u + 1;
    let t_col = 2 * u;
    let mut a = Vec::with_capacity(sys.rows().len() + 1);
    let mut b = Vec::with_capacity(sys.rows().len() + 1);
    for row in sys.rows() {
        let mut cons = vec![0.0; n];
        for (i, c) in row.coeffs.iter().enumerate() {
            cons[i] = -c;
            cons[u + i] = *c;
        }
        if row.strict {
            cons[t_col] = 1.0;
        }
        a.push(cons);
        b.push(0.0);
    }
    let mut cap = vec![0.0; n];
    cap[t_col] = 1.0;
    a.push(cap);
    b.push(1.0);
    let mut c = vec![0.0; n];
    c[t_col] = 1.0;
    let (margin, x) = simplex_max(a, b, c)?;
    let witness: Vec<f64> = (0..u).map(|i| x[i] - x[u + i]).collect();
    let feasible = margin > cfg.eps_strict;
    Ok(LpResult {
        feasible,
        margin,
        witness: feasible.then_some(witness),
    })
}

/// Push a feasible witness off unnecessary boundaries: maximize the sum of
/// capped slacks on the non-strict rows while keeping half the achieved
/// margin on the strict ones. Returns `None` when there is nothing to
/// improve or the polish step fails.
pub fn refine_witness(
    sys: &LinearSystem,
    base: &[f64],
    base_margin: f64,
    _cfg: &Config,
) -> Option<Vec<f64>> {
    let u = sys.unknowns();
    let nonstrict: Vec<usize> = sys
        .rows()
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.strict)
        .map(|(k, _)| k)
        .collect();
    if nonstrict.is_empty() || u == 0 {
        return None;
    }
    // Variables: w = wp - wq (the shift from the base witness), then one
    // slack per non-strict row.
    let n = 2 * u + nonstrict.len();
    let s_col = |pos: usize| 2 * u + pos;
    let m0 = base_margin * 0.5;
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut c = vec![0.0; n];
    for (pos, &k) in nonstrict.iter().enumerate() {
        let row = &sys.rows()[k];
        let at_base = row.eval(base);
        let mut cons = vec![0.0; n];
        for (i, coef) in row.coeffs.iter().enumerate() {
            cons[i] = -coef;
            cons[u + i] = *coef;
        }
        cons[s_col(pos)] = 1.0;
        a.push(cons);
        b.push(at_base.max(0.0));
        let mut capr = vec![0.0; n];
        capr[s_col(pos)] = 1.0;
        a.push(capr);
        b.push(1.0);
        c[s_col(pos)] = 1.0;
    }
    for row in sys.rows().iter().filter(|r| r.strict) {
        // a.(base + w) >= m0, in <= form over the shift w.
        let at_base = row.eval(base);
        let mut cons = vec![0.0; n];
        for (i, coef) in row.coeffs.iter().enumerate() {
            cons[i] = -coef;
            cons[u + i] = *coef;
        }
        a.push(cons);
        b.push((at_base - m0).max(0.0));
    }
    let (_, x) = simplex_max(a, b, c).ok()?;
    let refined: Vec<f64> = (0..u).map(|i| base[i] + x[i] - x[u + i]).collect();
    Some(refined)
}

const PIVOT_TOL: f64 = 1e-9;

/// Dense simplex for `max c.x` subject to `A x <= b`, `x >= 0`, `b >= 0`.
/// The all-slack basis is feasible by construction, so a single phase with
/// Bland's anti-cycling rule suffices.
fn simplex_max(
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
) -> Result<(f64, Vec<f64>), LpError> {
    let m = a.len();
    let n = c.len();
    let total = n + m;
    let mut tab: Vec<Vec<f64>> = Vec::with_capacity(m);
    for (i, row) in a.into_iter().enumerate() {
        let mut t = vec![0.0; total];
        t[..n].copy_from_slice(&row);
        t[n + i] = 1.0;
        tab.push(t);
    }
    let mut rhs = b;
    let mut cost = vec![0.0; total];
    cost[..n].copy_from_slice(&c);
    let mut value = 0.0;
    let mut basis: Vec<usize> = (n..total).collect();
    let max_iter = 2000 + 50 * (m + n);
    for _ in 0..max_iter {
        // Bland: first improving column.
        let entering = match (0..total).find(|&j| cost[j] > PIVOT_TOL) {
            None => {
                let mut x = vec![0.0; total];
                for (i, &bi) in basis.iter().enumerate() {
                    x[bi] = rhs[i];
                }
                return Ok((value, x));
            }
            Some(j) => j,
        };
        // Ratio test; ties resolve to the smallest basis variable.
        let mut leaving: Option<(usize, f64)> = None;
        for i in 0..m {
            let aij = tab[i][entering];
            if aij > PIVOT_TOL {
                let ratio = rhs[i] / aij;
                let better = match leaving {
                    None => true,
                    Some((li, lr)) => {
                        ratio < lr - PIVOT_TOL
                            || (ratio <= lr + PIVOT_TOL && basis[i] < basis[li])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
        }
        let (pivot_row, _) = leaving.ok_or(LpError::Unbounded)?;
        let pivot = tab[pivot_row][entering];
        for v in tab[pivot_row].iter_mut() {
            *v /= pivot;
        }
        rhs[pivot_row] /= pivot;
        for i in 0..m {
            if i == pivot_row {
                continue;
            }
            let factor = tab[i][entering];
            if factor != 0.0 {
                let src = tab[pivot_row].clone();
                for (v, s) in tab[i].iter_mut().zip(&src) {
                    *v -= factor * s;
                }
                rhs[i] -= factor * rhs[pivot_row];
                if rhs[i] < 0.0 && rhs[i] > -1e-12 {
                    rhs[i] = 0.0;
                }
            }
        }
        let factor = cost[entering];
        if factor != 0.0 {
            for (v, s) in cost.iter_mut().zip(&tab[pivot_row]) {
                *v -= factor * s;
            }
            value += factor * rhs[pivot_row];
        }
        basis[pivot_row] = entering;
    }
    Err(LpError::IterationLimit)
}
