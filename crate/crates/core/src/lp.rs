//! Dense revised simplex for `maximize c·x` subject to `A x = b`, `x ≥ 0`.
//!
//! Sized for few equality rows and a few thousand columns. The basis is
//! refactored from scratch each iteration, which keeps the routine simple and
//! numerically honest at the row counts used here (≤ ~20).

use nalgebra::{DMatrix, DVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    Singular,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
}

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-12;

struct Tableau<'a> {
    a: &'a DMatrix<f64>,
    m: usize,
    n: usize,
    b: DVector<f64>,
    sign: Vec<f64>,
}

impl Tableau<'_> {
    /// Column `j` of `[diag(sign)·A | I]`.
    fn column(&self, j: usize) -> DVector<f64> {
        if j < self.n {
            DVector::from_fn(self.m, |r, _| self.sign[r] * self.a[(r, j)])
        } else {
            let mut e = DVector::zeros(self.m);
            e[j - self.n] = 1.0;
            e
        }
    }

    fn dot_column(&self, y: &DVector<f64>, j: usize) -> f64 {
        if j < self.n {
            let col = self.a.column(j);
            (0..self.m).map(|r| y[r] * self.sign[r] * col[r]).sum()
        } else {
            y[j - self.n]
        }
    }

    fn basis_matrix(&self, basis: &[usize]) -> DMatrix<f64> {
        let mut bm = DMatrix::zeros(self.m, self.m);
        for (k, &j) in basis.iter().enumerate() {
            bm.set_column(k, &self.column(j));
        }
        bm
    }

    /// Basic values with one step of iterative refinement.
    fn basic_values(&self, bm: &DMatrix<f64>) -> Option<DVector<f64>> {
        let lu = bm.clone().lu();
        let mut x = lu.solve(&self.b)?;
        let r = &self.b - bm * &x;
        if let Some(dx) = lu.solve(&r) {
            x += dx;
        }
        Some(x)
    }
}

enum Phase {
    Done,
    Unbounded,
    IterationLimit,
    Singular,
}

fn run(t: &Tableau, basis: &mut [usize], cost: &[f64], allowed: usize, max_iter: usize) -> Phase {
    let total = t.n + t.m;
    let mut in_basis = vec![false; total];
    for &j in basis.iter() {
        in_basis[j] = true;
    }
    let mut stalled = 0usize;
    let mut last_obj = f64::NEG_INFINITY;
    for _ in 0..max_iter {
        let bm = t.basis_matrix(basis);
        let Some(xb) = t.basic_values(&bm) else {
            return Phase::Singular;
        };
        let cb = DVector::from_fn(t.m, |k, _| cost[basis[k]]);
        let Some(y) = bm.transpose().lu().solve(&cb) else {
            return Phase::Singular;
        };
        let obj = cb.dot(&xb);
        if obj > last_obj + 1e-14 * obj.abs().max(1.0) {
            stalled = 0;
        } else {
            stalled += 1;
        }
        last_obj = last_obj.max(obj);
        let bland = stalled > 30;

        let mut entering = None;
        let mut best = COST_TOL;
        for j in 0..allowed {
            if in_basis[j] {
                continue;
            }
            let d = cost[j] - t.dot_column(&y, j);
            if d > best {
                entering = Some(j);
                if bland {
                    break;
                }
                best = d;
            }
        }
        let Some(q) = entering else {
            return Phase::Done;
        };

        let lu = bm.lu();
        let Some(dir) = lu.solve(&t.column(q)) else {
            return Phase::Singular;
        };
        let mut leave: Option<(usize, f64)> = None;
        for k in 0..t.m {
            if dir[k] > PIVOT_TOL {
                let ratio = xb[k].max(0.0) / dir[k];
                leave = match leave {
                    None => Some((k, ratio)),
                    Some((lk, lr)) => {
                        let tie = (ratio - lr).abs() <= 1e-14 * lr.max(1e-300);
                        if ratio < lr && !tie || tie && basis[k] < basis[lk] {
                            Some((k, ratio))
                        } else {
                            Some((lk, lr))
                        }
                    }
                };
            }
        }
        let Some((r, _)) = leave else {
            return Phase::Unbounded;
        };
        in_basis[basis[r]] = false;
        basis[r] = q;
        in_basis[q] = true;
    }
    Phase::IterationLimit
}

/// Maximize `c·x` subject to `A x = b`, `x ≥ 0`.
pub fn maximize(a: &DMatrix<f64>, b: &[f64], c: &[f64]) -> LpSolution {
    let (m, n) = a.shape();
    assert_eq!(b.len(), m);
    assert_eq!(c.len(), n);
    let sign: Vec<f64> = b.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
    let bvec = DVector::from_fn(m, |r, _| sign[r] * b[r]);
    let t = Tableau { a, m, n, b: bvec, sign };
    let max_iter = 50 * (m + n).max(100);
    let fail = |status| LpSolution { status, x: vec![0.0; n], objective: f64::NAN };

    // Phase I: drive the artificials to zero.
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut cost1 = vec![0.0; n + m];
    for c in cost1.iter_mut().skip(n) {
        *c = -1.0;
    }
    match run(&t, &mut basis, &cost1, n + m, max_iter) {
        Phase::Done => {}
        Phase::Unbounded => unreachable!("phase I objective is bounded"),
        Phase::IterationLimit => return fail(LpStatus::IterationLimit),
        Phase::Singular => return fail(LpStatus::Singular),
    }
    let bm = t.basis_matrix(&basis);
    let Some(xb) = t.basic_values(&bm) else {
        return fail(LpStatus::Singular);
    };
    let infeas: f64 = basis
        .iter()
        .zip(xb.iter())
        .filter(|(&j, _)| j >= n)
        .map(|(_, &v)| v.abs())
        .sum();
    let bscale = t.b.amax().max(1.0);
    if infeas > 1e-9 * bscale {
        return fail(LpStatus::Infeasible);
    }

    // Pivot zero-level artificials out where a structural column allows it.
    for k in 0..m {
        if basis[k] < n {
            continue;
        }
        let mut e = DVector::zeros(m);
        e[k] = 1.0;
        // row k of B^{-1} solves B^T z = e_k
        let Some(z) = t.basis_matrix(&basis).transpose().lu().solve(&e) else {
            break;
        };
        let mut best: Option<(usize, f64)> = None;
        for j in 0..n {
            if basis.contains(&j) {
                continue;
            }
            let v = t.dot_column(&z, j).abs();
            if v > 1e-9 && best.is_none_or(|(_, bv)| v > bv) {
                best = Some((j, v));
            }
        }
        if let Some((j, _)) = best {
            basis[k] = j;
        }
    }

    // Phase II over structural columns only.
    let mut cost2 = vec![0.0; n + m];
    cost2[..n].copy_from_slice(c);
    match run(&t, &mut basis, &cost2, n, max_iter) {
        Phase::Done => {}
        Phase::Unbounded => return fail(LpStatus::Unbounded),
        Phase::IterationLimit => return fail(LpStatus::IterationLimit),
        Phase::Singular => return fail(LpStatus::Singular),
    }
    let bm = t.basis_matrix(&basis);
    let Some(xb) = t.basic_values(&bm) else {
        return fail(LpStatus::Singular);
    };
    let mut x = vec![0.0; n];
    for (k, &j) in basis.iter().enumerate() {
        if j < n {
            x[j] = xb[k].max(0.0);
        }
    }
    let objective = x.iter().zip(c).map(|(xi, ci)| xi * ci).sum();
    LpSolution { status: LpStatus::Optimal, x, objective }
}
