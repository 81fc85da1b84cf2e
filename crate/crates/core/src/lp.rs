//! Dense two-phase simplex for `min c.x  s.t.  A x = b, x >= 0`, and a small
//! Gaussian-elimination solver.
//!
//! Pivoting is deterministic: Dantzig's rule with lowest-index tie-breaking,
//! switching to Bland's rule after a run of degenerate pivots.

use alloc::vec;
use alloc::vec::Vec;

const PIVOT_EPS: f64 = 1e-11;
const COST_EPS: f64 = 1e-12;
const DEGENERATE_STREAK: usize = 50;
const REINVERT_EVERY: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    /// Smallest sum of artificial variables reached in phase one.
    pub phase_one_residual: f64,
}

/// A linear program in equality form with a dense row-major matrix.
#[derive(Debug, Clone)]
pub struct Lp {
    pub cols: usize,
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    pub cost: Vec<f64>,
}

impl Lp {
    pub fn new(cols: usize) -> Self {
        Self { cols, rows: Vec::new(), rhs: Vec::new(), cost: vec![0.0; cols] }
    }

    pub fn push_row(&mut self, row: Vec<f64>, rhs: f64) {
        debug_assert_eq!(row.len(), self.cols);
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    /// Adds `sum coef * x[col] = rhs` from sparse terms.
    pub fn push_sparse(&mut self, terms: &[(usize, f64)], rhs: f64) {
        let mut row = vec![0.0; self.cols];
        for &(c, v) in terms {
            row[c] += v;
        }
        self.push_row(row, rhs);
    }

    pub fn solve(&self) -> LpSolution {
        self.solve_with_limit(200_000)
    }

    pub fn solve_with_limit(&self, max_pivots: usize) -> LpSolution {
        Tableau::build(self).run(&self.cost, max_pivots)
    }
}

struct Tableau {
    m: usize,
    /// Original columns followed by artificial columns.
    n: usize,
    orig: usize,
    width: usize,
    t: Vec<f64>,
    basis: Vec<usize>,
    banned: Vec<bool>,
    /// The tableau as built, for reinversion.
    original: Vec<f64>,
}

impl Tableau {
    fn build(lp: &Lp) -> Self {
        let m = lp.rows.len();
        let orig = lp.cols;
        let mut rows: Vec<Vec<f64>> = lp.rows.clone();
        let mut rhs = lp.rhs.clone();
        for i in 0..m {
            if rhs[i] < 0.0 {
                rhs[i] = -rhs[i];
                for v in rows[i].iter_mut() {
                    *v = -*v;
                }
            }
        }
        // columns that are unit vectors can start in the basis
        let mut basis = vec![usize::MAX; m];
        for j in 0..orig {
            let mut hit = None;
            let mut ok = true;
            for (i, row) in rows.iter().enumerate() {
                let v = row[j];
                if v != 0.0 {
                    if hit.is_some() || v != 1.0 {
                        ok = false;
                        break;
                    }
                    hit = Some(i);
                }
            }
            if let (true, Some(i)) = (ok, hit) {
                if basis[i] == usize::MAX {
                    basis[i] = j;
                }
            }
        }
        let missing: Vec<usize> = (0..m).filter(|&i| basis[i] == usize::MAX).collect();
        let n = orig + missing.len();
        let width = n + 1;
        let mut t = vec![0.0; m * width];
        for i in 0..m {
            t[i * width..i * width + orig].copy_from_slice(&rows[i]);
            t[i * width + n] = rhs[i];
        }
        for (k, &i) in missing.iter().enumerate() {
            t[i * width + orig + k] = 1.0;
            basis[i] = orig + k;
        }
        Self { m, n, orig, width, original: t.clone(), t, basis, banned: vec![false; n] }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width + j]
    }

    fn reduced_costs(&self, cost: &[f64]) -> (Vec<f64>, f64) {
        let mut d = cost.to_vec();
        let mut obj = 0.0;
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.t[i * self.width..(i + 1) * self.width];
                for j in 0..self.n {
                    d[j] -= cb * row[j];
                }
                obj += cb * row[self.n];
            }
        }
        (d, obj)
    }

    /// Rebuilds the tableau as `B^-1 [A | b]` from the original data by
    /// Gauss-Jordan elimination with partial pivoting. Leaves the tableau
    /// untouched if the basis matrix looks singular.
    fn reinvert(&mut self) {
        let (m, w) = (self.m, self.width);
        let mut b = vec![0.0; m * m];
        for i in 0..m {
            for (k, &col) in self.basis.iter().enumerate() {
                b[i * m + k] = self.original[i * w + col];
            }
        }
        let mut t = self.original.clone();
        for k in 0..m {
            let p = (k..m).max_by(|&a, &c| b[a * m + k].abs().total_cmp(&b[c * m + k].abs())).unwrap_or(k);
            if b[p * m + k].abs() < 1e-12 {
                return;
            }
            if p != k {
                for j in 0..m {
                    b.swap(k * m + j, p * m + j);
                }
                for j in 0..w {
                    t.swap(k * w + j, p * w + j);
                }
            }
            let piv = b[k * m + k];
            for j in 0..m {
                b[k * m + j] /= piv;
            }
            for j in 0..w {
                t[k * w + j] /= piv;
            }
            for i in 0..m {
                let f = b[i * m + k];
                if i == k || f == 0.0 {
                    continue;
                }
                for j in 0..m {
                    b[i * m + j] -= f * b[k * m + j];
                }
                for j in 0..w {
                    t[i * w + j] -= f * t[k * w + j];
                }
            }
        }
        for i in 0..m {
            let v = &mut t[i * w + w - 1];
            if *v < 0.0 && *v > -1e-11 {
                *v = 0.0;
            }
        }
        self.t = t;
    }

    fn pivot(&mut self, r: usize, c: usize, d: &mut [f64], obj: &mut f64) {
        let w = self.width;
        let p = self.t[r * w + c];
        for j in 0..w {
            self.t[r * w + j] /= p;
        }
        self.t[r * w + c] = 1.0;
        let nz: Vec<usize> = (0..w).filter(|&j| self.t[r * w + j] != 0.0).collect();
        let prow: Vec<f64> = nz.iter().map(|&j| self.t[r * w + j]).collect();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * w + c];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[i * w..(i + 1) * w];
            for (&j, &v) in nz.iter().zip(&prow) {
                row[j] -= f * v;
            }
            row[c] = 0.0;
            if row[w - 1] < 0.0 && row[w - 1] > -1e-13 {
                row[w - 1] = 0.0;
            }
        }
        let f = d[c];
        if f != 0.0 {
            for (&j, &v) in nz.iter().zip(&prow) {
                if j < self.n {
                    d[j] -= f * v;
                } else {
                    *obj += f * v;
                }
            }
            d[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations until optimal; returns `None` if unbounded.
    fn optimize(&mut self, cost: &[f64], d: &mut [f64], obj: &mut f64, budget: &mut usize) -> Option<bool> {
        let mut degenerate = 0usize;
        let mut refreshed = false;
        let mut pivots = 0usize;
        loop {
            if *budget == 0 {
                return Some(false);
            }
            let bland = degenerate >= DEGENERATE_STREAK;
            let mut enter = None;
            let mut best = -COST_EPS;
            for j in 0..self.n {
                if self.banned[j] || d[j] >= -COST_EPS {
                    continue;
                }
                if bland {
                    enter = Some(j);
                    break;
                }
                if d[j] < best {
                    best = d[j];
                    enter = Some(j);
                }
            }
            let Some(c) = enter else {
                // confirm optimality on a freshly inverted tableau
                self.reinvert();
                let (fresh, fresh_obj) = self.reduced_costs(cost);
                if (0..self.n).any(|j| !self.banned[j] && fresh[j] < -COST_EPS) {
                    d.copy_from_slice(&fresh);
                    *obj = fresh_obj;
                    if refreshed {
                        return Some(true);
                    }
                    refreshed = true;
                    continue;
                }
                return Some(true);
            };
            refreshed = false;
            let mut leave: Option<usize> = None;
            let mut ratio = f64::INFINITY;
            for i in 0..self.m {
                let a = self.at(i, c);
                if a > PIVOT_EPS {
                    let q = self.at(i, self.n) / a;
                    let better = match leave {
                        None => true,
                        Some(l) if bland => q < ratio - 1e-14 || (q <= ratio + 1e-14 && self.basis[i] < self.basis[l]),
                        Some(l) => q < ratio - 1e-14 || (q <= ratio + 1e-14 && a > self.at(l, c)),
                    };
                    if better {
                        ratio = q;
                        leave = Some(i);
                    }
                }
            }
            let r = leave?;
            if ratio <= 1e-14 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, c, d, obj);
            *budget -= 1;
            pivots += 1;
            if pivots % REINVERT_EVERY == 0 {
                self.reinvert();
                let (fresh, fresh_obj) = self.reduced_costs(cost);
                d.copy_from_slice(&fresh);
                *obj = fresh_obj;
            }
        }
    }

    fn run(mut self, cost: &[f64], max_pivots: usize) -> LpSolution {
        let mut budget = max_pivots;
        let mut phase_one_residual = 0.0;
        if self.n > self.orig {
            let mut c1 = vec![0.0; self.n];
            for v in c1[self.orig..].iter_mut() {
                *v = 1.0;
            }
            let (mut d, mut obj) = self.reduced_costs(&c1);
            match self.optimize(&c1, &mut d, &mut obj, &mut budget) {
                Some(true) => {}
                Some(false) => return self.finish(LpStatus::IterationLimit, cost, f64::NAN),
                None => return self.finish(LpStatus::Unbounded, cost, f64::NAN),
            }
            phase_one_residual = (self.orig..self.n)
                .filter_map(|j| self.basis.iter().position(|&b| b == j))
                .map(|i| self.at(i, self.n))
                .sum::<f64>();
            if phase_one_residual > 1e-9 {
                return self.finish(LpStatus::Infeasible, cost, phase_one_residual);
            }
            // drive remaining artificials out of the basis
            for i in 0..self.m {
                if self.basis[i] >= self.orig {
                    let j = (0..self.orig).max_by(|&a, &b| self.at(i, a).abs().total_cmp(&self.at(i, b).abs()));
                    if let Some(j) = j.filter(|&j| self.at(i, j).abs() > 1e-9) {
                        let mut dd = vec![0.0; self.n];
                        let mut oo = 0.0;
                        self.pivot(i, j, &mut dd, &mut oo);
                    }
                }
            }
            for j in self.orig..self.n {
                self.banned[j] = true;
            }
        }
        let mut full_cost = cost.to_vec();
        full_cost.resize(self.n, 0.0);
        let (mut d, mut obj) = self.reduced_costs(&full_cost);
        let status = match self.optimize(&full_cost, &mut d, &mut obj, &mut budget) {
            Some(true) => LpStatus::Optimal,
            Some(false) => LpStatus::IterationLimit,
            None => LpStatus::Unbounded,
        };
        self.finish(status, cost, phase_one_residual)
    }

    fn finish(&self, status: LpStatus, cost: &[f64], phase_one_residual: f64) -> LpSolution {
        let mut x = vec![0.0; self.orig];
        for i in 0..self.m {
            let b = self.basis[i];
            if b < self.orig {
                x[b] = self.at(i, self.n).max(0.0);
            }
        }
        let objective = x.iter().zip(cost).map(|(a, c)| a * c).sum();
        LpSolution { status, x, objective, phase_one_residual }
    }
}

/// Solves the square or overdetermined system `A x = b` by Gaussian
/// elimination with partial pivoting. Returns `None` unless the system has
/// full column rank and is consistent within `tol`.
pub fn solve_unique(a: &[Vec<f64>], b: &[f64], tol: f64) -> Option<Vec<f64>> {
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    if m < n {
        return None;
    }
    let mut t: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(r, &v)| {
            let mut row = r.clone();
            row.push(v);
            row
        })
        .collect();
    let mut row = 0;
    for col in 0..n {
        let (best, mag) = (row..m)
            .map(|i| (i, t[i][col].abs()))
            .fold((row, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if mag <= tol {
            return None;
        }
        t.swap(row, best);
        let p = t[row][col];
        for j in col..=n {
            t[row][j] /= p;
        }
        for i in 0..m {
            if i != row {
                let f = t[i][col];
                if f != 0.0 {
                    for j in col..=n {
                        t[i][j] -= f * t[row][j];
                    }
                }
            }
        }
        row += 1;
    }
    for r in t.iter().skip(n) {
        if r[n].abs() > tol {
            return None;
        }
    }
    Some((0..n).map(|i| t[i][n]).collect())
}

/// Rank of a dense matrix.
pub fn rank(a: &[Vec<f64>], tol: f64) -> usize {
    let mut t: Vec<Vec<f64>> = a.to_vec();
    let m = t.len();
    let n = t.first().map_or(0, |r| r.len());
    let mut r = 0;
    for col in 0..n {
        if r == m {
            break;
        }
        let (best, mag) = (r..m)
            .map(|i| (i, t[i][col].abs()))
            .fold((r, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if mag <= tol {
            continue;
        }
        t.swap(r, best);
        for i in r + 1..m {
            let f = t[i][col] / t[r][col];
            if f != 0.0 {
                for j in col..n {
                    t[i][j] -= f * t[r][j];
                }
            }
        }
        r += 1;
    }
    r
}
