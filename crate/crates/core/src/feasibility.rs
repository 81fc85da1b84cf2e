//! Linear feasibility over stochastic-kernel variables.
//!
//! A problem lists kernel shapes and linear equalities in their entries. The
//! solver minimizes the total absolute violation of the equalities subject to
//! nonnegativity and unit row sums, then re-checks the rounded certificate by
//! direct substitution.

use crate::kernel::Kernel;
use crate::lp::{Lp, LpStatus};
use crate::{Error, Result};
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KernelShape {
    pub input_shape: Vec<usize>,
    pub output_size: usize,
}

impl KernelShape {
    pub fn new(input_shape: Vec<usize>, output_size: usize) -> Self {
        Self { input_shape, output_size }
    }

    pub fn rows(&self) -> usize {
        self.input_shape.iter().product()
    }

    pub fn len(&self) -> usize {
        self.rows() * self.output_size
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `coef * K_kernel(output | row)`, with `row` the flattened input tuple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub kernel: usize,
    pub row: usize,
    pub output: usize,
    pub coef: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Equality {
    pub terms: Vec<Term>,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeasibilityProblem {
    pub kernels: Vec<KernelShape>,
    pub equalities: Vec<Equality>,
}

impl FeasibilityProblem {
    pub fn new(kernels: Vec<KernelShape>) -> Self {
        Self { kernels, equalities: Vec::new() }
    }

    /// Builds a term from an unflattened input tuple.
    pub fn term(&self, kernel: usize, inputs: &[usize], output: usize, coef: f64) -> Term {
        let row = crate::kernel::flatten(inputs, &self.kernels[kernel].input_shape);
        Term { kernel, row, output, coef }
    }

    pub fn push(&mut self, terms: Vec<Term>, rhs: f64) {
        self.equalities.push(Equality { terms, rhs });
    }

    fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.kernels
            .iter()
            .map(|k| {
                let o = acc;
                acc += k.len();
                o
            })
            .collect()
    }

    fn check_indices(&self) -> Result<()> {
        for eq in &self.equalities {
            if !eq.rhs.is_finite() {
                return Err(Error::InvalidParameter("non-finite right-hand side".into()));
            }
            for t in &eq.terms {
                let shape = self.kernels.get(t.kernel).ok_or(Error::ShapeMismatch)?;
                if t.row >= shape.rows() || t.output >= shape.output_size || !t.coef.is_finite() {
                    return Err(Error::ShapeMismatch);
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "SCREAMING_SNAKE_CASE"))]
pub enum Verdict {
    Feasible,
    Infeasible,
    Inconclusive,
}

impl Verdict {
    pub fn is_decisive(self) -> bool {
        self != Verdict::Inconclusive
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Feasible => "FEASIBLE",
            Verdict::Infeasible => "INFEASIBLE",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeasibilityOutcome {
    pub verdict: Verdict,
    /// Present when the verdict is feasible.
    pub certificate: Option<Vec<Kernel>>,
    /// Largest residual of the rounded certificate.
    pub violation: f64,
    /// Minimized total absolute violation.
    pub margin: f64,
}

/// Largest absolute equality residual, or stochasticity deviation, of `kernels`.
pub fn verify_certificate(problem: &FeasibilityProblem, kernels: &[Kernel]) -> Result<f64> {
    if kernels.len() != problem.kernels.len() {
        return Err(Error::ShapeMismatch);
    }
    for (k, s) in kernels.iter().zip(&problem.kernels) {
        if k.input_shape != s.input_shape || k.output_size != s.output_size || k.k.len() != s.len() {
            return Err(Error::ShapeMismatch);
        }
    }
    problem.check_indices()?;
    let mut worst = kernels.iter().map(Kernel::stochastic_deviation).fold(0.0, f64::max);
    for eq in &problem.equalities {
        let lhs: f64 = eq.terms.iter().map(|t| t.coef * kernels[t.kernel].at(t.row, t.output)).sum();
        worst = worst.max((lhs - eq.rhs).abs());
    }
    Ok(worst)
}

/// Merges terms, drops empty rows, normalizes signs and removes duplicates.
fn canonical_rows(problem: &FeasibilityProblem, offsets: &[usize]) -> Vec<(Vec<(usize, f64)>, f64)> {
    let mut seen: BTreeMap<(Vec<(usize, u64)>, u64), ()> = BTreeMap::new();
    let mut out = Vec::new();
    for eq in &problem.equalities {
        let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
        for t in &eq.terms {
            let var = offsets[t.kernel] + t.row * problem.kernels[t.kernel].output_size + t.output;
            *merged.entry(var).or_insert(0.0) += t.coef;
        }
        let mut terms: Vec<(usize, f64)> = merged.into_iter().filter(|&(_, c)| c.abs() > 1e-15).collect();
        let mut rhs = eq.rhs;
        if terms.is_empty() && rhs == 0.0 {
            continue;
        }
        if terms.first().is_some_and(|&(_, c)| c < 0.0) || (terms.is_empty() && rhs < 0.0) {
            for t in terms.iter_mut() {
                t.1 = -t.1;
            }
            rhs = -rhs;
        }
        let key = (terms.iter().map(|&(v, c)| (v, c.to_bits())).collect(), (rhs + 0.0).to_bits());
        if seen.insert(key, ()).is_none() {
            out.push((terms, rhs));
        }
    }
    out
}

pub fn solve_linear_feasibility(problem: &FeasibilityProblem, tol: f64) -> Result<FeasibilityOutcome> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    let offsets = problem.offsets();
    let nvars: usize = problem.kernels.iter().map(KernelShape::len).sum();
    if nvars == 0 {
        return Err(Error::Degenerate);
    }
    problem.check_indices()?;
    let rows = canonical_rows(problem, &offsets);
    let ncols = nvars + 2 * rows.len();
    let mut lp = Lp::new(ncols);
    for (e, (terms, rhs)) in rows.iter().enumerate() {
        let mut row = vec![0.0; ncols];
        for &(v, c) in terms {
            row[v] = c;
        }
        row[nvars + 2 * e] = 1.0;
        row[nvars + 2 * e + 1] = -1.0;
        lp.cost[nvars + 2 * e] = 1.0;
        lp.cost[nvars + 2 * e + 1] = 1.0;
        lp.push_row(row, *rhs);
    }
    for (k, shape) in problem.kernels.iter().enumerate() {
        for r in 0..shape.rows() {
            let mut row = vec![0.0; ncols];
            let base = offsets[k] + r * shape.output_size;
            for v in row[base..base + shape.output_size].iter_mut() {
                *v = 1.0;
            }
            lp.push_row(row, 1.0);
        }
    }
    let sol = lp.solve();
    let margin = match sol.status {
        LpStatus::Optimal => sol.objective.max(0.0),
        _ => f64::INFINITY,
    };
    let certificate = clean_certificate(problem, &offsets, &sol.x);
    let violation = verify_certificate(problem, &certificate)?;
    let verdict = if sol.status == LpStatus::Optimal && violation <= tol {
        Verdict::Feasible
    } else if sol.status == LpStatus::Optimal && margin > 10.0 * tol {
        Verdict::Infeasible
    } else {
        Verdict::Inconclusive
    };
    Ok(FeasibilityOutcome {
        verdict,
        certificate: (verdict == Verdict::Feasible).then_some(certificate),
        violation,
        margin,
    })
}

fn clean_certificate(problem: &FeasibilityProblem, offsets: &[usize], x: &[f64]) -> Vec<Kernel> {
    problem
        .kernels
        .iter()
        .zip(offsets)
        .map(|(shape, &off)| {
            let mut k: Vec<f64> = x[off..off + shape.len()]
                .iter()
                .map(|&v| if v < 1e-14 { 0.0 } else { v })
                .collect();
            for row in k.chunks_mut(shape.output_size) {
                let s: f64 = row.iter().sum();
                if s > 0.0 {
                    row.iter_mut().for_each(|v| *v /= s);
                } else {
                    row.iter_mut().for_each(|v| *v = 1.0 / shape.output_size as f64);
                }
            }
            Kernel { input_shape: shape.input_shape.clone(), output_size: shape.output_size, k }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unconstrained_kernel_is_feasible() {
        let p = FeasibilityProblem::new(vec![KernelShape::new(vec![2], 2)]);
        let out = solve_linear_feasibility(&p, DEFAULT_TOL).unwrap();
        assert_eq!(out.verdict, Verdict::Feasible);
        assert_eq!(out.violation, 0.0);
        assert!(out.certificate.unwrap()[0].validate().is_ok());
    }

    #[test]
    fn contradictory_equalities() {
        let mut p = FeasibilityProblem::new(vec![KernelShape::new(vec![1], 2)]);
        let t = p.term(0, &[0], 0, 1.0);
        p.push(vec![t], 1.0);
        p.push(vec![t], 0.0);
        let out = solve_linear_feasibility(&p, DEFAULT_TOL).unwrap();
        assert_eq!(out.verdict, Verdict::Infeasible);
        assert!(out.margin >= 0.5);
        assert!(out.certificate.is_none());
    }

    #[test]
    fn empty_problem_is_degenerate() {
        let p = FeasibilityProblem::new(vec![]);
        assert_eq!(solve_linear_feasibility(&p, DEFAULT_TOL), Err(Error::Degenerate));
    }

    #[test]
    fn verify_rejects_wrong_shapes() {
        let p = FeasibilityProblem::new(vec![KernelShape::new(vec![2], 2)]);
        assert_eq!(verify_certificate(&p, &[Kernel::identity(3)]), Err(Error::ShapeMismatch));
        assert_eq!(verify_certificate(&p, &[Kernel::identity(2)]), Ok(0.0));
    }

    #[test]
    fn pinned_value_is_recovered() {
        // k(0|0) - k(1|1) = 0.25, k(1|1) = 0.5
        let mut p = FeasibilityProblem::new(vec![KernelShape::new(vec![2], 2)]);
        let a = p.term(0, &[0], 0, 1.0);
        let b = p.term(0, &[1], 1, -1.0);
        p.push(vec![a, b], 0.25);
        let c = p.term(0, &[1], 1, 1.0);
        p.push(vec![c], 0.5);
        let out = solve_linear_feasibility(&p, DEFAULT_TOL).unwrap();
        assert_eq!(out.verdict, Verdict::Feasible);
        let k = &out.certificate.unwrap()[0];
        assert!((k.get(&[0], 0) - 0.75).abs() < 1e-12);
    }
}
