//! Channel conditions as feasibility problems: spoofability, symmetrizability,
//! overwritability, and the three symmetrizability notions of an arbitrarily
//! varying channel.

use crate::feasibility::{
    solve_linear_feasibility, FeasibilityOutcome, FeasibilityProblem, KernelShape, Term, Verdict,
};
use crate::kernel::Kernel;
use crate::mac::{AvMac, Mac, User};
use crate::Result;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

fn term(kernel: usize, row: usize, output: usize, coef: f64) -> Term {
    Term { kernel, row, output, coef }
}

/// User-1 spoofability. Variables: `Q_{Y|X~Y~}` (kernel 0, input `(x~, y~)`)
/// and `Q_{X|X~X'}` (kernel 1, input `(x~, x')`). For every `(x', x~, y~, z)`:
///
/// `sum_y Q(y|x~,y~) W(z|x',y) = sum_y Q(y|x',y~) W(z|x~,y) = sum_x Q(x|x~,x') W(z|x,y~)`.
pub fn spoofable_1_problem(mac: &Mac) -> FeasibilityProblem {
    let (nx, ny, nz) = (mac.nx, mac.ny, mac.nz);
    let mut p = FeasibilityProblem::new(vec![KernelShape::new(vec![nx, ny], ny), KernelShape::new(vec![nx, nx], nx)]);
    for xp in 0..nx {
        for xt in 0..nx {
            for yt in 0..ny {
                for z in 0..nz {
                    let first: Vec<Term> = (0..ny).map(|y| term(0, xt * ny + yt, y, mac.prob(xp, y, z))).collect();
                    let second: Vec<Term> = (0..ny).map(|y| term(0, xp * ny + yt, y, -mac.prob(xt, y, z))).collect();
                    let third: Vec<Term> = (0..nx).map(|x| term(1, xt * nx + xp, x, -mac.prob(x, yt, z))).collect();
                    p.push([first.clone(), second].concat(), 0.0);
                    p.push([first, third].concat(), 0.0);
                }
            }
        }
    }
    p
}

/// User-2 spoofability. Variables: `Q_{X|X~Y~}` (kernel 0, input `(x~, y~)`)
/// and `Q_{Y|Y~Y'}` (kernel 1, input `(y~, y')`). For every `(x~, y~, y', z)`:
///
/// `sum_x Q(x|x~,y~) W(z|x,y') = sum_x Q(x|x~,y') W(z|x,y~) = sum_y Q(y|y~,y') W(z|x~,y)`.
pub fn spoofable_2_problem(mac: &Mac) -> FeasibilityProblem {
    let (nx, ny, nz) = (mac.nx, mac.ny, mac.nz);
    let mut p = FeasibilityProblem::new(vec![KernelShape::new(vec![nx, ny], nx), KernelShape::new(vec![ny, ny], ny)]);
    for xt in 0..nx {
        for yt in 0..ny {
            for yp in 0..ny {
                for z in 0..nz {
                    let first: Vec<Term> = (0..nx).map(|x| term(0, xt * ny + yt, x, mac.prob(x, yp, z))).collect();
                    let second: Vec<Term> = (0..nx).map(|x| term(0, xt * ny + yp, x, -mac.prob(x, yt, z))).collect();
                    let third: Vec<Term> = (0..ny).map(|y| term(1, yt * ny + yp, y, -mac.prob(xt, y, z))).collect();
                    p.push([first.clone(), second].concat(), 0.0);
                    p.push([first, third].concat(), 0.0);
                }
            }
        }
    }
    p
}

/// Symmetrizability. For user 2 the variable is `P_{X|Y}` and for all
/// `(y, y', z)`: `sum_x P(x|y') W(z|x,y) = sum_x P(x|y) W(z|x,y')`.
/// User 1 mirrors this with `P_{Y|X}`.
pub fn symmetrizable_problem(mac: &Mac, user: User) -> FeasibilityProblem {
    match user {
        User::Two => {
            let (nx, ny) = (mac.nx, mac.ny);
            let mut p = FeasibilityProblem::new(vec![KernelShape::new(vec![ny], nx)]);
            for y in 0..ny {
                for yp in 0..ny {
                    for z in 0..mac.nz {
                        let mut terms: Vec<Term> = (0..nx).map(|x| term(0, yp, x, mac.prob(x, y, z))).collect();
                        terms.extend((0..nx).map(|x| term(0, y, x, -mac.prob(x, yp, z))));
                        p.push(terms, 0.0);
                    }
                }
            }
            p
        }
        User::One => symmetrizable_problem(&mac.transpose(), User::Two),
    }
}

/// Overwritability. For user 2 the variable is `P_{X'|XY}` (input `(x, y)`)
/// and for all `(x, y, y', z)`: `sum_x' P(x'|x,y) W(z|x',y') = W(z|x,y)`.
/// User 1 mirrors this with `P_{Y'|XY}`, still indexed by `(x, y)`.
pub fn overwritable_problem(mac: &Mac, user: User) -> FeasibilityProblem {
    let (nx, ny, nz) = (mac.nx, mac.ny, mac.nz);
    match user {
        User::Two => {
            let mut p = FeasibilityProblem::new(vec![KernelShape::new(vec![nx, ny], nx)]);
            for x in 0..nx {
                for y in 0..ny {
                    for yp in 0..ny {
                        for z in 0..nz {
                            let terms = (0..nx).map(|xp| term(0, x * ny + y, xp, mac.prob(xp, yp, z))).collect();
                            p.push(terms, mac.prob(x, y, z));
                        }
                    }
                }
            }
            p
        }
        User::One => {
            let mut p = FeasibilityProblem::new(vec![KernelShape::new(vec![nx, ny], ny)]);
            for x in 0..nx {
                for xp in 0..nx {
                    for y in 0..ny {
                        for z in 0..nz {
                            let terms = (0..ny).map(|yp| term(0, x * ny + y, yp, mac.prob(xp, yp, z))).collect();
                            p.push(terms, mac.prob(x, y, z));
                        }
                    }
                }
            }
            p
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum AvSymKind {
    X,
    Y,
    XY,
}

/// Symmetrizability of an arbitrarily varying channel with a stochastic
/// `U: inputs -> S`, e.g. for kind `X` and all `(x, x', y, z)`:
/// `sum_s W(z|x,y,s) U(s|x') = sum_s W(z|x',y,s) U(s|x)`.
pub fn avmac_symmetrizable_problem(av: &AvMac, kind: AvSymKind) -> FeasibilityProblem {
    let (nx, ny, ns, nz) = (av.nx, av.ny, av.ns, av.nz);
    let shape = match kind {
        AvSymKind::X => vec![nx],
        AvSymKind::Y => vec![ny],
        AvSymKind::XY => vec![nx, ny],
    };
    let mut p = FeasibilityProblem::new(vec![KernelShape::new(shape, ns)]);
    // (x, y, x', y') pairs swapped by the condition, with the U-row index of each side
    let mut pairs: Vec<((usize, usize), usize, (usize, usize), usize)> = Vec::new();
    match kind {
        AvSymKind::X => {
            for x in 0..nx {
                for xp in 0..nx {
                    for y in 0..ny {
                        pairs.push(((x, y), xp, (xp, y), x));
                    }
                }
            }
        }
        AvSymKind::Y => {
            for x in 0..nx {
                for y in 0..ny {
                    for yp in 0..ny {
                        pairs.push(((x, y), yp, (x, yp), y));
                    }
                }
            }
        }
        AvSymKind::XY => {
            for x in 0..nx {
                for xp in 0..nx {
                    for y in 0..ny {
                        for yp in 0..ny {
                            pairs.push(((x, y), xp * ny + yp, (xp, yp), x * ny + y));
                        }
                    }
                }
            }
        }
    }
    for ((a, b), row_l, (c, d), row_r) in pairs {
        for z in 0..nz {
            let mut terms: Vec<Term> = (0..ns).map(|s| term(0, row_l, s, av.prob(a, b, s, z))).collect();
            terms.extend((0..ns).map(|s| term(0, row_r, s, -av.prob(c, d, s, z))));
            p.push(terms, 0.0);
        }
    }
    p
}

pub fn check_spoofable_1(mac: &Mac, tol: f64) -> Result<FeasibilityOutcome> {
    solve_linear_feasibility(&spoofable_1_problem(mac), tol)
}

pub fn check_spoofable_2(mac: &Mac, tol: f64) -> Result<FeasibilityOutcome> {
    solve_linear_feasibility(&spoofable_2_problem(mac), tol)
}

pub fn check_spoofable(mac: &Mac, user: User, tol: f64) -> Result<FeasibilityOutcome> {
    match user {
        User::One => check_spoofable_1(mac, tol),
        User::Two => check_spoofable_2(mac, tol),
    }
}

pub fn check_symmetrizable(mac: &Mac, user: User, tol: f64) -> Result<FeasibilityOutcome> {
    solve_linear_feasibility(&symmetrizable_problem(mac, user), tol)
}

pub fn check_overwritable(mac: &Mac, user: User, tol: f64) -> Result<FeasibilityOutcome> {
    solve_linear_feasibility(&overwritable_problem(mac, user), tol)
}

pub fn check_avmac_symmetrizable(av: &AvMac, kind: AvSymKind, tol: f64) -> Result<FeasibilityOutcome> {
    solve_linear_feasibility(&avmac_symmetrizable_problem(av, kind), tol)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassificationReport {
    pub spoofable_1: FeasibilityOutcome,
    pub spoofable_2: FeasibilityOutcome,
    pub symmetrizable_1: FeasibilityOutcome,
    pub symmetrizable_2: FeasibilityOutcome,
    pub overwritable_1: FeasibilityOutcome,
    pub overwritable_2: FeasibilityOutcome,
    pub hierarchy_consistent: bool,
    pub notes: Vec<String>,
}

impl ClassificationReport {
    pub fn outcomes(&self) -> [(&'static str, &FeasibilityOutcome); 6] {
        [
            ("spoofable_1", &self.spoofable_1),
            ("spoofable_2", &self.spoofable_2),
            ("symmetrizable_1", &self.symmetrizable_1),
            ("symmetrizable_2", &self.symmetrizable_2),
            ("overwritable_1", &self.overwritable_1),
            ("overwritable_2", &self.overwritable_2),
        ]
    }

    pub fn all_decisive(&self) -> bool {
        self.outcomes().iter().all(|(_, o)| o.verdict.is_decisive())
    }
}

/// Runs all six checks in a fixed order and records whether the verdicts
/// respect overwritable => spoofable => symmetrizable for each user.
pub fn classify(mac: &Mac, tol: f64) -> Result<ClassificationReport> {
    let spoofable_1 = check_spoofable_1(mac, tol)?;
    let spoofable_2 = check_spoofable_2(mac, tol)?;
    let symmetrizable_1 = check_symmetrizable(mac, User::One, tol)?;
    let symmetrizable_2 = check_symmetrizable(mac, User::Two, tol)?;
    let overwritable_1 = check_overwritable(mac, User::One, tol)?;
    let overwritable_2 = check_overwritable(mac, User::Two, tol)?;
    let mut notes = Vec::new();
    let mut consistent = true;
    let chains = [
        (1, &overwritable_1, &spoofable_1, &symmetrizable_1),
        (2, &overwritable_2, &spoofable_2, &symmetrizable_2),
    ];
    for (i, over, spoof, sym) in chains {
        if over.verdict == Verdict::Feasible && spoof.verdict == Verdict::Infeasible {
            consistent = false;
            notes.push(format!("overwritable_{i} feasible but spoofable_{i} infeasible"));
        }
        if spoof.verdict == Verdict::Feasible && sym.verdict == Verdict::Infeasible {
            consistent = false;
            notes.push(format!("spoofable_{i} feasible but symmetrizable_{i} infeasible"));
        }
    }
    let report = ClassificationReport {
        spoofable_1,
        spoofable_2,
        symmetrizable_1,
        symmetrizable_2,
        overwritable_1,
        overwritable_2,
        hierarchy_consistent: consistent,
        notes,
    };
    let mut report = report;
    for (name, o) in report.clone().outcomes() {
        if o.verdict == Verdict::Inconclusive {
            report.notes.push(format!("{name} inconclusive (margin {:e})", o.margin));
        }
    }
    Ok(report)
}

/// Spoofing kernels built from an overwriting attack and a distribution `q`
/// on the overwritten user's alphabet.
///
/// For user 2, `P_{X'|XY}` gives `Q_{X|X~Y~}(x|x~,y~) = sum_y q(y) P(x|x~,y)`
/// and `Q_{Y|Y~Y'} = q`. For user 1, `P_{Y'|XY}` gives
/// `Q_{Y|X~Y~}(y|x~,y~) = sum_x q(x) P(y|x,y~)` and `Q_{X|X~X'} = q`.
pub fn spoof_from_overwrite(mac: &Mac, user: User, overwrite: &Kernel, q: &[f64]) -> [Kernel; 2] {
    let (nx, ny) = (mac.nx, mac.ny);
    match user {
        User::Two => {
            let qx = Kernel::from_fn(vec![nx, ny], nx, |a, x| (0..ny).map(|y| q[y] * overwrite.get(&[a[0], y], x)).sum());
            let qy = Kernel::from_fn(vec![ny, ny], ny, |_, y| q[y]);
            [qx, qy]
        }
        User::One => {
            let qy = Kernel::from_fn(vec![nx, ny], ny, |a, y| (0..nx).map(|x| q[x] * overwrite.get(&[x, a[1]], y)).sum());
            let qx = Kernel::from_fn(vec![nx, nx], nx, |_, x| q[x]);
            [qy, qx]
        }
    }
}

/// Symmetrizing kernel read off a spoofing certificate at a fixed first
/// input `anchor`: for user 2, `P_{X|Y}(x|y) = Q_{X|X~Y~}(x|anchor,y)`; for
/// user 1, `P_{Y|X}(y|x) = Q_{Y|X~Y~}(y|x,anchor)`.
pub fn symmetrize_from_spoof(mac: &Mac, user: User, spoof: &[Kernel], anchor: usize) -> Kernel {
    let (nx, ny) = (mac.nx, mac.ny);
    match user {
        User::Two => Kernel::from_fn(vec![ny], nx, |a, x| spoof[0].get(&[anchor, a[0]], x)),
        User::One => Kernel::from_fn(vec![nx], ny, |a, y| spoof[0].get(&[a[0], anchor], y)),
    }
}
