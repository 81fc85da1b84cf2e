use crate::kernel::Kernel;
use crate::lp::solve_unique;
use crate::mac::{AvMac, Mac};
use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;

/// A vertex `(Q_{X'|X}, Q_{Y'|Y})` of the attack polytope and the channel it
/// induces, `W~(z|x,y) = sum_x' Q(x'|x) W(z|x',y)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AttackVertex {
    pub qx: Kernel,
    pub qy: Kernel,
    pub induced: Mac,
    pub residual: f64,
}

/// Largest violation of `sum_x' Qx(x'|x) W(z|x',y) = sum_y' Qy(y'|y) W(z|x,y')`
/// and of stochasticity.
pub fn outer_bound_residual(mac: &Mac, qx: &Kernel, qy: &Kernel) -> f64 {
    let mut r = qx.stochastic_deviation().max(qy.stochastic_deviation());
    for x in 0..mac.nx {
        for y in 0..mac.ny {
            for z in 0..mac.nz {
                let a: f64 = (0..mac.nx).map(|xp| qx.at(x, xp) * mac.prob(xp, y, z)).sum();
                let b: f64 = (0..mac.ny).map(|yp| qy.at(y, yp) * mac.prob(x, yp, z)).sum();
                r = r.max((a - b).abs());
            }
        }
    }
    r
}

fn induced(mac: &Mac, qx: &Kernel) -> Result<Mac> {
    Mac::from_fn("induced", mac.nx, mac.ny, mac.nz, |x, y, z| (0..mac.nx).map(|xp| qx.at(x, xp) * mac.prob(xp, y, z)).sum())
}

/// Vertices of `{(Qx, Qy) stochastic : the two mixtures agree}`, found as
/// the basic solutions over every candidate support. Costs `2^d` linear
/// solves with `d = |X|^2 + |Y|^2`, checked against `budget`.
pub fn attack_polytope_vertices(mac: &Mac, budget: u128) -> Result<Vec<AttackVertex>> {
    let (nx, ny, nz) = (mac.nx, mac.ny, mac.nz);
    let d = nx * nx + ny * ny;
    let required = if d >= 127 { u128::MAX } else { 1u128 << d };
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for x in 0..nx {
        for y in 0..ny {
            for z in 0..nz {
                let mut r = vec![0.0; d];
                for xp in 0..nx {
                    r[x * nx + xp] += mac.prob(xp, y, z);
                }
                for yp in 0..ny {
                    r[nx * nx + y * ny + yp] -= mac.prob(x, yp, z);
                }
                if r.iter().any(|&v| v != 0.0) {
                    rows.push(r);
                    rhs.push(0.0);
                }
            }
        }
    }
    for x in 0..nx {
        let mut r = vec![0.0; d];
        r[x * nx..(x + 1) * nx].iter_mut().for_each(|v| *v = 1.0);
        rows.push(r);
        rhs.push(1.0);
    }
    for y in 0..ny {
        let mut r = vec![0.0; d];
        let s = nx * nx + y * ny;
        r[s..s + ny].iter_mut().for_each(|v| *v = 1.0);
        rows.push(r);
        rhs.push(1.0);
    }
    let mut found: Vec<Vec<f64>> = Vec::new();
    let max_support = rows.len().min(d);
    for mask in 1u64..(1u64 << d) {
        let support: Vec<usize> = (0..d).filter(|&i| mask >> i & 1 == 1).collect();
        if support.len() > max_support {
            continue;
        }
        // Every stochastic row needs a nonzero entry.
        let covers = (0..nx).all(|x| support.iter().any(|&i| i < nx * nx && i / nx == x))
            && (0..ny).all(|y| support.iter().any(|&i| i >= nx * nx && (i - nx * nx) / ny == y));
        if !covers {
            continue;
        }
        let sub: Vec<Vec<f64>> = rows.iter().map(|r| support.iter().map(|&i| r[i]).collect()).collect();
        let Some(sol) = solve_unique(&sub, &rhs, 1e-10) else { continue };
        if sol.iter().any(|&v| v < -1e-9) {
            continue;
        }
        let mut full = vec![0.0; d];
        for (&i, &v) in support.iter().zip(&sol) {
            full[i] = v.max(0.0);
        }
        if !found.iter().any(|f| f.iter().zip(&full).all(|(a, b)| (a - b).abs() <= 1e-6)) {
            found.push(full);
        }
    }
    let mut out = Vec::with_capacity(found.len());
    for v in found {
        let qx = Kernel::new(vec![nx], nx, v[..nx * nx].to_vec())?;
        let qy = Kernel::new(vec![ny], ny, v[nx * nx..].to_vec())?;
        let residual = outer_bound_residual(mac, &qx, &qy);
        if residual > 1e-9 {
            continue;
        }
        out.push(AttackVertex { induced: induced(mac, &qx)?, qx, qy, residual });
    }
    Ok(out)
}

/// The arbitrarily varying channel whose states are the induced channels.
pub fn outer_bound_avmac(vertices: &[AttackVertex]) -> Result<AvMac> {
    let states: Vec<Mac> = vertices.iter().map(|v| v.induced.clone()).collect();
    AvMac::from_states("outer_bound", &states)
}
