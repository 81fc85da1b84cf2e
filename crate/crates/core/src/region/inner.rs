use super::RatePoint;
use crate::info::{h2, mutual_information, JointDist};
use crate::kernel::DistributionVector;
use crate::lp::{Lp, LpStatus};
use crate::mac::Mac;
use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Which pair of minimizations: `R1_form` bounds `r1` by `I(X;Z)` and `r2`
/// by `I(Y;Z|X)` (the latter with `X` independent of `Y`); `R2_form`
/// bounds `r1` by `I(X;Z|Y)` (independent) and `r2` by `I(Y;Z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CornerForm {
    R1Form,
    R2Form,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SearchConfig {
    pub starts: usize,
    pub max_iters: usize,
    /// Stop a run once the Frank-Wolfe gap is below this.
    pub gap_tol: f64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { starts: 32, max_iters: 200, gap_tol: 1e-10, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InnerCorner {
    pub form: CornerForm,
    /// Best values found; the true minima may be lower.
    pub point: RatePoint,
    /// Always `HEURISTIC_UPPER_BOUND_ON_MIN`.
    pub flag: &'static str,
    /// Frank-Wolfe lower bounds on the two minima.
    pub lower_bounds: [f64; 2],
}

pub const HEURISTIC_FLAG: &str = "HEURISTIC_UPPER_BOUND_ON_MIN";

/// The polytope of joints `P_{X Y X~ Y~ Z}` with `P_{X Y~ Z} = P1 x P_{Y~} x W`
/// and `P_{X~ Y Z} = P_{X~} x P2 x W`, optionally with `P_{XY} = P1 x P2`.
/// Variables: the joint, then `P_{Y~}`, then `P_{X~}`.
struct Polytope<'a> {
    mac: &'a Mac,
    p1: Vec<f64>,
    p2: Vec<f64>,
    lp: Lp,
    joint_len: usize,
}

impl<'a> Polytope<'a> {
    fn new(mac: &'a Mac, p1: &[f64], p2: &[f64], independent: bool) -> Self {
        let (nx, ny, nz) = (mac.nx, mac.ny, mac.nz);
        let joint_len = nx * ny * nx * ny * nz;
        let cols = joint_len + ny + nx;
        let idx = |x: usize, y: usize, xt: usize, yt: usize, z: usize| (((x * ny + y) * nx + xt) * ny + yt) * nz + z;
        let mut lp = Lp::new(cols);
        for x in 0..nx {
            for yt in 0..ny {
                for z in 0..nz {
                    let mut terms: Vec<(usize, f64)> = Vec::new();
                    for y in 0..ny {
                        for xt in 0..nx {
                            terms.push((idx(x, y, xt, yt, z), 1.0));
                        }
                    }
                    terms.push((joint_len + yt, -p1[x] * mac.prob(x, yt, z)));
                    lp.push_sparse(&terms, 0.0);
                }
            }
        }
        for xt in 0..nx {
            for y in 0..ny {
                for z in 0..nz {
                    let mut terms: Vec<(usize, f64)> = Vec::new();
                    for x in 0..nx {
                        for yt in 0..ny {
                            terms.push((idx(x, y, xt, yt, z), 1.0));
                        }
                    }
                    terms.push((joint_len + ny + xt, -p2[y] * mac.prob(xt, y, z)));
                    lp.push_sparse(&terms, 0.0);
                }
            }
        }
        let ones = |start: usize, len: usize| -> Vec<(usize, f64)> { (start..start + len).map(|c| (c, 1.0)).collect() };
        lp.push_sparse(&ones(joint_len, ny), 1.0);
        lp.push_sparse(&ones(joint_len + ny, nx), 1.0);
        if independent {
            for x in 0..nx {
                for y in 0..ny {
                    let mut terms = Vec::new();
                    for xt in 0..nx {
                        for yt in 0..ny {
                            for z in 0..nz {
                                terms.push((idx(x, y, xt, yt, z), 1.0));
                            }
                        }
                    }
                    lp.push_sparse(&terms, p1[x] * p2[y]);
                }
            }
        }
        Self { mac, p1: p1.to_vec(), p2: p2.to_vec(), lp, joint_len }
    }

    fn minimize_linear(&self, cost: &[f64]) -> Result<Vec<f64>> {
        let mut lp = self.lp.clone();
        lp.cost = cost.to_vec();
        let sol = lp.solve();
        match sol.status {
            LpStatus::Optimal => Ok(sol.x.into_iter().map(|v| v.max(0.0)).collect()),
            _ => Err(Error::InfeasibleConstraintSet),
        }
    }

    /// `X~ = X`, `Y~ = Y` under `P1 x P2 x W`, which meets every constraint.
    fn product_point(&self) -> Vec<f64> {
        let (nx, ny, nz) = (self.mac.nx, self.mac.ny, self.mac.nz);
        let mut v = vec![0.0; self.joint_len + ny + nx];
        for x in 0..nx {
            for y in 0..ny {
                for z in 0..nz {
                    v[(((x * ny + y) * nx + x) * ny + y) * nz + z] = self.p1[x] * self.p2[y] * self.mac.prob(x, y, z);
                }
            }
        }
        v[self.joint_len..self.joint_len + ny].copy_from_slice(&self.p2);
        v[self.joint_len + ny..].copy_from_slice(&self.p1);
        v
    }

    /// `P_{XYZ}` of the joint part of `v`.
    fn xyz(&self, v: &[f64]) -> Vec<f64> {
        let (nx, ny, nz) = (self.mac.nx, self.mac.ny, self.mac.nz);
        let mut out = vec![0.0; nx * ny * nz];
        for (i, &p) in v[..self.joint_len].iter().enumerate() {
            let z = i % nz;
            let xy = i / (nz * nx * ny);
            out[xy * nz + z] += p;
        }
        out
    }
}

/// `I(A;Z|C)` on `P_{XYZ}`: `a` and `c` are coordinate lists over `{0: X, 1: Y}`.
struct Term {
    a: &'static [usize],
    c: &'static [usize],
}

impl Term {
    fn value(&self, sizes: &[usize], pxyz: &[f64]) -> f64 {
        let j = JointDist { sizes: sizes.to_vec(), p: pxyz.to_vec() };
        mutual_information(&j, self.a, &[2], self.c).unwrap_or(0.0)
    }

    /// Gradient with respect to `P_{XYZ}`: `log2 p(acz) p(c) / (p(ac) p(cz))`,
    /// floored where a probability vanishes.
    fn gradient(&self, sizes: &[usize], pxyz: &[f64]) -> Vec<f64> {
        let j = JointDist { sizes: sizes.to_vec(), p: pxyz.to_vec() };
        let cat = |x: &[usize], y: &[usize]| -> Vec<usize> { x.iter().chain(y).copied().collect() };
        let m = |coords: &[usize]| j.marginal(coords).map(|d| d.p).unwrap_or_default();
        let acz = cat(&cat(self.a, self.c), &[2]);
        let ac = cat(self.a, self.c);
        let cz = cat(self.c, &[2]);
        let (p_acz, p_ac, p_cz, p_c) = (m(&acz), m(&ac), m(&cz), m(self.c));
        let flat = |coords: &[usize], idx: &[usize]| coords.iter().fold(0, |acc, &c| acc * sizes[c] + idx[c]);
        let lg = |v: f64| libm::log2(v.max(1e-18));
        let mut g = Vec::with_capacity(pxyz.len());
        let mut idx = [0usize; 3];
        for i in 0..pxyz.len() {
            crate::kernel::unflatten(i, sizes, &mut idx);
            let c_val = if self.c.is_empty() { 1.0 } else { p_c[flat(self.c, &idx)] };
            g.push(lg(p_acz[flat(&acz, &idx)]) + lg(c_val) - lg(p_ac[flat(&ac, &idx)]) - lg(p_cz[flat(&cz, &idx)]));
        }
        g
    }
}

fn frank_wolfe(poly: &Polytope, term: &Term, cfg: &SearchConfig, rng: &mut ChaCha8Rng) -> Result<(f64, f64)> {
    let sizes = [poly.mac.nx, poly.mac.ny, poly.mac.nz];
    let cols = poly.lp.cols;
    let f = |v: &[f64]| term.value(&sizes, &poly.xyz(v));
    let (nx, ny, nz) = (poly.mac.nx, poly.mac.ny, poly.mac.nz);
    let mut best = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    for start in 0..cfg.starts.max(1) {
        // The first run starts at the product point, later ones at the mean
        // of a few random vertices.
        let mut v = vec![0.0; cols];
        if start == 0 {
            v = poly.product_point();
        }
        let k = if start == 0 { 0 } else { 3 };
        for _ in 0..k {
            let cost: Vec<f64> = (0..cols).map(|_| rng.gen::<f64>() - 0.5).collect();
            let s = poly.minimize_linear(&cost)?;
            for (a, b) in v.iter_mut().zip(&s) {
                *a += b / k as f64;
            }
        }
        let mut fv = f(&v);
        for _ in 0..cfg.max_iters {
            let g_xyz = term.gradient(&sizes, &poly.xyz(&v));
            let mut cost = vec![0.0; cols];
            for (i, c) in cost[..poly.joint_len].iter_mut().enumerate() {
                let z = i % nz;
                let xy = i / (nz * nx * ny);
                *c = g_xyz[xy * nz + z];
            }
            let s = poly.minimize_linear(&cost)?;
            let gap: f64 = cost.iter().zip(v.iter().zip(&s)).map(|(c, (a, b))| c * (a - b)).sum();
            lower = lower.max(fv - gap.max(0.0));
            if gap <= cfg.gap_tol {
                break;
            }
            // Golden-section line search on the convex segment.
            let at = |t: f64| -> Vec<f64> { v.iter().zip(&s).map(|(a, b)| a + t * (b - a)).collect() };
            let phi = 0.618_033_988_749_894_9;
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            for _ in 0..60 {
                let m1 = hi - phi * (hi - lo);
                let m2 = lo + phi * (hi - lo);
                if f(&at(m1)) <= f(&at(m2)) {
                    hi = m2;
                } else {
                    lo = m1;
                }
            }
            let t = 0.5 * (lo + hi);
            let cand = at(t);
            let fc = f(&cand);
            if fc > fv {
                break;
            }
            v = cand;
            fv = fc;
        }
        best = best.min(fv);
    }
    Ok((best, lower.min(best)))
}

/// Minimizes the two mutual informations of `form` over the constraint
/// polytope by multi-start Frank-Wolfe. The objectives are convex on the
/// polytope, but the returned values are still only the best found.
pub fn inner_bound_corner(
    mac: &Mac,
    comp1: &DistributionVector,
    comp2: &DistributionVector,
    form: CornerForm,
    cfg: &SearchConfig,
) -> Result<InnerCorner> {
    if comp1.len() != mac.nx || comp2.len() != mac.ny {
        return Err(Error::AlphabetMismatch { left: comp1.len() * comp2.len(), right: mac.nx * mac.ny });
    }
    let (p1, p2) = (comp1.probs(), comp2.probs());
    let free = Polytope::new(mac, p1, p2, false);
    let indep = Polytope::new(mac, p1, p2, true);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (t1, t2, poly1, poly2) = match form {
        CornerForm::R1Form => (Term { a: &[0], c: &[] }, Term { a: &[1], c: &[0] }, &free, &indep),
        CornerForm::R2Form => (Term { a: &[0], c: &[1] }, Term { a: &[1], c: &[] }, &indep, &free),
    };
    let (r1, l1) = frank_wolfe(poly1, &t1, cfg, &mut rng)?;
    let (r2, l2) = frank_wolfe(poly2, &t2, cfg, &mut rng)?;
    Ok(InnerCorner { form, point: RatePoint::new(r1, r2), flag: HEURISTIC_FLAG, lower_bounds: [l1.max(0.0), l2.max(0.0)] })
}

/// Both corners for the binary erasure channel with
/// `P1 = (0.5 - delta, 0.5 + delta)` and `P2 = (0.5 + delta, 0.5 - delta)`.
/// Since `P1 != P2` the constraints force `X~ = X`, `Y~ = Y`, so every
/// term is evaluated at `P1 x P2 x W`.
pub fn erasure_inner_bound_exact(delta: f64) -> Result<[RatePoint; 2]> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    let (a, b) = (0.5 - delta, 0.5 + delta);
    // Z = X + Y with P(X=0) = a, P(Y=0) = b.
    let hz = crate::info::entropy(&[a * b, a * (1.0 - b) + (1.0 - a) * b, (1.0 - a) * (1.0 - b)]);
    let (hx, hy) = (h2(a), h2(b));
    Ok([RatePoint::new(hz - hy, hy), RatePoint::new(hx, hz - hx)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mac::builtin_channel;

    fn quick() -> SearchConfig {
        SearchConfig { starts: 4, ..SearchConfig::default() }
    }

    #[test]
    fn erasure_corners_near_uniform() {
        let [c1, c2] = erasure_inner_bound_exact(1e-4).unwrap();
        assert!((c1.r1 - 0.5).abs() < 1e-6 && (c1.r2 - 1.0).abs() < 1e-6);
        assert!((c2.r1 - 1.0).abs() < 1e-6 && (c2.r2 - 0.5).abs() < 1e-6);
        assert!(erasure_inner_bound_exact(0.5).is_err());
        assert!(erasure_inner_bound_exact(0.0).is_err());
    }

    #[test]
    fn constant_channel_has_zero_corners() {
        let mac = Mac::deterministic("const", 2, 2, 1, |_, _| 0).unwrap();
        let u = DistributionVector::uniform(2);
        for form in [CornerForm::R1Form, CornerForm::R2Form] {
            let c = inner_bound_corner(&mac, &u, &u, form, &quick()).unwrap();
            assert!(c.point.r1.abs() < 1e-12 && c.point.r2.abs() < 1e-12);
        }
    }

    #[test]
    fn identity_channel_corner() {
        let mac = Mac::identity(2, 2);
        let u = DistributionVector::uniform(2);
        let c = inner_bound_corner(&mac, &u, &u, CornerForm::R1Form, &quick()).unwrap();
        assert!((c.point.r1 - 1.0).abs() < 1e-6, "{c:?}");
        assert!((c.point.r2 - 1.0).abs() < 1e-6, "{c:?}");
        assert_eq!(c.flag, HEURISTIC_FLAG);
    }

    #[test]
    fn erasure_heuristic_matches_exact() {
        let mac = builtin_channel("erasure").unwrap();
        let p1 = DistributionVector::new(vec![0.45, 0.55]).unwrap();
        let p2 = DistributionVector::new(vec![0.55, 0.45]).unwrap();
        let exact = erasure_inner_bound_exact(0.05).unwrap();
        for (form, e) in [(CornerForm::R1Form, exact[0]), (CornerForm::R2Form, exact[1])] {
            let c = inner_bound_corner(&mac, &p1, &p2, form, &quick()).unwrap();
            assert!((c.point.r1 - e.r1).abs() < 1e-3 && (c.point.r2 - e.r2).abs() < 1e-3, "{c:?} vs {e:?}");
        }
    }
}
