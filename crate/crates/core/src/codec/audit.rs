//! Exhaustive check of a codebook against the random-codebook properties
//! used by the achievability argument.
//!
//! Every property is checked for all external vectors and every joint type
//! realized at blocklength `n`. For user 1 (words `x_m`, `y_m`, rates
//! `R_i = log N_i / n`):
//!
//! | name | left side | bound | active when |
//! |------|-----------|-------|-------------|
//! | `1`  | fraction of `m1` with `(x_m1, y)` of type `P_XY` | `2^(-n eps/2)` | `I(X;Y) > eps` |
//! | `2b` | fraction of `m1` with `(x_m1, x_m~1, y_m2, y)` of type `P` for some `m~1 != m1`, `m2` | `2^(-n eps/2)` | `I(X;X~Y~Y) - abs+(R1 - I(X~;Y~Y)) - abs+(R2 - I(Y~;Y)) > eps` |
//! | `3b` | number of `(m~1, m~2)` with `(x, x_m~1, y_m~2, y)` of type `P` | `2^(n(abs+(R1 - I(X~;Y~XY)) + abs+(R2 - I(Y~;XY)) + eps))` | always |
//! | `4`  | fraction of `m1` with `(x_m1, y_m~21, y_m~22, y')` of type `P` for some pair | `2^(-n eps/2)` | `I(X';Y~1Y~2Y') - abs+(R2 - I(Y~1;Y')) - abs+(R2 - I(Y~2;Y~1Y')) > eps` |
//! | `5`  | number of `(m~21, m~22)` with `(x', y_m~21, y_m~22, y')` of type `P` | `2^(n(abs+(R2 - I(Y~1;X'Y')) + abs+(R2 - I(Y~2;Y~1X'Y')) + eps))` | always |
//!
//! The `q` variants are the same statements with the users exchanged.

use super::Codebook;
use crate::seq::{checked_pow, checked_product, ensure_budget, Odometer};
use crate::types::empirical_cmi;
use crate::{Error, Result};
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum AuditStatus {
    Pass,
    Fail,
    /// No realized joint type activates the hypothesis.
    Vacuous,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PropertyRecord {
    pub property: String,
    /// Left side at the instance with the largest ratio to its bound, among
    /// active instances (0 when none is active).
    pub lhs: f64,
    pub threshold: f64,
    /// Whether at least one realized instance satisfies the hypothesis.
    pub hypothesis_active: bool,
    pub active_instances: u64,
    pub violations: u64,
    /// Largest left side over all realized instances, active or not.
    pub max_lhs_any: f64,
    pub status: AuditStatus,
}

fn pos(v: f64) -> f64 {
    v.max(0.0)
}

/// Sorted per-position tuple codes: a canonical key for the joint type.
fn type_key(cols: &[&[usize]], sizes: &[usize]) -> Vec<u32> {
    let n = cols[0].len();
    let mut k: Vec<u32> = (0..n)
        .map(|t| cols.iter().zip(sizes).fold(0u32, |acc, (c, &q)| acc * q as u32 + c[t] as u32))
        .collect();
    k.sort_unstable();
    k
}

fn key_columns(key: &[u32], sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut cols = vec![Vec::with_capacity(key.len()); sizes.len()];
    for &code in key {
        let mut c = code as usize;
        for (i, &q) in sizes.iter().enumerate().rev() {
            cols[i].push(c % q);
            c /= q;
        }
    }
    cols
}

struct Tally {
    active: u64,
    violations: u64,
    worst: Option<(f64, f64)>,
    max_any: f64,
}

impl Tally {
    fn new() -> Self {
        Self { active: 0, violations: 0, worst: None, max_any: 0.0 }
    }

    fn add(&mut self, lhs: f64, threshold: f64, active: bool) {
        self.max_any = self.max_any.max(lhs);
        if !active {
            return;
        }
        self.active += 1;
        if lhs > threshold * (1.0 + 1e-12) {
            self.violations += 1;
        }
        let better = match self.worst {
            None => true,
            Some((l, t)) => lhs / threshold > l / t,
        };
        if better {
            self.worst = Some((lhs, threshold));
        }
    }

    fn finish(self, property: String) -> PropertyRecord {
        let (lhs, threshold) = self.worst.unwrap_or((0.0, 0.0));
        let status = if self.active == 0 {
            AuditStatus::Vacuous
        } else if self.violations > 0 {
            AuditStatus::Fail
        } else {
            AuditStatus::Pass
        };
        PropertyRecord {
            property,
            lhs,
            threshold,
            hypothesis_active: self.active > 0,
            active_instances: self.active,
            violations: self.violations,
            max_lhs_any: self.max_any,
            status,
        }
    }
}

/// Cells visited by [`audit_codebook`]; compared against the budget.
pub fn audit_cost(cb: &Codebook) -> Option<u128> {
    let (n, nx, ny) = (cb.n, cb.comp1.len(), cb.comp2.len());
    let (n1, n2) = (Some(cb.words1.len() as u128), Some(cb.words2.len() as u128));
    let side = |qa: usize, qb: usize, na: Option<u128>, nb: Option<u128>| {
        let yb = checked_pow(qb, n);
        let xy = checked_product(&[checked_pow(qa, n), yb]);
        [
            checked_product(&[yb, na]),
            checked_product(&[yb, na, na, nb]),
            checked_product(&[xy, na, nb]),
            checked_product(&[yb, na, nb, nb]),
            checked_product(&[xy, nb, nb]),
        ]
    };
    let mut total = Some(0u128);
    for c in side(nx, ny, n1, n2).into_iter().chain(side(ny, nx, n2, n1)) {
        total = total.zip(c).and_then(|(a, b)| a.checked_add(b));
    }
    total
}

/// Audits all ten properties; records come in the order
/// `1, 2b, 3b, 4, 5, 1q, 2bq, 3bq, 4q, 5q`.
pub fn audit_codebook(cb: &Codebook, epsilon: f64, budget: u128) -> Result<Vec<PropertyRecord>> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    ensure_budget(audit_cost(cb), budget)?;
    let mut out = audit_side(cb, epsilon, "");
    out.extend(audit_side(&cb.swapped(), epsilon, "q"));
    Ok(out)
}

fn audit_side(cb: &Codebook, eps: f64, suffix: &str) -> Vec<PropertyRecord> {
    let n = cb.n;
    let nf = n as f64;
    let (qa, qb) = (cb.comp1.len(), cb.comp2.len());
    let (wa, wb) = (&cb.words1, &cb.words2);
    let r1 = libm::log2(wa.len() as f64) / nf;
    let r2 = libm::log2(wb.len() as f64) / nf;
    let frac_bound = libm::exp2(-nf * eps / 2.0);
    let name = |p: &str| alloc::format!("{p}{suffix}");
    let mut records = Vec::with_capacity(5);

    // (1)
    {
        let sizes = [qa, qb];
        let mut tally = Tally::new();
        let mut od = Odometer::new(qb, n);
        while od.advance() {
            let y = od.current();
            let mut groups: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
            for x in wa {
                *groups.entry(type_key(&[x, y], &sizes)).or_default() += 1;
            }
            for (key, c) in groups {
                let cols = key_columns(&key, &sizes);
                let active = empirical_cmi(&[&cols[0]], &[&cols[1]], &[]) > eps;
                tally.add(c as f64 / wa.len() as f64, frac_bound, active);
            }
        }
        records.push(tally.finish(name("1")));
    }

    // (2b)
    {
        let sizes = [qa, qa, qb, qb];
        let mut cache: BTreeMap<Vec<u32>, bool> = BTreeMap::new();
        let mut tally = Tally::new();
        let mut od = Odometer::new(qb, n);
        while od.advance() {
            let y = od.current();
            let mut groups: BTreeMap<Vec<u32>, BTreeSet<usize>> = BTreeMap::new();
            for (m1, x) in wa.iter().enumerate() {
                for (mt, xt) in wa.iter().enumerate() {
                    if mt == m1 {
                        continue;
                    }
                    for yt in wb {
                        groups.entry(type_key(&[x, xt, yt, y], &sizes)).or_default().insert(m1);
                    }
                }
            }
            for (key, set) in groups {
                let active = *cache.entry(key.clone()).or_insert_with(|| {
                    let c = key_columns(&key, &sizes);
                    let (x, xt, yt, y) = (&c[0][..], &c[1][..], &c[2][..], &c[3][..]);
                    empirical_cmi(&[x], &[xt, yt, y], &[])
                        - pos(r1 - empirical_cmi(&[xt], &[yt, y], &[]))
                        - pos(r2 - empirical_cmi(&[yt], &[y], &[]))
                        > eps
                });
                tally.add(set.len() as f64 / wa.len() as f64, frac_bound, active);
            }
        }
        records.push(tally.finish(name("2b")));
    }

    // (3b)
    {
        let sizes = [qa, qa, qb, qb];
        let mut cache: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        let mut tally = Tally::new();
        let mut ox = Odometer::new(qa, n);
        while ox.advance() {
            let x = ox.current();
            let mut oy = Odometer::new(qb, n);
            while oy.advance() {
                let y = oy.current();
                let mut groups: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
                for xt in wa {
                    for yt in wb {
                        *groups.entry(type_key(&[x, xt, yt, y], &sizes)).or_default() += 1;
                    }
                }
                for (key, c) in groups {
                    let bound = *cache.entry(key.clone()).or_insert_with(|| {
                        let k = key_columns(&key, &sizes);
                        let (x, xt, yt, y) = (&k[0][..], &k[1][..], &k[2][..], &k[3][..]);
                        let e = pos(r1 - empirical_cmi(&[xt], &[yt, x, y], &[])) + pos(r2 - empirical_cmi(&[yt], &[x, y], &[]));
                        libm::exp2(nf * (e + eps))
                    });
                    tally.add(c as f64, bound, true);
                }
            }
        }
        records.push(tally.finish(name("3b")));
    }

    // (4)
    {
        let sizes = [qa, qb, qb, qb];
        let mut cache: BTreeMap<Vec<u32>, bool> = BTreeMap::new();
        let mut tally = Tally::new();
        let mut od = Odometer::new(qb, n);
        while od.advance() {
            let y = od.current();
            let mut groups: BTreeMap<Vec<u32>, BTreeSet<usize>> = BTreeMap::new();
            for (m1, x) in wa.iter().enumerate() {
                for y1 in wb {
                    for y2 in wb {
                        groups.entry(type_key(&[x, y1, y2, y], &sizes)).or_default().insert(m1);
                    }
                }
            }
            for (key, set) in groups {
                let active = *cache.entry(key.clone()).or_insert_with(|| {
                    let c = key_columns(&key, &sizes);
                    let (x, y1, y2, y) = (&c[0][..], &c[1][..], &c[2][..], &c[3][..]);
                    empirical_cmi(&[x], &[y1, y2, y], &[])
                        - pos(r2 - empirical_cmi(&[y1], &[y], &[]))
                        - pos(r2 - empirical_cmi(&[y2], &[y1, y], &[]))
                        > eps
                });
                tally.add(set.len() as f64 / wa.len() as f64, frac_bound, active);
            }
        }
        records.push(tally.finish(name("4")));
    }

    // (5)
    {
        let sizes = [qa, qb, qb, qb];
        let mut cache: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        let mut tally = Tally::new();
        let mut ox = Odometer::new(qa, n);
        while ox.advance() {
            let x = ox.current();
            let mut oy = Odometer::new(qb, n);
            while oy.advance() {
                let y = oy.current();
                let mut groups: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
                for y1 in wb {
                    for y2 in wb {
                        *groups.entry(type_key(&[x, y1, y2, y], &sizes)).or_default() += 1;
                    }
                }
                for (key, c) in groups {
                    let bound = *cache.entry(key.clone()).or_insert_with(|| {
                        let k = key_columns(&key, &sizes);
                        let (x, y1, y2, y) = (&k[0][..], &k[1][..], &k[2][..], &k[3][..]);
                        let e = pos(r2 - empirical_cmi(&[y1], &[x, y], &[])) + pos(r2 - empirical_cmi(&[y2], &[y1, x, y], &[]));
                        libm::exp2(nf * (e + eps))
                    });
                    tally.add(c as f64, bound, true);
                }
            }
        }
        records.push(tally.finish(name("5")));
    }
    records
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::DistributionVector;

    #[test]
    fn single_message_makes_2b_vacuous() {
        let cb = Codebook::from_words(2, 2, vec![vec![0, 1, 0, 1]], vec![vec![1, 1, 0, 0], vec![0, 1, 1, 0]]).unwrap();
        let recs = audit_codebook(&cb, 0.1, 1 << 24).unwrap();
        let r = recs.iter().find(|r| r.property == "2b").unwrap();
        assert_eq!(r.status, AuditStatus::Vacuous);
        assert_eq!(r.lhs, 0.0);
        assert_eq!(r.max_lhs_any, 0.0);
    }

    #[test]
    fn repeated_pair_counts_every_index_pair() {
        let x = vec![0, 1, 1, 0];
        let y = vec![1, 1, 0, 0];
        let cb = Codebook::from_words(2, 2, vec![x.clone(); 3], vec![y.clone(); 2]).unwrap();
        let recs = audit_codebook(&cb, 0.1, 1 << 24).unwrap();
        let r = recs.iter().find(|r| r.property == "3b").unwrap();
        assert_eq!(r.max_lhs_any, 6.0);
        let r = recs.iter().find(|r| r.property == "3bq").unwrap();
        assert_eq!(r.max_lhs_any, 6.0);
    }

    #[test]
    fn budget_enforced() {
        let u = DistributionVector::uniform(2);
        let cb = super::super::generate_constant_composition_codebook(&u, &u, 6, 4, 4, 1).unwrap();
        assert!(matches!(audit_codebook(&cb, 0.1, 1000), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn key_roundtrip() {
        let a = [0usize, 2, 1];
        let b = [1usize, 0, 1];
        let key = type_key(&[&a, &b], &[3, 2]);
        let cols = key_columns(&key, &[3, 2]);
        let k2 = type_key(&[&cols[0], &cols[1]], &[3, 2]);
        assert_eq!(key, k2);
    }
}
