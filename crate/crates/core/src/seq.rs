//! Enumeration helpers for length-`n` symbol sequences.
//!
//! Sequences are ordered lexicographically with the first coordinate most
//! significant, so `index_of(&[a, b], q) == a * q + b`.

use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;

/// `base^exp`, or `None` on overflow of `u128`.
pub fn checked_pow(base: usize, exp: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base as u128)?;
    }
    Some(acc)
}

/// Product of factors, or `None` on overflow.
pub fn checked_product(factors: &[Option<u128>]) -> Option<u128> {
    let mut acc: u128 = 1;
    for f in factors {
        acc = acc.checked_mul((*f)?)?;
    }
    Some(acc)
}

/// Fails with [`Error::TooLarge`] when `required` exceeds `budget` (or overflowed).
pub fn ensure_budget(required: Option<u128>, budget: u128) -> Result<u128> {
    match required {
        Some(r) if r <= budget => Ok(r),
        Some(r) => Err(Error::TooLarge { required: r, budget }),
        None => Err(Error::TooLarge { required: u128::MAX, budget }),
    }
}

pub fn index_of(seq: &[usize], q: usize) -> usize {
    seq.iter().fold(0usize, |acc, &s| acc * q + s)
}

pub fn write_sequence(mut index: usize, q: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = index % q;
        index /= q;
    }
}

pub fn sequence_at(index: usize, q: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    write_sequence(index, q, &mut out);
    out
}

/// In-place lexicographic counter over `{0..q}^n`.
#[derive(Debug, Clone)]
pub struct Odometer {
    q: usize,
    digits: Vec<usize>,
    fresh: bool,
}

impl Odometer {
    pub fn new(q: usize, n: usize) -> Self {
        Self { q, digits: vec![0; n], fresh: true }
    }

    /// Advances to the next sequence; returns `false` once exhausted.
    /// The first call yields the all-zero sequence.
    pub fn advance(&mut self) -> bool {
        if self.fresh {
            self.fresh = false;
            return self.q > 0 || self.digits.is_empty();
        }
        for d in self.digits.iter_mut().rev() {
            *d += 1;
            if *d < self.q {
                return true;
            }
            *d = 0;
        }
        false
    }

    pub fn current(&self) -> &[usize] {
        &self.digits
    }
}

/// Materializes every sequence in `{0..q}^n` in lexicographic order.
pub fn all_sequences(q: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut od = Odometer::new(q, n);
    while od.advance() {
        out.push(od.current().to_vec());
    }
    out
}

/// Calls `f(z, p)` for every `z` with `p = prod_t factors[t][z_t] > 0`.
pub fn for_each_product_support<F: FnMut(&[usize], f64)>(factors: &[&[f64]], mut f: F) {
    let n = factors.len();
    let mut z = vec![0usize; n];
    let mut probs = vec![1.0f64; n + 1];
    fn rec<F: FnMut(&[usize], f64)>(
        t: usize,
        factors: &[&[f64]],
        z: &mut [usize],
        probs: &mut [f64],
        f: &mut F,
    ) {
        if t == factors.len() {
            f(z, probs[t]);
            return;
        }
        for (s, &p) in factors[t].iter().enumerate() {
            if p > 0.0 {
                z[t] = s;
                probs[t + 1] = probs[t] * p;
                rec(t + 1, factors, z, probs, f);
            }
        }
    }
    rec(0, factors, &mut z, &mut probs, &mut f);
}
