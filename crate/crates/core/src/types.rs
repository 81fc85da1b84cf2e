//! Empirical joint types of symbol sequences.

use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;

/// Exact integer counts of the tuples `(s_1(t), ..., s_k(t))`, `t < n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JointType {
    n: usize,
    var_sizes: Vec<usize>,
    counts: Vec<u64>,
}

impl JointType {
    pub fn from_sequences(var_sizes: &[usize], seqs: &[&[usize]]) -> Result<Self> {
        if seqs.len() != var_sizes.len() {
            return Err(Error::DimensionMismatch { expected: var_sizes.len(), found: seqs.len() });
        }
        let n = seqs.first().map_or(0, |s| s.len());
        for (s, &q) in seqs.iter().zip(var_sizes) {
            if s.len() != n {
                return Err(Error::LengthMismatch { expected: n, found: s.len() });
            }
            if let Some(&bad) = s.iter().find(|&&v| v >= q) {
                return Err(Error::SymbolOutOfRange { symbol: bad, alphabet: q });
            }
        }
        let mut counts = vec![0u64; var_sizes.iter().product()];
        for t in 0..n {
            let idx = seqs.iter().zip(var_sizes).fold(0, |acc, (s, &q)| acc * q + s[t]);
            counts[idx] += 1;
        }
        Ok(Self { n, var_sizes: var_sizes.to_vec(), counts })
    }

    pub fn from_counts(var_sizes: Vec<usize>, counts: Vec<u64>) -> Result<Self> {
        let expected: usize = var_sizes.iter().product();
        if counts.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: counts.len() });
        }
        let n = counts.iter().sum::<u64>() as usize;
        Ok(Self { n, var_sizes, counts })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn var_sizes(&self) -> &[usize] {
        &self.var_sizes
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, symbols: &[usize]) -> u64 {
        self.counts[crate::kernel::flatten(symbols, &self.var_sizes)]
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let n = self.n as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    pub fn marginal(&self, coords: &[usize]) -> Result<JointType> {
        if coords.iter().any(|&c| c >= self.var_sizes.len()) {
            return Err(Error::InvalidParameter("coordinate out of range".into()));
        }
        let sizes: Vec<usize> = coords.iter().map(|&c| self.var_sizes[c]).collect();
        let mut out = vec![0u64; sizes.iter().product()];
        let mut idx = vec![0usize; self.var_sizes.len()];
        for (flat, &c) in self.counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            crate::kernel::unflatten(flat, &self.var_sizes, &mut idx);
            let m = coords.iter().fold(0, |acc, &k| acc * self.var_sizes[k] + idx[k]);
            out[m] += c;
        }
        Ok(JointType { n: self.n, var_sizes: sizes, counts: out })
    }
}

pub fn joint_type(var_sizes: &[usize], seqs: &[&[usize]]) -> Result<JointType> {
    JointType::from_sequences(var_sizes, seqs)
}

/// `log2` of the multinomial coefficient `n! / prod_a counts[a]!`.
pub fn log2_type_class_size(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    log2_factorial(n) - counts.iter().map(|&c| log2_factorial(c)).sum::<f64>()
}

fn log2_factorial(n: usize) -> f64 {
    (2..=n).map(|k| libm::log2(k as f64)).sum()
}

/// The multinomial coefficient, exactly, or `None` on overflow.
pub fn type_class_size(counts: &[usize]) -> Option<u128> {
    let mut acc: u128 = 1;
    let mut placed: u128 = 0;
    for &c in counts {
        for k in 1..=c as u128 {
            placed += 1;
            // acc * placed / k stays integral: binomial(placed, k) builds up
            acc = acc.checked_mul(placed)? / k;
        }
    }
    Some(acc)
}

/// All count vectors of length `q` summing to `n`, in lexicographic order.
pub fn compositions(q: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(q: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() + 1 == q {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for c in 0..=left {
            cur.push(c);
            rec(q, left - c, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if q > 0 {
        rec(q, n, &mut Vec::new(), &mut out);
    }
    out
}

/// Symbol counts of one sequence.
pub fn symbol_counts(seq: &[usize], q: usize) -> Vec<usize> {
    let mut c = vec![0; q];
    for &s in seq {
        c[s] += 1;
    }
    c
}

/// Empirical joint entropy of the columns, in bits. Symbols must be below 2^16
/// and at most eight columns may be combined.
pub fn empirical_entropy(cols: &[&[usize]]) -> f64 {
    let Some(first) = cols.first() else { return 0.0 };
    let n = first.len();
    if n == 0 {
        return 0.0;
    }
    debug_assert!(cols.len() <= 8);
    let mut keys: Vec<u128> = (0..n)
        .map(|t| cols.iter().fold(0u128, |acc, c| (acc << 16) | c[t] as u128))
        .collect();
    keys.sort_unstable();
    let nf = n as f64;
    let mut h = libm::log2(nf);
    let mut run = 1usize;
    for i in 1..=n {
        if i < n && keys[i] == keys[i - 1] {
            run += 1;
        } else {
            h -= run as f64 / nf * libm::log2(run as f64);
            run = 1;
        }
    }
    h.max(0.0)
}

/// Empirical `I(A; B | C)` for column groups of equal length.
pub fn empirical_cmi(a: &[&[usize]], b: &[&[usize]], c: &[&[usize]]) -> f64 {
    let mut ac: Vec<&[usize]> = a.to_vec();
    ac.extend_from_slice(c);
    let mut bc: Vec<&[usize]> = b.to_vec();
    bc.extend_from_slice(c);
    let mut abc = ac.clone();
    abc.extend_from_slice(b);
    let v = empirical_entropy(&ac) + empirical_entropy(&bc) - empirical_entropy(&abc) - empirical_entropy(c);
    v.max(0.0)
}
