//! Entropy, divergence, mutual information and total variation, in bits.

use crate::types::JointType;
use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;

/// An information quantity that may be infinite.
///
/// Infinity is a separate variant so that it never enters float arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Bits {
    Finite(f64),
    Infinite,
}

impl Bits {
    pub fn finite(self) -> Option<f64> {
        match self {
            Bits::Finite(v) => Some(v),
            Bits::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Bits::Infinite)
    }

    /// `self <= bound`; infinity is never below a finite bound.
    pub fn at_most(self, bound: f64) -> bool {
        matches!(self, Bits::Finite(v) if v <= bound)
    }
}

#[inline]
fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * libm::log2(p)
    } else {
        0.0
    }
}

pub fn entropy(p: &[f64]) -> f64 {
    -p.iter().map(|&v| plogp(v)).sum::<f64>()
}

/// Binary entropy function.
pub fn h2(p: f64) -> f64 {
    entropy(&[p, 1.0 - p])
}

pub fn divergence(p: &[f64], q: &[f64]) -> Result<Bits> {
    if p.len() != q.len() {
        return Err(Error::AlphabetMismatch { left: p.len(), right: q.len() });
    }
    let mut d = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if b <= 0.0 {
                return Ok(Bits::Infinite);
            }
            d += a * libm::log2(a / b);
        }
    }
    Ok(Bits::Finite(d.max(0.0)))
}

pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::AlphabetMismatch { left: p.len(), right: q.len() });
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// A joint distribution over a product alphabet, flattened row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDist {
    pub sizes: Vec<usize>,
    pub p: Vec<f64>,
}

impl JointDist {
    pub fn new(sizes: Vec<usize>, p: Vec<f64>) -> Result<Self> {
        let expected: usize = sizes.iter().product();
        if p.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: p.len() });
        }
        Ok(Self { sizes, p })
    }

    /// Marginal on the listed coordinates, in the listed order.
    pub fn marginal(&self, coords: &[usize]) -> Result<JointDist> {
        for &c in coords {
            if c >= self.sizes.len() {
                return Err(Error::InvalidParameter(alloc::format!("coordinate {c} out of range")));
            }
        }
        let sizes: Vec<usize> = coords.iter().map(|&c| self.sizes[c]).collect();
        let mut out = vec![0.0; sizes.iter().product()];
        let mut idx = vec![0usize; self.sizes.len()];
        for (flat, &v) in self.p.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            crate::kernel::unflatten(flat, &self.sizes, &mut idx);
            let m = coords.iter().fold(0, |acc, &c| acc * self.sizes[c] + idx[c]);
            out[m] += v;
        }
        Ok(JointDist { sizes, p: out })
    }

    pub fn entropy_of(&self, coords: &[usize]) -> Result<f64> {
        Ok(entropy(&self.marginal(coords)?.p))
    }
}

impl From<&JointType> for JointDist {
    fn from(t: &JointType) -> Self {
        JointDist { sizes: t.var_sizes().to_vec(), p: t.probabilities() }
    }
}

/// `I(A; B | C)` over coordinate groups of `joint`.
pub fn mutual_information(joint: &JointDist, a: &[usize], b: &[usize], given: &[usize]) -> Result<f64> {
    let mut seen = vec![false; joint.sizes.len()];
    for &c in a.iter().chain(b).chain(given) {
        if c >= seen.len() {
            return Err(Error::InvalidParameter(alloc::format!("coordinate {c} out of range")));
        }
        if seen[c] {
            return Err(Error::OverlappingGroups);
        }
        seen[c] = true;
    }
    if a.is_empty() || b.is_empty() {
        return Ok(0.0);
    }
    let join = |x: &[usize], y: &[usize]| -> Vec<usize> { x.iter().chain(y).copied().collect() };
    let ac = join(a, given);
    let bc = join(b, given);
    let abc = join(&ac, b);
    let v = joint.entropy_of(&ac)? + joint.entropy_of(&bc)? - joint.entropy_of(&abc)? - joint.entropy_of(given)?;
    Ok(v.max(0.0))
}
