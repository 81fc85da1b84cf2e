//! Zero-rate code for the binary erasure channel `Z = X + Y` with
//! weight-one words for user 1, weight-`(n-1)` words for user 2 and a
//! sum-threshold decoder.

use super::{Codebook, Decision, Decoder};
use crate::kernel::DistributionVector;
use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;

/// Decoder for [`build_erasure_example_code`].
///
/// With `s` the sum of output symbols:
/// - `s >= n + 2` blames user 1 and `s <= n - 2` blames user 2;
/// - `s = n + 1` blames user 2 when no 0 appears, else user 1;
/// - `s = n - 1` blames user 1 when no 2 appears, else user 2;
/// - `s = n` decodes `(position of the 2, position of the 0)` when exactly
///   one 2 and one 0 appear, otherwise outputs the default pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ErasureExampleDecoder {
    pub n: usize,
}

impl Decoder for ErasureExampleDecoder {
    fn decode(&self, z: &[usize]) -> Decision {
        let n = self.n;
        let s: usize = z.iter().sum();
        let zeros = z.iter().filter(|&&v| v == 0).count();
        let twos = z.iter().filter(|&&v| v == 2).count();
        if s >= n + 2 {
            Decision::Blame1
        } else if s + 2 <= n {
            Decision::Blame2
        } else if s == n + 1 {
            if zeros == 0 {
                Decision::Blame2
            } else {
                Decision::Blame1
            }
        } else if s + 1 == n {
            if twos == 0 {
                Decision::Blame1
            } else {
                Decision::Blame2
            }
        } else if twos == 1 && zeros == 1 {
            let i = z.iter().position(|&v| v == 2).unwrap_or(0);
            let j = z.iter().position(|&v| v == 0).unwrap_or(0);
            Decision::Pair(i, j)
        } else {
            Decision::Pair(0, 0)
        }
    }
}

/// Message `i` of user 1 is the unit vector `e_i`; message `j` of user 2 is
/// its complement `1 - e_j`.
pub fn build_erasure_example_code(n: usize) -> Result<(Codebook, ErasureExampleDecoder)> {
    if n < 3 {
        return Err(Error::InvalidParameter("blocklength must be at least 3".into()));
    }
    let words1: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut w = vec![0; n];
            w[i] = 1;
            w
        })
        .collect();
    let words2: Vec<Vec<usize>> = (0..n)
        .map(|j| {
            let mut w = vec![1; n];
            w[j] = 0;
            w
        })
        .collect();
    let nf = n as f64;
    let comp1 = DistributionVector::new(vec![(nf - 1.0) / nf, 1.0 / nf])?;
    let comp2 = DistributionVector::new(vec![1.0 / nf, (nf - 1.0) / nf])?;
    let cb = Codebook::new(n, words1, words2, comp1, comp2)?;
    Ok((cb, ErasureExampleDecoder { n }))
}
