use crate::kernel::DistributionVector;
use crate::types::symbol_counts;
use crate::{Error, Result};
use alloc::format;
use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic encoder pair: codeword tables for both users.
pub trait Encoders: Sync {
    fn n(&self) -> usize;
    fn nx(&self) -> usize;
    fn ny(&self) -> usize;
    fn words1(&self) -> &[Vec<usize>];
    fn words2(&self) -> &[Vec<usize>];
    fn n1(&self) -> usize {
        self.words1().len()
    }
    fn n2(&self) -> usize {
        self.words2().len()
    }
}

/// A constant-composition code: every word of user 1 has type `comp1`,
/// every word of user 2 has type `comp2`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Codebook {
    pub n: usize,
    pub words1: Vec<Vec<usize>>,
    pub words2: Vec<Vec<usize>>,
    pub comp1: DistributionVector,
    pub comp2: DistributionVector,
}

impl Codebook {
    /// Checks that all words are constant-composition with the given types.
    pub fn new(
        n: usize,
        words1: Vec<Vec<usize>>,
        words2: Vec<Vec<usize>>,
        comp1: DistributionVector,
        comp2: DistributionVector,
    ) -> Result<Self> {
        if words1.is_empty() || words2.is_empty() {
            return Err(Error::InvalidParameter("codebooks need at least one word per user".into()));
        }
        for (words, comp, user) in [(&words1, &comp1, 1), (&words2, &comp2, 2)] {
            let counts = comp.type_counts(n)?;
            for w in words.iter() {
                if w.len() != n {
                    return Err(Error::LengthMismatch { expected: n, found: w.len() });
                }
                if let Some(&s) = w.iter().find(|&&s| s >= comp.len()) {
                    return Err(Error::SymbolOutOfRange { symbol: s, alphabet: comp.len() });
                }
                if symbol_counts(w, comp.len()) != counts {
                    return Err(Error::InvalidParameter(format!("a user-{user} word does not have the stated composition")));
                }
            }
        }
        Ok(Self { n, words1, words2, comp1, comp2 })
    }

    /// Infers the compositions from the first word of each user.
    pub fn from_words(nx: usize, ny: usize, words1: Vec<Vec<usize>>, words2: Vec<Vec<usize>>) -> Result<Self> {
        let n = words1.first().map_or(0, |w| w.len());
        let comp = |w: Option<&Vec<usize>>, q: usize| -> Result<DistributionVector> {
            let w = w.ok_or(Error::InvalidParameter("empty codebook".into()))?;
            if let Some(&s) = w.iter().find(|&&s| s >= q) {
                return Err(Error::SymbolOutOfRange { symbol: s, alphabet: q });
            }
            DistributionVector::new(symbol_counts(w, q).iter().map(|&c| c as f64 / n as f64).collect())
        };
        let comp1 = comp(words1.first(), nx)?;
        let comp2 = comp(words2.first(), ny)?;
        Self::new(n, words1, words2, comp1, comp2)
    }

    /// The same code with the users exchanged.
    pub fn swapped(&self) -> Codebook {
        Codebook {
            n: self.n,
            words1: self.words2.clone(),
            words2: self.words1.clone(),
            comp1: self.comp2.clone(),
            comp2: self.comp1.clone(),
        }
    }
}

impl Encoders for Codebook {
    fn n(&self) -> usize {
        self.n
    }
    fn nx(&self) -> usize {
        self.comp1.len()
    }
    fn ny(&self) -> usize {
        self.comp2.len()
    }
    fn words1(&self) -> &[Vec<usize>] {
        &self.words1
    }
    fn words2(&self) -> &[Vec<usize>] {
        &self.words2
    }
}

/// Arbitrary codeword tables with no composition constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlainCode {
    pub n: usize,
    pub nx: usize,
    pub ny: usize,
    pub words1: Vec<Vec<usize>>,
    pub words2: Vec<Vec<usize>>,
}

impl PlainCode {
    pub fn new(nx: usize, ny: usize, words1: Vec<Vec<usize>>, words2: Vec<Vec<usize>>) -> Result<Self> {
        if words1.is_empty() || words2.is_empty() {
            return Err(Error::InvalidParameter("empty codebook".into()));
        }
        let n = words1[0].len();
        for (words, q) in [(&words1, nx), (&words2, ny)] {
            for w in words {
                if w.len() != n {
                    return Err(Error::LengthMismatch { expected: n, found: w.len() });
                }
                if let Some(&s) = w.iter().find(|&&s| s >= q) {
                    return Err(Error::SymbolOutOfRange { symbol: s, alphabet: q });
                }
            }
        }
        Ok(Self { n, nx, ny, words1, words2 })
    }

    pub fn swapped(&self) -> PlainCode {
        PlainCode { n: self.n, nx: self.ny, ny: self.nx, words1: self.words2.clone(), words2: self.words1.clone() }
    }
}

impl From<&Codebook> for PlainCode {
    fn from(cb: &Codebook) -> Self {
        PlainCode { n: cb.n, nx: cb.comp1.len(), ny: cb.comp2.len(), words1: cb.words1.clone(), words2: cb.words2.clone() }
    }
}

impl Encoders for PlainCode {
    fn n(&self) -> usize {
        self.n
    }
    fn nx(&self) -> usize {
        self.nx
    }
    fn ny(&self) -> usize {
        self.ny
    }
    fn words1(&self) -> &[Vec<usize>] {
        &self.words1
    }
    fn words2(&self) -> &[Vec<usize>] {
        &self.words2
    }
}

fn draw_from_type_class(counts: &[usize], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut w: Vec<usize> = counts.iter().enumerate().flat_map(|(s, &c)| core::iter::repeat(s).take(c)).collect();
    w.shuffle(rng);
    w
}

/// Draws every codeword independently and uniformly from its type class.
/// Duplicate codewords are kept.
pub fn generate_constant_composition_codebook(
    comp1: &DistributionVector,
    comp2: &DistributionVector,
    n: usize,
    n1: usize,
    n2: usize,
    seed: u64,
) -> Result<Codebook> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidParameter("message counts must be positive".into()));
    }
    let c1 = comp1.type_counts(n)?;
    let c2 = comp2.type_counts(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words1 = (0..n1).map(|_| draw_from_type_class(&c1, &mut rng)).collect();
    let words2 = (0..n2).map(|_| draw_from_type_class(&c2, &mut rng)).collect();
    Ok(Codebook { n, words1, words2, comp1: comp1.clone(), comp2: comp2.clone() })
}
