//! Codebooks, adversary-identifying decoders and code transformations.

pub mod audit;
mod codebook;
mod decoder;
pub mod erasure_example;
pub mod eta;
mod five_step;
mod randomized;

pub use codebook::{generate_constant_composition_codebook, Codebook, Encoders, PlainCode};
pub use decoder::{decode_feasibility, DecoderParams, TypicalityDecoder};
pub use five_step::{decode_five_step, FiveStepDecoder, FiveStepTrace, StepOrder};
pub use randomized::{compose_two_phase, derandomize, CompositeCode, CompositeDecoder, DerandomizeReport, RandomizedCode};

use alloc::vec::Vec;

/// Decoder verdict. Messages are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Decision {
    Pair(usize, usize),
    Blame1,
    Blame2,
}

impl Decision {
    /// The same verdict with the two users' roles exchanged.
    pub fn swapped(self) -> Decision {
        match self {
            Decision::Pair(a, b) => Decision::Pair(b, a),
            Decision::Blame1 => Decision::Blame2,
            Decision::Blame2 => Decision::Blame1,
        }
    }
}

/// Why the default pair was output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FallbackCause {
    BothEmpty,
    Ambiguous,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecoderOutput {
    pub decision: Decision,
    pub d1: Vec<usize>,
    pub d2: Vec<usize>,
    pub fallback: Option<FallbackCause>,
}

impl DecoderOutput {
    /// Applies the four-case output rule to candidate sets.
    pub fn from_candidates(d1: Vec<usize>, d2: Vec<usize>) -> Self {
        let (decision, fallback) = match (d1.len(), d2.len()) {
            (1, 1) => (Decision::Pair(d1[0], d2[0]), None),
            (0, b) if b > 0 => (Decision::Blame1, None),
            (a, 0) if a > 0 => (Decision::Blame2, None),
            (0, 0) => (Decision::Pair(0, 0), Some(FallbackCause::BothEmpty)),
            _ => (Decision::Pair(0, 0), Some(FallbackCause::Ambiguous)),
        };
        Self { decision, d1, d2, fallback }
    }

    /// Both sets nonempty and at least one has two or more elements.
    pub fn is_ambiguous(&self) -> bool {
        !self.d1.is_empty() && !self.d2.is_empty() && self.d1.len() + self.d2.len() >= 3
    }
}

/// A map from channel outputs to verdicts.
pub trait Decoder: Sync {
    fn decode(&self, z: &[usize]) -> Decision;
}

impl<D: Decoder + ?Sized> Decoder for &D {
    fn decode(&self, z: &[usize]) -> Decision {
        (**self).decode(z)
    }
}

impl<D: Decoder + ?Sized> Decoder for alloc::boxed::Box<D> {
    fn decode(&self, z: &[usize]) -> Decision {
        (**self).decode(z)
    }
}

/// A decoder given as a closure.
#[derive(Clone, Copy)]
pub struct FnDecoder<F>(pub F);

impl<F: Fn(&[usize]) -> Decision + Sync> Decoder for FnDecoder<F> {
    fn decode(&self, z: &[usize]) -> Decision {
        (self.0)(z)
    }
}

/// Wraps a decoder for the transposed problem (users exchanged).
#[derive(Clone, Copy)]
pub struct Swapped<D>(pub D);

impl<D: Decoder> Decoder for Swapped<D> {
    fn decode(&self, z: &[usize]) -> Decision {
        self.0.decode(z).swapped()
    }
}
