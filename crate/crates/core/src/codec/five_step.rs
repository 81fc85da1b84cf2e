use super::decoder::{Side, TypicalityDecoder};
use super::{Codebook, Decision, Decoder, DecoderOutput, DecoderParams};
use crate::mac::Mac;
use crate::Result;
use alloc::vec::Vec;

/// Which pruning step runs second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum StepOrder {
    #[default]
    Step2First,
    Step3First,
}

/// Candidate sets after each stage of the sequential decoder.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FiveStepTrace {
    pub a1: Vec<usize>,
    pub b1: Vec<usize>,
    pub a2: Vec<usize>,
    pub b2: Vec<usize>,
    pub a3: Vec<usize>,
    pub b3: Vec<usize>,
    pub output: DecoderOutput,
}

impl FiveStepTrace {
    pub fn is_monotone(&self) -> bool {
        let sub = |a: &[usize], b: &[usize]| a.iter().all(|v| b.contains(v));
        sub(&self.a3, &self.a2) && sub(&self.a2, &self.a1) && sub(&self.b3, &self.b2) && sub(&self.b2, &self.b1)
    }
}

/// Keeps the candidates `m` of `side` for which some typical partner `b`
/// passes `test(m, b)`.
fn prune<F: Fn(usize, &[usize]) -> bool>(side: &Side<'_>, set: &[usize], z: &[usize], test: F) -> Vec<usize> {
    set.iter()
        .copied()
        .filter(|&m| side.partners(m, z).into_iter().any(|b| test(m, b)))
        .collect()
}

/// Candidate pruning by pairs of the other user's candidates (steps 2 and 3).
fn pair_step(side: &Side<'_>, own: &[usize], other: &[usize], z: &[usize]) -> Vec<usize> {
    prune(side, own, z, |m, b| {
        other.iter().enumerate().all(|(i, &m1)| {
            other[i + 1..].iter().all(|&m2| side.pair_info(m, b, m1, m2, z) <= side.eta)
        })
    })
}

/// Candidate pruning by competing pairs (steps 4 and 5).
fn cross_step(side: &Side<'_>, own: &[usize], rivals: &[usize], others: &[usize], z: &[usize]) -> Vec<usize> {
    prune(side, own, z, |m, b| {
        rivals
            .iter()
            .filter(|&&ma| ma != m)
            .all(|&ma| others.iter().all(|&mb| side.cross_info(m, b, ma, mb, z) <= side.eta))
    })
}

/// The sequential five-step decoder.
#[derive(Debug, Clone)]
pub struct FiveStepDecoder {
    inner: TypicalityDecoder,
    pub order: StepOrder,
}

impl FiveStepDecoder {
    pub fn new(codebook: Codebook, mac: Mac, params: DecoderParams, order: StepOrder, budget: u128) -> Result<Self> {
        Ok(Self { inner: TypicalityDecoder::new(codebook, mac, params, budget)?, order })
    }

    pub fn trace(&self, z: &[usize]) -> FiveStepTrace {
        let (one, two) = self.inner.sides();
        let a1: Vec<usize> = (0..one.words_a.len()).filter(|&m| one.a_has_partner(m, z)).collect();
        let b1: Vec<usize> = (0..two.words_a.len()).filter(|&m| two.a_has_partner(m, z)).collect();
        let (a2, b2) = match self.order {
            StepOrder::Step2First => {
                let a2 = pair_step(&one, &a1, &b1, z);
                let b2 = pair_step(&two, &b1, &a2, z);
                (a2, b2)
            }
            StepOrder::Step3First => {
                let b2 = pair_step(&two, &b1, &a1, z);
                let a2 = pair_step(&one, &a1, &b2, z);
                (a2, b2)
            }
        };
        let a3 = cross_step(&one, &a2, &a2, &b2, z);
        // step 5: user-2 rivals in B2, user-1 partners in A3
        let b3 = cross_step(&two, &b2, &b2, &a3, z);
        let output = DecoderOutput::from_candidates(a3.clone(), b3.clone());
        FiveStepTrace { a1, b1, a2, b2, a3, b3, output }
    }

    pub fn check_output(&self, z: &[usize]) -> Result<()> {
        self.inner.check_output(z)
    }
}

impl Decoder for FiveStepDecoder {
    fn decode(&self, z: &[usize]) -> Decision {
        self.trace(z).output.decision
    }
}

/// Decodes one output with the five-step decoder.
pub fn decode_five_step(
    codebook: &Codebook,
    mac: &Mac,
    z: &[usize],
    params: &DecoderParams,
    order: StepOrder,
    budget: u128,
) -> Result<FiveStepTrace> {
    let dec = FiveStepDecoder::new(codebook.clone(), mac.clone(), *params, order, budget)?;
    dec.check_output(z)?;
    Ok(dec.trace(z))
}
