//! Calibration of the typicality slack by exhaustive output sweeps.

use super::{Codebook, DecoderOutput, DecoderParams, TypicalityDecoder};
use crate::mac::Mac;
use crate::seq::{checked_pow, ensure_budget, Odometer};
use crate::{Error, Result};
use alloc::vec::Vec;

/// Counts over every output sequence `z` of the channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepStats {
    pub outputs: usize,
    /// `|D1| >= 1`, `|D2| >= 1` and `|D1| + |D2| >= 3`.
    pub ambiguous: usize,
    pub both_empty: usize,
    pub decoded_pairs: usize,
    pub blames: usize,
}

impl SweepStats {
    fn record(&mut self, out: &DecoderOutput) {
        self.outputs += 1;
        if out.is_ambiguous() {
            self.ambiguous += 1;
        }
        match (out.d1.len(), out.d2.len()) {
            (0, 0) => self.both_empty += 1,
            (1, 1) => self.decoded_pairs += 1,
            (0, _) | (_, 0) => self.blames += 1,
            _ => {}
        }
    }
}

/// Decodes every `z` in `Z^n` and tallies the outcomes.
pub fn sweep(decoder: &TypicalityDecoder, budget: u128) -> Result<SweepStats> {
    let n = decoder.codebook.n;
    ensure_budget(checked_pow(decoder.mac.nz, n), budget)?;
    let mut stats = SweepStats::default();
    let mut od = Odometer::new(decoder.mac.nz, n);
    while od.advance() {
        stats.record(&decoder.decode_full(od.current()));
    }
    Ok(stats)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EtaSearchReport {
    pub params: DecoderParams,
    /// Every tried `eta` with its sweep.
    pub history: Vec<(f64, SweepStats)>,
}

/// Halves `eta` from `0.5` until a full sweep shows no ambiguous output,
/// with `epsilon = delta = eta / 8`. Gives up below `min_eta`.
pub fn eta_search(codebook: &Codebook, mac: &Mac, alpha: f64, min_eta: f64, budget: u128) -> Result<EtaSearchReport> {
    let mut eta = 0.5;
    let mut history = Vec::new();
    while eta >= min_eta {
        let params = DecoderParams::from_eta(eta, alpha)?;
        let dec = TypicalityDecoder::new(codebook.clone(), mac.clone(), params, budget)?;
        let stats = sweep(&dec, budget)?;
        history.push((eta, stats));
        if stats.ambiguous == 0 {
            return Ok(EtaSearchReport { params, history });
        }
        eta /= 2.0;
    }
    Err(Error::InvalidParameter(alloc::format!("no eta >= {min_eta} removes every ambiguous output")))
}
