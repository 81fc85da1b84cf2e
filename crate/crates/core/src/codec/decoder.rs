use super::{Codebook, Decision, Decoder, DecoderOutput, Encoders};
use crate::mac::Mac;
use crate::seq::{all_sequences, checked_pow, checked_product, ensure_budget};
use crate::types::empirical_cmi;
use crate::{Error, Result};
use alloc::format;
use alloc::vec::Vec;

/// Decoder slack parameters (bits).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecoderParams {
    pub eta: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub alpha: f64,
}

impl DecoderParams {
    pub fn new(eta: f64, epsilon: f64, delta: f64, alpha: f64) -> Result<Self> {
        if !(eta > 0.0 && epsilon > 0.0 && delta > 0.0 && alpha > 0.0) {
            return Err(Error::InvalidParameter("eta, epsilon, delta and alpha must be positive".into()));
        }
        if !(eta > 3.0 * epsilon + 4.0 * delta) {
            return Err(Error::InvalidParameter(format!(
                "eta = {eta} must exceed 3 epsilon + 4 delta = {}",
                3.0 * epsilon + 4.0 * delta
            )));
        }
        Ok(Self { eta, epsilon, delta, alpha })
    }

    /// `epsilon = delta = eta / 8`.
    pub fn from_eta(eta: f64, alpha: f64) -> Result<Self> {
        Self::new(eta, eta / 8.0, eta / 8.0, alpha)
    }

    pub(crate) fn check_codebook(&self, cb: &Codebook) -> Result<()> {
        let least = cb.comp1.min_mass().min(cb.comp2.min_mass());
        if least < self.alpha {
            return Err(Error::InvalidParameter(format!(
                "composition mass {least} below alpha = {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// `D(P_ABZ || P_A P_B W) <= eta` for the empirical joint type of `(a, b, z)`,
/// with `W(z | a, b)` given by `mac`.
pub(crate) fn in_d_eta(mac: &Mac, a: &[usize], b: &[usize], z: &[usize], eta: f64) -> bool {
    let n = z.len();
    let nf = n as f64;
    let mut d = 0.0;
    for t in 0..n {
        let (x, y, o) = (a[t], b[t], z[t]);
        if (0..t).any(|s| a[s] == x && b[s] == y && z[s] == o) {
            continue;
        }
        let w = mac.prob(x, y, o);
        if w <= 0.0 {
            return false;
        }
        let c = (t..n).filter(|&s| a[s] == x && b[s] == y && z[s] == o).count() as f64;
        let ca = a.iter().filter(|&&v| v == x).count() as f64;
        let cb = b.iter().filter(|&&v| v == y).count() as f64;
        d += c / nf * libm::log2(c * nf / (ca * cb * w));
    }
    d <= eta
}

/// One direction of the decoding problem: candidates `words_a` for the user
/// being decoded, `words_b` for the other, and `mac` oriented as `W(z | a, b)`.
pub(crate) struct Side<'a> {
    pub words_a: &'a [Vec<usize>],
    pub words_b: &'a [Vec<usize>],
    pub mac: &'a Mac,
    pub seqs_a: &'a [Vec<usize>],
    pub seqs_b: &'a [Vec<usize>],
    pub eta: f64,
}

impl Side<'_> {
    /// All `b` with `(words_a[m], b, z)` in `D_eta`.
    pub fn partners(&self, m: usize, z: &[usize]) -> Vec<&[usize]> {
        let a = &self.words_a[m];
        self.seqs_b
            .iter()
            .filter(|b| in_d_eta(self.mac, a, b, z, self.eta))
            .map(|b| b.as_slice())
            .collect()
    }

    pub fn a_has_partner(&self, m: usize, z: &[usize]) -> bool {
        let a = &self.words_a[m];
        self.seqs_b.iter().any(|b| in_d_eta(self.mac, a, b, z, self.eta))
    }

    /// Some `a` makes `(a, words_b[m], z)` typical.
    pub fn b_has_partner(&self, m: usize, z: &[usize]) -> bool {
        let b = &self.words_b[m];
        self.seqs_a.iter().any(|a| in_d_eta(self.mac, a, b, z, self.eta))
    }

    /// `I(A~ B~; A Z | B)` for `(words_a[m], b, words_a[ma], words_b[mb], z)`.
    pub fn cross_info(&self, m: usize, b: &[usize], ma: usize, mb: usize, z: &[usize]) -> f64 {
        empirical_cmi(&[&self.words_a[ma], &self.words_b[mb]], &[&self.words_a[m], z], &[b])
    }

    /// `I(B~1 B~2; A Z | B)` for `(words_a[m], b, words_b[m1], words_b[m2], z)`.
    pub fn pair_info(&self, m: usize, b: &[usize], m1: usize, m2: usize, z: &[usize]) -> f64 {
        empirical_cmi(&[&self.words_b[m1], &self.words_b[m2]], &[&self.words_a[m], z], &[b])
    }

    /// Candidate set of the typicality decoder for user A.
    pub fn candidates(&self, z: &[usize]) -> Vec<usize> {
        let ca: Vec<bool> = (0..self.words_a.len()).map(|m| self.a_has_partner(m, z)).collect();
        let cb: Vec<usize> = (0..self.words_b.len()).filter(|&m| self.b_has_partner(m, z)).collect();
        let mut out = Vec::new();
        for m in 0..self.words_a.len() {
            if !ca[m] {
                continue;
            }
            let accepted = self.partners(m, z).into_iter().any(|b| {
                let cond2 = (0..self.words_a.len())
                    .filter(|&ma| ma != m && ca[ma])
                    .all(|ma| cb.iter().all(|&mb| self.cross_info(m, b, ma, mb, z) < self.eta));
                cond2
                    && cb.iter().enumerate().all(|(i, &m1)| {
                        cb[i + 1..].iter().all(|&m2| self.pair_info(m, b, m1, m2, z) < self.eta)
                    })
            });
            if accepted {
                out.push(m);
            }
        }
        out
    }
}

pub(crate) fn check_alphabets(cb: &Codebook, mac: &Mac) -> Result<()> {
    if cb.nx() != mac.nx {
        return Err(Error::AlphabetMismatch { left: cb.nx(), right: mac.nx });
    }
    if cb.ny() != mac.ny {
        return Err(Error::AlphabetMismatch { left: cb.ny(), right: mac.ny });
    }
    Ok(())
}

/// The typicality decoder with candidate sets `D1(eta, z)` and `D2(eta, z)`.
#[derive(Debug, Clone)]
pub struct TypicalityDecoder {
    pub codebook: Codebook,
    pub mac: Mac,
    pub params: DecoderParams,
    mac_t: Mac,
    seqs_x: Vec<Vec<usize>>,
    seqs_y: Vec<Vec<usize>>,
}

impl TypicalityDecoder {
    /// Fails with [`Error::TooLarge`] when `|X|^n |Y|^n` exceeds `budget`.
    pub fn new(codebook: Codebook, mac: Mac, params: DecoderParams, budget: u128) -> Result<Self> {
        check_alphabets(&codebook, &mac)?;
        params.check_codebook(&codebook)?;
        let n = codebook.n;
        ensure_budget(checked_product(&[checked_pow(mac.nx, n), checked_pow(mac.ny, n)]), budget)?;
        let seqs_x = all_sequences(mac.nx, n);
        let seqs_y = all_sequences(mac.ny, n);
        let mac_t = mac.transpose();
        Ok(Self { codebook, mac, params, mac_t, seqs_x, seqs_y })
    }

    pub(crate) fn sides(&self) -> (Side<'_>, Side<'_>) {
        let one = Side {
            words_a: &self.codebook.words1,
            words_b: &self.codebook.words2,
            mac: &self.mac,
            seqs_a: &self.seqs_x,
            seqs_b: &self.seqs_y,
            eta: self.params.eta,
        };
        let two = Side {
            words_a: &self.codebook.words2,
            words_b: &self.codebook.words1,
            mac: &self.mac_t,
            seqs_a: &self.seqs_y,
            seqs_b: &self.seqs_x,
            eta: self.params.eta,
        };
        (one, two)
    }

    pub fn check_output(&self, z: &[usize]) -> Result<()> {
        if z.len() != self.codebook.n {
            return Err(Error::LengthMismatch { expected: self.codebook.n, found: z.len() });
        }
        if let Some(&s) = z.iter().find(|&&s| s >= self.mac.nz) {
            return Err(Error::SymbolOutOfRange { symbol: s, alphabet: self.mac.nz });
        }
        Ok(())
    }

    pub fn decode_full(&self, z: &[usize]) -> DecoderOutput {
        let (one, two) = self.sides();
        DecoderOutput::from_candidates(one.candidates(z), two.candidates(z))
    }
}

impl Decoder for TypicalityDecoder {
    fn decode(&self, z: &[usize]) -> Decision {
        self.decode_full(z).decision
    }
}

/// Decodes one output with the typicality decoder.
pub fn decode_feasibility(
    codebook: &Codebook,
    mac: &Mac,
    z: &[usize],
    params: &DecoderParams,
    budget: u128,
) -> Result<DecoderOutput> {
    let dec = TypicalityDecoder::new(codebook.clone(), mac.clone(), *params, budget)?;
    dec.check_output(z)?;
    Ok(dec.decode_full(z))
}
