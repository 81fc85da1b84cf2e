//! Randomized codes (shared randomness between each encoder and the
//! decoder), their reduction to `n^2` encoders per user by sampling, and
//! the two-phase composition into a deterministic code.

use super::{Decision, Decoder, Encoders};
use crate::kernel::DistributionVector;
use crate::mac::Mac;
use crate::sim::{AdversaryVectors, ErrorReport, ExactEvaluator};
use crate::{Error, Result};
use alloc::format;
use alloc::vec::Vec;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Encoder lists `Gamma_1`, `Gamma_2` with weights and one decoder per
/// encoder pair, stored at `l1 * L2 + l2`.
#[derive(Debug, Clone)]
pub struct RandomizedCode<D> {
    pub n: usize,
    pub nx: usize,
    pub ny: usize,
    pub encoders1: Vec<Vec<Vec<usize>>>,
    pub encoders2: Vec<Vec<Vec<usize>>>,
    pub weights1: DistributionVector,
    pub weights2: DistributionVector,
    pub decoders: Vec<D>,
}

fn check_tables(tables: &[Vec<Vec<usize>>], n: usize, q: usize) -> Result<usize> {
    let count = tables.first().map_or(0, |t| t.len());
    if count == 0 {
        return Err(Error::SizeMismatch("every encoder needs at least one message".into()));
    }
    for t in tables {
        if t.len() != count {
            return Err(Error::SizeMismatch(format!("encoders disagree on message count: {} vs {count}", t.len())));
        }
        for w in t {
            if w.len() != n {
                return Err(Error::LengthMismatch { expected: n, found: w.len() });
            }
            if let Some(&s) = w.iter().find(|&&s| s >= q) {
                return Err(Error::SymbolOutOfRange { symbol: s, alphabet: q });
            }
        }
    }
    Ok(count)
}

impl<D: Decoder> RandomizedCode<D> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        nx: usize,
        ny: usize,
        encoders1: Vec<Vec<Vec<usize>>>,
        encoders2: Vec<Vec<Vec<usize>>>,
        weights1: DistributionVector,
        weights2: DistributionVector,
        decoders: Vec<D>,
    ) -> Result<Self> {
        if weights1.len() != encoders1.len() {
            return Err(Error::DimensionMismatch { expected: encoders1.len(), found: weights1.len() });
        }
        if weights2.len() != encoders2.len() {
            return Err(Error::DimensionMismatch { expected: encoders2.len(), found: weights2.len() });
        }
        check_tables(&encoders1, n, nx)?;
        check_tables(&encoders2, n, ny)?;
        let pairs = encoders1.len() * encoders2.len();
        if decoders.len() != pairs {
            return Err(Error::DimensionMismatch { expected: pairs, found: decoders.len() });
        }
        Ok(Self { n, nx, ny, encoders1, encoders2, weights1, weights2, decoders })
    }

    pub fn l1(&self) -> usize {
        self.encoders1.len()
    }

    pub fn l2(&self) -> usize {
        self.encoders2.len()
    }

    pub fn n1(&self) -> usize {
        self.encoders1[0].len()
    }

    pub fn n2(&self) -> usize {
        self.encoders2[0].len()
    }

    pub fn decoder(&self, l1: usize, l2: usize) -> &D {
        &self.decoders[l1 * self.l2() + l2]
    }
}

#[derive(Debug, Clone)]
pub struct DerandomizeReport<D> {
    pub reduced: RandomizedCode<D>,
    /// Indices drawn from `Gamma_1` and `Gamma_2`.
    pub sampled1: Vec<usize>,
    pub sampled2: Vec<usize>,
    pub before: ErrorReport,
    pub after: ErrorReport,
}

/// Draws `n^2` encoders i.i.d. from each weighted list and keeps them with
/// uniform weights. Error probabilities of both codes are computed exactly;
/// nothing guarantees the reduced code is as good.
pub fn derandomize<D: Decoder + Clone>(
    code: &RandomizedCode<D>,
    mac: &Mac,
    seed: u64,
    budget: u128,
) -> Result<DerandomizeReport<D>> {
    let before = ExactEvaluator::randomized(code, mac, budget)?.report(&AdversaryVectors::default(), budget)?;
    let l = code.n * code.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |w: &DistributionVector, rng: &mut ChaCha8Rng| -> Result<Vec<usize>> {
        let dist = WeightedIndex::new(w.probs()).map_err(|e| Error::InvalidParameter(format!("{e}")))?;
        Ok((0..l).map(|_| dist.sample(rng)).collect())
    };
    let sampled1 = draw(&code.weights1, &mut rng)?;
    let sampled2 = draw(&code.weights2, &mut rng)?;
    let mut decoders = Vec::with_capacity(l * l);
    for &a in &sampled1 {
        for &b in &sampled2 {
            decoders.push(code.decoder(a, b).clone());
        }
    }
    let reduced = RandomizedCode::new(
        code.n,
        code.nx,
        code.ny,
        sampled1.iter().map(|&a| code.encoders1[a].clone()).collect(),
        sampled2.iter().map(|&b| code.encoders2[b].clone()).collect(),
        DistributionVector::uniform(l),
        DistributionVector::uniform(l),
        decoders,
    )?;
    let after = ExactEvaluator::randomized(&reduced, mac, budget)?.report(&AdversaryVectors::default(), budget)?;
    Ok(DerandomizeReport { reduced, sampled1, sampled2, before, after })
}

/// Deterministic code whose words are a short prefix selecting the encoder
/// followed by that encoder's codeword. Message `l * N + m` means encoder
/// `l`, message `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeCode {
    pub prefix_len: usize,
    pub n: usize,
    pub nx: usize,
    pub ny: usize,
    pub inner_n1: usize,
    pub inner_n2: usize,
    pub words1: Vec<Vec<usize>>,
    pub words2: Vec<Vec<usize>>,
}

impl Encoders for CompositeCode {
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

/// Decodes the prefix first; a blame there is final. Otherwise the
/// decoded encoder pair picks the decoder for the suffix.
pub struct CompositeDecoder<S, D> {
    pub prefix_len: usize,
    pub short: S,
    pub inner: RandomizedCode<D>,
}

impl<S: Decoder, D: Decoder> Decoder for CompositeDecoder<S, D> {
    fn decode(&self, z: &[usize]) -> Decision {
        let (head, tail) = z.split_at(self.prefix_len.min(z.len()));
        match self.short.decode(head) {
            Decision::Pair(l1, l2) if l1 < self.inner.l1() && l2 < self.inner.l2() => {
                match self.inner.decoder(l1, l2).decode(tail) {
                    Decision::Pair(m1, m2) => Decision::Pair(l1 * self.inner.n1() + m1, l2 * self.inner.n2() + m2),
                    blame => blame,
                }
            }
            Decision::Pair(..) => Decision::Pair(0, 0),
            blame => blame,
        }
    }
}

/// Joins a short deterministic code whose message sets index the encoder
/// lists with the reduced randomized code.
pub fn compose_two_phase<C: Encoders + ?Sized, S: Decoder, D: Decoder + Clone>(
    short: &C,
    short_decoder: S,
    inner: &RandomizedCode<D>,
) -> Result<(CompositeCode, CompositeDecoder<S, D>)> {
    if short.n1() != inner.l1() || short.n2() != inner.l2() {
        return Err(Error::SizeMismatch(format!(
            "short code has {}x{} messages, inner code has {}x{} encoders",
            short.n1(),
            short.n2(),
            inner.l1(),
            inner.l2()
        )));
    }
    if short.nx() != inner.nx || short.ny() != inner.ny {
        return Err(Error::AlphabetMismatch { left: short.nx() * short.ny(), right: inner.nx * inner.ny });
    }
    let join = |prefixes: &[Vec<usize>], tables: &[Vec<Vec<usize>>]| -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for (p, table) in prefixes.iter().zip(tables) {
            for w in table {
                let mut v = p.clone();
                v.extend_from_slice(w);
                out.push(v);
            }
        }
        out
    };
    let code = CompositeCode {
        prefix_len: short.n(),
        n: short.n() + inner.n,
        nx: inner.nx,
        ny: inner.ny,
        inner_n1: inner.n1(),
        inner_n2: inner.n2(),
        words1: join(short.words1(), &inner.encoders1),
        words2: join(short.words2(), &inner.encoders2),
    };
    let dec = CompositeDecoder { prefix_len: short.n(), short: short_decoder, inner: inner.clone() };
    Ok((code, dec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{FnDecoder, PlainCode};
    use alloc::vec;

    fn identity_decoder(n1: usize, n2: usize) -> impl Fn(&[usize]) -> Decision + Sync + Clone {
        // Identity channel on binary inputs: z = 2x + y. Message index is the
        // binary word read as a number.
        move |z: &[usize]| {
            let x = z.iter().fold(0, |a, &s| a * 2 + s / 2);
            let y = z.iter().fold(0, |a, &s| a * 2 + s % 2);
            if x < n1 && y < n2 {
                Decision::Pair(x, y)
            } else {
                Decision::Pair(0, 0)
            }
        }
    }

    fn binary_words(count: usize, n: usize) -> Vec<Vec<usize>> {
        (0..count).map(|m| crate::seq::sequence_at(m, 2, n)).collect()
    }

    #[test]
    fn singleton_lists_keep_error_probabilities() {
        let mac = Mac::identity(2, 2);
        let n = 2;
        let dec = FnDecoder(identity_decoder(4, 4));
        let code = RandomizedCode::new(
            n,
            2,
            2,
            vec![binary_words(4, n)],
            vec![binary_words(4, n)],
            DistributionVector::uniform(1),
            DistributionVector::uniform(1),
            vec![&dec],
        )
        .unwrap();
        let rep = derandomize(&code, &mac, 7, 1 << 24).unwrap();
        assert_eq!(rep.reduced.l1(), 4);
        assert_eq!(rep.before.p_hon, rep.after.p_hon);
        assert_eq!(rep.before.p_mal1, rep.after.p_mal1);
        assert_eq!(rep.before.p_mal2, rep.after.p_mal2);
    }

    #[test]
    fn composite_decodes_honest_messages() {
        let mac = Mac::identity(2, 2);
        let short = PlainCode::new(2, 2, binary_words(4, 2), binary_words(4, 2)).unwrap();
        let short_dec = FnDecoder(identity_decoder(4, 4));
        let inner_dec = FnDecoder(identity_decoder(2, 2));
        let inner = RandomizedCode::new(
            1,
            2,
            2,
            vec![binary_words(2, 1); 4],
            vec![binary_words(2, 1); 4],
            DistributionVector::uniform(4),
            DistributionVector::uniform(4),
            vec![&inner_dec; 16],
        )
        .unwrap();
        let (code, dec) = compose_two_phase(&short, short_dec, &inner).unwrap();
        assert_eq!(code.n1(), 8);
        for (m1, x) in code.words1.iter().enumerate() {
            for (m2, y) in code.words2.iter().enumerate() {
                let z: Vec<usize> = x.iter().zip(y).map(|(&a, &b)| 2 * a + b).collect();
                assert_eq!(dec.decode(&z), Decision::Pair(m1, m2));
            }
        }
        let rep = ExactEvaluator::deterministic(&code, &dec, &mac, 1 << 24).unwrap();
        assert_eq!(rep.honest_error(), 0.0);
    }

    #[test]
    fn prefix_blame_propagates() {
        let short_dec = FnDecoder(|_: &[usize]| Decision::Blame2);
        let inner_dec = FnDecoder(|_: &[usize]| Decision::Pair(0, 0));
        let inner = RandomizedCode::new(
            1,
            2,
            2,
            vec![binary_words(2, 1)],
            vec![binary_words(2, 1)],
            DistributionVector::uniform(1),
            DistributionVector::uniform(1),
            vec![inner_dec],
        )
        .unwrap();
        let short = PlainCode::new(2, 2, vec![vec![0]], vec![vec![1]]).unwrap();
        let (_, dec) = compose_two_phase(&short, short_dec, &inner).unwrap();
        for z in [[0, 0], [3, 1], [2, 3]] {
            assert_eq!(dec.decode(&z), Decision::Blame2);
        }
    }

    #[test]
    fn size_mismatch_rejected() {
        let inner_dec = FnDecoder(|_: &[usize]| Decision::Pair(0, 0));
        let inner = RandomizedCode::new(
            1,
            2,
            2,
            vec![binary_words(2, 1)],
            vec![binary_words(2, 1)],
            DistributionVector::uniform(1),
            DistributionVector::uniform(1),
            vec![inner_dec],
        )
        .unwrap();
        let short = PlainCode::new(2, 2, binary_words(2, 1), binary_words(1, 1)).unwrap();
        let short_dec = FnDecoder(|_: &[usize]| Decision::Pair(0, 0));
        assert!(matches!(compose_two_phase(&short, short_dec, &inner), Err(Error::SizeMismatch(_))));
    }
}
