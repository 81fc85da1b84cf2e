//! Exact and Monte Carlo error probabilities.
//!
//! Honest error averages over both messages. With user 1 malicious, an
//! error is any verdict other than `Blame1` or a pair with the correct
//! user-2 message; the exact value is the max over transmitted vectors.

use crate::attack::Attack;
use crate::codec::{Decision, Decoder, Encoders, RandomizedCode};
use crate::mac::{Mac, User};
use crate::seq::{checked_pow, checked_product, ensure_budget, for_each_product_support, index_of, Odometer};
use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum EvalMode {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HalfWidths {
    pub p_hon: f64,
    pub p_mal1: f64,
    pub p_mal2: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ErrorReport {
    pub p_hon: f64,
    pub p_mal1: f64,
    pub p_mal2: f64,
    pub p_e: f64,
    pub mode: EvalMode,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    /// 95% normal-approximation half-widths.
    pub half_widths: Option<HalfWidths>,
    pub worst_vector1: Option<Vec<usize>>,
    pub worst_vector2: Option<Vec<usize>>,
    /// Encoder chosen by the malicious user at the maximum (randomized codes).
    pub worst_encoder1: Option<usize>,
    pub worst_encoder2: Option<usize>,
    /// Set when the maxima ran over caller-supplied vectors only, so the
    /// malicious errors are lower bounds.
    pub mal_lower_bound: bool,
}

/// Restricts the adversary maximum to the listed vectors. `None` means the
/// whole input space.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AdversaryVectors {
    pub user1: Option<Vec<Vec<usize>>>,
    pub user2: Option<Vec<Vec<usize>>>,
}

/// Decoder verdict for every `z` in `Z^n`, by [`index_of`].
pub fn decision_table<D: Decoder + ?Sized>(decoder: &D, nz: usize, n: usize) -> Vec<Decision> {
    let mut out = Vec::new();
    let mut od = Odometer::new(nz, n);
    while od.advance() {
        out.push(decoder.decode(od.current()));
    }
    out
}

/// A decoder replaced by its precomputed verdict table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableDecoder {
    pub nz: usize,
    pub n: usize,
    pub table: Vec<Decision>,
}

impl TableDecoder {
    pub fn new<D: Decoder + ?Sized>(decoder: &D, nz: usize, n: usize, budget: u128) -> Result<Self> {
        ensure_budget(checked_pow(nz, n), budget)?;
        Ok(Self { nz, n, table: decision_table(decoder, nz, n) })
    }
}

impl Decoder for TableDecoder {
    fn decode(&self, z: &[usize]) -> Decision {
        self.table[index_of(z, self.nz)]
    }
}

/// Inverse-CDF draw from a probability row.
pub fn sample_index<R: Rng + ?Sized>(row: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in row.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}

fn wrong_for_honest(d: Decision, m1: usize, m2: usize) -> bool {
    d != Decision::Pair(m1, m2)
}

/// Error event when `malicious` attacks and the honest message is `m`.
fn wrong_under_attack(d: Decision, malicious: User, m: usize) -> bool {
    match (malicious, d) {
        (User::One, Decision::Blame1) | (User::Two, Decision::Blame2) => false,
        (User::One, Decision::Pair(_, m2)) => m2 != m,
        (User::Two, Decision::Pair(m1, _)) => m1 != m,
        _ => true,
    }
}

fn check_word(w: &[usize], n: usize, q: usize) -> Result<()> {
    if w.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: w.len() });
    }
    if let Some(&s) = w.iter().find(|&&s| s >= q) {
        return Err(Error::SymbolOutOfRange { symbol: s, alphabet: q });
    }
    Ok(())
}

/// Exact evaluation with precomputed decoder tables. A deterministic code
/// is the randomized case with one encoder per user.
pub struct ExactEvaluator<'a> {
    mac: &'a Mac,
    n: usize,
    enc1: Vec<&'a [Vec<usize>]>,
    enc2: Vec<&'a [Vec<usize>]>,
    w1: Vec<f64>,
    w2: Vec<f64>,
    tables: Vec<Vec<Decision>>,
}

impl<'a> ExactEvaluator<'a> {
    pub fn deterministic<C: Encoders + ?Sized, D: Decoder + ?Sized>(
        code: &'a C,
        decoder: &D,
        mac: &'a Mac,
        budget: u128,
    ) -> Result<Self> {
        Self::build(mac, code.n(), vec![code.words1()], vec![code.words2()], vec![1.0], vec![1.0], |_, _| {
            decision_table(decoder, mac.nz, code.n())
        }, budget)
    }

    pub fn randomized<D: Decoder>(code: &'a RandomizedCode<D>, mac: &'a Mac, budget: u128) -> Result<Self> {
        Self::build(
            mac,
            code.n,
            code.encoders1.iter().map(|t| t.as_slice()).collect(),
            code.encoders2.iter().map(|t| t.as_slice()).collect(),
            code.weights1.probs().to_vec(),
            code.weights2.probs().to_vec(),
            |a, b| decision_table(code.decoder(a, b), mac.nz, code.n),
            budget,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn build<F: Fn(usize, usize) -> Vec<Decision>>(
        mac: &'a Mac,
        n: usize,
        enc1: Vec<&'a [Vec<usize>]>,
        enc2: Vec<&'a [Vec<usize>]>,
        w1: Vec<f64>,
        w2: Vec<f64>,
        table: F,
        budget: u128,
    ) -> Result<Self> {
        for t in &enc1 {
            if t.is_empty() {
                return Err(Error::InvalidParameter("empty codebook".into()));
            }
            for w in t.iter() {
                check_word(w, n, mac.nx)?;
            }
        }
        for t in &enc2 {
            if t.is_empty() {
                return Err(Error::InvalidParameter("empty codebook".into()));
            }
            for w in t.iter() {
                check_word(w, n, mac.ny)?;
            }
        }
        let pairs = (enc1.len() * enc2.len()) as u128;
        ensure_budget(checked_product(&[checked_pow(mac.nz, n), Some(pairs)]), budget)?;
        let mut tables = Vec::with_capacity(pairs as usize);
        for a in 0..enc1.len() {
            for b in 0..enc2.len() {
                tables.push(table(a, b));
            }
        }
        Ok(Self { mac, n, enc1, enc2, w1, w2, tables })
    }

    fn table(&self, a: usize, b: usize) -> &[Decision] {
        &self.tables[a * self.enc2.len() + b]
    }

    fn prob_where<P: Fn(Decision) -> bool>(&self, x: &[usize], y: &[usize], table: &[Decision], pred: P) -> f64 {
        let rows: Vec<&[f64]> = (0..self.n).map(|t| self.mac.row(x[t], y[t])).collect();
        let mut acc = 0.0;
        for_each_product_support(&rows, |z, p| {
            if pred(table[index_of(z, self.mac.nz)]) {
                acc += p;
            }
        });
        acc
    }

    pub fn honest_error(&self) -> f64 {
        let mut total = 0.0;
        for (a, t1) in self.enc1.iter().enumerate() {
            for (b, t2) in self.enc2.iter().enumerate() {
                let wt = self.w1[a] * self.w2[b];
                if wt == 0.0 {
                    continue;
                }
                let table = self.table(a, b);
                let mut s = 0.0;
                for (m1, x) in t1.iter().enumerate() {
                    for (m2, y) in t2.iter().enumerate() {
                        s += self.prob_where(x, y, table, |d| wrong_for_honest(d, m1, m2));
                    }
                }
                total += wt * s / (t1.len() * t2.len()) as f64;
            }
        }
        total
    }

    /// Error when `malicious` transmits `vector` and claims its encoder
    /// `encoder`; the honest message and encoder are averaged.
    pub fn malicious_error(&self, malicious: User, vector: &[usize], encoder: usize) -> Result<f64> {
        let q = if malicious == User::One { self.mac.nx } else { self.mac.ny };
        check_word(vector, self.n, q)?;
        let mut total = 0.0;
        match malicious {
            User::One => {
                for (b, t2) in self.enc2.iter().enumerate() {
                    if self.w2[b] == 0.0 {
                        continue;
                    }
                    let table = self.table(encoder, b);
                    let s: f64 = t2
                        .iter()
                        .enumerate()
                        .map(|(m2, y)| self.prob_where(vector, y, table, |d| wrong_under_attack(d, User::One, m2)))
                        .sum();
                    total += self.w2[b] * s / t2.len() as f64;
                }
            }
            User::Two => {
                for (a, t1) in self.enc1.iter().enumerate() {
                    if self.w1[a] == 0.0 {
                        continue;
                    }
                    let table = self.table(a, encoder);
                    let s: f64 = t1
                        .iter()
                        .enumerate()
                        .map(|(m1, x)| self.prob_where(x, vector, table, |d| wrong_under_attack(d, User::Two, m1)))
                        .sum();
                    total += self.w1[a] * s / t1.len() as f64;
                }
            }
        }
        Ok(total)
    }

    /// Error under a randomized strategy: the weighted mean of the errors
    /// of the vectors in its support.
    pub fn error_under_distribution(&self, malicious: User, dist: &[(Vec<usize>, f64)], encoder: usize) -> Result<f64> {
        let mut acc = 0.0;
        for (v, p) in dist {
            acc += p * self.malicious_error(malicious, v, encoder)?;
        }
        Ok(acc)
    }

    fn worst(&self, malicious: User, list: Option<&[Vec<usize>]>) -> Result<(f64, Vec<usize>, usize)> {
        let (q, encoders) = match malicious {
            User::One => (self.mac.nx, self.enc1.len()),
            User::Two => (self.mac.ny, self.enc2.len()),
        };
        let mut best = (-1.0, Vec::new(), 0);
        let mut consider = |v: &[usize]| -> Result<()> {
            for e in 0..encoders {
                let p = self.malicious_error(malicious, v, e)?;
                if p > best.0 {
                    best = (p, v.to_vec(), e);
                }
            }
            Ok(())
        };
        match list {
            Some(vs) => {
                if vs.is_empty() {
                    return Err(Error::InvalidParameter("empty adversary vector list".into()));
                }
                for v in vs {
                    consider(v)?;
                }
            }
            None => {
                let mut od = Odometer::new(q, self.n);
                while od.advance() {
                    consider(od.current())?;
                }
            }
        }
        Ok(best)
    }

    /// All three probabilities. Without vector lists the malicious maxima
    /// enumerate the full input spaces, which costs
    /// `(L1 |X|^n + L2 |Y|^n) |Z|^n` cells against `budget`.
    pub fn report(&self, adversary: &AdversaryVectors, budget: u128) -> Result<ErrorReport> {
        let count = |list: &Option<Vec<Vec<usize>>>, q: usize, l: usize| match list {
            Some(v) => checked_product(&[Some(v.len() as u128), Some(l as u128)]),
            None => checked_product(&[checked_pow(q, self.n), Some(l as u128)]),
        };
        let c1 = count(&adversary.user1, self.mac.nx, self.enc1.len());
        let c2 = count(&adversary.user2, self.mac.ny, self.enc2.len());
        let cells = c1.zip(c2).and_then(|(a, b)| a.checked_add(b));
        ensure_budget(checked_product(&[cells, checked_pow(self.mac.nz, self.n)]), budget)?;
        let p_hon = self.honest_error();
        let (p_mal1, v1, e1) = self.worst(User::One, adversary.user1.as_deref())?;
        let (p_mal2, v2, e2) = self.worst(User::Two, adversary.user2.as_deref())?;
        let randomized = self.enc1.len() > 1 || self.enc2.len() > 1;
        Ok(ErrorReport {
            p_hon,
            p_mal1,
            p_mal2,
            p_e: p_hon.max(p_mal1).max(p_mal2),
            mode: EvalMode::Exact,
            trials: None,
            seed: None,
            half_widths: None,
            worst_vector1: Some(v1),
            worst_vector2: Some(v2),
            worst_encoder1: randomized.then_some(e1),
            worst_encoder2: randomized.then_some(e2),
            mal_lower_bound: adversary.user1.is_some() || adversary.user2.is_some(),
        })
    }
}

/// Exact error probabilities of a deterministic code.
pub fn exact_error_probabilities<C: Encoders + ?Sized, D: Decoder + ?Sized>(
    code: &C,
    decoder: &D,
    mac: &Mac,
    adversary: &AdversaryVectors,
    budget: u128,
) -> Result<ErrorReport> {
    ExactEvaluator::deterministic(code, decoder, mac, budget)?.report(adversary, budget)
}

/// Exact error of a deterministic code under one attack.
pub fn exact_error_under_attack<C: Encoders + ?Sized, D: Decoder + ?Sized>(
    code: &C,
    decoder: &D,
    mac: &Mac,
    attack: &Attack,
    budget: u128,
) -> Result<f64> {
    let ev = ExactEvaluator::deterministic(code, decoder, mac, budget)?;
    let dist = attack.vector_distribution(code, budget)?;
    ev.error_under_distribution(attack.user(), &dist, 0)
}

/// Error counts from a range of Monte Carlo trials. Counts from disjoint
/// ranges add up to the counts of their union.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct McCounts {
    pub trials: u64,
    pub hon: u64,
    pub mal1: u64,
    pub mal2: u64,
}

impl McCounts {
    pub fn merge(self, other: McCounts) -> McCounts {
        McCounts {
            trials: self.trials + other.trials,
            hon: self.hon + other.hon,
            mal1: self.mal1 + other.mal1,
            mal2: self.mal2 + other.mal2,
        }
    }

    pub fn report(&self, seed: u64) -> ErrorReport {
        let t = self.trials.max(1) as f64;
        let est = |c: u64| c as f64 / t;
        let hw = |p: f64| 1.96 * libm::sqrt(p * (1.0 - p) / t);
        let (h, a, b) = (est(self.hon), est(self.mal1), est(self.mal2));
        ErrorReport {
            p_hon: h,
            p_mal1: a,
            p_mal2: b,
            p_e: h.max(a).max(b),
            mode: EvalMode::MonteCarlo,
            trials: Some(self.trials),
            seed: Some(seed),
            half_widths: Some(HalfWidths { p_hon: hw(h), p_mal1: hw(a), p_mal2: hw(b) }),
            worst_vector1: None,
            worst_vector2: None,
            worst_encoder1: None,
            worst_encoder2: None,
            mal_lower_bound: false,
        }
    }
}

/// Runs trials `range`. Trial `t` draws from a ChaCha stream selected by
/// `t` under key `seed`, so results do not depend on how trials are split.
///
/// Each trial samples the honest case and one attacked case per user. A
/// user without an attack in `attacks` transmits a uniformly drawn
/// codeword of its own.
pub fn monte_carlo_counts<C: Encoders + ?Sized, D: Decoder + ?Sized>(
    code: &C,
    decoder: &D,
    mac: &Mac,
    attacks: &[Attack],
    range: core::ops::Range<u64>,
    seed: u64,
) -> Result<McCounts> {
    for a in attacks {
        a.validate(code)?;
    }
    if code.nx() != mac.nx || code.ny() != mac.ny {
        return Err(Error::AlphabetMismatch { left: code.nx() * code.ny(), right: mac.nx * mac.ny });
    }
    let n = code.n();
    let (w1, w2) = (code.words1(), code.words2());
    let attack_for = |u: User| attacks.iter().find(|a| a.user() == u);
    let (a1, a2) = (attack_for(User::One), attack_for(User::Two));
    let mut counts = McCounts::default();
    let mut z = vec![0usize; n];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in range {
        rng.set_stream(t);
        rng.set_word_pos(0);
        let send = |x: &[usize], y: &[usize], z: &mut [usize], rng: &mut ChaCha8Rng| {
            for i in 0..n {
                z[i] = sample_index(mac.row(x[i], y[i]), rng);
            }
        };
        let m1 = rng.gen_range(0..w1.len());
        let m2 = rng.gen_range(0..w2.len());
        send(&w1[m1], &w2[m2], &mut z, &mut rng);
        counts.hon += wrong_for_honest(decoder.decode(&z), m1, m2) as u64;

        let x = match a1 {
            Some(a) => a.sample(code, &mut rng),
            None => w1[rng.gen_range(0..w1.len())].clone(),
        };
        let m2 = rng.gen_range(0..w2.len());
        send(&x, &w2[m2], &mut z, &mut rng);
        counts.mal1 += wrong_under_attack(decoder.decode(&z), User::One, m2) as u64;

        let y = match a2 {
            Some(a) => a.sample(code, &mut rng),
            None => w2[rng.gen_range(0..w2.len())].clone(),
        };
        let m1 = rng.gen_range(0..w1.len());
        send(&w1[m1], &y, &mut z, &mut rng);
        counts.mal2 += wrong_under_attack(decoder.decode(&z), User::Two, m1) as u64;
        counts.trials += 1;
    }
    Ok(counts)
}

pub fn monte_carlo_error<C: Encoders + ?Sized, D: Decoder + ?Sized>(
    code: &C,
    decoder: &D,
    mac: &Mac,
    attacks: &[Attack],
    trials: u64,
    seed: u64,
) -> Result<ErrorReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    Ok(monte_carlo_counts(code, decoder, mac, attacks, 0..trials, seed)?.report(seed))
}
