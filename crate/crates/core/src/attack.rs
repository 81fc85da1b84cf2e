//! Attacks by a malicious user and the spoofing converse.
//!
//! A user-1 spoofing certificate `(Q_{Y|X~Y~}, Q_{X|X~X'})` gives two
//! attacks: a malicious user 2 feeds `(x_j, y_k)` for uniform `j, k` through
//! `Q_{Y|X~Y~}`, and a malicious user 1 feeds `(x_i, x_j)` for uniform
//! `i, j` through `Q_{X|X~X'}`. The induced output laws coincide, so no
//! decoder can tell the scenarios apart.

use crate::codec::{Decision, Decoder, Encoders, PlainCode, Swapped};
use crate::kernel::Kernel;
use crate::mac::{Mac, User};
use crate::seq::{checked_pow, checked_product, ensure_budget, for_each_product_support, index_of};
use crate::sim::{decision_table, sample_index};
use crate::{Error, Result};
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

/// Spoofing certificate for user `spoofed`. For user 1 the kernels are
/// `[Q_{Y|X~Y~} (input (x~, y~)), Q_{X|X~X'} (input (x~, x'))]`; for user 2
/// `[Q_{X|X~Y~} (input (x~, y~)), Q_{Y|Y~Y'} (input (y~, y'))]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpoofCertificate {
    pub spoofed: User,
    pub kernels: [Kernel; 2],
}

impl SpoofCertificate {
    pub fn new(spoofed: User, kernels: [Kernel; 2], nx: usize, ny: usize) -> Result<Self> {
        let (own, other) = match spoofed {
            User::One => (nx, ny),
            User::Two => (ny, nx),
        };
        let expect = [(vec![nx, ny], other), (vec![own, own], own)];
        for (k, (shape, out)) in kernels.iter().zip(expect) {
            k.validate()?;
            if k.input_shape != shape || k.output_size != out {
                return Err(Error::ShapeMismatch);
            }
        }
        Ok(Self { spoofed, kernels })
    }

    /// The uniform pair, which certifies spoofability of the XOR channel.
    pub fn uniform(spoofed: User, nx: usize, ny: usize) -> Self {
        let (own, other) = match spoofed {
            User::One => (nx, ny),
            User::Two => (ny, nx),
        };
        Self { spoofed, kernels: [Kernel::uniform(vec![nx, ny], other), Kernel::uniform(vec![own, own], own)] }
    }

    /// The same certificate for the transposed channel, where the users
    /// trade places: kernel 0 takes its inputs in the opposite order.
    pub fn transposed(&self) -> SpoofCertificate {
        let k0 = &self.kernels[0];
        let (a, b) = (k0.input_shape[0], k0.input_shape[1]);
        let t = Kernel::from_fn(vec![b, a], k0.output_size, |i, o| k0.get(&[i[1], i[0]], o));
        SpoofCertificate { spoofed: self.spoofed.other(), kernels: [t, self.kernels[1].clone()] }
    }
}

/// A strategy of one malicious user. Every variant induces a law on the
/// transmitted vector that does not depend on the honest user's message.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Attack {
    DeterministicVector { user: User, vector: Vec<usize> },
    /// Picks its own message uniformly and passes the codeword through
    /// `kernel` letter by letter.
    MemorylessKernel { user: User, kernel: Kernel },
    /// The converse's attack built from a spoofing certificate.
    SpoofPair { user: User, certificate: SpoofCertificate },
}

/// Independent per-letter rows of one mixture component.
struct Component<'a> {
    weight: f64,
    rows: Vec<&'a [f64]>,
}

impl Attack {
    pub fn user(&self) -> User {
        match self {
            Attack::DeterministicVector { user, .. }
            | Attack::MemorylessKernel { user, .. }
            | Attack::SpoofPair { user, .. } => *user,
        }
    }

    fn out_alphabet<C: Encoders + ?Sized>(&self, code: &C) -> usize {
        match self.user() {
            User::One => code.nx(),
            User::Two => code.ny(),
        }
    }

    pub fn validate<C: Encoders + ?Sized>(&self, code: &C) -> Result<()> {
        let q = self.out_alphabet(code);
        match self {
            Attack::DeterministicVector { vector, .. } => {
                if vector.len() != code.n() {
                    return Err(Error::LengthMismatch { expected: code.n(), found: vector.len() });
                }
                if let Some(&s) = vector.iter().find(|&&s| s >= q) {
                    return Err(Error::SymbolOutOfRange { symbol: s, alphabet: q });
                }
            }
            Attack::MemorylessKernel { kernel, .. } => {
                kernel.validate()?;
                if kernel.input_shape != [q] || kernel.output_size != q {
                    return Err(Error::ShapeMismatch);
                }
            }
            Attack::SpoofPair { certificate, .. } => {
                SpoofCertificate::new(certificate.spoofed, certificate.kernels.clone(), code.nx(), code.ny())?;
            }
        }
        Ok(())
    }

    /// Mixture of product laws on the attacker's vector. Deterministic
    /// vectors are handled separately.
    fn components<'a, C: Encoders + ?Sized>(&'a self, code: &'a C) -> Vec<Component<'a>> {
        let n = code.n();
        let (w1, w2) = (code.words1(), code.words2());
        let mut out = Vec::new();
        match self {
            Attack::DeterministicVector { .. } => {}
            Attack::MemorylessKernel { user, kernel } => {
                let own = if *user == User::One { w1 } else { w2 };
                for w in own {
                    let rows = (0..n).map(|t| kernel.row(w[t])).collect();
                    out.push(Component { weight: 1.0 / own.len() as f64, rows });
                }
            }
            Attack::SpoofPair { user, certificate } => {
                let [k0, k1] = &certificate.kernels;
                if *user == certificate.spoofed {
                    // Kernel 1 on a pair of the attacker's own codewords.
                    let own = if *user == User::One { w1 } else { w2 };
                    let wt = 1.0 / (own.len() * own.len()) as f64;
                    for a in own {
                        for b in own {
                            let rows = (0..n).map(|t| k1.row(k1.flat_row(&[a[t], b[t]]))).collect();
                            out.push(Component { weight: wt, rows });
                        }
                    }
                } else {
                    // Kernel 0 on (x_j, y_k).
                    let wt = 1.0 / (w1.len() * w2.len()) as f64;
                    for a in w1 {
                        for b in w2 {
                            let rows = (0..n).map(|t| k0.row(k0.flat_row(&[a[t], b[t]]))).collect();
                            out.push(Component { weight: wt, rows });
                        }
                    }
                }
            }
        }
        out
    }

    /// Exact law of the transmitted vector, merged over duplicates.
    pub fn vector_distribution<C: Encoders + ?Sized>(&self, code: &C, budget: u128) -> Result<Vec<(Vec<usize>, f64)>> {
        self.validate(code)?;
        if let Attack::DeterministicVector { vector, .. } = self {
            return Ok(vec![(vector.clone(), 1.0)]);
        }
        let comps = self.components(code);
        let q = self.out_alphabet(code);
        ensure_budget(checked_product(&[checked_pow(q, code.n()), Some(comps.len() as u128)]), budget)?;
        let mut acc: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for c in &comps {
            for_each_product_support(&c.rows, |v, p| *acc.entry(v.to_vec()).or_default() += c.weight * p);
        }
        Ok(acc.into_iter().collect())
    }

    /// One draw of the transmitted vector.
    pub fn sample<C: Encoders + ?Sized, R: Rng + ?Sized>(&self, code: &C, rng: &mut R) -> Vec<usize> {
        if let Attack::DeterministicVector { vector, .. } = self {
            return vector.clone();
        }
        let n = code.n();
        let (w1, w2) = (code.words1(), code.words2());
        let own = if self.user() == User::One { w1 } else { w2 };
        let rows: Vec<&[f64]> = match self {
            Attack::DeterministicVector { .. } => unreachable!(),
            Attack::MemorylessKernel { kernel, .. } => {
                let w = &own[rng.gen_range(0..own.len())];
                (0..n).map(|t| kernel.row(w[t])).collect()
            }
            Attack::SpoofPair { user, certificate } => {
                let [k0, k1] = &certificate.kernels;
                if *user == certificate.spoofed {
                    let a = &own[rng.gen_range(0..own.len())];
                    let b = &own[rng.gen_range(0..own.len())];
                    (0..n).map(|t| k1.row(k1.flat_row(&[a[t], b[t]]))).collect()
                } else {
                    let a = &w1[rng.gen_range(0..w1.len())];
                    let b = &w2[rng.gen_range(0..w2.len())];
                    (0..n).map(|t| k0.row(k0.flat_row(&[a[t], b[t]]))).collect()
                }
            }
        };
        rows.iter().map(|r| sample_index(r, rng)).collect()
    }
}

fn letter_product(letters: &[Vec<f64>], nz: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    for l in letters {
        let mut next = Vec::with_capacity(out.len() * nz);
        for &a in &out {
            next.extend(l.iter().map(|&b| a * b));
        }
        out = next;
    }
    out
}

fn user1_dists(code: &PlainCode, mac: &Mac, cert: &SpoofCertificate, i: usize, j: usize, k: usize) -> [Vec<f64>; 3] {
    let (xs, ys) = (&code.words1, &code.words2);
    let [q0, q1] = &cert.kernels;
    let nz = mac.nz;
    // P_{a,b,k}: user 1 sends x_a, user 2 passes (x_b, y_k) through Q0.
    let p = |a: usize, b: usize| -> Vec<f64> {
        let letters: Vec<Vec<f64>> = (0..code.n)
            .map(|t| {
                let row = q0.row(q0.flat_row(&[xs[b][t], ys[k][t]]));
                (0..nz).map(|z| (0..mac.ny).map(|y| row[y] * mac.prob(xs[a][t], y, z)).sum()).collect()
            })
            .collect();
        letter_product(&letters, nz)
    };
    let letters: Vec<Vec<f64>> = (0..code.n)
        .map(|t| {
            let row = q1.row(q1.flat_row(&[xs[i][t], xs[j][t]]));
            (0..nz).map(|z| (0..mac.nx).map(|x| row[x] * mac.prob(x, ys[k][t], z)).sum()).collect()
        })
        .collect();
    [p(i, j), p(j, i), letter_product(&letters, nz)]
}

/// Exact `P_{i,j,k}`, `P_{j,i,k}` and `Q_{i,j,k}` over `Z^n`, indexed by
/// [`crate::seq::index_of`]. For a user-2 certificate the roles of the
/// users are exchanged: `i, j` index user-2 messages and `k` user 1.
pub fn spoof_output_dists<C: Encoders + ?Sized>(
    code: &C,
    mac: &Mac,
    cert: &SpoofCertificate,
    i: usize,
    j: usize,
    k: usize,
    budget: u128,
) -> Result<[Vec<f64>; 3]> {
    let code = PlainCode::new(code.nx(), code.ny(), code.words1().to_vec(), code.words2().to_vec())?;
    check_code_mac(&code, mac)?;
    ensure_budget(checked_product(&[checked_pow(mac.nz, code.n), Some(3)]), budget)?;
    let cert = SpoofCertificate::new(cert.spoofed, cert.kernels.clone(), mac.nx, mac.ny)?;
    let (code, mac, cert) = match cert.spoofed {
        User::One => (code, mac.clone(), cert),
        User::Two => (code.swapped(), mac.transpose(), cert.transposed()),
    };
    let (ni, nk) = (code.words1.len(), code.words2.len());
    if i >= ni || j >= ni || k >= nk {
        return Err(Error::InvalidParameter("message index out of range".into()));
    }
    Ok(user1_dists(&code, &mac, &cert, i, j, k))
}

fn check_code_mac(code: &PlainCode, mac: &Mac) -> Result<()> {
    if code.nx != mac.nx || code.ny != mac.ny {
        return Err(Error::AlphabetMismatch { left: code.nx * code.ny, right: mac.nx * mac.ny });
    }
    Ok(())
}

/// Exact averages of the three scenarios in the converse.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConverseReport {
    pub spoofed: User,
    /// Error of the attack on the spoofed user's message by the other user,
    /// averaged over `(i, j, k)` with `P_{i,j,k}`.
    pub p_mal_other: f64,
    /// The same sum with `i` and `j` exchanged.
    pub p_mal_other_swapped: f64,
    /// Error when the spoofed user attacks, averaged with `Q_{i,j,k}`.
    pub p_mal_spoofed: f64,
    pub lhs: f64,
    /// `(N - 1) / (2N)` with `N` the spoofed user's message count.
    pub rhs: f64,
    pub pe_lower: f64,
    pub holds: bool,
}

/// Evaluates the converse chain for a deterministic code and decoder.
pub fn converse_bound_eval<C: Encoders + ?Sized, D: Decoder>(
    code: &C,
    decoder: &D,
    mac: &Mac,
    cert: &SpoofCertificate,
    budget: u128,
) -> Result<ConverseReport> {
    let plain = PlainCode::new(code.nx(), code.ny(), code.words1().to_vec(), code.words2().to_vec())?;
    check_code_mac(&plain, mac)?;
    let cert = SpoofCertificate::new(cert.spoofed, cert.kernels.clone(), mac.nx, mac.ny)?;
    let spoofed = cert.spoofed;
    let (plain, mac, cert) = match spoofed {
        User::One => (plain, mac.clone(), cert),
        User::Two => (plain.swapped(), mac.transpose(), cert.transposed()),
    };
    let n1 = plain.words1.len();
    if n1 < 2 {
        return Err(Error::TrivialCode);
    }
    let n2 = plain.words2.len();
    let cells = checked_product(&[checked_pow(mac.nz, plain.n), Some((n1 * n1 * n2) as u128 + 1)]);
    ensure_budget(cells, budget)?;
    let table = match spoofed {
        User::One => decision_table(decoder, mac.nz, plain.n),
        User::Two => decision_table(&Swapped(decoder), mac.nz, plain.n),
    };
    let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
    for i in 0..n1 {
        for j in 0..n1 {
            for k in 0..n2 {
                let [pijk, pjik, qijk] = user1_dists(&plain, &mac, &cert, i, j, k);
                for (z, d) in table.iter().enumerate() {
                    // phi_1 not in {i, blame 2}
                    let miss1 = |m: usize| !matches!(d, Decision::Blame2) && !matches!(d, Decision::Pair(m1, _) if *m1 == m);
                    if miss1(i) {
                        a += pijk[z];
                    }
                    if miss1(j) {
                        b += pjik[z];
                    }
                    let miss2 = !matches!(d, Decision::Blame1) && !matches!(d, Decision::Pair(_, m2) if *m2 == k);
                    if miss2 {
                        c += qijk[z];
                    }
                }
            }
        }
    }
    let norm = (n1 * n1 * n2) as f64;
    let (a, b, c) = (a / norm, b / norm, c / norm);
    let lhs = a + b + c;
    let rhs = (n1 - 1) as f64 / (2 * n1) as f64;
    Ok(ConverseReport {
        spoofed,
        p_mal_other: a,
        p_mal_other_swapped: b,
        p_mal_spoofed: c,
        lhs,
        rhs,
        pe_lower: rhs / 3.0,
        holds: lhs >= rhs - 1e-9,
    })
}

/// Largest pairwise gap among the three spoofing distributions.
pub fn max_gap(d: &[Vec<f64>; 3]) -> f64 {
    let mut g: f64 = 0.0;
    for z in 0..d[0].len() {
        g = g.max((d[0][z] - d[1][z]).abs()).max((d[0][z] - d[2][z]).abs()).max((d[1][z] - d[2][z]).abs());
    }
    g
}

/// Index of an output sequence in the vectors returned by
/// [`spoof_output_dists`].
pub fn output_index(z: &[usize], nz: usize) -> usize {
    index_of(z, nz)
}
