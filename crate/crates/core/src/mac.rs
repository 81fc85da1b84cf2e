//! Two-input discrete memoryless channels and their arbitrarily varying
//! (state-indexed) relatives.

use crate::kernel::check_rows;
use crate::{Error, Result};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum User {
    One,
    Two,
}

impl User {
    pub fn other(self) -> User {
        match self {
            User::One => User::Two,
            User::Two => User::One,
        }
    }

    pub fn from_number(n: u8) -> Result<User> {
        match n {
            1 => Ok(User::One),
            2 => Ok(User::Two),
            _ => Err(Error::InvalidParameter(format!("user must be 1 or 2, got {n}"))),
        }
    }

    pub fn number(self) -> u8 {
        match self {
            User::One => 1,
            User::Two => 2,
        }
    }
}

/// A channel `W(z | x, y)` stored as `w[(x * ny + y) * nz + z]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Mac {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub w: Vec<f64>,
    pub label: String,
}

impl Mac {
    pub fn new(label: impl Into<String>, nx: usize, ny: usize, nz: usize, w: Vec<f64>) -> Result<Self> {
        if nx == 0 || ny == 0 || nz == 0 {
            return Err(Error::InvalidParameter("alphabet sizes must be positive".into()));
        }
        let expected = nx * ny * nz;
        if w.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: w.len() });
        }
        check_rows(&w, nz)?;
        Ok(Self { nx, ny, nz, w, label: label.into() })
    }

    /// Builds from a nested `[x][y][z]` table.
    pub fn from_nested(label: impl Into<String>, table: &[Vec<Vec<f64>>]) -> Result<Self> {
        let nx = table.len();
        let ny = table.first().map_or(0, |r| r.len());
        let nz = table.first().and_then(|r| r.first()).map_or(0, |r| r.len());
        let mut w = Vec::with_capacity(nx * ny * nz);
        for row in table {
            if row.len() != ny {
                return Err(Error::DimensionMismatch { expected: ny, found: row.len() });
            }
            for cell in row {
                if cell.len() != nz {
                    return Err(Error::DimensionMismatch { expected: nz, found: cell.len() });
                }
                w.extend_from_slice(cell);
            }
        }
        Self::new(label, nx, ny, nz, w)
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        (0..self.nx)
            .map(|x| (0..self.ny).map(|y| self.row(x, y).to_vec()).collect())
            .collect()
    }

    pub fn from_fn<F: Fn(usize, usize, usize) -> f64>(
        label: impl Into<String>,
        nx: usize,
        ny: usize,
        nz: usize,
        f: F,
    ) -> Result<Self> {
        let mut w = Vec::with_capacity(nx * ny * nz);
        for x in 0..nx {
            for y in 0..ny {
                for z in 0..nz {
                    w.push(f(x, y, z));
                }
            }
        }
        Self::new(label, nx, ny, nz, w)
    }

    /// Deterministic channel `z = f(x, y)`.
    pub fn deterministic<F: Fn(usize, usize) -> usize>(
        label: impl Into<String>,
        nx: usize,
        ny: usize,
        nz: usize,
        f: F,
    ) -> Result<Self> {
        Self::from_fn(label, nx, ny, nz, |x, y, z| if f(x, y) == z { 1.0 } else { 0.0 })
    }

    /// The noiseless channel `Z = (X, Y)`, output index `x * ny + y`.
    pub fn identity(nx: usize, ny: usize) -> Self {
        Self::deterministic("identity", nx, ny, nx * ny, |x, y| x * ny + y).expect("valid")
    }

    #[inline]
    pub fn prob(&self, x: usize, y: usize, z: usize) -> f64 {
        self.w[(x * self.ny + y) * self.nz + z]
    }

    #[inline]
    pub fn row(&self, x: usize, y: usize) -> &[f64] {
        let start = (x * self.ny + y) * self.nz;
        &self.w[start..start + self.nz]
    }

    /// Exchanges the roles of the two users: `W'(z | y, x) = W(z | x, y)`.
    pub fn transpose(&self) -> Mac {
        let mut w = Vec::with_capacity(self.w.len());
        for y in 0..self.ny {
            for x in 0..self.nx {
                w.extend_from_slice(self.row(x, y));
            }
        }
        Mac { nx: self.ny, ny: self.nx, nz: self.nz, w, label: format!("{}^T", self.label) }
    }

    pub fn max_row_deviation(&self) -> f64 {
        self.w
            .chunks(self.nz)
            .map(|r| (r.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    fn check_symbols(&self, x: &[usize], y: &[usize], n: usize) -> Result<()> {
        for (seq, q) in [(x, self.nx), (y, self.ny)] {
            if seq.len() != n {
                return Err(Error::LengthMismatch { expected: n, found: seq.len() });
            }
            if let Some(&s) = seq.iter().find(|&&s| s >= q) {
                return Err(Error::SymbolOutOfRange { symbol: s, alphabet: q });
            }
        }
        Ok(())
    }

    /// Letterwise output rows for an input pair.
    pub fn output_rows<'a>(&'a self, x: &[usize], y: &[usize]) -> Result<Vec<&'a [f64]>> {
        self.check_symbols(x, y, x.len())?;
        Ok(x.iter().zip(y).map(|(&a, &b)| self.row(a, b)).collect())
    }
}

/// `W^n(z | x, y) = prod_t W(z_t | x_t, y_t)`.
pub fn product_channel_prob(mac: &Mac, x: &[usize], y: &[usize], z: &[usize]) -> Result<f64> {
    let n = x.len();
    mac.check_symbols(x, y, n)?;
    if z.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: z.len() });
    }
    if let Some(&s) = z.iter().find(|&&s| s >= mac.nz) {
        return Err(Error::SymbolOutOfRange { symbol: s, alphabet: mac.nz });
    }
    Ok((0..n).map(|t| mac.prob(x[t], y[t], z[t])).product())
}

/// Names accepted by [`builtin_channel`].
pub const BUILTIN_NAMES: &[&str] = &["erasure", "xor", "parallel_ex3", "not_xor", "identity"];

/// Built-in example channels.
///
/// - `erasure`: binary inputs, `Z = X + Y` over `{0, 1, 2}`.
/// - `xor`: `Z = X xor Y`.
/// - `parallel_ex3`: `(Z1, Z2) = (X1 + Y1, X2 xor Y2)`, with input index
///   `2 * x1 + x2` and output index `2 * z1 + z2`.
/// - `not_xor`: `Z = 1 - (X xor Y)`.
/// - `identity`: binary inputs, `Z = (X, Y)`.
pub fn builtin_channel(name: &str) -> Result<Mac> {
    match name {
        "erasure" => Mac::deterministic("erasure", 2, 2, 3, |x, y| x + y),
        "xor" => Mac::deterministic("xor", 2, 2, 2, |x, y| x ^ y),
        "not_xor" => Mac::deterministic("not_xor", 2, 2, 2, |x, y| 1 - (x ^ y)),
        "identity" => Ok(Mac::identity(2, 2)),
        "parallel_ex3" => Mac::deterministic("parallel_ex3", 4, 4, 6, |x, y| {
            let (x1, x2) = (x >> 1, x & 1);
            let (y1, y2) = (y >> 1, y & 1);
            2 * (x1 + y1) + (x2 ^ y2)
        }),
        other => Err(Error::UnknownChannel(other.to_string())),
    }
}

/// Names accepted by [`builtin_avmac`].
pub const BUILTIN_AVMAC_NAMES: &[&str] = &["xor_notxor"];

/// Built-in arbitrarily varying channels; `xor_notxor` has the two states
/// `Z = X xor Y` and `Z = 1 - (X xor Y)`. Any built-in [`Mac`] name gives the
/// single-state wrapper.
pub fn builtin_avmac(name: &str) -> Result<AvMac> {
    match name {
        "xor_notxor" => AvMac::from_states("xor_notxor", &[builtin_channel("xor")?, builtin_channel("not_xor")?]),
        other => Ok(AvMac::from_mac(&builtin_channel(other)?)),
    }
}

/// A state-indexed family `W(z | x, y, s)` stored as `w[((x * ny + y) * ns + s) * nz + z]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AvMac {
    pub nx: usize,
    pub ny: usize,
    pub ns: usize,
    pub nz: usize,
    pub w: Vec<f64>,
    pub label: String,
}

impl AvMac {
    pub fn new(label: impl Into<String>, nx: usize, ny: usize, ns: usize, nz: usize, w: Vec<f64>) -> Result<Self> {
        if nx == 0 || ny == 0 || ns == 0 || nz == 0 {
            return Err(Error::InvalidParameter("alphabet sizes must be positive".into()));
        }
        let expected = nx * ny * ns * nz;
        if w.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: w.len() });
        }
        check_rows(&w, nz)?;
        Ok(Self { nx, ny, ns, nz, w, label: label.into() })
    }

    pub fn from_states(label: impl Into<String>, states: &[Mac]) -> Result<Self> {
        let first = states.first().ok_or(Error::InvalidParameter("no states".into()))?;
        let (nx, ny, nz) = (first.nx, first.ny, first.nz);
        for m in states {
            if (m.nx, m.ny, m.nz) != (nx, ny, nz) {
                return Err(Error::AlphabetMismatch { left: nx * ny * nz, right: m.nx * m.ny * m.nz });
            }
        }
        let ns = states.len();
        let mut w = Vec::with_capacity(nx * ny * ns * nz);
        for x in 0..nx {
            for y in 0..ny {
                for m in states {
                    w.extend_from_slice(m.row(x, y));
                }
            }
        }
        Self::new(label, nx, ny, ns, nz, w)
    }

    pub fn from_mac(mac: &Mac) -> Self {
        Self { nx: mac.nx, ny: mac.ny, ns: 1, nz: mac.nz, w: mac.w.clone(), label: mac.label.clone() }
    }

    #[inline]
    pub fn prob(&self, x: usize, y: usize, s: usize, z: usize) -> f64 {
        self.w[((x * self.ny + y) * self.ns + s) * self.nz + z]
    }

    pub fn state(&self, s: usize) -> Mac {
        let mut w = Vec::with_capacity(self.nx * self.ny * self.nz);
        for x in 0..self.nx {
            for y in 0..self.ny {
                for z in 0..self.nz {
                    w.push(self.prob(x, y, s, z));
                }
            }
        }
        Mac { nx: self.nx, ny: self.ny, nz: self.nz, w, label: format!("{}[{s}]", self.label) }
    }

    /// The channel averaged over a state distribution.
    pub fn mix(&self, ps: &[f64]) -> Result<Mac> {
        if ps.len() != self.ns {
            return Err(Error::DimensionMismatch { expected: self.ns, found: ps.len() });
        }
        let mut w = vec![0.0; self.nx * self.ny * self.nz];
        for x in 0..self.nx {
            for y in 0..self.ny {
                for (s, &p) in ps.iter().enumerate() {
                    for z in 0..self.nz {
                        w[(x * self.ny + y) * self.nz + z] += p * self.prob(x, y, s, z);
                    }
                }
            }
        }
        Mac::new(self.label.clone(), self.nx, self.ny, self.nz, w)
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<Vec<f64>>>> {
        (0..self.nx)
            .map(|x| {
                (0..self.ny)
                    .map(|y| (0..self.ns).map(|s| (0..self.nz).map(|z| self.prob(x, y, s, z)).collect()).collect())
                    .collect()
            })
            .collect()
    }

    pub fn from_nested(label: impl Into<String>, table: &[Vec<Vec<Vec<f64>>>]) -> Result<Self> {
        let nx = table.len();
        let ny = table.first().map_or(0, |r| r.len());
        let ns = table.first().and_then(|r| r.first()).map_or(0, |r| r.len());
        let nz = table
            .first()
            .and_then(|r| r.first())
            .and_then(|r| r.first())
            .map_or(0, |r| r.len());
        let mut w = Vec::with_capacity(nx * ny * ns * nz);
        for a in table {
            if a.len() != ny {
                return Err(Error::DimensionMismatch { expected: ny, found: a.len() });
            }
            for b in a {
                if b.len() != ns {
                    return Err(Error::DimensionMismatch { expected: ns, found: b.len() });
                }
                for c in b {
                    if c.len() != nz {
                        return Err(Error::DimensionMismatch { expected: nz, found: c.len() });
                    }
                    w.extend_from_slice(c);
                }
            }
        }
        Self::new(label, nx, ny, ns, nz, w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::Odometer;

    #[test]
    fn builtins_match_examples() {
        let e = builtin_channel("erasure").unwrap();
        assert_eq!(e.prob(1, 1, 2), 1.0);
        let x = builtin_channel("xor").unwrap();
        assert_eq!(x.prob(1, 1, 0), 1.0);
        let p = builtin_channel("parallel_ex3").unwrap();
        assert_eq!((p.nx, p.ny, p.nz), (4, 4, 6));
        // inputs (1,1) and (1,1): z = (2, 0)
        assert_eq!(p.prob(3, 3, 4), 1.0);
        assert!(matches!(builtin_channel("nope"), Err(Error::UnknownChannel(_))));
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            Mac::new("bad", 1, 1, 2, vec![0.5, 0.4]),
            Err(Error::NonStochastic { row: 0, .. })
        ));
        assert!(matches!(
            Mac::new("bad", 1, 1, 2, vec![1.2, -0.2]),
            Err(Error::NegativeEntry { .. })
        ));
        assert!(matches!(Mac::new("bad", 1, 1, 2, vec![1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn product_probabilities() {
        let xor = builtin_channel("xor").unwrap();
        assert_eq!(product_channel_prob(&xor, &[0, 1], &[1, 1], &[1, 0]).unwrap(), 1.0);
        assert_eq!(product_channel_prob(&xor, &[0, 1], &[1, 1], &[0, 0]).unwrap(), 0.0);
        let noisy = Mac::from_fn("half", 2, 2, 2, |_, _, _| 0.5).unwrap();
        assert_eq!(product_channel_prob(&noisy, &[0, 1, 1], &[1, 0, 1], &[0, 0, 1]).unwrap(), 0.125);
        assert!(matches!(
            product_channel_prob(&xor, &[0, 1], &[1], &[0, 0]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            product_channel_prob(&xor, &[0, 2], &[1, 1], &[0, 0]),
            Err(Error::SymbolOutOfRange { symbol: 2, alphabet: 2 })
        ));
    }

    #[test]
    fn product_sums_to_one_exhaustively() {
        let mac = Mac::from_fn("skew", 2, 2, 3, |x, y, z| [0.2, 0.3, 0.5][(x + y + z) % 3]).unwrap();
        let x = [0, 1, 1, 0, 1];
        let y = [1, 1, 0, 0, 1];
        let mut od = Odometer::new(3, 5);
        let mut total = 0.0;
        while od.advance() {
            total += product_channel_prob(&mac, &x, &y, od.current()).unwrap();
        }
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn transpose_swaps_users() {
        let mac = Mac::deterministic("d", 2, 3, 6, |x, y| x * 3 + y).unwrap();
        let t = mac.transpose();
        assert_eq!((t.nx, t.ny), (3, 2));
        for x in 0..2 {
            for y in 0..3 {
                assert_eq!(mac.row(x, y), t.row(y, x));
            }
        }
        assert_eq!(t.transpose().w, mac.w);
    }

    #[test]
    fn avmac_states_and_mix() {
        let av = builtin_avmac("xor_notxor").unwrap();
        assert_eq!(av.ns, 2);
        assert_eq!(av.state(0).w, builtin_channel("xor").unwrap().w);
        let mixed = av.mix(&[0.5, 0.5]).unwrap();
        assert!(mixed.w.iter().all(|&p| p == 0.5));
        let nested = av.to_nested();
        assert_eq!(AvMac::from_nested("xor_notxor", &nested).unwrap(), av);
    }
}
