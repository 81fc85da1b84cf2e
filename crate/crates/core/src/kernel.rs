//! Conditional distributions `K(b | a1, ..., ak)` over finite alphabets.

use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;

const STOCHASTIC_TOL: f64 = 1e-9;

/// A stochastic kernel. Input tuples are flattened row-major over
/// `input_shape`; `k[row * output_size + b]` is the probability of `b`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Kernel {
    pub input_shape: Vec<usize>,
    pub output_size: usize,
    pub k: Vec<f64>,
}

impl Kernel {
    pub fn new(input_shape: Vec<usize>, output_size: usize, k: Vec<f64>) -> Result<Self> {
        let kernel = Self { input_shape, output_size, k };
        kernel.validate()?;
        Ok(kernel)
    }

    pub fn validate(&self) -> Result<()> {
        let expected = self.rows() * self.output_size;
        if self.k.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: self.k.len() });
        }
        check_rows(&self.k, self.output_size)
    }

    pub fn uniform(input_shape: Vec<usize>, output_size: usize) -> Self {
        let rows: usize = input_shape.iter().product();
        let p = 1.0 / output_size as f64;
        Self { input_shape, output_size, k: vec![p; rows * output_size] }
    }

    /// Deterministic kernel `K(b|a) = 1{b = f(a)}`.
    pub fn deterministic<F: Fn(&[usize]) -> usize>(input_shape: Vec<usize>, output_size: usize, f: F) -> Self {
        Self::from_fn(input_shape, output_size, |a, b| if f(a) == b { 1.0 } else { 0.0 })
    }

    pub fn from_fn<F: Fn(&[usize], usize) -> f64>(input_shape: Vec<usize>, output_size: usize, f: F) -> Self {
        let rows: usize = input_shape.iter().product();
        let mut k = Vec::with_capacity(rows * output_size);
        let mut a = vec![0usize; input_shape.len()];
        for r in 0..rows {
            unflatten(r, &input_shape, &mut a);
            for b in 0..output_size {
                k.push(f(&a, b));
            }
        }
        Self { input_shape, output_size, k }
    }

    pub fn identity(size: usize) -> Self {
        Self::deterministic(vec![size], size, |a| a[0])
    }

    pub fn rows(&self) -> usize {
        self.input_shape.iter().product()
    }

    pub fn flat_row(&self, inputs: &[usize]) -> usize {
        flatten(inputs, &self.input_shape)
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.k[r * self.output_size..(r + 1) * self.output_size]
    }

    pub fn get(&self, inputs: &[usize], b: usize) -> f64 {
        self.k[self.flat_row(inputs) * self.output_size + b]
    }

    pub fn at(&self, row: usize, b: usize) -> f64 {
        self.k[row * self.output_size + b]
    }

    /// Largest deviation of a row sum from one, or of an entry below zero.
    pub fn stochastic_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.rows() {
            let row = self.row(r);
            let s: f64 = row.iter().sum();
            worst = worst.max((s - 1.0).abs());
            for &v in row {
                worst = worst.max(-v);
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Kernel) -> f64 {
        self.k
            .iter()
            .zip(&other.k)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

pub(crate) fn check_rows(table: &[f64], width: usize) -> Result<()> {
    for (index, &value) in table.iter().enumerate() {
        if !(value >= 0.0) || !value.is_finite() {
            return Err(Error::NegativeEntry { index, value });
        }
    }
    if width == 0 {
        return Ok(());
    }
    for (row, chunk) in table.chunks(width).enumerate() {
        let deficit = 1.0 - chunk.iter().sum::<f64>();
        if deficit.abs() > STOCHASTIC_TOL {
            return Err(Error::NonStochastic { row, deficit });
        }
    }
    Ok(())
}

pub fn flatten(inputs: &[usize], shape: &[usize]) -> usize {
    inputs.iter().zip(shape).fold(0, |acc, (&a, &s)| acc * s + a)
}

pub fn unflatten(mut index: usize, shape: &[usize], out: &mut [usize]) {
    for (slot, &s) in out.iter_mut().zip(shape).rev() {
        *slot = index % s;
        index /= s;
    }
}

/// A probability vector over a finite alphabet.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct DistributionVector(Vec<f64>);

impl DistributionVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidParameter("empty distribution".into()));
        }
        check_rows(&probs, probs.len())?;
        Ok(Self(probs))
    }

    pub fn uniform(size: usize) -> Self {
        Self(vec![1.0 / size as f64; size])
    }

    pub fn point(size: usize, at: usize) -> Self {
        let mut p = vec![0.0; size];
        p[at] = 1.0;
        Self(p)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min_mass(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Integer symbol counts `n * p`, when every one of them is an integer.
    pub fn type_counts(&self, n: usize) -> Result<Vec<usize>> {
        let mut counts = Vec::with_capacity(self.0.len());
        for &p in &self.0 {
            let c = p * n as f64;
            let r = libm::round(c);
            if (c - r).abs() > 1e-9 {
                return Err(Error::NonIntegerType { n });
            }
            counts.push(r as usize);
        }
        if counts.iter().sum::<usize>() != n {
            return Err(Error::NonIntegerType { n });
        }
        Ok(counts)
    }
}
