use super::{Provenance, RatePoint, RegionSample};
use crate::info::{mutual_information, JointDist};
use crate::mac::{AvMac, Mac};
use crate::types::compositions;
use crate::{Error, Result};
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

/// Bounds of the pentagon `R(P_X, P_Y)`: `r1 <= i1`, `r2 <= i2`,
/// `r1 + r2 <= i12`, each minimized over the state grid on its own.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct JahnCell {
    pub px: Vec<f64>,
    pub py: Vec<f64>,
    pub i1: f64,
    pub i2: f64,
    pub i12: f64,
}

impl JahnCell {
    /// The two dominant corners of the pentagon.
    pub fn corners(&self) -> [RatePoint; 2] {
        let a = self.i1.min(self.i12);
        let b = self.i2.min(self.i12);
        [RatePoint::new(a, (self.i12 - a).min(b)), RatePoint::new((self.i12 - b).min(a), b)]
    }
}

/// Distributions on `q` symbols with entries in multiples of `1/resolution`.
pub fn simplex_grid(q: usize, resolution: usize) -> Vec<Vec<f64>> {
    compositions(q, resolution)
        .into_iter()
        .map(|c| c.into_iter().map(|v| v as f64 / resolution as f64).collect())
        .collect()
}

fn terms(mac: &Mac, px: &[f64], py: &[f64]) -> [f64; 3] {
    let mut p = Vec::with_capacity(mac.nx * mac.ny * mac.nz);
    for x in 0..mac.nx {
        for y in 0..mac.ny {
            for z in 0..mac.nz {
                p.push(px[x] * py[y] * mac.prob(x, y, z));
            }
        }
    }
    let j = JointDist { sizes: vec![mac.nx, mac.ny, mac.nz], p };
    let mi = |a: &[usize], b: &[usize], c: &[usize]| mutual_information(&j, a, b, c).unwrap_or(0.0);
    [mi(&[0], &[2], &[1]), mi(&[1], &[2], &[0]), mi(&[0, 1], &[2], &[])]
}

/// Evaluates `R(P_X, P_Y)` on a grid of input distributions, taking each
/// infimum over a grid of state distributions that always contains the
/// uniform one.
pub fn avmac_rate_region(av: &AvMac, input_resolution: usize, state_resolution: usize) -> Result<RegionSample> {
    if input_resolution == 0 || state_resolution == 0 {
        return Err(Error::GridTooCoarse);
    }
    let mut states = simplex_grid(av.ns, state_resolution);
    let uniform = vec![1.0 / av.ns as f64; av.ns];
    if !states.iter().any(|s| s.iter().zip(&uniform).all(|(a, b)| (a - b).abs() < 1e-15)) {
        states.push(uniform);
    }
    let mixed: Vec<Mac> = states.iter().map(|s| av.mix(s)).collect::<Result<_>>()?;
    let mut cells = Vec::new();
    for px in simplex_grid(av.nx, input_resolution) {
        for py in simplex_grid(av.ny, input_resolution) {
            let mut best = [f64::INFINITY; 3];
            for m in &mixed {
                let t = terms(m, &px, &py);
                for k in 0..3 {
                    best[k] = best[k].min(t[k]);
                }
            }
            cells.push(JahnCell { px: px.clone(), py, i1: best[0], i2: best[1], i12: best[2] });
        }
    }
    Ok(sample(Provenance::Jahn, input_resolution, Some(state_resolution), cells))
}

/// The ordinary multiple-access region on the same kind of grid.
pub fn mac_rate_region(mac: &Mac, input_resolution: usize) -> Result<RegionSample> {
    if input_resolution == 0 {
        return Err(Error::GridTooCoarse);
    }
    let mut cells = Vec::new();
    for px in simplex_grid(mac.nx, input_resolution) {
        for py in simplex_grid(mac.ny, input_resolution) {
            let [i1, i2, i12] = terms(mac, &px, &py);
            cells.push(JahnCell { px: px.clone(), py, i1, i2, i12 });
        }
    }
    Ok(sample(Provenance::MacCapacity, input_resolution, None, cells))
}

fn sample(provenance: Provenance, input_res: usize, state_res: Option<usize>, cells: Vec<JahnCell>) -> RegionSample {
    let mut parameters = vec![("input_resolution".to_string(), input_res as f64)];
    if let Some(s) = state_res {
        parameters.push(("state_resolution".to_string(), s as f64));
    }
    let points = cells.iter().flat_map(|c| c.corners()).collect();
    RegionSample { provenance, parameters, points, cells }
}
