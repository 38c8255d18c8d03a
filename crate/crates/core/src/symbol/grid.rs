use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::symbol::functions::ScalarFn;

/// Real samples of a symbol on the uniform tensor grid θ ∈ {2πr/R}^k.
///
/// This is the workhorse for everything that leaves the trigonometric-
/// polynomial world: pointwise clamps, logs and reciprocals, and the grid
/// averages standing in for Haar integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSymbol {
    k: usize,
    resolution: usize,
    values: Vec<f64>,
}

impl GridSymbol {
    pub fn new(k: usize, resolution: usize, values: Vec<f64>) -> Result<Self> {
        if k == 0 || resolution == 0 {
            return Err(Error::Invalid("grid needs k ≥ 1 and R ≥ 1".into()));
        }
        let expected = resolution.checked_pow(k as u32).ok_or_else(|| Error::Capacity {
            what: format!("grid of {resolution}^{k} points"),
            required: u64::MAX,
            limit: u64::MAX,
        })?;
        if values.len() != expected {
            return Err(Error::Invalid(format!(
                "expected {expected} grid values, got {}",
                values.len()
            )));
        }
        Ok(GridSymbol { k, resolution, values })
    }

    pub fn constant(k: usize, resolution: usize, value: f64) -> Self {
        GridSymbol {
            k,
            resolution,
            values: vec![value; resolution.pow(k as u32)],
        }
    }

    pub fn variable_count(&self) -> usize {
        self.k
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> GridSymbol {
        GridSymbol {
            k: self.k,
            resolution: self.resolution,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise min(φ, level).
    pub fn clamp_min(&self, level: f64) -> GridSymbol {
        self.map(|v| v.min(level))
    }

    /// Pointwise max(φ, floor).
    pub fn clamp_max(&self, floor: f64) -> GridSymbol {
        self.map(|v| v.max(floor))
    }

    /// Pointwise log φ; requires a strictly positive grid.
    pub fn log_map(&self) -> Result<GridSymbol> {
        let min = self.min_value();
        if min <= 0.0 {
            return Err(Error::Domain {
                op: "log_map",
                detail: format!("grid minimum {min} is not positive"),
            });
        }
        Ok(self.map(f64::ln))
    }

    /// Pointwise 1/φ; requires a strictly positive grid.
    pub fn reciprocal_map(&self) -> Result<GridSymbol> {
        let min = self.min_value();
        if min <= 0.0 {
            return Err(Error::Domain {
                op: "reciprocal_map",
                detail: format!("grid minimum {min} is not positive"),
            });
        }
        Ok(self.map(f64::recip))
    }

    /// Grid average, the discrete Haar mean.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// ∫ f(φ) dm by grid average; exact on the torus for trig-polynomial
    /// integrands of bandwidth below the resolution.
    pub fn mean_of(&self, f: &ScalarFn) -> Result<f64> {
        let mut acc = 0.0;
        for &v in &self.values {
            acc += f.apply(v)?;
        }
        Ok(acc / self.values.len() as f64)
    }

    /// Grid average of |φ|.
    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() / self.values.len() as f64
    }
}

// ---------------------------------------------------------------------------
// Tensor-grid DFT plumbing
// ---------------------------------------------------------------------------

/// In-place FFT along every axis of a k-dimensional array with equal axis
/// length `r`, stored row-major.
pub(crate) fn fft_all_axes(data: &mut [Complex64], k: usize, r: usize, fft: &Arc<dyn Fft<f64>>) {
    debug_assert_eq!(data.len(), r.pow(k as u32));
    let mut line = vec![Complex64::default(); r];
    for axis in 0..k {
        // stride between consecutive entries along `axis`
        let stride = r.pow((k - 1 - axis) as u32);
        let outer = r.pow(axis as u32);
        for o in 0..outer {
            for inner in 0..stride {
                let base = o * r * stride + inner;
                for j in 0..r {
                    line[j] = data[base + j * stride];
                }
                fft.process(&mut line);
                for j in 0..r {
                    data[base + j * stride] = line[j];
                }
            }
        }
    }
}

pub(crate) fn plan_forward(r: usize) -> Arc<dyn Fft<f64>> {
    FftPlanner::new().plan_fft_forward(r)
}

pub(crate) fn plan_inverse(r: usize) -> Arc<dyn Fft<f64>> {
    FftPlanner::new().plan_fft_inverse(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamp_and_maps_are_pointwise() {
        let g = GridSymbol::new(1, 4, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(g.clamp_min(2.5).values(), &[1.0, 2.0, 2.5, 2.5]);
        assert_eq!(g.clamp_max(2.5).values(), &[2.5, 2.5, 3.0, 4.0]);
        assert_eq!(g.reciprocal_map().unwrap().values(), &[1.0, 0.5, 1.0 / 3.0, 0.25]);
    }

    #[test]
    fn log_of_constant_e() {
        let g = GridSymbol::constant(1, 8, std::f64::consts::E);
        let lg = g.log_map().unwrap();
        for &v in lg.values() {
            assert!((v - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn reciprocal_of_constant() {
        let g = GridSymbol::constant(2, 3, 4.0);
        assert_eq!(g.reciprocal_map().unwrap().values()[0], 0.25);
    }

    #[test]
    fn domain_error_reports_offending_minimum() {
        let g = GridSymbol::new(1, 2, vec![1.0, -0.5]).unwrap();
        match g.log_map() {
            Err(Error::Domain { detail, .. }) => assert!(detail.contains("-0.5")),
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn mean_of_constant() {
        let g = GridSymbol::constant(2, 5, 7.0);
        assert_eq!(g.mean(), 7.0);
        assert_eq!(g.mean_of(&ScalarFn::Identity).unwrap(), 7.0);
        assert_eq!(g.l1_norm(), 7.0);
    }

    #[test]
    fn fft_axes_round_trip() {
        let r = 8;
        let k = 2;
        let orig: Vec<Complex64> = (0..r * r)
            .map(|i| Complex64::new(i as f64, (i * i % 7) as f64))
            .collect();
        let mut data = orig.clone();
        fft_all_axes(&mut data, k, r, &plan_forward(r));
        fft_all_axes(&mut data, k, r, &plan_inverse(r));
        let scale = (r * r) as f64;
        for (a, b) in data.iter().zip(&orig) {
            assert!((a / scale - b).norm() < 1e-12);
        }
    }
}
