use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform-bin histogram over `[lo, hi]`. The last bin is closed on the right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub values: Vec<f64>,
    /// Weight that fell outside `[lo, hi]`.
    pub outside: f64,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, n_bins: usize) -> Result<Self> {
        if n_bins < 1 {
            return Err(Error::InvalidArgument("histogram needs at least one bin".into()));
        }
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidArgument(format!("empty histogram range [{lo}, {hi}]")));
        }
        Ok(Histogram { lo, hi, values: vec![0.0; n_bins], outside: 0.0 })
    }

    pub fn n_bins(&self) -> usize {
        self.values.len()
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.n_bins() as f64
    }

    pub fn centers(&self) -> Vec<f64> {
        let w = self.bin_width();
        (0..self.n_bins()).map(|k| self.lo + (k as f64 + 0.5) * w).collect()
    }

    pub fn bin_of(&self, x: f64) -> Option<usize> {
        if !(x >= self.lo && x <= self.hi) {
            return None;
        }
        let k = ((x - self.lo) / self.bin_width()) as usize;
        Some(k.min(self.n_bins() - 1))
    }

    pub fn add(&mut self, x: f64, weight: f64) {
        match self.bin_of(x) {
            Some(k) => self.values[k] += weight,
            None => self.outside += weight,
        }
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Sum of `value * width`, i.e. the integral of a density histogram.
    pub fn integral(&self) -> f64 {
        self.total() * self.bin_width()
    }

    pub fn scale(&mut self, factor: f64) {
        for v in &mut self.values {
            *v *= factor;
        }
        self.outside *= factor;
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binning_edges() {
        let mut h = Histogram::new(0.0, 1.0, 4).unwrap();
        h.add(0.0, 1.0);
        h.add(1.0, 1.0);
        h.add(0.3, 1.0);
        h.add(1.5, 2.0);
        assert_eq!(h.values, vec![1.0, 1.0, 0.0, 1.0]);
        assert_eq!(h.outside, 2.0);
        assert_eq!(h.centers(), vec![0.125, 0.375, 0.625, 0.875]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Histogram::new(0.0, 1.0, 0).is_err());
        assert!(Histogram::new(1.0, 1.0, 3).is_err());
        assert!(Histogram::new(f64::NAN, 1.0, 3).is_err());
    }
}
