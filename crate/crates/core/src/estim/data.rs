use serde::Serialize;

use crate::error::{Error, Result};

/// A sample of proportions, every value strictly inside (0, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    values: Vec<f64>,
    source: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DataSummary {
    pub n: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub variance: f64,
}

impl Dataset {
    pub fn new(values: Vec<f64>, source: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Precondition("dataset is empty".into()));
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !(**v > 0.0 && **v < 1.0)) {
            return Err(Error::DataPoint { index, value });
        }
        Ok(Self {
            values,
            source: source.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// First `k` observations as a new dataset.
    pub fn head(&self, k: usize) -> Result<Self> {
        Self::new(self.values[..k.min(self.n())].to_vec(), format!("{} (first {k})", self.source))
    }

    pub fn summary(&self) -> DataSummary {
        let n = self.n();
        let mean = self.values.iter().sum::<f64>() / n as f64;
        let variance = if n > 1 {
            self.values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        DataSummary {
            n,
            min: self.values.iter().copied().fold(f64::INFINITY, f64::min),
            max: self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean,
            variance,
        }
    }
}

/// The (x(n-1) + 1/2)/n squeeze that moves 0 and 1 inside the unit interval.
pub fn shrink(values: &[f64]) -> Vec<f64> {
    let n = values.len() as f64;
    values.iter().map(|x| (x * (n - 1.0) + 0.5) / n).collect()
}
