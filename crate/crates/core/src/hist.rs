//! Histogram support for heavy-tailed quantities.
//!
//! Ages span seconds to months, so the default binning is logarithmic with a
//! fixed number of bins per decade. Linear binning is kept for the small-value
//! insets. Zero values (legal for clamped ages) get a dedicated `[0, 1)` bin
//! in log mode.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HistError {
    #[error("bad bin spec: {0}")]
    BadBinSpec(&'static str),
}

/// How values map to bins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BinSpec {
    /// Logarithmic bins with edges at `10^(k / bins_per_decade)`.
    Log { bins_per_decade: u32 },
    /// Linear bins `[k*width, (k+1)*width)`.
    Linear { width: f64 },
}

impl Default for BinSpec {
    fn default() -> Self {
        BinSpec::Log { bins_per_decade: 20 }
    }
}

impl BinSpec {
    fn validate(&self) -> Result<(), HistError> {
        match *self {
            BinSpec::Log { bins_per_decade: 0 } => {
                Err(HistError::BadBinSpec("bins_per_decade must be positive"))
            }
            BinSpec::Linear { width } if !(width.is_finite() && width > 0.0) => {
                Err(HistError::BadBinSpec("width must be positive and finite"))
            }
            _ => Ok(()),
        }
    }

    // Sentinel index for the zero bin in log mode.
    const ZERO_BIN: i64 = i64::MIN;

    fn index_of(&self, v: u64) -> i64 {
        match *self {
            BinSpec::Log { bins_per_decade } => {
                if v == 0 {
                    return Self::ZERO_BIN;
                }
                let n = f64::from(bins_per_decade);
                let mut idx = (n * (v as f64).log10()).floor() as i64;
                // log10 rounding can land a boundary value one bin off.
                let (lo, hi) = self.log_edges(idx, n);
                if (v as f64) < lo {
                    idx -= 1;
                } else if (v as f64) >= hi {
                    idx += 1;
                }
                idx
            }
            BinSpec::Linear { width } => {
                let mut idx = ((v as f64) / width).floor() as i64;
                let lo = idx as f64 * width;
                let hi = (idx + 1) as f64 * width;
                if (v as f64) < lo {
                    idx -= 1;
                } else if (v as f64) >= hi {
                    idx += 1;
                }
                idx
            }
        }
    }

    fn log_edges(&self, idx: i64, bins_per_decade: f64) -> (f64, f64) {
        let lo = 10f64.powf(idx as f64 / bins_per_decade);
        let hi = 10f64.powf((idx + 1) as f64 / bins_per_decade);
        (lo, hi)
    }

    fn edges_of(&self, idx: i64) -> (f64, f64) {
        match *self {
            BinSpec::Log { bins_per_decade } => {
                if idx == Self::ZERO_BIN {
                    (0.0, 1.0)
                } else {
                    self.log_edges(idx, f64::from(bins_per_decade))
                }
            }
            BinSpec::Linear { width } => (idx as f64 * width, (idx + 1) as f64 * width),
        }
    }
}

/// One occupied bin: `[lo, hi)` with its count and normalized density.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: u64,
    pub density: f64,
}

/// Sparse histogram over non-negative integer values.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bins: Vec<HistogramBin>,
    pub total: u64,
}

impl Histogram {
    /// Sum of `density * bin_width` over all bins; 1 for a non-empty histogram.
    pub fn density_integral(&self) -> f64 {
        self.bins.iter().map(|b| b.density * (b.hi - b.lo)).sum()
    }
}

/// Mergeable accumulation state, keyed by bin index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HistAccumulator {
    counts: BTreeMap<i64, u64>,
    total: u64,
}

impl HistAccumulator {
    pub fn add(&mut self, spec: &BinSpec, v: u64) {
        *self.counts.entry(spec.index_of(v)).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn merge(&mut self, other: HistAccumulator) {
        for (idx, c) in other.counts {
            *self.counts.entry(idx).or_insert(0) += c;
        }
        self.total += other.total;
    }

    pub fn finish(&self, spec: &BinSpec) -> Histogram {
        let total = self.total;
        let bins = self
            .counts
            .iter()
            .map(|(&idx, &count)| {
                let (lo, hi) = spec.edges_of(idx);
                let density = if total == 0 {
                    0.0
                } else {
                    count as f64 / (total as f64 * (hi - lo))
                };
                HistogramBin { lo, hi, count, density }
            })
            .collect();
        Histogram { bins, total }
    }
}

/// Build a histogram of `values` under `spec`.
pub fn histogram(values: impl IntoIterator<Item = u64>, spec: &BinSpec) -> Result<Histogram, HistError> {
    spec.validate()?;
    let mut acc = HistAccumulator::default();
    for v in values {
        acc.add(spec, v);
    }
    Ok(acc.finish(spec))
}

/// Fixed-range linear histogram; out-of-range values clamp to the edge bins.
///
/// Used for burstiness scores, which live in `[-1, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeHistogram {
    lo: f64,
    hi: f64,
    counts: Vec<u64>,
    total: u64,
}

impl RangeHistogram {
    pub fn new(lo: f64, hi: f64, n_bins: usize) -> Result<Self, HistError> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) || n_bins == 0 {
            return Err(HistError::BadBinSpec("range histogram needs lo < hi and bins > 0"));
        }
        Ok(Self { lo, hi, counts: vec![0; n_bins], total: 0 })
    }

    pub fn add(&mut self, v: f64) {
        let n = self.counts.len();
        let pos = (v - self.lo) / (self.hi - self.lo) * n as f64;
        let idx = (pos.floor() as i64).clamp(0, n as i64 - 1) as usize;
        self.counts[idx] += 1;
        self.total += 1;
    }

    pub fn merge(&mut self, other: &RangeHistogram) {
        debug_assert_eq!(self.counts.len(), other.counts.len());
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// `(lo, hi, count)` rows for every bin, empty ones included.
    pub fn bins(&self) -> Vec<(f64, f64, u64)> {
        let n = self.counts.len();
        let width = (self.hi - self.lo) / n as f64;
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &c)| (self.lo + i as f64 * width, self.lo + (i + 1) as f64 * width, c))
            .collect()
    }
}
