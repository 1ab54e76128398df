//! Token-level sample weights for boosting.
//!
//! The weight matrix mirrors the ragged answer shape of a dataset: one row
//! per sample, one entry per answer token, entries summing to one. Rounds
//! draw a multinomial training batch from the weights, upweight the tokens
//! the round's model got wrong, and renormalize. Windows group adjacent
//! answer tokens so sampling and mistakes act on short spans instead of
//! single tokens.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use rand::distributions::{Distribution, WeightedIndex};

use crate::corpus::Dataset;
use crate::error::CoreError;
use crate::math;
use crate::rng::rng_from_seed;
use crate::Result;

/// Per-token weights over every answer position of a dataset.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WeightMatrix {
    rows: Vec<Vec<f64>>,
    /// How many updates produced this matrix; 0 right after initialization.
    pub round: usize,
}

impl WeightMatrix {
    /// Rows aligned with dataset samples.
    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Answer lengths per row.
    pub fn shape(&self) -> Vec<usize> {
        self.rows.iter().map(Vec::len).collect()
    }

    /// Total number of weighted positions.
    pub fn token_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Sum of all entries; 1 up to rounding for maintained matrices.
    pub fn total(&self) -> f64 {
        self.rows.iter().flatten().sum()
    }

    /// Sum of weights at masked positions: the weighted error of the mask.
    pub fn masked_sum(&self, mask: &MistakeMask) -> Result<f64> {
        if mask.rows.len() != self.rows.len()
            || mask.rows.iter().zip(&self.rows).any(|(m, w)| m.len() != w.len())
        {
            return Err(CoreError::ShapeMismatch);
        }
        let mut acc = 0.0;
        for (wr, mr) in self.rows.iter().zip(&mask.rows) {
            for (w, &hit) in wr.iter().zip(mr) {
                if hit {
                    acc += w;
                }
            }
        }
        Ok(acc)
    }
}

/// Boolean per-token mistake indicators, same ragged shape as the weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MistakeMask {
    rows: Vec<Vec<bool>>,
}

impl MistakeMask {
    pub fn new(rows: Vec<Vec<bool>>) -> Self {
        MistakeMask { rows }
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }

    /// Number of flagged positions.
    pub fn count(&self) -> usize {
        self.rows.iter().flatten().filter(|&&b| b).count()
    }
}

/// Multiplicity counts for one training batch, same ragged shape as the weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledBatch {
    counts: Vec<Vec<u32>>,
    /// Number of multinomial draws that produced the counts.
    pub draws: u64,
}

impl SampledBatch {
    pub fn counts(&self) -> &[Vec<u32>] {
        &self.counts
    }

    /// Sum of all multiplicities.
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().map(|&c| u64::from(c)).sum()
    }

    /// Batch containing every position exactly once: plain unweighted training.
    pub fn ones(shape: &[usize]) -> Self {
        let counts: Vec<Vec<u32>> = shape.iter().map(|&k| alloc::vec![1u32; k]).collect();
        let draws = shape.iter().map(|&k| k as u64).sum();
        SampledBatch { counts, draws }
    }

    /// Wraps explicit multiplicities; `draws` is set to their total.
    pub fn from_counts(counts: Vec<Vec<u32>>) -> Self {
        let draws = counts.iter().flatten().map(|&c| u64::from(c)).sum();
        SampledBatch { counts, draws }
    }

    /// Shape check against a dataset.
    pub fn matches(&self, ds: &Dataset) -> bool {
        self.counts.len() == ds.len()
            && self
                .counts
                .iter()
                .zip(ds.samples())
                .all(|(c, s)| c.len() == s.answer_len())
    }
}

/// Uniform weights over all answer tokens: `1/n` everywhere.
pub fn init_weights(ds: &Dataset) -> Result<WeightMatrix> {
    let n = ds.token_count();
    if n == 0 {
        return Err(CoreError::EmptyDataset);
    }
    let w = 1.0 / n as f64;
    let rows = ds.samples().iter().map(|s| alloc::vec![w; s.answer_len()]).collect();
    Ok(WeightMatrix { rows, round: 0 })
}

/// Groups each row's positions into spans of `window` adjacent tokens (the
/// last span of a row may be shorter). With `window == 1` every position is
/// its own span and grouping is the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowGrouping {
    /// Per row: (start, len) spans covering the row.
    spans: Vec<Vec<(usize, usize)>>,
    window: usize,
}

impl WindowGrouping {
    pub fn new(shape: &[usize], window: usize) -> Result<Self> {
        if window == 0 {
            return Err(CoreError::Config("window must be at least 1".to_string()));
        }
        let spans = shape
            .iter()
            .map(|&k| {
                let mut row = Vec::new();
                let mut start = 0;
                while start < k {
                    let len = window.min(k - start);
                    row.push((start, len));
                    start += len;
                }
                row
            })
            .collect();
        Ok(WindowGrouping { spans, window })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Total number of spans.
    pub fn group_count(&self) -> usize {
        self.spans.iter().map(Vec::len).sum()
    }

    /// Expands a per-token mask so a span with any flagged member is flagged
    /// on all members. Identity when `window == 1`.
    pub fn expand_any(&self, mask: &MistakeMask) -> Result<MistakeMask> {
        if mask.rows.len() != self.spans.len() {
            return Err(CoreError::ShapeMismatch);
        }
        let rows = mask
            .rows
            .iter()
            .zip(&self.spans)
            .map(|(row, spans)| {
                let mut out = alloc::vec![false; row.len()];
                for &(start, len) in spans {
                    if start + len > row.len() {
                        return Err(CoreError::ShapeMismatch);
                    }
                    let hit = row[start..start + len].iter().any(|&b| b);
                    out[start..start + len].fill(hit);
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MistakeMask { rows })
    }
}

/// Draws one multinomial batch of spans proportional to current weights.
///
/// One draw per span, with replacement; a drawn span adds one multiplicity
/// to each of its member tokens. With `window == 1` this is the classic
/// draw-`n`-tokens-from-`D` resampling.
pub fn sample_grouped(
    weights: &WeightMatrix,
    grouping: &WindowGrouping,
    seed: u64,
) -> Result<SampledBatch> {
    if grouping.spans.len() != weights.rows.len() {
        return Err(CoreError::ShapeMismatch);
    }
    // Span weight = sum of member weights; flatten in row-major span order.
    let mut span_weights = Vec::with_capacity(grouping.group_count());
    let mut span_members: Vec<(usize, usize, usize)> = Vec::with_capacity(grouping.group_count());
    for (i, (row, spans)) in weights.rows.iter().zip(&grouping.spans).enumerate() {
        for &(start, len) in spans {
            if start + len > row.len() {
                return Err(CoreError::ShapeMismatch);
            }
            span_weights.push(row[start..start + len].iter().sum::<f64>());
            span_members.push((i, start, len));
        }
    }
    let dist = WeightedIndex::new(&span_weights)
        .map_err(|_| CoreError::BadNormalization { z: span_weights.iter().sum() })?;
    let mut rng = rng_from_seed(seed);
    let mut counts: Vec<Vec<u32>> =
        weights.rows.iter().map(|r| alloc::vec![0u32; r.len()]).collect();
    let draws = span_weights.len() as u64;
    for _ in 0..draws {
        let (i, start, len) = span_members[dist.sample(&mut rng)];
        for c in &mut counts[i][start..start + len] {
            *c += 1;
        }
    }
    Ok(SampledBatch { counts, draws })
}

/// Token-level multinomial batch: `n` draws from `D` with replacement.
pub fn sample_tokens(weights: &WeightMatrix, seed: u64) -> Result<SampledBatch> {
    let grouping = WindowGrouping::new(&weights.shape(), 1)?;
    sample_grouped(weights, &grouping, seed)
}

/// Multiplies mistake positions by `e^alpha` and renormalizes.
///
/// Returns the next matrix and the partition value `Z` (the pre-normalization
/// total). `Z` decomposes as `(1 - eps) + eps * e^alpha` where `eps` is the
/// weighted error of the mask under the incoming weights.
pub fn update_weights(
    weights: &WeightMatrix,
    mask: &MistakeMask,
    alpha: f64,
) -> Result<(WeightMatrix, f64)> {
    if !alpha.is_finite() {
        return Err(CoreError::Config(format!("non-finite alpha {alpha}")));
    }
    if mask.rows.len() != weights.rows.len()
        || mask.rows.iter().zip(&weights.rows).any(|(m, w)| m.len() != w.len())
    {
        return Err(CoreError::ShapeMismatch);
    }
    let factor = math::exp(alpha);
    let mut rows: Vec<Vec<f64>> = weights
        .rows
        .iter()
        .zip(&mask.rows)
        .map(|(wr, mr)| {
            wr.iter()
                .zip(mr)
                .map(|(&w, &hit)| if hit { w * factor } else { w })
                .collect()
        })
        .collect();
    let z: f64 = rows.iter().flatten().sum();
    if !(z.is_finite() && z > 0.0) {
        return Err(CoreError::BadNormalization { z });
    }
    for w in rows.iter_mut().flatten() {
        *w /= z;
    }
    Ok((WeightMatrix { rows, round: weights.round + 1 }, z))
}
