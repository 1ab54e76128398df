//! Classical binary AdaBoost over decision stumps.
//!
//! A reference implementation used to pin down the token-level booster: with
//! a 0.5 baseline error the token-level vote weights are exactly twice the
//! classical ones and both weight updates agree after normalization. Kept
//! deliberately small: one-dimensional inputs, labels in {-1, +1}, exhaustive
//! stump search.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::error::CoreError;
use crate::math;
use crate::Result;

/// Labeled one-dimensional binary dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryDataset {
    pub xs: Vec<f64>,
    /// Labels, each -1 or +1.
    pub ys: Vec<i8>,
}

impl BinaryDataset {
    pub fn new(xs: Vec<f64>, ys: Vec<i8>) -> Result<Self> {
        if xs.is_empty() || xs.len() != ys.len() {
            return Err(CoreError::Config("binary dataset needs matching nonempty xs/ys".to_string()));
        }
        if ys.iter().any(|&y| y != 1 && y != -1) {
            return Err(CoreError::Config("labels must be -1 or +1".to_string()));
        }
        Ok(BinaryDataset { xs, ys })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }
}

/// Threshold classifier: `polarity` if `x > threshold`, else `-polarity`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stump {
    pub threshold: f64,
    pub polarity: i8,
}

impl Stump {
    pub fn predict(&self, x: f64) -> i8 {
        if x > self.threshold {
            self.polarity
        } else {
            -self.polarity
        }
    }
}

/// Exhaustive best stump under the given example weights.
///
/// Candidate thresholds are the midpoints between sorted distinct inputs plus
/// one below and one above everything; both polarities are tried. Ties keep
/// the first candidate in that deterministic order. Returns the stump, its
/// weighted error, and its mistake indicators.
pub fn best_stump(ds: &BinaryDataset, weights: &[f64]) -> Result<(Stump, f64, Vec<bool>)> {
    if weights.len() != ds.len() {
        return Err(CoreError::ShapeMismatch);
    }
    let mut xs: Vec<f64> = ds.xs.clone();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("inputs are finite"));
    xs.dedup();
    let mut candidates = Vec::with_capacity(xs.len() + 1);
    candidates.push(xs[0] - 1.0);
    for pair in xs.windows(2) {
        candidates.push((pair[0] + pair[1]) / 2.0);
    }
    candidates.push(xs[xs.len() - 1] + 1.0);

    let mut best: Option<(Stump, f64, Vec<bool>)> = None;
    for &threshold in &candidates {
        for polarity in [1i8, -1] {
            let stump = Stump { threshold, polarity };
            let mistakes: Vec<bool> = ds
                .xs
                .iter()
                .zip(&ds.ys)
                .map(|(&x, &y)| stump.predict(x) != y)
                .collect();
            let eps: f64 = mistakes
                .iter()
                .zip(weights)
                .filter_map(|(&m, &w)| m.then_some(w))
                .sum();
            if best.as_ref().is_none_or(|(_, be, _)| eps < *be) {
                best = Some((stump, eps, mistakes));
            }
        }
    }
    Ok(best.expect("at least one candidate"))
}

/// One completed classical round.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaRound {
    pub eps: f64,
    pub alpha: f64,
    pub z: f64,
}

/// One classical AdaBoost weight update, in place.
///
/// `alpha = ln((1 - eps) / eps) / 2` with `eps` floored at
/// [`crate::boost::EPS_FLOOR`]; mistakes gain `e^alpha`, correct examples
/// lose `e^-alpha`, then weights renormalize. With no mistakes the update
/// scales everything equally, so normalized weights do not move. Errors at
/// or above one half are rejected: such a round is not a weak learner.
pub fn round_step(weights: &mut [f64], mistakes: &[bool]) -> Result<AdaRound> {
    if weights.len() != mistakes.len() {
        return Err(CoreError::ShapeMismatch);
    }
    let eps: f64 = mistakes
        .iter()
        .zip(weights.iter())
        .filter_map(|(&m, &w)| m.then_some(w))
        .sum();
    if eps >= 0.5 {
        return Err(CoreError::DegenerateError { eps });
    }
    let e = eps.max(crate::boost::EPS_FLOOR);
    let alpha = math::ln((1.0 - e) / e) / 2.0;
    for (w, &m) in weights.iter_mut().zip(mistakes) {
        *w *= math::exp(if m { alpha } else { -alpha });
    }
    let z: f64 = weights.iter().sum();
    if !(z.is_finite() && z > 0.0) {
        return Err(CoreError::BadNormalization { z });
    }
    for w in weights.iter_mut() {
        *w /= z;
    }
    Ok(AdaRound { eps, alpha, z })
}

/// Weighted-vote binary ensemble.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BinaryEnsemble {
    pub members: Vec<(Stump, f64)>,
}

impl BinaryEnsemble {
    /// Sign of the weighted vote; ties (including the empty ensemble) fall to +1.
    pub fn predict(&self, x: f64) -> i8 {
        let vote: f64 = self
            .members
            .iter()
            .map(|(s, a)| a * f64::from(s.predict(x)))
            .sum();
        if vote < 0.0 {
            -1
        } else {
            1
        }
    }

    /// Training error of the weighted vote.
    pub fn error(&self, ds: &BinaryDataset) -> f64 {
        let wrong = ds
            .xs
            .iter()
            .zip(&ds.ys)
            .filter(|&(&x, &y)| self.predict(x) != y)
            .count();
        wrong as f64 / ds.len() as f64
    }
}

/// Full classical run: stump, update, repeat. Stops early when no stump
/// beats one half.
pub fn run_adaboost(ds: &BinaryDataset, rounds: usize) -> Result<BinaryEnsemble> {
    if rounds == 0 {
        return Err(CoreError::Config("need at least 1 round".to_string()));
    }
    let n = ds.len();
    let mut weights = alloc::vec![1.0 / n as f64; n];
    let mut ens = BinaryEnsemble::default();
    for _ in 0..rounds {
        let (stump, _, mistakes) = best_stump(ds, &weights)?;
        match round_step(&mut weights, &mistakes) {
            Ok(round) => ens.members.push((stump, round.alpha)),
            Err(CoreError::DegenerateError { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    if ens.members.is_empty() {
        return Err(CoreError::EmptyEnsemble);
    }
    Ok(ens)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_points_get_a_perfect_stump() {
        let ds = BinaryDataset::new(
            alloc::vec![0.0, 1.0, 2.0],
            alloc::vec![-1, -1, 1],
        )
        .unwrap();
        let w = alloc::vec![1.0 / 3.0; 3];
        let (stump, eps, mistakes) = best_stump(&ds, &w).unwrap();
        assert_eq!(eps, 0.0);
        assert!(mistakes.iter().all(|&m| !m));
        assert_eq!(stump.predict(0.5), -1);
        assert_eq!(stump.predict(1.7), 1);

        // zero-error round: alpha comes from the floor, normalized weights
        // cannot move because there are no mistakes to collapse onto
        let mut weights = w.clone();
        let round = round_step(&mut weights, &mistakes).unwrap();
        assert!((round.alpha - 13.815_510_557_964_273).abs() < 1e-9);
        for w in &weights {
            assert!((w - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn alternating_labels_floor_at_one_quarter_error() {
        let ds = BinaryDataset::new(
            alloc::vec![0.0, 1.0, 2.0, 3.0],
            alloc::vec![1, -1, -1, 1],
        )
        .unwrap();
        let w = alloc::vec![0.25; 4];
        let (_, eps, _) = best_stump(&ds, &w).unwrap();
        assert!((eps - 0.25).abs() < 1e-12, "no stump beats one wrong of four");
        let mut weights = w.clone();
        let round = round_step(&mut weights, &Vec::from_iter((0..4).map(|i| i == 0))).unwrap();
        assert!((round.alpha - 0.5 * math::ln(3.0)).abs() < 1e-12);
        assert!((round.alpha - 0.549_306_144_334_054_8).abs() < 1e-12);
        // z = 2 sqrt(eps (1 - eps))
        assert!((round.z - 2.0 * math::sqrt(0.25 * 0.75)).abs() < 1e-12);
        let total: f64 = weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        // the mistake now carries half the mass
        assert!((weights[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn boosted_stumps_fit_the_alternating_pattern() {
        let ds = BinaryDataset::new(
            alloc::vec![0.0, 1.0, 2.0, 3.0],
            alloc::vec![1, -1, -1, 1],
        )
        .unwrap();
        let ens = run_adaboost(&ds, 6).unwrap();
        assert!(ens.members.len() > 1, "one stump cannot fit this pattern");
        assert_eq!(ens.error(&ds), 0.0, "the vote fits what no stump can");
    }

    #[test]
    fn error_at_or_above_half_is_rejected() {
        let mut w = alloc::vec![0.5, 0.5];
        assert!(matches!(
            round_step(&mut w, &[true, false]),
            Err(CoreError::DegenerateError { .. })
        ));
    }
}
