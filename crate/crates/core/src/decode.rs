//! Decoding with a boosted ensemble.
//!
//! Members vote through their conditional distributions: the default mixes
//! probabilities weighted by vote weight; an alternative mixes in log space.
//! Free-form answers are generated token by token; multiple-choice answers
//! are picked by lowest negative log likelihood under the mixture.

use alloc::string::ToString;
use alloc::vec::Vec;

use rand::distributions::{Distribution, WeightedIndex};

use crate::boost::Ensemble;
use crate::corpus::{Dataset, QASample, TokenId};
use crate::error::CoreError;
use crate::learner::WeakLearner;
use crate::math;
use crate::rng::rng_from_seed;
use crate::Result;

/// Probabilities below this are clamped before logs: scoring stays finite
/// even when a member puts zero mass on an observed token.
pub const PROB_FLOOR: f64 = 1e-12;

/// How member distributions combine into one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MixtureSpace {
    /// Convex combination of probabilities, weighted by vote weight.
    #[default]
    Probability,
    /// Vote-weighted average of log probabilities, renormalized.
    Logit,
}

/// Token selection strategy during generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DecodeMode {
    #[default]
    Greedy,
    /// Temperature sampling from the mixture.
    Sample,
}

/// Generation parameters.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecodeConfig {
    pub mode: DecodeMode,
    /// Sampling temperature; ignored by greedy decoding.
    pub temperature: f64,
    /// Number of tokens to generate.
    pub max_len: usize,
    pub seed: u64,
    /// Mixture space used by [`generate`]; scoring helpers use the
    /// ensemble's own flag.
    pub mixture: MixtureSpace,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        DecodeConfig {
            mode: DecodeMode::Greedy,
            temperature: 1.0,
            max_len: 2,
            seed: 0,
            mixture: MixtureSpace::Probability,
        }
    }
}

impl DecodeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_len == 0 {
            return Err(CoreError::Config("max_len must be at least 1".to_string()));
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(CoreError::Config(alloc::format!(
                "bad temperature {}",
                self.temperature
            )));
        }
        Ok(())
    }
}

/// Mixture distribution in an explicit space.
pub fn mixture_dist_in<L: WeakLearner>(
    ens: &Ensemble<L>,
    ctx: &[TokenId],
    space: MixtureSpace,
) -> Result<Vec<f64>> {
    if ens.is_empty() {
        return Err(CoreError::EmptyEnsemble);
    }
    let alpha_total = ens.alpha_total();
    let mut acc: Option<Vec<f64>> = None;
    for (member, alpha) in ens.members() {
        let dist = member.next_token_dist(ctx);
        let acc = acc.get_or_insert_with(|| alloc::vec![0.0; dist.len()]);
        if acc.len() != dist.len() {
            return Err(CoreError::ShapeMismatch);
        }
        match space {
            MixtureSpace::Probability => {
                for (a, p) in acc.iter_mut().zip(&dist) {
                    *a += alpha * p;
                }
            }
            MixtureSpace::Logit => {
                for (a, p) in acc.iter_mut().zip(&dist) {
                    *a += alpha * math::ln(p.max(PROB_FLOOR));
                }
            }
        }
    }
    let mut out = acc.expect("ensemble is nonempty");
    match space {
        MixtureSpace::Probability => {
            for p in &mut out {
                *p /= alpha_total;
            }
        }
        MixtureSpace::Logit => {
            let max = out.iter().fold(f64::NEG_INFINITY, |m, &g| m.max(g / alpha_total));
            let mut total = 0.0;
            for g in &mut out {
                *g = math::exp(*g / alpha_total - max);
                total += *g;
            }
            for g in &mut out {
                *g /= total;
            }
        }
    }
    Ok(out)
}

/// Mixture distribution in the ensemble's configured space.
pub fn mixture_dist<L: WeakLearner>(ens: &Ensemble<L>, ctx: &[TokenId]) -> Result<Vec<f64>> {
    mixture_dist_in(ens, ctx, ens.mixture)
}

/// Generates `cfg.max_len` tokens after `prompt`.
pub fn generate<L: WeakLearner>(
    ens: &Ensemble<L>,
    prompt: &[TokenId],
    cfg: &DecodeConfig,
) -> Result<Vec<TokenId>> {
    cfg.validate()?;
    let mut rng = rng_from_seed(cfg.seed);
    let mut ctx = prompt.to_vec();
    let mut out = Vec::with_capacity(cfg.max_len);
    for _ in 0..cfg.max_len {
        let dist = mixture_dist_in(ens, &ctx, cfg.mixture)?;
        let token = match cfg.mode {
            DecodeMode::Greedy => math::argmax(&dist).ok_or(CoreError::EmptyEnsemble)? as TokenId,
            DecodeMode::Sample => {
                let tempered: Vec<f64> =
                    dist.iter().map(|&p| math::powf(p.max(PROB_FLOOR), 1.0 / cfg.temperature)).collect();
                let idx = WeightedIndex::new(&tempered)
                    .map_err(|_| CoreError::BadNormalization { z: tempered.iter().sum() })?;
                idx.sample(&mut rng) as TokenId
            }
        };
        out.push(token);
        ctx.push(token);
    }
    Ok(out)
}

/// Negative log likelihood of `continuation` after `prompt` under the
/// mixture, summed over its tokens with probabilities clamped at
/// [`PROB_FLOOR`].
pub fn score_choice<L: WeakLearner>(
    ens: &Ensemble<L>,
    prompt: &[TokenId],
    continuation: &[TokenId],
) -> Result<f64> {
    let mut ctx = prompt.to_vec();
    let mut nll = 0.0;
    for &tok in continuation {
        let dist = mixture_dist(ens, &ctx)?;
        let p = dist.get(tok as usize).copied().unwrap_or(0.0);
        nll -= math::ln(p.max(PROB_FLOOR));
        ctx.push(tok);
    }
    Ok(nll)
}

/// Picks the choice with the lowest mixture NLL; ties fall to the lowest
/// index. Errors on free-form samples.
pub fn select_choice<L: WeakLearner>(ens: &Ensemble<L>, sample: &QASample) -> Result<usize> {
    let nlls = choice_nlls(ens, sample)?;
    Ok(argmin(&nlls))
}

/// NLL of every choice of a multiple-choice sample.
pub fn choice_nlls<L: WeakLearner>(ens: &Ensemble<L>, sample: &QASample) -> Result<Vec<f64>> {
    let choices = sample
        .choices
        .as_ref()
        .ok_or_else(|| CoreError::MissingChoices { id: sample.id.clone() })?;
    choices
        .iter()
        .map(|c| score_choice(ens, &sample.prompt, c))
        .collect()
}

/// Alternative choice selection: generate an answer first, then pick the
/// choice that agrees with it on the most positions. Disagreements cost the
/// floor log penalty each, so the scores are NLLs of the choices under a
/// point distribution at the generated answer.
pub fn select_choice_by_generation<L: WeakLearner>(
    ens: &Ensemble<L>,
    sample: &QASample,
    cfg: &DecodeConfig,
) -> Result<(usize, Vec<f64>)> {
    let choices = sample
        .choices
        .as_ref()
        .ok_or_else(|| CoreError::MissingChoices { id: sample.id.clone() })?;
    let longest = choices.iter().map(Vec::len).max().unwrap_or(0);
    let generated = generate(ens, &sample.prompt, &DecodeConfig { max_len: longest, ..cfg.clone() })?;
    let miss_cost = -math::ln(PROB_FLOOR);
    let nlls: Vec<f64> = choices
        .iter()
        .map(|c| {
            let misses = c
                .iter()
                .enumerate()
                .filter(|&(j, &tok)| generated.get(j) != Some(&tok))
                .count();
            misses as f64 * miss_cost
        })
        .collect();
    Ok((argmin(&nlls), nlls))
}

fn argmin(values: &[f64]) -> usize {
    let negated: Vec<f64> = values.iter().map(|v| -v).collect();
    math::argmax(&negated).unwrap_or(0)
}

/// Fraction of answer tokens the greedy mixture gets wrong, teacher-forced.
pub fn token_error_rate<L: WeakLearner>(ens: &Ensemble<L>, sample: &QASample) -> f64 {
    let mut ctx = sample.prompt.clone();
    let mut wrong = 0usize;
    for &gold in &sample.answer {
        let dist = mixture_dist(ens, &ctx).expect("nonempty ensemble");
        if math::argmax(&dist).map(|t| t as TokenId) != Some(gold) {
            wrong += 1;
        }
        ctx.push(gold);
    }
    wrong as f64 / sample.answer.len() as f64
}

/// Teacher-forced token accuracy over all answer tokens of a dataset.
pub fn eval_token_acc<L: WeakLearner>(ens: &Ensemble<L>, ds: &Dataset) -> Result<f64> {
    if ens.is_empty() {
        return Err(CoreError::EmptyEnsemble);
    }
    let mut correct = 0usize;
    let mut total = 0usize;
    for s in ds.samples() {
        let mut ctx = s.prompt.clone();
        for &gold in &s.answer {
            let dist = mixture_dist(ens, &ctx)?;
            if math::argmax(&dist).map(|t| t as TokenId) == Some(gold) {
                correct += 1;
            }
            total += 1;
            ctx.push(gold);
        }
    }
    Ok(correct as f64 / total as f64)
}

/// Fraction of samples whose choice pick matches the annotated correct
/// choice. Errors when any sample lacks choices or the annotation.
pub fn eval_option_acc<L: WeakLearner>(ens: &Ensemble<L>, ds: &Dataset) -> Result<f64> {
    if ens.is_empty() {
        return Err(CoreError::EmptyEnsemble);
    }
    let mut correct = 0usize;
    for s in ds.samples() {
        let gold = s
            .correct
            .ok_or_else(|| CoreError::MissingChoices { id: s.id.clone() })?;
        if select_choice(ens, s)? == gold {
            correct += 1;
        }
    }
    Ok(correct as f64 / ds.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::SampledBatch;

    /// Test learner with a fixed distribution regardless of context.
    #[derive(Clone)]
    struct Fixed(Vec<f64>);

    impl WeakLearner for Fixed {
        fn next_token_dist(&self, _ctx: &[TokenId]) -> Vec<f64> {
            self.0.clone()
        }
        fn fit(&mut self, _ds: &Dataset, _batch: &SampledBatch) -> Result<()> {
            Ok(())
        }
        fn capacity(&self) -> u32 {
            1
        }
        fn kind(&self) -> &'static str {
            "fixed"
        }
    }

    fn two_member(a0: f64, a1: f64, d0: Vec<f64>, d1: Vec<f64>) -> Ensemble<Fixed> {
        Ensemble::from_members(
            alloc::vec![(Fixed(d0), a0), (Fixed(d1), a1)],
            MixtureSpace::Probability,
        )
        .unwrap()
    }

    #[test]
    fn equal_votes_average_probabilities() {
        let ens = two_member(1.0, 1.0, alloc::vec![0.7, 0.3], alloc::vec![0.1, 0.9]);
        let mix = mixture_dist(&ens, &[]).unwrap();
        assert!((mix[0] - 0.4).abs() < 1e-12);
        assert!((mix[1] - 0.6).abs() < 1e-12);
    }

    #[test]
    fn votes_weight_the_average() {
        let ens = two_member(3.0, 1.0, alloc::vec![1.0, 0.0], alloc::vec![0.0, 1.0]);
        let mix = mixture_dist(&ens, &[]).unwrap();
        assert!((mix[0] - 0.75).abs() < 1e-12);
        assert!((mix[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn logit_space_mixes_log_probabilities() {
        let mut ens = two_member(1.0, 1.0, alloc::vec![0.8, 0.2], alloc::vec![0.6, 0.4]);
        ens.mixture = MixtureSpace::Logit;
        let mix = mixture_dist(&ens, &[]).unwrap();
        // geometric mean renormalized
        let g0 = math::sqrt(0.8 * 0.6);
        let g1 = math::sqrt(0.2 * 0.4);
        assert!((mix[0] - g0 / (g0 + g1)).abs() < 1e-12);
        assert!((mix[1] - g1 / (g0 + g1)).abs() < 1e-12);
        let total: f64 = mix.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn positive_scaling_of_votes_is_invariant() {
        for scale in [0.5, 3.0, 17.0] {
            let base = two_member(1.0, 2.0, alloc::vec![0.7, 0.3], alloc::vec![0.1, 0.9]);
            let scaled = two_member(scale, 2.0 * scale, alloc::vec![0.7, 0.3], alloc::vec![0.1, 0.9]);
            let a = mixture_dist(&base, &[]).unwrap();
            let b = mixture_dist(&scaled, &[]).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn greedy_generation_is_deterministic_and_ignores_temperature() {
        let ens = two_member(1.0, 1.0, alloc::vec![0.7, 0.3], alloc::vec![0.4, 0.6]);
        let cfg = DecodeConfig { max_len: 4, temperature: 9.0, ..DecodeConfig::default() };
        let out = generate(&ens, &[1], &cfg).unwrap();
        assert_eq!(out, alloc::vec![0, 0, 0, 0], "class 0 has mixture mass 0.55");
        let again = generate(&ens, &[1], &cfg).unwrap();
        assert_eq!(out, again);
    }

    #[test]
    fn sampled_generation_reproduces_per_seed() {
        let ens = two_member(1.0, 1.0, alloc::vec![0.5, 0.5], alloc::vec![0.5, 0.5]);
        let cfg = DecodeConfig {
            mode: DecodeMode::Sample,
            max_len: 16,
            seed: 5,
            ..DecodeConfig::default()
        };
        let a = generate(&ens, &[], &cfg).unwrap();
        let b = generate(&ens, &[], &cfg).unwrap();
        assert_eq!(a, b);
        let c = generate(&ens, &[], &DecodeConfig { seed: 6, ..cfg }).unwrap();
        assert_ne!(a, c, "a fair coin over 16 draws will differ across seeds");
    }

    #[test]
    fn choice_scores_add_per_token() {
        let ens = two_member(1.0, 1.0, alloc::vec![0.7, 0.3], alloc::vec![0.1, 0.9]);
        let whole = score_choice(&ens, &[], &[0, 1]).unwrap();
        let step0 = score_choice(&ens, &[], &[0]).unwrap();
        let step1 = score_choice(&ens, &[0], &[1]).unwrap();
        assert!((whole - (step0 + step1)).abs() < 1e-12);
        // mixture is [0.4, 0.6] at every position
        assert!((whole - (-math::ln(0.4) - math::ln(0.6))).abs() < 1e-12);
    }

    #[test]
    fn zero_probability_scores_at_the_floor() {
        let ens = two_member(1.0, 1.0, alloc::vec![1.0, 0.0], alloc::vec![1.0, 0.0]);
        let nll = score_choice(&ens, &[], &[1]).unwrap();
        assert!((nll + math::ln(PROB_FLOOR)).abs() < 1e-9);
    }

    #[test]
    fn select_breaks_ties_toward_lowest_index() {
        // uniform mixture: all equal-length choices score identically
        let ens = Ensemble::from_members(
            alloc::vec![(Fixed(alloc::vec![0.25; 4]), 1.0)],
            MixtureSpace::Probability,
        )
        .unwrap();
        let sample = QASample {
            id: "t".into(),
            prompt: alloc::vec![],
            answer: alloc::vec![2, 2],
            choices: Some(alloc::vec![
                alloc::vec![1, 3],
                alloc::vec![3, 1],
                alloc::vec![2, 2],
            ]),
            correct: Some(2),
            difficulty: None,
        };
        assert_eq!(select_choice(&ens, &sample).unwrap(), 0);
        let free = QASample { choices: None, correct: None, ..sample };
        assert!(matches!(
            select_choice(&ens, &free),
            Err(CoreError::MissingChoices { .. })
        ));
    }

    #[test]
    fn generation_matching_prefers_the_generated_answer() {
        let ens = two_member(1.0, 1.0, alloc::vec![0.9, 0.1], alloc::vec![0.8, 0.2]);
        let sample = QASample {
            id: "t".into(),
            prompt: alloc::vec![],
            answer: alloc::vec![0, 0],
            choices: Some(alloc::vec![alloc::vec![1, 1], alloc::vec![0, 0], alloc::vec![0, 1]]),
            correct: Some(1),
            difficulty: None,
        };
        let (picked, nlls) = select_choice_by_generation(&ens, &sample, &DecodeConfig::default()).unwrap();
        assert_eq!(picked, 1, "greedy generation emits [0, 0]");
        assert_eq!(nlls.len(), 3);
        assert!(nlls[1] == 0.0 && nlls[0] > nlls[2]);
    }
}
