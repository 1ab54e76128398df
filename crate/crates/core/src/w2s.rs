//! The weak-to-strong pipeline.
//!
//! Weak experts are boosted on easy data, the ensemble pseudo-labels hard
//! questions it never saw answers for, and a stronger student trains on
//! those pseudo-labels (optionally together with the easy data). The
//! pipeline reports how much of the gap between the weak teacher and a
//! ground-truth-trained oracle the student recovers, against a baseline
//! student taught by a single un-boosted expert: the two student runs differ
//! only in where their labels came from.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::boost::{run_boosting, BoostConfig, Ensemble};
use crate::corpus::{
    rate_difficulty, random_split, split_easy_hard, Dataset, DifficultyReport, TokenId,
};
use crate::decode::{
    choice_nlls, eval_option_acc, eval_token_acc, generate, select_choice,
    select_choice_by_generation, DecodeConfig,
};
use crate::error::CoreError;
use crate::learner::{Learner, LearnerSpec, WeakLearner};
use crate::math;
use crate::rng::derive_seed;
use crate::weights::{init_weights, sample_tokens};
use crate::Result;

/// Where per-sample difficulty ratings come from.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "source", rename_all = "snake_case"))]
pub enum RatingSource {
    /// Cross-validated error of a weak model (see
    /// [`rate_difficulty`]).
    CrossVal { folds: usize },
    /// The samples' own `difficulty` annotations.
    Native,
}

/// How the corpus divides into the expert's labeled part and the part that
/// only gets pseudo-labels.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "mode", rename_all = "snake_case"))]
pub enum SplitMode {
    /// Same-distribution split: `easy_fraction` of the pool is labeled, the
    /// rest is treated as unlabeled. The held-out test set comes from the
    /// whole pool.
    Random { easy_fraction: f64 },
    /// Difficulty split at a rating quantile. The held-out test set comes
    /// from the hard side, so evaluation shares the hard distribution.
    EasyHard { quantile: f64, rating: RatingSource },
}

/// How multiple-choice pseudo-labels are picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ChoiceScoring {
    /// Score each choice's NLL under the ensemble mixture directly.
    #[default]
    Ensemble,
    /// Generate an answer first and pick the closest choice.
    Generated,
}

/// Student-side options.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StudentConfig {
    pub learner: LearnerSpec,
    /// Train students on easy ground truth in addition to pseudo-labels.
    pub include_easy: bool,
    /// Use an independently trained single expert as the baseline teacher
    /// instead of the boosting run's first round.
    pub independent_single: bool,
}

/// Held-out set sizes.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalConfig {
    /// Fraction carved out for the final test set.
    pub test_fraction: f64,
    /// Fraction of the easy side carved out to pick the round count.
    pub val_fraction: f64,
}

/// Everything one pipeline run needs besides the dataset and seed.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PipelineConfig {
    pub split: SplitMode,
    pub boost: BoostConfig,
    pub decode: DecodeConfig,
    pub student: StudentConfig,
    pub eval: EvalConfig,
    #[cfg_attr(feature = "serde", serde(default))]
    pub choice_scoring: ChoiceScoring,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.boost.validate()?;
        self.decode.validate()?;
        self.student.learner.validate()?;
        match &self.split {
            SplitMode::Random { easy_fraction } => {
                if !(*easy_fraction > 0.0 && *easy_fraction < 1.0) {
                    return Err(CoreError::Config(format!(
                        "easy_fraction {easy_fraction} outside (0, 1)"
                    )));
                }
            }
            SplitMode::EasyHard { quantile, rating } => {
                if !(*quantile > 0.0 && *quantile < 1.0) {
                    return Err(CoreError::Config(format!("quantile {quantile} outside (0, 1)")));
                }
                if let RatingSource::CrossVal { folds } = rating {
                    if *folds < 2 {
                        return Err(CoreError::Config("rating needs at least 2 folds".to_string()));
                    }
                }
            }
        }
        for (name, f) in [
            ("test_fraction", self.eval.test_fraction),
            ("val_fraction", self.eval.val_fraction),
        ] {
            if !(f > 0.0 && f < 1.0) {
                return Err(CoreError::Config(format!("{name} {f} outside (0, 1)")));
            }
        }
        if self.student.learner.capacity() < self.boost.learner.capacity() {
            return Err(CoreError::Config(format!(
                "student capacity {} below expert capacity {}",
                self.student.learner.capacity(),
                self.boost.learner.capacity()
            )));
        }
        Ok(())
    }
}

/// One pseudo-labeled question.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoEntry {
    pub id: String,
    /// The answer the ensemble assigned.
    pub answer: Vec<TokenId>,
    /// Chosen option index for multiple-choice questions.
    pub picked_choice: Option<usize>,
    /// Score of every option, for multiple-choice questions.
    pub nll_per_choice: Option<Vec<f64>>,
}

/// Pseudo-labels for a hard set, in its sample order.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoLabeledSet {
    pub entries: Vec<PseudoEntry>,
}

impl PseudoLabeledSet {
    /// The hard dataset with gold answers replaced by pseudo-labels.
    /// Entry order must match the dataset's sample order.
    pub fn apply(&self, hard: &Dataset) -> Result<Dataset> {
        if self.entries.len() != hard.len()
            || self
                .entries
                .iter()
                .zip(hard.samples())
                .any(|(e, s)| e.id != s.id)
        {
            return Err(CoreError::Config(
                "pseudo-labels do not line up with the dataset".to_string(),
            ));
        }
        let mut answers = self.entries.iter().map(|e| e.answer.clone());
        hard.with_answers(|_| answers.next().expect("length checked"))
    }
}

/// Labels every hard question with the ensemble's answer.
///
/// Ground-truth answers on `hard` are ignored; only prompts and choice lists
/// are read. Multiple-choice questions record the picked option and all
/// option scores; free-form questions get a generated answer, each sample
/// with its own derived generation seed.
pub fn generate_pseudo_labels<L: WeakLearner>(
    ens: &Ensemble<L>,
    hard: &Dataset,
    cfg: &DecodeConfig,
    scoring: ChoiceScoring,
) -> Result<PseudoLabeledSet> {
    if ens.is_empty() {
        return Err(CoreError::EmptyEnsemble);
    }
    cfg.validate()?;
    let entries = hard
        .samples()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let per_sample = DecodeConfig { seed: derive_seed(cfg.seed, "pseudo", i as u64), ..cfg.clone() };
            if let Some(choices) = &s.choices {
                let (picked, nlls) = match scoring {
                    ChoiceScoring::Ensemble => {
                        let nlls = choice_nlls(ens, s)?;
                        (select_choice(ens, s)?, nlls)
                    }
                    ChoiceScoring::Generated => select_choice_by_generation(ens, s, &per_sample)?,
                };
                Ok(PseudoEntry {
                    id: s.id.clone(),
                    answer: choices[picked].clone(),
                    picked_choice: Some(picked),
                    nll_per_choice: Some(nlls),
                })
            } else {
                let answer = generate(ens, &s.prompt, &per_sample)?;
                Ok(PseudoEntry { id: s.id.clone(), answer, picked_choice: None, nll_per_choice: None })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PseudoLabeledSet { entries })
}

/// Trains a student on pseudo-labeled hard data, optionally unioned with
/// easy ground truth.
pub fn train_student(
    spec: &LearnerSpec,
    pseudo: &PseudoLabeledSet,
    hard: &Dataset,
    easy: Option<&Dataset>,
    seed: u64,
) -> Result<Learner> {
    let pseudo_ds = pseudo.apply(hard)?;
    let train = match easy {
        Some(easy) => pseudo_ds.concat(easy)?,
        None => pseudo_ds,
    };
    spec.fit_plain(&train, seed)
}

/// Trains the ceiling model on ground-truth hard data.
pub fn train_oracle(spec: &LearnerSpec, hard: &Dataset, seed: u64) -> Result<Learner> {
    spec.fit_plain(hard, seed)
}

/// Performance-gap recovered: how much of the weak-to-oracle gap the student
/// closed. `None` when the gap underneath is (numerically) zero.
pub fn compute_pgr(weak: f64, w2s: f64, oracle: f64) -> Option<f64> {
    let gap = oracle - weak;
    if gap.abs() < 1e-12 {
        None
    } else {
        Some((w2s - weak) / gap)
    }
}

/// Accuracies and gap recovery of one pipeline run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct W2SReport {
    pub seed: u64,
    /// Rounds kept after validation selection.
    pub rounds_used: usize,
    /// Untrained-model error the boosting run measured its gate against.
    pub eps_pre: f64,
    /// The single weak expert (boosting round 1, or an independent model).
    pub weak_single_acc: f64,
    /// The validation-selected boosted ensemble.
    pub weak_ensemble_acc: f64,
    /// Student taught by the ensemble's pseudo-labels.
    pub student_ours_acc: f64,
    /// Student taught by the single expert's pseudo-labels.
    pub student_baseline_acc: f64,
    /// Strong model trained on ground-truth hard data.
    pub oracle_acc: f64,
    /// Untrained strong model.
    pub pretrained_student_acc: f64,
    /// Strong model trained directly on the expert's easy ground truth.
    pub student_on_easy_acc: f64,
    /// Gap recovery of the ensemble-taught student over the ensemble teacher.
    pub pgr_ours: Option<f64>,
    /// Gap recovery of the baseline student over the single-expert teacher.
    pub pgr_baseline: Option<f64>,
}

/// Test-set accuracy: option accuracy when every sample is annotated
/// multiple-choice, token accuracy otherwise.
fn eval_metric<L: WeakLearner>(ens: &Ensemble<L>, ds: &Dataset) -> Result<f64> {
    let all_mc = ds
        .samples()
        .iter()
        .all(|s| s.is_multiple_choice() && s.correct.is_some());
    if all_mc {
        eval_option_acc(ens, ds)
    } else {
        eval_token_acc(ens, ds)
    }
}

fn eval_learner(learner: &Learner, ds: &Dataset) -> Result<f64> {
    eval_metric(&Ensemble::from_single(learner.clone()), ds)
}

/// Picks the round prefix with the best validation score; earliest wins ties.
fn select_rounds(ens: &Ensemble<Learner>, val: &Dataset) -> Result<usize> {
    let mut best_t = 1;
    let mut best = f64::NEG_INFINITY;
    for t in 1..=ens.len() {
        let score = eval_metric(&ens.truncate(t)?, val)?;
        if score > best {
            best = score;
            best_t = t;
        }
    }
    Ok(best_t)
}

fn ids_of(ds: &Dataset) -> BTreeSet<String> {
    ds.samples().iter().map(|s| s.id.clone()).collect()
}

/// Runs the whole pipeline once.
///
/// Stages: carve the test set, split easy from hard, boost weak experts on
/// easy training data, pick the round count on an easy validation slice,
/// pseudo-label the hard training data with both the ensemble and the single
/// expert, train the two students (identical but for the label source), the
/// oracle, and the reference models, then evaluate everything on the
/// untouched test set. Test samples never enter any training set; the run
/// fails rather than leak them.
pub fn run_pipeline(ds: &Dataset, cfg: &PipelineConfig, seed: u64) -> Result<W2SReport> {
    cfg.validate()?;

    // test carve and easy/hard split
    let (test, easy_all, hard_train) = match &cfg.split {
        SplitMode::Random { easy_fraction } => {
            let (test, pool) = random_split(ds, cfg.eval.test_fraction, derive_seed(seed, "test", 0))?;
            let (easy, hard) = random_split(&pool, *easy_fraction, derive_seed(seed, "easy", 0))?;
            (test, easy, hard)
        }
        SplitMode::EasyHard { quantile, rating } => {
            let report = match rating {
                RatingSource::Native => DifficultyReport::from_native(ds)?,
                RatingSource::CrossVal { folds } => rate_difficulty(
                    ds,
                    *folds,
                    &cfg.boost.learner,
                    derive_seed(seed, "rate", 0),
                )?,
            };
            let (easy, hard_all) = split_easy_hard(ds, &report, *quantile)?;
            if hard_all.len() < 2 {
                return Err(CoreError::Config(
                    "hard side too small to carve a test set".to_string(),
                ));
            }
            let (test, hard_train) =
                random_split(&hard_all, cfg.eval.test_fraction, derive_seed(seed, "test", 0))?;
            (test, easy, hard_train)
        }
    };

    // validation slice for round selection
    let (val, easy_train) = random_split(&easy_all, cfg.eval.val_fraction, derive_seed(seed, "val", 0))?;

    // boost weak experts on easy training data
    let boost_cfg = BoostConfig { seed: derive_seed(seed, "boost", 0), ..cfg.boost.clone() };
    let ensemble = run_boosting(&easy_train, &boost_cfg)?;
    let rounds_used = select_rounds(&ensemble, &val)?;
    let ens_star = ensemble.truncate(rounds_used)?;

    // the single weak expert the baseline pipeline uses
    let single = if cfg.student.independent_single {
        let uniform = init_weights(&easy_train)?;
        let batch = sample_tokens(&uniform, derive_seed(seed, "single", 0))?;
        let mut learner = cfg
            .boost
            .learner
            .build(easy_train.vocab().len(), derive_seed(seed, "single", 1))?;
        learner.fit(&easy_train, &batch)?;
        Ensemble::from_single(learner)
    } else {
        ensemble.truncate(1)?
    };

    // pseudo-label hard training data from both teachers, same decode seed
    let decode_cfg = DecodeConfig { seed: derive_seed(seed, "pseudo", 0), ..cfg.decode.clone() };
    let pseudo_ours = generate_pseudo_labels(&ens_star, &hard_train, &decode_cfg, cfg.choice_scoring)?;
    let pseudo_base = generate_pseudo_labels(&single, &hard_train, &decode_cfg, cfg.choice_scoring)?;

    // students differ only in the label source
    let easy_for_students = cfg.student.include_easy.then_some(&easy_all);
    let student_seed = derive_seed(seed, "student", 0);
    let student_ours = train_student(
        &cfg.student.learner,
        &pseudo_ours,
        &hard_train,
        easy_for_students,
        student_seed,
    )?;
    let student_base = train_student(
        &cfg.student.learner,
        &pseudo_base,
        &hard_train,
        easy_for_students,
        student_seed,
    )?;

    // reference models
    let oracle = train_oracle(&cfg.student.learner, &hard_train, derive_seed(seed, "oracle", 0))?;
    let student_on_easy =
        cfg.student.learner.fit_plain(&easy_all, derive_seed(seed, "on-easy", 0))?;
    let pretrained =
        cfg.student.learner.build(ds.vocab().len(), derive_seed(seed, "pretrained", 0))?;

    // the test set must be untouched by every training stage
    let test_ids = ids_of(&test);
    for trained in [&easy_train, &val, &hard_train, &easy_all] {
        if !test_ids.is_disjoint(&ids_of(trained)) {
            return Err(CoreError::Config("test samples leaked into training".to_string()));
        }
    }

    let weak_single_acc = eval_metric(&single, &test)?;
    let weak_ensemble_acc = eval_metric(&ens_star, &test)?;
    let student_ours_acc = eval_learner(&student_ours, &test)?;
    let student_baseline_acc = eval_learner(&student_base, &test)?;
    let oracle_acc = eval_learner(&oracle, &test)?;
    let pretrained_student_acc = eval_learner(&pretrained, &test)?;
    let student_on_easy_acc = eval_learner(&student_on_easy, &test)?;

    Ok(W2SReport {
        seed,
        rounds_used,
        eps_pre: ensemble.eps_pre,
        weak_single_acc,
        weak_ensemble_acc,
        student_ours_acc,
        student_baseline_acc,
        oracle_acc,
        pretrained_student_acc,
        student_on_easy_acc,
        pgr_ours: compute_pgr(weak_ensemble_acc, student_ours_acc, oracle_acc),
        pgr_baseline: compute_pgr(weak_single_acc, student_baseline_acc, oracle_acc),
    })
}

/// One sweep run: a weak/strong pair at one seed.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepRun {
    pub weak: String,
    pub strong: String,
    pub report: W2SReport,
}

/// Mean and standard error over seeds.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeanSem {
    pub mean: f64,
    pub sem: f64,
}

/// Aggregates for one weak/strong pair.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepSummaryRow {
    pub weak: String,
    pub strong: String,
    pub seeds: usize,
    pub weak_single: MeanSem,
    pub weak_ensemble: MeanSem,
    pub student_baseline: MeanSem,
    pub student_ours: MeanSem,
    pub oracle: MeanSem,
    /// Absent when any seed's gap recovery was undefined.
    pub pgr_baseline: Option<MeanSem>,
    pub pgr_ours: Option<MeanSem>,
}

/// All runs plus per-pair aggregates.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepReport {
    pub runs: Vec<SweepRun>,
    pub summary: Vec<SweepSummaryRow>,
}

/// Sample mean and standard error (`sd / sqrt(k)`, zero for single values).
pub fn mean_sem(values: &[f64]) -> MeanSem {
    let k = values.len();
    if k == 0 {
        return MeanSem::default();
    }
    let mean = values.iter().sum::<f64>() / k as f64;
    if k == 1 {
        return MeanSem { mean, sem: 0.0 };
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1) as f64;
    MeanSem { mean, sem: math::sqrt(var) / math::sqrt(k as f64) }
}

fn optional_mean_sem(values: &[Option<f64>]) -> Option<MeanSem> {
    let present: Option<Vec<f64>> = values.iter().copied().collect();
    present.map(|v| mean_sem(&v))
}

/// Runs the pipeline for every weak/strong pair at every seed.
pub fn sweep(
    ds: &Dataset,
    pairs: &[(LearnerSpec, LearnerSpec)],
    base: &PipelineConfig,
    seeds: &[u64],
) -> Result<SweepReport> {
    if pairs.is_empty() || seeds.is_empty() {
        return Err(CoreError::Config("sweep needs at least one pair and one seed".to_string()));
    }
    let mut runs = Vec::with_capacity(pairs.len() * seeds.len());
    let mut summary = Vec::with_capacity(pairs.len());
    for (weak, strong) in pairs {
        let mut cfg = base.clone();
        cfg.boost.learner = weak.clone();
        cfg.student.learner = strong.clone();
        cfg.validate()?;
        let mut reports = Vec::with_capacity(seeds.len());
        for &seed in seeds {
            let report = run_pipeline(ds, &cfg, seed)?;
            reports.push(report.clone());
            runs.push(SweepRun { weak: weak.label(), strong: strong.label(), report });
        }
        let pull = |f: fn(&W2SReport) -> f64| -> Vec<f64> { reports.iter().map(f).collect() };
        summary.push(SweepSummaryRow {
            weak: weak.label(),
            strong: strong.label(),
            seeds: seeds.len(),
            weak_single: mean_sem(&pull(|r| r.weak_single_acc)),
            weak_ensemble: mean_sem(&pull(|r| r.weak_ensemble_acc)),
            student_baseline: mean_sem(&pull(|r| r.student_baseline_acc)),
            student_ours: mean_sem(&pull(|r| r.student_ours_acc)),
            oracle: mean_sem(&pull(|r| r.oracle_acc)),
            pgr_baseline: optional_mean_sem(
                &reports.iter().map(|r| r.pgr_baseline).collect::<Vec<_>>(),
            ),
            pgr_ours: optional_mean_sem(&reports.iter().map(|r| r.pgr_ours).collect::<Vec<_>>()),
        });
    }
    Ok(SweepReport { runs, summary })
}
