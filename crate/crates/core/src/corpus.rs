//! Datasets of question/answer token sequences.
//!
//! A sample is a tokenized prompt plus a tokenized answer, optionally with a
//! closed set of answer choices. The module covers ingestion from raw text
//! records, two synthetic task generators with a controllable hardness knob,
//! cross-validated difficulty rating, and the easy/hard and random splits the
//! weak-to-strong pipeline is built on.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::CoreError;
use crate::learner::LearnerSpec;
use crate::math;
use crate::rng::{derive_seed, rng_from_seed};
use crate::Result;

/// Index into a [`Vocab`].
pub type TokenId = u32;

/// A fixed symbol table mapping whitespace-delimited symbols to dense ids.
///
/// Ids are assigned in the order symbols were provided; [`Vocab::from_texts`]
/// sorts symbols first so a vocabulary built from raw text is independent of
/// record order.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(try_from = "Vec<String>", into = "Vec<String>")
)]
pub struct Vocab {
    symbols: Vec<String>,
    index: BTreeMap<String, TokenId>,
}

impl Vocab {
    /// Builds a vocabulary from symbols in the given order.
    ///
    /// Errors on empty input, empty symbols, symbols containing whitespace,
    /// and duplicates.
    pub fn from_symbols<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out = Vocab { symbols: Vec::new(), index: BTreeMap::new() };
        for symbol in symbols {
            let symbol = symbol.into();
            if symbol.is_empty() || symbol.chars().any(char::is_whitespace) {
                return Err(CoreError::Config(format!("bad vocabulary symbol {symbol:?}")));
            }
            let id = out.symbols.len() as TokenId;
            if out.index.insert(symbol.clone(), id).is_some() {
                return Err(CoreError::Config(format!("duplicate vocabulary symbol {symbol:?}")));
            }
            out.symbols.push(symbol);
        }
        if out.symbols.is_empty() {
            return Err(CoreError::Config("empty vocabulary".to_string()));
        }
        Ok(out)
    }

    /// Builds a vocabulary from the sorted set of symbols appearing in `texts`.
    pub fn from_texts<'a, I: IntoIterator<Item = &'a str>>(texts: I) -> Result<Self> {
        let mut set = BTreeSet::new();
        for text in texts {
            for symbol in text.split_whitespace() {
                set.insert(symbol.to_string());
            }
        }
        Vocab::from_symbols(set)
    }

    /// Number of symbols.
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    /// True when the vocabulary has no symbols (unreachable for constructed values).
    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Id of a symbol, if known.
    pub fn id(&self, symbol: &str) -> Option<TokenId> {
        self.index.get(symbol).copied()
    }

    /// Symbol of an id. Panics on out-of-range ids, which validated datasets
    /// never contain.
    pub fn symbol(&self, id: TokenId) -> &str {
        &self.symbols[id as usize]
    }

    /// All symbols in id order.
    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    /// Splits `text` on whitespace and maps each symbol to its id.
    pub fn tokenize(&self, text: &str) -> Result<Vec<TokenId>> {
        text.split_whitespace()
            .map(|s| {
                self.id(s).ok_or_else(|| CoreError::UnknownSymbol { symbol: s.to_string() })
            })
            .collect()
    }

    /// Joins token symbols with single spaces. Inverse of [`Vocab::tokenize`]
    /// up to whitespace normalization.
    pub fn detokenize(&self, tokens: &[TokenId]) -> String {
        let mut out = String::new();
        for (i, &t) in tokens.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(self.symbol(t));
        }
        out
    }

    /// Stable 64-bit fingerprint of the symbol list, used to detect mismatched
    /// checkpoints.
    pub fn fingerprint(&self) -> u64 {
        let mut h = 0xcbf2_9ce4_8422_2325u64;
        for s in &self.symbols {
            for b in s.as_bytes() {
                h ^= u64::from(*b);
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
            h ^= 0xff;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h
    }
}

impl TryFrom<Vec<String>> for Vocab {
    type Error = CoreError;
    fn try_from(symbols: Vec<String>) -> Result<Self> {
        Vocab::from_symbols(symbols)
    }
}

impl From<Vocab> for Vec<String> {
    fn from(v: Vocab) -> Vec<String> {
        v.symbols
    }
}

/// One question/answer pair in token space.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QASample {
    pub id: String,
    pub prompt: Vec<TokenId>,
    pub answer: Vec<TokenId>,
    /// Closed answer set for multiple-choice samples.
    pub choices: Option<Vec<Vec<TokenId>>>,
    /// Index of the correct choice, when known.
    pub correct: Option<usize>,
    /// Native hardness annotation in `[0, 1]`, when the source provides one.
    pub difficulty: Option<f64>,
}

impl QASample {
    /// Answer length in tokens.
    pub fn answer_len(&self) -> usize {
        self.answer.len()
    }

    /// True when the sample carries a closed choice set.
    pub fn is_multiple_choice(&self) -> bool {
        self.choices.is_some()
    }
}

/// A validated collection of samples over one vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    vocab: Vocab,
    samples: Vec<QASample>,
}

impl Dataset {
    /// Validates and wraps samples.
    ///
    /// Checks: at least one sample, unique ids, non-empty answers, all token
    /// ids inside the vocabulary, and internally consistent choice fields
    /// (a `correct` index in range whose choice equals the answer; no
    /// `correct` without `choices`).
    pub fn new(vocab: Vocab, samples: Vec<QASample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(CoreError::EmptyDataset);
        }
        let vlen = vocab.len();
        let mut seen = BTreeSet::new();
        for s in &samples {
            if !seen.insert(s.id.clone()) {
                return Err(CoreError::Config(format!("duplicate sample id {:?}", s.id)));
            }
            if s.answer.is_empty() {
                return Err(CoreError::EmptyAnswer { id: s.id.clone() });
            }
            let all_tokens = s
                .prompt
                .iter()
                .chain(&s.answer)
                .chain(s.choices.iter().flatten().flatten());
            for &t in all_tokens {
                if t as usize >= vlen {
                    return Err(CoreError::TokenOutOfRange {
                        id: s.id.clone(),
                        token: t,
                        vocab: vlen,
                    });
                }
            }
            match (&s.choices, s.correct) {
                (None, None) => {}
                (None, Some(_)) => return Err(CoreError::InvalidChoices { id: s.id.clone() }),
                (Some(choices), correct) => {
                    if choices.is_empty() || choices.iter().any(Vec::is_empty) {
                        return Err(CoreError::InvalidChoices { id: s.id.clone() });
                    }
                    if let Some(c) = correct {
                        if c >= choices.len() || choices[c] != s.answer {
                            return Err(CoreError::InvalidChoices { id: s.id.clone() });
                        }
                    }
                }
            }
        }
        Ok(Dataset { vocab, samples })
    }

    /// The vocabulary shared by all samples.
    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    /// Samples in insertion order.
    pub fn samples(&self) -> &[QASample] {
        &self.samples
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false for constructed datasets.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Total number of answer tokens across all samples.
    pub fn token_count(&self) -> usize {
        self.samples.iter().map(QASample::answer_len).sum()
    }

    /// Answer lengths per sample, the ragged shape shared with weight matrices.
    pub fn shape(&self) -> Vec<usize> {
        self.samples.iter().map(QASample::answer_len).collect()
    }

    /// New dataset holding the samples at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        let samples = indices
            .iter()
            .map(|&i| {
                self.samples
                    .get(i)
                    .cloned()
                    .ok_or_else(|| CoreError::Config(format!("subset index {i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(self.vocab.clone(), samples)
    }

    /// Concatenates two datasets over the same vocabulary. Ids must stay unique.
    pub fn concat(&self, other: &Dataset) -> Result<Dataset> {
        if self.vocab != other.vocab {
            return Err(CoreError::Config("concat over different vocabularies".to_string()));
        }
        let mut samples = self.samples.clone();
        samples.extend(other.samples.iter().cloned());
        Dataset::new(self.vocab.clone(), samples)
    }

    /// Replaces every answer via `f(sample) -> answer`, revalidating. Choice
    /// fields are dropped unless the new answer equals a choice, in which case
    /// `correct` is repointed at it.
    pub fn with_answers<F: FnMut(&QASample) -> Vec<TokenId>>(&self, mut f: F) -> Result<Dataset> {
        let samples = self
            .samples
            .iter()
            .map(|s| {
                let answer = f(s);
                let correct = s
                    .choices
                    .as_ref()
                    .and_then(|cs| cs.iter().position(|c| *c == answer));
                QASample {
                    id: s.id.clone(),
                    prompt: s.prompt.clone(),
                    answer,
                    choices: if correct.is_some() { s.choices.clone() } else { None },
                    correct,
                    difficulty: s.difficulty,
                }
            })
            .collect();
        Dataset::new(self.vocab.clone(), samples)
    }
}

/// A question/answer record in raw text form, the shape stored in data files.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RawRecord {
    pub id: String,
    pub question: String,
    pub answer: String,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub choices: Option<Vec<String>>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub correct: Option<usize>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub difficulty: Option<f64>,
}

/// Where the vocabulary for ingested records comes from.
#[derive(Debug, Clone)]
pub enum VocabMode {
    /// Collect the sorted symbol set of the records themselves.
    Build,
    /// Tokenize against a fixed vocabulary; unknown symbols are errors.
    Fixed(Vocab),
}

/// Tokenizes raw records into a validated dataset.
pub fn dataset_from_records(records: &[RawRecord], mode: &VocabMode) -> Result<Dataset> {
    if records.is_empty() {
        return Err(CoreError::EmptyDataset);
    }
    let vocab = match mode {
        VocabMode::Fixed(v) => v.clone(),
        VocabMode::Build => {
            let texts = records.iter().flat_map(|r| {
                core::iter::once(r.question.as_str())
                    .chain(core::iter::once(r.answer.as_str()))
                    .chain(r.choices.iter().flatten().map(String::as_str))
            });
            Vocab::from_texts(texts)?
        }
    };
    let samples = records
        .iter()
        .map(|r| {
            let choices = r
                .choices
                .as_ref()
                .map(|cs| cs.iter().map(|c| vocab.tokenize(c)).collect::<Result<Vec<_>>>())
                .transpose()?;
            Ok(QASample {
                id: r.id.clone(),
                prompt: vocab.tokenize(&r.question)?,
                answer: vocab.tokenize(&r.answer)?,
                choices,
                correct: r.correct,
                difficulty: r.difficulty,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(vocab, samples)
}

/// Turns a dataset back into raw records (inverse of ingestion up to
/// whitespace normalization).
pub fn records_from_dataset(ds: &Dataset) -> Vec<RawRecord> {
    ds.samples()
        .iter()
        .map(|s| RawRecord {
            id: s.id.clone(),
            question: ds.vocab().detokenize(&s.prompt),
            answer: ds.vocab().detokenize(&s.answer),
            choices: s
                .choices
                .as_ref()
                .map(|cs| cs.iter().map(|c| ds.vocab().detokenize(c)).collect()),
            correct: s.correct,
            difficulty: s.difficulty,
        })
        .collect()
}

/// Built-in synthetic task families.
///
/// Both emit 4-way multiple-choice samples with two-token answers and a
/// per-sample `difficulty` equal to the hardness draw that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TaskFamily {
    /// `add n_a n_b -> (a + b) mod 20`, answered as two digit tokens.
    /// Hardness widens and shifts the operand range, so harder samples use
    /// rarer operand pairs.
    ModularAdd,
    /// `rep` followed by a cyclic letter pattern shown twice; the answer is
    /// the next two tokens. Hardness deepens the pattern.
    GrammarPattern,
}

/// Parameters for [`gen_synthetic`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SyntheticSpec {
    pub family: TaskFamily,
    /// Per-sample hardness is drawn uniformly from this inclusive range in `[0, 1]`.
    pub difficulty: (f64, f64),
    pub count: usize,
    pub seed: u64,
}

const MODULAR_MODULUS: u64 = 20;
const MODULAR_OPERANDS: u64 = 50;
const GRAMMAR_LETTERS: u64 = 20;

fn modular_vocab() -> Vocab {
    let mut symbols: Vec<String> = (0..10).map(|d| format!("d{d}")).collect();
    symbols.extend((0..MODULAR_OPERANDS).map(|i| format!("n{i:02}")));
    symbols.push("add".to_string());
    Vocab::from_symbols(symbols).expect("static symbol list is valid")
}

fn grammar_vocab() -> Vocab {
    let mut symbols: Vec<String> = (0..GRAMMAR_LETTERS).map(|i| format!("w{i:02}")).collect();
    symbols.push("rep".to_string());
    Vocab::from_symbols(symbols).expect("static symbol list is valid")
}

fn modular_answer_tokens(r: u64) -> [TokenId; 2] {
    [(r / 10) as TokenId, (r % 10) as TokenId]
}

/// Operand range for a hardness value: low samples draw small operands, high
/// samples draw from a disjoint large range, and the ranges overlap in between.
fn modular_operand_range(d: f64) -> (u64, u64) {
    let lo = math::floor(30.0 * d) as u64;
    let hi = (9.0 + math::floor(40.0 * d)) as u64;
    (lo.min(MODULAR_OPERANDS - 1), hi.min(MODULAR_OPERANDS - 1))
}

/// Pattern depth for a hardness value; a step function from 1 to 5.
fn grammar_depth(d: f64) -> usize {
    1 + (math::floor(4.0 * d) as usize).min(4)
}

/// Draws three distinct wrong choices plus the correct one, shuffled.
fn build_choices<R: Rng>(
    rng: &mut R,
    correct: Vec<TokenId>,
    mut wrong: impl FnMut(&mut R) -> Vec<TokenId>,
) -> (Vec<Vec<TokenId>>, usize) {
    let mut choices = alloc::vec![correct];
    while choices.len() < 4 {
        let cand = wrong(rng);
        if !choices.contains(&cand) {
            choices.push(cand);
        }
    }
    // Seeded shuffle of choice order so the correct index is not constant.
    let mut order: Vec<usize> = (0..4).collect();
    order.shuffle(rng);
    let shuffled: Vec<Vec<TokenId>> = order.iter().map(|&i| choices[i].clone()).collect();
    let correct_at = order.iter().position(|&i| i == 0).expect("index 0 is in the order");
    (shuffled, correct_at)
}

/// Generates a synthetic multiple-choice dataset.
///
/// Deterministic in the spec: equal specs give byte-equal datasets. The
/// `difficulty` field of every sample is exactly its hardness draw, so sample
/// hardness is monotone in the generator's hardness parameter by construction.
pub fn gen_synthetic(spec: &SyntheticSpec) -> Result<Dataset> {
    let (lo, hi) = spec.difficulty;
    if spec.count == 0 {
        return Err(CoreError::Config("synthetic sample count must be positive".to_string()));
    }
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
        return Err(CoreError::Config(format!("bad difficulty range [{lo}, {hi}]")));
    }
    let mut rng = rng_from_seed(spec.seed);
    let vocab = match spec.family {
        TaskFamily::ModularAdd => modular_vocab(),
        TaskFamily::GrammarPattern => grammar_vocab(),
    };
    let mut samples = Vec::with_capacity(spec.count);
    for i in 0..spec.count {
        let d = if lo == hi { lo } else { rng.gen_range(lo..=hi) };
        let sample = match spec.family {
            TaskFamily::ModularAdd => {
                let (op_lo, op_hi) = modular_operand_range(d);
                let a = rng.gen_range(op_lo..=op_hi);
                let b = rng.gen_range(op_lo..=op_hi);
                let r = (a + b) % MODULAR_MODULUS;
                let add = vocab.id("add").expect("in vocab");
                let prompt = alloc::vec![
                    add,
                    vocab.id(&format!("n{a:02}")).expect("in vocab"),
                    vocab.id(&format!("n{b:02}")).expect("in vocab"),
                ];
                let answer = modular_answer_tokens(r).to_vec();
                let (choices, correct) = build_choices(&mut rng, answer.clone(), |rng| {
                    let delta = rng.gen_range(1..MODULAR_MODULUS);
                    modular_answer_tokens((r + delta) % MODULAR_MODULUS).to_vec()
                });
                QASample {
                    id: format!("mod-{i:05}"),
                    prompt,
                    answer,
                    choices: Some(choices),
                    correct: Some(correct),
                    difficulty: Some(d),
                }
            }
            TaskFamily::GrammarPattern => {
                let depth = grammar_depth(d) as u64;
                let start = rng.gen_range(0..=(GRAMMAR_LETTERS - depth));
                let letter = |k: u64| (start + (k % depth)) as TokenId;
                let rep = vocab.id("rep").expect("in vocab");
                let mut prompt = alloc::vec![rep];
                for k in 0..2 * depth {
                    prompt.push(letter(k));
                }
                let answer = alloc::vec![letter(2 * depth), letter(2 * depth + 1)];
                let (choices, correct) = build_choices(&mut rng, answer.clone(), |rng| {
                    let shift = rng.gen_range(1..GRAMMAR_LETTERS);
                    let first = (start + shift) % GRAMMAR_LETTERS;
                    alloc::vec![first as TokenId, ((first + 1) % GRAMMAR_LETTERS) as TokenId]
                });
                QASample {
                    id: format!("gram-{i:05}"),
                    prompt,
                    answer,
                    choices: Some(choices),
                    correct: Some(correct),
                    difficulty: Some(d),
                }
            }
        };
        samples.push(sample);
    }
    Dataset::new(vocab, samples)
}

/// Per-sample difficulty ratings plus the fold each sample was held out in.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DifficultyReport {
    /// One rating in `[0, 1]` per sample, in dataset order. Higher is harder.
    pub ratings: Vec<f64>,
    /// The rating fold of each sample; all zero for native ratings.
    pub folds: Vec<usize>,
}

impl DifficultyReport {
    /// Ratings taken verbatim from the samples' `difficulty` annotations.
    pub fn from_native(ds: &Dataset) -> Result<Self> {
        let ratings = ds
            .samples()
            .iter()
            .map(|s| {
                s.difficulty.ok_or_else(|| {
                    CoreError::Config(format!("sample {:?} has no native difficulty", s.id))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DifficultyReport { ratings, folds: alloc::vec![0; ds.len()] })
    }

    fn check_shape(&self, ds: &Dataset) -> Result<()> {
        if self.ratings.len() != ds.len() {
            return Err(CoreError::RatingShapeMismatch {
                ratings: self.ratings.len(),
                samples: ds.len(),
            });
        }
        Ok(())
    }
}

/// Rates each sample by how often a freshly trained weak model gets it wrong.
///
/// K-fold cross-validation: the fold partition is a seeded permutation dealt
/// round-robin, each fold's samples are rated by a learner trained on the
/// other folds, and every sample is rated exactly once. Multiple-choice
/// samples score 0 (picked correctly) or 1; free-form samples score their
/// teacher-forced token error rate. Requires `2 <= folds <=
/// ds.len()`.
pub fn rate_difficulty(
    ds: &Dataset,
    folds: usize,
    spec: &LearnerSpec,
    seed: u64,
) -> Result<DifficultyReport> {
    if folds < 2 {
        return Err(CoreError::Config(format!("need at least 2 folds, got {folds}")));
    }
    if folds > ds.len() {
        return Err(CoreError::Config(format!(
            "{folds} folds exceed {} samples",
            ds.len()
        )));
    }
    let mut order: Vec<usize> = (0..ds.len()).collect();
    order.shuffle(&mut rng_from_seed(derive_seed(seed, "rate-folds", 0)));
    let mut fold_of = alloc::vec![0usize; ds.len()];
    for (pos, &sample) in order.iter().enumerate() {
        fold_of[sample] = pos % folds;
    }

    let mut ratings = alloc::vec![0.0f64; ds.len()];
    for f in 0..folds {
        let train_idx: Vec<usize> = (0..ds.len()).filter(|&i| fold_of[i] != f).collect();
        let train = ds.subset(&train_idx)?;
        let learner = spec.fit_plain(&train, derive_seed(seed, "rate-fit", f as u64))?;
        let ens = crate::boost::Ensemble::from_single(learner);
        for i in (0..ds.len()).filter(|&i| fold_of[i] == f) {
            let s = &ds.samples()[i];
            ratings[i] = if s.is_multiple_choice() && s.correct.is_some() {
                let picked = crate::decode::select_choice(&ens, s)?;
                if Some(picked) == s.correct {
                    0.0
                } else {
                    1.0
                }
            } else {
                crate::decode::token_error_rate(&ens, s)
            };
        }
    }
    Ok(DifficultyReport { ratings, folds: fold_of })
}

/// Splits into easy (rating at or below the `quantile` threshold) and hard
/// (the rest), both in dataset order.
///
/// The threshold is the rating of the `ceil(q * m)`-th sample in rating order,
/// so ties at the threshold all land on the easy side; equal ratings
/// everywhere make everything easy and leave the hard side empty, which is an
/// error because downstream stages need hard data.
pub fn split_easy_hard(
    ds: &Dataset,
    report: &DifficultyReport,
    quantile: f64,
) -> Result<(Dataset, Dataset)> {
    report.check_shape(ds)?;
    if !(quantile > 0.0 && quantile < 1.0) {
        return Err(CoreError::Config(format!("quantile {quantile} outside (0, 1)")));
    }
    let m = ds.len();
    let cut = (math::ceil(quantile * m as f64) as usize).clamp(1, m);
    let mut sorted: Vec<f64> = report.ratings.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("ratings are finite"));
    let threshold = sorted[cut - 1];

    let easy_idx: Vec<usize> =
        (0..m).filter(|&i| report.ratings[i] <= threshold).collect();
    let hard_idx: Vec<usize> =
        (0..m).filter(|&i| report.ratings[i] > threshold).collect();
    if hard_idx.is_empty() {
        return Err(CoreError::Config(
            "easy/hard split produced an empty hard side; ratings too uniform".to_string(),
        ));
    }
    Ok((ds.subset(&easy_idx)?, ds.subset(&hard_idx)?))
}

/// Seeded permutation split into `ceil(fraction * m)` samples and the rest,
/// each side in dataset order. Both sides must end up non-empty.
pub fn random_split(ds: &Dataset, fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(CoreError::Config(format!("split fraction {fraction} outside (0, 1)")));
    }
    let m = ds.len();
    let take = (math::ceil(fraction * m as f64) as usize).clamp(1, m);
    if take == m {
        return Err(CoreError::Config(format!(
            "split fraction {fraction} leaves no samples on the other side"
        )));
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut rng_from_seed(seed));
    let mut first_idx: Vec<usize> = order[..take].to_vec();
    let mut second_idx: Vec<usize> = order[take..].to_vec();
    first_idx.sort_unstable();
    second_idx.sort_unstable();
    Ok((ds.subset(&first_idx)?, ds.subset(&second_idx)?))
}
