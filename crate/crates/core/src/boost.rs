//! Token-level boosting of weak next-token learners.
//!
//! Each round draws a multinomial batch from the current token weights,
//! trains a fresh learner on it, measures its weighted teacher-forced error,
//! and upweights the tokens it got wrong. The vote weight of a round combines
//! its own error with a prior term from the error of an untrained model, so
//! a model family that is nearly right before training earns small votes.
//! Rounds stop early when a round stops beating the untrained baseline.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::corpus::Dataset;
use crate::decode::MixtureSpace;
use crate::error::CoreError;
use crate::learner::{
    mistake_mask, weighted_error, Learner, LearnerSpec, WeakLearner,
};
use crate::math;
use crate::rng::derive_seed;
use crate::weights::{
    init_weights, sample_grouped, update_weights, WeightMatrix, WindowGrouping,
};
use crate::Result;

/// Smallest weighted error used in vote-weight computation; smaller measured
/// errors are clamped up to keep the log finite.
pub const EPS_FLOOR: f64 = 1e-12;

/// Hard cap on vote weights, guarding the exponential weight update.
pub const ALPHA_CAP: f64 = 50.0;

/// Boosting parameters.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoostConfig {
    /// Maximum number of rounds.
    pub rounds: usize,
    /// Tokens per sampled span; 1 samples single tokens.
    pub window: usize,
    pub seed: u64,
    pub learner: LearnerSpec,
    /// How member distributions combine at decode time.
    pub mixture: MixtureSpace,
    /// Start each round from the previous round's model instead of fresh.
    pub warm_start: bool,
}

impl BoostConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(CoreError::Config("boosting needs at least 1 round".to_string()));
        }
        if self.window == 0 {
            return Err(CoreError::Config("window must be at least 1".to_string()));
        }
        self.learner.validate()
    }
}

/// What one completed round recorded.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RoundRecord {
    pub round: usize,
    /// Weighted teacher-forced error of the round's model.
    pub eps: f64,
    /// Vote weight.
    pub alpha: f64,
    /// Partition value of the weight update.
    pub z: f64,
    /// Filled by drivers that time rounds; never serialized, so stored
    /// artifacts stay byte-identical across reruns.
    #[cfg_attr(feature = "serde", serde(skip))]
    pub wall_time_ms: Option<f64>,
    /// Relative checkpoint file name, when a driver saved one.
    pub checkpoint: Option<String>,
}

/// Vote weight for a round: confidence in the round's model relative to an
/// untrained one.
///
/// `ln((1 - eps) / eps) + ln(1 / (1 - eps_pre) - 1)`, with `eps` floored at
/// [`EPS_FLOOR`] and the result capped at [`ALPHA_CAP`]. Zero exactly when
/// the round only matches the untrained baseline; positive when it beats it.
pub fn compute_alpha(eps: f64, eps_pre: f64) -> Result<f64> {
    if !(eps_pre > 0.0 && eps_pre < 1.0) {
        return Err(CoreError::DegeneratePretrainError { eps: eps_pre });
    }
    if !(eps >= 0.0 && eps < 1.0) {
        return Err(CoreError::DegenerateError { eps });
    }
    let e = eps.max(EPS_FLOOR);
    let alpha = math::ln((1.0 - e) / e) + math::ln(1.0 / (1.0 - eps_pre) - 1.0);
    Ok(alpha.min(ALPHA_CAP))
}

/// The weak-learning gate: a round earns a vote only if its weighted error
/// beats the untrained baseline.
pub fn check_weak_condition(eps: f64, eps_pre: f64) -> bool {
    eps < eps_pre
}

/// Partition value predicted from the errors alone; equals the measured one
/// whenever the vote weight came from the exact formula.
pub fn z_closed_form(eps: f64, eps_pre: f64) -> f64 {
    (1.0 - eps) / (1.0 - eps_pre)
}

/// A trained boosting ensemble: members with vote weights plus the run's
/// records.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble<L = Learner> {
    members: Vec<(L, f64)>,
    /// Weighted error of the untrained model the run was measured against.
    pub eps_pre: f64,
    pub rounds: Vec<RoundRecord>,
    /// The configuration that produced this ensemble; absent for wrappers
    /// built around a single externally trained model.
    pub config: Option<BoostConfig>,
    /// Mixture space used when decoding with this ensemble.
    pub mixture: MixtureSpace,
}

impl<L: WeakLearner> Ensemble<L> {
    /// Wraps one model as a single-member ensemble with unit vote weight.
    pub fn from_single(learner: L) -> Self {
        Ensemble {
            members: alloc::vec![(learner, 1.0)],
            eps_pre: 0.5,
            rounds: Vec::new(),
            config: None,
            mixture: MixtureSpace::Probability,
        }
    }

    /// Builds an ensemble from explicit members and vote weights.
    /// Weights must be positive and finite.
    pub fn from_members(members: Vec<(L, f64)>, mixture: MixtureSpace) -> Result<Self> {
        if members.is_empty() {
            return Err(CoreError::EmptyEnsemble);
        }
        for (_, alpha) in &members {
            if !(alpha.is_finite() && *alpha > 0.0) {
                return Err(CoreError::Config(format!("bad vote weight {alpha}")));
            }
        }
        Ok(Ensemble {
            members,
            eps_pre: 0.5,
            rounds: Vec::new(),
            config: None,
            mixture,
        })
    }

    pub fn members(&self) -> &[(L, f64)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Sum of vote weights.
    pub fn alpha_total(&self) -> f64 {
        self.members.iter().map(|(_, a)| a).sum()
    }

    /// The vote weights in round order.
    pub fn alphas(&self) -> Vec<f64> {
        self.members.iter().map(|(_, a)| *a).collect()
    }
}

impl<L: WeakLearner + Clone> Ensemble<L> {
    /// The ensemble restricted to its first `t` members, records included.
    pub fn truncate(&self, t: usize) -> Result<Ensemble<L>> {
        if t == 0 || t > self.members.len() {
            return Err(CoreError::Config(format!(
                "cannot truncate {} members to {t}",
                self.members.len()
            )));
        }
        Ok(Ensemble {
            members: self.members[..t].to_vec(),
            eps_pre: self.eps_pre,
            rounds: self.rounds.iter().take(t).cloned().collect(),
            config: self.config.clone(),
            mixture: self.mixture,
        })
    }
}

/// Outcome of one [`Booster::step`].
#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome {
    /// A round completed and joined the ensemble.
    Round,
    /// The round's model failed the weak-learning gate; boosting stopped and
    /// the model was discarded.
    GateStopped { eps: f64 },
    /// The configured round budget is exhausted (or the gate already fired).
    Done,
}

/// Step-wise boosting driver. [`run_boosting`] wraps it; drivers that need
/// per-round timing or checkpointing step it themselves.
pub struct Booster<'a> {
    ds: &'a Dataset,
    cfg: BoostConfig,
    grouping: WindowGrouping,
    weights: WeightMatrix,
    ensemble: Ensemble<Learner>,
    t: usize,
    stopped: bool,
}

impl<'a> Booster<'a> {
    /// Validates the configuration and measures the untrained baseline error.
    ///
    /// With a window above 1, every error in the run (the baseline included)
    /// is measured after expanding mistakes to whole windows, so round errors
    /// and the baseline stay on the same scale.
    pub fn new(ds: &'a Dataset, cfg: BoostConfig) -> Result<Self> {
        cfg.validate()?;
        let weights = init_weights(ds)?;
        let grouping = WindowGrouping::new(&ds.shape(), cfg.window)?;
        let h0 = cfg.learner.build(ds.vocab().len(), derive_seed(cfg.seed, "h0", 0))?;
        let (_, mask0) = weighted_error(&h0, ds, &weights)?;
        let mask0 = grouping.expand_any(&mask0)?;
        let eps_pre = weights.masked_sum(&mask0)?;
        if !(eps_pre > 0.0 && eps_pre < 1.0) {
            return Err(CoreError::DegeneratePretrainError { eps: eps_pre });
        }
        let ensemble = Ensemble {
            members: Vec::new(),
            eps_pre,
            rounds: Vec::new(),
            config: Some(cfg.clone()),
            mixture: cfg.mixture,
        };
        Ok(Booster { ds, cfg, grouping, weights, ensemble, t: 0, stopped: false })
    }

    pub fn eps_pre(&self) -> f64 {
        self.ensemble.eps_pre
    }

    /// Current token weights (mostly for inspection and tests).
    pub fn weights(&self) -> &WeightMatrix {
        &self.weights
    }

    pub fn ensemble(&self) -> &Ensemble<Learner> {
        &self.ensemble
    }

    /// The most recent round record, for drivers filling in timing or
    /// checkpoint names.
    pub fn last_round_mut(&mut self) -> Option<&mut RoundRecord> {
        self.ensemble.rounds.last_mut()
    }

    /// Runs one round.
    ///
    /// A round that fails the gate on the very first round is an error: the
    /// family cannot beat its own untrained baseline, so there is no weak
    /// learner to boost.
    pub fn step(&mut self) -> Result<StepOutcome> {
        if self.stopped || self.t >= self.cfg.rounds {
            return Ok(StepOutcome::Done);
        }
        self.t += 1;
        let t = self.t as u64;
        let batch = sample_grouped(&self.weights, &self.grouping, derive_seed(self.cfg.seed, "sample", t))?;
        let mut learner = match (self.cfg.warm_start, self.ensemble.members.last()) {
            (true, Some((prev, _))) => prev.clone(),
            _ => self
                .cfg
                .learner
                .build(self.ds.vocab().len(), derive_seed(self.cfg.seed, "learner", t))?,
        };
        learner.fit(self.ds, &batch)?;

        let mask = mistake_mask(&learner, self.ds);
        let mask = self.grouping.expand_any(&mask)?;
        let eps = self.weights.masked_sum(&mask)?;

        if !check_weak_condition(eps, self.ensemble.eps_pre) {
            self.stopped = true;
            if self.ensemble.members.is_empty() {
                return Err(CoreError::NoWeakLearner { eps_1: eps, eps_pre: self.ensemble.eps_pre });
            }
            return Ok(StepOutcome::GateStopped { eps });
        }

        let alpha = compute_alpha(eps, self.ensemble.eps_pre)?;
        let (next, z) = update_weights(&self.weights, &mask, alpha)?;
        self.weights = next;
        self.ensemble.members.push((learner, alpha));
        self.ensemble.rounds.push(RoundRecord {
            round: self.t,
            eps,
            alpha,
            z,
            wall_time_ms: None,
            checkpoint: None,
        });
        Ok(StepOutcome::Round)
    }

    /// Consumes the driver and returns the trained ensemble.
    pub fn finish(self) -> Result<Ensemble<Learner>> {
        if self.ensemble.members.is_empty() {
            return Err(CoreError::EmptyEnsemble);
        }
        Ok(self.ensemble)
    }
}

/// Full boosting run: steps until the round budget or the gate stops it.
pub fn run_boosting(ds: &Dataset, cfg: &BoostConfig) -> Result<Ensemble<Learner>> {
    let mut booster = Booster::new(ds, cfg.clone())?;
    loop {
        match booster.step()? {
            StepOutcome::Round => {}
            StepOutcome::GateStopped { .. } | StepOutcome::Done => break,
        }
    }
    booster.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{gen_synthetic, SyntheticSpec, TaskFamily};

    fn small_task(seed: u64) -> Dataset {
        gen_synthetic(&SyntheticSpec {
            family: TaskFamily::ModularAdd,
            difficulty: (0.1, 0.6),
            count: 300,
            seed,
        })
        .unwrap()
    }

    fn cfg(seed: u64) -> BoostConfig {
        BoostConfig {
            rounds: 3,
            window: 1,
            seed,
            learner: LearnerSpec::Ngram { order: 3, smoothing: 0.1 },
            mixture: MixtureSpace::Probability,
            warm_start: false,
        }
    }

    #[test]
    fn alpha_matches_hand_computed_values() {
        let a = compute_alpha(0.2, 0.5).unwrap();
        assert!((a - math::ln(4.0)).abs() < 1e-12, "ln(0.8/0.2) with zero prior term");
        let boundary = compute_alpha(0.3, 0.3).unwrap();
        assert!(boundary.abs() < 1e-12, "error equal to baseline earns zero vote");
        let a = compute_alpha(0.1, 0.3).unwrap();
        let expect = math::ln(9.0) + math::ln(1.0 / 0.7 - 1.0);
        assert!((a - expect).abs() < 1e-12);
        assert!((a - 1.349_926_716_949_016).abs() < 1e-9);
    }

    #[test]
    fn alpha_floors_and_caps() {
        // eps 0 is clamped to the floor, then capped
        let a = compute_alpha(0.0, 0.5).unwrap();
        assert_eq!(a, ALPHA_CAP.min(math::ln((1.0 - EPS_FLOOR) / EPS_FLOOR)));
        assert!(a <= ALPHA_CAP);
        assert!(compute_alpha(1.0, 0.5).is_err());
        assert!(compute_alpha(0.2, 1.0).is_err());
        assert!(compute_alpha(0.2, 0.0).is_err());
    }

    #[test]
    fn gate_is_strict_inequality() {
        assert!(check_weak_condition(0.29, 0.3));
        assert!(!check_weak_condition(0.3, 0.3));
        assert!(!check_weak_condition(0.31, 0.3));
    }

    #[test]
    fn boosting_runs_and_records_rounds() {
        let ds = small_task(1);
        let ens = run_boosting(&ds, &cfg(11)).unwrap();
        assert!(!ens.is_empty());
        assert_eq!(ens.len(), ens.rounds.len());
        assert!(ens.eps_pre > 0.0 && ens.eps_pre < 1.0);
        for (i, r) in ens.rounds.iter().enumerate() {
            assert_eq!(r.round, i + 1);
            assert!(r.eps < ens.eps_pre, "every kept round beat the gate");
            assert!(r.alpha > 0.0);
            assert!(r.z.is_finite() && r.z > 0.0);
        }
    }

    #[test]
    fn same_seed_reproduces_round_records_exactly() {
        let ds = small_task(2);
        let a = run_boosting(&ds, &cfg(7)).unwrap();
        let b = run_boosting(&ds, &cfg(7)).unwrap();
        assert_eq!(a.rounds, b.rounds);
        assert_eq!(a.alphas(), b.alphas());
        let c = run_boosting(&ds, &cfg(8)).unwrap();
        assert_ne!(a.rounds, c.rounds, "different seed must change the run");
    }

    #[test]
    fn measured_z_matches_closed_form_on_real_rounds() {
        let ds = small_task(3);
        let ens = run_boosting(&ds, &cfg(21)).unwrap();
        for r in &ens.rounds {
            let closed = z_closed_form(r.eps, ens.eps_pre);
            assert!(
                (r.z - closed).abs() < 1e-9,
                "round {}: direct {} vs closed {closed}",
                r.round,
                r.z
            );
        }
    }

    #[test]
    fn windowed_boosting_runs() {
        let ds = small_task(4);
        let mut c = cfg(31);
        c.window = 2;
        let ens = run_boosting(&ds, &c).unwrap();
        assert!(!ens.is_empty());
    }

    #[test]
    fn truncate_keeps_prefix() {
        let ds = small_task(5);
        let ens = run_boosting(&ds, &cfg(41)).unwrap();
        let one = ens.truncate(1).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one.rounds.len(), 1);
        assert_eq!(one.alphas()[0], ens.alphas()[0]);
        assert!(ens.truncate(0).is_err());
        assert!(ens.truncate(ens.len() + 1).is_err());
    }

    #[test]
    fn step_driver_matches_run_boosting() {
        let ds = small_task(6);
        let mut booster = Booster::new(&ds, cfg(51)).unwrap();
        loop {
            match booster.step().unwrap() {
                StepOutcome::Round => {}
                _ => break,
            }
        }
        let stepped = booster.finish().unwrap();
        let direct = run_boosting(&ds, &cfg(51)).unwrap();
        assert_eq!(stepped.rounds, direct.rounds);
    }
}
