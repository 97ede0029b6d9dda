//! Proposal corruption: emulates the documented failure modes of a
//! silhouette-trained joint detector — alias confusion between symmetric
//! legs, missed detections, localization jitter, and spurious peaks.

use nalgebra::Vector2;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oja::{Proposal, ProposalSet};
use crate::schema::SkeletonSchema;

use super::GroundTruthFrame;

/// Corruption model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorruptionConfig {
    /// Probability that a leg joint's confidence ranking is swapped with
    /// its alias location.
    pub alias_swap_prob: f64,
    /// Probability that the true-location proposal is omitted.
    pub dropout_prob: f64,
    /// Standard deviation of localization jitter, pixels.
    pub jitter_sigma: f64,
    /// Expected number of spurious proposals per joint.
    pub spurious_rate: f64,
    /// Standard deviation of log-confidence perturbation.
    pub confidence_noise: f64,
}

impl Default for CorruptionConfig {
    fn default() -> Self {
        CorruptionConfig {
            alias_swap_prob: 0.2,
            dropout_prob: 0.05,
            jitter_sigma: 3.0,
            spurious_rate: 0.5,
            confidence_noise: 0.3,
        }
    }
}

impl CorruptionConfig {
    /// A config that reproduces ground truth exactly: one proposal per
    /// joint at the true location with confidence 1.
    pub fn none() -> Self {
        CorruptionConfig {
            alias_swap_prob: 0.0,
            dropout_prob: 0.0,
            jitter_sigma: 0.0,
            spurious_rate: 0.0,
            confidence_noise: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [
            ("alias_swap_prob", self.alias_swap_prob),
            ("dropout_prob", self.dropout_prob),
        ];
        for (name, v) in probs {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!(
                    "{name} is {v}, must lie in [0, 1]"
                )));
            }
        }
        for (name, v) in [
            ("jitter_sigma", self.jitter_sigma),
            ("spurious_rate", self.spurious_rate),
            ("confidence_noise", self.confidence_noise),
        ] {
            if v < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "{name} is {v}, must be nonnegative"
                )));
            }
        }
        Ok(())
    }
}

/// Base confidences before log-normal noise: the detector reads peak
/// heights, so the true mode sits near 1 and the alias mode near the
/// multimodal blend ratio 0.25/0.75.
const CONF_HIGH: f64 = 1.0;
const CONF_LOW: f64 = 1.0 / 3.0;
const CONF_SPURIOUS: f64 = 0.12;
const CONF_MIN: f64 = 1e-4;

/// Corrupts a ground-truth frame into a proposal set.
///
/// Per joint: the true location (jittered) gets a high confidence. With
/// `alias_swap_prob`, a leg joint's confidence ranking is swapped with its
/// alias joint's location — the alias location takes the high confidence
/// and the true location keeps a low one. With `dropout_prob` the
/// true-location proposal is omitted entirely. Poisson-many spurious
/// proposals are scattered uniformly with low confidence.
pub fn corrupt_proposals(
    truth: &GroundTruthFrame,
    schema: &SkeletonSchema,
    cfg: &CorruptionConfig,
    rng: &mut impl Rng,
) -> Result<ProposalSet> {
    cfg.validate()?;
    let (w, h) = (truth.camera.model.width, truth.camera.model.height);
    let j = schema.joint_count();
    assert_eq!(truth.joints2d.len(), j);

    let mut per_joint = Vec::with_capacity(j);
    for joint in 0..j {
        let mut proposals: Vec<Proposal> = Vec::new();
        let true_pos = jitter(rng, &truth.joints2d[joint], cfg.jitter_sigma);

        let alias = schema.alias_of(joint);
        let swapped = alias.is_some() && rng.gen_bool(cfg.alias_swap_prob);
        let dropped = rng.gen_bool(cfg.dropout_prob);

        if swapped {
            let alias_pos = jitter(rng, &truth.joints2d[alias.unwrap()], cfg.jitter_sigma);
            proposals.push(Proposal {
                position: alias_pos,
                confidence: noisy_confidence(rng, CONF_HIGH, cfg.confidence_noise),
            });
            if !dropped {
                proposals.push(Proposal {
                    position: true_pos,
                    confidence: noisy_confidence(rng, CONF_LOW, cfg.confidence_noise),
                });
            }
        } else if !dropped {
            proposals.push(Proposal {
                position: true_pos,
                confidence: noisy_confidence(rng, CONF_HIGH, cfg.confidence_noise),
            });
        }

        if cfg.spurious_rate > 0.0 {
            let count = Poisson::new(cfg.spurious_rate)
                .expect("validated rate")
                .sample(rng) as usize;
            for _ in 0..count {
                proposals.push(Proposal {
                    position: [
                        rng.gen_range(0.0..w as f64),
                        rng.gen_range(0.0..h as f64),
                    ],
                    confidence: noisy_confidence(rng, CONF_SPURIOUS, cfg.confidence_noise),
                });
            }
        }
        // descending confidence so the max-confidence baseline is index 0
        proposals.sort_by(|a, b| {
            b.confidence
                .partial_cmp(&a.confidence)
                .unwrap()
                .then(a.position[0].partial_cmp(&b.position[0]).unwrap())
                .then(a.position[1].partial_cmp(&b.position[1]).unwrap())
        });
        per_joint.push(proposals);
    }
    Ok(ProposalSet::new(per_joint))
}

fn jitter(rng: &mut impl Rng, p: &Vector2<f64>, sigma: f64) -> [f64; 2] {
    if sigma == 0.0 {
        return [p.x, p.y];
    }
    let dx: f64 = rng.sample(rand_distr::StandardNormal);
    let dy: f64 = rng.sample(rand_distr::StandardNormal);
    [p.x + sigma * dx, p.y + sigma * dy]
}

fn noisy_confidence(rng: &mut impl Rng, base: f64, noise: f64) -> f64 {
    if noise == 0.0 {
        return base;
    }
    let z: f64 = rng.sample(rand_distr::StandardNormal);
    (base * (noise * z).exp()).clamp(CONF_MIN, 1.0)
}
