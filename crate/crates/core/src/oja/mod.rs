//! Optimal joint assignment: selecting one proposal (or null) per joint per
//! frame by minimizing a prior + confidence + temporal + coverage energy.

mod brute;
mod energy;
mod ga;
mod prior;
mod qp;

pub use brute::brute_force;
pub use energy::{
    l_conf, l_cov_bone, l_cov_sil, l_prior, l_temp, total_energy, EnergyModel, EnergyTerms,
};
pub use ga::{solve_ga, GaConfig};
pub use prior::{fit_prior, AnchorKind, NormalizationSpec, ScaleKind, SkeletonPrior};
pub use qp::{build_qp, solve_qp, QpProblem};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imageops::{dilate, medial_axis_capped, MatPointSet};
use crate::synth::Silhouette;

/// Null cost stamped on proposal sets that were not built through an
/// [`OjaConfig`]; pipelines override it with `lambda_null`.
pub const DEFAULT_NULL_COST: f64 = 8.0;

/// One 2D joint location candidate with detector confidence in (0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Proposal {
    pub position: [f64; 2],
    pub confidence: f64,
}

/// Per-frame jagged set of proposals, one list per joint, plus the fixed
/// cost paid for selecting the null proposal.
#[derive(Debug, Clone, PartialEq)]
pub struct ProposalSet {
    pub proposals: Vec<Vec<Proposal>>,
    pub null_cost: f64,
}

impl ProposalSet {
    pub fn new(proposals: Vec<Vec<Proposal>>) -> Self {
        ProposalSet {
            proposals,
            null_cost: DEFAULT_NULL_COST,
        }
    }

    pub fn with_null_cost(mut self, null_cost: f64) -> Self {
        self.null_cost = null_cost;
        self
    }

    pub fn joint_count(&self) -> usize {
        self.proposals.len()
    }

    pub fn validate(&self) -> Result<()> {
        for (joint, ps) in self.proposals.iter().enumerate() {
            for p in ps {
                if !(p.confidence > 0.0 && p.confidence <= 1.0) {
                    return Err(Error::InvalidConfidence {
                        joint,
                        value: p.confidence,
                    });
                }
            }
        }
        Ok(())
    }

    /// Highest-confidence proposal per joint; null where a joint has none.
    pub fn max_confidence_assignment(&self) -> Assignment {
        Assignment(
            self.proposals
                .iter()
                .map(|ps| {
                    ps.iter()
                        .enumerate()
                        .max_by(|a, b| {
                            a.1.confidence
                                .partial_cmp(&b.1.confidence)
                                .unwrap()
                                .then(b.0.cmp(&a.0))
                        })
                        .map(|(i, _)| i)
                        .unwrap_or(0) // empty list: index 0 == null slot
                })
                .collect(),
        )
    }
}

/// Selection of one proposal index per joint; the index `N_j` (one past the
/// last proposal) denotes the null proposal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Assignment(pub Vec<usize>);

impl Assignment {
    pub fn all_null(x: &ProposalSet) -> Self {
        Assignment(x.proposals.iter().map(|ps| ps.len()).collect())
    }

    #[inline]
    pub fn is_null(&self, x: &ProposalSet, joint: usize) -> bool {
        self.0[joint] >= x.proposals[joint].len()
    }

    #[inline]
    pub fn selected<'x>(&self, x: &'x ProposalSet, joint: usize) -> Option<&'x Proposal> {
        x.proposals[joint].get(self.0[joint])
    }

    pub fn null_mask(&self, x: &ProposalSet) -> Vec<bool> {
        (0..self.0.len()).map(|j| self.is_null(x, j)).collect()
    }

    pub fn validate(&self, x: &ProposalSet) -> Result<()> {
        if self.0.len() != x.joint_count() {
            return Err(Error::InvalidArgument(format!(
                "assignment has {} joints, proposal set has {}",
                self.0.len(),
                x.joint_count()
            )));
        }
        for (j, &sel) in self.0.iter().enumerate() {
            if sel > x.proposals[j].len() {
                return Err(Error::InvalidArgument(format!(
                    "joint {j} selects index {sel} but has only {} proposals (+ null)",
                    x.proposals[j].len()
                )));
            }
        }
        Ok(())
    }
}

/// Everything the energy needs to know about one frame.
#[derive(Debug, Clone)]
pub struct OjaFrame {
    pub proposals: ProposalSet,
    /// Medial-axis samples of the frame's silhouette, if coverage terms are
    /// in play.
    pub mat: Option<MatPointSet>,
    /// Dilated silhouette for the bone coverage term.
    pub dilated: Option<Silhouette>,
    /// Prior translation anchor: the silhouette centroid (or zero for bare
    /// instances).
    pub anchor: [f64; 2],
    /// Prior scale: sqrt of the silhouette area (or 1 for bare instances).
    pub scale: f64,
}

impl OjaFrame {
    /// Frame with no silhouette context; priors operate on raw pixel
    /// coordinates and coverage terms are inactive.
    pub fn bare(proposals: ProposalSet) -> Self {
        OjaFrame {
            proposals,
            mat: None,
            dilated: None,
            anchor: [0.0, 0.0],
            scale: 1.0,
        }
    }

    /// Frame with silhouette-derived coverage data.
    pub fn with_silhouette(
        proposals: ProposalSet,
        silhouette: &Silhouette,
        cfg: &OjaConfig,
    ) -> Result<Self> {
        let area = silhouette.area();
        if area == 0 {
            return Err(Error::EmptySilhouette(
                "OJA frame built from an empty silhouette".into(),
            ));
        }
        let mat = medial_axis_capped(silhouette, cfg.mat_cap)?;
        let dilated = dilate(silhouette, cfg.dilation_radius);
        let anchor = silhouette.centroid().expect("nonempty silhouette");
        Ok(OjaFrame {
            proposals,
            mat: Some(mat),
            dilated: Some(dilated),
            anchor,
            scale: (area as f64).sqrt(),
        })
    }
}

/// A sequence of frames plus the kinematic tree the bone coverage term
/// walks.
#[derive(Debug, Clone)]
pub struct OjaSequence {
    pub frames: Vec<OjaFrame>,
    pub bones: Vec<(usize, usize)>,
}

impl OjaSequence {
    pub fn joint_count(&self) -> usize {
        self.frames.first().map_or(0, |f| f.proposals.joint_count())
    }

    pub fn validate(&self) -> Result<()> {
        let j = self.joint_count();
        for (t, frame) in self.frames.iter().enumerate() {
            if frame.proposals.joint_count() != j {
                return Err(Error::InvalidArgument(format!(
                    "frame {t} has {} joints, expected {j}",
                    frame.proposals.joint_count()
                )));
            }
            frame.proposals.validate()?;
        }
        for &(a, b) in &self.bones {
            if a >= j || b >= j {
                return Err(Error::InvalidArgument(format!(
                    "bone ({a},{b}) out of range for {j} joints"
                )));
            }
        }
        Ok(())
    }
}

/// Genetic algorithm parameters; the defaults follow the reference
/// configuration (population 128 with 32 max-confidence seeds, 1000
/// generations, 1-4 joints reassigned per mutation).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaParams {
    pub population: usize,
    pub elite_seeds: usize,
    pub generations: usize,
    pub mutation_prob: f64,
    pub max_mutated_joints: usize,
}

impl Default for GaParams {
    fn default() -> Self {
        GaParams {
            population: 128,
            elite_seeds: 32,
            generations: 1000,
            mutation_prob: 0.3,
            max_mutated_joints: 4,
        }
    }
}

/// Energy weights and solver parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OjaConfig {
    /// Weight on the negative log confidence term.
    pub lambda_conf: f64,
    /// Fixed cost of selecting the null proposal.
    pub lambda_null: f64,
    /// Weight on the temporal term.
    pub lambda_temp: f64,
    /// Temporal decay: frame pairs at gap g are weighted exp(-tau (g - 1)).
    pub tau: f64,
    /// Maximum frame gap coupled by the temporal term.
    pub window: usize,
    /// Multiplier on the scale-normalized silhouette coverage term.
    pub w_cov_sil: f64,
    /// Weight per background-crossing bone.
    pub w_cov_bone: f64,
    /// Silhouette dilation radius for the bone coverage term, pixels.
    pub dilation_radius: f64,
    /// Cap on medial-axis sample points per frame.
    pub mat_cap: usize,
    /// All-null frames charge each MAT point a distance of
    /// `cov_max_scale * sqrt(area)` cubed.
    pub cov_max_scale: f64,
    /// Random restarts of the QP improve phase.
    pub qp_restarts: usize,
    /// Seed for the QP restart stream.
    pub qp_seed: u64,
    /// Stored-entry limit for the quadratic form.
    pub qp_entry_limit: usize,
    pub ga: GaParams,
}

impl Default for OjaConfig {
    fn default() -> Self {
        OjaConfig {
            lambda_conf: 1.0,
            lambda_null: 8.0,
            lambda_temp: 0.02,
            tau: 1.0,
            window: 2,
            w_cov_sil: 1.0,
            w_cov_bone: 2.0,
            dilation_radius: 3.0,
            mat_cap: 64,
            cov_max_scale: 0.5,
            qp_restarts: 8,
            qp_seed: 0,
            qp_entry_limit: 1_000_000,
            ga: GaParams::default(),
        }
    }
}

impl OjaConfig {
    /// Coverage terms disabled: the energy the QP covers exactly.
    pub fn without_coverage(&self) -> Self {
        OjaConfig {
            w_cov_sil: 0.0,
            w_cov_bone: 0.0,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("lambda_conf", self.lambda_conf),
            ("lambda_null", self.lambda_null),
        ] {
            if v <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "{name} is {v}, must be positive"
                )));
            }
        }
        for (name, v) in [
            ("lambda_temp", self.lambda_temp),
            ("tau", self.tau),
            ("w_cov_sil", self.w_cov_sil),
            ("w_cov_bone", self.w_cov_bone),
            ("dilation_radius", self.dilation_radius),
            ("cov_max_scale", self.cov_max_scale),
        ] {
            if v < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "{name} is {v}, must be nonnegative"
                )));
            }
        }
        if self.window < 1 {
            return Err(Error::InvalidArgument(
                "temporal window must be at least 1".into(),
            ));
        }
        Ok(())
    }
}
