//! Gaussian skeleton prior over normalized 2D joint configurations.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schema::SkeletonSchema;
use crate::synth::GroundTruthFrame;

/// Translation anchor of the normalization frame.
///
/// Training configurations and test proposals are normalized identically.
/// The default anchors at the silhouette centroid: it is defined for every
/// assignment (a reference joint can be null at test time) and keeps the
/// prior a fixed quadratic form over proposal coordinates, which the QP
/// construction requires. Anchoring at a reference joint is available for
/// experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorKind {
    SilhouetteCentroid,
    Joint(usize),
}

/// Scale convention of the normalization frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleKind {
    SqrtArea,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationSpec {
    pub anchor: AnchorKind,
    pub scale: ScaleKind,
}

impl Default for NormalizationSpec {
    fn default() -> Self {
        NormalizationSpec {
            anchor: AnchorKind::SilhouetteCentroid,
            scale: ScaleKind::SqrtArea,
        }
    }
}

/// Mean and covariance over 2J-dimensional joint configurations, with a
/// shrinkage-regularized inverse. Coordinates interleave as
/// (x_0, y_0, x_1, y_1, ...).
#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonPrior {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
    /// Inverse of (covariance + epsilon I).
    pub sigma_inv: DMatrix<f64>,
    pub epsilon: f64,
    pub normalization: NormalizationSpec,
    /// Training frames were fewer than 2J + 1, so the sample covariance is
    /// rank deficient and the shrinkage term dominates some directions.
    pub underdetermined: bool,
}

impl SkeletonPrior {
    /// Builds the regularized inverse from moments. `epsilon` is
    /// 1e-6 * trace(covariance) / 2J.
    pub fn from_moments(
        mean: DVector<f64>,
        covariance: DMatrix<f64>,
        normalization: NormalizationSpec,
        underdetermined: bool,
    ) -> Result<Self> {
        let dim = mean.len();
        if covariance.nrows() != dim || covariance.ncols() != dim {
            return Err(Error::InvalidArgument(format!(
                "covariance is {}x{}, expected {dim}x{dim}",
                covariance.nrows(),
                covariance.ncols()
            )));
        }
        let asym = (&covariance - covariance.transpose()).abs().max();
        if asym > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "covariance is asymmetric by {asym}"
            )));
        }
        let epsilon = 1e-6 * covariance.trace() / dim as f64;
        let epsilon = if epsilon > 0.0 { epsilon } else { 1e-12 };
        let regularized = &covariance + DMatrix::identity(dim, dim) * epsilon;
        let chol = Cholesky::new(regularized.clone()).ok_or_else(|| {
            Error::InvalidArgument("regularized covariance is not positive definite".into())
        })?;
        let sigma_inv = chol.inverse();
        Ok(SkeletonPrior {
            mean,
            covariance,
            sigma_inv,
            epsilon,
            normalization,
            underdetermined,
        })
    }

    pub fn joint_count(&self) -> usize {
        self.mean.len() / 2
    }

    /// Transports the prior from the normalized frame into a frame's raw
    /// pixel coordinates: x_raw = anchor + scale * x_norm.
    pub fn localize(&self, anchor: [f64; 2], scale: f64) -> SkeletonPrior {
        let dim = self.mean.len();
        let mut mean = DVector::zeros(dim);
        for j in 0..self.joint_count() {
            mean[2 * j] = anchor[0] + scale * self.mean[2 * j];
            mean[2 * j + 1] = anchor[1] + scale * self.mean[2 * j + 1];
        }
        SkeletonPrior {
            mean,
            covariance: &self.covariance * (scale * scale),
            sigma_inv: &self.sigma_inv / (scale * scale),
            epsilon: self.epsilon * scale * scale,
            normalization: self.normalization,
            underdetermined: self.underdetermined,
        }
    }

    /// 2x2 block of the regularized inverse covariance for joints (j, k).
    #[inline]
    pub fn inv_block(&self, j: usize, k: usize) -> [[f64; 2]; 2] {
        [
            [
                self.sigma_inv[(2 * j, 2 * k)],
                self.sigma_inv[(2 * j, 2 * k + 1)],
            ],
            [
                self.sigma_inv[(2 * j + 1, 2 * k)],
                self.sigma_inv[(2 * j + 1, 2 * k + 1)],
            ],
        ]
    }

    /// Mean of joint `j` as a 2-vector.
    #[inline]
    pub fn mean_of(&self, j: usize) -> [f64; 2] {
        [self.mean[2 * j], self.mean[2 * j + 1]]
    }
}

/// Normalizes one frame's ground-truth joints into the prior frame.
fn normalized_config(
    frame: &GroundTruthFrame,
    normalization: &NormalizationSpec,
) -> Result<DVector<f64>> {
    let anchor = match normalization.anchor {
        AnchorKind::SilhouetteCentroid => frame.silhouette.centroid().ok_or_else(|| {
            Error::EmptySilhouette("prior fitting needs nonempty silhouettes".into())
        })?,
        AnchorKind::Joint(reference) => {
            let p = frame.joints2d.get(reference).ok_or_else(|| {
                Error::InvalidArgument(format!("reference joint {reference} out of range"))
            })?;
            [p.x, p.y]
        }
    };
    let scale = match normalization.scale {
        ScaleKind::SqrtArea => {
            let area = frame.sil_area();
            if area <= 0.0 {
                return Err(Error::EmptySilhouette(
                    "prior fitting needs nonzero silhouette area".into(),
                ));
            }
            area.sqrt()
        }
        ScaleKind::None => 1.0,
    };
    let j = frame.joints2d.len();
    let mut v = DVector::zeros(2 * j);
    for (idx, p) in frame.joints2d.iter().enumerate() {
        v[2 * idx] = (p.x - anchor[0]) / scale;
        v[2 * idx + 1] = (p.y - anchor[1]) / scale;
    }
    Ok(v)
}

/// Fits the Gaussian skeleton prior from ground-truth frames: each frame's
/// joints are normalized (anchor translation, sqrt-area scale) and stacked
/// as a 2J vector; the prior is their sample mean and covariance with
/// shrinkage.
pub fn fit_prior(
    frames: &[GroundTruthFrame],
    schema: &SkeletonSchema,
    normalization: NormalizationSpec,
) -> Result<SkeletonPrior> {
    if frames.len() < 2 {
        return Err(Error::TooFewFrames {
            got: frames.len(),
            need: 2,
        });
    }
    let dim = 2 * schema.joint_count();
    let configs: Vec<DVector<f64>> = frames
        .iter()
        .map(|f| {
            if f.joints2d.len() != schema.joint_count() {
                return Err(Error::InvalidArgument(format!(
                    "frame has {} joints, schema has {}",
                    f.joints2d.len(),
                    schema.joint_count()
                )));
            }
            normalized_config(f, &normalization)
        })
        .collect::<Result<_>>()?;

    let n = configs.len() as f64;
    let mut mean = DVector::zeros(dim);
    for c in &configs {
        mean += c;
    }
    mean /= n;

    let mut covariance = DMatrix::zeros(dim, dim);
    for c in &configs {
        let d = c - &mean;
        covariance.syger(1.0 / (n - 1.0), &d, &d, 1.0);
    }
    // syger fills the lower triangle; mirror it
    for r in 0..dim {
        for c in (r + 1)..dim {
            covariance[(r, c)] = covariance[(c, r)];
        }
    }

    SkeletonPrior::from_moments(
        mean,
        covariance,
        normalization,
        frames.len() < dim + 1,
    )
}
