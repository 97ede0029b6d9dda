//! Quadratic-form view of the coverage-free energy and its
//! suggest-and-improve solver.
//!
//! Over a sequence, the prior terms form a block diagonal matrix (one block
//! per frame) and the temporal terms a block symmetric matrix coupling
//! frame pairs inside the window; confidence and null costs are linear. For
//! every one-hot assignment encoding, vec' (Q + T) vec + c' vec equals the
//! coverage-free total energy.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::derive;

use super::energy::temporal_weight;
use super::{Assignment, OjaConfig, OjaSequence, SkeletonPrior};

/// Entry layout: per frame, per joint, indices cover the joint's proposals
/// followed by one null slot.
#[derive(Debug, Clone)]
pub struct QpLayout {
    /// Start of each joint's slot range within its frame block.
    pub joint_offsets: Vec<Vec<usize>>,
    /// Slots per joint (proposal count + 1 for null).
    pub slot_counts: Vec<Vec<usize>>,
    /// Dimension of each frame block.
    pub frame_dims: Vec<usize>,
}

impl QpLayout {
    fn of(seq: &OjaSequence) -> Self {
        let mut joint_offsets = Vec::with_capacity(seq.frames.len());
        let mut slot_counts = Vec::with_capacity(seq.frames.len());
        let mut frame_dims = Vec::with_capacity(seq.frames.len());
        for frame in &seq.frames {
            let mut offsets = Vec::with_capacity(frame.proposals.joint_count());
            let mut counts = Vec::with_capacity(frame.proposals.joint_count());
            let mut dim = 0usize;
            for ps in &frame.proposals.proposals {
                offsets.push(dim);
                counts.push(ps.len() + 1);
                dim += ps.len() + 1;
            }
            joint_offsets.push(offsets);
            slot_counts.push(counts);
            frame_dims.push(dim);
        }
        QpLayout {
            joint_offsets,
            slot_counts,
            frame_dims,
        }
    }

    #[inline]
    pub fn slot(&self, t: usize, joint: usize, index: usize) -> usize {
        self.joint_offsets[t][joint] + index
    }
}

/// The assembled quadratic program.
pub struct QpProblem {
    pub layout: QpLayout,
    /// Per-frame prior blocks Q^(t).
    pub frame_blocks: Vec<DMatrix<f64>>,
    /// Temporal couplings T^(t0,t1) for t0 < t1 within the window, with
    /// entries halved so the symmetric pair sums to the full weight.
    pub temporal_blocks: Vec<(usize, usize, DMatrix<f64>)>,
    /// Confidence and null costs per slot, concatenated frame by frame.
    pub linear: Vec<Vec<f64>>,
}

impl QpProblem {
    /// Quadratic-form energy of a one-hot encoded assignment:
    /// vec' (Q + T) vec + c' vec.
    pub fn energy_of(&self, assignments: &[Assignment]) -> f64 {
        let joints = self.layout.joint_offsets[0].len();
        let slot_of = |t: usize, j: usize| self.layout.slot(t, j, assignments[t].0[j]);
        let mut total = 0.0;
        for (t, block) in self.frame_blocks.iter().enumerate() {
            for j in 0..joints {
                let sj = slot_of(t, j);
                total += self.linear[t][sj];
                for k in 0..joints {
                    total += block[(sj, slot_of(t, k))];
                }
            }
        }
        for (t0, t1, block) in &self.temporal_blocks {
            for j in 0..joints {
                // symmetric pair counts the block twice
                total += 2.0 * block[(slot_of(*t0, j), slot_of(*t1, j))];
            }
        }
        total
    }
}

/// Builds the quadratic form of the coverage-free energy. Fails if the
/// stored entries would exceed `cfg.qp_entry_limit`.
pub fn build_qp(
    seq: &OjaSequence,
    prior: &SkeletonPrior,
    cfg: &OjaConfig,
) -> Result<QpProblem> {
    cfg.validate()?;
    seq.validate()?;
    let layout = QpLayout::of(seq);

    let mut entries: usize = layout.frame_dims.iter().map(|d| d * d).sum();
    for t0 in 0..seq.frames.len() {
        for t1 in (t0 + 1)..seq.frames.len().min(t0 + 1 + cfg.window) {
            entries += layout.frame_dims[t0] * layout.frame_dims[t1];
        }
    }
    if entries > cfg.qp_entry_limit {
        return Err(Error::QpTooLarge {
            entries,
            limit: cfg.qp_entry_limit,
        });
    }

    let joints = seq.joint_count();
    let mut frame_blocks = Vec::with_capacity(seq.frames.len());
    let mut linear = Vec::with_capacity(seq.frames.len());
    for (t, frame) in seq.frames.iter().enumerate() {
        let local = prior.localize(frame.anchor, frame.scale);
        let dim = layout.frame_dims[t];
        let mut block = DMatrix::zeros(dim, dim);
        let mut lin = vec![0.0; dim];
        for j in 0..joints {
            let xs_j = &frame.proposals.proposals[j];
            for (p, prop) in xs_j.iter().enumerate() {
                lin[layout.slot(t, j, p)] = -cfg.lambda_conf * prop.confidence.ln();
            }
            lin[layout.slot(t, j, xs_j.len())] = frame.proposals.null_cost;

            let mu_j = local.mean_of(j);
            for k in 0..joints {
                let xs_k = &frame.proposals.proposals[k];
                let m = local.inv_block(j, k);
                let mu_k = local.mean_of(k);
                for (p, pj) in xs_j.iter().enumerate() {
                    let dj = [pj.position[0] - mu_j[0], pj.position[1] - mu_j[1]];
                    for (q, pk) in xs_k.iter().enumerate() {
                        let dk = [pk.position[0] - mu_k[0], pk.position[1] - mu_k[1]];
                        block[(layout.slot(t, j, p), layout.slot(t, k, q))] = dj[0]
                            * (m[0][0] * dk[0] + m[0][1] * dk[1])
                            + dj[1] * (m[1][0] * dk[0] + m[1][1] * dk[1]);
                    }
                }
            }
        }
        frame_blocks.push(block);
        linear.push(lin);
    }

    let mut temporal_blocks = Vec::new();
    for t0 in 0..seq.frames.len() {
        for t1 in (t0 + 1)..seq.frames.len().min(t0 + 1 + cfg.window) {
            let w = cfg.lambda_temp * temporal_weight(cfg.tau, t1 - t0);
            if w == 0.0 {
                continue;
            }
            let mut block = DMatrix::zeros(layout.frame_dims[t0], layout.frame_dims[t1]);
            for j in 0..joints {
                let xs0 = &seq.frames[t0].proposals.proposals[j];
                let xs1 = &seq.frames[t1].proposals.proposals[j];
                for (p, p0) in xs0.iter().enumerate() {
                    for (q, p1) in xs1.iter().enumerate() {
                        let dx = p0.position[0] - p1.position[0];
                        let dy = p0.position[1] - p1.position[1];
                        block[(layout.slot(t0, j, p), layout.slot(t1, j, q))] =
                            0.5 * w * (dx * dx + dy * dy);
                    }
                }
            }
            temporal_blocks.push((t0, t1, block));
        }
    }

    Ok(QpProblem {
        layout,
        frame_blocks,
        temporal_blocks,
        linear,
    })
}

/// Local energy of setting (t, joint) to `index`, everything else fixed.
fn local_energy(
    problem: &QpProblem,
    assignments: &[Assignment],
    t: usize,
    joint: usize,
    index: usize,
) -> f64 {
    let layout = &problem.layout;
    let joints = layout.joint_offsets[0].len();
    let slot = layout.slot(t, joint, index);
    let block = &problem.frame_blocks[t];
    let mut e = problem.linear[t][slot] + block[(slot, slot)];
    for k in 0..joints {
        if k == joint {
            continue;
        }
        let sk = layout.slot(t, k, assignments[t].0[k]);
        e += 2.0 * block[(slot, sk)];
    }
    for (t0, t1, tb) in &problem.temporal_blocks {
        if *t0 == t {
            let other = layout.slot(*t1, joint, assignments[*t1].0[joint]);
            e += 2.0 * tb[(slot, other)];
        } else if *t1 == t {
            let other = layout.slot(*t0, joint, assignments[*t0].0[joint]);
            e += 2.0 * tb[(other, slot)];
        }
    }
    e
}

/// Iterated conditional modes: sweep (frame, joint) coordinates, trying
/// every slot for one joint with the rest fixed, accepting strict
/// decreases, until a full sweep changes nothing.
fn improve(problem: &QpProblem, assignments: &mut [Assignment]) {
    let layout = &problem.layout;
    let joints = layout.joint_offsets[0].len();
    loop {
        let mut changed = false;
        for t in 0..assignments.len() {
            for joint in 0..joints {
                let current = assignments[t].0[joint];
                let mut best = (local_energy(problem, assignments, t, joint, current), current);
                for index in 0..layout.slot_counts[t][joint] {
                    if index == current {
                        continue;
                    }
                    let e = local_energy(problem, assignments, t, joint, index);
                    if e < best.0 - 1e-15 {
                        best = (e, index);
                    }
                }
                if best.1 != current {
                    assignments[t].0[joint] = best.1;
                    changed = true;
                }
            }
        }
        if !changed {
            return;
        }
    }
}

/// Suggest-and-improve solution of the coverage-free energy: start from the
/// max-confidence assignment, refine by ICM, and repeat from
/// `cfg.qp_restarts` random assignments, returning the best. The returned
/// energy never exceeds the suggestion's energy.
pub fn solve_qp(
    problem: &QpProblem,
    seq: &OjaSequence,
    cfg: &OjaConfig,
) -> Result<(Vec<Assignment>, f64)> {
    seq.validate()?;
    let mut suggestion: Vec<Assignment> = seq
        .frames
        .iter()
        .map(|f| f.proposals.max_confidence_assignment())
        .collect();
    improve(problem, &mut suggestion);
    let mut best_energy = problem.energy_of(&suggestion);
    let mut best = suggestion;

    let mut rng = derive(cfg.qp_seed, "qp-restart", 0);
    for _ in 0..cfg.qp_restarts {
        let mut candidate: Vec<Assignment> = seq
            .frames
            .iter()
            .enumerate()
            .map(|(t, f)| {
                Assignment(
                    (0..f.proposals.joint_count())
                        .map(|j| rng.gen_range(0..problem.layout.slot_counts[t][j]))
                        .collect(),
                )
            })
            .collect();
        improve(problem, &mut candidate);
        let e = problem.energy_of(&candidate);
        if e < best_energy - 1e-15 || (e <= best_energy + 1e-15 && candidate < best) {
            best_energy = e.min(best_energy);
            best = candidate;
        }
    }
    Ok((best, best_energy))
}
