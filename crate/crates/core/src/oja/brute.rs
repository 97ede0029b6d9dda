//! Exhaustive enumeration oracle for small assignment instances.

use crate::error::{Error, Result};

use super::{Assignment, EnergyModel, OjaConfig, OjaSequence, SkeletonPrior};

const SEARCH_LIMIT: f64 = 1e7;

/// Exact global minimizer of the total energy by enumerating the full
/// product space. Ties resolve to the lexicographically smallest flattened
/// index vector. Fails if the space exceeds 1e7 states.
pub fn brute_force(
    seq: &OjaSequence,
    prior: &SkeletonPrior,
    cfg: &OjaConfig,
) -> Result<(Vec<Assignment>, f64)> {
    let model = EnergyModel::new(seq, prior, cfg)?;
    let slot_counts: Vec<usize> = seq
        .frames
        .iter()
        .flat_map(|f| f.proposals.proposals.iter().map(|ps| ps.len() + 1))
        .collect();
    let size: f64 = slot_counts.iter().map(|&c| c as f64).product();
    if size > SEARCH_LIMIT {
        return Err(Error::SearchSpaceTooLarge {
            size,
            limit: SEARCH_LIMIT,
        });
    }

    let joints = seq.joint_count();
    let mut state = vec![0usize; slot_counts.len()];
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        let assignments: Vec<Assignment> = state
            .chunks_exact(joints)
            .map(|chunk| Assignment(chunk.to_vec()))
            .collect();
        let energy = model.total(&assignments);
        // lexicographic enumeration + strict improvement keeps the
        // lexicographically smallest minimizer
        if best.as_ref().map_or(true, |(e, _)| energy < *e - 0.0) {
            best = Some((energy, state.clone()));
        }

        // odometer: increment the last position first
        let mut pos = state.len();
        loop {
            if pos == 0 {
                let (energy, state) = best.unwrap();
                let assignments = state
                    .chunks_exact(joints)
                    .map(|chunk| Assignment(chunk.to_vec()))
                    .collect();
                return Ok((assignments, energy));
            }
            pos -= 1;
            state[pos] += 1;
            if state[pos] < slot_counts[pos] {
                break;
            }
            state[pos] = 0;
        }
    }
}
