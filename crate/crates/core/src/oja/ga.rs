//! Genetic-algorithm solver for the full energy including coverage terms.
//!
//! Genes are per-frame vectors of joint indices rather than one-hot
//! encodings. The population holds 128 genes; the first 32 are seeded with
//! the max-confidence assignment. Each generation keeps the fittest half
//! and refills by slicing two parents at a random point. Mutation
//! reassigns between 1 and 4 joints per gene with probability 0.3.

use rand::Rng;
use rayon::prelude::*;

use crate::error::Result;

pub use super::GaParams as GaConfig;
use super::{Assignment, EnergyModel, OjaConfig, OjaSequence, SkeletonPrior};

/// Flattened chromosome: one joint index per (frame, joint).
type Genes = Vec<u32>;

fn to_assignments(genes: &Genes, joints: usize) -> Vec<Assignment> {
    genes
        .chunks_exact(joints)
        .map(|chunk| Assignment(chunk.iter().map(|&g| g as usize).collect()))
        .collect()
}

fn from_assignments(assignments: &[Assignment]) -> Genes {
    assignments
        .iter()
        .flat_map(|a| a.0.iter().map(|&v| v as u32))
        .collect()
}

/// Runs the GA and returns the best assignment per frame with its energy.
/// Deterministic under a fixed rng. `extra_seeds` are inserted into the
/// initial population (used to warm-start from another solver's output).
pub fn solve_ga(
    seq: &OjaSequence,
    prior: &SkeletonPrior,
    cfg: &OjaConfig,
    rng: &mut impl Rng,
    extra_seeds: &[Vec<Assignment>],
) -> Result<(Vec<Assignment>, f64)> {
    let model = EnergyModel::new(seq, prior, cfg)?;
    let ga = cfg.ga;
    let joints = seq.joint_count();
    let frames = seq.frames.len();
    let gene_len = joints * frames;
    // slots per flattened position, null included
    let slot_counts: Vec<u32> = seq
        .frames
        .iter()
        .flat_map(|f| {
            f.proposals
                .proposals
                .iter()
                .map(|ps| ps.len() as u32 + 1)
        })
        .collect();

    let max_conf: Genes = from_assignments(
        &seq.frames
            .iter()
            .map(|f| f.proposals.max_confidence_assignment())
            .collect::<Vec<_>>(),
    );

    let mut population: Vec<Genes> = Vec::with_capacity(ga.population);
    for _ in 0..ga.elite_seeds.min(ga.population) {
        population.push(max_conf.clone());
    }
    for seed in extra_seeds {
        if population.len() < ga.population {
            population.push(from_assignments(seed));
        }
    }
    while population.len() < ga.population {
        population.push(
            (0..gene_len)
                .map(|i| rng.gen_range(0..slot_counts[i]))
                .collect(),
        );
    }

    let fitness_of = |genes: &Genes| -> f64 { model.total(&to_assignments(genes, joints)) };

    let mut best: (f64, Genes) = (f64::INFINITY, max_conf.clone());
    let survivors = ga.population / 2;

    for _ in 0..ga.generations {
        let mut scored: Vec<(f64, Genes)> = population
            .par_iter()
            .map(|g| (fitness_of(g), g.clone()))
            .collect();
        // rank by fitness; ties broken by gene content so the outcome does
        // not depend on evaluation order
        scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then_with(|| a.1.cmp(&b.1)));
        if scored[0].0 < best.0 || (scored[0].0 == best.0 && scored[0].1 < best.1) {
            best = scored[0].clone();
        }

        let parents: Vec<Genes> = scored[..survivors].iter().map(|s| s.1.clone()).collect();
        let mut next: Vec<Genes> = parents.clone();
        while next.len() < ga.population {
            let pa = &parents[rng.gen_range(0..parents.len())];
            let pb = &parents[rng.gen_range(0..parents.len())];
            let split = if gene_len > 1 {
                rng.gen_range(1..gene_len)
            } else {
                0
            };
            let mut child = Vec::with_capacity(gene_len);
            child.extend_from_slice(&pa[..split]);
            child.extend_from_slice(&pb[split..]);
            next.push(child);
        }
        for genes in &mut next {
            if rng.gen_bool(ga.mutation_prob) {
                let count = rng.gen_range(1..=ga.max_mutated_joints.max(1));
                for _ in 0..count {
                    let pos = rng.gen_range(0..gene_len);
                    genes[pos] = rng.gen_range(0..slot_counts[pos]);
                }
            }
        }
        population = next;
    }

    // score the final generation too
    let mut final_scored: Vec<(f64, Genes)> = population
        .par_iter()
        .map(|g| (fitness_of(g), g.clone()))
        .collect();
    final_scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then_with(|| a.1.cmp(&b.1)));
    if final_scored[0].0 < best.0 || (final_scored[0].0 == best.0 && final_scored[0].1 < best.1) {
        best = final_scored[0].clone();
    }

    Ok((to_assignments(&best.1, joints), best.0))
}
