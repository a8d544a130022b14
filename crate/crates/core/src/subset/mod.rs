//! Construction of the model-behavior subset, either by simulating the net
//! or by aligning selected candidate variants of the log.

mod kmedoids;
mod simulation;

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use self::kmedoids::{distance_matrix, pam, Clustering};
pub use self::simulation::{build_by_simulation, default_max_steps, SIMULATION_RETRY_FACTOR};

use crate::alignment::{
    optimal_alignment, trace_fitness, Alignment, AlignmentConfig, CostFunction,
};
use crate::error::{Error, Result};
use crate::log::{ActivityKey, EventLog, Trace};
use crate::petri::SystemNet;

/// Deduplicated visible model traces, kept in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModelBehaviorSet {
    traces: Vec<Trace>,
}

impl ModelBehaviorSet {
    pub fn new<I: IntoIterator<Item = Trace>>(traces: I, key: &ActivityKey) -> Self {
        let mut traces: Vec<Trace> = traces.into_iter().collect();
        traces.sort_by(|a, b| key.cmp_traces(a, b));
        traces.dedup();
        ModelBehaviorSet { traces }
    }

    pub fn traces(&self) -> &[Trace] {
        &self.traces
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn contains(&self, trace: &Trace) -> bool {
        self.traces.contains(trace)
    }
}

/// Exact results for one aligned candidate variant.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateInfo {
    pub frequency: u64,
    pub exact_cost: u64,
    pub exact_fitness: f64,
    pub alignment: Alignment,
}

/// Aligned candidates in canonical variant order.
#[derive(Debug, Clone, Default)]
pub struct CandidateSet {
    entries: Vec<(Trace, CandidateInfo)>,
    index: HashMap<Trace, usize>,
}

impl CandidateSet {
    pub fn get(&self, trace: &Trace) -> Option<&CandidateInfo> {
        self.index.get(trace).map(|&i| &self.entries[i].1)
    }

    pub fn entries(&self) -> &[(Trace, CandidateInfo)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Frequency-weighted mean of the candidates' exact fitness.
    pub fn mean_fitness(&self) -> Option<f64> {
        let total: u64 = self.entries.iter().map(|(_, c)| c.frequency).sum();
        if total == 0 {
            return None;
        }
        let sum: crate::sum::KahanSum = self
            .entries
            .iter()
            .map(|(_, c)| c.exact_fitness * c.frequency as f64)
            .collect();
        Some(sum.value() / total as f64)
    }
}

/// Number of candidates for a fraction of `variants`: `ceil(fraction * n)`,
/// at least one when there are variants.
pub fn candidate_count(fraction: f64, variants: usize) -> Result<usize> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Argument(format!(
            "candidate fraction must lie in (0, 1], got {fraction}"
        )));
    }
    // absorb representation error, e.g. 0.1 * 30 = 3.0000000000000004
    let k = (fraction * variants as f64 - 1e-9).ceil().max(0.0) as usize;
    Ok(k.clamp(variants.min(1), variants))
}

fn require_variants(log: &EventLog) -> Result<()> {
    if log.is_empty() {
        Err(Error::Argument("the event log has no traces".into()))
    } else {
        Ok(())
    }
}

/// The most frequent variants; ties go to canonical order.
pub fn select_candidates_frequency(log: &EventLog, fraction: f64) -> Result<Vec<Trace>> {
    require_variants(log)?;
    let k = candidate_count(fraction, log.variant_count())?;
    let mut order: Vec<usize> = (0..log.variant_count()).collect();
    // stable sort keeps canonical order among equal frequencies
    order.sort_by_key(|&i| std::cmp::Reverse(log.variants()[i].1));
    let mut chosen: Vec<usize> = order.into_iter().take(k).collect();
    chosen.sort_unstable();
    Ok(chosen
        .into_iter()
        .map(|i| log.variants()[i].0.clone())
        .collect())
}

/// Variants sampled uniformly without replacement.
pub fn select_candidates_random(log: &EventLog, fraction: f64, seed: u64) -> Result<Vec<Trace>> {
    require_variants(log)?;
    let n = log.variant_count();
    let k = candidate_count(fraction, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = rand::seq::index::sample(&mut rng, n, k).into_vec();
    chosen.sort_unstable();
    Ok(chosen
        .into_iter()
        .map(|i| log.variants()[i].0.clone())
        .collect())
}

/// Medoids of a PAM clustering of the variants under edit distance.
pub fn select_candidates_clustering(
    log: &EventLog,
    fraction: f64,
    seed: u64,
    max_iters: usize,
) -> Result<Vec<Trace>> {
    require_variants(log)?;
    if max_iters == 0 {
        return Err(Error::Argument("max_iters must be at least 1".into()));
    }
    let k = candidate_count(fraction, log.variant_count())?;
    let traces: Vec<Trace> = log.variants().iter().map(|(t, _)| t.clone()).collect();
    let dist = distance_matrix(&traces);
    let clustering = pam(&dist, k, seed, max_iters);
    let mut medoids = clustering.medoids;
    medoids.sort_unstable();
    Ok(medoids.into_iter().map(|i| traces[i].clone()).collect())
}

/// Aligns every candidate exactly and collects the visible model traces of
/// the optimal alignments.
///
/// The model trace rather than the log trace goes into the set: by the
/// triangle inequality it can only tighten distances for other variants.
pub fn build_from_candidates(
    candidates: &[Trace],
    log: &EventLog,
    net: &SystemNet,
    key: &ActivityKey,
    cost: &CostFunction,
    config: &AlignmentConfig,
    spm: u64,
) -> Result<(ModelBehaviorSet, CandidateSet)> {
    let mut sorted: Vec<Trace> = candidates.to_vec();
    sorted.sort_by(|a, b| key.cmp_traces(a, b));
    sorted.dedup();

    let aligned: Vec<Result<(Trace, CandidateInfo)>> = sorted
        .par_iter()
        .map(|trace| {
            let frequency = log.frequency(trace).ok_or_else(|| {
                Error::Argument(format!(
                    "candidate {} is not a log variant",
                    key.display(trace)
                ))
            })?;
            let alignment =
                optimal_alignment(trace, net, cost, config).map_err(|e| Error::Candidate {
                    candidate: key.display(trace).to_string(),
                    source: Box::new(e),
                })?;
            let exact_cost = alignment.cost;
            Ok((
                trace.clone(),
                CandidateInfo {
                    frequency,
                    exact_cost,
                    exact_fitness: trace_fitness(exact_cost, trace.len(), spm),
                    alignment,
                },
            ))
        })
        .collect();

    let mut set = CandidateSet::default();
    for item in aligned {
        let (trace, info) = item?;
        set.index.insert(trace.clone(), set.entries.len());
        set.entries.push((trace, info));
    }
    let mb = ModelBehaviorSet::new(
        set.entries
            .iter()
            .map(|(_, c)| c.alignment.model_trace(net)),
        key,
    );
    Ok((mb, set))
}
