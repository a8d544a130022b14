//! Bounded fitness approximation, exact baseline and benchmark metrics.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::alignment::{
    optimal_alignment, shortest_path_model, trace_fitness, Alignment, AlignmentConfig,
    CostFunction, MoveKind,
};
use crate::edit::{edit_script, min_distance_to_set, EditOp};
use crate::error::{Error, Result};
use crate::log::{Activity, ActivityKey, EventLog, Trace};
use crate::petri::SystemNet;
use crate::subset::{
    build_by_simulation, build_from_candidates, default_max_steps, select_candidates_clustering,
    select_candidates_frequency, select_candidates_random, CandidateInfo, CandidateSet,
    ModelBehaviorSet,
};
use crate::sum::KahanSum;

/// How the model-behavior subset is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Simulation,
    Frequency,
    Random,
    Clustering,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Simulation => "simulation",
            Method::Frequency => "frequency",
            Method::Random => "random",
            Method::Clustering => "clustering",
        }
    }

    /// Midpoint of the bounds for candidate selection, the lower bound for
    /// simulation.
    pub fn default_rule(self) -> Rule {
        match self {
            Method::Simulation => Rule::LowerBound,
            _ => Rule::Midpoint,
        }
    }
}

/// How a non-candidate variant's approximated fitness is derived from its
/// bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Midpoint,
    /// The larger of the lower bound and the candidates' mean fitness,
    /// clamped into the bounds.
    CandidateAverage,
    LowerBound,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Midpoint => "midpoint",
            Rule::CandidateAverage => "candidate-average",
            Rule::LowerBound => "lower-bound",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ApproxConfig {
    pub method: Method,
    /// Fraction in (0, 1]: of distinct variants for candidate selection, of
    /// total traces for the number of simulated walks.
    pub fraction: f64,
    pub seed: u64,
    pub workers: usize,
    /// `None` picks [`Method::default_rule`].
    pub rule: Option<Rule>,
    pub cost: CostFunction,
    pub alignment: AlignmentConfig,
    /// PAM iteration limit for clustering.
    pub max_iters: usize,
    /// Walk length limit for simulation; `None` uses [`default_max_steps`].
    pub max_steps: Option<usize>,
}

impl ApproxConfig {
    pub fn new(method: Method, fraction: f64) -> Self {
        ApproxConfig {
            method,
            fraction,
            seed: 42,
            workers: 1,
            rule: None,
            cost: CostFunction::standard(),
            alignment: AlignmentConfig::default(),
            max_iters: 100,
            max_steps: None,
        }
    }

    pub fn effective_rule(&self) -> Rule {
        self.rule.unwrap_or_else(|| self.method.default_rule())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceSource {
    CandidateExact,
    Approximated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceResult {
    pub trace: Trace,
    pub frequency: u64,
    pub lower: f64,
    pub upper: f64,
    pub approx: f64,
    pub source: TraceSource,
    /// Closest member of the model-behavior set (approximated variants).
    pub witness: Option<Trace>,
    pub min_delta: Option<usize>,
}

/// Fitness bounds of one trace against a model-behavior set.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
    pub min_delta: usize,
    pub witness: Trace,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ActivityDeviation {
    pub insertions: u64,
    pub deletions: u64,
    pub synchronous: u64,
    pub ratio: f64,
}

impl ActivityDeviation {
    fn finish(&mut self) {
        let asynchronous = self.insertions + self.deletions;
        let total = asynchronous + self.synchronous;
        self.ratio = if total == 0 {
            0.0
        } else {
            asynchronous as f64 / total as f64
        };
    }
}

/// Frequency-weighted move counts per activity.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DeviationStats {
    pub per_activity: BTreeMap<Activity, ActivityDeviation>,
}

impl DeviationStats {
    pub fn get(&self, activity: Activity) -> Option<&ActivityDeviation> {
        self.per_activity.get(&activity)
    }

    /// Activities by descending ratio, then by name.
    pub fn ranked<'a>(&'a self, key: &ActivityKey) -> Vec<(Activity, &'a ActivityDeviation)> {
        let mut rows: Vec<_> = self.per_activity.iter().map(|(a, d)| (*a, d)).collect();
        rows.sort_by(|x, y| {
            y.1.ratio
                .total_cmp(&x.1.ratio)
                .then_with(|| key.name(x.0).cmp(key.name(y.0)))
        });
        rows
    }

    fn entry(&mut self, a: Activity) -> &mut ActivityDeviation {
        self.per_activity.entry(a).or_default()
    }

    fn add_alignment(&mut self, alignment: &Alignment, net: &SystemNet, frequency: u64) {
        for mv in &alignment.moves {
            match mv.kind {
                MoveKind::Synchronous => {
                    if let Some(a) = mv.log_activity {
                        self.entry(a).synchronous += frequency;
                    }
                }
                MoveKind::LogOnly => {
                    if let Some(a) = mv.log_activity {
                        self.entry(a).deletions += frequency;
                    }
                }
                MoveKind::ModelOnly => {
                    if let Some(a) = mv.transition.and_then(|t| net.label(t)) {
                        self.entry(a).insertions += frequency;
                    }
                }
            }
        }
    }

    fn add_script(&mut self, trace: &Trace, witness: &Trace, frequency: u64) {
        for (op, a) in edit_script(trace, witness).steps {
            let d = self.entry(a);
            match op {
                EditOp::Match => d.synchronous += frequency,
                EditOp::Delete => d.deletions += frequency,
                EditOp::Insert => d.insertions += frequency,
            }
        }
    }

    fn finish(mut self) -> Self {
        for d in self.per_activity.values_mut() {
            d.finish();
        }
        self
    }
}

/// Wall-clock split of an approximation run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Timing {
    /// Candidate selection, clustering or simulation.
    pub selection: Duration,
    /// Shortest model path plus exact alignments of the candidates.
    pub candidate_alignment: Duration,
    /// Bounds, aggregation and deviation statistics.
    pub bounds: Duration,
}

impl Timing {
    /// Time attributed to preprocessing in reports.
    pub fn preprocess(&self) -> Duration {
        self.selection
    }

    /// Time attributed to the approximation itself in reports.
    pub fn approx(&self) -> Duration {
        self.candidate_alignment + self.bounds
    }

    pub fn total(&self) -> Duration {
        self.selection + self.candidate_alignment + self.bounds
    }
}

#[derive(Debug, Clone)]
pub struct ApproximationResult {
    pub per_trace: Vec<TraceResult>,
    pub log_lower: f64,
    pub log_upper: f64,
    pub log_approx: f64,
    pub spm: u64,
    pub method: Method,
    pub rule: Rule,
    pub parameter: f64,
    pub seed: u64,
    pub deviations: DeviationStats,
    pub model_behavior: ModelBehaviorSet,
    pub candidates: CandidateSet,
    pub timing: Timing,
}

#[derive(Debug, Clone)]
pub struct ExactVariant {
    pub trace: Trace,
    pub frequency: u64,
    pub alignment: Alignment,
    pub fitness: f64,
}

#[derive(Debug, Clone)]
pub struct ExactResult {
    pub fitness: f64,
    pub spm: u64,
    pub per_trace: Vec<ExactVariant>,
    pub deviations: DeviationStats,
    pub duration: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    /// Exact time over approximation time including preprocessing.
    pub pi: f64,
    /// Exact time over approximation time without preprocessing.
    pub pi_no_preprocess: f64,
    pub accuracy: f64,
    pub bound_width: f64,
    pub exact_fitness: f64,
    pub approx_fitness: f64,
    pub lower: f64,
    pub upper: f64,
    pub exact_duration: Duration,
    /// Mean over repetitions.
    pub timing: Timing,
    pub repeats: usize,
}

/// Fitness bounds for `trace`.
///
/// The closest model trace in `mb` gives an alignment cost upper bound, hence
/// the lower fitness bound. A trace shorter than `spm` needs at least
/// `spm - |trace|` insertions, which gives the upper fitness bound.
pub fn trace_bounds(trace: &Trace, mb: &ModelBehaviorSet, spm: u64) -> Result<Bounds> {
    let (min_delta, witness) = min_distance_to_set(trace, mb)?;
    let len = trace.len() as u64;
    let upper = if len >= spm {
        1.0
    } else {
        1.0 - (spm - len) as f64 / (len + spm) as f64
    };
    Ok(Bounds {
        lower: trace_fitness(min_delta as u64, trace.len(), spm),
        upper,
        min_delta,
        witness: witness.clone(),
    })
}

/// Per-trace result. Candidates report their exact fitness as all three
/// values; other traces are bounded against `mb` and approximated per `rule`.
#[allow(clippy::too_many_arguments)]
pub fn approximate_trace(
    trace: &Trace,
    frequency: u64,
    mb: &ModelBehaviorSet,
    spm: u64,
    candidate: Option<&CandidateInfo>,
    rule: Rule,
    candidate_mean: Option<f64>,
) -> Result<TraceResult> {
    if let Some(info) = candidate {
        let f = info.exact_fitness;
        return Ok(TraceResult {
            trace: trace.clone(),
            frequency,
            lower: f,
            upper: f,
            approx: f,
            source: TraceSource::CandidateExact,
            witness: None,
            min_delta: None,
        });
    }
    let b = trace_bounds(trace, mb, spm)?;
    let approx = match rule {
        Rule::Midpoint => (b.lower + b.upper) / 2.0,
        Rule::LowerBound => b.lower,
        Rule::CandidateAverage => {
            let mean = candidate_mean.ok_or_else(|| {
                Error::Argument("the candidate-average rule needs at least one candidate".into())
            })?;
            b.lower.max(mean).clamp(b.lower, b.upper)
        }
    };
    Ok(TraceResult {
        trace: trace.clone(),
        frequency,
        lower: b.lower,
        upper: b.upper,
        approx,
        source: TraceSource::Approximated,
        witness: Some(b.witness),
        min_delta: Some(b.min_delta),
    })
}

/// Frequency-weighted means `(lower, upper, approx)`, summed in the given
/// order with compensation.
pub fn aggregate(per_trace: &[TraceResult]) -> Result<(f64, f64, f64)> {
    let total: u64 = per_trace.iter().map(|r| r.frequency).sum();
    if total == 0 {
        return Err(Error::Argument("cannot aggregate an empty result".into()));
    }
    let mean = |f: fn(&TraceResult) -> f64| {
        let s: KahanSum = per_trace
            .iter()
            .map(|r| f(r) * r.frequency as f64)
            .collect();
        s.value() / total as f64
    };
    Ok((mean(|r| r.lower), mean(|r| r.upper), mean(|r| r.approx)))
}

/// Deviation counts: alignment moves for candidates, edit scripts against
/// the witness for everything else.
pub fn deviation_stats(
    results: &[TraceResult],
    candidates: &CandidateSet,
    net: &SystemNet,
) -> Result<DeviationStats> {
    let mut stats = DeviationStats::default();
    for r in results {
        match r.source {
            TraceSource::CandidateExact => {
                let info = candidates.get(&r.trace).ok_or_else(|| {
                    Error::Invariant("candidate result without a stored alignment".into())
                })?;
                stats.add_alignment(&info.alignment, net, r.frequency);
            }
            TraceSource::Approximated => {
                let witness = r.witness.as_ref().ok_or_else(|| {
                    Error::Invariant("approximated result without a witness".into())
                })?;
                stats.add_script(&r.trace, witness, r.frequency);
            }
        }
    }
    Ok(stats.finish())
}

fn first_error<T>(items: Vec<Result<T>>) -> Result<Vec<T>> {
    items.into_iter().collect()
}

fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Err(Error::Argument("workers must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Resource(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Aligns every variant and returns the frequency-weighted fitness.
pub fn exact_conformance(
    log: &EventLog,
    net: &SystemNet,
    cost: &CostFunction,
    config: &AlignmentConfig,
    workers: usize,
) -> Result<ExactResult> {
    with_pool(workers, || {
        let start = Instant::now();
        let spm = shortest_path_model(net, config)?;
        let aligned = log
            .variants()
            .par_iter()
            .map(|(trace, frequency)| {
                let alignment = optimal_alignment(trace, net, cost, config)?;
                let fitness = trace_fitness(alignment.cost, trace.len(), spm);
                Ok(ExactVariant {
                    trace: trace.clone(),
                    frequency: *frequency,
                    alignment,
                    fitness,
                })
            })
            .collect();
        let per_trace = first_error(aligned)?;
        let total = log.total_traces();
        let fitness = if total == 0 {
            1.0
        } else {
            let s: KahanSum = per_trace
                .iter()
                .map(|v| v.fitness * v.frequency as f64)
                .collect();
            s.value() / total as f64
        };
        let mut stats = DeviationStats::default();
        for v in &per_trace {
            stats.add_alignment(&v.alignment, net, v.frequency);
        }
        Ok(ExactResult {
            fitness,
            spm,
            per_trace,
            deviations: stats.finish(),
            duration: start.elapsed(),
        })
    })?
}

/// Runs the full approximation for `log` against `net`.
pub fn approximate(
    log: &EventLog,
    net: &SystemNet,
    key: &ActivityKey,
    config: &ApproxConfig,
) -> Result<ApproximationResult> {
    if log.is_empty() {
        return Err(Error::Argument("the event log has no traces".into()));
    }
    let rule = config.effective_rule();
    if config.method == Method::Simulation && rule == Rule::CandidateAverage {
        return Err(Error::Argument(
            "the candidate-average rule needs candidates; simulation has none".into(),
        ));
    }
    with_pool(config.workers, || {
        let mut timing = Timing::default();

        let clock = Instant::now();
        let spm = shortest_path_model(net, &config.alignment)?;
        timing.candidate_alignment += clock.elapsed();

        let clock = Instant::now();
        let (selected, simulated) = match config.method {
            Method::Simulation => {
                let target =
                    crate::subset::candidate_count(config.fraction, log.total_traces() as usize)?;
                let max_steps = config
                    .max_steps
                    .unwrap_or_else(|| default_max_steps(net, log.longest_variant()));
                let mb = build_by_simulation(net, key, target, max_steps, config.seed)?;
                (Vec::new(), Some(mb))
            }
            Method::Frequency => (select_candidates_frequency(log, config.fraction)?, None),
            Method::Random => (
                select_candidates_random(log, config.fraction, config.seed)?,
                None,
            ),
            Method::Clustering => (
                select_candidates_clustering(log, config.fraction, config.seed, config.max_iters)?,
                None,
            ),
        };
        timing.selection = clock.elapsed();

        let clock = Instant::now();
        let (mb, candidates) = match simulated {
            Some(mb) => (mb, CandidateSet::default()),
            None => build_from_candidates(
                &selected,
                log,
                net,
                key,
                &config.cost,
                &config.alignment,
                spm,
            )?,
        };
        timing.candidate_alignment += clock.elapsed();

        let clock = Instant::now();
        let mean = candidates.mean_fitness();
        let per_trace = first_error(
            log.variants()
                .par_iter()
                .map(|(trace, frequency)| {
                    approximate_trace(
                        trace,
                        *frequency,
                        &mb,
                        spm,
                        candidates.get(trace),
                        rule,
                        mean,
                    )
                })
                .collect(),
        )?;
        let (log_lower, log_upper, log_approx) = aggregate(&per_trace)?;
        let deviations = deviation_stats(&per_trace, &candidates, net)?;
        timing.bounds = clock.elapsed();

        Ok(ApproximationResult {
            per_trace,
            log_lower,
            log_upper,
            log_approx,
            spm,
            method: config.method,
            rule,
            parameter: config.fraction,
            seed: config.seed,
            deviations,
            model_behavior: mb,
            candidates,
            timing,
        })
    })?
}

fn ratio(num: Duration, den: Duration) -> f64 {
    num.as_secs_f64() / den.as_secs_f64().max(1e-9)
}

/// Runs the exact baseline once and the approximation `repeats` times,
/// averaging the approximation timings.
pub fn benchmark(
    log: &EventLog,
    net: &SystemNet,
    key: &ActivityKey,
    config: &ApproxConfig,
    repeats: usize,
) -> Result<BenchmarkReport> {
    if repeats == 0 {
        return Err(Error::Argument("repeat count must be at least 1".into()));
    }
    let exact = exact_conformance(log, net, &config.cost, &config.alignment, config.workers)?;
    let mut sum = Timing::default();
    let mut last = None;
    for _ in 0..repeats {
        let r = approximate(log, net, key, config)?;
        sum.selection += r.timing.selection;
        sum.candidate_alignment += r.timing.candidate_alignment;
        sum.bounds += r.timing.bounds;
        last = Some(r);
    }
    let r = last.expect("repeats >= 1");
    let n = repeats as u32;
    let timing = Timing {
        selection: sum.selection / n,
        candidate_alignment: sum.candidate_alignment / n,
        bounds: sum.bounds / n,
    };
    Ok(BenchmarkReport {
        pi: ratio(exact.duration, timing.total()),
        pi_no_preprocess: ratio(exact.duration, timing.approx()),
        accuracy: (exact.fitness - r.log_approx).abs(),
        bound_width: r.log_upper - r.log_lower,
        exact_fitness: exact.fitness,
        approx_fitness: r.log_approx,
        lower: r.log_lower,
        upper: r.log_upper,
        exact_duration: exact.duration,
        timing,
        repeats,
    })
}

/// Unweighted mean over variants of the edit distance to the closest other
/// variant.
pub fn avg_nearest_neighbor_distance(log: &EventLog) -> Result<f64> {
    let variants = log.variants();
    if variants.len() < 2 {
        return Err(Error::Argument(
            "nearest-neighbor distance needs at least two variants".into(),
        ));
    }
    let nearest: Vec<usize> = (0..variants.len())
        .into_par_iter()
        .map(|i| {
            let s = &variants[i].0;
            let mut best = usize::MAX;
            for (j, (t, _)) in variants.iter().enumerate() {
                if i == j || s.len().abs_diff(t.len()) >= best {
                    continue;
                }
                best = best.min(crate::edit::edit_distance(s, t));
            }
            best
        })
        .collect();
    let s: KahanSum = nearest.iter().map(|&d| d as f64).collect();
    Ok(s.value() / nearest.len() as f64)
}
