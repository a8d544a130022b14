//! Report shapes and their JSON / CSV renderings.

use std::time::Duration;

use clap::ValueEnum;
use confapprox_core::{
    ActivityKey, ApproxConfig, ApproximationResult, BenchmarkReport, DeviationStats, EventLog,
    ExactResult, TraceSource,
};
use serde::Serialize;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Serialize)]
struct Fitness {
    approx: f64,
    lower: f64,
    upper: f64,
}

#[derive(Serialize)]
struct Deviation {
    activity: String,
    insertions: u64,
    deletions: u64,
    synchronous: u64,
    ratio: f64,
}

#[derive(Serialize)]
struct Timing {
    preprocess_ms: f64,
    approx_ms: f64,
}

#[derive(Serialize)]
struct Variant {
    trace: Vec<String>,
    frequency: u64,
    source: &'static str,
    lower: f64,
    upper: f64,
    approx: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    cost: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_distance: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<String>>,
}

#[derive(Serialize)]
struct Report {
    method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    rule: Option<&'static str>,
    parameter: f64,
    seed: u64,
    spm: u64,
    fitness: Fitness,
    deviations: Vec<Deviation>,
    timing: Timing,
    #[serde(skip_serializing_if = "Option::is_none")]
    variants: Option<Vec<Variant>>,
}

#[derive(Serialize)]
struct Bench {
    method: &'static str,
    rule: &'static str,
    parameter: f64,
    seed: u64,
    workers: usize,
    repeats: usize,
    exact_ms: f64,
    preprocess_ms: f64,
    approx_ms: f64,
    total_ms: f64,
    pi: f64,
    pi_no_preprocess: f64,
    accuracy: f64,
    bound_width: f64,
    exact_fitness: f64,
    approx_fitness: f64,
    lower: f64,
    upper: f64,
}

#[derive(Serialize)]
struct LogStats {
    variants: usize,
    traces: u64,
    uniqueness: f64,
    avg_nearest_neighbor_distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'static str>,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn deviations(stats: &DeviationStats, key: &ActivityKey) -> Vec<Deviation> {
    stats
        .ranked(key)
        .into_iter()
        .map(|(a, d)| Deviation {
            activity: key.name(a).to_string(),
            insertions: d.insertions,
            deletions: d.deletions,
            synchronous: d.synchronous,
            ratio: d.ratio,
        })
        .collect()
}

pub fn approximation(
    r: &ApproximationResult,
    key: &ActivityKey,
    parameter: f64,
    per_variant: bool,
    format: Format,
) -> String {
    let variants = per_variant.then(|| {
        r.per_trace
            .iter()
            .map(|t| Variant {
                trace: key.names(&t.trace),
                frequency: t.frequency,
                source: match t.source {
                    TraceSource::CandidateExact => "candidate",
                    TraceSource::Approximated => "approximated",
                },
                lower: t.lower,
                upper: t.upper,
                approx: t.approx,
                cost: r.candidates.get(&t.trace).map(|c| c.exact_cost),
                min_distance: t.min_delta,
                witness: t.witness.as_ref().map(|w| key.names(w)),
            })
            .collect()
    });
    let report = Report {
        method: r.method.name(),
        rule: Some(r.rule.name()),
        parameter,
        seed: r.seed,
        spm: r.spm,
        fitness: Fitness {
            approx: r.log_approx,
            lower: r.log_lower,
            upper: r.log_upper,
        },
        deviations: deviations(&r.deviations, key),
        timing: Timing {
            preprocess_ms: ms(r.timing.preprocess()),
            approx_ms: ms(r.timing.approx()),
        },
        variants,
    };
    render(&report, format)
}

pub fn exact(
    r: &ExactResult,
    key: &ActivityKey,
    seed: u64,
    per_variant: bool,
    format: Format,
) -> String {
    let variants = per_variant.then(|| {
        r.per_trace
            .iter()
            .map(|v| Variant {
                trace: key.names(&v.trace),
                frequency: v.frequency,
                source: "exact",
                lower: v.fitness,
                upper: v.fitness,
                approx: v.fitness,
                cost: Some(v.alignment.cost),
                min_distance: None,
                witness: None,
            })
            .collect()
    });
    let report = Report {
        method: "exact",
        rule: None,
        parameter: 100.0,
        seed,
        spm: r.spm,
        fitness: Fitness {
            approx: r.fitness,
            lower: r.fitness,
            upper: r.fitness,
        },
        deviations: deviations(&r.deviations, key),
        timing: Timing {
            preprocess_ms: 0.0,
            approx_ms: ms(r.duration),
        },
        variants,
    };
    render(&report, format)
}

pub fn bench(b: &BenchmarkReport, config: &ApproxConfig, parameter: f64, format: Format) -> String {
    let row = Bench {
        method: config.method.name(),
        rule: config.effective_rule().name(),
        parameter,
        seed: config.seed,
        workers: config.workers,
        repeats: b.repeats,
        exact_ms: ms(b.exact_duration),
        preprocess_ms: ms(b.timing.preprocess()),
        approx_ms: ms(b.timing.approx()),
        total_ms: ms(b.timing.total()),
        pi: b.pi,
        pi_no_preprocess: b.pi_no_preprocess,
        accuracy: b.accuracy,
        bound_width: b.bound_width,
        exact_fitness: b.exact_fitness,
        approx_fitness: b.approx_fitness,
        lower: b.lower,
        upper: b.upper,
    };
    match format {
        Format::Json => json(&row),
        Format::Csv => table(std::iter::once(&row)),
    }
}

pub fn log_stats(log: &EventLog, nn: Option<f64>, format: Format) -> String {
    let stats = LogStats {
        variants: log.variant_count(),
        traces: log.total_traces(),
        uniqueness: log.variant_count() as f64 / log.total_traces() as f64,
        avg_nearest_neighbor_distance: nn,
        note: nn
            .is_none()
            .then_some("a single variant has no nearest neighbor"),
    };
    match format {
        Format::Json => json(&stats),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "variants",
                "traces",
                "uniqueness",
                "avg_nearest_neighbor_distance",
            ])
            .and_then(|_| {
                w.write_record([
                    stats.variants.to_string(),
                    stats.traces.to_string(),
                    stats.uniqueness.to_string(),
                    nn.map(|d| d.to_string()).unwrap_or_default(),
                ])
            })
            .expect("writing to memory");
            finish(w)
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn table<'a, T: Serialize + 'a>(rows: impl IntoIterator<Item = &'a T>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("writing to memory");
    }
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 output")
}

/// CSV output is a summary table, a blank line, the deviation table and,
/// with per-variant output, another blank line and the variant table.
fn render(report: &Report, format: Format) -> String {
    if format == Format::Json {
        return json(report);
    }
    #[derive(Serialize)]
    struct Summary {
        method: &'static str,
        rule: &'static str,
        parameter: f64,
        seed: u64,
        spm: u64,
        approx: f64,
        lower: f64,
        upper: f64,
        preprocess_ms: f64,
        approx_ms: f64,
    }
    let summary = Summary {
        method: report.method,
        rule: report.rule.unwrap_or(""),
        parameter: report.parameter,
        seed: report.seed,
        spm: report.spm,
        approx: report.fitness.approx,
        lower: report.fitness.lower,
        upper: report.fitness.upper,
        preprocess_ms: report.timing.preprocess_ms,
        approx_ms: report.timing.approx_ms,
    };
    let mut out = table(std::iter::once(&summary));
    out.push('\n');
    if report.deviations.is_empty() {
        out.push_str("activity,insertions,deletions,synchronous,ratio\n");
    } else {
        out.push_str(&table(&report.deviations));
    }
    if let Some(variants) = &report.variants {
        out.push('\n');
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "trace",
            "frequency",
            "source",
            "lower",
            "upper",
            "approx",
            "cost",
            "min_distance",
            "witness",
        ])
        .expect("writing to memory");
        for v in variants {
            let opt = |x: Option<String>| x.unwrap_or_default();
            w.write_record([
                v.trace.join(";"),
                v.frequency.to_string(),
                v.source.to_string(),
                v.lower.to_string(),
                v.upper.to_string(),
                v.approx.to_string(),
                opt(v.cost.map(|c| c.to_string())),
                opt(v.min_distance.map(|d| d.to_string())),
                opt(v.witness.as_ref().map(|w| w.join(";"))),
            ])
            .expect("writing to memory");
        }
        out.push_str(&finish(w));
    }
    out
}
