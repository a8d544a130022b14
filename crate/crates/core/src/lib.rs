//! Exact and approximated alignment-based conformance checking.
//!
//! The exact route aligns every trace variant against a labeled Petri net
//! with A*. The approximated route aligns only a few candidate variants (or
//! simulates the net), collects the resulting visible model traces, and
//! bounds the fitness of all remaining variants with an insertion/deletion
//! edit distance against that set.

pub mod alignment;
pub mod approx;
pub mod edit;
pub mod error;
pub mod generate;
pub mod log;
pub mod petri;
pub mod subset;
mod sum;
mod xml;

pub use alignment::{
    optimal_alignment, shortest_path_model, trace_fitness, Alignment, AlignmentConfig,
    CostFunction, Heuristic, Move, MoveKind,
};
pub use approx::{
    aggregate, approximate, approximate_trace, avg_nearest_neighbor_distance, benchmark,
    deviation_stats, exact_conformance, trace_bounds, ActivityDeviation, ApproxConfig,
    ApproximationResult, BenchmarkReport, DeviationStats, ExactResult, Method, Rule, TraceResult,
    TraceSource,
};
pub use edit::{edit_distance, edit_script, min_distance_to_set, EditOp, EditScript};
pub use error::{Error, ErrorClass, Result};
pub use log::{parse_csv, parse_xes, Activity, ActivityKey, CsvConfig, EventLog, Trace};
pub use petri::{parse_pnml, Marking, NetBuilder, PnmlOptions, SystemNet, TransitionId};
pub use subset::{CandidateInfo, CandidateSet, ModelBehaviorSet};
