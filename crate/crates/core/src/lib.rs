//! Graph-based identification of microservice candidates in a monolith.
//!
//! The analysis runs over a declarative fact model (facades, business
//! functions, tables and the calls/accesses between them) plus a table-to-area
//! map. See the `examples/` directory for one runnable walkthrough per step.

pub mod annotations;
pub mod candidate;
pub mod config;
pub mod decomposition;
pub mod error;
pub mod fixtures;
pub mod gateway;
pub mod graph;
pub mod model;
pub mod pipeline;
pub mod report;
pub mod verdict;

pub use annotations::{parse_annotations, Annotation, AnnotationSet};
pub use candidate::{derive_candidate_io, merge_candidates, synthesize_candidates, CandidateMicroservice};
pub use config::{parse_config, AnalysisConfig, DedupeMode};
pub use decomposition::{partition_tables, SubsystemId, SubsystemPartition};
pub use error::{AnalysisError, AreaMapError, ParseError};
pub use gateway::{classify_gateway, transaction_conflicts, GatewayAssessment, SyncCase};
pub use graph::{
    build_graph, export_dot, graph_metrics, pairs_for_subsystem, reachable_pairs, slice_for,
    DependencyGraph, FacadeTablePair, MetricsRow, Slice,
};
pub use model::{
    parse_area_map, parse_model, validate_model, AreaMap, IoSignature, SystemModel, ValidationReport,
    Violation, ViolationCode,
};
pub use pipeline::{analyze, run_pipeline, PipelineError, PipelineInputs};
pub use report::{render, CandidateReport, CaseCounts, Format, SubsystemReport};
pub use verdict::{classify_candidate, recommend, Classification, Recommendation, Verdict};
