//! End-to-end analysis: parse, validate, partition, then per subsystem
//! synthesize candidates, assess gateways and recommend.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::annotations::{parse_annotations, AnnotationSet};
use crate::candidate::synthesize_candidates;
use crate::config::{parse_config, AnalysisConfig};
use crate::decomposition::{partition_tables, SubsystemPartition};
use crate::error::{AnalysisError, AreaMapError, ParseError};
use crate::gateway::{classify_gateway, transaction_conflicts};
use crate::graph::{build_graph, graph_metrics, reachable_pairs, DependencyGraph, FacadeTablePair};
use crate::model::{parse_area_map, parse_model, validate_model, AreaMap, SystemModel, ValidationReport};
use crate::report::{CandidateReport, CaseCounts, SubsystemReport};
use crate::verdict::{classify_candidate, recommend};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}: {source}")]
    Parse {
        file: String,
        #[source]
        source: ParseError,
    },
    #[error("{file}: {source}")]
    AreaMap {
        file: String,
        #[source]
        source: AreaMapError,
    },
    #[error("model violates {} invariant(s)", .0.violations.len())]
    Validation(ValidationReport),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

impl PipelineError {
    /// Process exit code: 3 for invariant violations, 2 for everything that
    /// prevents reading the inputs.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Validation(_) => 3,
            _ => 2,
        }
    }
}

/// Already-parsed inputs.
#[derive(Debug, Clone, Default)]
pub struct PipelineInputs {
    pub model: SystemModel,
    pub areas: AreaMap,
    pub annotations: Option<AnnotationSet>,
    pub config: AnalysisConfig,
    /// Empty means every subsystem.
    pub subsystems: Vec<String>,
}

impl PipelineInputs {
    pub fn new(model: SystemModel, areas: AreaMap) -> Self {
        PipelineInputs {
            model,
            areas,
            ..Default::default()
        }
    }
}

/// Runs the analysis over in-memory inputs. Reports come out in subsystem
/// name order; the control tables never form a report.
pub fn analyze(inputs: &PipelineInputs) -> Result<Vec<SubsystemReport>, PipelineError> {
    let validation = validate_model(&inputs.model, &inputs.areas);
    if !validation.is_valid() {
        return Err(PipelineError::Validation(validation));
    }
    let partition = partition_tables(&inputs.model, &inputs.areas);
    let selected: BTreeSet<&str> = if inputs.subsystems.is_empty() {
        partition.subsystem_ids().collect()
    } else {
        let mut sel = BTreeSet::new();
        for ss in &inputs.subsystems {
            partition.tables_of(ss)?;
            sel.insert(ss.as_str());
        }
        sel
    };

    let graph = build_graph(&inputs.model);
    let pairs = reachable_pairs(&graph);
    let ctx = Context {
        model: &inputs.model,
        graph: &graph,
        partition: &partition,
        pairs: &pairs,
        annotations: inputs.annotations.as_ref(),
        config: &inputs.config,
    };

    // Subsystems are independent once the graph and its closure exist.
    std::thread::scope(|scope| {
        let handles: Vec<_> = selected
            .iter()
            .map(|ss| scope.spawn(|| ctx.subsystem_report(ss)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("subsystem analysis panicked"))
            .collect::<Result<Vec<_>, _>>()
    })
    .map_err(PipelineError::from)
}

struct Context<'a> {
    model: &'a SystemModel,
    graph: &'a DependencyGraph,
    partition: &'a SubsystemPartition,
    pairs: &'a [FacadeTablePair],
    annotations: Option<&'a AnnotationSet>,
    config: &'a AnalysisConfig,
}

impl Context<'_> {
    fn subsystem_report(&self, ss: &str) -> Result<SubsystemReport, AnalysisError> {
        let metrics = graph_metrics(self.graph, self.partition, ss)?;
        let mut candidates = Vec::new();
        let mut all_gateways = Vec::new();
        let mut classifications = Vec::new();

        // Disregarded subsystems are not decomposed any further.
        if !self.partition.disqualified.contains(ss) {
            let synthesized = synthesize_candidates(
                ss,
                self.pairs,
                self.graph,
                self.model,
                self.partition,
                self.annotations,
                self.config,
            )?;
            for candidate in synthesized {
                let gateways = candidate
                    .source_facades()
                    .map(|f| classify_gateway(self.model, self.graph, f, &candidate))
                    .collect::<Result<Vec<_>, _>>()?;
                let conflicts = transaction_conflicts(self.graph, self.partition, &candidate);
                let classification = classify_candidate(&candidate, &gateways, &conflicts);
                all_gateways.extend(gateways.iter().cloned());
                classifications.push(classification.clone());
                candidates.push(CandidateReport {
                    case_counts: CaseCounts::tally(&gateways),
                    candidate,
                    classification,
                    gateways,
                    conflicts,
                });
            }
        }

        let recommendation = recommend(ss, &classifications, &all_gateways, self.partition, self.config);
        Ok(SubsystemReport {
            subsystem: ss.to_string(),
            metrics,
            candidate_count: candidates.len(),
            candidates,
            recommendation,
        })
    }
}

/// File-based entry point used by the CLI.
pub fn run_pipeline(
    model_path: &Path,
    areas_path: &Path,
    annotations_path: Option<&Path>,
    config_path: Option<&Path>,
    subsystems: &[String],
) -> Result<Vec<SubsystemReport>, PipelineError> {
    let (model, areas) = load_model(model_path, areas_path)?;
    let annotations = match annotations_path {
        Some(p) => Some(parse_annotations(&read(p)?).map_err(|source| PipelineError::Parse {
            file: p.display().to_string(),
            source,
        })?),
        None => None,
    };
    let config = match config_path {
        Some(p) => parse_config(&read(p)?).map_err(|source| PipelineError::Parse {
            file: p.display().to_string(),
            source,
        })?,
        None => AnalysisConfig::default(),
    };
    analyze(&PipelineInputs {
        model,
        areas,
        annotations,
        config,
        subsystems: subsystems.to_vec(),
    })
}

/// Reads and parses the fact file and area map.
pub fn load_model(model_path: &Path, areas_path: &Path) -> Result<(SystemModel, AreaMap), PipelineError> {
    let model = parse_model(&read(model_path)?).map_err(|source| PipelineError::Parse {
        file: model_path.display().to_string(),
        source,
    })?;
    let areas = parse_area_map(&read(areas_path)?).map_err(|source| PipelineError::AreaMap {
        file: areas_path.display().to_string(),
        source,
    })?;
    Ok((model, areas))
}

fn read(path: &Path) -> Result<Vec<u8>, PipelineError> {
    std::fs::read(path).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })
}
