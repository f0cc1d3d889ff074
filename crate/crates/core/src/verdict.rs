//! Candidate verdicts and per-subsystem migration recommendations.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::candidate::CandidateMicroservice;
use crate::config::AnalysisConfig;
use crate::decomposition::SubsystemPartition;
use crate::gateway::{GatewayAssessment, SyncCase};
use crate::model::TableId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Strong,
    AdditionalEffort,
    NonCandidate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub reasons: Vec<String>,
}

/// A cross-subsystem write transaction rules the candidate out; otherwise a
/// single split gateway downgrades it to additional effort.
pub fn classify_candidate(
    candidate: &CandidateMicroservice,
    gateways: &[GatewayAssessment],
    conflicts: &[String],
) -> Classification {
    if !conflicts.is_empty() {
        let reasons = conflicts
            .iter()
            .map(|scope| {
                format!(
                    "transaction {scope} writes {} tables together with tables of another subsystem",
                    candidate.subsystem
                )
            })
            .collect();
        return Classification {
            verdict: Verdict::NonCandidate,
            reasons,
        };
    }
    let mut split: Vec<&str> = gateways
        .iter()
        .filter(|g| g.case == SyncCase::SplitIII)
        .map(|g| g.facade.as_str())
        .collect();
    split.sort_unstable();
    if split.is_empty() {
        Classification {
            verdict: Verdict::Strong,
            reasons: vec![format!(
                "all {} gateways synchronize sequentially or independently",
                gateways.len()
            )],
        }
    } else {
        Classification {
            verdict: Verdict::AdditionalEffort,
            reasons: split
                .into_iter()
                .map(|f| format!("facade {f} must be split around the service call"))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DoNotMigrateReason {
    NonCandidate,
    ExcessSplitEffort,
    NoCandidates,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Recommendation {
    Migrate { actions: Vec<String> },
    DoNotMigrate { reason: DoNotMigrateReason, detail: String },
    Disregarded { shared_tables: Vec<TableId> },
}

impl Recommendation {
    pub fn label(&self) -> &'static str {
        match self {
            Recommendation::Migrate { .. } => "Migrate",
            Recommendation::DoNotMigrate { reason: DoNotMigrateReason::NonCandidate, .. } => {
                "DoNotMigrate (non-candidate)"
            }
            Recommendation::DoNotMigrate { reason: DoNotMigrateReason::ExcessSplitEffort, .. } => {
                "DoNotMigrate (excess split effort)"
            }
            Recommendation::DoNotMigrate { reason: DoNotMigrateReason::NoCandidates, .. } => {
                "DoNotMigrate (no candidates)"
            }
            Recommendation::Disregarded { .. } => "Disregarded (shared tables)",
        }
    }

    pub fn is_migrate(&self) -> bool {
        matches!(self, Recommendation::Migrate { .. })
    }
}

/// Whole-subsystem recommendation. Order of the inputs is irrelevant.
pub fn recommend(
    ss: &str,
    classifications: &[Classification],
    gateways: &[GatewayAssessment],
    partition: &SubsystemPartition,
    config: &AnalysisConfig,
) -> Recommendation {
    if partition.disqualified.contains(ss) {
        return Recommendation::Disregarded {
            shared_tables: partition.shared_tables_of(ss),
        };
    }
    let non_candidates = classifications
        .iter()
        .filter(|c| c.verdict == Verdict::NonCandidate)
        .count();
    if non_candidates > 0 {
        return Recommendation::DoNotMigrate {
            reason: DoNotMigrateReason::NonCandidate,
            detail: format!("{non_candidates} candidate(s) take part in cross-subsystem write transactions"),
        };
    }
    if classifications.is_empty() {
        return Recommendation::DoNotMigrate {
            reason: DoNotMigrateReason::NoCandidates,
            detail: "no facade reaches the subsystem's tables".into(),
        };
    }
    let split = gateways.iter().filter(|g| g.case == SyncCase::SplitIII).count();
    if split > config.max_split_gateways {
        return Recommendation::DoNotMigrate {
            reason: DoNotMigrateReason::ExcessSplitEffort,
            detail: format!(
                "{split} gateways need a facade split (limit {})",
                config.max_split_gateways
            ),
        };
    }

    let tables = partition
        .tables_of(ss)
        .map(|t| t.iter().cloned().collect::<Vec<_>>().join(", "))
        .unwrap_or_default();
    let facades: BTreeSet<&str> = gateways.iter().map(|g| g.facade.as_str()).collect();
    Recommendation::Migrate {
        actions: vec![
            format!("Implement the {} identified microservice(s)", classifications.len()),
            format!("Create an independent database holding {tables}"),
            format!(
                "Develop {} API gateway(s), deployed alongside the monolith",
                facades.len()
            ),
            format!("Remove the {ss} code and tables from the monolith"),
        ],
    }
}
