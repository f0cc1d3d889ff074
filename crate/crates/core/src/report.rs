//! Report types and JSON / markdown rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::candidate::CandidateMicroservice;
use crate::decomposition::SubsystemId;
use crate::gateway::{GatewayAssessment, SyncCase};
use crate::graph::MetricsRow;
use crate::model::TxnScopeId;
use crate::verdict::{Classification, Recommendation};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseCounts {
    pub sequential: usize,
    pub independent: usize,
    pub split: usize,
    pub async_eligible: usize,
}

impl CaseCounts {
    pub fn tally(gateways: &[GatewayAssessment]) -> Self {
        let mut counts = CaseCounts::default();
        for g in gateways {
            match g.case {
                SyncCase::SequentialI => counts.sequential += 1,
                SyncCase::IndependentII => counts.independent += 1,
                SyncCase::SplitIII => counts.split += 1,
            }
            counts.async_eligible += usize::from(g.async_eligible);
        }
        counts
    }

    pub fn total(&self) -> usize {
        self.sequential + self.independent + self.split
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateReport {
    pub candidate: CandidateMicroservice,
    pub classification: Classification,
    pub gateways: Vec<GatewayAssessment>,
    pub case_counts: CaseCounts,
    pub conflicts: Vec<TxnScopeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsystemReport {
    pub subsystem: SubsystemId,
    pub metrics: MetricsRow,
    pub candidate_count: usize,
    pub candidates: Vec<CandidateReport>,
    pub recommendation: Recommendation,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Markdown,
}

pub fn render(reports: &[SubsystemReport], format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(reports).expect("reports always serialize");
            out.push(b'\n');
            out
        }
        Format::Markdown => render_markdown(reports).into_bytes(),
    }
}

fn render_markdown(reports: &[SubsystemReport]) -> String {
    let mut md = String::from("# Microservice candidates\n\n");
    if reports.is_empty() {
        md.push_str("No subsystems analyzed.\n");
        return md;
    }

    // Metrics are transposed: one column per subsystem.
    md.push_str("| Metric |");
    for r in reports {
        let _ = write!(md, " {} |", r.subsystem);
    }
    md.push_str("\n|---|");
    md.push_str(&"---:|".repeat(reports.len()));
    md.push('\n');
    let rows: [(&str, fn(&SubsystemReport) -> usize); 5] = [
        ("Tables", |r| r.metrics.tables),
        ("Functions", |r| r.metrics.functions),
        ("Function calls", |r| r.metrics.call_edges),
        ("Database accesses", |r| r.metrics.access_edges),
        ("Microservice candidates", |r| r.candidate_count),
    ];
    for (label, get) in rows {
        let _ = write!(md, "| {label} |");
        for r in reports {
            let _ = write!(md, " {} |", get(r));
        }
        md.push('\n');
    }

    for r in reports {
        let _ = write!(md, "\n## {}\n\n", r.subsystem);
        let _ = writeln!(md, "Recommendation: **{}**\n", r.recommendation.label());
        match &r.recommendation {
            Recommendation::Migrate { actions } => {
                for a in actions {
                    let _ = writeln!(md, "- {a}");
                }
            }
            Recommendation::DoNotMigrate { detail, .. } => {
                let _ = writeln!(md, "- {detail}");
            }
            Recommendation::Disregarded { shared_tables } => {
                let _ = writeln!(md, "- shared tables: {}", shared_tables.join(", "));
            }
        }
        for c in &r.candidates {
            candidate_block(&mut md, c);
        }
    }
    md
}

fn candidate_block(md: &mut String, c: &CandidateReport) {
    let m = &c.candidate;
    let _ = write!(md, "\n### {}\n\n", m.name);
    let _ = writeln!(md, "- Name: {}", m.name);
    let _ = writeln!(md, "- Purpose: {}", m.purpose);
    let _ = writeln!(
        md,
        "- Input-Output: in {{{}}}; out {{{}}}",
        join(&m.io.inputs),
        join(&m.io.outputs)
    );
    md.push_str("- Features:\n");
    for f in &m.features {
        let _ = writeln!(md, "  - {f}");
    }
    let _ = writeln!(md, "- Data: {}", join(&m.data));
    let _ = writeln!(md, "- Verdict: {:?}", c.classification.verdict);
    for reason in &c.classification.reasons {
        let _ = writeln!(md, "  - {reason}");
    }
    let k = &c.case_counts;
    let _ = writeln!(
        md,
        "- Gateways: {} sequential, {} independent, {} split, {} async-eligible",
        k.sequential, k.independent, k.split, k.async_eligible
    );
    for h in &m.hints {
        let _ = writeln!(md, "- Hint: {h}");
    }
}

fn join<'a>(items: impl IntoIterator<Item = &'a String>) -> String {
    items.into_iter().map(String::as_str).collect::<Vec<_>>().join(", ")
}
