//! Invariant properties over random valid models, shared by the invariant
//! suite and the acceptance gate.

use std::collections::BTreeSet;

use monoslicer::annotations::{Annotation, AnnotationSet};
use monoslicer::gateway::{GatewayAssessment, SyncCase};
use monoslicer::report::SubsystemReport;
use monoslicer::verdict::Classification;
use monoslicer::{
    analyze, build_graph, classify_candidate, merge_candidates, partition_tables, reachable_pairs, recommend, render,
    synthesize_candidates, AnalysisConfig, DedupeMode, Format, PipelineInputs,
};
use proptest::test_runner::TestCaseError;
use rand::seq::SliceRandom;
use rand::Rng;

use super::{random_valid, rng};

type Outcome = Result<(), TestCaseError>;

fn reports(seed: u64) -> Vec<SubsystemReport> {
    let (model, areas) = random_valid(seed);
    analyze(&PipelineInputs::new(model, areas)).expect("random valid models analyze")
}

/// Merging is a fixpoint: merging merged candidates changes nothing, and
/// the synthesizer's own merge output is already merged.
pub fn dedupe_idempotent(seed: u64) -> Outcome {
    let mut r = rng(seed);
    let (model, areas) = random_valid(seed);
    let graph = build_graph(&model);
    let partition = partition_tables(&model, &areas);
    let pairs = reachable_pairs(&graph);
    let off = AnalysisConfig {
        dedupe: DedupeMode::Off,
        ..AnalysisConfig::default()
    };
    for ss in partition.subsystem_ids() {
        // Name a random subset of slices from a tiny pool so names collide.
        let bare = synthesize_candidates(ss, &pairs, &graph, &model, &partition, None, &off).unwrap();
        let mut ann = AnnotationSet::new();
        for (i, c) in bare.iter().enumerate() {
            if r.gen_bool(0.5) {
                ann.insert(
                    format!("k{i}"),
                    Annotation {
                        functions: Some(c.functions()),
                        name: format!("{ss}.Op{}", r.gen_range(0..2)),
                        ..Annotation::default()
                    },
                );
            }
        }
        let drafts = synthesize_candidates(ss, &pairs, &graph, &model, &partition, Some(&ann), &off).unwrap();
        let once = merge_candidates(drafts);
        let twice = merge_candidates(once.clone());
        proptest::prop_assert_eq!(&once, &twice);

        let merged = synthesize_candidates(ss, &pairs, &graph, &model, &partition, Some(&ann), &AnalysisConfig::default())
            .unwrap();
        proptest::prop_assert_eq!(merge_candidates(merged.clone()), merged.clone());
        let names: BTreeSet<_> = merged.iter().map(|c| &c.name).collect();
        proptest::prop_assert_eq!(names.len(), merged.len());
    }
    Ok(())
}

fn random_case(r: &mut impl Rng) -> SyncCase {
    [SyncCase::SequentialI, SyncCase::IndependentII, SyncCase::SplitIII][r.gen_range(0..3)]
}

fn random_gateways(r: &mut impl Rng, n: usize) -> Vec<GatewayAssessment> {
    (0..n)
        .map(|i| {
            let case = random_case(r);
            GatewayAssessment {
                facade: format!("fc{i}"),
                candidate: "S.X".into(),
                case,
                async_eligible: case == SyncCase::IndependentII && r.gen_bool(0.5),
                slice_calls: vec![1],
            }
        })
        .collect()
}

/// Extra split gateways or conflicts never improve a verdict.
pub fn classification_monotone(seed: u64) -> Outcome {
    let mut r = rng(seed);
    let reports = reports(seed);
    let Some(c) = reports.iter().flat_map(|s| &s.candidates).next() else {
        return Ok(());
    };
    let n = r.gen_range(0..6);
    let gateways = random_gateways(&mut r, n);
    let conflicts: Vec<String> = (0..r.gen_range(0..2)).map(|i| format!("T{i}")).collect();
    let base = classify_candidate(&c.candidate, &gateways, &conflicts).verdict;

    let mut more = gateways.clone();
    more.extend(random_gateways(&mut r, 1));
    proptest::prop_assert!(classify_candidate(&c.candidate, &more, &conflicts).verdict >= base);
    let mut worse = conflicts.clone();
    worse.push("Tx".into());
    proptest::prop_assert!(classify_candidate(&c.candidate, &gateways, &worse).verdict >= base);
    Ok(())
}

/// Every (facade, candidate) assessment has exactly one case; counts add
/// up; only independent gateways can be asynchronous.
pub fn cases_exclusive(seed: u64) -> Outcome {
    for s in reports(seed) {
        proptest::prop_assert_eq!(s.candidate_count, s.candidates.len());
        for c in &s.candidates {
            let facades: Vec<&str> = c.candidate.source_facades().collect();
            let assessed: Vec<&str> = c.gateways.iter().map(|g| g.facade.as_str()).collect();
            proptest::prop_assert_eq!(&facades, &assessed);
            proptest::prop_assert_eq!(c.case_counts.total(), c.gateways.len());
            let per_case = |k: SyncCase| c.gateways.iter().filter(|g| g.case == k).count();
            proptest::prop_assert_eq!(c.case_counts.sequential, per_case(SyncCase::SequentialI));
            proptest::prop_assert_eq!(c.case_counts.independent, per_case(SyncCase::IndependentII));
            proptest::prop_assert_eq!(c.case_counts.split, per_case(SyncCase::SplitIII));
            for g in &c.gateways {
                proptest::prop_assert!(!g.async_eligible || g.case == SyncCase::IndependentII);
            }
        }
    }
    Ok(())
}

/// Shuffling the classifications and gateways leaves the recommendation
/// unchanged.
pub fn recommendation_order_independent(seed: u64) -> Outcome {
    let mut r = rng(seed);
    let (model, areas) = random_valid(seed);
    let partition = partition_tables(&model, &areas);
    let config = AnalysisConfig {
        max_split_gateways: r.gen_range(0..4),
        ..AnalysisConfig::default()
    };
    for s in analyze(&PipelineInputs {
        config: config.clone(),
        ..PipelineInputs::new(model.clone(), areas.clone())
    })
    .unwrap()
    {
        let mut classes: Vec<Classification> = s.candidates.iter().map(|c| c.classification.clone()).collect();
        let mut gateways: Vec<GatewayAssessment> = s.candidates.iter().flat_map(|c| c.gateways.clone()).collect();
        let original = recommend(&s.subsystem, &classes, &gateways, &partition, &config);
        proptest::prop_assert_eq!(&original, &s.recommendation);
        classes.shuffle(&mut r);
        gateways.shuffle(&mut r);
        proptest::prop_assert_eq!(recommend(&s.subsystem, &classes, &gateways, &partition, &config), original);
    }
    Ok(())
}

/// JSON render, parse, render gives the same bytes.
pub fn render_round_trip(seed: u64) -> Outcome {
    let reports = reports(seed);
    let json = render(&reports, Format::Json);
    let parsed: Vec<SubsystemReport> = serde_json::from_slice(&json).map_err(|e| TestCaseError::fail(e.to_string()))?;
    proptest::prop_assert_eq!(&parsed, &reports);
    proptest::prop_assert_eq!(render(&parsed, Format::Json), json);
    proptest::prop_assert_eq!(render(&parsed, Format::Markdown), render(&reports, Format::Markdown));
    Ok(())
}

pub const ALL: [(&str, fn(u64) -> Outcome); 5] = [
    ("dedupe idempotence", dedupe_idempotent),
    ("classification monotonicity", classification_monotone),
    ("case exclusivity", cases_exclusive),
    ("recommendation order-independence", recommendation_order_independent),
    ("render round-trip", render_round_trip),
];
