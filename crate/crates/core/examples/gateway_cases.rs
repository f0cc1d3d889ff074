//! Gateway synchronization cases. Service charges mixes sequential and
//! independent gateways (the latter can go through a message queue);
//! clients needs every facade split, which only pays off under a relaxed
//! split limit.
//!
//!     cargo run --example gateway_cases

use monoslicer::fixtures;
use monoslicer::{analyze, AnalysisConfig, PipelineInputs};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for r in analyze(&fixtures::service_charges().inputs())? {
        println!("{}", r.subsystem);
        for c in &r.candidates {
            let k = c.case_counts;
            println!(
                "  {:<44} seq {:>2}  indep {:>2}  split {:>2}  async {:>2}  {:?}",
                c.candidate.name, k.sequential, k.independent, k.split, k.async_eligible, c.classification.verdict
            );
        }
        println!("  => {}", r.recommendation.label());
    }

    let clients = fixtures::clients();
    for limit in [AnalysisConfig::default().max_split_gateways, fixtures::CLIENT_FACADES] {
        let inputs = PipelineInputs {
            config: AnalysisConfig {
                max_split_gateways: limit,
                ..AnalysisConfig::default()
            },
            ..clients.inputs()
        };
        let r = &analyze(&inputs)?[0];
        println!(
            "{} with split limit {limit}: {} split gateway(s) => {}",
            r.subsystem,
            r.candidates.iter().map(|c| c.case_counts.split).sum::<usize>(),
            r.recommendation.label()
        );
    }
    Ok(())
}
