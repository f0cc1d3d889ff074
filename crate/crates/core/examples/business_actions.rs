//! The whole analysis on the business-actions subsystem: metrics, the single
//! merged candidate, its gateways and the markdown report.
//!
//!     cargo run --example business_actions

use monoslicer::fixtures;
use monoslicer::{analyze, render, Format, PipelineInputs};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fx = fixtures::business_actions();

    // Without annotations the two facades keep separate candidates: their
    // slices differ, and only a human-given name says they do one job.
    let bare = analyze(&PipelineInputs::new(fx.model.clone(), fx.areas.clone()))?;
    println!("unannotated: {} candidate(s)", bare[0].candidate_count);
    for c in &bare[0].candidates {
        println!("  {} covers {:?}", c.candidate.name, c.candidate.functions());
    }

    let reports = analyze(&fx.inputs())?;
    let ba = &reports[0];
    println!("annotated:   {} candidate(s)\n", ba.candidate_count);
    for c in &ba.candidates {
        for g in &c.gateways {
            println!("gateway {} -> {:?}", g.facade, g.case);
        }
    }
    println!();
    print!("{}", String::from_utf8(render(&reports, Format::Markdown))?);
    Ok(())
}
