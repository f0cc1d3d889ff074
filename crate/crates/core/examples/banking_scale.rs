//! Five banking subsystems side by side, then a seeded synthetic system the
//! size of a 750 KLOC monolith, timed end to end.
//!
//!     cargo run --release --example banking_scale [seed]

use std::time::Instant;

use monoslicer::fixtures::{self, BANKING_SCALE};
use monoslicer::{analyze, build_graph, render, Format};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let reports = analyze(&fixtures::banking().inputs())?;
    print!("{}", String::from_utf8(render(&reports, Format::Markdown))?.lines().take(9).collect::<Vec<_>>().join("\n"));
    println!("\n");
    for r in &reports {
        println!("{:<16} {}", r.subsystem, r.recommendation.label());
    }

    let seed = std::env::args().nth(1).map_or(Ok(42), |s| s.parse())?;
    let start = Instant::now();
    let fx = fixtures::synthetic(&BANKING_SCALE, seed);
    let graph = build_graph(&fx.model);
    let reports = analyze(&fx.inputs())?;
    let migrate = reports.iter().filter(|r| r.recommendation.is_migrate()).count();
    println!(
        "\nsynthetic (seed {seed}): {} vertices, {} edges, {} subsystems, {} candidates, {migrate} to migrate, {:.2?}",
        graph.vertex_count(),
        graph.edge_count(),
        reports.len(),
        reports.iter().map(|r| r.candidate_count).sum::<usize>(),
        start.elapsed()
    );
    Ok(())
}
