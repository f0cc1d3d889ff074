//! Facade-to-table reachability on a four-function toy system, the pairs
//! that concern one subsystem, their slices, and a DOT rendering.
//!
//!     cargo run --example fig3_reachability

use std::collections::BTreeSet;

use monoslicer::fixtures;
use monoslicer::{build_graph, export_dot, pairs_for_subsystem, partition_tables, reachable_pairs, slice_for};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fx = fixtures::toy();
    let graph = build_graph(&fx.model);
    let partition = partition_tables(&fx.model, &fx.areas);

    println!("{} vertices, {} edges", graph.vertex_count(), graph.edge_count());
    let pairs = reachable_pairs(&graph);
    for p in &pairs {
        println!("({}, {})  via {}", p.facade, p.table, p.witness.join(" -> "));
    }

    let ss3 = pairs_for_subsystem(&pairs, &partition, "ss3")?;
    println!("\nss3 owns {:?}", partition.tables_of("ss3")?);
    for p in &ss3 {
        let slice = slice_for(&graph, &p.facade, &BTreeSet::from([p.table.clone()]))?;
        println!("  ({}, {}) slice = {:?}", p.facade, p.table, slice.functions);
    }

    println!("\n{}", export_dot(&graph, Some((&partition, "ss3")))?);
    Ok(())
}
