//! Table-to-area mapping with tables claimed by two areas. Every area that
//! claims a shared table is left out of the migration.
//!
//!     cargo run --example shared_tables

use monoslicer::fixtures;
use monoslicer::{analyze, partition_tables};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fx = fixtures::table_mapping();
    let partition = partition_tables(&fx.model, &fx.areas);

    println!("shared tables: {:?}", partition.shared_tables);
    for (table, areas) in &partition.shared_claims {
        println!("  {table} claimed by {areas:?}");
    }
    println!("disqualified:  {:?}\n", partition.disqualified);

    for r in analyze(&fx.inputs())? {
        println!("{:<18} {}", r.subsystem, r.recommendation.label());
    }
    Ok(())
}
