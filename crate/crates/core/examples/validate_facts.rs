//! Reading fact files: what a syntax error, a schema error and each kind of
//! invariant violation look like.
//!
//!     cargo run --example validate_facts

use monoslicer::fixtures;
use monoslicer::model::CallEdge;
use monoslicer::{parse_area_map, parse_model, validate_model};

fn main() {
    let fx = fixtures::business_actions();
    let json = fx.model.to_json();

    let truncated = &json[..json.len() / 2];
    println!("truncated file:   {}", parse_model(truncated.as_bytes()).unwrap_err());

    let mistyped = json.replacen("\"ordinal\": 1", "\"ordinal\": \"first\"", 1);
    println!("mistyped ordinal: {}", parse_model(mistyped.as_bytes()).unwrap_err());

    println!("bad area map:     {}", parse_area_map(b"table;area\nACO;BusinessActions\n").unwrap_err());

    let mut model = parse_model(json.as_bytes()).expect("round trip");
    println!("\nclean model valid: {}", validate_model(&model, &fx.areas).is_valid());

    // A second call from the same caller that skips ordinal 2, a call into
    // a facade, an edge to nowhere and a table nobody mapped.
    let caller = model.call_edges[0].caller.clone();
    model.call_edges.push(CallEdge {
        caller: caller.clone(),
        callee: "AUTPOScltBen".into(),
        ordinal: 3,
    });
    model.call_edges.push(CallEdge {
        caller: "AUTPOScltBen".into(),
        callee: "AUTCCErspSolAutCceNov".into(),
        ordinal: 2,
    });
    model.call_edges.push(CallEdge {
        caller: "AUTCCEvldCnl".into(),
        callee: "AUTCCEgone".into(),
        ordinal: 1,
    });
    model.tables.push("XTR".into());

    for v in validate_model(&model, &fx.areas).violations {
        println!("  {:?}: {}", v.code, v.message);
    }
}
