//! API gateway synchronization cases and the cross-subsystem transaction
//! check.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::candidate::{derive_candidate_io, residual_functions, signature, CandidateMicroservice};
use crate::decomposition::SubsystemPartition;
use crate::error::AnalysisError;
use crate::graph::{DependencyGraph, Edge};
use crate::model::{AccessMode, DataItem, SystemModel, TxnScopeId};

/// How a gateway would coordinate the extracted service `M` and the
/// residual facade `fc'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SyncCase {
    /// One feeds the other: call `fc'` then `M`, or `M` then `fc'`.
    SequentialI,
    /// Both only need the gateway input; order does not matter.
    IndependentII,
    /// `M` sits in the middle of the facade, which must be split in two.
    SplitIII,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GatewayAssessment {
    pub facade: String,
    pub candidate: String,
    pub case: SyncCase,
    /// The service has no outputs and can be fed through a message queue.
    pub async_eligible: bool,
    /// Ordinals of the facade's direct calls that lead into the slice.
    pub slice_calls: Vec<u32>,
}

/// Decides the synchronization case for one source facade of `candidate`.
///
/// With `S` the facade's direct calls whose callee subtree meets the slice:
/// a call in `S` whose callee is itself outside the slice has to be split,
/// giving `SplitIII`. Otherwise `SequentialI` needs `S` to be a prefix or a
/// suffix of the calls and data to flow in exactly one direction between `M`
/// and `fc'`; `IndependentII` needs no flow in either direction and both
/// sides fed from the facade inputs. Anything else is `SplitIII`.
pub fn classify_gateway(
    model: &SystemModel,
    graph: &DependencyGraph,
    facade: &str,
    candidate: &CandidateMicroservice,
) -> Result<GatewayAssessment, AnalysisError> {
    let slice = candidate
        .slice_of(facade)
        .ok_or_else(|| AnalysisError::NotASourceFacade {
            facade: facade.to_string(),
            candidate: candidate.name.clone(),
        })?;
    let facade_ix = graph
        .index_of(facade)
        .ok_or_else(|| AnalysisError::UnknownVertex(facade.to_string()))?;
    let slice_ix: Vec<usize> = slice.functions.iter().filter_map(|f| graph.index_of(f)).collect();

    let calls = graph.calls_from(facade_ix);
    let mut slice_positions = Vec::new();
    let mut slice_calls = Vec::new();
    let mut mixed = false;
    for (pos, call) in calls.iter().enumerate() {
        let subtree = graph.reach(call.dst);
        if slice_ix.iter().any(|&f| subtree.contains(f)) {
            slice_positions.push(pos);
            slice_calls.push(call.ordinal.unwrap_or(0));
            if !slice.functions.contains(&graph.vertex(call.dst).id) {
                mixed = true;
            }
        }
    }
    let k = calls.len();
    let s = slice_positions.len();
    let prefix = s > 0 && slice_positions.iter().copied().eq(0..s);
    let suffix = s > 0 && slice_positions.iter().copied().eq(k - s..k);

    let service = derive_candidate_io(model, graph, slice)?;
    let facade_sig = signature(model, facade)?;

    // Residual facade: the facade body plus its non-slice callees.
    let mut residual_in: BTreeSet<&DataItem> = facade_sig.inputs.iter().collect();
    let mut residual_out: BTreeSet<&DataItem> = facade_sig.outputs.iter().collect();
    let mut callee_out: BTreeSet<&DataItem> = BTreeSet::new();
    for f in residual_functions(graph, slice)? {
        let sig = signature(model, f)?;
        residual_in.extend(sig.inputs.iter());
        residual_out.extend(sig.outputs.iter());
        callee_out.extend(sig.outputs.iter());
    }
    let mut slice_out: BTreeSet<&DataItem> = BTreeSet::new();
    for f in &slice.functions {
        slice_out.extend(signature(model, f)?.outputs.iter());
    }
    let residual_inputs: BTreeSet<&DataItem> = residual_in.difference(&callee_out).copied().collect();
    let residual_outputs: BTreeSet<&DataItem> = residual_out
        .iter()
        .copied()
        .filter(|item| !slice_out.contains(item) || callee_out.contains(item))
        .collect();

    let service_feeds_residual = service.outputs.iter().any(|x| residual_inputs.contains(x));
    let residual_feeds_service = service.inputs.iter().any(|x| residual_outputs.contains(x));
    let from_gateway_input = |x: &DataItem| facade_sig.inputs.contains(x);

    let case = if mixed {
        SyncCase::SplitIII
    } else if (prefix || suffix) && (service_feeds_residual != residual_feeds_service) {
        SyncCase::SequentialI
    } else if !service_feeds_residual
        && !residual_feeds_service
        && service.inputs.iter().all(from_gateway_input)
        && residual_inputs.iter().all(|x| from_gateway_input(x))
    {
        SyncCase::IndependentII
    } else {
        SyncCase::SplitIII
    };

    Ok(GatewayAssessment {
        facade: facade.to_string(),
        candidate: candidate.name.clone(),
        case,
        async_eligible: case == SyncCase::IndependentII && candidate.io.outputs.is_empty(),
        slice_calls,
    })
}

/// Transaction scopes in which the candidate's functions write one of its
/// subsystem's tables while the same scope also writes a business table of
/// another subsystem. Control tables never count.
pub fn transaction_conflicts(
    graph: &DependencyGraph,
    partition: &SubsystemPartition,
    candidate: &CandidateMicroservice,
) -> Vec<TxnScopeId> {
    let scoped_writes = |e: &'_ Edge| e.mode == Some(AccessMode::Write) && e.txn_scope.is_some();
    let empty = BTreeSet::new();
    let own_tables = partition.tables_of(&candidate.subsystem).unwrap_or(&empty);

    let mut inside: BTreeSet<&TxnScopeId> = BTreeSet::new();
    for f in candidate.functions().iter().filter_map(|f| graph.index_of(f)) {
        for e in graph.out_edges(f).filter(|e| scoped_writes(e)) {
            if own_tables.contains(&graph.vertex(e.dst).id) {
                inside.extend(e.txn_scope.as_ref());
            }
        }
    }
    if inside.is_empty() {
        return Vec::new();
    }
    let mut conflicts: BTreeSet<&TxnScopeId> = BTreeSet::new();
    for e in graph.edges().iter().filter(|e| scoped_writes(e)) {
        let scope = e.txn_scope.as_ref().expect("filtered on scope");
        if !inside.contains(scope) || conflicts.contains(scope) {
            continue;
        }
        let table = &graph.vertex(e.dst).id;
        if !own_tables.contains(table) && !partition.is_control(table) {
            conflicts.insert(scope);
        }
    }
    conflicts.into_iter().cloned().collect()
}
