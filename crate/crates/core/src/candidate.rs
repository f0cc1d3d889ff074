//! Candidate microservice synthesis: one descriptor per (facade, table)
//! pair, optionally merged, with derived input/output data.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::annotations::AnnotationSet;
use crate::config::{AnalysisConfig, DedupeMode};
use crate::decomposition::{SubsystemId, SubsystemPartition};
use crate::error::AnalysisError;
use crate::graph::{slice_for, DependencyGraph, FacadeTablePair, Slice};
use crate::model::{AccessMode, DataItem, FunctionId, IoSignature, SystemModel, TableId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateMicroservice {
    pub subsystem: SubsystemId,
    /// `<Subsystem>.<Process>`.
    pub name: String,
    /// Whether name, purpose and features come from an annotation.
    pub annotated: bool,
    pub purpose: String,
    pub io: IoSignature,
    pub features: Vec<String>,
    pub data: BTreeSet<TableId>,
    /// One slice per source facade, ordered by facade.
    pub slices: Vec<Slice>,
    pub source_pairs: Vec<FacadeTablePair>,
    pub hints: Vec<String>,
}

impl CandidateMicroservice {
    /// Union of the function slices of every source facade.
    pub fn functions(&self) -> BTreeSet<FunctionId> {
        self.slices.iter().flat_map(|s| s.functions.iter().cloned()).collect()
    }

    pub fn slice_of(&self, facade: &str) -> Option<&Slice> {
        self.slices.iter().find(|s| s.facade == facade)
    }

    pub fn source_facades(&self) -> impl Iterator<Item = &str> {
        self.slices.iter().map(|s| s.facade.as_str())
    }

    fn first_pair(&self) -> Option<&FacadeTablePair> {
        self.source_pairs.first()
    }
}

/// Functions reachable from the slice's facade that are not in the slice,
/// i.e. the code that stays behind in the residual facade.
pub(crate) fn residual_functions<'g>(
    graph: &'g DependencyGraph,
    slice: &Slice,
) -> Result<Vec<&'g str>, AnalysisError> {
    let facade = graph
        .index_of(&slice.facade)
        .ok_or_else(|| AnalysisError::UnknownVertex(slice.facade.clone()))?;
    let mut residual = graph.reach(facade).clone();
    residual.intersect_with(graph.function_mask());
    Ok(residual
        .ones()
        .map(|ix| graph.vertex(ix).id.as_str())
        .filter(|id| !slice.functions.contains(*id))
        .collect())
}

pub(crate) fn signature<'m>(model: &'m SystemModel, callable: &str) -> Result<&'m IoSignature, AnalysisError> {
    model
        .signature(callable)
        .ok_or_else(|| AnalysisError::MissingSignature(callable.to_string()))
}

/// Input/output data of the code a slice would move into a microservice.
///
/// Inputs are items read by a slice function and not written by another
/// slice function. Outputs are items written inside the slice that the
/// residual code (the facade body or its non-slice callees) reads, or that
/// the facade itself returns.
pub fn derive_candidate_io(
    model: &SystemModel,
    graph: &DependencyGraph,
    slice: &Slice,
) -> Result<IoSignature, AnalysisError> {
    let facade_sig = signature(model, &slice.facade)?;
    let slice_sigs = slice
        .functions
        .iter()
        .map(|f| signature(model, f))
        .collect::<Result<Vec<_>, _>>()?;

    let mut producers: HashMap<&DataItem, usize> = HashMap::new();
    for sig in &slice_sigs {
        for item in &sig.outputs {
            *producers.entry(item).or_default() += 1;
        }
    }

    let mut consumed_outside: BTreeSet<&DataItem> = facade_sig.inputs.iter().collect();
    for f in residual_functions(graph, slice)? {
        consumed_outside.extend(signature(model, f)?.inputs.iter());
    }

    let mut io = IoSignature::default();
    for sig in &slice_sigs {
        for item in &sig.inputs {
            let own = usize::from(sig.outputs.contains(item));
            if producers.get(item).copied().unwrap_or(0) <= own {
                io.inputs.insert(item.clone());
            }
        }
        for item in &sig.outputs {
            if consumed_outside.contains(item) || facade_sig.outputs.contains(item) {
                io.outputs.insert(item.clone());
            }
        }
    }
    Ok(io)
}

/// Builds one descriptor per pair, then (with [`DedupeMode::BySlice`]) merges
/// descriptors with equal function slices or equal annotated names.
///
/// Unannotated candidates are named `<Subsystem>.Process_<n>`, numbered in
/// canonical pair order.
pub fn synthesize_candidates(
    ss: &str,
    pairs: &[FacadeTablePair],
    graph: &DependencyGraph,
    model: &SystemModel,
    partition: &SubsystemPartition,
    annotations: Option<&AnnotationSet>,
    config: &AnalysisConfig,
) -> Result<Vec<CandidateMicroservice>, AnalysisError> {
    let ss_tables = partition.tables_of(ss)?;
    let mut pairs: Vec<&FacadeTablePair> =
        pairs.iter().filter(|p| ss_tables.contains(&p.table)).collect();
    pairs.sort();
    pairs.dedup();

    let mut drafts = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let slice = slice_for(graph, &pair.facade, &BTreeSet::from([pair.table.clone()]))?;
        let mut draft = CandidateMicroservice {
            subsystem: ss.to_string(),
            name: String::new(),
            annotated: false,
            purpose: String::new(),
            io: IoSignature::default(),
            features: Vec::new(),
            data: BTreeSet::from([pair.table.clone()]),
            slices: vec![slice],
            source_pairs: vec![pair.clone()],
            hints: Vec::new(),
        };
        let mut io_override = None;
        if let Some(a) = annotations.and_then(|set| set.lookup(ss, &draft.slices[0].functions)) {
            draft.annotated = true;
            draft.name = a.name.clone();
            draft.purpose = a.purpose.clone().unwrap_or_default();
            draft.features = a.features.clone();
            if a.inputs.is_some() || a.outputs.is_some() {
                io_override = Some(IoSignature {
                    inputs: a.inputs.clone().unwrap_or_default(),
                    outputs: a.outputs.clone().unwrap_or_default(),
                });
            }
        }
        drafts.push((draft, io_override));
    }

    let groups: Vec<Vec<usize>> = match config.dedupe {
        DedupeMode::BySlice => {
            let cands: Vec<&CandidateMicroservice> = drafts.iter().map(|(c, _)| c).collect();
            merge_groups(&cands)
        }
        DedupeMode::Off => (0..drafts.len()).map(|i| vec![i]).collect(),
    };

    let mut out = Vec::with_capacity(groups.len());
    for group in groups {
        let members: Vec<&CandidateMicroservice> = group.iter().map(|&i| &drafts[i].0).collect();
        let mut cand = merge_members(&members);
        let io_override = group.iter().find_map(|&i| drafts[i].1.clone());
        cand.io = match io_override {
            Some(io) => io,
            None => {
                let mut io = IoSignature::default();
                for slice in &cand.slices {
                    let part = derive_candidate_io(model, graph, slice)?;
                    io.inputs.extend(part.inputs);
                    io.outputs.extend(part.outputs);
                }
                io
            }
        };
        if !cand.annotated {
            cand.features = access_features(graph, &cand);
            cand.purpose = format!(
                "Undescribed operations over {}",
                cand.data.iter().cloned().collect::<Vec<_>>().join(", ")
            );
        }
        out.push(cand);
    }

    let prefix: String = ss.chars().filter(|c| !c.is_whitespace() && *c != '.').collect();
    let mut n = 0;
    for cand in out.iter_mut().filter(|c| !c.annotated) {
        n += 1;
        cand.name = format!("{prefix}.Process_{n}");
    }
    Ok(out)
}

/// Merges candidates whose function slices are equal or whose annotated
/// names are equal, repeating until nothing changes. Applying it to its own
/// output is a no-op.
pub fn merge_candidates(candidates: Vec<CandidateMicroservice>) -> Vec<CandidateMicroservice> {
    let refs: Vec<&CandidateMicroservice> = candidates.iter().collect();
    merge_groups(&refs)
        .into_iter()
        .map(|group| {
            if group.len() == 1 {
                candidates[group[0]].clone()
            } else {
                let members: Vec<&CandidateMicroservice> = group.iter().map(|&i| &candidates[i]).collect();
                merge_members(&members)
            }
        })
        .collect()
}

/// Index groups to merge, each sorted canonically, groups ordered by their
/// first source pair.
fn merge_groups(cands: &[&CandidateMicroservice]) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..cands.len()).collect();
    order.sort_by(|&a, &b| cands[a].first_pair().cmp(&cands[b].first_pair()).then(a.cmp(&b)));

    let mut groups: Vec<Vec<usize>> = order.into_iter().map(|i| vec![i]).collect();
    loop {
        let mut by_functions: HashMap<BTreeSet<FunctionId>, usize> = HashMap::new();
        let mut by_name: HashMap<&str, usize> = HashMap::new();
        let mut target: Vec<usize> = (0..groups.len()).collect();
        let mut changed = false;
        for (g, members) in groups.iter().enumerate() {
            let functions: BTreeSet<FunctionId> =
                members.iter().flat_map(|&i| cands[i].functions()).collect();
            let name = members
                .iter()
                .map(|&i| cands[i])
                .find(|c| c.annotated)
                .map(|c| c.name.as_str());
            let mut into = None;
            if let Some(&first) = by_functions.get(&functions) {
                into = Some(first);
            }
            if let Some(n) = name {
                if let Some(&first) = by_name.get(n) {
                    into = Some(into.map_or(first, |f: usize| f.min(first)));
                }
            }
            match into {
                Some(first) => {
                    target[g] = target[first];
                    changed = true;
                }
                None => {
                    by_functions.insert(functions, g);
                    if let Some(n) = name {
                        by_name.insert(n, g);
                    }
                }
            }
        }
        if !changed {
            return groups;
        }
        let mut merged: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (g, members) in groups.into_iter().enumerate() {
            merged.entry(target[g]).or_default().extend(members);
        }
        groups = merged.into_values().collect();
        for members in &mut groups {
            members.sort_by(|&a, &b| cands[a].first_pair().cmp(&cands[b].first_pair()).then(a.cmp(&b)));
        }
    }
}

fn merge_members(members: &[&CandidateMicroservice]) -> CandidateMicroservice {
    let first = members[0];
    let named = members.iter().find(|c| c.annotated).copied().unwrap_or(first);

    let mut slices: BTreeMap<&str, Slice> = BTreeMap::new();
    for slice in members.iter().flat_map(|c| &c.slices) {
        let merged = slices.entry(&slice.facade).or_insert_with(|| Slice {
            facade: slice.facade.clone(),
            tables: BTreeSet::new(),
            functions: BTreeSet::new(),
        });
        merged.tables.extend(slice.tables.iter().cloned());
        merged.functions.extend(slice.functions.iter().cloned());
    }
    let mut source_pairs: Vec<FacadeTablePair> =
        members.iter().flat_map(|c| c.source_pairs.iter().cloned()).collect();
    source_pairs.sort();
    source_pairs.dedup();

    let mut io = IoSignature::default();
    for c in members {
        io.inputs.extend(c.io.inputs.iter().cloned());
        io.outputs.extend(c.io.outputs.iter().cloned());
    }

    let mut cand = CandidateMicroservice {
        subsystem: first.subsystem.clone(),
        name: named.name.clone(),
        annotated: named.annotated,
        purpose: named.purpose.clone(),
        io,
        features: named.features.clone(),
        data: members.iter().flat_map(|c| c.data.iter().cloned()).collect(),
        slices: slices.into_values().collect(),
        source_pairs,
        hints: Vec::new(),
    };
    cand.hints = coverage_hints(&cand);
    cand
}

/// Flags tables that only some of the source facades reach.
fn coverage_hints(cand: &CandidateMicroservice) -> Vec<String> {
    let facades = cand.slices.len();
    if facades < 2 {
        return Vec::new();
    }
    cand.data
        .iter()
        .filter_map(|t| {
            let reaching = cand.source_pairs.iter().filter(|p| &p.table == t).count();
            (reaching < facades).then(|| {
                format!("table {t} is reached from only {reaching} of {facades} source facades")
            })
        })
        .collect()
}

/// Generated feature hints: one per (slice function, data table, mode).
fn access_features(graph: &DependencyGraph, cand: &CandidateMicroservice) -> Vec<String> {
    let mut rules: BTreeSet<(&str, &str, &str)> = BTreeSet::new();
    for f in cand.functions().iter().filter_map(|f| graph.index_of(f)) {
        for e in graph.out_edges(f) {
            let table = &graph.vertex(e.dst).id;
            let verb = match e.mode {
                Some(AccessMode::Read) => "Retrieve",
                Some(AccessMode::Write) => "Update",
                None => continue,
            };
            if cand.data.contains(table) {
                rules.insert((table, verb, &graph.vertex(f).id));
            }
        }
    }
    rules
        .into_iter()
        .map(|(table, verb, function)| format!("{verb} {table} records ({function})"))
        .collect()
}
