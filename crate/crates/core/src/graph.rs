//! Typed dependency graph over facades, business functions and tables, with
//! facade-to-table reachability, slicing and per-subsystem views.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::decomposition::SubsystemPartition;
use crate::error::AnalysisError;
use crate::model::{AccessMode, FacadeId, FunctionId, SystemModel, TableId, TxnScopeId};

pub type VertexIx = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VertexKind {
    Facade,
    Function,
    Table,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub kind: VertexKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    Call,
    Access,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub src: VertexIx,
    pub dst: VertexIx,
    pub kind: EdgeKind,
    pub ordinal: Option<u32>,
    pub mode: Option<AccessMode>,
    pub txn_scope: Option<TxnScopeId>,
}

#[derive(Debug, Clone)]
struct Closure {
    /// `reach[v]` holds every vertex reachable from `v`, `v` included.
    reach: Vec<FixedBitSet>,
    /// For table vertices: every vertex that reaches the table, the table
    /// included. Empty for other vertices.
    coreach: Vec<FixedBitSet>,
}

/// Vertices are stored sorted by name, so vertex index order is name order.
#[derive(Debug, Clone)]
pub struct DependencyGraph {
    vertices: Vec<Vertex>,
    index: HashMap<String, VertexIx>,
    edges: Vec<Edge>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
    functions: FixedBitSet,
    closure: OnceLock<Closure>,
}

/// Builds the graph view of a validated model. Edges whose endpoints are not
/// declared are skipped; validation reports them.
pub fn build_graph(model: &SystemModel) -> DependencyGraph {
    let mut vertices: Vec<Vertex> = Vec::new();
    let mut seen = BTreeSet::new();
    for (names, kind) in [
        (&model.facades, VertexKind::Facade),
        (&model.functions, VertexKind::Function),
        (&model.tables, VertexKind::Table),
    ] {
        for name in names {
            if seen.insert(name.as_str()) {
                vertices.push(Vertex { id: name.clone(), kind });
            }
        }
    }
    vertices.sort_by(|a, b| a.id.cmp(&b.id));
    let index: HashMap<String, VertexIx> =
        vertices.iter().enumerate().map(|(i, v)| (v.id.clone(), i)).collect();

    let mut edges = Vec::with_capacity(model.call_edges.len() + model.access_edges.len());
    for call in &model.call_edges {
        if let (Some(&src), Some(&dst)) = (index.get(&call.caller), index.get(&call.callee)) {
            edges.push(Edge {
                src,
                dst,
                kind: EdgeKind::Call,
                ordinal: Some(call.ordinal),
                mode: None,
                txn_scope: None,
            });
        }
    }
    for access in &model.access_edges {
        if let (Some(&src), Some(&dst)) = (index.get(&access.function), index.get(&access.table)) {
            edges.push(Edge {
                src,
                dst,
                kind: EdgeKind::Access,
                ordinal: None,
                mode: Some(access.mode),
                txn_scope: access.txn_scope.clone(),
            });
        }
    }

    let n = vertices.len();
    let mut out = vec![Vec::new(); n];
    let mut inc = vec![Vec::new(); n];
    for (i, e) in edges.iter().enumerate() {
        out[e.src].push(i);
        inc[e.dst].push(i);
    }
    for list in &mut out {
        list.sort_by_key(|&i| (edges[i].dst, edges[i].ordinal));
    }
    for list in &mut inc {
        list.sort_by_key(|&i| edges[i].src);
    }

    let mut functions = FixedBitSet::with_capacity(n);
    for (i, v) in vertices.iter().enumerate() {
        if v.kind == VertexKind::Function {
            functions.insert(i);
        }
    }

    DependencyGraph {
        vertices,
        index,
        edges,
        out,
        inc,
        functions,
        closure: OnceLock::new(),
    }
}

impl DependencyGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex(&self, ix: VertexIx) -> &Vertex {
        &self.vertices[ix]
    }

    pub fn index_of(&self, id: &str) -> Option<VertexIx> {
        self.index.get(id).copied()
    }

    pub fn kind_of(&self, id: &str) -> Option<VertexKind> {
        self.index_of(id).map(|ix| self.vertices[ix].kind)
    }

    pub fn count_kind(&self, kind: VertexKind) -> usize {
        self.vertices.iter().filter(|v| v.kind == kind).count()
    }

    pub fn count_edges(&self, kind: EdgeKind) -> usize {
        self.edges.iter().filter(|e| e.kind == kind).count()
    }

    pub fn facades(&self) -> impl Iterator<Item = VertexIx> + '_ {
        self.of_kind(VertexKind::Facade)
    }

    pub fn tables(&self) -> impl Iterator<Item = VertexIx> + '_ {
        self.of_kind(VertexKind::Table)
    }

    fn of_kind(&self, kind: VertexKind) -> impl Iterator<Item = VertexIx> + '_ {
        self.vertices
            .iter()
            .enumerate()
            .filter(move |(_, v)| v.kind == kind)
            .map(|(i, _)| i)
    }

    /// Outgoing edges of `ix`, ordered by target name.
    pub fn out_edges(&self, ix: VertexIx) -> impl Iterator<Item = &Edge> + '_ {
        self.out[ix].iter().map(move |&i| &self.edges[i])
    }

    pub fn in_edges(&self, ix: VertexIx) -> impl Iterator<Item = &Edge> + '_ {
        self.inc[ix].iter().map(move |&i| &self.edges[i])
    }

    /// Direct calls made by `caller`, in call order.
    pub fn calls_from(&self, caller: VertexIx) -> Vec<&Edge> {
        let mut calls: Vec<&Edge> =
            self.out_edges(caller).filter(|e| e.kind == EdgeKind::Call).collect();
        calls.sort_by_key(|e| e.ordinal);
        calls
    }

    pub(crate) fn function_mask(&self) -> &FixedBitSet {
        &self.functions
    }

    fn closure(&self) -> &Closure {
        self.closure.get_or_init(|| {
            let n = self.vertices.len();
            let mut stack = Vec::new();
            let traverse = |start: VertexIx, adj: &[Vec<usize>], forward: bool, stack: &mut Vec<VertexIx>| {
                let mut seen = FixedBitSet::with_capacity(n);
                seen.insert(start);
                stack.push(start);
                while let Some(v) = stack.pop() {
                    for &e in &adj[v] {
                        let next = if forward { self.edges[e].dst } else { self.edges[e].src };
                        if !seen.put(next) {
                            stack.push(next);
                        }
                    }
                }
                seen
            };
            let reach = (0..n).map(|v| traverse(v, &self.out, true, &mut stack)).collect();
            let coreach = (0..n)
                .map(|v| {
                    if self.vertices[v].kind == VertexKind::Table {
                        traverse(v, &self.inc, false, &mut stack)
                    } else {
                        FixedBitSet::new()
                    }
                })
                .collect();
            Closure { reach, coreach }
        })
    }

    /// Vertices reachable from `ix`, `ix` included.
    pub fn reach(&self, ix: VertexIx) -> &FixedBitSet {
        &self.closure().reach[ix]
    }

    /// Vertices that reach table `ix`, the table included. Empty for
    /// non-table vertices.
    pub fn coreach(&self, ix: VertexIx) -> &FixedBitSet {
        &self.closure().coreach[ix]
    }

    pub fn reaches(&self, from: VertexIx, to: VertexIx) -> bool {
        self.reach(from).contains(to)
    }

    /// Functions reachable from `facade` that reach at least one of `tables`.
    pub(crate) fn slice_bits(&self, facade: VertexIx, tables: &[VertexIx]) -> FixedBitSet {
        let mut towards = FixedBitSet::with_capacity(self.vertices.len());
        for &t in tables {
            towards.union_with(self.coreach(t));
        }
        towards.intersect_with(self.reach(facade));
        towards.intersect_with(&self.functions);
        towards
    }

    pub(crate) fn names(&self, bits: &FixedBitSet) -> BTreeSet<String> {
        bits.ones().map(|i| self.vertices[i].id.clone()).collect()
    }

    fn expect_kind(&self, id: &str, kind: VertexKind) -> Result<VertexIx, AnalysisError> {
        match self.index_of(id) {
            Some(ix) if self.vertices[ix].kind == kind => Ok(ix),
            _ => Err(AnalysisError::UnknownVertex(id.to_string())),
        }
    }
}

/// A facade connected to a table, with one witness path between them.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FacadeTablePair {
    pub facade: FacadeId,
    pub table: TableId,
    pub witness: Vec<String>,
}

/// All (facade, table) pairs joined by a directed path, ordered by facade
/// then table.
///
/// The witness for each pair is its path in the depth-first search tree
/// rooted at the facade, where successors are expanded in ascending name
/// order. The result is therefore reproducible across runs.
pub fn reachable_pairs(graph: &DependencyGraph) -> Vec<FacadeTablePair> {
    let n = graph.vertex_count();
    let mut pairs = Vec::new();
    for facade in graph.facades() {
        let mut parent: Vec<Option<VertexIx>> = vec![None; n];
        let mut visited = FixedBitSet::with_capacity(n);
        let mut found: Vec<VertexIx> = Vec::new();
        // Explicit stack of (vertex, next out-edge position).
        let mut stack: Vec<(VertexIx, usize)> = vec![(facade, 0)];
        visited.insert(facade);
        while let Some(top) = stack.last_mut() {
            let (v, pos) = *top;
            if pos >= graph.out[v].len() {
                stack.pop();
                continue;
            }
            top.1 += 1;
            let next = graph.edges[graph.out[v][pos]].dst;
            if visited.put(next) {
                continue;
            }
            parent[next] = Some(v);
            if graph.vertices[next].kind == VertexKind::Table {
                found.push(next);
            } else {
                stack.push((next, 0));
            }
        }
        found.sort_unstable();
        for table in found {
            let mut path = vec![table];
            let mut cur = table;
            while let Some(p) = parent[cur] {
                path.push(p);
                cur = p;
            }
            path.reverse();
            pairs.push(FacadeTablePair {
                facade: graph.vertices[facade].id.clone(),
                table: graph.vertices[table].id.clone(),
                witness: path.into_iter().map(|i| graph.vertices[i].id.clone()).collect(),
            });
        }
    }
    pairs
}

/// The pairs whose table belongs to `ss`.
pub fn pairs_for_subsystem(
    pairs: &[FacadeTablePair],
    partition: &SubsystemPartition,
    ss: &str,
) -> Result<Vec<FacadeTablePair>, AnalysisError> {
    let tables = partition.tables_of(ss)?;
    Ok(pairs.iter().filter(|p| tables.contains(&p.table)).cloned().collect())
}

/// The business functions lying on paths from a facade to a set of tables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Slice {
    pub facade: FacadeId,
    pub tables: BTreeSet<TableId>,
    pub functions: BTreeSet<FunctionId>,
}

/// Functions reachable from `facade` that themselves reach one of `tables`.
pub fn slice_for(
    graph: &DependencyGraph,
    facade: &str,
    tables: &BTreeSet<TableId>,
) -> Result<Slice, AnalysisError> {
    let f = graph.expect_kind(facade, VertexKind::Facade)?;
    let ts = tables
        .iter()
        .map(|t| graph.expect_kind(t, VertexKind::Table))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Slice {
        facade: facade.to_string(),
        tables: tables.clone(),
        functions: graph.names(&graph.slice_bits(f, &ts)),
    })
}

/// Size of a subsystem's induced subgraph. `functions` counts callable
/// vertices: the facades reaching the subsystem plus the business functions
/// on those paths.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub tables: usize,
    pub functions: usize,
    pub call_edges: usize,
    pub access_edges: usize,
}

/// The part of the graph that concerns one subsystem: its tables, the
/// facades reaching them, and the functions on those paths.
#[derive(Debug, Clone)]
pub(crate) struct InducedSubgraph {
    pub vertices: FixedBitSet,
    pub tables: FixedBitSet,
    pub callables: usize,
}

impl InducedSubgraph {
    pub fn contains_edge(&self, e: &Edge) -> bool {
        match e.kind {
            EdgeKind::Call => self.vertices.contains(e.src) && self.vertices.contains(e.dst),
            EdgeKind::Access => self.vertices.contains(e.src) && self.tables.contains(e.dst),
        }
    }
}

pub(crate) fn induced_subgraph(graph: &DependencyGraph, tables: &BTreeSet<TableId>) -> InducedSubgraph {
    let n = graph.vertex_count();
    let mut table_bits = FixedBitSet::with_capacity(n);
    let mut towards = FixedBitSet::with_capacity(n);
    for t in tables.iter().filter_map(|t| graph.index_of(t)) {
        table_bits.insert(t);
        towards.union_with(graph.coreach(t));
    }

    let mut from_facades = FixedBitSet::with_capacity(n);
    let mut vertices = table_bits.clone();
    let mut callables = 0;
    for f in graph.facades() {
        if !graph.reach(f).is_disjoint(&table_bits) {
            vertices.insert(f);
            callables += 1;
            from_facades.union_with(graph.reach(f));
        }
    }
    from_facades.intersect_with(&towards);
    from_facades.intersect_with(graph.function_mask());
    callables += from_facades.count_ones(..);
    vertices.union_with(&from_facades);

    InducedSubgraph {
        vertices,
        tables: table_bits,
        callables,
    }
}

/// Table/function/edge counts for the subsystem's induced subgraph.
pub fn graph_metrics(
    graph: &DependencyGraph,
    partition: &SubsystemPartition,
    ss: &str,
) -> Result<MetricsRow, AnalysisError> {
    let tables = partition.tables_of(ss)?;
    let sub = induced_subgraph(graph, tables);
    let mut row = MetricsRow {
        tables: tables.len(),
        functions: sub.callables,
        ..MetricsRow::default()
    };
    for e in graph.edges().iter().filter(|e| sub.contains_edge(e)) {
        match e.kind {
            EdgeKind::Call => row.call_edges += 1,
            EdgeKind::Access => row.access_edges += 1,
        }
    }
    Ok(row)
}

/// Renders the graph, or one subsystem's induced subgraph, as DOT. Output is
/// sorted and byte-stable.
pub fn export_dot(
    graph: &DependencyGraph,
    filter: Option<(&SubsystemPartition, &str)>,
) -> Result<String, AnalysisError> {
    let (name, sub) = match filter {
        Some((partition, ss)) => (ss, Some(induced_subgraph(graph, partition.tables_of(ss)?))),
        None => ("monolith", None),
    };
    let keep_vertex = |ix: VertexIx| sub.as_ref().is_none_or(|s| s.vertices.contains(ix));
    let keep_edge = |e: &Edge| sub.as_ref().is_none_or(|s| s.contains_edge(e));

    let mut dot = String::new();
    let _ = writeln!(dot, "digraph {} {{", quote(name));
    let _ = writeln!(dot, "  rankdir=LR;");
    for (_, v) in graph.vertices().iter().enumerate().filter(|(ix, _)| keep_vertex(*ix)) {
        let shape = match v.kind {
            VertexKind::Facade => "box",
            VertexKind::Function => "ellipse",
            VertexKind::Table => "cylinder",
        };
        let _ = writeln!(dot, "  {} [shape={shape}];", quote(&v.id));
    }

    let mut edges: Vec<&Edge> = graph.edges().iter().filter(|e| keep_edge(e)).collect();
    edges.sort_by(|a, b| {
        (a.src, a.dst, a.kind, a.ordinal, a.mode, &a.txn_scope)
            .cmp(&(b.src, b.dst, b.kind, b.ordinal, b.mode, &b.txn_scope))
    });
    for e in edges {
        let src = quote(&graph.vertex(e.src).id);
        let dst = quote(&graph.vertex(e.dst).id);
        match e.kind {
            EdgeKind::Call => {
                let _ = writeln!(dot, "  {src} -> {dst} [label=\"{}\"];", e.ordinal.unwrap_or(0));
            }
            EdgeKind::Access => {
                let mode = match e.mode {
                    Some(AccessMode::Write) => "write",
                    _ => "read",
                };
                let label = match &e.txn_scope {
                    Some(t) => format!("{mode} {t}"),
                    None => mode.to_string(),
                };
                let _ = writeln!(dot, "  {src} -> {dst} [style=dashed, label={}];", quote(&label));
            }
        }
    }
    dot.push_str("}\n");
    Ok(dot)
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::IoSignature;

    fn chain() -> DependencyGraph {
        let model = SystemModel::builder()
            .facade("fc", IoSignature::default())
            .facade("lonely", IoSignature::default())
            .function("a", IoSignature::default())
            .function("b", IoSignature::default())
            .function("c", IoSignature::default())
            .tables(["t1", "t2"])
            .call("fc", "a")
            .call("a", "b")
            .call("b", "a")
            .call("fc", "c")
            .read("b", "t1")
            .write("c", "t2", None)
            .build();
        build_graph(&model)
    }

    #[test]
    fn empty_model_gives_empty_graph() {
        let g = build_graph(&SystemModel::default());
        assert_eq!((g.vertex_count(), g.edge_count()), (0, 0));
        assert!(reachable_pairs(&g).is_empty());
        assert_eq!(export_dot(&g, None).unwrap(), "digraph \"monolith\" {\n  rankdir=LR;\n}\n");
    }

    #[test]
    fn cycles_terminate_and_witnesses_follow_edges() {
        let g = chain();
        let pairs = reachable_pairs(&g);
        let summary: Vec<_> = pairs.iter().map(|p| (p.facade.as_str(), p.table.as_str())).collect();
        assert_eq!(summary, vec![("fc", "t1"), ("fc", "t2")]);
        assert_eq!(pairs[0].witness, vec!["fc", "a", "b", "t1"]);
        assert_eq!(pairs[1].witness, vec!["fc", "c", "t2"]);
    }

    #[test]
    fn isolated_facade_has_no_pairs() {
        let g = chain();
        assert!(reachable_pairs(&g).iter().all(|p| p.facade != "lonely"));
        let s = slice_for(&g, "lonely", &BTreeSet::from(["t1".to_string()])).unwrap();
        assert!(s.functions.is_empty());
    }

    #[test]
    fn slice_includes_cycle_members() {
        let g = chain();
        let s = slice_for(&g, "fc", &BTreeSet::from(["t1".to_string()])).unwrap();
        assert_eq!(s.functions, BTreeSet::from(["a".to_string(), "b".to_string()]));
    }

    #[test]
    fn slice_rejects_unknown_vertices() {
        let g = chain();
        let t1 = BTreeSet::from(["t1".to_string()]);
        assert_eq!(slice_for(&g, "nope", &t1), Err(AnalysisError::UnknownVertex("nope".into())));
        assert_eq!(slice_for(&g, "a", &t1), Err(AnalysisError::UnknownVertex("a".into())));
        let bad = BTreeSet::from(["zz".to_string()]);
        assert_eq!(slice_for(&g, "fc", &bad), Err(AnalysisError::UnknownVertex("zz".into())));
    }

    #[test]
    fn calls_from_is_in_ordinal_order() {
        let g = chain();
        let fc = g.index_of("fc").unwrap();
        let callees: Vec<_> = g.calls_from(fc).iter().map(|e| g.vertex(e.dst).id.as_str()).collect();
        assert_eq!(callees, vec!["a", "c"]);
    }
}
