//! The monolith as a set of facts: facades, business functions, tables, the
//! calls and table accesses between them, and per-callable data signatures.
//!
//! A fact file is a JSON document:
//!
//! ```json
//! {
//!   "facades": ["fc1"],
//!   "functions": ["bf1"],
//!   "tables": ["tb1"],
//!   "calls": [{"caller": "fc1", "callee": "bf1", "ordinal": 1}],
//!   "accesses": [{"function": "bf1", "table": "tb1", "mode": "write", "txn": "T1"}],
//!   "signatures": {"fc1": {"in": ["id"], "out": []}, "bf1": {"in": ["id"], "out": []}}
//! }
//! ```
//!
//! The area map is a `table,area` CSV; rows whose area is [`CONTROL_AREA`]
//! place the table in the control subsystem.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{AreaMapError, ParseError};

pub type FacadeId = String;
pub type FunctionId = String;
pub type TableId = String;
/// A facade or a business function.
pub type CallableId = String;
pub type AreaName = String;
pub type TxnScopeId = String;
pub type DataItem = String;

/// Area name reserved for the control subsystem (logs, error messages, ...).
pub const CONTROL_AREA: &str = "control";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CallEdge {
    pub caller: CallableId,
    pub callee: FunctionId,
    /// 1-based position of the call within the caller's body.
    pub ordinal: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AccessMode {
    Read,
    Write,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AccessEdge {
    pub function: FunctionId,
    pub table: TableId,
    pub mode: AccessMode,
    #[serde(rename = "txn", default, skip_serializing_if = "Option::is_none")]
    pub txn_scope: Option<TxnScopeId>,
}

/// Data items a callable's own body reads (`in`) and writes (`out`).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IoSignature {
    #[serde(rename = "in")]
    pub inputs: BTreeSet<DataItem>,
    #[serde(rename = "out")]
    pub outputs: BTreeSet<DataItem>,
}

impl IoSignature {
    pub fn new<I, O, S, T>(inputs: I, outputs: O) -> Self
    where
        I: IntoIterator<Item = S>,
        O: IntoIterator<Item = T>,
        S: Into<String>,
        T: Into<String>,
    {
        IoSignature {
            inputs: inputs.into_iter().map(Into::into).collect(),
            outputs: outputs.into_iter().map(Into::into).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty() && self.outputs.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemModel {
    pub facades: Vec<FacadeId>,
    pub functions: Vec<FunctionId>,
    pub tables: Vec<TableId>,
    #[serde(rename = "calls")]
    pub call_edges: Vec<CallEdge>,
    #[serde(rename = "accesses")]
    pub access_edges: Vec<AccessEdge>,
    pub signatures: BTreeMap<CallableId, IoSignature>,
}

impl SystemModel {
    pub fn builder() -> ModelBuilder {
        ModelBuilder::default()
    }

    pub fn signature(&self, callable: &str) -> Option<&IoSignature> {
        self.signatures.get(callable)
    }

    /// Serializes back into the fact-file format.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialization is infallible")
    }
}

/// Parses a fact file. Declared but unreferenced vertices are kept.
pub fn parse_model(raw: &[u8]) -> Result<SystemModel, ParseError> {
    let de = &mut serde_json::Deserializer::from_slice(raw);
    let model: SystemModel = serde_path_to_error::deserialize(de).map_err(ParseError::from_json)?;

    for (field, names) in [
        ("facades", &model.facades),
        ("functions", &model.functions),
        ("tables", &model.tables),
    ] {
        if let Some(i) = names.iter().position(|n| n.is_empty()) {
            return Err(ParseError::schema(format!("{field}[{i}]"), "empty identifier"));
        }
    }

    for callable in model.facades.iter().chain(&model.functions) {
        if !model.signatures.contains_key(callable) {
            return Err(ParseError::schema(
                format!("signatures.{callable}"),
                format!("missing signature for declared callable `{callable}`"),
            ));
        }
    }
    for (name, sig) in &model.signatures {
        if !model.facades.contains(name) && !model.functions.contains(name) {
            return Err(ParseError::schema(
                format!("signatures.{name}"),
                format!("`{name}` is not a declared facade or function"),
            ));
        }
        for (key, items) in [("in", &sig.inputs), ("out", &sig.outputs)] {
            if items.iter().any(String::is_empty) {
                return Err(ParseError::schema(
                    format!("signatures.{name}.{key}"),
                    "empty data item name",
                ));
            }
        }
    }
    Ok(model)
}

/// Incremental construction of a [`SystemModel`]; call ordinals are assigned
/// in insertion order per caller.
#[derive(Debug, Default)]
pub struct ModelBuilder {
    model: SystemModel,
    next_ordinal: HashMap<CallableId, u32>,
}

impl ModelBuilder {
    pub fn facade(mut self, name: &str, sig: IoSignature) -> Self {
        self.model.facades.push(name.to_string());
        self.model.signatures.insert(name.to_string(), sig);
        self
    }

    pub fn function(mut self, name: &str, sig: IoSignature) -> Self {
        self.model.functions.push(name.to_string());
        self.model.signatures.insert(name.to_string(), sig);
        self
    }

    pub fn table(mut self, name: &str) -> Self {
        self.model.tables.push(name.to_string());
        self
    }

    pub fn tables<'a>(mut self, names: impl IntoIterator<Item = &'a str>) -> Self {
        for name in names {
            self = self.table(name);
        }
        self
    }

    pub fn call(mut self, caller: &str, callee: &str) -> Self {
        let ordinal = self.next_ordinal.entry(caller.to_string()).or_insert(0);
        *ordinal += 1;
        self.model.call_edges.push(CallEdge {
            caller: caller.to_string(),
            callee: callee.to_string(),
            ordinal: *ordinal,
        });
        self
    }

    pub fn read(self, function: &str, table: &str) -> Self {
        self.access(function, table, AccessMode::Read, None)
    }

    pub fn write(self, function: &str, table: &str, txn: Option<&str>) -> Self {
        self.access(function, table, AccessMode::Write, txn)
    }

    pub fn access(mut self, function: &str, table: &str, mode: AccessMode, txn: Option<&str>) -> Self {
        self.model.access_edges.push(AccessEdge {
            function: function.to_string(),
            table: table.to_string(),
            mode,
            txn_scope: txn.map(str::to_string),
        });
        self
    }

    pub fn build(self) -> SystemModel {
        self.model
    }
}

/// Assignment of tables to business areas, plus the control tables.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AreaMap {
    pub assignments: BTreeMap<TableId, BTreeSet<AreaName>>,
    pub control_tables: BTreeSet<TableId>,
}

impl AreaMap {
    pub fn assign(&mut self, table: &str, area: &str) {
        if area == CONTROL_AREA {
            self.control_tables.insert(table.to_string());
        } else {
            self.assignments
                .entry(table.to_string())
                .or_default()
                .insert(area.to_string());
        }
    }

    pub fn is_mapped(&self, table: &str) -> bool {
        self.assignments.contains_key(table) || self.control_tables.contains(table)
    }

    /// Renders the map as `table,area` CSV, sorted by table then area.
    pub fn to_csv(&self) -> String {
        let mut rows: Vec<(&str, &str)> = self
            .assignments
            .iter()
            .flat_map(|(t, areas)| areas.iter().map(move |a| (t.as_str(), a.as_str())))
            .chain(self.control_tables.iter().map(|t| (t.as_str(), CONTROL_AREA)))
            .collect();
        rows.sort_unstable();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["table", "area"]).expect("in-memory write");
        for row in rows {
            w.write_record([row.0, row.1]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }
}

/// Parses a `table,area` CSV document.
pub fn parse_area_map(raw: &[u8]) -> Result<AreaMap, AreaMapError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(raw);
    let syntax = |e: csv::Error| AreaMapError::Syntax {
        line: e.position().map_or(0, |p| p.line()),
        message: e.to_string(),
    };

    let headers = reader.headers().map_err(syntax)?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(AreaMapError::EmptyMap);
    }
    if headers.len() != 2 || &headers[0] != "table" || &headers[1] != "area" {
        return Err(AreaMapError::Syntax {
            line: 1,
            message: "expected header `table,area`".into(),
        });
    }

    let mut map = AreaMap::default();
    let mut rows = 0usize;
    for record in reader.records() {
        let record = record.map_err(syntax)?;
        let line = record.position().map_or(0, |p| p.line());
        let (table, area) = (&record[0], &record[1]);
        if table.is_empty() || area.is_empty() {
            return Err(AreaMapError::Syntax {
                line,
                message: "empty table or area".into(),
            });
        }
        map.assign(table, area);
        rows += 1;
    }
    if rows == 0 {
        return Err(AreaMapError::EmptyMap);
    }
    if let Some(t) = map.control_tables.iter().find(|t| map.assignments.contains_key(*t)) {
        return Err(AreaMapError::ControlConflict(t.clone()));
    }
    Ok(map)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ViolationCode {
    DanglingEdge,
    FacadeAccessesTable,
    OrdinalGap,
    UnmappedTable,
    CallToFacade,
    DuplicateId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn codes(&self) -> Vec<ViolationCode> {
        self.violations.iter().map(|v| v.code).collect()
    }

    fn push(&mut self, code: ViolationCode, message: String) {
        self.violations.push(Violation { code, message });
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Facade,
    Function,
    Table,
}

/// Checks the structural rules the analysis relies on. Violations are
/// returned, not raised.
pub fn validate_model(model: &SystemModel, map: &AreaMap) -> ValidationReport {
    let mut report = ValidationReport::default();

    let mut kinds: HashMap<&str, Kind> = HashMap::new();
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    for (names, kind) in [
        (&model.facades, Kind::Facade),
        (&model.functions, Kind::Function),
        (&model.tables, Kind::Table),
    ] {
        for name in names {
            kinds.entry(name).or_insert(kind);
            *seen.entry(name).or_default() += 1;
        }
    }
    for (name, count) in seen {
        if count > 1 {
            report.push(
                ViolationCode::DuplicateId,
                format!("`{name}` is declared {count} times"),
            );
        }
    }

    let mut ordinals: BTreeMap<&str, Vec<u32>> = BTreeMap::new();
    for call in &model.call_edges {
        let caller = kinds.get(call.caller.as_str()).copied();
        let callee = kinds.get(call.callee.as_str()).copied();
        if !matches!(caller, Some(Kind::Facade | Kind::Function)) {
            report.push(
                ViolationCode::DanglingEdge,
                format!("call {} -> {}: caller is not a facade or function", call.caller, call.callee),
            );
        } else if callee == Some(Kind::Facade) {
            report.push(
                ViolationCode::CallToFacade,
                format!("call {} -> {}: facades cannot be called", call.caller, call.callee),
            );
        } else if callee != Some(Kind::Function) {
            report.push(
                ViolationCode::DanglingEdge,
                format!("call {} -> {}: callee is not a function", call.caller, call.callee),
            );
        }
        ordinals.entry(&call.caller).or_default().push(call.ordinal);
    }
    for (caller, mut ords) in ordinals {
        ords.sort_unstable();
        if ords.iter().zip(1u32..).any(|(&o, expected)| o != expected) {
            report.push(
                ViolationCode::OrdinalGap,
                format!("calls of `{caller}` have ordinals {ords:?}, expected 1..={}", ords.len()),
            );
        }
    }

    for access in &model.access_edges {
        let source = kinds.get(access.function.as_str()).copied();
        let target = kinds.get(access.table.as_str()).copied();
        if source == Some(Kind::Facade) {
            report.push(
                ViolationCode::FacadeAccessesTable,
                format!("facade `{}` accesses table `{}`", access.function, access.table),
            );
        } else if source != Some(Kind::Function) || target != Some(Kind::Table) {
            report.push(
                ViolationCode::DanglingEdge,
                format!("access {} -> {}: expected function -> table", access.function, access.table),
            );
        }
    }

    for table in &model.tables {
        if !map.is_mapped(table) {
            report.push(
                ViolationCode::UnmappedTable,
                format!("table `{table}` has no area or control assignment"),
            );
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SystemModel {
        SystemModel::builder()
            .facade("fc1", IoSignature::default())
            .facade("fc2", IoSignature::default())
            .function("bf1", IoSignature::new(["a"], ["b"]))
            .function("bf2", IoSignature::default())
            .function("bf3", IoSignature::default())
            .tables(["t1", "t2", "t3"])
            .call("fc1", "bf1")
            .call("bf1", "bf2")
            .read("bf2", "t1")
            .write("bf3", "t2", Some("T1"))
            .build()
    }

    fn full_map(model: &SystemModel) -> AreaMap {
        let mut map = AreaMap::default();
        for t in &model.tables {
            map.assign(t, "Area");
        }
        map
    }

    #[test]
    fn parses_declared_counts() {
        let model = parse_model(small().to_json().as_bytes()).unwrap();
        assert_eq!(model.facades.len(), 2);
        assert_eq!(model.functions.len(), 3);
        assert_eq!(model.tables.len(), 3);
        assert_eq!(model, small());
    }

    #[test]
    fn missing_signature_names_the_function() {
        let mut doc: serde_json::Value = serde_json::from_str(&small().to_json()).unwrap();
        doc["signatures"].as_object_mut().unwrap().remove("bf3");
        let err = parse_model(doc.to_string().as_bytes()).unwrap_err();
        match err {
            ParseError::Schema { path, message } => {
                assert_eq!(path, "signatures.bf3");
                assert!(message.contains("bf3"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse_model(b"{\n  \"facades\": [,\n}").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn mistyped_field_is_schema_error_with_path() {
        let raw = br#"{"facades":[],"functions":[],"tables":[],"calls":[{"caller":"a","callee":"b","ordinal":"x"}],"accesses":[],"signatures":{}}"#;
        match parse_model(raw).unwrap_err() {
            ParseError::Schema { path, .. } => assert_eq!(path, "calls[0].ordinal"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_access_mode_is_schema_error() {
        let raw = br#"{"facades":[],"functions":[],"tables":[],"calls":[],"accesses":[{"function":"f","table":"t","mode":"delete"}],"signatures":{}}"#;
        assert!(matches!(parse_model(raw), Err(ParseError::Schema { .. })));
    }

    #[test]
    fn area_map_collapses_duplicates_and_keeps_shared() {
        let raw = b"table,area\nCNT,CurrentAccounts\nCNT,SavingAccounts\nCNT,SavingAccounts\nCLT,Clients\nLOG,control\n";
        let map = parse_area_map(raw).unwrap();
        assert_eq!(
            map.assignments["CNT"],
            BTreeSet::from(["CurrentAccounts".to_string(), "SavingAccounts".to_string()])
        );
        assert_eq!(map.assignments["CLT"], BTreeSet::from(["Clients".to_string()]));
        assert_eq!(map.control_tables, BTreeSet::from(["LOG".to_string()]));
        assert_eq!(parse_area_map(map.to_csv().as_bytes()).unwrap(), map);
    }

    #[test]
    fn area_map_errors() {
        assert_eq!(parse_area_map(b""), Err(AreaMapError::EmptyMap));
        assert_eq!(parse_area_map(b"table,area\n"), Err(AreaMapError::EmptyMap));
        assert!(matches!(parse_area_map(b"tbl,area\nA,B\n"), Err(AreaMapError::Syntax { .. })));
        assert!(matches!(parse_area_map(b"table,area\nA,B,C\n"), Err(AreaMapError::Syntax { .. })));
        assert_eq!(
            parse_area_map(b"table,area\nA,control\nA,Sales\n"),
            Err(AreaMapError::ControlConflict("A".into()))
        );
        assert!(parse_area_map(b"table,area\nA,control\n").is_ok());
    }

    #[test]
    fn valid_model_has_no_violations() {
        let model = small();
        assert!(validate_model(&model, &full_map(&model)).is_valid());
    }

    #[test]
    fn facade_access_is_flagged() {
        let mut model = small();
        model.access_edges.push(AccessEdge {
            function: "fc2".into(),
            table: "t3".into(),
            mode: AccessMode::Read,
            txn_scope: None,
        });
        let map = full_map(&model);
        assert_eq!(validate_model(&model, &map).codes(), vec![ViolationCode::FacadeAccessesTable]);
    }

    #[test]
    fn ordinal_gap_is_flagged() {
        let mut model = small();
        model.call_edges.push(CallEdge {
            caller: "fc1".into(),
            callee: "bf3".into(),
            ordinal: 3,
        });
        let map = full_map(&model);
        assert_eq!(validate_model(&model, &map).codes(), vec![ViolationCode::OrdinalGap]);
    }

    #[test]
    fn call_to_facade_dangling_duplicate_unmapped() {
        let base = small();
        let map = full_map(&base);

        let mut m = base.clone();
        m.call_edges.push(CallEdge { caller: "fc1".into(), callee: "fc2".into(), ordinal: 2 });
        assert_eq!(validate_model(&m, &map).codes(), vec![ViolationCode::CallToFacade]);

        let mut m = base.clone();
        m.call_edges.push(CallEdge { caller: "fc1".into(), callee: "ghost".into(), ordinal: 2 });
        assert_eq!(validate_model(&m, &map).codes(), vec![ViolationCode::DanglingEdge]);

        let mut m = base.clone();
        m.tables.push("bf3".into());
        assert_eq!(validate_model(&m, &full_map(&m)).codes(), vec![ViolationCode::DuplicateId]);

        let mut m = base;
        m.tables.push("t4".into());
        assert_eq!(validate_model(&m, &map).codes(), vec![ViolationCode::UnmappedTable]);
    }
}
