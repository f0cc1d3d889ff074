//! Partitioning of tables into business subsystems.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;
use crate::model::{AreaMap, SystemModel, TableId};

pub type SubsystemId = String;

/// Every model table ends up in exactly one subsystem, the control set, or
/// the shared set. Subsystems that claimed a shared table are disqualified.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsystemPartition {
    pub subsystems: BTreeMap<SubsystemId, BTreeSet<TableId>>,
    pub control: BTreeSet<TableId>,
    pub shared_tables: BTreeSet<TableId>,
    pub disqualified: BTreeSet<SubsystemId>,
    /// Areas claiming each shared table.
    pub shared_claims: BTreeMap<TableId, BTreeSet<SubsystemId>>,
}

impl SubsystemPartition {
    /// Tables owned by `ss`, shared tables excluded.
    pub fn tables_of(&self, ss: &str) -> Result<&BTreeSet<TableId>, AnalysisError> {
        self.subsystems
            .get(ss)
            .ok_or_else(|| AnalysisError::UnknownSubsystem(ss.to_string()))
    }

    pub fn subsystem_of(&self, table: &str) -> Option<&str> {
        self.subsystems
            .iter()
            .find(|(_, tables)| tables.contains(table))
            .map(|(ss, _)| ss.as_str())
    }

    /// Shared tables claimed by `ss`.
    pub fn shared_tables_of(&self, ss: &str) -> Vec<TableId> {
        self.shared_claims
            .iter()
            .filter(|(_, areas)| areas.contains(ss))
            .map(|(t, _)| t.clone())
            .collect()
    }

    pub fn is_control(&self, table: &str) -> bool {
        self.control.contains(table)
    }

    pub fn subsystem_ids(&self) -> impl Iterator<Item = &str> {
        self.subsystems.keys().map(String::as_str)
    }
}

/// Splits the model's tables by business area. Areas that only mention
/// tables unknown to the model do not become subsystems.
pub fn partition_tables(model: &SystemModel, map: &AreaMap) -> SubsystemPartition {
    let mut partition = SubsystemPartition::default();
    let model_tables: BTreeSet<&str> = model.tables.iter().map(String::as_str).collect();

    for table in model_tables {
        if map.control_tables.contains(table) {
            partition.control.insert(table.to_string());
            continue;
        }
        let Some(areas) = map.assignments.get(table) else {
            continue;
        };
        for area in areas {
            let owned = partition.subsystems.entry(area.clone()).or_default();
            if areas.len() == 1 {
                owned.insert(table.to_string());
            }
        }
        if areas.len() > 1 {
            partition.shared_tables.insert(table.to_string());
            partition.disqualified.extend(areas.iter().cloned());
            partition.shared_claims.insert(table.to_string(), areas.clone());
        }
    }
    partition
}
