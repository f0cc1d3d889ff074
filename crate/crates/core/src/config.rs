use serde::{Deserialize, Serialize};

use crate::error::ParseError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum DedupeMode {
    /// Merge candidates with identical function slices or identical
    /// annotated names.
    #[default]
    #[serde(alias = "by_slice")]
    BySlice,
    /// One candidate per (facade, table) pair.
    #[serde(alias = "off")]
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    /// A subsystem needing more split (case iii) gateways than this is not
    /// recommended for migration.
    pub max_split_gateways: usize,
    pub dedupe: DedupeMode,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            max_split_gateways: 10,
            dedupe: DedupeMode::BySlice,
        }
    }
}

/// Reads a JSON config; absent keys take their defaults.
pub fn parse_config(raw: &[u8]) -> Result<AnalysisConfig, ParseError> {
    let de = &mut serde_json::Deserializer::from_slice(raw);
    serde_path_to_error::deserialize(de).map_err(ParseError::from_json)
}
