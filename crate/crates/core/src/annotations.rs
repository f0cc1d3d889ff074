//! Human-authored names, purposes and features for candidates.
//!
//! The annotation file is a JSON object. Each key is either a slice
//! fingerprint (see [`slice_fingerprint`]) or, when the entry lists its
//! `functions` explicitly, a free-form label:
//!
//! ```json
//! {
//!   "3f9a0c1d22b7e410": {"name": "Order.TrackOrderStatus", "purpose": "...", "features": ["..."]},
//!   "ba-list": {"subsystem": "BusinessActions", "functions": ["AUTCCEobtAcoCom"],
//!               "name": "BusinessActions.ListBusinessActionsForAccount"}
//! }
//! ```

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::ParseError;
use crate::model::DataItem;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Annotation {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subsystem: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functions: Option<BTreeSet<String>>,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub purpose: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub features: Vec<String>,
    /// Overrides the derived candidate inputs.
    #[serde(rename = "in", default, skip_serializing_if = "Option::is_none")]
    pub inputs: Option<BTreeSet<DataItem>>,
    /// Overrides the derived candidate outputs.
    #[serde(rename = "out", default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<BTreeSet<DataItem>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AnnotationSet {
    entries: BTreeMap<String, Annotation>,
}

/// Stable identifier of a function set: the first 16 hex digits of the
/// SHA-256 of the sorted names joined by newlines.
pub fn slice_fingerprint<'a, I>(functions: I) -> String
where
    I: IntoIterator<Item = &'a String>,
{
    let mut names: Vec<&String> = functions.into_iter().collect();
    names.sort_unstable();
    names.dedup();
    let mut hasher = Sha256::new();
    for (i, name) in names.iter().enumerate() {
        if i > 0 {
            hasher.update(b"\n");
        }
        hasher.update(name.as_bytes());
    }
    hasher.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// `<Subsystem>.<Process>`: two non-empty segments without whitespace.
pub fn is_service_name(name: &str) -> bool {
    match name.split_once('.') {
        Some((ss, process)) => {
            !ss.is_empty()
                && !process.is_empty()
                && !process.contains('.')
                && !name.chars().any(char::is_whitespace)
        }
        None => false,
    }
}

impl AnnotationSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: impl Into<String>, annotation: Annotation) {
        self.entries.insert(key.into(), annotation);
    }

    /// Annotation for a candidate slice of `subsystem`. Explicit function
    /// lists win over fingerprint keys.
    pub fn lookup(&self, subsystem: &str, functions: &BTreeSet<String>) -> Option<&Annotation> {
        let ss_matches = |a: &Annotation| a.subsystem.as_deref().is_none_or(|s| s == subsystem);
        let explicit = self
            .entries
            .values()
            .find(|a| a.functions.as_ref() == Some(functions) && ss_matches(a));
        explicit.or_else(|| {
            let fp = slice_fingerprint(functions);
            self.entries
                .get(&fp)
                .filter(|a| a.functions.is_none() && ss_matches(a))
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("annotation serialization is infallible")
    }
}

pub fn parse_annotations(raw: &[u8]) -> Result<AnnotationSet, ParseError> {
    let de = &mut serde_json::Deserializer::from_slice(raw);
    let set: AnnotationSet = serde_path_to_error::deserialize(de).map_err(ParseError::from_json)?;
    for (key, a) in &set.entries {
        if !is_service_name(&a.name) {
            return Err(ParseError::schema(
                format!("{key}.name"),
                format!("`{}` is not of the form <Subsystem>.<Process>", a.name),
            ));
        }
        if a.functions.as_ref().is_some_and(BTreeSet::is_empty) {
            return Err(ParseError::schema(format!("{key}.functions"), "empty function list"));
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fns(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn fingerprint_ignores_order() {
        let a = vec!["b".to_string(), "a".to_string()];
        let b = vec!["a".to_string(), "b".to_string()];
        assert_eq!(slice_fingerprint(&a), slice_fingerprint(&b));
        assert_eq!(slice_fingerprint(&a).len(), 16);
        assert_ne!(slice_fingerprint(&a), slice_fingerprint(&vec!["a".to_string()]));
    }

    #[test]
    fn service_names() {
        assert!(is_service_name("Order.TrackOrderStatus"));
        assert!(!is_service_name("Order"));
        assert!(!is_service_name("Order."));
        assert!(!is_service_name("A.B.C"));
        assert!(!is_service_name("Order.Track Status"));
    }

    #[test]
    fn lookup_by_fingerprint_and_explicit_list() {
        let fp = slice_fingerprint(&fns(&["f1"]));
        let raw = format!(
            r#"{{
              "{fp}": {{"name": "Ss.ByPrint"}},
              "explicit": {{"subsystem": "Ss", "functions": ["f2", "f3"], "name": "Ss.Explicit", "features": ["x"]}}
            }}"#
        );
        let set = parse_annotations(raw.as_bytes()).unwrap();
        assert_eq!(set.lookup("Ss", &fns(&["f1"])).unwrap().name, "Ss.ByPrint");
        assert_eq!(set.lookup("Ss", &fns(&["f3", "f2"])).unwrap().name, "Ss.Explicit");
        assert!(set.lookup("Other", &fns(&["f2", "f3"])).is_none());
        assert!(set.lookup("Ss", &fns(&["f2"])).is_none());
        assert_eq!(parse_annotations(set.to_json().as_bytes()).unwrap(), set);
    }

    #[test]
    fn rejects_malformed_names() {
        let err = parse_annotations(br#"{"k": {"name": "NoDot"}}"#).unwrap_err();
        assert!(matches!(err, ParseError::Schema { ref path, .. } if path == "k.name"), "{err:?}");
    }
}
