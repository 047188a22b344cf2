//! Stable global ids for sparse feature dimensions.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::features::FeatureKind;

/// Bijection between feature keys and contiguous dimension ids.
///
/// Ids are handed out in insertion order starting at 0. Once frozen, the
/// registry rejects new keys.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionRegistry {
    kind: FeatureKind,
    keys: Vec<String>,
    ids: HashMap<String, u32>,
    frozen: bool,
}

impl DimensionRegistry {
    pub fn new(kind: FeatureKind) -> Self {
        DimensionRegistry {
            kind,
            keys: Vec::new(),
            ids: HashMap::new(),
            frozen: false,
        }
    }

    pub fn kind(&self) -> FeatureKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn intern(&mut self, key: &str) -> Result<u32> {
        if let Some(&id) = self.ids.get(key) {
            return Ok(id);
        }
        if self.frozen {
            return Err(Error::Validation(format!(
                "registry for {} is frozen; unknown key {key:?}",
                self.kind
            )));
        }
        let id = u32::try_from(self.keys.len())
            .map_err(|_| Error::Validation("too many feature dimensions".into()))?;
        self.keys.push(key.to_owned());
        self.ids.insert(key.to_owned(), id);
        Ok(id)
    }

    pub fn freeze(&mut self) {
        self.frozen = true;
    }

    pub fn id(&self, key: &str) -> Option<u32> {
        self.ids.get(key).copied()
    }

    pub fn key(&self, id: u32) -> Option<&str> {
        self.keys.get(id as usize).map(String::as_str)
    }

    /// Keys in id order.
    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    /// `{"kind": ..., "entries": {"<key>": id, ...}}`, entries in id order.
    pub fn to_json(&self) -> String {
        let mut out = String::with_capacity(32 + self.keys.len() * 24);
        out.push_str("{\"kind\":");
        out.push_str(&serde_json::to_string(self.kind.as_str()).unwrap());
        out.push_str(",\"entries\":{");
        for (id, key) in self.keys.iter().enumerate() {
            if id > 0 {
                out.push(',');
            }
            out.push_str(&serde_json::to_string(key).unwrap());
            out.push(':');
            out.push_str(&id.to_string());
        }
        out.push_str("}}\n");
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(serde::Deserialize)]
        struct Raw {
            kind: String,
            entries: HashMap<String, u32>,
        }
        let raw: Raw = serde_json::from_str(text).map_err(|e| Error::parse("registry", e))?;
        let kind: FeatureKind = raw.kind.parse()?;
        let mut by_id: Vec<Option<String>> = vec![None; raw.entries.len()];
        for (key, id) in raw.entries {
            let slot = by_id.get_mut(id as usize).ok_or_else(|| {
                Error::Validation(format!("registry ids are not contiguous (id {id})"))
            })?;
            if slot.replace(key).is_some() {
                return Err(Error::Validation(format!("registry id {id} is used twice")));
            }
        }
        let mut reg = DimensionRegistry::new(kind);
        for key in by_id.into_iter().flatten() {
            reg.intern(&key)?;
        }
        reg.freeze();
        Ok(reg)
    }
}
