use std::collections::BTreeMap;

use super::GroundingError;
use crate::prp::ConceptId;

/// Partial maps from concepts to `[0, 1]`, one per emotion kind.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmotionMap {
    values: BTreeMap<(String, ConceptId), f64>,
}

impl EmotionMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, kind: &str, u: ConceptId, v: f64) -> Result<(), GroundingError> {
        if !(0.0..=1.0).contains(&v) {
            return Err(GroundingError::OutOfRange(v));
        }
        self.values.insert((kind.to_owned(), u), v);
        Ok(())
    }

    pub fn get(&self, kind: &str, u: ConceptId) -> Option<f64> {
        self.values.get(&(kind.to_owned(), u)).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, ConceptId, f64)> + '_ {
        self.values.iter().map(|((k, u), v)| (k.as_str(), *u, *v))
    }
}
