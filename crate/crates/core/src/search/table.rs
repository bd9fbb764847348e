use std::collections::BTreeMap;

use serde_json::{json, Map, Value as Json};

use crate::complex::{Label, MapTable};
use crate::protocol::{canonicalize_ids, IdMode, RingView};

use super::SearchError;

/// An executable `t`-round algorithm: the output label of every view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgorithmTable {
    rounds: usize,
    id_mode: IdMode,
    entries: BTreeMap<RingView, Label>,
    canonical: Option<BTreeMap<RingView, Label>>,
}

impl AlgorithmTable {
    /// Builds a table. In ID modes the rank-pattern table is attached when
    /// the entries depend only on the relative order of the IDs.
    pub fn new(rounds: usize, id_mode: IdMode, entries: BTreeMap<RingView, Label>) -> Self {
        let canonical = match id_mode {
            IdMode::None => None,
            _ => {
                let mut c: BTreeMap<RingView, Label> = BTreeMap::new();
                let mut consistent = true;
                for (w, l) in &entries {
                    let Ok(k) = canonicalize_ids(w) else {
                        consistent = false;
                        break;
                    };
                    match c.get(&k) {
                        Some(prev) if prev != l => {
                            consistent = false;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            c.insert(k, l.clone());
                        }
                    }
                }
                consistent.then_some(c)
            }
        };
        AlgorithmTable {
            rounds,
            id_mode,
            entries,
            canonical,
        }
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn id_mode(&self) -> IdMode {
        self.id_mode
    }

    pub fn entries(&self) -> &BTreeMap<RingView, Label> {
        &self.entries
    }

    /// The order-invariant form of the table, if it has one.
    pub fn canonical(&self) -> Option<&BTreeMap<RingView, Label>> {
        self.canonical.as_ref()
    }

    pub fn get(&self, w: &RingView) -> Option<&Label> {
        self.entries.get(w)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The same function on vertex values.
    pub fn to_map_table(&self) -> MapTable {
        self.entries
            .iter()
            .map(|(w, l)| (w.to_value(), l.clone()))
            .collect()
    }

    pub fn to_json(&self) -> Json {
        let obj = |m: &BTreeMap<RingView, Label>| {
            Json::Object(
                m.iter()
                    .map(|(w, l)| (w.to_string(), Json::String(l.to_string())))
                    .collect::<Map<_, _>>(),
            )
        };
        let mut j = json!({
            "rounds": self.rounds,
            "id_mode": match self.id_mode {
                IdMode::None => "none",
                IdMode::Arbitrary(_) => "arbitrary",
                IdMode::Increasing(_) => "increasing",
            },
            "entries": obj(&self.entries),
        });
        if let Some(r) = self.id_mode.id_range() {
            j["R"] = json!(r);
        }
        if let Some(c) = &self.canonical {
            j["canonical"] = obj(c);
        }
        j
    }

    pub fn from_json(j: &Json) -> Result<Self, SearchError> {
        let bad = |m: &str| SearchError::Format(m.to_string());
        let rounds = j
            .get("rounds")
            .and_then(Json::as_u64)
            .ok_or_else(|| bad("missing \"rounds\""))? as usize;
        let r = j.get("R").and_then(Json::as_u64).map(|r| r as u32);
        let id_mode = match (j.get("id_mode").and_then(Json::as_str), r) {
            (Some("none") | None, _) => IdMode::None,
            (Some("arbitrary"), Some(r)) => IdMode::Arbitrary(r),
            (Some("increasing"), Some(r)) => IdMode::Increasing(r),
            _ => {
                return Err(bad(
                    "\"id_mode\" must be none, or arbitrary/increasing with \"R\"",
                ))
            }
        };
        let raw = j
            .get("entries")
            .and_then(Json::as_object)
            .ok_or_else(|| bad("missing \"entries\" object"))?;
        let mut entries = BTreeMap::new();
        for (k, v) in raw {
            let w = RingView::parse(k).map_err(|e| SearchError::Format(e.to_string()))?;
            if w.radius() != rounds {
                return Err(SearchError::Format(format!(
                    "view {k} does not have radius {rounds}"
                )));
            }
            let l = v
                .as_str()
                .ok_or_else(|| bad("entry labels must be strings"))
                .and_then(|s| Label::new(s).map_err(|e| SearchError::Format(e.to_string())))?;
            entries.insert(w, l);
        }
        Ok(AlgorithmTable::new(rounds, id_mode, entries))
    }
}
