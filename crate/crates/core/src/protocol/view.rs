use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::complex::{Label, Value};

use super::ProtocolError;

/// The state of one node as seen in a view: its input label and, when IDs
/// are in play, its identifier.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeState {
    pub id: Option<u32>,
    pub label: Label,
}

impl NodeState {
    pub fn plain(label: Label) -> Self {
        NodeState { id: None, label }
    }

    pub fn with_id(id: u32, label: Label) -> Self {
        NodeState {
            id: Some(id),
            label,
        }
    }
}

impl fmt::Display for NodeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.id {
            Some(id) => write!(f, "({id}:{})", self.label),
            None => write!(f, "{}", self.label),
        }
    }
}

/// A window of `2t + 1` consecutive node states centered on the viewer.
///
/// Either every state carries an ID or none does. The canonical text form
/// (`a|b|c` or `(1:a)|(2:b)|(3:c)`) is cached and defines equality order.
#[derive(Debug, Clone)]
pub struct RingView {
    states: Vec<NodeState>,
    text: String,
}

impl RingView {
    pub fn new(states: Vec<NodeState>) -> Result<Self, ProtocolError> {
        let text = states
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join("|");
        if states.len().is_multiple_of(2) {
            return Err(ProtocolError::MalformedView(format!(
                "{text:?} has even length"
            )));
        }
        let with_ids = states.iter().filter(|s| s.id.is_some()).count();
        if with_ids != 0 && with_ids != states.len() {
            return Err(ProtocolError::MalformedView(format!(
                "{text:?} mixes states with and without IDs"
            )));
        }
        Ok(RingView { states, text })
    }

    /// Parses the canonical text form.
    pub fn parse(s: &str) -> Result<Self, ProtocolError> {
        let bad = || ProtocolError::MalformedView(s.to_string());
        let states = s
            .split('|')
            .map(|part| {
                if let Some(inner) = part.strip_prefix('(').and_then(|p| p.strip_suffix(')')) {
                    let (id, label) = inner.split_once(':').ok_or_else(bad)?;
                    let id: u32 = id.parse().map_err(|_| bad())?;
                    Ok(NodeState::with_id(
                        id,
                        Label::new(label).map_err(|_| bad())?,
                    ))
                } else {
                    Ok(NodeState::plain(Label::new(part).map_err(|_| bad())?))
                }
            })
            .collect::<Result<Vec<_>, ProtocolError>>()?;
        RingView::new(states)
    }

    pub fn radius(&self) -> usize {
        self.states.len() / 2
    }

    pub fn states(&self) -> &[NodeState] {
        &self.states
    }

    pub fn center(&self) -> &NodeState {
        &self.states[self.radius()]
    }

    pub fn labels(&self) -> Vec<Label> {
        self.states.iter().map(|s| s.label.clone()).collect()
    }

    pub fn has_ids(&self) -> bool {
        self.states[0].id.is_some()
    }

    pub fn ids(&self) -> Option<Vec<u32>> {
        self.states.iter().map(|s| s.id).collect()
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    /// The same window with IDs removed.
    pub fn strip_ids(&self) -> Result<RingView, ProtocolError> {
        if !self.has_ids() {
            return Err(ProtocolError::NoIds);
        }
        RingView::new(
            self.states
                .iter()
                .map(|s| NodeState::plain(s.label.clone()))
                .collect(),
        )
    }

    /// The vertex value of this view: a label or ID-label at radius 0, a
    /// view value otherwise.
    pub fn to_value(&self) -> Value {
        if self.radius() == 0 {
            let s = &self.states[0];
            match s.id {
                Some(id) => Value::IdLabel {
                    id,
                    label: s.label.clone(),
                },
                None => Value::Label(s.label.clone()),
            }
        } else {
            Value::View(self.clone())
        }
    }

    /// Inverse of [`RingView::to_value`]; `None` for families.
    pub fn from_value(v: &Value) -> Option<RingView> {
        let state = match v {
            Value::Label(l) => NodeState::plain(l.clone()),
            Value::IdLabel { id, label } => NodeState::with_id(*id, label.clone()),
            Value::View(w) => return Some(w.clone()),
            Value::Family(_) => return None,
        };
        RingView::new(vec![state]).ok()
    }
}

impl PartialEq for RingView {
    fn eq(&self, other: &Self) -> bool {
        self.text == other.text
    }
}

impl Eq for RingView {}

impl Hash for RingView {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.text.hash(h)
    }
}

impl Ord for RingView {
    fn cmp(&self, other: &Self) -> Ordering {
        self.text.cmp(&other.text)
    }
}

impl PartialOrd for RingView {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RingView {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}
