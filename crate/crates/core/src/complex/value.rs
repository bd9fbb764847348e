use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::protocol::RingView;
use crate::reduction::SetFamily;

/// Characters reserved by the canonical text forms of views and families.
const RESERVED: &[char] = &['|', '(', ')', ':', ',', '{', '}', '"'];

/// The label of the unit input used to encode inputless tasks.
pub const UNIT_LABEL: &str = "⊥";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid label {0:?}: labels are non-empty and contain no whitespace or any of | ( ) : , {{ }} \"")]
pub struct InvalidLabel(pub String);

/// A symbol from a finite label alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(String);

impl Label {
    pub fn new(s: impl Into<String>) -> Result<Self, InvalidLabel> {
        let s = s.into();
        if s.is_empty()
            || s.chars()
                .any(|c| c.is_whitespace() || RESERVED.contains(&c))
        {
            return Err(InvalidLabel(s));
        }
        Ok(Label(s))
    }

    pub fn unit() -> Self {
        Label(UNIT_LABEL.to_string())
    }

    /// Decimal label for a non-negative integer, e.g. a color.
    pub fn number(n: impl fmt::Display) -> Self {
        Label(n.to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Label::new(s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValueTag {
    Label,
    IdLabel,
    View,
    Family,
}

impl fmt::Display for ValueTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValueTag::Label => "label",
            ValueTag::IdLabel => "id_label",
            ValueTag::View => "view",
            ValueTag::Family => "family",
        })
    }
}

/// The payload of a vertex.
///
/// Values compare by tag first, then lexicographically by their canonical
/// text form, so every iteration over values is reproducible.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Label(Label),
    IdLabel { id: u32, label: Label },
    View(RingView),
    Family(SetFamily),
}

impl Value {
    pub fn tag(&self) -> ValueTag {
        match self {
            Value::Label(_) => ValueTag::Label,
            Value::IdLabel { .. } => ValueTag::IdLabel,
            Value::View(_) => ValueTag::View,
            Value::Family(_) => ValueTag::Family,
        }
    }

    /// Canonical text form: `a`, `(7:a)`, `a|b|c`, `(1:a)|(2:b)`, `{{x,y},{}}`.
    pub fn canonical(&self) -> String {
        match self {
            Value::Label(l) => l.to_string(),
            Value::IdLabel { id, label } => format!("({id}:{label})"),
            Value::View(v) => v.to_string(),
            Value::Family(f) => f.to_string(),
        }
    }

    pub fn as_label(&self) -> Option<&Label> {
        match self {
            Value::Label(l) => Some(l),
            _ => None,
        }
    }
}

impl From<Label> for Value {
    fn from(l: Label) -> Self {
        Value::Label(l)
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Label(a), Value::Label(b)) => a.as_str().cmp(b.as_str()),
            (Value::View(a), Value::View(b)) => a.as_str().cmp(b.as_str()),
            _ => self
                .tag()
                .cmp(&other.tag())
                .then_with(|| self.canonical().cmp(&other.canonical())),
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}
