use std::collections::BTreeSet;
use std::fmt;

use crate::complex::{ComplexError, MapTable, Value};

/// A finite family of finite sets of values. Empty members and the empty
/// family are legitimate values.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetFamily {
    sets: BTreeSet<BTreeSet<Value>>,
}

impl SetFamily {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, set: BTreeSet<Value>) -> bool {
        self.sets.insert(set)
    }

    pub fn sets(&self) -> &BTreeSet<BTreeSet<Value>> {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

impl FromIterator<BTreeSet<Value>> for SetFamily {
    fn from_iter<I: IntoIterator<Item = BTreeSet<Value>>>(iter: I) -> Self {
        SetFamily {
            sets: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.sets.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (j, v) in s.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

/// Elementwise image of a family under a value map.
pub fn phi_apply_map(table: &MapTable, fam: &SetFamily) -> Result<SetFamily, ComplexError> {
    fam.sets
        .iter()
        .map(|s| {
            s.iter()
                .map(|v| {
                    table
                        .get(v)
                        .map(|l| Value::Label(l.clone()))
                        .ok_or_else(|| ComplexError::IncompleteTable(v.canonical()))
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Label;

    fn lv(s: &str) -> Value {
        Value::Label(Label::new(s).unwrap())
    }

    fn fam(sets: &[&[&str]]) -> SetFamily {
        sets.iter()
            .map(|s| s.iter().map(|x| lv(x)).collect())
            .collect()
    }

    #[test]
    fn display() {
        assert_eq!(fam(&[&["a", "b"], &["c"]]).to_string(), "{{a,b},{c}}");
        assert_eq!(fam(&[&[]]).to_string(), "{{}}");
        assert_eq!(SetFamily::new().to_string(), "{}");
    }

    #[test]
    fn constant_map_collapses() {
        let table: MapTable = ["a", "b", "c"]
            .iter()
            .map(|s| (lv(s), Label::new("c").unwrap()))
            .collect();
        assert_eq!(
            phi_apply_map(&table, &fam(&[&["a", "b"], &["c"]])).unwrap(),
            fam(&[&["c"]])
        );
    }

    #[test]
    fn identity_map_keeps_family() {
        let table: MapTable = ["a", "b", "c"]
            .iter()
            .map(|s| (lv(s), Label::new(*s).unwrap()))
            .collect();
        let f = fam(&[&["a", "b"], &["c"], &[]]);
        assert_eq!(phi_apply_map(&table, &f).unwrap(), f);
    }

    #[test]
    fn missing_entry() {
        let table = MapTable::new();
        assert!(matches!(
            phi_apply_map(&table, &fam(&[&["a"]])),
            Err(ComplexError::IncompleteTable(_))
        ));
        assert_eq!(phi_apply_map(&table, &fam(&[&[]])).unwrap(), fam(&[&[]]));
    }
}
