//! Chromatic simplicial complexes stored by their facets.
//!
//! A vertex is a `(process name, value)` pair and a facet holds exactly one
//! vertex per process name. Lower-dimensional simplices are never stored:
//! a vertex set is a simplex iff it is contained in some facet.

mod serial;
mod value;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

pub use serial::{
    complex_from_json, complex_to_json, skeleton_to_dot, value_from_json, value_to_json,
};
pub use value::{InvalidLabel, Label, Value, ValueTag, UNIT_LABEL};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComplexError {
    #[error("a complex needs at least one facet")]
    Empty,
    #[error("malformed facet {facet}: {reason}")]
    MalformedFacet { facet: String, reason: String },
    #[error("vertices mix value tags {0} and {1}")]
    MixedValueTags(ValueTag, ValueTag),
    #[error("map table has no entry for value {0}")]
    IncompleteTable(String),
    #[error("invalid complex document: {0}")]
    Format(String),
}

/// Name of a process of the star: `-1, 0, 1` on rings, `0..=d` otherwise.
/// Name `0` is always the center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProcessName(pub i32);

impl ProcessName {
    pub const CENTER: ProcessName = ProcessName(0);
}

impl fmt::Display for ProcessName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The full name set of a degree-`d` star, in facet order.
///
/// Rings (`d = 2`) use `p-1, p0, p1` so that facet order is left to right;
/// every other degree uses `p0` (center) followed by the leaves `p1..pd`.
pub fn standard_names(degree: usize) -> Vec<ProcessName> {
    if degree == 2 {
        vec![ProcessName(-1), ProcessName(0), ProcessName(1)]
    } else {
        (0..=degree as i32).map(ProcessName).collect()
    }
}

/// Position of the center `p0` within a facet of the given degree.
pub fn center_position(degree: usize) -> usize {
    if degree == 2 {
        1
    } else {
        0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub name: ProcessName,
    pub value: Value,
}

impl Vertex {
    pub fn new(name: ProcessName, value: impl Into<Value>) -> Self {
        Vertex {
            name,
            value: value.into(),
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name, self.value)
    }
}

/// A simplex given by its vertices, sorted by process name, names distinct.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Facet {
    entries: Vec<Vertex>,
}

impl Facet {
    pub fn new(mut entries: Vec<Vertex>) -> Result<Self, ComplexError> {
        entries.sort();
        if entries.is_empty() {
            return Err(ComplexError::MalformedFacet {
                facet: "[]".into(),
                reason: "no vertices".into(),
            });
        }
        if entries.windows(2).any(|w| w[0].name == w[1].name) {
            let facet = Facet { entries };
            return Err(ComplexError::MalformedFacet {
                facet: facet.to_string(),
                reason: "duplicate process name".into(),
            });
        }
        Ok(Facet { entries })
    }

    /// Facet over the standard names of `degree`, values given in facet order.
    pub fn from_values(degree: usize, values: Vec<Value>) -> Result<Self, ComplexError> {
        let names = standard_names(degree);
        if names.len() != values.len() {
            return Err(ComplexError::MalformedFacet {
                facet: format!("{values:?}"),
                reason: format!("expected {} values, got {}", names.len(), values.len()),
            });
        }
        Facet::new(
            names
                .into_iter()
                .zip(values)
                .map(|(n, v)| Vertex::new(n, v))
                .collect(),
        )
    }

    pub fn entries(&self) -> &[Vertex] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, name: ProcessName) -> Option<&Vertex> {
        self.entries.iter().find(|v| v.name == name)
    }

    pub fn values(&self) -> impl Iterator<Item = &Value> {
        self.entries.iter().map(|v| &v.value)
    }

    pub fn names(&self) -> impl Iterator<Item = ProcessName> + '_ {
        self.entries.iter().map(|v| v.name)
    }

    pub fn contains(&self, vertex: &Vertex) -> bool {
        self.entries.binary_search(vertex).is_ok()
    }
}

impl fmt::Display for Facet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// A pure chromatic complex of dimension `degree`, given by its facets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Complex {
    degree: usize,
    facets: Vec<Facet>,
    vertices: Vec<Vertex>,
}

/// Builds a validated complex whose facets cover the standard name set of
/// `degree`. Duplicate facets are dropped.
pub fn make_complex(degree: usize, facets: Vec<Facet>) -> Result<Complex, ComplexError> {
    let names = standard_names(degree);
    for f in &facets {
        if f.len() != degree + 1 {
            return Err(ComplexError::MalformedFacet {
                facet: f.to_string(),
                reason: format!("expected {} vertices, got {}", degree + 1, f.len()),
            });
        }
        if !f.names().eq(names.iter().copied()) {
            return Err(ComplexError::MalformedFacet {
                facet: f.to_string(),
                reason: "process names do not cover the star".into(),
            });
        }
    }
    Complex::from_facets(degree, facets)
}

impl Complex {
    /// Validation shared by all constructors: non-empty, equal arity, one tag.
    /// Unlike [`make_complex`] the name set of each facet is free, which is
    /// what skeletons need.
    pub(crate) fn from_facets(degree: usize, mut facets: Vec<Facet>) -> Result<Self, ComplexError> {
        if facets.is_empty() {
            return Err(ComplexError::Empty);
        }
        let mut tag = None;
        for f in &facets {
            if f.len() != degree + 1 {
                return Err(ComplexError::MalformedFacet {
                    facet: f.to_string(),
                    reason: format!("expected {} vertices, got {}", degree + 1, f.len()),
                });
            }
            for v in f.values() {
                match tag {
                    None => tag = Some(v.tag()),
                    Some(t) if t != v.tag() => {
                        return Err(ComplexError::MixedValueTags(t, v.tag()))
                    }
                    _ => {}
                }
            }
        }
        facets.sort();
        facets.dedup();
        let vertices: BTreeSet<Vertex> = facets
            .iter()
            .flat_map(|f| f.entries().iter().cloned())
            .collect();
        Ok(Complex {
            degree,
            facets,
            vertices: vertices.into_iter().collect(),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Facets in canonical order.
    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn tag(&self) -> ValueTag {
        self.vertices[0].value.tag()
    }

    pub fn contains_facet(&self, facet: &Facet) -> bool {
        self.facets.binary_search(facet).is_ok()
    }

    /// Distinct vertex values, in canonical order.
    pub fn vertex_values(&self) -> BTreeSet<Value> {
        self.vertices.iter().map(|v| v.value.clone()).collect()
    }
}

/// True iff `vs` is non-empty, has pairwise distinct names and lies in a facet.
pub fn is_simplex(k: &Complex, vs: &[Vertex]) -> bool {
    if vs.is_empty() {
        return false;
    }
    let names: BTreeSet<ProcessName> = vs.iter().map(|v| v.name).collect();
    if names.len() != vs.len() {
        return false;
    }
    k.facets.iter().any(|f| vs.iter().all(|v| f.contains(v)))
}

/// Answers whether two vertices span an edge of some complex.
pub trait EdgeOracle {
    fn is_edge(&self, a: &Vertex, b: &Vertex) -> bool;
}

impl EdgeOracle for Complex {
    fn is_edge(&self, a: &Vertex, b: &Vertex) -> bool {
        is_simplex(self, &[a.clone(), b.clone()])
    }
}

/// Hash index of the edges of a complex, for repeated edge queries.
#[derive(Debug, Clone, Default)]
pub struct EdgeIndex {
    edges: HashSet<(Vertex, Vertex)>,
}

impl EdgeIndex {
    pub fn new(k: &Complex) -> Self {
        let mut edges = HashSet::new();
        for f in k.facets() {
            for a in f.entries() {
                for b in f.entries() {
                    if a.name != b.name {
                        edges.insert((a.clone(), b.clone()));
                    }
                }
            }
        }
        EdgeIndex { edges }
    }

    /// The index of a complex with no edges.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.edges.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

impl EdgeOracle for EdgeIndex {
    fn is_edge(&self, a: &Vertex, b: &Vertex) -> bool {
        self.edges.contains(&(a.clone(), b.clone()))
    }
}

/// A name-independent map from vertex values to labels.
///
/// Applying it to a vertex keeps the vertex name, so every map expressed
/// as a table is name-preserving and name-independent by construction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MapTable {
    mapping: BTreeMap<Value, Label>,
}

impl MapTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, value: Value, label: Label) -> Option<Label> {
        self.mapping.insert(value, label)
    }

    pub fn get(&self, value: &Value) -> Option<&Label> {
        self.mapping.get(value)
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Value, &Label)> {
        self.mapping.iter()
    }

    pub fn apply_vertex(&self, v: &Vertex) -> Result<Vertex, ComplexError> {
        let label = self
            .mapping
            .get(&v.value)
            .ok_or_else(|| ComplexError::IncompleteTable(v.value.canonical()))?;
        Ok(Vertex::new(v.name, label.clone()))
    }

    pub fn apply_facet(&self, f: &Facet) -> Result<Facet, ComplexError> {
        let image = f
            .entries()
            .iter()
            .map(|v| self.apply_vertex(v))
            .collect::<Result<_, _>>()?;
        Facet::new(image)
    }
}

impl FromIterator<(Value, Label)> for MapTable {
    fn from_iter<I: IntoIterator<Item = (Value, Label)>>(iter: I) -> Self {
        MapTable {
            mapping: iter.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimplicialCheck {
    Ok,
    Violation { facet: Facet, image: Facet },
}

impl SimplicialCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, SimplicialCheck::Ok)
    }
}

/// Checks that the name-preserving image of every facet of `src` is a facet
/// of `dst`; reports the first violating facet in canonical order.
pub fn verify_simplicial(
    table: &MapTable,
    src: &Complex,
    dst: &Complex,
) -> Result<SimplicialCheck, ComplexError> {
    for f in src.facets() {
        let image = table.apply_facet(f)?;
        if !dst.contains_facet(&image) {
            return Ok(SimplicialCheck::Violation {
                facet: f.clone(),
                image,
            });
        }
    }
    Ok(SimplicialCheck::Ok)
}

/// The 1-skeleton: every two-vertex subset of every facet, as a degree-1 complex.
pub fn one_skeleton(k: &Complex) -> Complex {
    let mut edges = BTreeSet::new();
    for f in k.facets() {
        let e = f.entries();
        for i in 0..e.len() {
            for j in i + 1..e.len() {
                edges.insert(Facet {
                    entries: vec![e[i].clone(), e[j].clone()],
                });
            }
        }
    }
    Complex::from_facets(1, edges.into_iter().collect())
        .expect("edges of a valid complex form a valid complex")
}

/// Partition of facet indices into blocks connected through shared vertices.
/// Blocks are listed by their smallest facet index.
pub fn connected_components(k: &Complex) -> Vec<Vec<usize>> {
    let n = k.facets.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut first_seen: BTreeMap<&Vertex, usize> = BTreeMap::new();
    for (i, f) in k.facets.iter().enumerate() {
        for v in f.entries() {
            match first_seen.get(v) {
                Some(&j) => {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
                None => {
                    first_seen.insert(v, i);
                }
            }
        }
    }
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        blocks.entry(root).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = blocks.into_values().collect();
    out.sort_by_key(|b| b[0]);
    out
}

/// Isomorphism-invariant summary of a block of facets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComponentSignature {
    pub vertices: usize,
    pub facets: usize,
    /// Number of block facets containing each vertex, sorted ascending.
    pub degrees: Vec<usize>,
}

pub fn component_signature(k: &Complex, block: &[usize]) -> ComponentSignature {
    let mut counts: BTreeMap<&Vertex, usize> = BTreeMap::new();
    for &i in block {
        for v in k.facets[i].entries() {
            *counts.entry(v).or_default() += 1;
        }
    }
    let mut degrees: Vec<usize> = counts.values().copied().collect();
    degrees.sort_unstable();
    ComponentSignature {
        vertices: counts.len(),
        facets: block.len(),
        degrees,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lab(s: &str) -> Value {
        Value::Label(Label::new(s).unwrap())
    }

    fn ring_facet(a: &str, b: &str, c: &str) -> Facet {
        Facet::from_values(2, vec![lab(a), lab(b), lab(c)]).unwrap()
    }

    /// The four MIS triples on a ring: (left, center, right).
    fn mis() -> Complex {
        let fs = [
            ("0", "1", "0"),
            ("1", "0", "0"),
            ("0", "0", "1"),
            ("1", "0", "1"),
        ];
        make_complex(2, fs.iter().map(|(a, b, c)| ring_facet(a, b, c)).collect()).unwrap()
    }

    fn coloring3() -> Complex {
        let mut fs = vec![];
        for a in 1..=3 {
            for b in 1..=3 {
                for c in 1..=3 {
                    if a != b && b != c {
                        fs.push(ring_facet(&a.to_string(), &b.to_string(), &c.to_string()));
                    }
                }
            }
        }
        make_complex(2, fs).unwrap()
    }

    fn v(name: i32, s: &str) -> Vertex {
        Vertex::new(ProcessName(name), lab(s))
    }

    #[test]
    fn mis_complex_counts() {
        let m = mis();
        assert_eq!(m.vertices().len(), 6);
        assert_eq!(m.facets().len(), 4);
    }

    #[test]
    fn coloring_complex_counts() {
        let c = coloring3();
        assert_eq!(c.vertices().len(), 9);
        assert_eq!(c.facets().len(), 12);
    }

    #[test]
    fn singleton_complex() {
        let c = make_complex(2, vec![ring_facet("a", "b", "c")]).unwrap();
        assert_eq!(c.vertices().len(), 3);
        assert_eq!(c.facets().len(), 1);
        let comps = connected_components(&c);
        assert_eq!(comps.len(), 1);
        let sig = component_signature(&c, &comps[0]);
        assert_eq!(
            sig,
            ComponentSignature {
                vertices: 3,
                facets: 1,
                degrees: vec![1, 1, 1]
            }
        );
    }

    #[test]
    fn malformed_facets_are_rejected() {
        let short = Facet::new(vec![v(-1, "0"), v(0, "1")]).unwrap();
        assert!(matches!(
            make_complex(2, vec![short]),
            Err(ComplexError::MalformedFacet { .. })
        ));
        assert!(matches!(
            Facet::new(vec![v(0, "0"), v(0, "1"), v(1, "0")]),
            Err(ComplexError::MalformedFacet { .. })
        ));
        let wrong_names = Facet::new(vec![v(0, "0"), v(1, "1"), v(2, "0")]).unwrap();
        assert!(matches!(
            make_complex(2, vec![wrong_names]),
            Err(ComplexError::MalformedFacet { .. })
        ));
        assert_eq!(make_complex(2, vec![]), Err(ComplexError::Empty));
    }

    #[test]
    fn mixed_tags_are_rejected() {
        let f = Facet::new(vec![
            v(-1, "0"),
            Vertex::new(
                ProcessName(0),
                Value::IdLabel {
                    id: 1,
                    label: Label::number(0),
                },
            ),
            v(1, "0"),
        ])
        .unwrap();
        assert!(matches!(
            make_complex(2, vec![f]),
            Err(ComplexError::MixedValueTags(..))
        ));
    }

    #[test]
    fn monochromatic_sets_are_not_simplices() {
        let m = mis();
        assert!(!is_simplex(&m, &[v(-1, "0"), v(0, "0"), v(1, "0")]));
        assert!(!is_simplex(&m, &[v(-1, "1"), v(0, "1"), v(1, "1")]));
        for x in m.vertices() {
            assert!(is_simplex(&m, std::slice::from_ref(x)));
        }
        // no MIS facet has two adjacent ones
        assert!(!is_simplex(&m, &[v(-1, "1"), v(0, "1")]));
        assert!(is_simplex(&m, &[v(-1, "1"), v(1, "1")]));
    }

    #[test]
    fn constant_map_is_not_simplicial() {
        let table: MapTable = (1..=3)
            .map(|c| (lab(&c.to_string()), Label::number(0)))
            .collect();
        let check = verify_simplicial(&table, &coloring3(), &mis()).unwrap();
        match check {
            SimplicialCheck::Violation { facet, image } => {
                assert_eq!(facet, coloring3().facets()[0].clone());
                assert_eq!(image, ring_facet("0", "0", "0"));
            }
            SimplicialCheck::Ok => panic!("constant map accepted"),
        }
    }

    #[test]
    fn identity_map_is_simplicial() {
        let c = coloring3();
        let table: MapTable = (1..=3)
            .map(|x| (lab(&x.to_string()), Label::number(x)))
            .collect();
        assert!(verify_simplicial(&table, &c, &c).unwrap().is_ok());
    }

    #[test]
    fn incomplete_table_is_an_error() {
        let table: MapTable = [(lab("1"), Label::number(0))].into_iter().collect();
        assert!(matches!(
            verify_simplicial(&table, &coloring3(), &mis()),
            Err(ComplexError::IncompleteTable(_))
        ));
    }

    /// Brute-force: all distinct-name pairs drawn from the facets.
    fn skeleton_oracle(k: &Complex) -> BTreeSet<(Vertex, Vertex)> {
        let mut out = BTreeSet::new();
        for f in k.facets() {
            for a in f.entries() {
                for b in f.entries() {
                    if a.name < b.name {
                        out.insert((a.clone(), b.clone()));
                    }
                }
            }
        }
        out
    }

    #[test]
    fn skeleton_of_mis_has_ten_edges() {
        let m = mis();
        let sk = one_skeleton(&m);
        assert_eq!(sk.degree(), 1);
        assert_eq!(sk.facets().len(), skeleton_oracle(&m).len());
        assert_eq!(sk.facets().len(), 10);
        assert_eq!(sk.vertices().len(), 6);
    }

    #[test]
    fn skeleton_of_coloring_complex() {
        let c = coloring3();
        let sk = one_skeleton(&c);
        assert_eq!(sk.vertices().len(), 9);
        // adjacent pairs: 6 distinct-colour pairs each; outer pair: all 9
        assert_eq!(sk.facets().len(), skeleton_oracle(&c).len());
        assert_eq!(sk.facets().len(), 6 + 6 + 9);
    }

    #[test]
    fn skeleton_of_an_edge_is_itself() {
        let e = make_complex(1, vec![Facet::new(vec![v(0, "a"), v(1, "b")]).unwrap()]).unwrap();
        assert_eq!(one_skeleton(&e), e);
    }

    #[test]
    fn mis_is_connected() {
        assert_eq!(connected_components(&mis()).len(), 1);
    }
}
