//! LCL tasks on stars, task files, and the input/output complexes.

mod builtin;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;

use crate::complex::{center_position, make_complex, Complex, ComplexError, Facet, Label, Value};

pub use builtin::{builtin, BUILTIN_NAMES};
pub use parse::parse_task;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TaskError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid task: {0}")]
    Semantic(String),
    #[error("no {0} tuple forms a good star")]
    EmptyComplex(Side),
    #[error("unknown builtin task {0:?}")]
    UnknownBuiltin(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Input,
    Output,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Input => "input",
            Side::Output => "output",
        })
    }
}

/// A labeled star: a center and the multiset of its `d` leaf labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Star {
    center: Label,
    leaves: Vec<Label>,
}

impl Star {
    pub fn new(center: Label, mut leaves: Vec<Label>) -> Self {
        leaves.sort();
        Star { center, leaves }
    }

    pub fn center(&self) -> &Label {
        &self.center
    }

    /// Leaves in sorted order.
    pub fn leaves(&self) -> &[Label] {
        &self.leaves
    }

    /// The star induced by a facet: the center is the entry named `p0`.
    pub fn of_facet(degree: usize, facet: &Facet) -> Option<Star> {
        let labels: Vec<&Label> = facet.values().map(Value::as_label).collect::<Option<_>>()?;
        Some(Star::of_tuple(
            degree,
            &labels.into_iter().cloned().collect::<Vec<_>>(),
        ))
    }

    /// The star induced by a tuple in facet order.
    pub fn of_tuple(degree: usize, tuple: &[Label]) -> Star {
        let c = center_position(degree);
        let leaves = tuple
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != c)
            .map(|(_, l)| l.clone());
        Star::new(tuple[c].clone(), leaves.collect())
    }
}

impl fmt::Display for Star {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.center, self.leaves.iter().join(","))
    }
}

/// A set of good stars, kept symbolic where possible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StarSet {
    /// Every star over the alphabet.
    All,
    /// Stars whose center label differs from every leaf label.
    Proper,
    Explicit(BTreeSet<Star>),
}

impl StarSet {
    pub fn contains(&self, star: &Star) -> bool {
        match self {
            StarSet::All => true,
            StarSet::Proper => !star.leaves.contains(&star.center),
            StarSet::Explicit(s) => s.contains(star),
        }
    }
}

/// The input-output relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeltaSpec {
    Unconstrained,
    /// Allowed `(input label, output label)` pairs, checked at every node.
    PerNode(BTreeSet<(Label, Label)>),
    /// Allowed `(input star, output star)` pairs, checked at the center.
    ExplicitPairs(BTreeSet<(Star, Star)>),
}

/// Raw task components, validated by [`LclTask::from_parts`].
#[derive(Debug, Clone)]
pub struct TaskParts {
    pub name: String,
    pub degree: usize,
    pub in_labels: BTreeSet<Label>,
    pub in_stars: StarSet,
    pub out_labels: BTreeSet<Label>,
    pub out_stars: StarSet,
    pub delta: DeltaSpec,
    /// Label sequences that never occur on consecutive ring nodes, in
    /// either direction. Only meaningful for rings.
    pub forbidden_windows: Vec<Vec<Label>>,
}

/// A validated LCL task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LclTask {
    name: String,
    degree: usize,
    in_labels: BTreeSet<Label>,
    in_stars: StarSet,
    out_labels: BTreeSet<Label>,
    out_stars: StarSet,
    delta: DeltaSpec,
    forbidden_windows: Vec<Vec<Label>>,
}

fn semantic(msg: impl Into<String>) -> TaskError {
    TaskError::Semantic(msg.into())
}

fn check_stars(
    side: Side,
    degree: usize,
    labels: &BTreeSet<Label>,
    stars: &StarSet,
) -> Result<(), TaskError> {
    if let StarSet::Explicit(set) = stars {
        if set.is_empty() {
            return Err(semantic(format!("{side} star set is empty")));
        }
        for s in set {
            if s.leaves.len() != degree {
                return Err(semantic(format!(
                    "{side} star {s} has {} leaves, expected {degree}",
                    s.leaves.len()
                )));
            }
            if let Some(l) = std::iter::once(&s.center)
                .chain(&s.leaves)
                .find(|l| !labels.contains(*l))
            {
                return Err(semantic(format!(
                    "{side} star {s} uses undeclared label {l}"
                )));
            }
        }
    }
    Ok(())
}

impl LclTask {
    pub fn from_parts(p: TaskParts) -> Result<Self, TaskError> {
        if p.degree < 1 {
            return Err(semantic("degree must be at least 1"));
        }
        if p.in_labels.is_empty() {
            return Err(semantic("in_labels is empty"));
        }
        if p.out_labels.is_empty() {
            return Err(semantic("out_labels is empty"));
        }
        check_stars(Side::Input, p.degree, &p.in_labels, &p.in_stars)?;
        check_stars(Side::Output, p.degree, &p.out_labels, &p.out_stars)?;
        match &p.delta {
            DeltaSpec::Unconstrained => {}
            DeltaSpec::PerNode(rel) => {
                for (a, b) in rel {
                    if !p.in_labels.contains(a) || !p.out_labels.contains(b) {
                        return Err(semantic(format!(
                            "per_node pair ({a},{b}) uses undeclared label"
                        )));
                    }
                }
                if let Some(a) = p
                    .in_labels
                    .iter()
                    .find(|a| !rel.iter().any(|(x, _)| x == *a))
                {
                    return Err(semantic(format!(
                        "per_node relation allows no output for input {a}"
                    )));
                }
            }
            DeltaSpec::ExplicitPairs(pairs) => {
                for (s, o) in pairs {
                    check_stars(
                        Side::Input,
                        p.degree,
                        &p.in_labels,
                        &StarSet::Explicit([s.clone()].into()),
                    )?;
                    check_stars(
                        Side::Output,
                        p.degree,
                        &p.out_labels,
                        &StarSet::Explicit([o.clone()].into()),
                    )?;
                }
            }
        }
        if !p.forbidden_windows.is_empty() && p.degree != 2 {
            return Err(semantic(
                "forbidden windows are only supported on rings (degree 2)",
            ));
        }
        for w in &p.forbidden_windows {
            if w.is_empty() {
                return Err(semantic("empty forbidden window"));
            }
            if let Some(l) = w.iter().find(|l| !p.in_labels.contains(*l)) {
                return Err(semantic(format!(
                    "forbidden window uses undeclared label {l}"
                )));
            }
        }
        Ok(LclTask {
            name: p.name,
            degree: p.degree,
            in_labels: p.in_labels,
            in_stars: p.in_stars,
            out_labels: p.out_labels,
            out_stars: p.out_stars,
            delta: p.delta,
            forbidden_windows: p.forbidden_windows,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn in_labels(&self) -> &BTreeSet<Label> {
        &self.in_labels
    }

    pub fn out_labels(&self) -> &BTreeSet<Label> {
        &self.out_labels
    }

    pub fn in_stars(&self) -> &StarSet {
        &self.in_stars
    }

    pub fn out_stars(&self) -> &StarSet {
        &self.out_stars
    }

    pub fn delta(&self) -> &DeltaSpec {
        &self.delta
    }

    pub fn forbidden_windows(&self) -> &[Vec<Label>] {
        &self.forbidden_windows
    }

    /// Whether a consecutive ring window of input labels satisfies the
    /// promise: every length-3 subwindow is a good input star and no
    /// forbidden sequence occurs in it, read in either direction.
    pub fn admissible_window(&self, labels: &[Label]) -> bool {
        if labels.iter().any(|l| !self.in_labels.contains(l)) {
            return false;
        }
        if labels
            .windows(3)
            .any(|w| !self.in_stars.contains(&Star::of_tuple(2, w)))
        {
            return false;
        }
        !self.contains_forbidden(labels)
    }

    /// Whether the newest label of `labels` completes a forbidden sequence or
    /// a bad star. Used for incremental window construction.
    pub(crate) fn admissible_suffix(&self, labels: &[Label]) -> bool {
        let n = labels.len();
        if n >= 3 && !self.in_stars.contains(&Star::of_tuple(2, &labels[n - 3..])) {
            return false;
        }
        self.forbidden_windows.iter().all(|p| {
            p.len() > n || {
                let tail = &labels[n - p.len()..];
                tail != p.as_slice() && !tail.iter().eq(p.iter().rev())
            }
        })
    }

    fn contains_forbidden(&self, labels: &[Label]) -> bool {
        self.forbidden_windows.iter().any(|p| {
            labels
                .windows(p.len())
                .any(|w| w == p.as_slice() || w.iter().eq(p.iter().rev()))
        })
    }

    /// Whether the task has no real input (a single unit label).
    pub fn is_inputless(&self) -> bool {
        self.in_labels.len() == 1 && self.in_labels.iter().next() == Some(&Label::unit())
    }
}

pub fn good_star(task: &LclTask, side: Side, star: &Star) -> bool {
    match side {
        Side::Input => task.in_stars.contains(star),
        Side::Output => task.out_stars.contains(star),
    }
}

fn build_side(task: &LclTask, side: Side) -> Result<Complex, TaskError> {
    let d = task.degree;
    let labels = match side {
        Side::Input => &task.in_labels,
        Side::Output => &task.out_labels,
    };
    let mut facets = Vec::new();
    for tuple in std::iter::repeat_n(labels.iter().cloned(), d + 1).multi_cartesian_product() {
        if !good_star(task, side, &Star::of_tuple(d, &tuple)) {
            continue;
        }
        if side == Side::Input && task.contains_forbidden(&tuple) {
            continue;
        }
        facets.push(Facet::from_values(
            d,
            tuple.into_iter().map(Value::Label).collect(),
        )?);
    }
    if facets.is_empty() {
        return Err(TaskError::EmptyComplex(side));
    }
    Ok(make_complex(d, facets)?)
}

/// The input complex: one facet per ordered tuple whose induced star is a
/// good input star.
pub fn build_input_complex(task: &LclTask) -> Result<Complex, TaskError> {
    build_side(task, Side::Input)
}

/// The output complex: one facet per ordered tuple whose induced star is a
/// good output star.
pub fn build_output_complex(task: &LclTask) -> Result<Complex, TaskError> {
    build_side(task, Side::Output)
}

/// Label-level form of [`delta_allows`], tuples in facet order.
pub fn delta_allows_labels(task: &LclTask, input: &[Label], output: &[Label]) -> bool {
    match &task.delta {
        DeltaSpec::Unconstrained => true,
        DeltaSpec::PerNode(rel) => input
            .iter()
            .zip(output)
            .all(|(a, b)| rel.contains(&(a.clone(), b.clone()))),
        DeltaSpec::ExplicitPairs(pairs) => {
            let s = Star::of_tuple(task.degree, input);
            let o = Star::of_tuple(task.degree, output);
            pairs.contains(&(s, o))
        }
    }
}

/// Whether `out_facet` is a legal output for `in_facet`. Facets whose values
/// are not plain labels are never allowed.
pub fn delta_allows(task: &LclTask, in_facet: &Facet, out_facet: &Facet) -> bool {
    let labels = |f: &Facet| {
        f.values()
            .map(|v| v.as_label().cloned())
            .collect::<Option<Vec<_>>>()
    };
    match (labels(in_facet), labels(out_facet)) {
        (Some(i), Some(o)) => delta_allows_labels(task, &i, &o),
        _ => false,
    }
}
