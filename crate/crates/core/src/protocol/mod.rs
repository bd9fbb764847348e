//! Ring views, mutual compatibility and protocol complexes.
//!
//! Rings are modeled as long rings: a facet of the `t`-round protocol
//! complex corresponds to a window of `2t + 3` consecutive nodes that never
//! wraps around, and its three vertices are the radius-`t` views of the three
//! central nodes.

mod view;

use std::fmt;

use itertools::Itertools;

use crate::complex::{
    make_complex, Complex, ComplexError, Facet, Label, ProcessName, Value, Vertex,
};
use crate::task::{build_input_complex, LclTask, TaskError};

pub use view::{NodeState, RingView};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProtocolError {
    #[error("t-round protocol complexes with t >= 1 are only supported on rings, not degree {0}")]
    UnsupportedDegree(usize),
    #[error("ID mode needs R >= {needed}, got R = {r}")]
    InsufficientIds { needed: u32, r: u32 },
    #[error("value carries no IDs")]
    NoIds,
    #[error("views have different radii")]
    RadiusMismatch,
    #[error("malformed view {0}")]
    MalformedView(String),
    #[error("facet {0} is not a protocol-complex facet")]
    NotAWindow(String),
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// How identifiers are assigned to the nodes of a window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IdMode {
    None,
    /// Pairwise distinct IDs from `1..=R`.
    Arbitrary(u32),
    /// IDs from `1..=R` strictly increasing from left to right.
    Increasing(u32),
}

impl IdMode {
    pub fn id_range(&self) -> Option<u32> {
        match *self {
            IdMode::None => None,
            IdMode::Arbitrary(r) | IdMode::Increasing(r) => Some(r),
        }
    }

    /// The default ID range for `t` rounds: enough IDs for a merged window.
    pub fn default_range(t: usize) -> u32 {
        view_bound(2, t as u32 + 1) as u32
    }

    /// Whether an ID sequence, read left to right, is allowed by the mode.
    pub fn admits(&self, ids: &[Option<u32>]) -> bool {
        match *self {
            IdMode::None => ids.iter().all(Option::is_none),
            IdMode::Arbitrary(r) | IdMode::Increasing(r) => {
                let Some(ids) = ids.iter().copied().collect::<Option<Vec<u32>>>() else {
                    return false;
                };
                if ids.iter().any(|&x| x == 0 || x > r) {
                    return false;
                }
                if matches!(self, IdMode::Increasing(_)) {
                    ids.windows(2).all(|w| w[0] < w[1])
                } else {
                    ids.iter().all_unique()
                }
            }
        }
    }

    fn id_tuples(&self, len: usize) -> Vec<Vec<Option<u32>>> {
        let wrap = |v: Vec<u32>| v.into_iter().map(Some).collect();
        match *self {
            IdMode::None => vec![vec![None; len]],
            IdMode::Arbitrary(r) => (1..=r).permutations(len).map(wrap).collect(),
            IdMode::Increasing(r) => (1..=r).combinations(len).map(wrap).collect(),
        }
    }
}

impl fmt::Display for IdMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdMode::None => write!(f, "none"),
            IdMode::Arbitrary(r) => write!(f, "arbitrary(R={r})"),
            IdMode::Increasing(r) => write!(f, "increasing(R={r})"),
        }
    }
}

/// Number of nodes within distance `k` of a node of a `d`-regular tree.
pub fn view_bound(d: u32, k: u32) -> u64 {
    if d == 2 {
        1 + 2 * k as u64
    } else {
        let d = d as u64;
        1 + d * ((d - 1).pow(k) - 1) / (d - 2)
    }
}

fn check_ids(mode: IdMode, needed: usize) -> Result<(), ProtocolError> {
    match mode.id_range() {
        Some(r) if (r as usize) < needed => Err(ProtocolError::InsufficientIds {
            needed: needed as u32,
            r,
        }),
        _ => Ok(()),
    }
}

/// All label sequences of length `len` satisfying the task's promise, in
/// lexicographic label order.
pub(crate) fn label_windows(task: &LclTask, len: usize) -> Vec<Vec<Label>> {
    fn go(task: &LclTask, len: usize, cur: &mut Vec<Label>, out: &mut Vec<Vec<Label>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for l in task.in_labels() {
            cur.push(l.clone());
            if task.admissible_suffix(cur) {
                go(task, len, cur, out);
            }
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(task, len, &mut Vec::with_capacity(len), &mut out);
    out
}

fn decorate(labels: &[Label], ids: &[Option<u32>]) -> Vec<NodeState> {
    labels
        .iter()
        .zip(ids)
        .map(|(l, &id)| NodeState {
            id,
            label: l.clone(),
        })
        .collect()
}

/// All promise-satisfying ring views of radius `t`, in canonical order.
pub fn enumerate_views(
    task: &LclTask,
    t: usize,
    mode: IdMode,
) -> Result<Vec<RingView>, ProtocolError> {
    if t >= 1 && task.degree() != 2 {
        return Err(ProtocolError::UnsupportedDegree(task.degree()));
    }
    let len = 2 * t + 1;
    check_ids(mode, len)?;
    let id_tuples = mode.id_tuples(len);
    let mut views = Vec::new();
    for labels in label_windows(task, len) {
        for ids in &id_tuples {
            views.push(RingView::new(decorate(&labels, ids))?);
        }
    }
    views.sort();
    Ok(views)
}

/// A window of `2t + 3` consecutive node states: the union of the views of
/// the three central nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergedWindow {
    states: Vec<NodeState>,
}

impl MergedWindow {
    pub fn states(&self) -> &[NodeState] {
        &self.states
    }

    pub fn radius(&self) -> usize {
        (self.states.len() - 3) / 2
    }

    /// The views of the left, middle and right central nodes.
    pub fn views(&self) -> [RingView; 3] {
        let len = self.states.len() - 2;
        [0, 1, 2].map(|i| {
            RingView::new(self.states[i..i + len].to_vec()).expect("window slices are well formed")
        })
    }

    pub fn facet(&self) -> Facet {
        let names = [ProcessName(-1), ProcessName(0), ProcessName(1)];
        let vs = names
            .into_iter()
            .zip(self.views())
            .map(|(n, w)| Vertex::new(n, w.to_value()))
            .collect();
        Facet::new(vs).expect("three distinct names")
    }
}

/// Returns the merged window of three views if they can be the views of
/// three consecutive nodes of an admissible ring.
pub fn compatible(
    task: &LclTask,
    mode: IdMode,
    w_left: &RingView,
    w_mid: &RingView,
    w_right: &RingView,
) -> Result<Option<MergedWindow>, ProtocolError> {
    let t = w_mid.radius();
    if w_left.radius() != t || w_right.radius() != t {
        return Err(ProtocolError::RadiusMismatch);
    }
    let (l, m, r) = (w_left.states(), w_mid.states(), w_right.states());
    let k = 2 * t;
    if l[1..] != m[..k] || m[1..] != r[..k] {
        return Ok(None);
    }
    let mut states = l.to_vec();
    if t == 0 {
        states.extend([m[0].clone(), r[0].clone()]);
    } else {
        states.extend_from_slice(&r[k - 1..]);
    }
    let labels: Vec<Label> = states.iter().map(|s| s.label.clone()).collect();
    let ids: Vec<Option<u32>> = states.iter().map(|s| s.id).collect();
    if !task.admissible_window(&labels) || !mode.admits(&ids) {
        return Ok(None);
    }
    Ok(Some(MergedWindow { states }))
}

/// Reconstructs the merged window of a ring protocol-complex facet.
pub fn merged_window(facet: &Facet) -> Result<MergedWindow, ProtocolError> {
    let bad = || ProtocolError::NotAWindow(facet.to_string());
    if facet.len() != 3 {
        return Err(bad());
    }
    let views: Vec<RingView> = facet
        .values()
        .map(RingView::from_value)
        .collect::<Option<_>>()
        .ok_or_else(bad)?;
    let t = views[1].radius();
    if views.iter().any(|w| w.radius() != t) {
        return Err(bad());
    }
    let (l, m, r) = (views[0].states(), views[1].states(), views[2].states());
    if t > 0 && (l[1..] != m[..2 * t] || m[1..] != r[..2 * t]) {
        return Err(bad());
    }
    let mut states = l.to_vec();
    if t == 0 {
        states.extend([m[0].clone(), r[0].clone()]);
    } else {
        states.extend_from_slice(&r[2 * t - 1..]);
    }
    Ok(MergedWindow { states })
}

/// The protocol complex after `t` rounds.
///
/// For `t = 0` this is the ID-decorated input complex and works for every
/// degree; for `t >= 1` only rings are supported.
pub fn build_protocol_complex(
    task: &LclTask,
    t: usize,
    mode: IdMode,
) -> Result<Complex, ProtocolError> {
    let d = task.degree();
    if t == 0 {
        check_ids(mode, d + 1)?;
        let input = build_input_complex(task)?;
        let id_tuples = mode.id_tuples(d + 1);
        let mut facets = Vec::new();
        for f in input.facets() {
            for ids in &id_tuples {
                let vs = f
                    .entries()
                    .iter()
                    .zip(ids)
                    .map(|(v, &id)| {
                        let label = v.value.as_label().expect("input values are labels").clone();
                        let value = match id {
                            Some(id) => Value::IdLabel { id, label },
                            None => Value::Label(label),
                        };
                        Vertex::new(v.name, value)
                    })
                    .collect();
                facets.push(Facet::new(vs)?);
            }
        }
        return Ok(make_complex(d, facets)?);
    }
    if d != 2 {
        return Err(ProtocolError::UnsupportedDegree(d));
    }
    let len = 2 * t + 3;
    check_ids(mode, len)?;
    let id_tuples = mode.id_tuples(len);
    let mut facets = Vec::new();
    for labels in label_windows(task, len) {
        for ids in &id_tuples {
            facets.push(
                MergedWindow {
                    states: decorate(&labels, ids),
                }
                .facet(),
            );
        }
    }
    Ok(make_complex(2, facets)?)
}

/// Strips IDs from a vertex value, keeping the vertex name.
pub fn pi(v: &Vertex) -> Result<Vertex, ProtocolError> {
    match &v.value {
        Value::IdLabel { label, .. } => Ok(Vertex::new(v.name, label.clone())),
        Value::View(w) if w.has_ids() => Ok(Vertex::new(v.name, w.strip_ids()?.to_value())),
        _ => Err(ProtocolError::NoIds),
    }
}

fn center_of(v: &Value) -> Option<NodeState> {
    RingView::from_value(v).map(|w| w.center().clone())
}

/// The facets of `p` that can arise from the input facet `f`: those whose
/// three view centers are exactly the entries of `f`.
pub fn xi(f: &Facet, p: &Complex) -> Vec<Facet> {
    let want: Vec<Option<NodeState>> = f.values().map(center_of).collect();
    p.facets()
        .iter()
        .filter(|g| g.values().map(center_of).eq(want.iter().cloned()))
        .cloned()
        .collect()
}

/// Replaces the IDs of a view by their ranks `1..=2t+1` within the view.
pub fn canonicalize_ids(w: &RingView) -> Result<RingView, ProtocolError> {
    let ids = w.ids().ok_or(ProtocolError::NoIds)?;
    let mut sorted = ids.clone();
    sorted.sort_unstable();
    let states = w
        .states()
        .iter()
        .zip(&ids)
        .map(|(s, id)| {
            let rank = sorted.binary_search(id).expect("id is present") as u32 + 1;
            NodeState::with_id(rank, s.label.clone())
        })
        .collect();
    RingView::new(states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{component_signature, connected_components};
    use crate::task::builtin;

    fn view(s: &str) -> RingView {
        RingView::parse(s).unwrap()
    }

    #[test]
    fn view_bounds() {
        assert_eq!(view_bound(2, 1), 3);
        assert_eq!(view_bound(2, 0), 1);
        assert_eq!(view_bound(3, 2), 10);
        assert_eq!(IdMode::default_range(1), 5);
    }

    #[test]
    fn view_counts() {
        let t = builtin("3col-to-mis").unwrap();
        assert_eq!(enumerate_views(&t, 1, IdMode::None).unwrap().len(), 12);
        assert_eq!(
            enumerate_views(&t, 0, IdMode::Arbitrary(3)).unwrap().len(),
            9
        );
        let v0 = enumerate_views(&t, 0, IdMode::None).unwrap();
        let labels: Vec<String> = v0.iter().map(|v| v.to_string()).collect();
        assert_eq!(labels, ["1", "2", "3"]);
    }

    #[test]
    fn compatibility() {
        let t = builtin("3col-to-mis").unwrap();
        let m = compatible(
            &t,
            IdMode::None,
            &view("3|1|2"),
            &view("1|2|3"),
            &view("2|3|1"),
        )
        .unwrap()
        .unwrap();
        let labels: Vec<String> = m.states().iter().map(|s| s.to_string()).collect();
        assert_eq!(labels, ["3", "1", "2", "3", "1"]);
        assert_eq!(m.views(), [view("3|1|2"), view("1|2|3"), view("2|3|1")]);
        assert!(compatible(
            &t,
            IdMode::None,
            &view("1|2|1"),
            &view("2|1|2"),
            &view("1|3|1")
        )
        .unwrap()
        .is_none());
        let mode = IdMode::Arbitrary(5);
        let repeated = compatible(
            &t,
            mode,
            &view("(1:1)|(2:2)|(3:1)"),
            &view("(2:2)|(3:1)|(4:2)"),
            &view("(3:1)|(4:2)|(1:3)"),
        );
        assert!(repeated.unwrap().is_none());
        assert_eq!(
            compatible(&t, mode, &view("1"), &view("1|2|3"), &view("1")),
            Err(ProtocolError::RadiusMismatch)
        );
    }

    #[test]
    fn one_round_complex() {
        let t = builtin("3col-to-mis").unwrap();
        let p = build_protocol_complex(&t, 1, IdMode::None).unwrap();
        assert_eq!(p.vertices().len(), 36);
        assert_eq!(p.facets().len(), 48);
        let comps = connected_components(&p);
        assert_eq!(comps.len(), 3);
        let s0 = component_signature(&p, &comps[0]);
        assert!(comps.iter().all(|b| component_signature(&p, b) == s0));
    }

    #[test]
    fn two_round_complex() {
        let t = builtin("3col-to-mis").unwrap();
        let p = build_protocol_complex(&t, 2, IdMode::None).unwrap();
        assert_eq!(p.facets().len(), 3 * 2usize.pow(6));
        let comps = connected_components(&p);
        assert_eq!(comps.len(), 12);
        let s0 = component_signature(&p, &comps[0]);
        assert!(comps.iter().all(|b| component_signature(&p, b) == s0));
    }

    #[test]
    fn zero_round_arbitrary_ids() {
        let t = builtin("3col-to-mis").unwrap();
        let p = build_protocol_complex(&t, 0, IdMode::Arbitrary(3)).unwrap();
        // 12 colorings times 3! ID assignments
        assert_eq!(p.facets().len(), 72);
        assert_eq!(p.vertices().len(), 27);
        assert!(matches!(
            build_protocol_complex(&t, 1, IdMode::Arbitrary(4)),
            Err(ProtocolError::InsufficientIds { needed: 5, r: 4 })
        ));
    }

    #[test]
    fn general_degree() {
        let t = builtin("mis:3").unwrap();
        assert!(build_protocol_complex(&t, 0, IdMode::None).is_ok());
        assert_eq!(
            build_protocol_complex(&t, 1, IdMode::None),
            Err(ProtocolError::UnsupportedDegree(3))
        );
    }

    #[test]
    fn windows_round_trip() {
        let t = builtin("3col-to-mis").unwrap();
        for tt in 0..=2 {
            let p = build_protocol_complex(&t, tt, IdMode::None).unwrap();
            for f in p.facets() {
                assert_eq!(&merged_window(f).unwrap().facet(), f);
            }
        }
    }

    #[test]
    fn pi_strips_ids() {
        let v = Vertex::new(
            ProcessName(0),
            Value::IdLabel {
                id: 7,
                label: Label::number(2),
            },
        );
        let p = pi(&v).unwrap();
        assert_eq!(p, Vertex::new(ProcessName(0), Label::number(2)));
        assert_eq!(pi(&p), Err(ProtocolError::NoIds));
        let w = Vertex::new(ProcessName(1), Value::View(view("(3:1)|(1:2)|(2:1)")));
        assert_eq!(
            pi(&w).unwrap(),
            Vertex::new(ProcessName(1), Value::View(view("1|2|1")))
        );
    }

    #[test]
    fn xi_filters_by_centers() {
        let t = builtin("3col-to-mis").unwrap();
        let p0 = build_protocol_complex(&t, 0, IdMode::None).unwrap();
        for f in p0.facets() {
            assert_eq!(xi(f, &p0), vec![f.clone()]);
        }
        let p1 = build_protocol_complex(&t, 1, IdMode::None).unwrap();
        let f = Facet::from_values(
            2,
            ["2", "1", "2"]
                .map(|s| Value::Label(Label::new(s).unwrap()))
                .into(),
        )
        .unwrap();
        let got = xi(&f, &p1);
        // x 2 1 2 y with x, y in {1, 3}
        assert_eq!(got.len(), 4);
        for g in &got {
            let m = merged_window(g).unwrap();
            let centre: Vec<String> = m.states()[1..4].iter().map(|s| s.to_string()).collect();
            assert_eq!(centre, ["2", "1", "2"]);
        }
    }

    #[test]
    fn canonical_ids() {
        assert_eq!(
            canonicalize_ids(&view("(9:1)|(4:2)|(17:3)")).unwrap(),
            view("(2:1)|(1:2)|(3:3)")
        );
        assert_eq!(canonicalize_ids(&view("1|2|3")), Err(ProtocolError::NoIds));
    }
}
