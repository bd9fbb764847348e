//! Finite-domain constraint problem over views and its backtracking solver.

use std::collections::HashMap;

use crate::complex::{Complex, Label, Value};
use crate::protocol::RingView;
use crate::task::{delta_allows_labels, DeltaSpec, LclTask};

use super::SearchError;

/// Variables of a connected block and the indices of its constraints.
pub type Block = (Vec<usize>, Vec<usize>);

/// Image labels of a facet plus, for skeleton pairs, the two positions.
type RelationKey = (Vec<Label>, Option<(usize, usize)>);

/// Table relation over label indices, stored densely.
#[derive(Debug, Clone)]
pub(crate) struct Relation {
    arity: usize,
    base: usize,
    allowed: Vec<bool>,
}

/// Dense relations are capped at this many cells.
const MAX_RELATION_CELLS: usize = 1 << 24;

impl Relation {
    fn new(arity: usize, base: usize) -> Result<Self, SearchError> {
        let cells = (base as u128).pow(arity as u32);
        if cells > MAX_RELATION_CELLS as u128 {
            return Err(SearchError::TooManyLabels {
                labels: base,
                arity,
            });
        }
        Ok(Relation {
            arity,
            base,
            allowed: vec![false; cells as usize],
        })
    }

    fn index(&self, tuple: impl Iterator<Item = u8>) -> usize {
        tuple
            .fold((0, 1), |(acc, mul), l| {
                (acc + l as usize * mul, mul * self.base)
            })
            .0
    }

    fn insert(&mut self, tuple: &[u8]) {
        debug_assert_eq!(tuple.len(), self.arity);
        let i = self.index(tuple.iter().copied());
        self.allowed[i] = true;
    }

    fn allows(&self, tuple: impl Iterator<Item = u8>) -> bool {
        self.allowed[self.index(tuple)]
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Constraint {
    pub vars: Vec<usize>,
    pub rel: usize,
}

/// Variables are view values in canonical order; labels are output labels in
/// canonical order; `unary[v]` masks the labels allowed for `v`.
#[derive(Debug, Clone)]
pub(crate) struct Problem {
    pub vars: Vec<Value>,
    pub labels: Vec<Label>,
    pub unary: Vec<u64>,
    pub constraints: Vec<Constraint>,
    relations: Vec<Relation>,
}

fn center_label(v: &Value) -> Label {
    RingView::from_value(v)
        .expect("protocol values are views")
        .center()
        .label
        .clone()
}

impl Problem {
    /// Builds the problem. With `skeleton` set, each facet contributes one
    /// binary constraint per pair of positions instead of one full-arity
    /// constraint.
    pub fn build(
        task: &LclTask,
        views: &[RingView],
        p: &Complex,
        o: &Complex,
        skeleton: bool,
    ) -> Result<Problem, SearchError> {
        let labels: Vec<Label> = task.out_labels().iter().cloned().collect();
        if labels.len() > 64 {
            return Err(SearchError::TooManyLabels {
                labels: labels.len(),
                arity: 1,
            });
        }
        let label_index: HashMap<&Label, u8> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l, i as u8))
            .collect();
        let mut vars: Vec<Value> = views.iter().map(RingView::to_value).collect();
        vars.extend(p.vertex_values());
        vars.sort();
        vars.dedup();
        let var_index: HashMap<&Value, usize> =
            vars.iter().enumerate().map(|(i, v)| (v, i)).collect();

        let full = if labels.len() == 64 {
            u64::MAX
        } else {
            (1u64 << labels.len()) - 1
        };
        let unary: Vec<u64> = match task.delta() {
            DeltaSpec::PerNode(rel) => vars
                .iter()
                .map(|v| {
                    let c = center_label(v);
                    labels
                        .iter()
                        .enumerate()
                        .filter(|(_, l)| rel.contains(&(c.clone(), (*l).clone())))
                        .fold(0u64, |m, (i, _)| m | 1 << i)
                })
                .collect(),
            _ => vec![full; vars.len()],
        };

        let out_tuples: Vec<Vec<Label>> = o
            .facets()
            .iter()
            .map(|f| {
                f.values()
                    .map(|v| v.as_label().expect("output labels").clone())
                    .collect()
            })
            .collect();
        let arity = task.degree() + 1;
        let mut relations: Vec<Relation> = Vec::new();
        let mut cache: HashMap<RelationKey, usize> = HashMap::new();
        let mut constraints = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for f in p.facets() {
            let fvars: Vec<usize> = f.values().map(|v| var_index[v]).collect();
            let input: Vec<Label> = f.values().map(center_label).collect();
            let pairs: Vec<Option<(usize, usize)>> = if skeleton {
                (0..arity)
                    .flat_map(|i| (i + 1..arity).map(move |j| Some((i, j))))
                    .collect()
            } else {
                vec![None]
            };
            for proj in pairs {
                let key = (input.clone(), proj);
                let rel = match cache.get(&key) {
                    Some(&r) => r,
                    None => {
                        let mut r =
                            Relation::new(if proj.is_some() { 2 } else { arity }, labels.len())?;
                        for g in &out_tuples {
                            if !delta_allows_labels(task, &input, g) {
                                continue;
                            }
                            let idx: Vec<u8> = g.iter().map(|l| label_index[l]).collect();
                            match proj {
                                Some((i, j)) => r.insert(&[idx[i], idx[j]]),
                                None => r.insert(&idx),
                            }
                        }
                        relations.push(r);
                        cache.insert(key, relations.len() - 1);
                        relations.len() - 1
                    }
                };
                let cvars = match proj {
                    Some((i, j)) => vec![fvars[i], fvars[j]],
                    None => fvars.clone(),
                };
                if seen.insert((cvars.clone(), rel)) {
                    constraints.push(Constraint { vars: cvars, rel });
                }
            }
        }
        Ok(Problem {
            vars,
            labels,
            unary,
            constraints,
            relations,
        })
    }

    /// Variable blocks linked by constraints, each with its constraint
    /// indices. Blocks are ordered by their smallest variable; variables
    /// touched by no constraint are returned separately.
    pub fn components(&self) -> (Vec<Block>, Vec<usize>) {
        let n = self.vars.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut touched = vec![false; n];
        for c in &self.constraints {
            for &v in &c.vars {
                touched[v] = true;
                let (a, b) = (find(&mut parent, c.vars[0]), find(&mut parent, v));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut blocks: std::collections::BTreeMap<usize, Block> = Default::default();
        for (v, &hit) in touched.iter().enumerate() {
            if hit {
                let r = find(&mut parent, v);
                blocks.entry(r).or_default().0.push(v);
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            let r = find(&mut parent, c.vars[0]);
            blocks.get_mut(&r).expect("constrained").1.push(i);
        }
        let isolated = (0..n).filter(|&v| !touched[v]).collect();
        (blocks.into_values().collect(), isolated)
    }

    pub fn allows(&self, c: &Constraint, value_of: impl Fn(usize) -> u8) -> bool {
        self.relations[c.rel].allows(c.vars.iter().map(|&v| value_of(v)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outcome {
    Sat,
    Unsat,
    Unknown,
}

pub(crate) struct ComponentRun {
    pub outcome: Outcome,
    pub nodes: u64,
    /// `(variable, label index)` pairs when satisfiable.
    pub assignment: Vec<(usize, u8)>,
}

const UNASSIGNED: u8 = u8::MAX;

/// Forward-checking backtracking over one component. Variables are tried in
/// canonical order and labels in ascending order, so the first solution
/// found is deterministic. A node is one tentative assignment.
pub(crate) fn solve_component(
    p: &Problem,
    vars: &[usize],
    cons: &[usize],
    max_nodes: u64,
) -> ComponentRun {
    let n = vars.len();
    let local: HashMap<usize, usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut watch: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &ci in cons {
        let mut vs: Vec<usize> = p.constraints[ci].vars.iter().map(|v| local[v]).collect();
        vs.sort_unstable();
        vs.dedup();
        for v in vs {
            watch[v].push(ci);
        }
    }
    let mut domain: Vec<u64> = vars.iter().map(|&v| p.unary[v]).collect();
    let mut assign = vec![UNASSIGNED; n];
    let mut trail: Vec<(usize, u64)> = Vec::new();
    let mut marks = vec![0usize; n];
    let mut remaining = vec![0u64; n];
    let mut nodes = 0u64;

    let undo = |trail: &mut Vec<(usize, u64)>, domain: &mut [u64], mark: usize| {
        while trail.len() > mark {
            let (v, d) = trail.pop().expect("non-empty");
            domain[v] = d;
        }
    };

    // Assigning `v` may complete a constraint (check it) or leave exactly
    // one free variable in it (narrow that variable's domain).
    let propagate =
        |v: usize, assign: &[u8], domain: &mut [u64], trail: &mut Vec<(usize, u64)>| -> bool {
            for &ci in &watch[v] {
                let c = &p.constraints[ci];
                let mut free = None;
                let mut several = false;
                for &g in &c.vars {
                    let l = local[&g];
                    if assign[l] == UNASSIGNED {
                        match free {
                            None => free = Some(l),
                            Some(f) if f != l => several = true,
                            _ => {}
                        }
                    }
                }
                if several {
                    continue;
                }
                match free {
                    None => {
                        if !p.allows(c, |g| assign[local[&g]]) {
                            return false;
                        }
                    }
                    Some(u) => {
                        let mut keep = 0u64;
                        let mut bits = domain[u];
                        while bits != 0 {
                            let lab = bits.trailing_zeros() as u8;
                            bits &= bits - 1;
                            let ok = p.allows(c, |g| {
                                let l = local[&g];
                                if l == u {
                                    lab
                                } else {
                                    assign[l]
                                }
                            });
                            if ok {
                                keep |= 1 << lab;
                            }
                        }
                        if keep != domain[u] {
                            trail.push((u, domain[u]));
                            domain[u] = keep;
                            if keep == 0 {
                                return false;
                            }
                        }
                    }
                }
            }
            true
        };

    if n == 0 {
        return ComponentRun {
            outcome: Outcome::Sat,
            nodes: 0,
            assignment: vec![],
        };
    }
    let mut pos = 0usize;
    remaining[0] = domain[0];
    loop {
        if remaining[pos] == 0 {
            if pos == 0 {
                return ComponentRun {
                    outcome: Outcome::Unsat,
                    nodes,
                    assignment: vec![],
                };
            }
            pos -= 1;
            undo(&mut trail, &mut domain, marks[pos]);
            assign[pos] = UNASSIGNED;
            continue;
        }
        if nodes >= max_nodes {
            return ComponentRun {
                outcome: Outcome::Unknown,
                nodes,
                assignment: vec![],
            };
        }
        nodes += 1;
        let lab = remaining[pos].trailing_zeros() as u8;
        remaining[pos] &= remaining[pos] - 1;
        marks[pos] = trail.len();
        assign[pos] = lab;
        if propagate(pos, &assign, &mut domain, &mut trail) {
            if pos + 1 == n {
                let assignment = vars.iter().zip(&assign).map(|(&v, &l)| (v, l)).collect();
                return ComponentRun {
                    outcome: Outcome::Sat,
                    nodes,
                    assignment,
                };
            }
            pos += 1;
            remaining[pos] = domain[pos];
        } else {
            undo(&mut trail, &mut domain, marks[pos]);
            assign[pos] = UNASSIGNED;
        }
    }
}
