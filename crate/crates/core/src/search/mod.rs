//! Exact search for name-independent simplicial maps from a protocol
//! complex to the output complex, and extraction of algorithm tables.
//!
//! Each view is a variable ranging over the output labels. A facet of the
//! protocol complex constrains its views to label triples that form an
//! output facet allowed by the relation Δ at the facet's central input
//! star. Independent components are solved separately, possibly in
//! parallel; results are merged in component order, so the outcome never
//! depends on the thread count.

mod brute;
mod csp;
mod table;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::{json, Map, Value as Json};

use crate::complex::{ComplexError, MapTable};
use crate::protocol::{build_protocol_complex, enumerate_views, IdMode, ProtocolError, RingView};
use crate::task::{build_output_complex, LclTask, TaskError};

pub use brute::{brute_force_solve, BRUTE_FORCE_LIMIT};
pub use table::AlgorithmTable;

use csp::{solve_component, Outcome, Problem};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("{labels} output labels are too many for arity-{arity} constraint tables")]
    TooManyLabels { labels: usize, arity: usize },
    #[error("brute force would enumerate {0} assignments, above the limit")]
    TooLarge(String),
    #[error("result is not satisfiable, no witness to extract")]
    NotSat,
    #[error("witness has no label for view {0}")]
    MissingView(String),
    #[error("invalid algorithm table: {0}")]
    Format(String),
}

/// Search limits. `max_nodes` caps the tentative assignments per component;
/// `threads = 0` uses the machine's parallelism, `1` runs sequentially.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub max_nodes: u64,
    pub threads: usize,
}

pub const DEFAULT_MAX_NODES: u64 = 50_000_000;

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_nodes: DEFAULT_MAX_NODES,
            threads: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Sat(MapTable),
    Unsat,
    /// The node limit was hit before a decision.
    Unknown,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Sat(_) => "sat",
            Verdict::Unsat => "unsat",
            Verdict::Unknown => "unknown",
        }
    }

    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentStats {
    pub views: usize,
    pub constraints: usize,
    pub nodes: u64,
    /// `"sat"`, `"unsat"` (assignment space exhausted) or `"unknown"`.
    pub outcome: &'static str,
}

/// Search statistics. Contains no timings, so equal inputs give equal stats.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SearchStats {
    pub method: &'static str,
    pub views: usize,
    pub isolated_views: usize,
    pub facets: usize,
    pub constraints: usize,
    pub nodes: u64,
    pub components: Vec<ComponentStats>,
}

impl SearchStats {
    pub fn to_json(&self) -> Json {
        let comps: Vec<Json> = self
            .components
            .iter()
            .map(|c| json!({"views": c.views, "constraints": c.constraints, "nodes": c.nodes, "outcome": c.outcome}))
            .collect();
        let smallest_failed = self
            .components
            .iter()
            .enumerate()
            .filter(|(_, c)| c.outcome == "unsat")
            .min_by_key(|(i, c)| (c.views, *i))
            .map(|(i, _)| i);
        json!({
            "method": self.method,
            "views": self.views,
            "isolated_views": self.isolated_views,
            "facets": self.facets,
            "constraints": self.constraints,
            "nodes": self.nodes,
            "components": comps,
            "smallest_failed_component": smallest_failed,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub verdict: Verdict,
    pub stats: SearchStats,
}

impl SolveResult {
    pub fn witness(&self) -> Option<&MapTable> {
        match &self.verdict {
            Verdict::Sat(m) => Some(m),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Json {
        let mut j = json!({ "verdict": self.verdict.name(), "stats": self.stats.to_json() });
        if let Verdict::Sat(m) = &self.verdict {
            let w: Map<String, Json> = m
                .iter()
                .map(|(v, l)| (v.canonical(), Json::String(l.to_string())))
                .collect();
            j["witness"] = Json::Object(w);
        }
        j
    }
}

fn run(
    task: &LclTask,
    t: usize,
    mode: IdMode,
    opts: SolveOptions,
    skeleton: bool,
) -> Result<SolveResult, SearchError> {
    let p = build_protocol_complex(task, t, mode)?;
    let o = build_output_complex(task)?;
    let views = enumerate_views(task, t, mode)?;
    let problem = Problem::build(task, &views, &p, &o, skeleton)?;
    let (blocks, isolated) = problem.components();
    log::debug!(
        "search: {} views, {} constraints, {} components, {} isolated",
        problem.vars.len(),
        problem.constraints.len(),
        blocks.len(),
        isolated.len()
    );

    let solve_one = |(vars, cons): &(Vec<usize>, Vec<usize>)| {
        solve_component(&problem, vars, cons, opts.max_nodes)
    };
    let runs: Vec<csp::ComponentRun> = if opts.threads == 1 {
        blocks.iter().map(solve_one).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| SearchError::Format(format!("thread pool: {e}")))?;
        pool.install(|| blocks.par_iter().map(solve_one).collect())
    };

    let mut stats = SearchStats {
        method: if skeleton { "skeleton" } else { "full" },
        views: problem.vars.len(),
        isolated_views: isolated.len(),
        facets: p.facets().len(),
        constraints: problem.constraints.len(),
        ..Default::default()
    };
    let mut labels: BTreeMap<usize, u8> = BTreeMap::new();
    let (mut any_unsat, mut any_unknown) = (false, false);
    for ((vars, cons), r) in blocks.iter().zip(&runs) {
        stats.nodes += r.nodes;
        stats.components.push(ComponentStats {
            views: vars.len(),
            constraints: cons.len(),
            nodes: r.nodes,
            outcome: match r.outcome {
                Outcome::Sat => "sat",
                Outcome::Unsat => "unsat",
                Outcome::Unknown => "unknown",
            },
        });
        match r.outcome {
            Outcome::Sat => labels.extend(r.assignment.iter().copied()),
            Outcome::Unsat => any_unsat = true,
            Outcome::Unknown => any_unknown = true,
        }
    }
    // Views outside every facet take their first allowed label.
    for &v in &isolated {
        match problem.unary[v] {
            0 => any_unsat = true,
            m => {
                labels.insert(v, m.trailing_zeros() as u8);
            }
        }
    }
    let verdict = if any_unsat {
        Verdict::Unsat
    } else if any_unknown {
        Verdict::Unknown
    } else {
        Verdict::Sat(
            labels
                .into_iter()
                .map(|(v, l)| (problem.vars[v].clone(), problem.labels[l as usize].clone()))
                .collect(),
        )
    };
    Ok(SolveResult { verdict, stats })
}

/// Decides whether a `t`-round algorithm exists, i.e. whether the protocol
/// complex maps to the output complex respecting Δ.
pub fn solve(
    task: &LclTask,
    t: usize,
    mode: IdMode,
    opts: SolveOptions,
) -> Result<SolveResult, SearchError> {
    run(task, t, mode, opts, false)
}

/// The relaxation of [`solve`] to 1-skeletons: only edges must map to edges.
pub fn solve_skeleton(
    task: &LclTask,
    t: usize,
    mode: IdMode,
    opts: SolveOptions,
) -> Result<SolveResult, SearchError> {
    run(task, t, mode, opts, true)
}

/// Turns a satisfying result into the table of the algorithm it induces.
pub fn extract_algorithm(
    result: &SolveResult,
    task: &LclTask,
    t: usize,
    mode: IdMode,
) -> Result<AlgorithmTable, SearchError> {
    let witness = result.witness().ok_or(SearchError::NotSat)?;
    let mut entries = BTreeMap::new();
    for w in enumerate_views(task, t, mode)? {
        let l = witness
            .get(&w.to_value())
            .ok_or_else(|| SearchError::MissingView(w.to_string()))?;
        entries.insert(w, l.clone());
    }
    Ok(AlgorithmTable::new(t, mode, entries))
}

/// Reads a witness map back from a view-to-label object.
pub fn witness_from_json(j: &Json) -> Result<MapTable, SearchError> {
    let obj = j
        .as_object()
        .ok_or_else(|| SearchError::Format("witness must be an object".into()))?;
    obj.iter()
        .map(|(k, v)| {
            let w = RingView::parse(k)?;
            let l = v
                .as_str()
                .and_then(|s| crate::complex::Label::new(s).ok())
                .ok_or_else(|| SearchError::Format(format!("bad label for {k}")))?;
            Ok((w.to_value(), l))
        })
        .collect()
}
