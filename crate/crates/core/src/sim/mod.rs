//! Synchronous execution of algorithm tables on concrete rings.
//!
//! A `t`-round algorithm is run by reading each node's radius-`t` window
//! cyclically and looking it up in the table; the outputs are then checked
//! star by star against the task.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};

use crate::complex::Label;
use crate::protocol::{enumerate_views, IdMode, NodeState, RingView};
use crate::search::AlgorithmTable;
use crate::task::{builtin, delta_allows_labels, good_star, LclTask, Side, Star};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("no labeling of the {n}-node ring satisfies the input promise")]
    InfeasiblePromise { n: usize },
    #[error("a {rounds}-round table needs rings of at least {needed} nodes, got {n}")]
    RingTooSmall {
        n: usize,
        rounds: usize,
        needed: usize,
    },
    #[error("node {position} has view {view}, which the table does not cover")]
    MissingView { position: usize, view: String },
    #[error("table ID mode {table} does not match instance IDs")]
    ModeMismatch { table: String },
    #[error("invalid ring instance: {0}")]
    InvalidInstance(String),
    #[error("need at least {needed} IDs, pool has {pool}")]
    TooFewIds { needed: usize, pool: u32 },
}

/// How IDs are laid out on a ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IdDiscipline {
    None,
    /// Any pairwise distinct IDs.
    Arbitrary,
    /// IDs increase along the ring indices, with one descent at the wrap.
    Increasing,
}

impl IdDiscipline {
    /// The discipline matching a table's ID mode.
    pub fn for_mode(mode: IdMode) -> IdDiscipline {
        match mode {
            IdMode::None => IdDiscipline::None,
            IdMode::Arbitrary(_) => IdDiscipline::Arbitrary,
            IdMode::Increasing(_) => IdDiscipline::Increasing,
        }
    }
}

impl fmt::Display for IdDiscipline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IdDiscipline::None => "none",
            IdDiscipline::Arbitrary => "arbitrary",
            IdDiscipline::Increasing => "increasing",
        })
    }
}

/// A labeled (and possibly ID-assigned) ring; node `i` neighbors `i ± 1 mod n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingInstance {
    labels: Vec<Label>,
    ids: Option<Vec<u32>>,
    discipline: IdDiscipline,
}

/// Checks every cyclic window of the ring against the promise.
fn cyclic_admissible(task: &LclTask, labels: &[Label]) -> bool {
    let n = labels.len();
    let longest = task
        .forbidden_windows()
        .iter()
        .map(Vec::len)
        .max()
        .unwrap_or(0)
        .max(3);
    let ext = (longest - 1).min(n - 1);
    let mut seq = labels.to_vec();
    seq.extend_from_slice(&labels[..ext]);
    task.admissible_window(&seq)
}

impl RingInstance {
    pub fn new(
        task: &LclTask,
        labels: Vec<Label>,
        ids: Option<Vec<u32>>,
        discipline: IdDiscipline,
    ) -> Result<Self, SimError> {
        let n = labels.len();
        let bad = |m: String| Err(SimError::InvalidInstance(m));
        if n < 3 {
            return bad(format!("rings need at least 3 nodes, got {n}"));
        }
        if !cyclic_admissible(task, &labels) {
            return bad("labels violate the input promise".into());
        }
        match (&ids, discipline) {
            (None, IdDiscipline::None) => {}
            (Some(ids), IdDiscipline::Arbitrary | IdDiscipline::Increasing) => {
                if ids.len() != n {
                    return bad(format!("{} IDs for {n} nodes", ids.len()));
                }
                if ids.contains(&0) || !ids.iter().all_unique() {
                    return bad("IDs must be distinct positive integers".into());
                }
                if discipline == IdDiscipline::Increasing && !ids.windows(2).all(|w| w[0] < w[1]) {
                    return bad("increasing IDs must grow along the ring indices".into());
                }
            }
            _ => return bad(format!("IDs do not match discipline {discipline}")),
        }
        Ok(RingInstance {
            labels,
            ids,
            discipline,
        })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn ids(&self) -> Option<&[u32]> {
        self.ids.as_deref()
    }

    pub fn discipline(&self) -> IdDiscipline {
        self.discipline
    }

    /// The radius-`t` view of node `i`, read cyclically.
    pub fn view(&self, i: usize, t: usize) -> RingView {
        let n = self.n();
        let states = (0..=2 * t)
            .map(|k| {
                let j = (i + n * (t + 1) + k - t) % n;
                NodeState {
                    id: self.ids.as_ref().map(|ids| ids[j]),
                    label: self.labels[j].clone(),
                }
            })
            .collect();
        RingView::new(states).expect("odd window")
    }

    pub fn to_json(&self) -> Json {
        let mut j = json!({
            "n": self.n(),
            "labels": self.labels.iter().map(Label::as_str).collect::<Vec<_>>(),
        });
        if let Some(ids) = &self.ids {
            j["ids"] = json!(ids);
        }
        j
    }

    /// Reads an instance document; the discipline defaults to arbitrary
    /// when IDs are present.
    pub fn from_json(
        task: &LclTask,
        j: &Json,
        discipline: Option<IdDiscipline>,
    ) -> Result<Self, SimError> {
        let bad = |m: &str| SimError::InvalidInstance(m.to_string());
        let labels = j
            .get("labels")
            .and_then(Json::as_array)
            .ok_or_else(|| bad("missing \"labels\" array"))?
            .iter()
            .map(|l| {
                l.as_str()
                    .and_then(|s| Label::new(s).ok())
                    .ok_or_else(|| bad("labels must be label strings"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(n) = j.get("n").and_then(Json::as_u64) {
            if n as usize != labels.len() {
                return Err(bad("\"n\" disagrees with the number of labels"));
            }
        }
        let ids = match j.get("ids") {
            None | Some(Json::Null) => None,
            Some(a) => Some(
                a.as_array()
                    .ok_or_else(|| bad("\"ids\" must be an array"))?
                    .iter()
                    .map(|x| {
                        x.as_u64()
                            .and_then(|x| u32::try_from(x).ok())
                            .ok_or_else(|| bad("bad id"))
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        };
        let discipline = discipline.unwrap_or(if ids.is_some() {
            IdDiscipline::Arbitrary
        } else {
            IdDiscipline::None
        });
        RingInstance::new(task, labels, ids, discipline)
    }
}

/// All promise-satisfying cyclic labelings of the `n`-ring, lexicographic.
pub fn cyclic_labelings(task: &LclTask, n: usize) -> Vec<Vec<Label>> {
    fn go(task: &LclTask, n: usize, cur: &mut Vec<Label>, out: &mut Vec<Vec<Label>>) {
        if cur.len() == n {
            if cyclic_admissible(task, cur) {
                out.push(cur.clone());
            }
            return;
        }
        for l in task.in_labels() {
            cur.push(l.clone());
            if task.admissible_suffix(cur) {
                go(task, n, cur, out);
            }
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n >= 3 {
        go(task, n, &mut Vec::with_capacity(n), &mut out);
    }
    out
}

fn id_count(discipline: IdDiscipline, n: usize, pool: u32) -> u128 {
    let pool = pool as u128;
    let n = n as u128;
    if discipline == IdDiscipline::None {
        return 1;
    }
    if pool < n {
        return 0;
    }
    match discipline {
        IdDiscipline::None => 1,
        IdDiscipline::Arbitrary => (pool - n + 1..=pool).product(),
        IdDiscipline::Increasing => (0..n).fold(1u128, |acc, i| acc * (pool - i) / (i + 1)),
    }
}

fn id_assignments(
    discipline: IdDiscipline,
    n: usize,
    pool: u32,
) -> Box<dyn Iterator<Item = Option<Vec<u32>>>> {
    match discipline {
        IdDiscipline::None => Box::new(std::iter::once(None)),
        IdDiscipline::Arbitrary => Box::new((1..=pool).permutations(n).map(Some)),
        IdDiscipline::Increasing => Box::new((1..=pool).combinations(n).map(Some)),
    }
}

/// Streams every admissible instance on `n` nodes: each promise-satisfying
/// labeling paired with every ID assignment from `1..=id_pool` allowed by
/// the discipline.
pub fn enumerate_instances<'a>(
    task: &'a LclTask,
    n: usize,
    discipline: IdDiscipline,
    id_pool: u32,
) -> Result<impl Iterator<Item = RingInstance> + 'a, SimError> {
    if discipline != IdDiscipline::None && (id_pool as usize) < n {
        return Err(SimError::TooFewIds {
            needed: n,
            pool: id_pool,
        });
    }
    let labelings = cyclic_labelings(task, n);
    if labelings.is_empty() {
        return Err(SimError::InfeasiblePromise { n });
    }
    Ok(labelings.into_iter().flat_map(move |labels| {
        id_assignments(discipline, n, id_pool).map(move |ids| RingInstance {
            labels: labels.clone(),
            ids,
            discipline,
        })
    }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub position: usize,
    /// The output star at `position`, e.g. `0[0,0]`.
    pub star: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    pub outputs: Vec<Label>,
    pub legal: bool,
    pub violations: Vec<Violation>,
}

/// Runs a table on a ring and checks the outputs.
pub fn run(
    table: &AlgorithmTable,
    task: &LclTask,
    inst: &RingInstance,
) -> Result<RunReport, SimError> {
    let t = table.rounds();
    let n = inst.n();
    if n < 2 * t + 1 {
        return Err(SimError::RingTooSmall {
            n,
            rounds: t,
            needed: 2 * t + 1,
        });
    }
    if (table.id_mode() == IdMode::None) != inst.ids.is_none() {
        return Err(SimError::ModeMismatch {
            table: table.id_mode().to_string(),
        });
    }
    let outputs = (0..n)
        .map(|i| {
            let w = inst.view(i, t);
            table.get(&w).cloned().ok_or_else(|| SimError::MissingView {
                position: i,
                view: w.to_string(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut violations = Vec::new();
    for i in 0..n {
        let (l, r) = ((i + n - 1) % n, (i + 1) % n);
        let out = [outputs[l].clone(), outputs[i].clone(), outputs[r].clone()];
        let inp = [
            inst.labels[l].clone(),
            inst.labels[i].clone(),
            inst.labels[r].clone(),
        ];
        let star = Star::of_tuple(2, &out);
        if !good_star(task, Side::Output, &star) || !delta_allows_labels(task, &inp, &out) {
            violations.push(Violation {
                position: i,
                star: star.to_string(),
            });
        }
    }
    Ok(RunReport {
        outputs,
        legal: violations.is_empty(),
        violations,
    })
}

/// The two-round 3-coloring to MIS algorithm: nodes of color 3 join color 1
/// unless a neighbor has color 1, then nodes of color 2 do the same with
/// the updated colors; a node outputs 1 iff it ends with color 1.
pub fn reference_linial_table() -> AlgorithmTable {
    let task = builtin("3col-to-mis").expect("builtin");
    let (one, two, three) = (Label::number(1), Label::number(2), Label::number(3));
    let mut entries = BTreeMap::new();
    for w in enumerate_views(&task, 2, IdMode::None).expect("ring views") {
        let mut c = w.labels();
        let pass = |c: &[Label], from: &Label, i: usize| -> Label {
            if &c[i] == from && c[i - 1] != one && c[i + 1] != one {
                one.clone()
            } else {
                c[i].clone()
            }
        };
        let first: Vec<Label> = (1..4).map(|i| pass(&c, &three, i)).collect();
        c.splice(1..4, first);
        let center = pass(&c, &two, 2);
        entries.insert(w, Label::number(u32::from(center == one)));
    }
    AlgorithmTable::new(2, IdMode::None, entries)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailedRun {
    pub instance: RingInstance,
    pub violation: Violation,
}

/// Aggregate of a cross-validation run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossReport {
    pub instances: u64,
    pub legal: u64,
    pub exhaustive: bool,
    /// Ring sizes with no admissible labeling.
    pub infeasible_n: Vec<usize>,
    /// The first few failing instances.
    pub failures: Vec<FailedRun>,
}

impl CrossReport {
    pub fn passed(&self) -> bool {
        self.instances > 0 && self.legal == self.instances
    }

    pub fn summary(&self) -> String {
        format!(
            "{} instances={} legal={} illegal={} mode={}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.instances,
            self.legal,
            self.instances - self.legal,
            if self.exhaustive {
                "exhaustive"
            } else {
                "sampled"
            },
        )
    }

    pub fn to_json(&self) -> Json {
        let failures: Vec<Json> = self
            .failures
            .iter()
            .map(|f| {
                json!({
                    "instance": f.instance.to_json(),
                    "position": f.violation.position,
                    "star": f.violation.star,
                })
            })
            .collect();
        json!({
            "result": if self.passed() { "pass" } else { "fail" },
            "instances": self.instances,
            "legal": self.legal,
            "illegal": self.instances - self.legal,
            "exhaustive": self.exhaustive,
            "infeasible_n": self.infeasible_n,
            "failures": failures,
        })
    }
}

/// Exhaustive below this many instances, sampled above.
pub const EXHAUSTIVE_LIMIT: u128 = 1_000_000;
const REPORTED_FAILURES: usize = 10;

/// Settings for [`cross_validate`]. `id_pool` defaults to the table's ID
/// range.
#[derive(Debug, Clone)]
pub struct CrossConfig {
    pub n_range: RangeInclusive<usize>,
    pub id_pool: Option<u32>,
    pub trials: u64,
    pub seed: u64,
}

/// Runs a table on every admissible ring with `n` in range (or on a seeded
/// sample when there are more than [`EXHAUSTIVE_LIMIT`] of them).
pub fn cross_validate(
    table: &AlgorithmTable,
    task: &LclTask,
    cfg: &CrossConfig,
) -> Result<CrossReport, SimError> {
    let discipline = IdDiscipline::for_mode(table.id_mode());
    let pool = cfg.id_pool.or(table.id_mode().id_range()).unwrap_or(0);
    let t = table.rounds();
    if *cfg.n_range.start() < 2 * t + 1 {
        return Err(SimError::RingTooSmall {
            n: *cfg.n_range.start(),
            rounds: t,
            needed: 2 * t + 1,
        });
    }
    let mut per_n = Vec::new();
    let mut infeasible_n = Vec::new();
    let mut total: u128 = 0;
    for n in cfg.n_range.clone() {
        let labelings = cyclic_labelings(task, n);
        if labelings.is_empty() {
            infeasible_n.push(n);
            continue;
        }
        let ids = id_count(discipline, n, pool);
        if ids == 0 {
            return Err(SimError::TooFewIds { needed: n, pool });
        }
        total += labelings.len() as u128 * ids;
        per_n.push((n, labelings));
    }
    if per_n.is_empty() {
        return Err(SimError::InfeasiblePromise {
            n: *cfg.n_range.start(),
        });
    }
    let mut report = CrossReport {
        instances: 0,
        legal: 0,
        exhaustive: total <= EXHAUSTIVE_LIMIT,
        infeasible_n,
        failures: vec![],
    };
    let record = |inst: RingInstance, report: &mut CrossReport| -> Result<(), SimError> {
        let r = run(table, task, &inst)?;
        report.instances += 1;
        if r.legal {
            report.legal += 1;
        } else if report.failures.len() < REPORTED_FAILURES {
            report.failures.push(FailedRun {
                instance: inst,
                violation: r.violations[0].clone(),
            });
        }
        Ok(())
    };
    if report.exhaustive {
        for (n, labelings) in &per_n {
            for labels in labelings {
                for ids in id_assignments(discipline, *n, pool) {
                    record(
                        RingInstance {
                            labels: labels.clone(),
                            ids,
                            discipline,
                        },
                        &mut report,
                    )?;
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let pool_ids: Vec<u32> = (1..=pool).collect();
        for _ in 0..cfg.trials {
            let (n, labelings) = &per_n[rng.gen_range(0..per_n.len())];
            let labels = labelings[rng.gen_range(0..labelings.len())].clone();
            let ids = match discipline {
                IdDiscipline::None => None,
                IdDiscipline::Arbitrary => {
                    Some(pool_ids.choose_multiple(&mut rng, *n).copied().collect())
                }
                IdDiscipline::Increasing => {
                    let mut v: Vec<u32> = pool_ids.choose_multiple(&mut rng, *n).copied().collect();
                    v.sort_unstable();
                    Some(v)
                }
            };
            record(
                RingInstance {
                    labels,
                    ids,
                    discipline,
                },
                &mut report,
            )?;
        }
    }
    Ok(report)
}
