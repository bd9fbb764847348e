//! Exhaustive reference solver. It shares no code with the backtracking
//! search beyond complex construction, so the two can check each other.

use std::collections::HashSet;

use crate::complex::{Facet, Label, MapTable, Value, Vertex};
use crate::protocol::{build_protocol_complex, IdMode};
use crate::task::{build_output_complex, delta_allows, LclTask};

use super::{ComponentStats, SearchError, SearchStats, SolveResult, Verdict};

/// Two positions of a facet and the label pairs allowed there.
type PairCheck = ((usize, usize), HashSet<(usize, usize)>);

/// Largest number of total assignments the oracle will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 10_000_000;

/// Input facet at the center of a protocol facet, IDs stripped.
fn central_input(f: &Facet) -> Result<Facet, SearchError> {
    let vs = f
        .entries()
        .iter()
        .map(|v| {
            let label = match &v.value {
                Value::Label(l) | Value::IdLabel { label: l, .. } => l.clone(),
                Value::View(w) => w.center().label.clone(),
                Value::Family(_) => {
                    return Err(SearchError::Format("family-valued protocol facet".into()))
                }
            };
            Ok(Vertex::new(v.name, label))
        })
        .collect::<Result<_, SearchError>>()?;
    Ok(Facet::new(vs)?)
}

/// Decides the same question as `solve` (or `solve_skeleton` when
/// `skeleton` is set) by trying every assignment of output labels to the
/// vertex values of the protocol complex.
pub fn brute_force_solve(
    task: &LclTask,
    t: usize,
    mode: IdMode,
    skeleton: bool,
) -> Result<SolveResult, SearchError> {
    let p = build_protocol_complex(task, t, mode)?;
    let o = build_output_complex(task)?;
    let values: Vec<Value> = p.vertex_values().into_iter().collect();
    let labels: Vec<Label> = task.out_labels().iter().cloned().collect();
    let total = (labels.len() as u128).checked_pow(values.len() as u32);
    match total {
        Some(x) if x <= BRUTE_FORCE_LIMIT => {}
        _ => {
            return Err(SearchError::TooLarge(format!(
                "{}^{}",
                labels.len(),
                values.len()
            )));
        }
    }

    // For each protocol facet: positions of its values, and the admissible
    // images (whole tuples, or per pair of positions for the skeleton).
    struct Check {
        vars: Vec<usize>,
        tuples: HashSet<Vec<usize>>,
        pairs: Vec<PairCheck>,
    }
    let label_pos = |l: &Label| labels.iter().position(|x| x == l).expect("declared label");
    let mut checks = Vec::new();
    for f in p.facets() {
        let input = central_input(f)?;
        let allowed: Vec<Vec<usize>> = o
            .facets()
            .iter()
            .filter(|g| delta_allows(task, &input, g))
            .map(|g| {
                g.values()
                    .map(|v| label_pos(v.as_label().expect("labels")))
                    .collect()
            })
            .collect();
        let arity = f.len();
        let mut pairs = Vec::new();
        if skeleton {
            for i in 0..arity {
                for j in i + 1..arity {
                    pairs.push(((i, j), allowed.iter().map(|g| (g[i], g[j])).collect()));
                }
            }
        }
        checks.push(Check {
            vars: f
                .values()
                .map(|v| values.binary_search(v).expect("vertex value"))
                .collect(),
            tuples: allowed.into_iter().collect(),
            pairs,
        });
    }

    let n = values.len();
    let m = labels.len();
    let mut digits = vec![0usize; n];
    let mut checked = 0u64;
    loop {
        checked += 1;
        let ok = checks.iter().all(|c| {
            if skeleton {
                c.pairs
                    .iter()
                    .all(|((i, j), s)| s.contains(&(digits[c.vars[*i]], digits[c.vars[*j]])))
            } else {
                let img: Vec<usize> = c.vars.iter().map(|&v| digits[v]).collect();
                c.tuples.contains(&img)
            }
        });
        if ok {
            let table: MapTable = values
                .iter()
                .zip(&digits)
                .map(|(v, &d)| (v.clone(), labels[d].clone()))
                .collect();
            return Ok(result(
                Verdict::Sat(table),
                n,
                p.facets().len(),
                checked,
                skeleton,
            ));
        }
        // next assignment, last value least significant
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(result(
                    Verdict::Unsat,
                    n,
                    p.facets().len(),
                    checked,
                    skeleton,
                ));
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < m {
                break;
            }
            digits[i] = 0;
        }
    }
}

fn result(
    verdict: Verdict,
    views: usize,
    facets: usize,
    checked: u64,
    skeleton: bool,
) -> SolveResult {
    let outcome = verdict.name();
    SolveResult {
        verdict,
        stats: SearchStats {
            method: if skeleton {
                "brute-force-skeleton"
            } else {
                "brute-force"
            },
            views,
            isolated_views: 0,
            facets,
            constraints: facets,
            nodes: checked,
            components: vec![ComponentStats {
                views,
                constraints: facets,
                nodes: checked,
                outcome,
            }],
        },
    }
}
