use std::collections::BTreeSet;

use serde::Deserialize;

use super::{builtin, DeltaSpec, LclTask, Star, StarSet, TaskError, TaskParts};
use crate::complex::Label;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTask {
    name: Option<String>,
    builtin: Option<String>,
    degree: Option<usize>,
    in_labels: Option<Vec<Label>>,
    in_stars: Option<RawStars>,
    out_labels: Option<Vec<Label>>,
    out_stars: Option<RawStars>,
    delta: Option<RawDelta>,
    forbidden_windows: Option<Vec<Vec<Label>>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawStars {
    Keyword(String),
    List(Vec<RawStar>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStar {
    center: Label,
    leaves: Vec<Label>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPair {
    input: RawStar,
    output: RawStar,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawDelta {
    Keyword(String),
    PerNode { per_node: Vec<(Label, Label)> },
    Pairs { pairs: Vec<RawPair> },
}

impl RawStar {
    fn into_star(self) -> Star {
        Star::new(self.center, self.leaves)
    }
}

fn stars(field: &str, raw: Option<RawStars>) -> Result<StarSet, TaskError> {
    match raw {
        None => Ok(StarSet::All),
        Some(RawStars::Keyword(k)) => match k.as_str() {
            "all" => Ok(StarSet::All),
            "proper" => Ok(StarSet::Proper),
            _ => Err(TaskError::Semantic(format!(
                "{field}: unknown keyword {k:?}"
            ))),
        },
        Some(RawStars::List(l)) => Ok(StarSet::Explicit(
            l.into_iter().map(RawStar::into_star).collect(),
        )),
    }
}

fn from_raw(raw: RawTask) -> Result<LclTask, TaskError> {
    if let Some(b) = raw.builtin {
        let has_body = raw.in_labels.is_some()
            || raw.in_stars.is_some()
            || raw.out_labels.is_some()
            || raw.out_stars.is_some()
            || raw.delta.is_some()
            || raw.forbidden_windows.is_some();
        if has_body {
            return Err(TaskError::Semantic(
                "a builtin task takes no label or star fields".into(),
            ));
        }
        let name = match raw.degree {
            Some(d)
                if b == "mis" || (b.starts_with("coloring:") && b.matches(':').count() == 1) =>
            {
                format!("{b}:{d}")
            }
            Some(d) => {
                let t = builtin(&b)?;
                if t.degree() != d {
                    return Err(TaskError::Semantic(format!(
                        "builtin {b} has degree {}",
                        t.degree()
                    )));
                }
                b
            }
            None => b,
        };
        return builtin(&name);
    }
    let out_labels = raw
        .out_labels
        .ok_or_else(|| TaskError::Semantic("missing out_labels".into()))?;
    let in_labels: BTreeSet<Label> = match raw.in_labels {
        Some(l) if !l.is_empty() => l.into_iter().collect(),
        _ => [Label::unit()].into(),
    };
    let delta = match raw.delta {
        None => DeltaSpec::Unconstrained,
        Some(RawDelta::Keyword(k)) if k == "unconstrained" => DeltaSpec::Unconstrained,
        Some(RawDelta::Keyword(k)) => {
            return Err(TaskError::Semantic(format!("delta: unknown keyword {k:?}")))
        }
        Some(RawDelta::PerNode { per_node }) => DeltaSpec::PerNode(per_node.into_iter().collect()),
        Some(RawDelta::Pairs { pairs }) => DeltaSpec::ExplicitPairs(
            pairs
                .into_iter()
                .map(|p| (p.input.into_star(), p.output.into_star()))
                .collect(),
        ),
    };
    LclTask::from_parts(TaskParts {
        name: raw.name.unwrap_or_else(|| "task".into()),
        degree: raw.degree.unwrap_or(2),
        in_labels,
        in_stars: stars("in_stars", raw.in_stars)?,
        out_labels: out_labels.into_iter().collect(),
        out_stars: stars("out_stars", raw.out_stars)?,
        delta,
        forbidden_windows: raw.forbidden_windows.unwrap_or_default(),
    })
}

/// Parses a JSON task document.
pub fn parse_task(text: &str) -> Result<LclTask, TaskError> {
    let raw: RawTask = serde_json::from_str(text).map_err(|e| {
        use serde_json::error::Category;
        match e.classify() {
            Category::Data => TaskError::Semantic(e.to_string()),
            _ => TaskError::Syntax {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            },
        }
    })?;
    from_raw(raw)
}
