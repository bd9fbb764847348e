use std::collections::BTreeSet;

use itertools::Itertools;

use super::{DeltaSpec, LclTask, Star, StarSet, TaskError, TaskParts};
use crate::complex::Label;

/// Builtin names. `mis` and `coloring:k` accept an optional `:d` degree suffix.
pub const BUILTIN_NAMES: &[&str] = &["mis", "coloring:k", "3col-to-mis", "3col-no-xyzyx"];

fn numbers(range: std::ops::RangeInclusive<u32>) -> BTreeSet<Label> {
    range.map(Label::number).collect()
}

fn mis_stars(degree: usize) -> StarSet {
    let (zero, one) = (Label::number(0), Label::number(1));
    let mut stars = BTreeSet::new();
    stars.insert(Star::new(one.clone(), vec![zero.clone(); degree]));
    for leaves in [zero.clone(), one.clone()]
        .into_iter()
        .combinations_with_replacement(degree)
    {
        if leaves.contains(&one) {
            stars.insert(Star::new(zero.clone(), leaves));
        }
    }
    StarSet::Explicit(stars)
}

fn parse_number(name: &str, s: &str) -> Result<usize, TaskError> {
    s.parse()
        .map_err(|_| TaskError::UnknownBuiltin(name.to_string()))
}

fn unit_input(
    name: &str,
    degree: usize,
    out_labels: BTreeSet<Label>,
    out_stars: StarSet,
) -> TaskParts {
    TaskParts {
        name: name.to_string(),
        degree,
        in_labels: [Label::unit()].into(),
        in_stars: StarSet::All,
        out_labels,
        out_stars,
        delta: DeltaSpec::Unconstrained,
        forbidden_windows: vec![],
    }
}

/// Expands a builtin task name.
pub fn builtin(name: &str) -> Result<LclTask, TaskError> {
    let parts: Vec<&str> = name.split(':').collect();
    let unknown = || TaskError::UnknownBuiltin(name.to_string());
    let p = match parts.as_slice() {
        ["mis"] => unit_input(name, 2, numbers(0..=1), mis_stars(2)),
        ["mis", d] => {
            let d = parse_number(name, d)?;
            unit_input(name, d, numbers(0..=1), mis_stars(d))
        }
        ["coloring", k] | ["coloring", k, _] => {
            let k = parse_number(name, k)?;
            let d = match parts.get(2) {
                Some(d) => parse_number(name, d)?,
                None => 2,
            };
            if k == 0 {
                return Err(unknown());
            }
            unit_input(name, d, numbers(1..=k as u32), StarSet::Proper)
        }
        ["3col-to-mis"] | ["3col-no-xyzyx"] => {
            let mut forbidden = vec![];
            if parts[0] == "3col-no-xyzyx" {
                for p in (1..=3u32).permutations(3) {
                    let (x, y, z) = (p[0], p[1], p[2]);
                    forbidden.push([x, y, z, y, x].iter().map(|&c| Label::number(c)).collect());
                }
            }
            TaskParts {
                name: name.to_string(),
                degree: 2,
                in_labels: numbers(1..=3),
                in_stars: StarSet::Proper,
                out_labels: numbers(0..=1),
                out_stars: mis_stars(2),
                delta: DeltaSpec::Unconstrained,
                forbidden_windows: forbidden,
            }
        }
        _ => return Err(unknown()),
    };
    LclTask::from_parts(p)
}
