//! The backtracking search against the exhaustive oracle on every small
//! instance where the oracle is feasible.

use lcl_complexes::complex::verify_simplicial;
use lcl_complexes::search::{brute_force_solve, SearchError};
use lcl_complexes::task::{build_output_complex, builtin};
use lcl_complexes::{
    build_protocol_complex, parse_task, solve, solve_skeleton, IdMode, LclTask, SolveOptions,
};

const TWO_COLOR_IDENTITY: &str = r#"{
    "name": "2col-identity",
    "in_labels": ["1", "2"],
    "in_stars": "proper",
    "out_labels": ["1", "2"],
    "out_stars": "proper",
    "delta": {"per_node": [["1", "1"], ["2", "2"]]}
}"#;

fn task(name: &str) -> LclTask {
    if name == "2col-identity" {
        parse_task(TWO_COLOR_IDENTITY).unwrap()
    } else {
        builtin(name).unwrap()
    }
}

/// (task, t, mode, skeleton, expected verdict where it is known independently)
fn matrix() -> Vec<(&'static str, usize, IdMode, bool, Option<&'static str>)> {
    use IdMode::*;
    vec![
        ("3col-to-mis", 0, None, false, Some("unsat")),
        ("3col-to-mis", 0, Arbitrary(3), false, Some("sat")),
        ("3col-to-mis", 0, Arbitrary(4), false, Some("unsat")),
        ("3col-to-mis", 1, None, false, Some("unsat")),
        ("3col-to-mis", 1, None, true, Some("sat")),
        ("3col-no-xyzyx", 1, None, false, Some("sat")),
        ("coloring:3", 0, None, false, Some("unsat")),
        ("coloring:3", 0, Arbitrary(3), false, Some("sat")),
        ("coloring:3", 0, Arbitrary(4), false, Some("unsat")),
        ("coloring:3", 1, None, false, Some("unsat")),
        ("coloring:3", 1, Increasing(5), false, Option::None),
        ("coloring:2", 1, Increasing(5), false, Option::None),
        ("mis", 0, None, false, Some("unsat")),
        ("mis", 0, Arbitrary(3), false, Option::None),
        ("mis", 0, Arbitrary(4), false, Option::None),
        ("mis", 1, Increasing(5), false, Option::None),
        ("2col-identity", 0, None, false, Some("sat")),
    ]
}

#[test]
fn solver_agrees_with_exhaustive_oracle() {
    let opts = SolveOptions {
        max_nodes: u64::MAX,
        threads: 1,
    };
    let cases = matrix();
    assert!(cases.len() >= 12);
    for (name, t, mode, skeleton, expected) in cases {
        let tk = task(name);
        let label = format!("{name} t={t} ids={mode} skeleton={skeleton}");
        let fast = if skeleton {
            solve_skeleton(&tk, t, mode, opts)
        } else {
            solve(&tk, t, mode, opts)
        }
        .unwrap();
        let slow = brute_force_solve(&tk, t, mode, skeleton).unwrap();
        assert_eq!(fast.verdict.name(), slow.verdict.name(), "{label}");
        if let Some(e) = expected {
            assert_eq!(fast.verdict.name(), e, "{label}");
        }
        if !skeleton {
            let p = build_protocol_complex(&tk, t, mode).unwrap();
            let o = build_output_complex(&tk).unwrap();
            for w in [fast.witness(), slow.witness()].into_iter().flatten() {
                assert!(verify_simplicial(w, &p, &o).unwrap().is_ok(), "{label}");
            }
        }
    }
}

#[test]
fn oracle_refuses_large_instances() {
    let tk = builtin("coloring:3").unwrap();
    assert!(matches!(
        brute_force_solve(&tk, 1, IdMode::Increasing(7), false),
        Err(SearchError::TooLarge(_))
    ));
}
