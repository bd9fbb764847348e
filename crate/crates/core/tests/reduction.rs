use std::collections::BTreeSet;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lcl_complexes::complex::{verify_simplicial, EdgeIndex, Facet, Label, MapTable, Value};
use lcl_complexes::reduction::{
    f_of_view, linial_bound, log_star, phi_apply_map, phi_facet_ok, reduce_once, tower, ColorCode,
    SetFamily, Tower,
};
use lcl_complexes::search::extract_algorithm;
use lcl_complexes::task::{build_output_complex, builtin};
use lcl_complexes::{build_protocol_complex, solve, IdMode, NodeState, RingView, SolveOptions};

fn lv(n: u32) -> Value {
    Value::Label(Label::number(n))
}

/// Every family of subsets of `{1..k}`, from its bitmask.
fn family_of_mask(mask: u64, k: u32) -> SetFamily {
    (0..1u64 << k)
        .filter(|s| mask >> s & 1 == 1)
        .map(|s| {
            (0..k)
                .filter(|i| s >> i & 1 == 1)
                .map(|i| lv(i + 1))
                .collect::<BTreeSet<_>>()
        })
        .collect()
}

fn code(f: &SetFamily, k: u32) -> Label {
    Label::number(ColorCode::encode(f, k).unwrap())
}

fn shift(w: &RingView, d: u32) -> RingView {
    RingView::new(
        w.states()
            .iter()
            .map(|s| NodeState::with_id(s.id.unwrap() + d, s.label.clone()))
            .collect(),
    )
    .unwrap()
}

fn edges_or_empty(t: usize, r: u32) -> EdgeIndex {
    match build_protocol_complex(&builtin("coloring:3").unwrap(), t, IdMode::Increasing(r)) {
        Ok(p) => EdgeIndex::new(&p),
        Err(_) => EdgeIndex::empty(),
    }
}

/// Glued families of a facet, with every ID moved up by `lift`. Members
/// whose views would use ID `lift` or below are dropped, so the families
/// are those of the unshifted range `[r]`.
fn glued(f: &Facet, r: u32, lift: u32) -> Vec<SetFamily> {
    f.values()
        .map(|v| {
            let w = shift(&RingView::from_value(v).unwrap(), lift);
            f_of_view(&w, r + lift)
                .unwrap()
                .family
                .sets()
                .iter()
                .map(|s| {
                    s.iter()
                        .filter(|x| RingView::from_value(x).unwrap().ids().unwrap()[0] > lift)
                        .cloned()
                        .collect::<BTreeSet<_>>()
                })
                .collect()
        })
        .collect()
}

#[test]
fn glued_families_are_simplicial_given_spare_ids() {
    // Edges of the image need one ID below and one above the range [R],
    // so the target complex is built over 0..=R+1 (shifted to 1..=R+2).
    let task = builtin("coloring:3").unwrap();
    for t in 1..=2usize {
        for r in (2 * t + 1) as u32..=7 {
            let src = build_protocol_complex(&task, t - 1, IdMode::Increasing(r)).unwrap();
            let edges = edges_or_empty(t, r + 2);
            for f in src.facets() {
                let fams = glued(f, r, 1);
                assert!(
                    phi_facet_ok(&edges, &fams[0], &fams[1], &fams[2]),
                    "t={t} R={r} facet {f}"
                );
            }
        }
    }
}

#[test]
fn glued_families_fail_at_the_id_boundary() {
    let task = builtin("coloring:3").unwrap();
    let src = build_protocol_complex(&task, 0, IdMode::Increasing(4)).unwrap();
    let f = &src.facets()[0];
    assert_eq!(f.to_string(), "[-1:(1:⊥), 0:(2:⊥), 1:(3:⊥)]");
    let fams = glued(f, 4, 0);
    // (0:(1:⊥)|(2:⊥)|(3:⊥), 1:(2:⊥)|(3:⊥)|(4:⊥)) needs a left neighbor with ID 0
    for r in [4, 5] {
        assert!(!phi_facet_ok(
            &edges_or_empty(1, r),
            &fams[0],
            &fams[1],
            &fams[2]
        ));
    }
}

#[test]
fn phi_of_two_coloring_is_a_sixteen_coloring() {
    let o2 = build_output_complex(&builtin("coloring:2").unwrap()).unwrap();
    let o16 = build_output_complex(&builtin("coloring:16").unwrap()).unwrap();
    let edges = EdgeIndex::new(&o2);
    let fams: Vec<SetFamily> = (0..16).map(|m| family_of_mask(m, 2)).collect();
    let mut facets = 0;
    for a in &fams {
        for b in &fams {
            for c in &fams {
                if phi_facet_ok(&edges, a, b, c) {
                    facets += 1;
                    let img = Facet::from_values(
                        2,
                        vec![code(a, 2).into(), code(b, 2).into(), code(c, 2).into()],
                    )
                    .unwrap();
                    assert!(o16.contains_facet(&img), "{a} {b} {c}");
                }
            }
        }
    }
    assert!(facets > 0);
}

#[test]
fn phi_of_three_coloring_is_proper_on_samples() {
    let o3 = build_output_complex(&builtin("coloring:3").unwrap()).unwrap();
    let edges = EdgeIndex::new(&o3);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut accepted = 0;
    for _ in 0..10_000 {
        // bias towards small families so the condition is met now and then
        let mut draw = || {
            let mut m = 0u64;
            for _ in 0..rng.gen_range(1..=3) {
                m |= 1 << rng.gen_range(0..8);
            }
            family_of_mask(m, 3)
        };
        let (a, b, c) = (draw(), draw(), draw());
        if phi_facet_ok(&edges, &a, &b, &c) {
            accepted += 1;
            let (ca, cb, cc) = (code(&a, 3), code(&b, 3), code(&c, 3));
            assert!(ca != cb && cb != cc, "{a} {b} {c}");
        }
    }
    assert!(accepted > 0);
}

#[test]
fn phi_is_a_functor() {
    // colour permutations of the 3-coloring complex are simplicial maps
    let perm = |p: [u32; 3]| -> MapTable {
        (1..=3)
            .map(|i| (lv(i), Label::number(p[i as usize - 1])))
            .collect()
    };
    let sigma = perm([2, 3, 1]);
    let tau = perm([3, 1, 2]);
    let composed: MapTable = (1..=3)
        .map(|i| {
            let mid = sigma.get(&lv(i)).unwrap().clone();
            (lv(i), tau.get(&Value::Label(mid)).unwrap().clone())
        })
        .collect();
    let identity = perm([1, 2, 3]);
    let o3 = build_output_complex(&builtin("coloring:3").unwrap()).unwrap();
    assert!(verify_simplicial(&sigma, &o3, &o3).unwrap().is_ok());
    let edges = EdgeIndex::new(&o3);
    let lift = |m: &MapTable, f: &SetFamily| phi_apply_map(m, f).unwrap();
    let fams: Vec<SetFamily> = (0..256).step_by(7).map(|m| family_of_mask(m, 3)).collect();
    for f in &fams {
        assert_eq!(&lift(&identity, f), f);
        assert_eq!(lift(&composed, f), lift(&tau, &lift(&sigma, f)));
    }
    for a in &fams {
        for b in &fams {
            for c in &fams {
                if phi_facet_ok(&edges, a, b, c) {
                    assert!(phi_facet_ok(
                        &edges,
                        &lift(&sigma, a),
                        &lift(&sigma, b),
                        &lift(&sigma, c)
                    ));
                }
            }
        }
    }
}

#[test]
fn one_round_three_coloring_reduces_to_zero_rounds() {
    let task = builtin("coloring:3").unwrap();
    let mode = IdMode::Increasing(5);
    let result = solve(&task, 1, mode, SolveOptions::default()).unwrap();
    assert!(result.verdict.is_sat());
    let delta = extract_algorithm(&result, &task, 1, mode).unwrap();
    let reduced = reduce_once(&delta, 1, 5, 3).unwrap();
    assert_eq!(reduced.rounds(), 0);
    assert_eq!(reduced.id_mode(), IdMode::Increasing(4));

    // independently: the reduced table is a proper 256-coloring of P^(0)_[4]
    let palette = ColorCode::palette(3);
    assert_eq!(palette, BigUint::from(256u32));
    let map = reduced.to_map_table();
    let p0 = build_protocol_complex(&task, 0, IdMode::Increasing(4)).unwrap();
    for f in p0.facets() {
        let c: Vec<BigUint> = map
            .apply_facet(f)
            .unwrap()
            .values()
            .map(|v| v.as_label().unwrap().as_str().parse().unwrap())
            .collect();
        assert!(
            c.iter().all(|x| *x >= BigUint::from(1u32) && *x <= palette),
            "{f}"
        );
        assert!(c[0] != c[1] && c[1] != c[2], "{f}");
    }
    assert_eq!(reduced.len(), 4);
}

#[test]
fn bound_arithmetic() {
    let Tower::Exact(t4) = tower(4) else { panic!() };
    assert_eq!(t4, BigUint::from(65536u32));
    assert_eq!(linial_bound(&t4), 1);
    let Tower::Exact(t5) = tower(5) else { panic!() };
    assert_eq!(linial_bound(&t5), 2);
    for h in 0..=5 {
        let Tower::Exact(x) = tower(h) else { panic!() };
        assert_eq!(log_star(&x), h);
        // independent check: iterate the base-2 logarithm until <= 1
        let mut y = x.clone();
        let mut steps = 0;
        while y > BigUint::from(1u32) {
            y = BigUint::from(y.bits() - 1);
            steps += 1;
        }
        assert_eq!(steps, h);
    }
}
