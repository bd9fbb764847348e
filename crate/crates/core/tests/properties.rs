use std::collections::BTreeSet;

use proptest::prelude::*;

use lcl_complexes::complex::{
    complex_from_json, complex_to_json, connected_components, is_simplex, make_complex, Facet,
    Label, Value, Vertex,
};
use lcl_complexes::protocol::{pi, xi};
use lcl_complexes::sim::{reference_linial_table, run, IdDiscipline, RingInstance};
use lcl_complexes::task::{build_input_complex, builtin, Star};
use lcl_complexes::{build_protocol_complex, enumerate_views, IdMode};

fn lab(i: u8) -> Label {
    Label::number(i)
}

fn facet(a: u8, b: u8, c: u8) -> Facet {
    Facet::from_values(2, vec![lab(a).into(), lab(b).into(), lab(c).into()]).unwrap()
}

fn complex_strategy() -> impl Strategy<Value = Vec<(u8, u8, u8)>> {
    prop::collection::vec((0u8..4, 0u8..4, 0u8..4), 1..14)
}

/// A proper 3-coloring of the `n`-ring from free choices of the first
/// `n - 1` steps; the last color is forced (or picked) to close the cycle.
fn proper_ring(first: u8, steps: &[bool]) -> Vec<u8> {
    let mut c = vec![first];
    for &s in &steps[..steps.len() - 1] {
        let prev = *c.last().unwrap();
        c.push((prev + if s { 1 } else { 2 }) % 3);
    }
    let (prev, head) = (*c.last().unwrap(), c[0]);
    let options: Vec<u8> = (0..3).filter(|&x| x != prev && x != head).collect();
    let last = options[usize::from(steps[steps.len() - 1]) % options.len()];
    c.push(last);
    c
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn faces_of_facets_are_simplices(raw in complex_strategy()) {
        let k = make_complex(2, raw.iter().map(|&(a, b, c)| facet(a, b, c)).collect()).unwrap();
        for f in k.facets() {
            let e = f.entries();
            for mask in 1u8..8 {
                let face: Vec<Vertex> = (0..3).filter(|i| mask >> i & 1 == 1).map(|i| e[i].clone()).collect();
                prop_assert!(is_simplex(&k, &face));
            }
        }
        // two vertices with the same name never form a simplex
        let v = k.vertices()[0].clone();
        prop_assert!(!is_simplex(&k, &[v.clone(), v]));
    }

    #[test]
    fn building_is_idempotent(raw in complex_strategy()) {
        let k = make_complex(2, raw.iter().map(|&(a, b, c)| facet(a, b, c)).collect()).unwrap();
        let again = make_complex(2, k.facets().to_vec()).unwrap();
        prop_assert_eq!(&again, &k);
        let mut rev = k.facets().to_vec();
        rev.reverse();
        prop_assert_eq!(&make_complex(2, rev).unwrap(), &k);
        prop_assert_eq!(&complex_from_json(&complex_to_json(&k)).unwrap(), &k);
    }

    #[test]
    fn components_partition_the_facets(raw in complex_strategy()) {
        let k = make_complex(2, raw.iter().map(|&(a, b, c)| facet(a, b, c)).collect()).unwrap();
        let blocks = connected_components(&k);
        let mut seen = vec![false; k.facets().len()];
        let mut owner = std::collections::BTreeMap::new();
        for (bi, b) in blocks.iter().enumerate() {
            prop_assert!(!b.is_empty());
            for &i in b {
                prop_assert!(!seen[i]);
                seen[i] = true;
                for v in k.facets()[i].entries() {
                    let o = *owner.entry(v.clone()).or_insert(bi);
                    prop_assert_eq!(o, bi);
                }
            }
        }
        prop_assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn star_ignores_leaf_order(c in 0u8..5, leaves in prop::collection::vec(0u8..5, 2..5).prop_shuffle(), seed in any::<u64>()) {
        let ls: Vec<Label> = leaves.iter().map(|&l| lab(l)).collect();
        let mut rotated = ls.clone();
        rotated.rotate_left((seed % ls.len() as u64) as usize);
        let mut sorted = ls.clone();
        sorted.sort();
        prop_assert_eq!(Star::new(lab(c), ls), Star::new(lab(c), rotated.clone()));
        let star = Star::new(lab(c), rotated);
        prop_assert_eq!(star.leaves(), sorted.as_slice());
    }

    #[test]
    fn outputs_depend_only_on_the_view(first in 0u8..3, steps in prop::collection::vec(any::<bool>(), 7..12), node in any::<prop::sample::Index>(), far in any::<prop::sample::Index>()) {
        let task = builtin("3col-to-mis").unwrap();
        let table = reference_linial_table();
        let colors = proper_ring(first, &steps);
        let n = colors.len();
        let to_labels = |c: &[u8]| c.iter().map(|&x| lab(x + 1)).collect::<Vec<_>>();
        let inst = RingInstance::new(&task, to_labels(&colors), None, IdDiscipline::None).unwrap();
        let out = run(&table, &task, &inst).unwrap();
        prop_assert!(out.legal);
        let i = node.index(n);
        prop_assert_eq!(table.get(&inst.view(i, 2)), Some(&out.outputs[i]));

        // recolor a node at distance > 2 from i, keeping the coloring proper
        let far_nodes: Vec<usize> = (0..n).filter(|&j| { let d = (j + n - i) % n; d.min(n - d) > 2 }).collect();
        let j = far_nodes[far.index(far_nodes.len())];
        let (l, r) = (colors[(j + n - 1) % n], colors[(j + 1) % n]);
        if let Some(x) = (0..3).find(|&x| x != colors[j] && x != l && x != r) {
            let mut changed = colors.clone();
            changed[j] = x;
            let inst2 = RingInstance::new(&task, to_labels(&changed), None, IdDiscipline::None).unwrap();
            let out2 = run(&table, &task, &inst2).unwrap();
            prop_assert_eq!(&out2.outputs[i], &out.outputs[i]);
        }
    }
}

#[test]
fn stripping_ids_maps_onto_the_input_complex() {
    for name in ["3col-to-mis", "mis", "coloring:3"] {
        let task = builtin(name).unwrap();
        let input = build_input_complex(&task).unwrap();
        for r in 3..=5 {
            for mode in [IdMode::Arbitrary(r), IdMode::Increasing(r)] {
                let decorated = build_protocol_complex(&task, 0, mode).unwrap();
                let mut hit = BTreeSet::new();
                for f in decorated.facets() {
                    let img =
                        Facet::new(f.entries().iter().map(|v| pi(v).unwrap()).collect()).unwrap();
                    assert!(input.contains_facet(&img), "{name} {mode} {f}");
                    hit.insert(img);
                }
                if matches!(mode, IdMode::Arbitrary(_)) {
                    assert_eq!(hit.len(), input.facets().len(), "{name} {mode}: pi is onto");
                }
            }
        }
    }
}

#[test]
fn carrier_covers_every_protocol_facet_once() {
    for (name, t) in [("3col-to-mis", 1), ("3col-to-mis", 2), ("3col-no-xyzyx", 1)] {
        let task = builtin(name).unwrap();
        let input = build_input_complex(&task).unwrap();
        let p = build_protocol_complex(&task, t, IdMode::None).unwrap();
        let mut covered = vec![0usize; p.facets().len()];
        for f in input.facets() {
            for g in xi(f, &p) {
                covered[p.facets().binary_search(&g).unwrap()] += 1;
            }
        }
        assert!(covered.iter().all(|&c| c == 1), "{name} t={t}");
    }
}

#[test]
fn views_satisfy_the_promise() {
    let cases = [
        ("3col-to-mis", 1, IdMode::None),
        ("3col-to-mis", 2, IdMode::None),
        ("3col-no-xyzyx", 2, IdMode::None),
        ("coloring:3", 1, IdMode::Increasing(6)),
        ("mis", 1, IdMode::Arbitrary(5)),
    ];
    for (name, t, mode) in cases {
        let task = builtin(name).unwrap();
        let views = enumerate_views(&task, t, mode).unwrap();
        assert!(!views.is_empty());
        for w in &views {
            assert_eq!(w.radius(), t);
            assert!(task.admissible_window(&w.labels()), "{name}: {w}");
            let ids: Vec<Option<u32>> = w.states().iter().map(|s| s.id).collect();
            assert!(mode.admits(&ids), "{name}: {w}");
        }
        // every protocol vertex is an enumerated view
        let p = build_protocol_complex(&task, t, mode).unwrap();
        let all: BTreeSet<Value> = views.iter().map(|w| w.to_value()).collect();
        assert!(p.vertex_values().is_subset(&all), "{name}");
    }
}
