mod common;

use std::collections::BTreeSet;

use common::*;
use docspan::dag::MappingDag;
use docspan::enumerate::{
    enumerate, next_level_extended, next_level_flashlight, spath_closure, ClosureScratch, Mapping, TraceEvent,
};
use docspan::frontend::{VarAutomaton, VarId};
use docspan::jump::JumpIndex;
use docspan::oracle::{dag_path_mappings, oracle_enumerate};
use docspan::{Engine, Spanner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn example_mappings() -> BTreeSet<Mapping> {
    let x = VarId(0);
    [(2, 5), (6, 9)].into_iter().map(|(a, b)| Mapping::from_pairs(vec![(x.open(), a), (x.close(), b)])).collect()
}

#[test]
fn example_document_both_engines() {
    for engine in [Engine::General, Engine::Extended] {
        let s = Spanner::with_engine(EXAMPLE_PATTERN.as_bytes(), engine).unwrap();
        let got: BTreeSet<Mapping> = s.mappings(EXAMPLE_DOC).into_iter().collect();
        assert_eq!(got, example_mappings(), "{engine:?}");
    }
}

#[test]
fn example_document_oracle() {
    let s = Spanner::new(EXAMPLE_PATTERN).unwrap();
    assert_eq!(oracle_enumerate(s.automaton(), EXAMPLE_DOC).unwrap(), example_mappings());
}

#[test]
fn variable_free_match_gives_one_empty_mapping() {
    let mut va = VarAutomaton::with_states(vec![], 2);
    va.add_letter(0, b'a', 1);
    va.set_final(1, true);
    for model in [general_model(&va), extended_model(&va)] {
        let got = enumerate_checked(&model, b"a");
        assert_eq!(got, [Mapping::empty()].into());
        assert!(enumerate_checked(&model, b"b").is_empty());
    }
}

#[test]
fn non_matching_document_is_empty() {
    let s = Spanner::new("x{ab}").unwrap();
    assert!(s.mappings(b"ba").is_empty());
    assert!(oracle_enumerate(s.automaton(), b"ba").unwrap().is_empty());
}

#[test]
fn random_instances_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut nonempty = 0;
    let mut with_pairs = 0;
    for _ in 0..400 {
        let inst = random_instance(&mut rng);
        let want = oracle_enumerate(&inst.source, &inst.doc).unwrap();
        nonempty += usize::from(!want.is_empty());
        with_pairs += usize::from(want.iter().any(|m| m.len() >= 4));
        assert_eq!(enumerate_checked(&general_model(&inst.va), &inst.doc), want, "general");
        assert_eq!(enumerate_checked(&extended_model(&inst.va), &inst.doc), want, "extended");
        let model = general_model(&inst.va);
        let dag = MappingDag::new(&model, &inst.doc);
        assert_eq!(dag_path_mappings(&dag).unwrap().1, want, "dag paths");
    }
    eprintln!("nonempty {nonempty} two-variable {with_pairs}");
    assert!(nonempty >= 100 && with_pairs >= 20);
}

#[test]
fn traces_put_empty_last_and_bound_depth() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..300 {
        let inst = random_instance(&mut rng);
        for model in [general_model(&inst.va), extended_model(&inst.va)] {
            let dag = MappingDag::new(&model, &inst.doc);
            let index = JumpIndex::new(&dag);
            let mut e = enumerate(&dag, &index).traced();
            let sizes: Vec<usize> = e.by_ref().map(|m| m.len()).collect();
            let mut emitted = 0;
            for ev in e.trace() {
                match *ev {
                    TraceEvent::AfterEmpty { extra, .. } => assert_eq!(extra, 0),
                    TraceEvent::Emit { depth, size } => {
                        assert_eq!(size, sizes[emitted]);
                        assert!(depth <= size + 1, "depth {depth} size {size}");
                        emitted += 1;
                    }
                    _ => {}
                }
            }
            assert_eq!(emitted, sizes.len());
        }
    }
}

#[test]
fn flashlight_and_merge_agree_on_levels() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..200 {
        let inst = random_instance(&mut rng);
        let gm = general_model(&inst.va);
        let dag = MappingDag::new(&gm, &inst.doc);
        if dag.is_empty() {
            continue;
        }
        for level in 0..dag.final_level() {
            let lam = level_set(&dag, level, dag.vertices_at(level).collect::<Vec<_>>());
            if lam.is_empty() {
                continue;
            }
            let items = next_level_flashlight(&dag, &lam);
            let labels: Vec<BTreeSet<_>> =
                items.iter().map(|(ls, _)| ls.iter().flat_map(|&l| gm.label(l).iter().copied()).collect()).collect();
            let distinct: BTreeSet<_> = labels.iter().cloned().collect();
            assert_eq!(distinct.len(), labels.len(), "duplicate label set");
            if let Some(p) = labels.iter().position(|l| l.is_empty()) {
                assert_eq!(p, labels.len() - 1, "empty set not last");
            }
        }
    }
    let _ = next_level_extended;
}

#[test]
fn spath_chain() {
    let g = SmallGraph { n: 3, edges: vec![(0, 0, 1), (1, 1, 2)] };
    let mut scratch = ClosureScratch::default();
    let mut steps = 0;
    let lam = docspan::bits::StateSet::from_words(vec![1]);
    let all = [0b111u64];
    let got = spath_closure(&g, &lam, &all, 0b11, 0, &mut scratch, &mut steps);
    assert_eq!(got.iter().collect::<Vec<_>>(), vec![2]);
    let got = spath_closure(&g, &lam, &all, 0, 0, &mut scratch, &mut steps);
    assert_eq!(got.iter().collect::<Vec<_>>(), vec![0, 1, 2]);
}

#[test]
fn spath_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    use rand::Rng;
    let mut scratch = ClosureScratch::default();
    for _ in 0..2000 {
        let g = random_graph(&mut rng, 10, 4);
        let lam: Vec<usize> = (0..g.n).filter(|_| rng.gen_bool(0.3)).collect();
        let mut plus = 0u128;
        let mut minus = 0u128;
        for l in 0..4 {
            match rng.gen_range(0..3) {
                0 => plus |= 1 << l,
                1 => minus |= 1 << l,
                _ => {}
            }
        }
        let mut lam_set = docspan::bits::StateSet::new(64);
        for &v in &lam {
            lam_set.insert(v);
        }
        let mut steps = 0;
        let got: BTreeSet<usize> =
            spath_closure(&g, &lam_set, &[u64::MAX], plus, minus, &mut scratch, &mut steps).iter().collect();
        assert_eq!(got, brute_spath(&g, &lam, plus, minus), "{:?} lam {lam:?} +{plus:b} -{minus:b}", g.edges);
    }
}
