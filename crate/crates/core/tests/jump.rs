mod common;

use std::collections::BTreeSet;

use common::*;
use docspan::dag::{DagKind, LevelSet, MappingDag};
use docspan::enumerate::{next_level_extended, next_level_flashlight};
use docspan::frontend::StateId;
use docspan::jump::{IndexOptions, JumpIndex};
use docspan::oracle::SuffixOracle;
use docspan::Spanner;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn check_tables(dag: &MappingDag<'_>) {
    let index = JumpIndex::with_options(dag, IndexOptions { keep_all_levels: true });
    if dag.is_empty() {
        return;
    }
    for i in 0..dag.final_level() {
        let mut levels = BTreeSet::new();
        for q in dag.vertices_at(i) {
            let want = bfs_jump_level(dag, i, q);
            assert_eq!(index.jump_level(dag, i, q), want, "JL at level {i} state {q}");
            levels.extend(want);
        }
        let got: BTreeSet<usize> = index.reachable_levels(i).unwrap().into_iter().collect();
        assert_eq!(got, levels, "Rlevel({i})");
        for &j in &levels {
            if j == i {
                continue;
            }
            let m = index.reach(i, j).unwrap_or_else(|| panic!("Reach({i}, {j}) missing"));
            let cols: Vec<StateId> = if j == dag.final_level() { vec![0] } else { dag.vertices_at(j).collect() };
            for (r, q) in dag.vertices_at(i).enumerate() {
                let reach = bfs_reach(dag, i, q, j);
                for (c, &p) in cols.iter().enumerate() {
                    assert_eq!(m.get(r, c), reach.contains(&p), "Reach({i},{j})[{q},{p}]");
                }
            }
        }
    }
}

/// Follows every branch of the enumeration, checking the jump preserves
/// the mapping set of each level set it meets.
fn check_jumps(dag: &MappingDag<'_>, index: &JumpIndex, oracle: &mut SuffixOracle, lam: LevelSet, seen: &mut usize) {
    let jumped = index.jump(dag, &lam);
    assert!(jumped.level >= lam.level);
    assert_eq!(oracle.mappings(&lam), oracle.mappings(&jumped), "level {}", lam.level);
    *seen += 1;
    if jumped.level == dag.final_level() {
        return;
    }
    let next: Vec<LevelSet> = match dag.kind() {
        DagKind::General => next_level_flashlight(dag, &jumped).into_iter().map(|x| x.1).collect(),
        DagKind::Extended => next_level_extended(dag, &jumped).into_iter().map(|x| x.1).collect(),
    };
    for l in next {
        check_jumps(dag, index, oracle, l, seen);
    }
}

#[test]
fn tables_match_bfs() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..300 {
        let inst = random_instance(&mut rng);
        for model in [general_model(&inst.va), extended_model(&inst.va)] {
            check_tables(&MappingDag::new(&model, &inst.doc));
        }
    }
}

#[test]
fn jumps_preserve_mappings() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut seen = 0;
    for _ in 0..300 {
        let inst = random_instance(&mut rng);
        for model in [general_model(&inst.va), extended_model(&inst.va)] {
            let dag = MappingDag::new(&model, &inst.doc);
            if dag.is_empty() {
                continue;
            }
            let index = JumpIndex::new(&dag);
            let root = level_set(&dag, 0, [model.initial()]);
            let mut oracle = SuffixOracle::new(&dag);
            check_jumps(&dag, &index, &mut oracle, root, &mut seen);
        }
    }
    assert!(seen > 500);
}

#[test]
fn example_jump_skips_to_the_close_marker_level() {
    let s = Spanner::with_engine(EXAMPLE_PATTERN.as_bytes(), docspan::Engine::Extended).unwrap();
    let ev = s.evaluate(EXAMPLE_DOC);
    let dag = ev.dag();
    let index = JumpIndex::with_options(dag, IndexOptions { keep_all_levels: true });
    let lam = level_set(dag, 3, dag.vertices_at(3).collect::<Vec<_>>());
    let jumped = index.jump(dag, &lam);
    assert_eq!(jumped.level, 5);
    assert_eq!(index.reachable_levels(3).unwrap(), vec![5, 6]);
}

#[test]
fn unused_levels_are_not_stored() {
    let s = Spanner::new("x{ab}c*").unwrap();
    let doc = b"abcccc";
    let ev = s.evaluate(doc);
    let stored: Vec<usize> = ev.index().stored_levels().collect();
    assert_eq!(stored, vec![0, 1, 3]);
}
