mod common;

use planar_mrf::covering_tree::TreeParams;
use planar_mrf::dualdec::{optimize_inner, BoundTrace, Decomposition, DualState, InnerConfig, StepSchedule};
use planar_mrf::model::{gen_type1, gen_type2, scale_and_round, Labeling};
use planar_mrf::planar_ising::BinaryProjection;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_labeling<R: Rng>(rng: &mut R, n: usize, d: usize) -> Labeling {
    Labeling((0..n).map(|_| rng.gen_range(0..d)).collect())
}

/// Runs `iterations` plain subgradient steps with `projections` installed.
fn stepped_state<'p>(
    decomp: &Decomposition<'p>,
    projections: Vec<BinaryProjection>,
    iterations: usize,
) -> DualState {
    let mut state = DualState::new(decomp);
    for proj in projections {
        state.add_subproblem(decomp.problem, proj).unwrap();
    }
    let schedule = StepSchedule::for_problem(decomp.problem);
    for m in 0..iterations {
        let sol = state.solve_all(decomp).unwrap();
        let ind = state.indicators(decomp, &sol);
        state.subgradient_step(decomp, &sol, &ind, schedule.step(m));
    }
    state
}

#[test]
fn indicators_follow_their_definitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let p = gen_type2(4, 3).unwrap();
    let decomp = Decomposition::new(&p).unwrap();
    let projections = (0..4).map(|_| BinaryProjection::one_vs_all(&random_labeling(&mut rng, 16, 3), 3)).collect();
    let state = stepped_state(&decomp, projections, 30);
    let sol = state.solve_all(&decomp).unwrap();
    let ind = state.indicators(&decomp, &sol);
    let x = &sol.tree.copy_assignment;
    for (e, &(i, j)) in p.edges().iter().enumerate() {
        let (ci, cj) = decomp.tree.edge_copies(e);
        assert_eq!(decomp.tree.copies()[ci].node, i);
        assert_eq!(decomp.tree.copies()[cj].node, j);
        for (entry, &flag) in state.ledger(e).iter().zip(&ind.tree[e]) {
            let (s1, s2) = entry.subsets;
            assert_eq!(flag, s1.contains(x[ci]) != s2.contains(x[cj]));
        }
        for (k, (b, _)) in sol.planar.iter().enumerate() {
            assert_eq!(ind.planar[k][e], b.0[i] != b.0[j]);
        }
    }
}

#[test]
fn one_vs_all_patterns_match_subset_index() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let p = gen_type1(3, 8).unwrap();
    let decomp = Decomposition::new(&p).unwrap();
    let mut state = DualState::new(&decomp);
    for _ in 0..5 {
        let x = random_labeling(&mut rng, 9, 3);
        let k = state.add_subproblem(&p, BinaryProjection::one_vs_all(&x, 3)).unwrap();
        for (e, &(i, j)) in p.edges().iter().enumerate() {
            let id = state.ledger(e).iter().position(|entry| entry.members.contains(&k)).unwrap();
            let expanded = state.planar()[k].expand(p.edges());
            for u in 0..3 {
                for v in 0..3 {
                    let separated = (u == x.0[i]) != (v == x.0[j]);
                    assert_eq!(state.subset_index(e, u, v).contains(&id), separated);
                    // zero weights expand to zero tables whatever the pattern
                    assert_eq!(expanded[e * 9 + u * 3 + v], 0.0);
                }
            }
        }
    }
    assert_eq!(state.check_invariants(&decomp).max(), 0.0);
}

#[test]
fn bounds_stay_below_the_map() {
    for seed in 0..5 {
        let p = scale_and_round(&gen_type1(3, seed).unwrap()).into_problem();
        let (map, _) = common::brute_force_map(&p);
        let decomp = Decomposition::new(&p).unwrap();
        let mut state = DualState::new(&decomp);
        state.add_subproblem(&p, BinaryProjection::uniform(9, 3, 1)).unwrap();
        let mut trace = BoundTrace::new();
        let mut incumbent = None;
        let cfg = InnerConfig { max_iterations: 300, ..InnerConfig::default() };
        optimize_inner(
            &mut state,
            &decomp,
            &StepSchedule::for_problem(&p),
            &cfg,
            &mut incumbent,
            &|_, _| false,
            &mut trace,
            &mut |_| {},
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let best = trace.rows().iter().map(|r| r.lower_bound).fold(f64::NEG_INFINITY, f64::max);
        assert!(best <= map + 1e-6);
        for _ in 0..1000 {
            let y = random_labeling(&mut rng, 9, 3);
            assert!(best <= p.energy(&y).unwrap() + 1e-6);
        }
    }
}

#[test]
fn zero_weight_subproblem_keeps_the_bound() {
    let p = gen_type2(4, 1).unwrap();
    let decomp = Decomposition::new(&p).unwrap();
    let mut state = stepped_state(&decomp, vec![], 40);
    let before = state.solve_all(&decomp).unwrap().lower_bound();
    state.add_subproblem(&p, BinaryProjection::uniform(16, 3, 2)).unwrap();
    let sol = state.solve_all(&decomp).unwrap();
    assert_eq!(sol.lower_bound(), before);
    assert_eq!(sol.planar[0].1, 0.0);
}

#[test]
fn bound_does_not_depend_on_tie_breaking() {
    // Relabelling the states changes which optimum the tree solver returns
    // under ties but not the minimum.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let p = scale_and_round(&gen_type1(3, 2).unwrap()).into_problem();
    let decomp = Decomposition::new(&p).unwrap();
    let state = stepped_state(&decomp, vec![BinaryProjection::uniform(9, 3, 0)], 25);
    let params = state.tree_params();
    let base = decomp.tree.solve(params).unwrap().min_energy;
    for _ in 0..10 {
        let mut perm = [0usize, 1, 2];
        for i in (1..3).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let unary = params.unary.chunks(3).flat_map(|c| (0..3).map(move |u| c[perm[u]])).collect();
        let pairwise =
            params.pairwise.chunks(9).flat_map(|t| (0..9).map(move |uv| t[perm[uv / 3] * 3 + perm[uv % 3]])).collect();
        let relabelled = decomp.tree.solve(&TreeParams { unary, pairwise }).unwrap().min_energy;
        assert!((relabelled - base).abs() < 1e-9);
    }
    // planar minima are invariant under the global flip
    let sol = state.solve_all(&decomp).unwrap();
    let (b, e) = &sol.planar[0];
    assert_eq!(state.planar()[0].binary_energy(p.edges(), &b.flipped()), *e);
}

#[test]
fn steps_from_arbitrary_solutions_preserve_invariants() {
    // The updates are zero-sum whatever the solutions are, optimal or not.
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let p = gen_type2(3, 9).unwrap();
    let decomp = Decomposition::new(&p).unwrap();
    let mut state = DualState::new(&decomp);
    for k in 0..3 {
        state.add_subproblem(&p, BinaryProjection::uniform(9, 3, k)).unwrap();
    }
    state.add_subproblem(&p, BinaryProjection::one_vs_all(&random_labeling(&mut rng, 9, 3), 3)).unwrap();
    for _ in 0..200 {
        let mut sol = state.solve_all(&decomp).unwrap();
        for s in sol.tree.copy_assignment.iter_mut() {
            *s = rng.gen_range(0..3);
        }
        for (b, _) in sol.planar.iter_mut() {
            b.0.iter_mut().for_each(|bit| *bit = rng.gen_bool(0.5));
        }
        let ind = state.indicators(&decomp, &sol);
        state.subgradient_step(&decomp, &sol, &ind, rng.gen_range(0.01..2.0));
        assert!(state.check_invariants(&decomp).max() <= 1e-9);
    }
}
