mod common;

use common::{plane_graph, rng, score, sorted, subset};
use nicediv::framework::diversity_sum;
use nicediv::numeric::Ratio;
use nicediv::oracle::{enumerate_all, enumerate_feasible, kbest_bruteforce, opt_div_bruteforce, opt_div_min_distance};
use nicediv::planar::{
    build_tree_decomposition, choose_ell, compute_levels, deeper_vertices_enclosed, diverse_planar, exact_diverse_td,
    kbest_bcbe_td, mwis_td, strata_report, ExactTdOptions, IndependentSets, Layering, PlanarParams, PlanarProblem,
    VertexCovers,
};
use nicediv::{Error, SolutionCollection};
use proptest::prelude::*;
use rand::Rng;

fn ratio(x: f64) -> Ratio {
    Ratio::from_decimal(x).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn levels_peel_from_outside(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=30);
        let drop = r.gen_range(0.0..0.4);
        let pg = plane_graph(&mut r, n, drop, 3);
        let layering = compute_levels(&pg).unwrap();
        prop_assert!(layering.levels.iter().all(|&l| l >= 1));
        prop_assert!(deeper_vertices_enclosed(&pg, &layering));
        for (u, v) in pg.graph.edges() {
            prop_assert!(layering.levels[u].abs_diff(layering.levels[v]) <= 1);
        }
    }

    #[test]
    fn strata_partition_vertices_and_diversity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=20);
        let depth = r.gen_range(1..=6);
        let layering = Layering { levels: (0..n).map(|_| r.gen_range(1..=depth)).collect() };
        let ell = r.gen_range(0..=5);
        let mut seen = vec![0; n];
        for p in 0..=ell {
            for v in layering.strata(p, ell) {
                seen[v] += 1;
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
        let k = r.gen_range(1..=4);
        let col = SolutionCollection::multiset((0..k).map(|_| subset(&mut r, n)).collect()).unwrap();
        let weights: Vec<u64> = (0..n).map(|_| r.gen_range(0..=3)).collect();
        let rep = strata_report(&col, &weights, &layering, ell, 0.5, 0.5).unwrap();
        let total: u64 = rep.strata.iter().map(|s| s.strata_diversity).sum();
        prop_assert_eq!(total, diversity_sum(&col));
        for h in 0..k {
            let mass: u64 = rep.strata.iter().map(|s| s.masses[h]).sum();
            let w: u64 = col.solutions()[h].members().iter().map(|&v| weights[v]).sum();
            prop_assert_eq!(mass, w);
        }
    }

    #[test]
    fn some_strata_is_marginal(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=40);
        let depth = r.gen_range(1..=12);
        let layering = Layering { levels: (0..n).map(|_| r.gen_range(1..=depth)).collect() };
        let k = r.gen_range(1..=4);
        let delta = [0.3, 0.5, 1.0][r.gen_range(0..3)];
        let epsilon = [0.3, 0.5, 1.0][r.gen_range(0..3)];
        let ell = choose_ell(k, delta, epsilon, false).unwrap();
        let col = SolutionCollection::multiset((0..k).map(|_| subset(&mut r, n)).collect()).unwrap();
        let weights: Vec<u64> = (0..n).map(|_| r.gen_range(0..=5)).collect();
        let rep = strata_report(&col, &weights, &layering, ell, delta, epsilon).unwrap();
        prop_assert!(rep.marginal().is_some());
    }

    #[test]
    fn decomposition_and_mwis_match_bruteforce(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=14);
        let drop = r.gen_range(0.0..0.5);
        let pg = plane_graph(&mut r, n, drop, 5);
        let g = &pg.graph;
        let td = build_tree_decomposition(g).unwrap();
        prop_assert!(td.validate(g).is_ok());
        let (w, s) = mwis_td(g, &td).unwrap();
        let all = enumerate_all(&IndependentSets(g)).unwrap();
        let best = all.solutions().iter().map(|s| g.weight(s)).max().unwrap();
        prop_assert_eq!(w, best);
        prop_assert!(g.is_independent(&s) && g.weight(&s) == w);
    }

    #[test]
    fn td_kbest_matches_bruteforce(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=10);
        let pg = plane_graph(&mut r, n, 0.3, 4);
        let g = &pg.graph;
        let td = build_tree_decomposition(g).unwrap();
        let all = enumerate_all(&IndependentSets(g)).unwrap();
        let best = all.solutions().iter().map(|s| g.weight(s)).max().unwrap();
        let floor = r.gen_range(0..=best);
        let k = r.gen_range(1..=5);
        let f = score(&mut r, n, k);
        let got = kbest_bcbe_td(g, &td, floor, k, &f).unwrap();
        let space = all.filter(|s, _| g.weight(s) >= floor);
        let want = kbest_bruteforce(&space, &f, k);
        prop_assert_eq!(sorted(got.scores.clone()), sorted(want.scores.clone()));
        prop_assert_eq!(got.exhausted, want.exhausted);
        prop_assert!(got.solutions.iter().all(|s| space.contains(s)));
    }

    #[test]
    fn td_exact_diverse_matches_oracle(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=8);
        let pg = plane_graph(&mut r, n, 0.3, 3);
        let g = &pg.graph;
        let td = build_tree_decomposition(g).unwrap();
        let all = enumerate_all(&IndependentSets(g)).unwrap();
        let best = all.solutions().iter().map(|s| g.weight(s)).max().unwrap();
        let floor = r.gen_range(0..=best);
        let space = all.filter(|s, _| g.weight(s) >= floor);
        let k = r.gen_range(1..=3);
        for d_min in 0..=2 {
            let want = opt_div_min_distance(&space, k, d_min).unwrap().map(|x| x.0);
            match exact_diverse_td(g, &td, k, floor, d_min, &ExactTdOptions::default()) {
                Ok((d, col)) => {
                    prop_assert_eq!(Some(d), want);
                    prop_assert_eq!(diversity_sum(&col), d);
                    prop_assert!(col.solutions().iter().all(|s| space.contains(s)));
                }
                Err(Error::Infeasible(_)) => prop_assert!(want.is_none()),
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
    }

    #[test]
    fn pipeline_meets_quality_and_diversity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=10);
        let drop = r.gen_range(0.0..0.4);
        let pg = plane_graph(&mut r, n, drop, 3);
        let g = &pg.graph;
        let k = r.gen_range(2..=3);
        let c = [1.0, 0.8][r.gen_range(0..2)];
        let (delta, epsilon) = (0.5, [0.5, 0.9][r.gen_range(0..2)]);
        let problem = if r.gen_bool(0.5) { PlanarProblem::IndependentSet } else { PlanarProblem::VertexCover };
        let out = diverse_planar(&pg, &PlanarParams::new(k, c, delta, epsilon, problem)).unwrap();
        prop_assert_eq!(out.collection.k(), k);
        let keep = ratio(delta).complement().unwrap().mul(ratio(c)).unwrap();
        let space = match problem {
            PlanarProblem::IndependentSet => {
                let opt = enumerate_all(&IndependentSets(g)).unwrap().solutions().iter().map(|s| g.weight(s)).max().unwrap();
                for s in out.collection.solutions() {
                    prop_assert!(g.is_independent(s));
                    prop_assert!(g.weight(s) as u128 >= keep.ceil_mul(opt));
                }
                enumerate_feasible(&IndependentSets(g), c).unwrap()
            }
            PlanarProblem::VertexCover => {
                let opt = enumerate_all(&VertexCovers(g)).unwrap().solutions().iter().map(|s| g.weight(s)).min().unwrap();
                for s in out.collection.solutions() {
                    prop_assert!(g.is_cover(s));
                    prop_assert!(g.weight(s) as u128 * keep.num as u128 <= opt as u128 * keep.den as u128);
                }
                enumerate_feasible(&VertexCovers(g), c).unwrap()
            }
        };
        let Ok((opt_div, _)) = opt_div_bruteforce(&space, k) else { return Ok(()) };
        // diversity >= (1-ε)(1-2/(k+1)) OPT_div, cleared of denominators
        let e = ratio(epsilon);
        let d = diversity_sum(&out.collection) as u128;
        let k = k as u128;
        prop_assert!(d * e.den as u128 * (k + 1) >= (e.den - e.num) as u128 * (k - 1) * opt_div as u128);
    }
}
