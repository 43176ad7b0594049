mod common;

use common::{knapsack, rng, score, sorted};
use nicediv::framework::{diversity_sum, run_local_search};
use nicediv::knapsack::{
    diverse_knapsack, exact_diverse, kbest_bcbe, scale_instance, DiverseKnapsackParams, KnapsackBackend,
    KnapsackInstance, Mode, WeightMode, WorkInstance,
};
use nicediv::numeric::Ratio;
use nicediv::oracle::{enumerate_all, enumerate_feasible, kbest_bruteforce, opt_div_bruteforce, opt_div_min_distance};
use nicediv::{Error, Solution};
use proptest::prelude::*;
use rand::Rng;

fn best(inst: &KnapsackInstance) -> (u64, Solution) {
    let all = enumerate_all(inst).unwrap();
    let s = all.solutions().iter().max_by_key(|s| inst.profit(s)).unwrap().clone();
    (inst.profit(&s), s)
}

fn ratio(x: f64) -> Ratio {
    Ratio::from_decimal(x).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn scaling_keeps_good_sets_and_rejects_bad(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=12);
        let inst = knapsack(&mut r, n);
        let (opt, s) = best(&inst);
        prop_assume!(opt > 0);
        let loose = KnapsackInstance::new(inst.weights.clone(), inst.profits.clone(), inst.weights.iter().sum()).unwrap();
        let all = enumerate_all(&loose).unwrap();
        for &c in &[0.5, 0.9] {
            for &delta in &[0.5, 0.9] {
                for &gamma in &[0.5, 0.9] {
                    let sc = scale_instance(&inst, &s, c, delta, gamma).unwrap();
                    let keep = ratio(delta).complement().unwrap().mul(ratio(c)).unwrap();
                    let grow = Ratio::new(ratio(gamma).den + ratio(gamma).num, ratio(gamma).den).unwrap();
                    for x in all.solutions() {
                        let u: u64 = x.members().iter().map(|&i| sc.profits[i]).sum();
                        let w: u64 = x.members().iter().map(|&i| sc.weights[i]).sum();
                        if inst.fits(x) && inst.profit(x) as u128 >= ratio(c).ceil_mul(opt) {
                            prop_assert!(u >= sc.u_threshold && w <= sc.w_threshold);
                        }
                        if u >= sc.u_threshold && w <= sc.w_threshold {
                            prop_assert!(inst.profit(x) as u128 >= keep.ceil_mul(opt));
                            prop_assert!(inst.weight(x) as u128 <= grow.floor_mul(inst.capacity));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn exact_dp_matches_oracle(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=9);
        let inst = knapsack(&mut r, n);
        let (opt, _) = best(&inst);
        let floor = r.gen_range(0..=opt);
        let work = WorkInstance::raw(&inst, floor);
        let space = enumerate_all(&inst).unwrap().filter(|s, _| inst.profit(s) >= floor);
        let k = r.gen_range(1..=3);
        for d_min in 0..=2 {
            let want = opt_div_min_distance(&space, k, d_min).unwrap();
            match exact_diverse(&work, k, d_min) {
                Ok((d, col)) => {
                    prop_assert_eq!(Some(d), want.map(|w| w.0));
                    prop_assert_eq!(diversity_sum(&col), d);
                    prop_assert!(col.solutions().iter().all(|s| work.admits(s)));
                }
                Err(Error::Infeasible(_)) => prop_assert!(want.is_none()),
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
    }

    #[test]
    fn kbest_matches_bruteforce(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=10);
        let inst = knapsack(&mut r, n);
        let (opt, _) = best(&inst);
        let floor = r.gen_range(0..=opt);
        let k = r.gen_range(1..=5);
        let f = score(&mut r, n, k);
        let got = kbest_bcbe(&WorkInstance::raw(&inst, floor), k, &f).unwrap();
        let space = enumerate_all(&inst).unwrap().filter(|s, _| inst.profit(s) >= floor);
        let want = kbest_bruteforce(&space, &f, k);
        prop_assert_eq!(sorted(got.scores.clone()), sorted(want.scores.clone()));
        prop_assert_eq!(got.exhausted, want.exhausted);
        prop_assert!(got.solutions.iter().all(|s| space.contains(s)));
    }

    #[test]
    fn pipeline_respects_weight_limits(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=8);
        let inst = knapsack(&mut r, n);
        let k = r.gen_range(1..=5);
        // forcing the exact DP at k = 5 is far too slow for a property test
        let modes: &[Mode] = if k <= 3 { &[Mode::Exact, Mode::LocalSearch, Mode::Auto] } else { &[Mode::LocalSearch] };
        for wm in [WeightMode::Exact, WeightMode::Ptas] {
            for &mode in modes {
                let mut p = DiverseKnapsackParams::new(k, 0.8, 0.2, 0.5);
                p.weight_mode = wm;
                p.mode = mode;
                let out = diverse_knapsack(&inst, &p).unwrap();
                let limit = match wm {
                    WeightMode::Exact => inst.capacity as f64,
                    WeightMode::Ptas => 1.5 * inst.capacity as f64,
                };
                prop_assert_eq!(out.collection.k(), k);
                prop_assert!(out.collection.solutions().iter().all(|s| inst.weight(s) as f64 <= limit));
            }
        }
    }

    #[test]
    fn backend_output_within_oracle_optimum(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=10);
        let inst = knapsack(&mut r, n);
        let (opt, _) = best(&inst);
        let k = r.gen_range(2..=4);
        let space = enumerate_feasible(&inst, 1.0).unwrap();
        let out = run_local_search(&KnapsackBackend { inst: WorkInstance::raw(&inst, opt) }, k).unwrap();
        prop_assert!(out.solutions().iter().all(|s| space.contains(s)));
        let (best_div, _) = opt_div_bruteforce(&space, k).unwrap();
        let d = diversity_sum(&out);
        prop_assert!(d <= best_div && d * (k as u64 + 1) >= best_div * (k as u64 - 1));
    }
}
