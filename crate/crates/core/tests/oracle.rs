mod common;

use common::{knapsack, rng, subset};
use nicediv::oracle::{
    enumerate_all, enumerate_feasible, max_mutual_distance_set, opt_div_bruteforce, opt_div_min_distance, FeasibleSpace,
};
use nicediv::Solution;
use proptest::prelude::*;
use rand::Rng;

fn random_space(r: &mut rand_chacha::ChaCha8Rng, n: usize, m: usize) -> FeasibleSpace {
    let mut sols: Vec<Solution> = (0..m).map(|_| subset(r, n)).collect();
    sols.sort();
    sols.dedup();
    let q = vec![1.0; sols.len()];
    FeasibleSpace::new(n, sols, q).unwrap()
}

fn pair_sum(sols: &[&Solution]) -> u64 {
    let mut d = 0;
    for a in 0..sols.len() {
        for b in a + 1..sols.len() {
            d += sols[a].sym_diff(sols[b]) as u64;
        }
    }
    d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn opt_div_matches_subset_scan(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=8);
        let m = r.gen_range(1..=12);
        let space = random_space(&mut r, n, m);
        let m = space.len();
        let k = r.gen_range(1..=m.min(4));
        let mut best = 0;
        for mask in 0u32..1 << m {
            if mask.count_ones() as usize == k {
                let pick: Vec<&Solution> = (0..m).filter(|&i| mask >> i & 1 == 1).map(|i| &space.solutions()[i]).collect();
                best = best.max(pair_sum(&pick));
            }
        }
        let (d, col) = opt_div_bruteforce(&space, k).unwrap();
        prop_assert_eq!(d, best);
        prop_assert_eq!(col.k(), k);
        prop_assert!(col.solutions().iter().all(|s| space.contains(s)));
        // distinctness is implied once every pair must differ
        let strict = opt_div_min_distance(&space, k, 1).unwrap().map(|x| x.0);
        prop_assert_eq!(strict, Some(best));
        let loose = opt_div_min_distance(&space, k, 0).unwrap().unwrap().0;
        prop_assert!(loose >= best);
    }

    #[test]
    fn mutual_distance_matches_subset_scan(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=8);
        let m = r.gen_range(1..=14);
        let space = random_space(&mut r, n, m);
        let m = space.len();
        let d = r.gen_range(1..=n);
        let mut best = 0;
        for mask in 1u32..1 << m {
            let pick: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
            let ok = pick.iter().all(|&a| pick.iter().all(|&b| a == b || space.solutions()[a].sym_diff(&space.solutions()[b]) >= d));
            if ok {
                best = best.max(pick.len());
            }
        }
        prop_assert_eq!(max_mutual_distance_set(&space, d).unwrap(), best);
    }

    #[test]
    fn feasible_space_is_the_c_optimal_slice(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=10);
        let inst = knapsack(&mut r, n);
        let c = [0.5, 0.8, 1.0][r.gen_range(0..3)];
        let all = enumerate_all(&inst).unwrap();
        let opt = all.solutions().iter().map(|s| inst.profit(s)).max().unwrap();
        let space = enumerate_feasible(&inst, c).unwrap();
        for s in all.solutions() {
            let good = inst.profit(s) as f64 >= c * opt as f64 - 1e-9;
            prop_assert_eq!(space.contains(s), good);
        }
        prop_assert!(space.solutions().iter().all(|s| inst.fits(s)));
    }
}
