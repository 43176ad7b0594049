use std::collections::BTreeSet;

use nicediv::codes::{
    a2, build_cut_graph, decode_cut, decode_packing, encode_word, hamming, minimum_cuts, optimal_packings,
    plotkin_bound, Route,
};

/// Largest code by scanning every subset of the `2^n` words.
fn a2_subsets(n: usize, d: usize) -> usize {
    let words: Vec<u32> = (0..1 << n).collect();
    let mut best = 0;
    for mask in 1u32..1 << words.len() {
        let pick: Vec<u32> = words.iter().copied().filter(|&w| mask >> w & 1 == 1).collect();
        if pick.len() > best && pick.iter().all(|&a| pick.iter().all(|&b| a == b || (a ^ b).count_ones() as usize >= d))
        {
            best = pick.len();
        }
    }
    best
}

#[test]
fn routes_agree_up_to_eight() {
    for n in 1..=8 {
        for d in n / 2 + 1..=n {
            let direct = a2(n, d, Route::Direct).unwrap();
            assert_eq!(a2(n, d, Route::Knapsack).unwrap(), direct, "knapsack route, n={n} d={d}");
            assert_eq!(a2(n, d, Route::Cut).unwrap(), direct, "cut route, n={n} d={d}");
            assert!(direct <= plotkin_bound(n, d).max(1), "n={n} d={d}");
        }
    }
}

#[test]
fn direct_route_matches_subset_scan() {
    for n in 1..=4 {
        for d in n / 2 + 1..=n {
            assert_eq!(a2(n, d, Route::Direct).unwrap(), a2_subsets(n, d), "n={n} d={d}");
        }
    }
}

#[test]
fn spot_values() {
    assert_eq!(a2(4, 3, Route::Direct).unwrap(), 2);
    assert_eq!(a2(5, 3, Route::Direct).unwrap(), 4);
    assert_eq!(a2(8, 5, Route::Direct).unwrap(), 4);
    assert_eq!(a2(3, 3, Route::Direct).unwrap(), 2);
}

#[test]
fn out_of_regime_is_rejected() {
    assert!(a2(4, 2, Route::Direct).is_err());
    assert!(a2(4, 5, Route::Direct).is_err());
    assert!(a2(13, 7, Route::Cut).is_err());
}

#[test]
fn packings_decode_to_every_word() {
    for n in 1..=10 {
        let space = optimal_packings(n).unwrap();
        assert_eq!(space.len(), 1 << n);
        let words: Vec<String> = space.solutions().iter().map(|s| decode_packing(n, s).unwrap()).collect();
        assert_eq!(words.iter().collect::<BTreeSet<_>>().len(), 1 << n);
        for (s, w) in space.solutions().iter().zip(&words) {
            assert_eq!(&encode_word(w).unwrap(), s);
        }
        if n <= 6 {
            for (a, wa) in space.solutions().iter().zip(&words) {
                for (b, wb) in space.solutions().iter().zip(&words) {
                    assert_eq!(a.sym_diff(b), 2 * hamming(wa, wb));
                }
            }
        }
    }
}

#[test]
fn minimum_cuts_have_size_n() {
    for n in 1..=6 {
        let g = build_cut_graph(n).unwrap();
        let cuts = minimum_cuts(n).unwrap();
        assert_eq!(cuts.len(), 1 << n);
        let mut words = BTreeSet::new();
        for c in cuts.solutions() {
            assert_eq!(c.len(), n);
            assert!(g.is_cut(c));
            words.insert(decode_cut(&g, c).unwrap());
        }
        assert_eq!(words.len(), 1 << n);
    }
}
