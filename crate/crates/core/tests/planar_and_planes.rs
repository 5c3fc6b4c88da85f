use mmn_core::connectivity::verify_mmn;
use mmn_core::instances::{gen_kplanes, gen_random};
use mmn_core::kplanes::{solve_kplanes, PlanarLayering};
use mmn_core::mmn2d::{approx_mmn2d, naive_lpaths};
use mmn_core::oracle::lower_bound;
use rayon::prelude::*;

#[test]
fn mmn2d_random_instances() {
    (0..500u64).into_par_iter().for_each(|seed| {
        let n = 2 + seed as usize % 24;
        let t = gen_random(n, 2, seed, 3 * n).unwrap().terminals;
        let net = approx_mmn2d(&t).unwrap();
        assert!(verify_mmn(&net, &t, None).is_feasible(), "seed {seed}");
        assert!(net.weight() <= naive_lpaths(&t).weight(), "seed {seed}");
        assert!(net.weight() >= lower_bound(&t), "seed {seed}");
    });
}

#[test]
fn mmn2d_with_shared_coordinates() {
    (0..100u64).into_par_iter().for_each(|seed| {
        let n = 10 + seed as usize % 15;
        // A narrow range forces repeated x and y values and duplicate points.
        let t = gen_random(n, 2, seed, n).unwrap().terminals;
        let squashed: Vec<_> = t.iter().map(|p| mmn_core::Point::new(vec![p.coord(0) / 3, p.coord(1) / 2])).collect();
        let net = approx_mmn2d(&squashed).unwrap();
        assert!(verify_mmn(&net, &squashed, None).is_feasible(), "seed {seed}");
    });
}

#[test]
fn kplanes_random_instances_are_feasible() {
    (0..300u64).into_par_iter().for_each(|seed| {
        let k = 2 + seed as usize % 5;
        let n = k + seed as usize % 20;
        let t = gen_kplanes(n, k, seed).unwrap().terminals;
        let layering = PlanarLayering::new(&t, None).unwrap();
        assert_eq!(layering.k(), k);
        let sol = solve_kplanes(&layering).unwrap();
        assert!(verify_mmn(&sol.network, &t, None).is_feasible(), "seed {seed}");
        assert!(sol.network.weight() >= lower_bound(&t));
    });
}
