mod common;

use common::gradient_sweep;

#[test]
fn analytic_gradients_match_finite_differences() {
    let sweep = gradient_sweep(200, 11);
    println!("{sweep:?}");
    assert!(sweep.first_order.checked > 5_000);
    assert!(sweep.second_order.checked > 1_000);
    assert!(sweep.first_order.max_rel < 1e-4, "{:?}", sweep.first_order);
    assert!(sweep.second_order.max_rel < 1e-3, "{:?}", sweep.second_order);
}

#[test]
fn different_seeds_also_pass() {
    for seed in 100..103 {
        let sweep = gradient_sweep(30, seed);
        assert!(sweep.first_order.max_rel < 1e-4, "seed {seed}: {:?}", sweep.first_order);
        assert!(sweep.second_order.max_rel < 1e-3, "seed {seed}: {:?}", sweep.second_order);
    }
}
