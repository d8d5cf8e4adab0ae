use std::sync::Arc;

use anyonic_core::random::{random_state, rng_for};
use anyonic_core::recoupling::{change_along, rotation_path, shape_change};
use anyonic_core::{
    braid_adjacent, change_shape, fibonacci_model, AnyonModel, BraidDirection, Charge, SectorBasis, TreeShape, C64,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn model() -> Arc<AnyonModel> {
    Arc::new(fibonacci_model())
}

fn max_dev(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn round_trips_between_all_shapes() {
    let m = model();
    for n in 2..=5 {
        let shapes = TreeShape::all(n);
        for from in &shapes {
            let basis = Arc::new(SectorBasis::new(m.clone(), from.clone()).unwrap());
            let id = DMatrix::<C64>::identity(basis.dim(), basis.dim());
            for to in &shapes {
                let there = shape_change(&basis, to).unwrap();
                assert!(there.is_block_diagonal());
                assert!(there.unitarity_residual() <= 1e-12, "{from} -> {to}");
                let back = shape_change(there.target(), from).unwrap();
                let round = there.then(&back).unwrap().to_dense();
                assert!(max_dev(&round, &id) <= 1e-12, "{from} -> {to} -> {from}");
            }
        }
    }
}

#[test]
fn routes_through_either_comb_agree() {
    let m = model();
    for n in 3..=5 {
        let right = TreeShape::right_comb(n);
        for from in TreeShape::all(n) {
            let basis = Arc::new(SectorBasis::new(m.clone(), from.clone()).unwrap());
            for to in TreeShape::all(n) {
                let direct = shape_change(&basis, &to).unwrap().to_dense();
                let first = change_along(&basis, &rotation_path(&from, &right).unwrap()).unwrap();
                let second = change_along(first.target(), &rotation_path(&right, &to).unwrap()).unwrap();
                let via_right = first.then(&second).unwrap().to_dense();
                assert!(max_dev(&direct, &via_right) <= 1e-12, "{from} -> {to}");
            }
        }
    }
}

#[test]
fn braid_then_inverse_is_identity() {
    let m = model();
    let basis = Arc::new(SectorBasis::new(m, TreeShape::grouped(2, 2)).unwrap());
    let grouped = random_state(&basis, Charge::TAU, &mut rng_for(11, 0)).unwrap();
    let middle = change_shape(&grouped, &TreeShape::parse("((0 (1 2)) 3)").unwrap()).unwrap();
    for (leaf, psi) in [(0, &grouped), (1, &middle), (2, &grouped)] {
        let there = braid_adjacent(psi, leaf, BraidDirection::CounterClockwise).unwrap();
        assert!((there.norm() - 1.0).abs() < 1e-12);
        let back = braid_adjacent(&there, leaf, BraidDirection::Clockwise).unwrap();
        let d = (back.amplitudes() - psi.amplitudes()).norm();
        assert!(d < 1e-12, "leaf {leaf}: {d}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn recoupling_preserves_norm_and_sector(seed in any::<u64>(), from in 0usize..14, to in 0usize..14, tau in any::<bool>()) {
        let shapes = TreeShape::all(5);
        let basis = Arc::new(SectorBasis::new(model(), shapes[from].clone()).unwrap());
        let g = if tau { Charge::TAU } else { Charge::VACUUM };
        let psi = random_state(&basis, g, &mut rng_for(seed, 0)).unwrap();
        let out = change_shape(&psi, &shapes[to]).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-12);
        prop_assert_eq!(out.global_charge(), g);
    }
}
