//! Workloads shared by the benchmarks.

use std::sync::Arc;

use anyonic_core::random::{random_density, random_state, rng_for};
use anyonic_core::{
    fibonacci_model, AnyonModel, AnyonState, Bipartition, BlockOperator, Charge, SectorBasis, TreeShape,
};

pub fn model() -> Arc<AnyonModel> {
    Arc::new(fibonacci_model())
}

pub fn left_comb_basis(n: usize) -> Arc<SectorBasis> {
    Arc::new(SectorBasis::new(model(), TreeShape::left_comb(n)).expect("left comb"))
}

/// A seeded random pure state of charge tau on the left comb.
pub fn tau_state(n: usize, seed: u64) -> AnyonState {
    random_state(&left_comb_basis(n), Charge::TAU, &mut rng_for(seed, 0)).expect("tau sector exists")
}

/// A seeded rank-3 density on the grouped `(A B)` shape, with its bipartition.
pub fn grouped_density(n_a: usize, n_b: usize, seed: u64) -> (Bipartition, BlockOperator) {
    let bip = Bipartition::grouped(&model(), n_a, n_b).expect("grouped shape");
    let rho = random_density(bip.whole(), 3, &mut rng_for(seed, 1));
    (bip, rho)
}
