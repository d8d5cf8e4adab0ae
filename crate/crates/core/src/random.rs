//! Seeded sampling of states, observables, unitaries and measurements.
//!
//! Every sampler takes an explicit generator; [`rng_for`] derives independent
//! streams from a master seed so parallel sweeps stay reproducible.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::fusion::SectorBasis;
use crate::model::Charge;
use crate::state::{AnyonState, BlockOperator};
use crate::{Error, Result, C64};

/// Stream `stream` of the generator seeded by `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard complex Gaussian (independent real and imaginary parts, variance 1/2 each).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-random unitary: QR of a Ginibre matrix with the phases of `R`'s
/// diagonal moved into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<C64> {
    if d == 0 {
        return DMatrix::zeros(0, 0);
    }
    let qr = ginibre(d, d, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Uniformly random unit vector in sector `g`.
pub fn random_state<R: Rng + ?Sized>(basis: &Arc<SectorBasis>, g: Charge, rng: &mut R) -> Result<AnyonState> {
    let sector =
        basis.sector(g).ok_or_else(|| Error::Domain(format!("sector `{}` is empty", basis.model().label(g))))?;
    let mut amps = DVector::zeros(basis.dim());
    for i in sector.range.clone() {
        amps[i] = complex_gaussian(rng);
    }
    AnyonState::from_amplitudes(basis.clone(), amps)?.normalized()
}

/// Random density operator: each sector block is `G G†` for a Ginibre `G`
/// of rank at most `rank`, blocks weighted randomly, trace one overall.
pub fn random_density<R: Rng + ?Sized>(basis: &Arc<SectorBasis>, rank: usize, rng: &mut R) -> BlockOperator {
    let blocks: Vec<DMatrix<C64>> = basis
        .sectors()
        .iter()
        .map(|s| {
            let g = ginibre(s.dim(), rank.clamp(1, s.dim()), rng);
            let w: f64 = rng.random::<f64>() + 0.05;
            let m = &g * g.adjoint();
            let t = m.trace().re;
            m * C64::new(w / t, 0.0)
        })
        .collect();
    let total: f64 = blocks.iter().map(|b| b.trace().re).sum();
    let blocks = blocks.into_iter().map(|b| b / C64::new(total, 0.0)).collect();
    BlockOperator::from_blocks(basis, blocks).expect("blocks sized from the basis")
}

/// Random Hermitian block operator with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(basis: &Arc<SectorBasis>, rng: &mut R) -> BlockOperator {
    let blocks = basis
        .sectors()
        .iter()
        .map(|s| {
            let g = ginibre(s.dim(), s.dim(), rng);
            (&g + g.adjoint()) * C64::new(0.5, 0.0)
        })
        .collect();
    BlockOperator::from_blocks(basis, blocks).expect("blocks sized from the basis")
}

/// Random block-diagonal unitary.
pub fn random_block_unitary<R: Rng + ?Sized>(basis: &Arc<SectorBasis>, rng: &mut R) -> BlockOperator {
    let blocks = basis.sectors().iter().map(|s| random_unitary(s.dim(), rng)).collect();
    BlockOperator::from_blocks(basis, blocks).expect("blocks sized from the basis")
}

/// A complete rank-one measurement respecting superselection: the columns of
/// an independent random unitary in every sector, as unit vectors over `basis`.
pub fn random_sector_pvm<R: Rng + ?Sized>(basis: &Arc<SectorBasis>, rng: &mut R) -> Vec<DVector<C64>> {
    let mut out = Vec::with_capacity(basis.dim());
    for s in basis.sectors() {
        let u = random_unitary(s.dim(), rng);
        for col in u.column_iter() {
            let mut v = DVector::zeros(basis.dim());
            v.rows_mut(s.range.start, s.dim()).copy_from(&col);
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::TreeShape;
    use crate::model::fibonacci_model;
    use crate::state::{spectrum, trace};

    fn basis(n: usize) -> Arc<SectorBasis> {
        Arc::new(SectorBasis::new(Arc::new(fibonacci_model()), TreeShape::left_comb(n)).unwrap())
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| rng_for(7, 1).random()).collect();
        let b: Vec<u64> = (0..4).map(|_| rng_for(7, 1).random()).collect();
        assert_eq!(a, b);
        assert_ne!(rng_for(7, 1).random::<u64>(), rng_for(7, 2).random::<u64>());
    }

    #[test]
    fn unitary_is_unitary() {
        let mut rng = rng_for(1, 0);
        let u = random_unitary(6, &mut rng);
        let d = u.adjoint() * &u - DMatrix::identity(6, 6);
        assert!(d.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn densities_are_valid() {
        let b = basis(3);
        let mut rng = rng_for(3, 0);
        for rank in [1, 2, 10] {
            let rho = random_density(&b, rank, &mut rng);
            rho.validate_density(1e-10).unwrap();
            assert!((trace(&rho).re - 1.0).abs() < 1e-12);
            assert!(spectrum(&rho).iter().all(|&x| x > -1e-10));
        }
    }

    #[test]
    fn pvm_is_complete_and_orthonormal() {
        let b = basis(2);
        let pvm = random_sector_pvm(&b, &mut rng_for(5, 0));
        assert_eq!(pvm.len(), 5);
        for (i, u) in pvm.iter().enumerate() {
            for (j, v) in pvm.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((u.dotc(v) - C64::new(expected, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn state_stays_in_sector() {
        let b = basis(4);
        let s = random_state(&b, Charge::TAU, &mut rng_for(9, 0)).unwrap();
        assert_eq!(s.global_charge(), Charge::TAU);
        assert!(s.is_normalized(1e-12));
    }
}
