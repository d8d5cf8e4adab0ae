//! Correlation diagnostics for bipartite anyonic states.
//!
//! A state is uncorrelated when `Tr(O_A O_B ρ) = Tr(O_A ρ_A) Tr(O_B ρ_B)` for
//! every pair of local observables. Both sides are bilinear in the
//! observables, so checking a Hermitian spanning set of each party's
//! block-diagonal algebra decides the universal statement.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use crate::fusion::{FusionTree, SectorBasis};
use crate::model::Charge;
use crate::random::rng_for;
use crate::state::{
    embed_local, partial_trace, partial_trace_pure, spectrum, trace_product, AnyonState, Bipartition, BlockOperator,
    Side,
};
use crate::{Error, Result, C64};

/// Hermitian spanning set of the block-diagonal operators on `basis`: per
/// sector of dimension `d`, the `d` diagonal units, then for each `i < j`
/// the pair `E_ij + E_ji` and `i(E_ij − E_ji)`.
pub fn local_observable_basis(basis: &Arc<SectorBasis>) -> Vec<BlockOperator> {
    let mut out = Vec::new();
    for s in basis.sectors() {
        let idx: Vec<usize> = s.range.clone().collect();
        for &i in &idx {
            let mut op = BlockOperator::zeros(basis);
            op.add_entry(i, i, C64::new(1.0, 0.0)).expect("diagonal");
            out.push(op);
        }
        for (p, &i) in idx.iter().enumerate() {
            for &j in &idx[p + 1..] {
                let mut sym = BlockOperator::zeros(basis);
                sym.add_entry(i, j, C64::new(1.0, 0.0)).expect("same sector");
                sym.add_entry(j, i, C64::new(1.0, 0.0)).expect("same sector");
                out.push(sym);
                let mut anti = BlockOperator::zeros(basis);
                anti.add_entry(i, j, C64::new(0.0, 1.0)).expect("same sector");
                anti.add_entry(j, i, C64::new(0.0, -1.0)).expect("same sector");
                out.push(anti);
            }
        }
    }
    out
}

/// `Tr(O_A O_B ρ) − Tr(O_A ρ_A) Tr(O_B ρ_B)` for explicit observables.
pub fn correlation_violation(
    rho: &BlockOperator,
    bipartition: &Bipartition,
    o_a: &BlockOperator,
    o_b: &BlockOperator,
) -> Result<C64> {
    let rho_a = partial_trace(rho, bipartition, Side::B)?;
    let rho_b = partial_trace(rho, bipartition, Side::A)?;
    let big_a = embed_local(o_a, bipartition, Side::A)?;
    let big_b = embed_local(o_b, bipartition, Side::B)?;
    let lhs = trace_product(&(&big_a * &big_b), rho);
    Ok(lhs - trace_product(o_a, &rho_a) * trace_product(o_b, &rho_b))
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrelationReport {
    pub is_uncorrelated: bool,
    /// Largest `|LHS − RHS|` over the spanning-set pairs.
    pub max_violation: f64,
    /// Indices into the two [`local_observable_basis`] lists achieving it.
    pub witness: (usize, usize),
    pub spectrum_a: Vec<f64>,
    pub spectrum_b: Vec<f64>,
    pub spectra_symmetric: bool,
}

/// Complex violation `V[p, q]` for every spanning-set pair.
pub fn violation_matrix(rho: &BlockOperator, bipartition: &Bipartition) -> Result<DMatrix<C64>> {
    let obs_a = local_observable_basis(bipartition.side(Side::A));
    let obs_b = local_observable_basis(bipartition.side(Side::B));
    let rho_a = partial_trace(rho, bipartition, Side::B)?;
    let rho_b = partial_trace(rho, bipartition, Side::A)?;
    let exp_a: Vec<C64> = obs_a.iter().map(|o| trace_product(o, &rho_a)).collect();
    let exp_b: Vec<C64> = obs_b.iter().map(|o| trace_product(o, &rho_b)).collect();

    // Tr(Ô_A Ô_B ρ) = Σ_{i,k} O_A[a_i, a_k] O_B[b_i, b_k] ρ[k, i] over same-sector pairs.
    let whole = bipartition.whole();
    let pairs: Vec<(usize, usize, C64)> = whole
        .sectors()
        .iter()
        .flat_map(|s| s.range.clone().flat_map(move |i| s.range.clone().map(move |k| (i, k))))
        .filter_map(|(i, k)| {
            let r = rho.get(k, i);
            (r != C64::new(0.0, 0.0)).then_some((i, k, r))
        })
        .collect();
    let mut v = DMatrix::zeros(obs_a.len(), obs_b.len());
    for (p, oa) in obs_a.iter().enumerate() {
        let weighted: Vec<(usize, usize, C64)> = pairs
            .iter()
            .filter_map(|&(i, k, r)| {
                let (ai, bi) = bipartition.parts(i);
                let (ak, bk) = bipartition.parts(k);
                let x = oa.get(ai, ak);
                (x != C64::new(0.0, 0.0)).then_some((bi, bk, x * r))
            })
            .collect();
        for (q, ob) in obs_b.iter().enumerate() {
            let lhs: C64 = weighted.iter().map(|&(bi, bk, w)| ob.get(bi, bk) * w).sum();
            v[(p, q)] = lhs - exp_a[p] * exp_b[q];
        }
    }
    Ok(v)
}

/// Evaluates the uncorrelated condition on the spanning sets.
pub fn is_uncorrelated(rho: &BlockOperator, bipartition: &Bipartition, tol: f64) -> Result<CorrelationReport> {
    let v = violation_matrix(rho, bipartition)?;
    let (mut max, mut witness) = (0.0, (0, 0));
    for p in 0..v.nrows() {
        for q in 0..v.ncols() {
            let x = v[(p, q)].norm();
            if x > max {
                max = x;
                witness = (p, q);
            }
        }
    }
    let spectrum_a = spectrum(&partial_trace(rho, bipartition, Side::B)?);
    let spectrum_b = spectrum(&partial_trace(rho, bipartition, Side::A)?);
    let spectra_symmetric = spectra_match(&spectrum_a, &spectrum_b, tol.max(1e-12));
    Ok(CorrelationReport {
        is_uncorrelated: max <= tol,
        max_violation: max,
        witness,
        spectrum_a,
        spectrum_b,
        spectra_symmetric,
    })
}

/// Compares two descending spectra, padding the shorter with zeros.
pub fn spectra_match(a: &[f64], b: &[f64], tol: f64) -> bool {
    let n = a.len().max(b.len());
    (0..n).all(|i| (a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0)).abs() <= tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PureClass {
    /// Vacuum sector, only `|e,e;e⟩`.
    ProductEAlpha,
    /// Vacuum sector, only `|τ,τ;e⟩`.
    ProductEBeta,
    /// τ sector without `|τ,e;τ⟩`.
    #[serde(rename = "class-1-tau")]
    Class1Tau,
    /// τ sector without `|e,τ;τ⟩`.
    #[serde(rename = "class-2-tau")]
    Class2Tau,
    Entangled,
}

impl PureClass {
    pub fn as_str(self) -> &'static str {
        match self {
            PureClass::ProductEAlpha => "product-e-alpha",
            PureClass::ProductEBeta => "product-e-beta",
            PureClass::Class1Tau => "class-1-tau",
            PureClass::Class2Tau => "class-2-tau",
            PureClass::Entangled => "entangled",
        }
    }

    pub fn is_uncorrelated(self) -> bool {
        self != PureClass::Entangled
    }
}

impl fmt::Display for PureClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PureClassLabel {
    pub sector: Charge,
    pub class: PureClass,
}

/// The five two-anyon coefficients
/// `(α_e, β_e, α_τ, β_τ, γ_τ)` on `|e,e;e⟩, |τ,τ;e⟩, |τ,e;τ⟩, |e,τ;τ⟩, |τ,τ;τ⟩`.
pub fn two_anyon_coefficients(psi: &AnyonState) -> Result<[C64; 5]> {
    let basis = psi.basis();
    if basis.n_leaves() != 2 || basis.model().num_charges() != 2 {
        return Err(Error::Domain("expected a two-anyon Fibonacci state".into()));
    }
    let (e, t) = (Charge::VACUUM, Charge::TAU);
    let trees = [
        FusionTree::new(vec![e, e], vec![e]),
        FusionTree::new(vec![t, t], vec![e]),
        FusionTree::new(vec![t, e], vec![t]),
        FusionTree::new(vec![e, t], vec![t]),
        FusionTree::new(vec![t, t], vec![t]),
    ];
    let mut out = [C64::new(0.0, 0.0); 5];
    for (slot, tree) in out.iter_mut().zip(&trees) {
        *slot = psi.amplitude(tree)?;
    }
    Ok(out)
}

/// Closed-form class of a two-anyon pure state: uncorrelated iff the vacuum
/// sector has a single nonzero coefficient, or the τ sector lacks one of
/// `α_τ`, `β_τ`. Coefficients with modulus at most `tol` count as zero.
pub fn classify_pure_2anyon(psi: &AnyonState, tol: f64) -> Result<PureClassLabel> {
    let [ae, be, at, bt, _] = two_anyon_coefficients(psi)?;
    let sector = psi.global_charge();
    let zero = |z: C64| z.norm() <= tol;
    let class = if sector == Charge::VACUUM {
        match (zero(ae), zero(be)) {
            (_, true) => PureClass::ProductEAlpha,
            (true, false) => PureClass::ProductEBeta,
            _ => PureClass::Entangled,
        }
    } else if zero(at) {
        PureClass::Class1Tau
    } else if zero(bt) {
        PureClass::Class2Tau
    } else {
        PureClass::Entangled
    };
    Ok(PureClassLabel { sector, class })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MaximalEntanglement {
    pub maximal: bool,
    /// `φ ∈ [0, 2π)` in `(|e,τ;τ⟩ + e^{iφ}|τ,e;τ⟩)/√2`, when the state has that form.
    pub phase: Option<f64>,
}

/// True iff both single-anyon marginals equal `diag(1/2, 1/2)` within `tol`.
pub fn is_maximally_entangled_2anyon(psi: &AnyonState, tol: f64) -> Result<MaximalEntanglement> {
    let [_, _, at, bt, gt] = two_anyon_coefficients(psi)?;
    let bip = Bipartition::new(psi.basis())?;
    let half = DMatrix::from_diagonal(&DVector::from_element(2, C64::new(0.5, 0.0)));
    let mut maximal = true;
    for side in [Side::A, Side::B] {
        let r = partial_trace_pure(psi, &bip, side)?.to_dense();
        maximal &= (r - &half).iter().all(|z| z.norm() <= tol);
    }
    let phase = (maximal && psi.global_charge() == Charge::TAU && gt.norm() <= tol && bt.norm() > tol)
        .then(|| (at / bt).arg().rem_euclid(TAU));
    Ok(MaximalEntanglement { maximal, phase })
}

/// Applies `samples` random local unitaries `U_A ⊗ V_B` (each a pair of
/// independent phases on `{|e⟩, |τ⟩}`) and checks that every coefficient
/// modulus is unchanged within `1e-12`.
pub fn local_unitary_orbit_check(psi: &AnyonState, samples: usize, seed: u64) -> Result<bool> {
    let bip = Bipartition::new(psi.basis())?;
    let moduli: Vec<f64> = psi.amplitudes().iter().map(|z| z.norm()).collect();
    let mut rng = rng_for(seed, 0);
    let mut phases = |basis: &Arc<SectorBasis>| {
        let d = DVector::from_fn(basis.dim(), |_, _| C64::from_polar(1.0, rng.random::<f64>() * TAU));
        BlockOperator::from_dense(basis, &DMatrix::from_diagonal(&d), 0.0)
    };
    for _ in 0..samples {
        let u = embed_local(&phases(bip.side(Side::A))?, &bip, Side::A)?;
        let v = embed_local(&phases(bip.side(Side::B))?, &bip, Side::B)?;
        let out = (&u * &v).apply(psi.amplitudes());
        if out.iter().zip(&moduli).any(|(z, m)| (z.norm() - m).abs() > 1e-12) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::TreeShape;
    use crate::model::fibonacci_model;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn two() -> Bipartition {
        Bipartition::grouped(&Arc::new(fibonacci_model()), 1, 1).unwrap()
    }

    fn state(bip: &Bipartition, terms: &[(&str, C64)]) -> AnyonState {
        AnyonState::from_labels(bip.whole(), terms).unwrap()
    }

    #[test]
    fn spanning_set_sizes() {
        let model = Arc::new(fibonacci_model());
        let one = Arc::new(SectorBasis::new(model.clone(), TreeShape::Leaf(0)).unwrap());
        let obs = local_observable_basis(&one);
        assert_eq!(obs.len(), 2);
        assert_eq!(obs[0].get(0, 0), c(1.0));
        assert_eq!(obs[1].get(1, 1), c(1.0));
        let pair = Arc::new(SectorBasis::new(model, TreeShape::left_comb(2)).unwrap());
        assert_eq!(local_observable_basis(&pair).len(), 13);
    }

    #[test]
    fn paper_examples() {
        let bip = two();
        let h = FRAC_1_SQRT_2;
        let cases = [
            (vec![("e,tau;tau", c(h)), ("tau,tau;tau", c(h))], true),
            (vec![("e,e;e", c(h)), ("tau,tau;e", c(h))], false),
            (vec![("e,e;e", c(1.0))], true),
            (vec![("e,tau;tau", c(h)), ("tau,e;tau", c(h))], false),
        ];
        for (terms, expected) in cases {
            let psi = state(&bip, &terms);
            let report = is_uncorrelated(&psi.density(), &bip, 1e-12).unwrap();
            assert_eq!(report.is_uncorrelated, expected, "{terms:?}");
            let label = classify_pure_2anyon(&psi, 1e-10).unwrap();
            assert_eq!(label.class.is_uncorrelated(), expected);
        }
        let vac = state(&bip, &[("e,e;e", c(1.0))]);
        assert_eq!(is_uncorrelated(&vac.density(), &bip, 1e-12).unwrap().max_violation, 0.0);
    }

    #[test]
    fn classification_labels() {
        let bip = two();
        let s = state(&bip, &[("e,tau;tau", c(0.6)), ("tau,tau;tau", c(0.8))]);
        assert_eq!(classify_pure_2anyon(&s, 1e-10).unwrap().class, PureClass::Class1Tau);
        let s = state(&bip, &[("tau,e;tau", c(0.6)), ("tau,tau;tau", c(0.8))]);
        assert_eq!(classify_pure_2anyon(&s, 1e-10).unwrap().class, PureClass::Class2Tau);
        let s = state(&bip, &[("tau,tau;tau", c(1.0))]);
        assert_eq!(classify_pure_2anyon(&s, 1e-10).unwrap().class, PureClass::Class1Tau);
        let r = 1.0 / 3f64.sqrt();
        let s = state(&bip, &[("tau,e;tau", c(r)), ("e,tau;tau", c(r)), ("tau,tau;tau", c(r))]);
        assert_eq!(classify_pure_2anyon(&s, 1e-10).unwrap().class, PureClass::Entangled);
        assert!(is_uncorrelated(&s.density(), &bip, 1e-8).unwrap().max_violation > 1e-3);
        let s = state(&bip, &[("e,e;e", c(1.0))]);
        assert_eq!(classify_pure_2anyon(&s, 1e-10).unwrap().class, PureClass::ProductEAlpha);
        let s = state(&bip, &[("tau,tau;e", c(1.0))]);
        assert_eq!(classify_pure_2anyon(&s, 1e-10).unwrap().class, PureClass::ProductEBeta);
    }

    #[test]
    fn maximal_entanglement() {
        let bip = two();
        let h = FRAC_1_SQRT_2;
        let s = state(&bip, &[("e,tau;tau", c(h)), ("tau,e;tau", C64::new(0.0, h))]);
        let m = is_maximally_entangled_2anyon(&s, 1e-10).unwrap();
        assert!(m.maximal);
        assert!((m.phase.unwrap() - PI / 2.0).abs() < 1e-12);
        let s = state(&bip, &[("e,e;e", c(h)), ("tau,tau;e", c(h))]);
        let m = is_maximally_entangled_2anyon(&s, 1e-10).unwrap();
        assert!(m.maximal && m.phase.is_none());
        let s = state(&bip, &[("e,tau;tau", c(h)), ("tau,tau;tau", c(h))]);
        assert!(!is_maximally_entangled_2anyon(&s, 1e-10).unwrap().maximal);
    }

    #[test]
    fn orbit_check_on_uncorrelated_states() {
        let bip = two();
        let s = state(&bip, &[("tau,e;tau", c(0.6)), ("tau,tau;tau", c(0.8))]);
        assert!(local_unitary_orbit_check(&s, 100, 1).unwrap());
        let s = state(&bip, &[("e,tau;tau", c(0.6)), ("tau,tau;tau", c(0.8))]);
        assert!(local_unitary_orbit_check(&s, 100, 2).unwrap());
    }

    #[test]
    fn matrix_agrees_with_explicit_evaluation() {
        let bip = two();
        let r = 1.0 / 3f64.sqrt();
        let rho = state(&bip, &[("tau,e;tau", c(r)), ("e,tau;tau", c(r)), ("tau,tau;tau", c(r))]).density();
        let v = violation_matrix(&rho, &bip).unwrap();
        let obs_a = local_observable_basis(bip.side(Side::A));
        let obs_b = local_observable_basis(bip.side(Side::B));
        for (p, oa) in obs_a.iter().enumerate() {
            for (q, ob) in obs_b.iter().enumerate() {
                let direct = correlation_violation(&rho, &bip, oa, ob).unwrap();
                assert!((direct - v[(p, q)]).norm() < 1e-14);
            }
        }
    }
}
