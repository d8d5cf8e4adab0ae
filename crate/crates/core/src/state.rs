//! States and operators under the charge superselection rule.
//!
//! [`AnyonState`] is confined to one global-charge sector; [`BlockOperator`]
//! stores one dense block per sector, so cross-sector entries are
//! unrepresentable. Bipartite operations work on shapes whose root joins a
//! party-A subtree (leading leaves) to a party-B subtree (trailing leaves).

use std::collections::HashMap;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::fusion::{FusionTree, SectorBasis, TreeShape};
use crate::model::Charge;
use crate::{Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

/// A pure state with support in a single global-charge sector.
#[derive(Clone, Debug)]
pub struct AnyonState {
    basis: Arc<SectorBasis>,
    amplitudes: DVector<C64>,
    sector: usize,
}

impl AnyonState {
    /// The basis vector for `tree`.
    pub fn ket(basis: &Arc<SectorBasis>, tree: &FusionTree) -> Result<AnyonState> {
        let i = basis.index_of(tree)?;
        Ok(Self::basis_vector(basis, i))
    }

    pub fn basis_vector(basis: &Arc<SectorBasis>, i: usize) -> AnyonState {
        let mut amplitudes = DVector::zeros(basis.dim());
        amplitudes[i] = C64::new(1.0, 0.0);
        AnyonState { basis: basis.clone(), amplitudes, sector: basis.sector_index_of(i) }
    }

    /// Wraps raw amplitudes, rejecting support in more than one sector.
    /// The all-zero vector is assigned to the first sector.
    pub fn from_amplitudes(basis: Arc<SectorBasis>, amplitudes: DVector<C64>) -> Result<AnyonState> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::Domain(format!(
                "{} amplitudes given for a basis of dimension {}",
                amplitudes.len(),
                basis.dim()
            )));
        }
        let mut sector = None;
        for (i, z) in amplitudes.iter().enumerate() {
            if *z == ZERO {
                continue;
            }
            let s = basis.sector_index_of(i);
            match sector {
                None => sector = Some(s),
                Some(prev) if prev != s => {
                    return Err(Error::Cssr(format!(
                        "amplitudes span global charges `{}` and `{}`",
                        basis.model().label(basis.sectors()[prev].charge),
                        basis.model().label(basis.sectors()[s].charge)
                    )))
                }
                _ => {}
            }
        }
        Ok(AnyonState { basis, amplitudes, sector: sector.unwrap_or(0) })
    }

    /// Normalized linear combination of states in one sector; also returns
    /// the norm of the unnormalized sum.
    pub fn superpose(terms: &[(C64, &AnyonState)]) -> Result<(AnyonState, f64)> {
        let (_, first) = terms.first().ok_or_else(|| Error::Domain("empty superposition".into()))?;
        let basis = first.basis.clone();
        let mut amps = DVector::zeros(basis.dim());
        for (w, s) in terms {
            if !s.basis.same_as(&basis) {
                return Err(Error::Domain("superposed states live in different bases".into()));
            }
            if s.sector != first.sector && s.norm() > 0.0 {
                return Err(Error::Cssr(format!(
                    "cannot superpose global charges `{}` and `{}`",
                    basis.model().label(first.global_charge()),
                    basis.model().label(s.global_charge())
                )));
            }
            amps += &s.amplitudes * *w;
        }
        let norm = amps.norm();
        if norm == 0.0 {
            return Err(Error::Domain("superposition vanishes".into()));
        }
        amps /= C64::new(norm, 0.0);
        Ok((AnyonState { basis, amplitudes: amps, sector: first.sector }, norm))
    }

    /// Builds a state from `(label, amplitude)` pairs and normalizes it.
    pub fn from_labels(basis: &Arc<SectorBasis>, terms: &[(&str, C64)]) -> Result<AnyonState> {
        let mut amps = DVector::zeros(basis.dim());
        for (label, w) in terms {
            let tree = basis.parse_tree(label)?;
            amps[basis.index_of(&tree)?] += *w;
        }
        let state = AnyonState::from_amplitudes(basis.clone(), amps)?;
        state.normalized()
    }

    pub fn normalized(&self) -> Result<AnyonState> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::Domain("cannot normalize the zero vector".into()));
        }
        Ok(AnyonState { amplitudes: &self.amplitudes / C64::new(n, 0.0), ..self.clone() })
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, tree: &FusionTree) -> Result<C64> {
        Ok(self.amplitudes[self.basis.index_of(tree)?])
    }

    pub fn global_charge(&self) -> Charge {
        self.basis.sectors()[self.sector].charge
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    pub fn inner(&self, other: &AnyonState) -> Result<C64> {
        if !self.basis.same_as(&other.basis) {
            return Err(Error::Domain("inner product across different bases".into()));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> BlockOperator {
        let mut op = BlockOperator::zeros(&self.basis);
        let range = self.basis.sectors()[self.sector].range.clone();
        let v = self.amplitudes.rows(range.start, range.len());
        op.blocks[self.sector] = v * v.adjoint();
        op
    }
}

/// Joins two states under a new root with charge `channel`. The result lives
/// in the shape `(left right)`, with the right leaves renumbered after the left.
pub fn compose_states(left: &AnyonState, right: &AnyonState, channel: Charge) -> Result<AnyonState> {
    let model = left.basis.model();
    if !Arc::ptr_eq(model, right.basis.model()) && **model != **right.basis.model() {
        return Err(Error::Domain("composed states use different models".into()));
    }
    if !model.contains(channel) {
        return Err(Error::unknown_charge(channel));
    }
    let (gl, gr) = (left.global_charge(), right.global_charge());
    if !model.fuses_to(gl, gr, channel) {
        return Err(Error::Fusion(format!(
            "`{}` is not an outcome of {} × {}",
            model.label(channel),
            model.label(gl),
            model.label(gr)
        )));
    }
    let shape = TreeShape::join(left.basis.shape(), right.basis.shape());
    let basis = Arc::new(SectorBasis::new(model.clone(), shape)?);
    let mut amps = DVector::zeros(basis.dim());
    for (i, lt) in left.basis.trees().iter().enumerate() {
        let x = left.amplitudes[i];
        if x == ZERO {
            continue;
        }
        for (j, rt) in right.basis.trees().iter().enumerate() {
            let y = right.amplitudes[j];
            if y != ZERO {
                amps[basis.index_of(&FusionTree::join(lt, rt, channel))?] = x * y;
            }
        }
    }
    AnyonState::from_amplitudes(basis, amps)
}

/// An operator that is block diagonal in global charge.
#[derive(Clone, Debug)]
pub struct BlockOperator {
    basis: Arc<SectorBasis>,
    blocks: Vec<DMatrix<C64>>,
}

impl BlockOperator {
    pub fn zeros(basis: &Arc<SectorBasis>) -> BlockOperator {
        let blocks = basis.sectors().iter().map(|s| DMatrix::zeros(s.dim(), s.dim())).collect();
        BlockOperator { basis: basis.clone(), blocks }
    }

    pub fn identity(basis: &Arc<SectorBasis>) -> BlockOperator {
        let blocks = basis.sectors().iter().map(|s| DMatrix::identity(s.dim(), s.dim())).collect();
        BlockOperator { basis: basis.clone(), blocks }
    }

    /// One block per non-empty sector, in sector order.
    pub fn from_blocks(basis: &Arc<SectorBasis>, blocks: Vec<DMatrix<C64>>) -> Result<BlockOperator> {
        let sectors = basis.sectors();
        if blocks.len() != sectors.len() || blocks.iter().zip(sectors).any(|(b, s)| b.shape() != (s.dim(), s.dim())) {
            return Err(Error::Domain("block sizes do not match the sector dimensions".into()));
        }
        Ok(BlockOperator { basis: basis.clone(), blocks })
    }

    /// Imports a dense matrix, failing if any cross-sector entry exceeds `tol`.
    pub fn from_dense(basis: &Arc<SectorBasis>, m: &DMatrix<C64>, tol: f64) -> Result<BlockOperator> {
        if m.shape() != (basis.dim(), basis.dim()) {
            return Err(Error::Domain(format!("matrix is {:?}, basis has dimension {}", m.shape(), basis.dim())));
        }
        if let Some((i, j)) = cross_sector_entry(basis, m, tol) {
            return Err(Error::Cssr(format!("entry ({i}, {j}) couples `{}` and `{}`", basis.label(i), basis.label(j))));
        }
        let blocks = basis
            .sectors()
            .iter()
            .map(|s| m.view((s.range.start, s.range.start), (s.dim(), s.dim())).into_owned())
            .collect();
        Ok(BlockOperator { basis: basis.clone(), blocks })
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.basis.dim(), self.basis.dim());
        for (s, b) in self.basis.sectors().iter().zip(&self.blocks) {
            m.view_mut((s.range.start, s.range.start), (s.dim(), s.dim())).copy_from(b);
        }
        m
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn blocks(&self) -> &[DMatrix<C64>] {
        &self.blocks
    }

    pub fn block_mut(&mut self, sector: usize) -> &mut DMatrix<C64> {
        &mut self.blocks[sector]
    }

    /// `⟨i|O|j⟩`; zero across sectors.
    pub fn get(&self, i: usize, j: usize) -> C64 {
        let (si, sj) = (self.basis.sector_index_of(i), self.basis.sector_index_of(j));
        if si != sj {
            return ZERO;
        }
        let start = self.basis.sectors()[si].range.start;
        self.blocks[si][(i - start, j - start)]
    }

    /// Adds `value` at `(i, j)`; cross-sector targets are rejected.
    pub fn add_entry(&mut self, i: usize, j: usize, value: C64) -> Result<()> {
        let (si, sj) = (self.basis.sector_index_of(i), self.basis.sector_index_of(j));
        if si != sj {
            return Err(Error::Cssr(format!("entry couples `{}` and `{}`", self.basis.label(i), self.basis.label(j))));
        }
        let start = self.basis.sectors()[si].range.start;
        self.blocks[si][(i - start, j - start)] += value;
        Ok(())
    }

    pub fn adjoint(&self) -> BlockOperator {
        self.map_blocks(|b| b.adjoint())
    }

    pub fn scale(&self, c: C64) -> BlockOperator {
        self.map_blocks(|b| b * c)
    }

    fn map_blocks(&self, f: impl Fn(&DMatrix<C64>) -> DMatrix<C64>) -> BlockOperator {
        BlockOperator { basis: self.basis.clone(), blocks: self.blocks.iter().map(f).collect() }
    }

    fn zip_blocks(
        &self,
        other: &BlockOperator,
        f: impl Fn(&DMatrix<C64>, &DMatrix<C64>) -> DMatrix<C64>,
    ) -> BlockOperator {
        assert!(self.basis.same_as(&other.basis), "operators act on different bases");
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect();
        BlockOperator { basis: self.basis.clone(), blocks }
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        let mut out = DVector::zeros(v.len());
        for (s, b) in self.basis.sectors().iter().zip(&self.blocks) {
            let r = s.range.clone();
            out.rows_mut(r.start, r.len()).copy_from(&(b * v.rows(r.start, r.len())));
        }
        out
    }

    /// `O X O†`.
    pub fn conjugate(&self, x: &BlockOperator) -> BlockOperator {
        self.zip_blocks(x, |o, x| o * x * o.adjoint())
    }

    /// Largest `|O_ij − conj(O_ji)|`.
    pub fn hermiticity_residual(&self) -> f64 {
        self.blocks.iter().map(|b| max_abs(&(b - b.adjoint()))).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().map(max_abs).fold(0.0, f64::max)
    }

    /// Checks self-adjointness, trace one and positivity within `tol`.
    pub fn validate_density(&self, tol: f64) -> Result<()> {
        let h = self.hermiticity_residual();
        if h > tol {
            return Err(Error::NotDensity(format!("not self-adjoint (residual {h:e})")));
        }
        let t = trace(self);
        if (t - C64::new(1.0, 0.0)).norm() > tol {
            return Err(Error::NotDensity(format!("trace is {t}, expected 1")));
        }
        if let Some(&min) = spectrum(self).last() {
            if min < -tol {
                return Err(Error::NotDensity(format!("negative eigenvalue {min:e}")));
            }
        }
        Ok(())
    }
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

impl Mul for &BlockOperator {
    type Output = BlockOperator;
    fn mul(self, rhs: &BlockOperator) -> BlockOperator {
        self.zip_blocks(rhs, |a, b| a * b)
    }
}

impl Add for &BlockOperator {
    type Output = BlockOperator;
    fn add(self, rhs: &BlockOperator) -> BlockOperator {
        self.zip_blocks(rhs, |a, b| a + b)
    }
}

impl Sub for &BlockOperator {
    type Output = BlockOperator;
    fn sub(self, rhs: &BlockOperator) -> BlockOperator {
        self.zip_blocks(rhs, |a, b| a - b)
    }
}

fn cross_sector_entry(basis: &SectorBasis, m: &DMatrix<C64>, tol: f64) -> Option<(usize, usize)> {
    (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
        .find(|&(i, j)| basis.sector_index_of(i) != basis.sector_index_of(j) && m[(i, j)].norm() > tol)
}

/// True iff every entry of `m` coupling different global charges is within `tol` of zero.
pub fn validate_cssr(basis: &SectorBasis, m: &DMatrix<C64>, tol: f64) -> bool {
    m.shape() == (basis.dim(), basis.dim()) && cross_sector_entry(basis, m, tol).is_none()
}

pub fn trace(op: &BlockOperator) -> C64 {
    op.blocks.iter().map(|b| b.trace()).sum()
}

/// `Tr(X Y)` without forming the product.
pub fn trace_product(x: &BlockOperator, y: &BlockOperator) -> C64 {
    assert!(x.basis.same_as(&y.basis), "operators act on different bases");
    x.blocks
        .iter()
        .zip(&y.blocks)
        .map(|(a, b)| a.iter().zip(b.transpose().iter()).map(|(p, q)| p * q).sum::<C64>())
        .sum()
}

/// `Tr(ρ²)`.
pub fn purity(rho: &BlockOperator) -> f64 {
    trace_product(rho, rho).re
}

/// Eigenvalues of the Hermitian part of `rho`, all sectors merged, descending.
pub fn spectrum(rho: &BlockOperator) -> Vec<f64> {
    let mut out: Vec<f64> = rho
        .blocks
        .iter()
        .filter(|b| !b.is_empty())
        .flat_map(|b| {
            let h = (b + b.adjoint()) * C64::new(0.5, 0.0);
            h.symmetric_eigenvalues().iter().copied().collect::<Vec<_>>()
        })
        .collect();
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn fidelity(psi: &AnyonState, rho: &BlockOperator) -> Result<f64> {
    if !psi.basis.same_as(&rho.basis) {
        return Err(Error::Domain(format!(
            "state lives on `{}` but operator on `{}`",
            psi.basis.shape(),
            rho.basis.shape()
        )));
    }
    Ok(psi.amplitudes.dotc(&rho.apply(&psi.amplitudes)).re)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

/// The split of a shape `(A-subtree B-subtree)` into its two parties.
#[derive(Debug)]
pub struct Bipartition {
    whole: Arc<SectorBasis>,
    a: Arc<SectorBasis>,
    b: Arc<SectorBasis>,
    /// `(index in A, index in B)` for every whole-basis index.
    parts: Vec<(usize, usize)>,
    /// Whole indices grouped by (sector, B index), for operations on side A.
    groups_a: Vec<Vec<usize>>,
    /// Whole indices grouped by (sector, A index), for operations on side B.
    groups_b: Vec<Vec<usize>>,
}

impl Bipartition {
    pub fn new(whole: &Arc<SectorBasis>) -> Result<Bipartition> {
        let (ls, rs) =
            whole.shape().children().ok_or_else(|| Error::Shape("a single anyon cannot be bipartitioned".into()))?;
        let n_left = ls.n_leaves();
        let model = whole.model().clone();
        let a = Arc::new(SectorBasis::new(model.clone(), ls.clone())?);
        let b = Arc::new(SectorBasis::new(model, rs.shifted(-(n_left as isize)))?);
        let parts: Vec<(usize, usize)> = whole
            .trees()
            .iter()
            .map(|t| {
                let (lt, rt) = t.split(n_left);
                (a.lookup(&lt).expect("subtree of a valid tree"), b.lookup(&rt).expect("subtree of a valid tree"))
            })
            .collect();
        let group = |key: &dyn Fn(usize) -> (usize, usize)| {
            let mut map: HashMap<(usize, usize), usize> = HashMap::new();
            let mut groups: Vec<Vec<usize>> = Vec::new();
            for i in 0..whole.dim() {
                let slot = *map.entry(key(i)).or_insert_with(|| {
                    groups.push(Vec::new());
                    groups.len() - 1
                });
                groups[slot].push(i);
            }
            groups
        };
        let groups_a = group(&|i| (whole.sector_index_of(i), parts[i].1));
        let groups_b = group(&|i| (whole.sector_index_of(i), parts[i].0));
        Ok(Bipartition { whole: whole.clone(), a, b, parts, groups_a, groups_b })
    }

    /// Splits the grouped shape of `n_a` + `n_b` anyons.
    pub fn grouped(model: &Arc<crate::AnyonModel>, n_a: usize, n_b: usize) -> Result<Bipartition> {
        let whole = Arc::new(SectorBasis::new(model.clone(), TreeShape::grouped(n_a, n_b))?);
        Bipartition::new(&whole)
    }

    pub fn whole(&self) -> &Arc<SectorBasis> {
        &self.whole
    }

    pub fn side(&self, side: Side) -> &Arc<SectorBasis> {
        match side {
            Side::A => &self.a,
            Side::B => &self.b,
        }
    }

    /// `(index in A, index in B)` of whole-basis index `i`.
    pub fn parts(&self, i: usize) -> (usize, usize) {
        self.parts[i]
    }

    fn local(&self, i: usize, side: Side) -> usize {
        match side {
            Side::A => self.parts[i].0,
            Side::B => self.parts[i].1,
        }
    }

    /// Whole indices that agree on global charge and on the other party's labeling.
    fn groups(&self, acting: Side) -> &[Vec<usize>] {
        match acting {
            Side::A => &self.groups_a,
            Side::B => &self.groups_b,
        }
    }

    fn check_local(&self, op: &BlockOperator, side: Side) -> Result<()> {
        if !op.basis.same_as(self.side(side)) {
            return Err(Error::Shape(format!(
                "operator acts on `{}`, party {side:?} has shape `{}`",
                op.basis.shape(),
                self.side(side).shape()
            )));
        }
        Ok(())
    }

    fn check_whole(&self, basis: &SectorBasis) -> Result<()> {
        if !basis.same_as(&self.whole) {
            return Err(Error::Shape(format!(
                "shape `{}` is not the bipartite shape `{}`; recouple first",
                basis.shape(),
                self.whole.shape()
            )));
        }
        Ok(())
    }

    /// `(O ⊗ 1) |ψ⟩` in the anyonic sense, without forming the embedded matrix.
    pub fn apply_local(&self, op: &BlockOperator, side: Side, v: &DVector<C64>) -> Result<DVector<C64>> {
        self.check_local(op, side)?;
        let mut out = DVector::zeros(self.whole.dim());
        for group in self.groups(side) {
            for &i in group {
                let li = self.local(i, side);
                let mut acc = ZERO;
                for &j in group {
                    acc += op.get(li, self.local(j, side)) * v[j];
                }
                out[i] = acc;
            }
        }
        Ok(out)
    }

    /// `(|u⟩⟨u| ⊗ 1) v` for a vector `u` on one party, which may span several
    /// sectors of that party (no superselection check is made).
    pub fn project_local(&self, u: &DVector<C64>, side: Side, v: &DVector<C64>) -> DVector<C64> {
        let mut out = DVector::zeros(self.whole.dim());
        for group in self.groups(side) {
            let overlap: C64 = group.iter().map(|&j| u[self.local(j, side)].conj() * v[j]).sum();
            if overlap == ZERO {
                continue;
            }
            for &i in group {
                out[i] = u[self.local(i, side)] * overlap;
            }
        }
        out
    }

    fn reduce(&self, traced: Side, mut entry: impl FnMut(usize, usize) -> C64) -> BlockOperator {
        let kept = traced.other();
        let basis = self.side(kept).clone();
        let mut out = BlockOperator::zeros(&basis);
        // Pairs surviving the trace share the traced labeling and global charge.
        for group in self.groups(kept) {
            for &i in group {
                let ki = self.local(i, kept);
                for &j in group {
                    let kj = self.local(j, kept);
                    if basis.sector_index_of(ki) == basis.sector_index_of(kj) {
                        let x = entry(i, j);
                        if x != ZERO {
                            out.add_entry(ki, kj, x).expect("same sector");
                        }
                    }
                }
            }
        }
        out
    }
}

/// Extends an operator on one party to the whole system: `⟨i|O|j⟩` becomes
/// the sum over every labeling of the other party and every global charge.
pub fn embed_local(op: &BlockOperator, bipartition: &Bipartition, side: Side) -> Result<BlockOperator> {
    bipartition.check_local(op, side)?;
    let whole = &bipartition.whole;
    let mut out = BlockOperator::zeros(whole);
    for group in bipartition.groups(side) {
        for &i in group {
            for &j in group {
                let x = op.get(bipartition.local(i, side), bipartition.local(j, side));
                if x != ZERO {
                    out.add_entry(i, j, x)?;
                }
            }
        }
    }
    Ok(out)
}

/// Traces out `traced`, keeping only pairs with identical traced labelings
/// and identical kept-subtree root charges.
pub fn partial_trace(rho: &BlockOperator, bipartition: &Bipartition, traced: Side) -> Result<BlockOperator> {
    bipartition.check_whole(&rho.basis)?;
    Ok(bipartition.reduce(traced, |i, j| rho.get(i, j)))
}

/// [`partial_trace`] of `|ψ⟩⟨ψ|` (unnormalized `ψ` allowed).
pub fn partial_trace_pure(psi: &AnyonState, bipartition: &Bipartition, traced: Side) -> Result<BlockOperator> {
    partial_trace_vector(psi.amplitudes(), psi.basis(), bipartition, traced)
}

/// [`partial_trace`] of `|v⟩⟨v|` for a raw amplitude vector over `basis`.
pub fn partial_trace_vector(
    v: &DVector<C64>,
    basis: &SectorBasis,
    bipartition: &Bipartition,
    traced: Side,
) -> Result<BlockOperator> {
    bipartition.check_whole(basis)?;
    Ok(bipartition.reduce(traced, |i, j| v[i] * v[j].conj()))
}
