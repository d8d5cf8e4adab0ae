//! F-move recoupling between tree shapes, and adjacent braids.
//!
//! A right rotation at a vertex rewrites `((X Y) Z)` as `(X (Y Z))`:
//!
//! ```text
//! |(a,b)d, c; g⟩ = Σ_f [F^{abc}_g]_{df} |a, (b,c)f; g⟩
//! ```
//!
//! and a left rotation is its inverse, with coefficients `conj([F^{abc}_g]_{df})`.
//! Vertices are addressed by their pre-order index, which a rotation leaves
//! unchanged for the rotated vertex itself.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::fusion::{Labeled, SectorBasis, TreeShape};
use crate::model::AnyonModel;
use crate::state::AnyonState;
use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rotation {
    /// `((X Y) Z) → (X (Y Z))`
    Right,
    /// `(X (Y Z)) → ((X Y) Z)`
    Left,
}

impl Rotation {
    pub fn inverse(self) -> Rotation {
        match self {
            Rotation::Right => Rotation::Left,
            Rotation::Left => Rotation::Right,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BraidDirection {
    CounterClockwise,
    Clockwise,
}

/// Rotates `shape` at pre-order vertex `vertex`.
pub fn rotate_shape(shape: &TreeShape, vertex: usize, rotation: Rotation) -> Result<TreeShape> {
    fn go(s: &TreeShape, vertex: usize, counter: usize, rotation: Rotation) -> Result<TreeShape> {
        let (l, r) = s.children().ok_or_else(|| Error::Shape(format!("vertex {vertex} does not exist")))?;
        if counter == vertex {
            return match (rotation, l, r) {
                (Rotation::Right, TreeShape::Node(x, y), z) => {
                    Ok(TreeShape::node((**x).clone(), TreeShape::node((**y).clone(), z.clone())))
                }
                (Rotation::Left, x, TreeShape::Node(y, z)) => {
                    Ok(TreeShape::node(TreeShape::node(x.clone(), (**y).clone()), (**z).clone()))
                }
                _ => Err(Error::Shape(format!("{rotation:?} rotation not applicable at vertex {vertex} of `{s}`"))),
            };
        }
        let left_end = counter + 1 + l.n_internal();
        if vertex < left_end {
            Ok(TreeShape::node(go(l, vertex, counter + 1, rotation)?, r.clone()))
        } else {
            Ok(TreeShape::node(l.clone(), go(r, vertex, left_end, rotation)?))
        }
    }
    if vertex >= shape.n_internal() {
        return Err(Error::Shape(format!("vertex {vertex} does not exist in `{shape}`")));
    }
    go(shape, vertex, 0, rotation)
}

/// Rewrites one labeled tree; the result is a superposition of labeled trees.
fn rotate_labeled(
    model: &AnyonModel,
    node: &Labeled,
    vertex: usize,
    counter: usize,
    rotation: Rotation,
) -> Vec<(Labeled, C64)> {
    let Labeled::Node(g, l, r) = node else {
        unreachable!("vertex validated against the shape");
    };
    let g = *g;
    if counter == vertex {
        let mut out = Vec::new();
        match (rotation, l.as_ref(), r.as_ref()) {
            (Rotation::Right, Labeled::Node(d, x, y), z) => {
                let (a, b, c) = (x.charge(), y.charge(), z.charge());
                for &f in model.fusion(b, c) {
                    if !model.fuses_to(a, f, g) {
                        continue;
                    }
                    let coeff = model.f_symbol(a, b, c, g, *d, f);
                    if coeff != C64::new(0.0, 0.0) {
                        let inner = Labeled::node(f, (**y).clone(), z.clone());
                        out.push((Labeled::node(g, (**x).clone(), inner), coeff));
                    }
                }
            }
            (Rotation::Left, x, Labeled::Node(f, y, z)) => {
                let (a, b, c) = (x.charge(), y.charge(), z.charge());
                for &d in model.fusion(a, b) {
                    if !model.fuses_to(d, c, g) {
                        continue;
                    }
                    let coeff = model.f_symbol(a, b, c, g, d, *f).conj();
                    if coeff != C64::new(0.0, 0.0) {
                        let inner = Labeled::node(d, x.clone(), (**y).clone());
                        out.push((Labeled::node(g, inner, (**z).clone()), coeff));
                    }
                }
            }
            _ => unreachable!("rotation validated against the shape"),
        }
        return out;
    }
    let (ls, _) = l.flatten();
    let left_end = counter + 1 + ls.n_internal();
    if vertex < left_end {
        rotate_labeled(model, l, vertex, counter + 1, rotation)
            .into_iter()
            .map(|(nl, c)| (Labeled::node(g, nl, (**r).clone()), c))
            .collect()
    } else {
        rotate_labeled(model, r, vertex, left_end, rotation)
            .into_iter()
            .map(|(nr, c)| (Labeled::node(g, (**l).clone(), nr), c))
            .collect()
    }
}

/// A unitary change of basis between two shapes on the same leaves, stored
/// as sparse columns: column `j` lists `(i, U[i, j])`.
#[derive(Clone, Debug)]
pub struct BasisChange {
    source: Arc<SectorBasis>,
    target: Arc<SectorBasis>,
    columns: Vec<Vec<(usize, C64)>>,
}

impl BasisChange {
    pub fn identity(basis: &Arc<SectorBasis>) -> BasisChange {
        BasisChange {
            source: basis.clone(),
            target: basis.clone(),
            columns: (0..basis.dim()).map(|j| vec![(j, C64::new(1.0, 0.0))]).collect(),
        }
    }

    pub fn source(&self) -> &Arc<SectorBasis> {
        &self.source
    }

    pub fn target(&self) -> &Arc<SectorBasis> {
        &self.target
    }

    /// Amplitudes in the source basis to amplitudes in the target basis.
    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        let mut out = DVector::zeros(self.target.dim());
        for (j, col) in self.columns.iter().enumerate() {
            let x = v[j];
            if x == C64::new(0.0, 0.0) {
                continue;
            }
            for &(i, u) in col {
                out[i] += u * x;
            }
        }
        out
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &BasisChange) -> Result<BasisChange> {
        if !self.target.same_as(&next.source) {
            return Err(Error::Shape(format!(
                "cannot compose: `{}` does not feed `{}`",
                self.target.shape(),
                next.source.shape()
            )));
        }
        let columns = self
            .columns
            .iter()
            .map(|col| {
                let mut acc: Vec<C64> = vec![C64::new(0.0, 0.0); next.target.dim()];
                let mut touched = Vec::new();
                for &(k, u) in col {
                    for &(i, w) in &next.columns[k] {
                        if acc[i] == C64::new(0.0, 0.0) {
                            touched.push(i);
                        }
                        acc[i] += w * u;
                    }
                }
                touched.sort_unstable();
                touched.dedup();
                touched.into_iter().map(|i| (i, acc[i])).collect()
            })
            .collect();
        Ok(BasisChange { source: self.source.clone(), target: next.target.clone(), columns })
    }

    /// The conjugate transpose, which is the inverse for a unitary change.
    pub fn inverse(&self) -> BasisChange {
        let mut columns = vec![Vec::new(); self.target.dim()];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, u) in col {
                columns[i].push((j, u.conj()));
            }
        }
        BasisChange { source: self.target.clone(), target: self.source.clone(), columns }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.target.dim(), self.source.dim());
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, u) in col {
                m[(i, j)] += u;
            }
        }
        m
    }

    /// `‖U†U − I‖_max`.
    pub fn unitarity_residual(&self) -> f64 {
        let u = self.to_dense();
        let d = u.adjoint() * &u - DMatrix::identity(u.ncols(), u.ncols());
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// True when no entry couples different global charges.
    pub fn is_block_diagonal(&self) -> bool {
        self.columns
            .iter()
            .enumerate()
            .all(|(j, col)| col.iter().all(|&(i, _)| self.target.charge_of(i) == self.source.charge_of(j)))
    }

    /// The 2×2 (or smaller) block of the change restricted to given rows and columns.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> DMatrix<C64> {
        let dense = self.to_dense();
        DMatrix::from_fn(rows.len(), cols.len(), |i, j| dense[(rows[i], cols[j])])
    }
}

/// One rotation of `basis`'s shape, as a change of basis.
pub fn elementary_fmove(basis: &Arc<SectorBasis>, vertex: usize, rotation: Rotation) -> Result<BasisChange> {
    let target_shape = rotate_shape(basis.shape(), vertex, rotation)?;
    let target = Arc::new(SectorBasis::new(basis.model().clone(), target_shape)?);
    fmove_into(basis, &target, vertex, rotation)
}

fn fmove_into(
    source: &Arc<SectorBasis>,
    target: &Arc<SectorBasis>,
    vertex: usize,
    rotation: Rotation,
) -> Result<BasisChange> {
    let model = source.model();
    let columns = source
        .trees()
        .iter()
        .map(|t| {
            let lab = Labeled::decorate(source.shape(), t);
            rotate_labeled(model, &lab, vertex, 0, rotation)
                .into_iter()
                .map(|(new, c)| {
                    let (_, tree) = new.flatten();
                    let i = target.lookup(&tree).ok_or_else(|| {
                        Error::Fusion(format!("rotation produced a labeling absent from `{}`", target.shape()))
                    })?;
                    Ok((i, c))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BasisChange { source: source.clone(), target: target.clone(), columns })
}

/// Rotations that turn `shape` into the left comb on the same leaves.
fn path_to_left_comb(shape: &TreeShape) -> Vec<(usize, Rotation)> {
    fn first_right_internal(s: &TreeShape, counter: &mut usize) -> Option<usize> {
        let (l, r) = s.children()?;
        let here = *counter;
        if !r.is_leaf() {
            return Some(here);
        }
        *counter += 1;
        first_right_internal(l, counter)
    }
    let mut moves = Vec::new();
    let mut current = shape.clone();
    while let Some(v) = first_right_internal(&current, &mut 0) {
        current = rotate_shape(&current, v, Rotation::Left).expect("right child is internal");
        moves.push((v, Rotation::Left));
    }
    moves
}

/// A rotation sequence from `from` to `to`, routed through the left comb.
pub fn rotation_path(from: &TreeShape, to: &TreeShape) -> Result<Vec<(usize, Rotation)>> {
    if from.n_leaves() != to.n_leaves() {
        return Err(Error::Shape(format!(
            "shapes `{from}` and `{to}` have {} and {} leaves",
            from.n_leaves(),
            to.n_leaves()
        )));
    }
    let mut moves = path_to_left_comb(from);
    moves.extend(path_to_left_comb(to).into_iter().rev().map(|(v, r)| (v, r.inverse())));
    Ok(moves)
}

/// Composes elementary moves along `moves` starting from `basis`.
pub fn change_along(basis: &Arc<SectorBasis>, moves: &[(usize, Rotation)]) -> Result<BasisChange> {
    let mut total = BasisChange::identity(basis);
    for &(v, r) in moves {
        let step = elementary_fmove(total.target(), v, r)?;
        total = total.then(&step)?;
    }
    Ok(total)
}

/// The change of basis from `basis` to the basis of `target`.
pub fn shape_change(basis: &Arc<SectorBasis>, target: &TreeShape) -> Result<BasisChange> {
    change_along(basis, &rotation_path(basis.shape(), target)?)
}

/// Re-expresses `state` in the basis of `target`, applying one move at a time.
pub fn change_shape(state: &AnyonState, target: &TreeShape) -> Result<AnyonState> {
    let moves = rotation_path(state.basis().shape(), target)?;
    let mut basis = state.basis().clone();
    let mut amps = state.amplitudes().clone();
    for (v, r) in moves {
        let step = elementary_fmove(&basis, v, r)?;
        amps = step.apply(&amps);
        basis = step.target().clone();
    }
    AnyonState::from_amplitudes(basis, amps)
}

/// Exchanges leaves `leaf` and `leaf + 1`, which must meet at a common vertex.
///
/// Counterclockwise exchange multiplies `|a,b;c⟩` by `R^{ab}_c` and swaps the
/// labels; clockwise is its inverse.
pub fn braid_adjacent(state: &AnyonState, leaf: usize, direction: BraidDirection) -> Result<AnyonState> {
    let basis = state.basis();
    let vertex = basis.shape().vertex_of_leaf_pair(leaf).ok_or_else(|| {
        Error::Shape(format!("leaves {leaf} and {} do not meet at a vertex of `{}`", leaf + 1, basis.shape()))
    })?;
    let model = basis.model();
    let mut out = DVector::zeros(basis.dim());
    for (j, tree) in basis.trees().iter().enumerate() {
        let x = state.amplitudes()[j];
        if x == C64::new(0.0, 0.0) {
            continue;
        }
        let (a, b, c) = (tree.leaves[leaf], tree.leaves[leaf + 1], tree.internal[vertex]);
        let phase = match direction {
            BraidDirection::CounterClockwise => model.r_symbol(a, b, c),
            BraidDirection::Clockwise => model.r_symbol(b, a, c).conj(),
        };
        let mut swapped = tree.clone();
        swapped.leaves.swap(leaf, leaf + 1);
        let i = basis.index_of(&swapped)?;
        out[i] += phase * x;
    }
    AnyonState::from_amplitudes(basis.clone(), out)
}
