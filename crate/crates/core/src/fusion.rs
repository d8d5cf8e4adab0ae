//! Fusion-tree bases.
//!
//! A [`TreeShape`] fixes the order in which N anyons are fused; a
//! [`FusionTree`] labels every edge of that shape with a charge. The
//! fusion-consistent labelings of a shape form an orthonormal basis, which
//! [`SectorBasis`] enumerates and groups by global (root) charge.
//!
//! Internal charges are stored in pre-order (parent before left subtree
//! before right subtree), so `internal[0]` is always the root.

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use crate::model::{AnyonModel, Charge};
use crate::{Error, Result};

/// Binary fusion order over leaves `0..n`, which appear left to right in
/// physical order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TreeShape {
    Leaf(usize),
    Node(Box<TreeShape>, Box<TreeShape>),
}

impl TreeShape {
    pub fn node(left: TreeShape, right: TreeShape) -> TreeShape {
        TreeShape::Node(Box::new(left), Box::new(right))
    }

    /// `(((0 1) 2) 3)…` on `n` leaves.
    pub fn left_comb(n: usize) -> TreeShape {
        Self::left_comb_from(0, n)
    }

    fn left_comb_from(start: usize, n: usize) -> TreeShape {
        assert!(n >= 1, "a shape needs at least one leaf");
        (start + 1..start + n).fold(TreeShape::Leaf(start), |acc, i| TreeShape::node(acc, TreeShape::Leaf(i)))
    }

    /// `(0 (1 (2 3)))…` on `n` leaves.
    pub fn right_comb(n: usize) -> TreeShape {
        assert!(n >= 1, "a shape needs at least one leaf");
        (0..n - 1).rev().fold(TreeShape::Leaf(n - 1), |acc, i| TreeShape::node(TreeShape::Leaf(i), acc))
    }

    /// Two left combs of `n_a` and `n_b` leaves joined at the root.
    pub fn grouped(n_a: usize, n_b: usize) -> TreeShape {
        TreeShape::node(Self::left_comb_from(0, n_a), Self::left_comb_from(n_a, n_b))
    }

    /// Joins two shapes at a new root, renumbering the right one after the left.
    pub fn join(left: &TreeShape, right: &TreeShape) -> TreeShape {
        TreeShape::node(left.clone(), right.shifted(left.n_leaves() as isize))
    }

    pub fn shifted(&self, by: isize) -> TreeShape {
        match self {
            TreeShape::Leaf(i) => TreeShape::Leaf((*i as isize + by) as usize),
            TreeShape::Node(l, r) => TreeShape::node(l.shifted(by), r.shifted(by)),
        }
    }

    pub fn n_leaves(&self) -> usize {
        match self {
            TreeShape::Leaf(_) => 1,
            TreeShape::Node(l, r) => l.n_leaves() + r.n_leaves(),
        }
    }

    pub fn n_internal(&self) -> usize {
        self.n_leaves() - 1
    }

    pub fn first_leaf(&self) -> usize {
        match self {
            TreeShape::Leaf(i) => *i,
            TreeShape::Node(l, _) => l.first_leaf(),
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, TreeShape::Leaf(_))
    }

    /// The two subtrees under the root, if any.
    pub fn children(&self) -> Option<(&TreeShape, &TreeShape)> {
        match self {
            TreeShape::Leaf(_) => None,
            TreeShape::Node(l, r) => Some((l, r)),
        }
    }

    /// Every shape on `n` leaves (Catalan-many).
    pub fn all(n: usize) -> Vec<TreeShape> {
        Self::all_from(0, n)
    }

    fn all_from(start: usize, n: usize) -> Vec<TreeShape> {
        if n == 1 {
            return vec![TreeShape::Leaf(start)];
        }
        let mut out = Vec::new();
        for k in 1..n {
            for l in Self::all_from(start, k) {
                for r in Self::all_from(start + k, n - k) {
                    out.push(TreeShape::node(l.clone(), r));
                }
            }
        }
        out
    }

    /// Pre-order index of the internal node whose children are exactly the
    /// leaves `i` and `i + 1`.
    pub fn vertex_of_leaf_pair(&self, i: usize) -> Option<usize> {
        fn walk(s: &TreeShape, i: usize, counter: &mut usize) -> Option<usize> {
            match s {
                TreeShape::Leaf(_) => None,
                TreeShape::Node(l, r) => {
                    let here = *counter;
                    *counter += 1;
                    if let (TreeShape::Leaf(a), TreeShape::Leaf(b)) = (l.as_ref(), r.as_ref()) {
                        if *a == i && *b == i + 1 {
                            return Some(here);
                        }
                    }
                    walk(l, i, counter).or_else(|| walk(r, i, counter))
                }
            }
        }
        walk(self, i, &mut 0)
    }

    /// Parses the canonical nested-parenthesis form, e.g. `((0 1)((2 3)(4 5)))`.
    pub fn parse(text: &str) -> Result<TreeShape> {
        let tokens = tokenize_shape(text)?;
        let mut pos = 0;
        let shape = parse_shape_tokens(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::Shape(format!("trailing input in shape `{text}`")));
        }
        shape.check_leaf_order()?;
        Ok(shape)
    }

    /// Leaves must read `0, 1, …, n-1` from left to right.
    pub fn check_leaf_order(&self) -> Result<()> {
        fn collect(s: &TreeShape, out: &mut Vec<usize>) {
            match s {
                TreeShape::Leaf(i) => out.push(*i),
                TreeShape::Node(l, r) => {
                    collect(l, out);
                    collect(r, out);
                }
            }
        }
        let mut leaves = Vec::new();
        collect(self, &mut leaves);
        if leaves.iter().enumerate().any(|(k, &i)| k != i) {
            return Err(Error::Shape(format!("leaves of `{self}` are not in order 0..{}", leaves.len())));
        }
        Ok(())
    }
}

#[derive(Debug, PartialEq)]
enum ShapeToken {
    Open,
    Close,
    Num(usize),
}

fn tokenize_shape(text: &str) -> Result<Vec<ShapeToken>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '(' => {
                out.push(ShapeToken::Open);
                chars.next();
            }
            ')' => {
                out.push(ShapeToken::Close);
                chars.next();
            }
            c if c.is_whitespace() || c == ',' => {
                chars.next();
            }
            c if c.is_ascii_digit() => {
                let mut n = 0usize;
                while let Some(&d) = chars.peek() {
                    match d.to_digit(10) {
                        Some(v) => {
                            n = n * 10 + v as usize;
                            chars.next();
                        }
                        None => break,
                    }
                }
                out.push(ShapeToken::Num(n));
            }
            other => return Err(Error::Shape(format!("unexpected character `{other}` in shape `{text}`"))),
        }
    }
    Ok(out)
}

fn parse_shape_tokens(tokens: &[ShapeToken], pos: &mut usize) -> Result<TreeShape> {
    match tokens.get(*pos) {
        Some(ShapeToken::Num(i)) => {
            *pos += 1;
            Ok(TreeShape::Leaf(*i))
        }
        Some(ShapeToken::Open) => {
            *pos += 1;
            let left = parse_shape_tokens(tokens, pos)?;
            let right = parse_shape_tokens(tokens, pos)?;
            if tokens.get(*pos) != Some(&ShapeToken::Close) {
                return Err(Error::Shape("every fusion vertex must have exactly two children".into()));
            }
            *pos += 1;
            Ok(TreeShape::node(left, right))
        }
        _ => Err(Error::Shape("unbalanced parentheses in shape".into())),
    }
}

impl fmt::Display for TreeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeShape::Leaf(i) => write!(f, "{i}"),
            TreeShape::Node(l, r) => {
                let sep = if l.is_leaf() || r.is_leaf() { " " } else { "" };
                write!(f, "({l}{sep}{r})")
            }
        }
    }
}

/// One labeling of a shape: a basis vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FusionTree {
    pub leaves: Vec<Charge>,
    /// Pre-order internal-node charges; `internal[0]` is the root.
    pub internal: Vec<Charge>,
}

impl FusionTree {
    pub fn new(leaves: Vec<Charge>, internal: Vec<Charge>) -> Self {
        Self { leaves, internal }
    }

    pub fn global_charge(&self) -> Charge {
        self.internal.first().copied().unwrap_or(self.leaves[0])
    }

    /// Joins two trees under a new root with charge `root`.
    pub fn join(left: &FusionTree, right: &FusionTree, root: Charge) -> FusionTree {
        let mut leaves = left.leaves.clone();
        leaves.extend_from_slice(&right.leaves);
        let mut internal = Vec::with_capacity(left.internal.len() + right.internal.len() + 1);
        internal.push(root);
        internal.extend_from_slice(&left.internal);
        internal.extend_from_slice(&right.internal);
        FusionTree { leaves, internal }
    }

    /// Splits a tree whose root joins a left subtree with `n_left` leaves.
    pub fn split(&self, n_left: usize) -> (FusionTree, FusionTree) {
        let left = FusionTree { leaves: self.leaves[..n_left].to_vec(), internal: self.internal[1..n_left].to_vec() };
        let right = FusionTree { leaves: self.leaves[n_left..].to_vec(), internal: self.internal[n_left..].to_vec() };
        (left, right)
    }
}

/// A labeled tree with explicit structure, used for vertex-local rewrites.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Labeled {
    Leaf(Charge),
    Node(Charge, Box<Labeled>, Box<Labeled>),
}

impl Labeled {
    pub(crate) fn charge(&self) -> Charge {
        match self {
            Labeled::Leaf(c) | Labeled::Node(c, _, _) => *c,
        }
    }

    pub(crate) fn node(c: Charge, l: Labeled, r: Labeled) -> Labeled {
        Labeled::Node(c, Box::new(l), Box::new(r))
    }

    /// Attaches the charges of `tree` to `shape`.
    pub(crate) fn decorate(shape: &TreeShape, tree: &FusionTree) -> Labeled {
        fn go(s: &TreeShape, t: &FusionTree, next_internal: &mut usize) -> Labeled {
            match s {
                TreeShape::Leaf(i) => Labeled::Leaf(t.leaves[*i]),
                TreeShape::Node(l, r) => {
                    let c = t.internal[*next_internal];
                    *next_internal += 1;
                    let left = go(l, t, next_internal);
                    let right = go(r, t, next_internal);
                    Labeled::node(c, left, right)
                }
            }
        }
        go(shape, tree, &mut 0)
    }

    /// Inverse of [`decorate`](Self::decorate); leaves are numbered left to right.
    pub(crate) fn flatten(&self) -> (TreeShape, FusionTree) {
        fn go(n: &Labeled, leaves: &mut Vec<Charge>, internal: &mut Vec<Charge>) -> TreeShape {
            match n {
                Labeled::Leaf(c) => {
                    leaves.push(*c);
                    TreeShape::Leaf(leaves.len() - 1)
                }
                Labeled::Node(c, l, r) => {
                    internal.push(*c);
                    let ls = go(l, leaves, internal);
                    let rs = go(r, leaves, internal);
                    TreeShape::node(ls, rs)
                }
            }
        }
        let mut leaves = Vec::new();
        let mut internal = Vec::new();
        let shape = go(self, &mut leaves, &mut internal);
        (shape, FusionTree { leaves, internal })
    }

    #[cfg(test)]
    pub(crate) fn is_consistent(&self, model: &AnyonModel) -> bool {
        match self {
            Labeled::Leaf(c) => model.contains(*c),
            Labeled::Node(c, l, r) => {
                model.contains(*c)
                    && model.fuses_to(l.charge(), r.charge(), *c)
                    && l.is_consistent(model)
                    && r.is_consistent(model)
            }
        }
    }
}

/// All consistent labelings of a shape, as (root charge, tree) pairs.
fn labelings(model: &AnyonModel, shape: &TreeShape) -> Vec<FusionTree> {
    match shape {
        TreeShape::Leaf(_) => model.charges().map(|c| FusionTree::new(vec![c], Vec::new())).collect(),
        TreeShape::Node(l, r) => {
            let left = labelings(model, l);
            let right = labelings(model, r);
            let mut out = Vec::new();
            for lt in &left {
                for rt in &right {
                    for &c in model.fusion(lt.global_charge(), rt.global_charge()) {
                        out.push(FusionTree::join(lt, rt, c));
                    }
                }
            }
            out
        }
    }
}

/// A contiguous run of basis indices sharing one global charge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sector {
    pub charge: Charge,
    pub range: Range<usize>,
}

impl Sector {
    pub fn dim(&self) -> usize {
        self.range.len()
    }
}

/// The orthonormal fusion-tree basis of one shape, grouped by global charge.
///
/// Ordering: sectors by charge (vacuum first); within a sector, trees are
/// ordered by their leaf charges compared from the last leaf to the first,
/// then by internal charges. For two anyons this yields
/// `|e,e;e⟩, |τ,τ;e⟩, |τ,e;τ⟩, |e,τ;τ⟩, |τ,τ;τ⟩`.
#[derive(Debug)]
pub struct SectorBasis {
    model: Arc<AnyonModel>,
    shape: TreeShape,
    trees: Vec<FusionTree>,
    sectors: Vec<Sector>,
    sector_of: Vec<usize>,
    index: HashMap<FusionTree, usize>,
}

impl SectorBasis {
    /// Enumerates every fusion-consistent labeling of `shape`.
    pub fn new(model: Arc<AnyonModel>, shape: TreeShape) -> Result<Self> {
        shape.check_leaf_order()?;
        let mut trees = labelings(&model, &shape);
        trees.sort_by(|x, y| {
            x.global_charge()
                .cmp(&y.global_charge())
                .then_with(|| x.leaves.iter().rev().cmp(y.leaves.iter().rev()))
                .then_with(|| x.internal.cmp(&y.internal))
        });

        let mut sectors: Vec<Sector> = Vec::new();
        let mut sector_of = Vec::with_capacity(trees.len());
        for (i, t) in trees.iter().enumerate() {
            let g = t.global_charge();
            match sectors.last_mut() {
                Some(s) if s.charge == g => s.range.end = i + 1,
                _ => sectors.push(Sector { charge: g, range: i..i + 1 }),
            }
            sector_of.push(sectors.len() - 1);
        }
        let index = trees.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        Ok(Self { model, shape, trees, sectors, sector_of, index })
    }

    pub fn model(&self) -> &Arc<AnyonModel> {
        &self.model
    }

    pub fn shape(&self) -> &TreeShape {
        &self.shape
    }

    pub fn n_leaves(&self) -> usize {
        self.shape.n_leaves()
    }

    pub fn dim(&self) -> usize {
        self.trees.len()
    }

    pub fn trees(&self) -> &[FusionTree] {
        &self.trees
    }

    /// Non-empty sectors in charge order.
    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    /// Position in [`sectors`](Self::sectors) of the sector holding basis index `i`.
    pub fn sector_index_of(&self, i: usize) -> usize {
        self.sector_of[i]
    }

    pub fn charge_of(&self, i: usize) -> Charge {
        self.sectors[self.sector_of[i]].charge
    }

    pub fn sector_position(&self, g: Charge) -> Option<usize> {
        self.sectors.iter().position(|s| s.charge == g)
    }

    pub fn sector(&self, g: Charge) -> Option<&Sector> {
        self.sectors.iter().find(|s| s.charge == g)
    }

    /// Number of basis trees with global charge `g`.
    pub fn sector_dimension(&self, g: Charge) -> Result<usize> {
        if !self.model.contains(g) {
            return Err(Error::unknown_charge(g));
        }
        Ok(self.sector(g).map_or(0, Sector::dim))
    }

    pub fn tree_at(&self, i: usize) -> Result<&FusionTree> {
        self.trees
            .get(i)
            .ok_or_else(|| Error::Domain(format!("index {i} out of range for basis of dimension {}", self.dim())))
    }

    pub fn index_of(&self, tree: &FusionTree) -> Result<usize> {
        if let Some(&i) = self.index.get(tree) {
            return Ok(i);
        }
        if tree.leaves.len() != self.n_leaves() || tree.internal.len() != self.shape.n_internal() {
            return Err(Error::Domain(format!(
                "tree has {} leaves and {} internal labels; shape `{}` needs {} and {}",
                tree.leaves.len(),
                tree.internal.len(),
                self.shape,
                self.n_leaves(),
                self.shape.n_internal()
            )));
        }
        Err(Error::Domain(format!("labeling `{}` is not fusion-consistent", self.render_unchecked(tree))))
    }

    pub(crate) fn lookup(&self, tree: &FusionTree) -> Option<usize> {
        self.index.get(tree).copied()
    }

    /// Same model and shape.
    pub fn same_as(&self, other: &SectorBasis) -> bool {
        std::ptr::eq(self, other)
            || (self.shape == other.shape && (Arc::ptr_eq(&self.model, &other.model) || *self.model == *other.model))
    }

    /// Text label of basis element `i`, e.g. `(tau,e),(e,tau);tau,tau;e`.
    pub fn label(&self, i: usize) -> String {
        self.render_unchecked(&self.trees[i])
    }

    /// Renders a tree in the label syntax: leaf charges nested like the
    /// shape (outer parentheses dropped), then the non-root internal charges
    /// in pre-order, then the global charge, separated by `;`.
    pub fn render(&self, tree: &FusionTree) -> Result<String> {
        self.index_of(tree)?;
        Ok(self.render_unchecked(tree))
    }

    fn render_unchecked(&self, tree: &FusionTree) -> String {
        let m = &self.model;
        if self.n_leaves() == 1 {
            return m.label(tree.leaves[0]).to_string();
        }
        let leaves = self.render_leaves(|i| m.label(tree.leaves[i]).to_string());
        let inner: Vec<&str> = tree.internal.iter().skip(1).map(|&c| m.label(c)).collect();
        let global = m.label(tree.internal[0]);
        if inner.is_empty() {
            format!("{leaves};{global}")
        } else {
            format!("{leaves};{};{global}", inner.join(","))
        }
    }

    fn render_leaves(&self, leaf: impl Fn(usize) -> String) -> String {
        fn go(s: &TreeShape, leaf: &dyn Fn(usize) -> String, top: bool) -> String {
            match s {
                TreeShape::Leaf(i) => leaf(*i),
                TreeShape::Node(l, r) => {
                    let body = format!("{},{}", go(l, leaf, false), go(r, leaf, false));
                    if top {
                        body
                    } else {
                        format!("({body})")
                    }
                }
            }
        }
        go(&self.shape, &leaf, true)
    }

    /// Parses the label syntax produced by [`render`](Self::render).
    pub fn parse_tree(&self, text: &str) -> Result<FusionTree> {
        let m = &self.model;
        let bad = |msg: String| Error::Domain(format!("tree label `{text}`: {msg}"));
        let parse_list = |s: &str| -> Result<Vec<Charge>> {
            s.split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| m.parse_charge(t).ok_or_else(|| bad(format!("unknown charge `{}`", t.trim()))))
                .collect()
        };
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let parts: Vec<&str> = compact.split(';').collect();
        let n = self.n_leaves();
        let tree = if n == 1 {
            if parts.len() != 1 {
                return Err(bad("a single anyon is labeled by its charge alone".into()));
            }
            FusionTree::new(parse_list(parts[0])?, Vec::new())
        } else {
            let (leaf_part, inner, global) = match parts.as_slice() {
                [l, g] => (*l, "", *g),
                [l, i, g] => (*l, *i, *g),
                _ => return Err(bad("expected `leaves;internal;global`".into())),
            };
            let leaves = parse_list(&leaf_part.replace(['(', ')'], ""))?;
            if leaves.len() != n {
                return Err(bad(format!("expected {n} leaf charges, found {}", leaves.len())));
            }
            let expected = self.render_leaves(|i| m.label(leaves[i]).to_string());
            let normalized = leaf_part.split(',').map(|t| {
                let core = t.trim_matches(|c| c == '(' || c == ')');
                let lead = &t[..t.len() - t.trim_start_matches('(').len()];
                let trail = &t[t.trim_end_matches(')').len()..];
                let label = m.parse_charge(core).map(|c| m.label(c)).unwrap_or(core);
                format!("{lead}{label}{trail}")
            });
            if normalized.collect::<Vec<_>>().join(",") != expected {
                return Err(bad(format!("leaf grouping does not match shape `{}`", self.shape)));
            }
            let mut internal = parse_list(global)?;
            if internal.len() != 1 {
                return Err(bad("expected exactly one global charge".into()));
            }
            internal.extend(parse_list(inner)?);
            FusionTree::new(leaves, internal)
        };
        self.index_of(&tree)?;
        Ok(tree)
    }
}

/// `F_n` with `F_1 = F_2 = 1`.
pub fn fibonacci_number(n: usize) -> u64 {
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..n {
        let next = a + b;
        a = b;
        b = next;
    }
    a
}
