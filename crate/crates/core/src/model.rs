//! Anyon theory data: charges, fusion rules, F-symbols, R-symbols.
//!
//! Only multiplicity-free theories are representable (every fusion
//! multiplicity is 0 or 1). The Fibonacci theory is built in; other theories
//! can be loaded from the text format in [`crate::io`].

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::C64;

/// A particle type, stored as an index into [`AnyonModel::charges`].
///
/// Index 0 is always the vacuum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Charge(pub u8);

impl Charge {
    pub const VACUUM: Charge = Charge(0);
    /// The Fibonacci excitation τ in [`fibonacci_model`].
    pub const TAU: Charge = Charge(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Index of a single F-symbol `[F^{abc}_g]_{df}`: `d` is the charge of
/// `(a b)` and `f` the charge of `(b c)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FKey {
    pub a: Charge,
    pub b: Charge,
    pub c: Charge,
    pub g: Charge,
    pub d: Charge,
    pub f: Charge,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnyonModel {
    name: String,
    labels: Vec<String>,
    fusion: Vec<Vec<Vec<Charge>>>,
    f_symbols: HashMap<FKey, C64>,
    r_symbols: HashMap<(Charge, Charge, Charge), C64>,
    quantum_dims: Vec<f64>,
}

/// Golden ratio φ.
pub fn golden_ratio() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

/// The Fibonacci theory: `τ × τ = e + τ`, with the standard gauge in which
/// the only nontrivial F-matrix is `F^{τττ}_τ`.
pub fn fibonacci_model() -> AnyonModel {
    let e = Charge::VACUUM;
    let t = Charge::TAU;
    let phi_inv = (5f64.sqrt() - 1.0) / 2.0;
    let mut builder = ModelBuilder::new("fibonacci", &["e", "tau"]);
    builder.fusion(t, t, &[e, t]);
    builder.quantum_dim(t, golden_ratio());

    // Every remaining consistent τττ labeling has a one-dimensional F-matrix.
    for (d, f, v) in [(e, e, phi_inv), (e, t, phi_inv.sqrt()), (t, e, phi_inv.sqrt()), (t, t, -phi_inv)] {
        builder.f_symbol(FKey { a: t, b: t, c: t, g: t, d, f }, C64::new(v, 0.0));
    }
    builder.f_symbol(FKey { a: t, b: t, c: t, g: e, d: t, f: t }, C64::new(1.0, 0.0));

    builder.r_symbol(t, t, e, C64::from_polar(1.0, -4.0 * PI / 5.0));
    builder.r_symbol(t, t, t, C64::from_polar(1.0, 3.0 * PI / 5.0));
    builder.build()
}

impl AnyonModel {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_charges(&self) -> usize {
        self.labels.len()
    }

    pub fn charges(&self) -> impl Iterator<Item = Charge> + '_ {
        (0..self.labels.len()).map(|i| Charge(i as u8))
    }

    pub fn vacuum(&self) -> Charge {
        Charge::VACUUM
    }

    pub fn contains(&self, c: Charge) -> bool {
        c.index() < self.labels.len()
    }

    pub fn label(&self, c: Charge) -> &str {
        &self.labels[c.index()]
    }

    /// Looks up a charge by label. `τ` is accepted as an alias for `tau`.
    pub fn parse_charge(&self, s: &str) -> Option<Charge> {
        let s = s.trim();
        let s = if s == "τ" { "tau" } else { s };
        self.labels.iter().position(|l| l == s).map(|i| Charge(i as u8))
    }

    /// Allowed outcomes of `a × b`, in charge order.
    pub fn fusion(&self, a: Charge, b: Charge) -> &[Charge] {
        &self.fusion[a.index()][b.index()]
    }

    pub fn fuses_to(&self, a: Charge, b: Charge, c: Charge) -> bool {
        self.fusion(a, b).contains(&c)
    }

    /// `[F^{abc}_g]_{df}`; zero for labelings that are not fusion-consistent.
    pub fn f_symbol(&self, a: Charge, b: Charge, c: Charge, g: Charge, d: Charge, f: Charge) -> C64 {
        self.f_symbols.get(&FKey { a, b, c, g, d, f }).copied().unwrap_or_default()
    }

    /// `R^{ab}_c`; zero when `c` is not an outcome of `a × b`.
    pub fn r_symbol(&self, a: Charge, b: Charge, c: Charge) -> C64 {
        self.r_symbols.get(&(a, b, c)).copied().unwrap_or_default()
    }

    pub fn quantum_dim(&self, c: Charge) -> f64 {
        self.quantum_dims[c.index()]
    }

    /// The unique `ā` with `e ∈ a × ā`, if there is exactly one.
    pub fn conjugate(&self, a: Charge) -> Option<Charge> {
        let mut found = self.charges().filter(|&b| self.fuses_to(a, b, Charge::VACUUM));
        match (found.next(), found.next()) {
            (Some(b), None) => Some(b),
            _ => None,
        }
    }

    /// Valid `(ab)` intermediates `d` and `(bc)` intermediates `f` for the
    /// F-matrix `F^{abc}_g`.
    pub fn f_matrix_labels(&self, a: Charge, b: Charge, c: Charge, g: Charge) -> (Vec<Charge>, Vec<Charge>) {
        let rows = self.charges().filter(|&d| self.fuses_to(a, b, d) && self.fuses_to(d, c, g)).collect();
        let cols = self.charges().filter(|&f| self.fuses_to(b, c, f) && self.fuses_to(a, f, g)).collect();
        (rows, cols)
    }

    pub fn f_matrix(&self, a: Charge, b: Charge, c: Charge, g: Charge) -> DMatrix<C64> {
        let (rows, cols) = self.f_matrix_labels(a, b, c, g);
        DMatrix::from_fn(rows.len(), cols.len(), |i, j| self.f_symbol(a, b, c, g, rows[i], cols[j]))
    }

    /// Returns a copy with one F-symbol overwritten.
    pub fn with_f_symbol(mut self, key: FKey, value: C64) -> Self {
        self.f_symbols.insert(key, value);
        self
    }

    /// Returns a copy with the outcomes of `a × b` (only that ordering) replaced.
    pub fn with_fusion(mut self, a: Charge, b: Charge, outcomes: &[Charge]) -> Self {
        let mut v = outcomes.to_vec();
        v.sort();
        v.dedup();
        self.fusion[a.index()][b.index()] = v;
        self
    }

    pub fn with_r_symbol(mut self, a: Charge, b: Charge, c: Charge, value: C64) -> Self {
        self.r_symbols.insert((a, b, c), value);
        self
    }

    pub(crate) fn f_entries(&self) -> impl Iterator<Item = (&FKey, &C64)> {
        self.f_symbols.iter()
    }

    pub(crate) fn r_entries(&self) -> impl Iterator<Item = (&(Charge, Charge, Charge), &C64)> {
        self.r_symbols.iter()
    }
}

/// Incremental construction of an [`AnyonModel`].
///
/// Unset entries get the conventional defaults on [`build`](Self::build):
/// `e × a = a × e = {a}`, fusion is symmetrised from whichever ordering was
/// declared, F-symbols with a vacuum among `a, b, c` are 1 on consistent
/// labelings, and R-symbols involving the vacuum are 1.
#[derive(Clone, Debug)]
pub struct ModelBuilder {
    name: String,
    labels: Vec<String>,
    fusion: Vec<Vec<Option<Vec<Charge>>>>,
    f_symbols: HashMap<FKey, C64>,
    r_symbols: HashMap<(Charge, Charge, Charge), C64>,
    quantum_dims: Vec<f64>,
}

impl ModelBuilder {
    /// `labels[0]` is the vacuum.
    pub fn new(name: &str, labels: &[&str]) -> Self {
        let n = labels.len();
        assert!((1..=u8::MAX as usize).contains(&n), "a model needs between 1 and 255 charges");
        Self {
            name: name.to_string(),
            labels: labels.iter().map(|s| s.to_string()).collect(),
            fusion: vec![vec![None; n]; n],
            f_symbols: HashMap::new(),
            r_symbols: HashMap::new(),
            quantum_dims: vec![1.0; n],
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn name(&mut self, name: &str) -> &mut Self {
        self.name = name.to_string();
        self
    }

    pub fn fusion(&mut self, a: Charge, b: Charge, outcomes: &[Charge]) -> &mut Self {
        let mut v = outcomes.to_vec();
        v.sort();
        v.dedup();
        self.fusion[a.index()][b.index()] = Some(v);
        self
    }

    pub fn f_symbol(&mut self, key: FKey, value: C64) -> &mut Self {
        self.f_symbols.insert(key, value);
        self
    }

    pub fn r_symbol(&mut self, a: Charge, b: Charge, c: Charge, value: C64) -> &mut Self {
        self.r_symbols.insert((a, b, c), value);
        self
    }

    pub fn quantum_dim(&mut self, c: Charge, d: f64) -> &mut Self {
        self.quantum_dims[c.index()] = d;
        self
    }

    pub fn build(&self) -> AnyonModel {
        let n = self.labels.len();
        let e = Charge::VACUUM;
        let mut fusion = vec![vec![Vec::new(); n]; n];
        for (a, row) in fusion.iter_mut().enumerate() {
            for (b, slot) in row.iter_mut().enumerate() {
                *slot = match (&self.fusion[a][b], &self.fusion[b][a]) {
                    (Some(v), _) | (None, Some(v)) => v.clone(),
                    (None, None) if a == 0 => vec![Charge(b as u8)],
                    (None, None) if b == 0 => vec![Charge(a as u8)],
                    (None, None) => Vec::new(),
                };
            }
        }

        let mut model = AnyonModel {
            name: self.name.clone(),
            labels: self.labels.clone(),
            fusion,
            f_symbols: self.f_symbols.clone(),
            r_symbols: self.r_symbols.clone(),
            quantum_dims: self.quantum_dims.clone(),
        };

        let charges: Vec<Charge> = model.charges().collect();
        for &a in &charges {
            for &b in &charges {
                for &c in &charges {
                    if a != e && b != e && c != e {
                        continue;
                    }
                    for &g in &charges {
                        let (rows, cols) = model.f_matrix_labels(a, b, c, g);
                        for &d in &rows {
                            for &f in &cols {
                                model.f_symbols.entry(FKey { a, b, c, g, d, f }).or_insert(C64::new(1.0, 0.0));
                            }
                        }
                    }
                }
            }
        }
        for &a in &charges {
            model.r_symbols.entry((e, a, a)).or_insert(C64::new(1.0, 0.0));
            model.r_symbols.entry((a, e, a)).or_insert(C64::new(1.0, 0.0));
        }
        model
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    FusionNotSymmetric,
    VacuumNotIdentity,
    MissingConjugate,
    FMatrixNotUnitary,
    FSymbolInconsistent,
    RSymbolNotPhase,
    RSymbolInconsistent,
    VacuumBraidNotTrivial,
    Pentagon,
}

impl ViolationKind {
    pub fn description(self) -> &'static str {
        match self {
            ViolationKind::FusionNotSymmetric => "fusion not symmetric",
            ViolationKind::VacuumNotIdentity => "vacuum not identity",
            ViolationKind::MissingConjugate => "charge has no unique conjugate",
            ViolationKind::FMatrixNotUnitary => "F-matrix not unitary",
            ViolationKind::FSymbolInconsistent => "F-symbol nonzero on inconsistent labeling",
            ViolationKind::RSymbolNotPhase => "R-symbol not a phase",
            ViolationKind::RSymbolInconsistent => "R-symbol defined on a forbidden channel",
            ViolationKind::VacuumBraidNotTrivial => "vacuum R-symbol not 1",
            ViolationKind::Pentagon => "pentagon identity violated",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelViolation {
    pub kind: ViolationKind,
    pub detail: String,
}

impl fmt::Display for ModelViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind.description(), self.detail)
    }
}

/// Checks every structural constraint of a multiplicity-free theory plus the
/// pentagon identity. An empty result means the model is consistent at `tol`.
pub fn validate_model(model: &AnyonModel, tol: f64) -> Vec<ModelViolation> {
    let mut out = Vec::new();
    let mut report = |kind, detail: String| out.push(ModelViolation { kind, detail });
    let charges: Vec<Charge> = model.charges().collect();
    let e = model.vacuum();
    let l = |c: Charge| model.label(c).to_string();

    for &a in &charges {
        for &b in &charges {
            if model.fusion(a, b) != model.fusion(b, a) {
                report(ViolationKind::FusionNotSymmetric, format!("{} x {}", l(a), l(b)));
            }
        }
        if model.fusion(e, a) != [a] || model.fusion(a, e) != [a] {
            report(ViolationKind::VacuumNotIdentity, format!("{} x {}", l(e), l(a)));
        }
        if model.conjugate(a).is_none() {
            report(ViolationKind::MissingConjugate, l(a));
        }
    }

    for &a in &charges {
        for &b in &charges {
            for &c in &charges {
                for &g in &charges {
                    let m = model.f_matrix(a, b, c, g);
                    if m.is_empty() {
                        continue;
                    }
                    let name = format!("F^{{{} {} {}}}_{}", l(a), l(b), l(c), l(g));
                    if !m.is_square() {
                        report(ViolationKind::FMatrixNotUnitary, format!("{name} is {}x{}", m.nrows(), m.ncols()));
                        continue;
                    }
                    let residual = (m.adjoint() * &m - DMatrix::identity(m.nrows(), m.ncols())).camax();
                    if residual > tol {
                        report(ViolationKind::FMatrixNotUnitary, format!("{name}: |F^dag F - 1|_max = {residual:.3e}"));
                    }
                }
            }
        }
    }

    for (k, v) in model.f_entries() {
        let (rows, cols) = model.f_matrix_labels(k.a, k.b, k.c, k.g);
        if v.norm() > tol && !(rows.contains(&k.d) && cols.contains(&k.f)) {
            report(ViolationKind::FSymbolInconsistent, format!("{k:?}"));
        }
    }

    for (&(a, b, c), v) in model.r_entries() {
        if !model.fuses_to(a, b, c) {
            if v.norm() > tol {
                report(ViolationKind::RSymbolInconsistent, format!("R^{{{} {}}}_{}", l(a), l(b), l(c)));
            }
            continue;
        }
        if (v.norm() - 1.0).abs() > tol {
            report(ViolationKind::RSymbolNotPhase, format!("|R^{{{} {}}}_{}| = {}", l(a), l(b), l(c), v.norm()));
        }
    }
    for &a in &charges {
        for (x, y) in [(e, a), (a, e)] {
            if (model.r_symbol(x, y, a) - C64::new(1.0, 0.0)).norm() > tol {
                report(ViolationKind::VacuumBraidNotTrivial, format!("R^{{{} {}}}_{}", l(x), l(y), l(a)));
            }
        }
    }

    let residual = pentagon_residual(model);
    if residual > tol {
        report(ViolationKind::Pentagon, format!("max residual {residual:.3e}"));
    }
    out
}

/// Largest absolute residual of the pentagon identity
///
/// `[F^{fcd}_e]_{gl} [F^{abl}_e]_{fk} = Σ_h [F^{abc}_g]_{fh} [F^{ahd}_e]_{gk} [F^{bcd}_k]_{hl}`
///
/// over every labeling of four leaves.
pub fn pentagon_residual(model: &AnyonModel) -> f64 {
    let q: Vec<Charge> = model.charges().collect();
    let mut worst = 0.0f64;
    for &a in &q {
        for &b in &q {
            for &c in &q {
                for &d in &q {
                    for &e in &q {
                        for &f in &q {
                            for &g in &q {
                                for &k in &q {
                                    for &l in &q {
                                        let lhs = model.f_symbol(f, c, d, e, g, l) * model.f_symbol(a, b, l, e, f, k);
                                        let rhs: C64 = q
                                            .iter()
                                            .map(|&h| {
                                                model.f_symbol(a, b, c, g, f, h)
                                                    * model.f_symbol(a, h, d, e, g, k)
                                                    * model.f_symbol(b, c, d, k, h, l)
                                            })
                                            .sum();
                                        worst = worst.max((lhs - rhs).norm());
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    const E: Charge = Charge::VACUUM;
    const T: Charge = Charge::TAU;

    #[test]
    fn fibonacci_fusion_table() {
        let m = fibonacci_model();
        assert_eq!(m.fusion(T, T), &[E, T]);
        assert_eq!(m.fusion(E, T), &[T]);
        assert_eq!(m.fusion(T, E), &[T]);
        assert_eq!(m.fusion(E, E), &[E]);
        assert_eq!(m.conjugate(T), Some(T));
        assert_eq!(m.conjugate(E), Some(E));
    }

    #[test]
    fn fibonacci_f_and_r_values() {
        let m = fibonacci_model();
        let phi_inv = (5f64.sqrt() - 1.0) / 2.0;
        assert!((m.f_symbol(T, T, T, T, E, E) - C64::new(0.6180339887, 0.0)).norm() < 1e-10);
        assert!((m.f_symbol(T, T, T, T, T, T) + C64::new(phi_inv, 0.0)).norm() < 1e-15);
        assert!((m.f_symbol(T, T, T, T, E, T) - C64::new(phi_inv.sqrt(), 0.0)).norm() < 1e-15);
        let r = m.r_symbol(T, T, E);
        assert!((r - C64::from_polar(1.0, -4.0 * PI / 5.0)).norm() < 1e-15);
        assert!((m.r_symbol(T, T, T) - C64::from_polar(1.0, 3.0 * PI / 5.0)).norm() < 1e-15);
        assert_eq!(m.r_symbol(E, T, T), C64::new(1.0, 0.0));
        // Vacuum-involving F-symbols: 1 on consistent labelings, 0 otherwise.
        assert_eq!(m.f_symbol(E, T, T, E, T, E), C64::new(1.0, 0.0));
        assert_eq!(m.f_symbol(E, T, T, E, E, E), C64::new(0.0, 0.0));
        assert_eq!(m.f_symbol(T, T, T, E, T, T), C64::new(1.0, 0.0));
    }

    #[test]
    fn fibonacci_validates_clean() {
        let m = fibonacci_model();
        assert!(validate_model(&m, 1e-12).is_empty(), "{:?}", validate_model(&m, 1e-12));
        assert!(pentagon_residual(&m) <= 1e-12);
    }

    #[test]
    fn zeroed_f_entry_is_not_unitary() {
        let key = FKey { a: T, b: T, c: T, g: T, d: E, f: E };
        let m = fibonacci_model().with_f_symbol(key, C64::new(0.0, 0.0));
        let report = validate_model(&m, 1e-12);
        assert!(report.iter().any(|v| v.kind == ViolationKind::FMatrixNotUnitary));
        assert!(report.iter().any(|v| v.to_string().starts_with("F-matrix not unitary")));
    }

    #[test]
    fn broken_vacuum_is_reported() {
        let m = fibonacci_model().with_fusion(E, T, &[E]);
        let report = validate_model(&m, 1e-12);
        assert!(report.iter().any(|v| v.to_string().contains("vacuum not identity")));
        assert!(report.iter().any(|v| v.kind == ViolationKind::FusionNotSymmetric));
    }

    #[test]
    fn non_phase_r_symbol_is_reported() {
        let m = fibonacci_model().with_r_symbol(T, T, E, C64::new(0.5, 0.0));
        let report = validate_model(&m, 1e-12);
        assert_eq!(report.len(), 1);
        assert_eq!(report[0].kind, ViolationKind::RSymbolNotPhase);
    }

    #[test]
    fn sign_flip_breaks_pentagon() {
        // Still unitary, but no longer a solution of the pentagon equations.
        let key = FKey { a: T, b: T, c: T, g: E, d: T, f: T };
        let m = fibonacci_model().with_f_symbol(key, C64::new(-1.0, 0.0));
        let report = validate_model(&m, 1e-12);
        assert!(report.iter().all(|v| v.kind == ViolationKind::Pentagon));
        assert!(!report.is_empty());
    }

    #[test]
    fn charge_labels_round_trip() {
        let m = fibonacci_model();
        assert_eq!(m.parse_charge("tau"), Some(T));
        assert_eq!(m.parse_charge("τ"), Some(T));
        assert_eq!(m.parse_charge("e"), Some(E));
        assert_eq!(m.parse_charge("sigma"), None);
        assert_eq!(m.label(T), "tau");
    }
}
