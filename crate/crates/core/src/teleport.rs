//! Teleporting a qubit through a shared four-anyon resource.
//!
//! Alice holds resource anyons 0 and 1, Bob holds 2 and 3. The sender fuses
//! a two-anyon message next to their own resource anyons, measures the
//! message together with their half of the resource, announces the outcome,
//! and the receiver applies a correction.
//!
//! With the sender on Alice's side the six anyons are ordered `M A B` and
//! composed as `M(AB)`, then recoupled to `(MA)B` for the measurement. With
//! the sender on Bob's side the order is `A B M`, composed as `(AB)M` and
//! recoupled to `A(BM)`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::fusion::{FusionTree, SectorBasis, TreeShape};
use crate::model::{fibonacci_model, AnyonModel, Charge};
use crate::random::{random_sector_pvm, rng_for};
use crate::recoupling::change_shape;
use crate::state::{compose_states, partial_trace_vector, AnyonState, Bipartition, BlockOperator, Side};
use crate::{Error, Result, C64};

/// Branches with probability below this are reported without a state.
pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-14;

const E: Charge = Charge::VACUUM;
const T: Charge = Charge::TAU;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `α|0⟩ + β|1⟩` with `|α|² + |β|² = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MessageQubit {
    pub alpha: C64,
    pub beta: C64,
}

impl MessageQubit {
    pub fn new(alpha: C64, beta: C64) -> Result<MessageQubit> {
        let n = alpha.norm_sqr() + beta.norm_sqr();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::Domain(format!("message is not normalized: |α|² + |β|² = {n}")));
        }
        Ok(MessageQubit { alpha, beta })
    }

    /// `(1,0), (0,1), (1/√2, 1/√2), (0.6, 0.8), (1/√2, i/√2)`.
    pub fn grid() -> Vec<MessageQubit> {
        let h = FRAC_1_SQRT_2;
        [(c(1.0), c(0.0)), (c(0.0), c(1.0)), (c(h), c(h)), (c(0.6), c(0.8)), (c(h), C64::new(0.0, h))]
            .into_iter()
            .map(|(alpha, beta)| MessageQubit { alpha, beta })
            .collect()
    }

    /// The message realized on two anyons as `α|τ,e;τ⟩ + β|e,τ;τ⟩`.
    pub fn state(&self, basis: &Arc<SectorBasis>) -> Result<AnyonState> {
        let v = QubitEncoding::tau_sector().encode(basis, self)?;
        AnyonState::from_amplitudes(basis.clone(), v)
    }
}

impl fmt::Display for MessageQubit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.alpha, self.beta)
    }
}

/// Which two-anyon basis states play `|0⟩` and `|1⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QubitEncoding {
    pub zero: FusionTree,
    pub one: FusionTree,
}

impl QubitEncoding {
    /// `|0⟩ = |τ,e;τ⟩`, `|1⟩ = |e,τ;τ⟩`.
    pub fn tau_sector() -> QubitEncoding {
        QubitEncoding { zero: FusionTree::new(vec![T, E], vec![T]), one: FusionTree::new(vec![E, T], vec![T]) }
    }

    /// `|0⟩ = |τ,τ;e⟩`, `|1⟩ = |e,e;e⟩`.
    pub fn vacuum_sector() -> QubitEncoding {
        QubitEncoding { zero: FusionTree::new(vec![T, T], vec![E]), one: FusionTree::new(vec![E, E], vec![E]) }
    }

    pub fn new(zero: FusionTree, one: FusionTree) -> QubitEncoding {
        QubitEncoding { zero, one }
    }

    fn indices(&self, basis: &SectorBasis) -> Result<(usize, usize)> {
        Ok((basis.index_of(&self.zero)?, basis.index_of(&self.one)?))
    }

    pub fn is_single_sector(&self, basis: &SectorBasis) -> Result<bool> {
        let (z, o) = self.indices(basis)?;
        Ok(basis.sector_index_of(z) == basis.sector_index_of(o))
    }

    /// Raw amplitudes `α|0⟩ + β|1⟩`; may span two sectors.
    pub fn encode(&self, basis: &SectorBasis, m: &MessageQubit) -> Result<DVector<C64>> {
        let (z, o) = self.indices(basis)?;
        let mut v = DVector::zeros(basis.dim());
        v[z] = m.alpha;
        v[o] = m.beta;
        Ok(v)
    }

    /// `[X, Y, I, Z]` on the encoded qubit, identity elsewhere, as dense
    /// matrices (X and Y cross sectors when the encoding does).
    pub fn dense_paulis(&self, basis: &SectorBasis) -> Result<[DMatrix<C64>; 4]> {
        let (z, o) = self.indices(basis)?;
        let d = basis.dim();
        let id = DMatrix::<C64>::identity(d, d);
        let mut x = id.clone();
        let mut y = id.clone();
        let mut zz = id.clone();
        for m in [&mut x, &mut y] {
            m[(z, z)] = c(0.0);
            m[(o, o)] = c(0.0);
        }
        x[(z, o)] = c(1.0);
        x[(o, z)] = c(1.0);
        y[(z, o)] = C64::new(0.0, -1.0);
        y[(o, z)] = C64::new(0.0, 1.0);
        zz[(o, o)] = c(-1.0);
        Ok([x, y, id, zz])
    }

    /// [`dense_paulis`](Self::dense_paulis) as block operators; fails for a
    /// cross-sector encoding.
    pub fn paulis(&self, basis: &Arc<SectorBasis>) -> Result<[BlockOperator; 4]> {
        let [x, y, i, z] = self.dense_paulis(basis)?;
        Ok([
            BlockOperator::from_dense(basis, &x, 0.0)?,
            BlockOperator::from_dense(basis, &y, 0.0)?,
            BlockOperator::from_dense(basis, &i, 0.0)?,
            BlockOperator::from_dense(basis, &z, 0.0)?,
        ])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// Alice sends; message composed as `M(AB)`.
    #[serde(rename = "ab")]
    AliceToBob,
    /// Bob sends; message composed as `(AB)M`.
    #[serde(rename = "ba")]
    BobToAlice,
}

impl Direction {
    pub fn parse(s: &str) -> Result<Direction> {
        match s {
            "ab" => Ok(Direction::AliceToBob),
            "ba" => Ok(Direction::BobToAlice),
            other => Err(Error::Domain(format!("unknown direction `{other}` (expected `ab` or `ba`)"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::AliceToBob => "ab",
            Direction::BobToAlice => "ba",
        }
    }

    /// Shape in which message and resource are first joined.
    pub fn composition_shape(self) -> TreeShape {
        let pair = TreeShape::left_comb(2);
        match self {
            Direction::AliceToBob => TreeShape::join(&pair, &TreeShape::grouped(2, 2)),
            Direction::BobToAlice => TreeShape::join(&TreeShape::grouped(2, 2), &pair),
        }
    }

    /// Shape grouping the sender's anyons with the message.
    pub fn measured_shape(self) -> TreeShape {
        self.other().composition_shape()
    }

    /// Party of the measured-shape bipartition holding sender and message.
    pub fn measured_side(self) -> Side {
        match self {
            Direction::AliceToBob => Side::A,
            Direction::BobToAlice => Side::B,
        }
    }

    pub fn receiver_side(self) -> Side {
        self.measured_side().other()
    }

    fn other(self) -> Direction {
        match self {
            Direction::AliceToBob => Direction::BobToAlice,
            Direction::BobToAlice => Direction::AliceToBob,
        }
    }
}

/// A rank-one measurement on the sender's four anyons with one correction
/// per outcome.
#[derive(Clone, Debug)]
pub struct Measurement {
    pub labels: Vec<String>,
    /// Unit vectors over the measured four-anyon basis; outcome `k` projects onto `projectors[k]`.
    pub projectors: Vec<DVector<C64>>,
    pub correction_labels: Vec<String>,
    /// Unitaries on the receiver's two anyons.
    pub corrections: Vec<BlockOperator>,
}

impl Measurement {
    pub fn projector_matrices(&self) -> Vec<DMatrix<C64>> {
        self.projectors.iter().map(|v| v * v.adjoint()).collect()
    }
}

/// Basis states the receiver can end up in, and whether superpositions of
/// them are reachable or only classical mixtures.
#[derive(Clone, Debug)]
pub struct ReachableSupport {
    pub trees: Vec<FusionTree>,
    pub coherent: bool,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    /// Four anyons in the shape `((0 1)(2 3))`.
    pub resource: AnyonState,
    pub direction: Direction,
    /// Root charge of the six-anyon composition.
    pub channel: Charge,
    pub measurement: Option<Measurement>,
    pub receiver_encoding: QubitEncoding,
    pub reachable: ReachableSupport,
}

impl Scenario {
    pub fn with_resource(&self, resource: AnyonState) -> Scenario {
        Scenario { resource, ..self.clone() }
    }

    /// Measurement problems (empty when there is no measurement or it is valid).
    pub fn validate(&self, tol: f64) -> Result<Vec<PvmViolation>> {
        let Some(m) = &self.measurement else {
            return Ok(Vec::new());
        };
        let basis = measured_basis(self.resource.basis().model())?;
        let mut out = validate_pvm(&m.projector_matrices(), &basis, tol);
        if m.corrections.len() != m.projectors.len() {
            out.push(PvmViolation {
                kind: PvmViolationKind::WrongDimension,
                detail: format!("{} projectors but {} corrections", m.projectors.len(), m.corrections.len()),
            });
        }
        Ok(out)
    }
}

fn measured_basis(model: &Arc<AnyonModel>) -> Result<Arc<SectorBasis>> {
    Ok(Arc::new(SectorBasis::new(model.clone(), TreeShape::grouped(2, 2))?))
}

/// Joins message and resource in the composition order of `direction`.
pub fn compose(
    message: &AnyonState,
    resource: &AnyonState,
    direction: Direction,
    channel: Charge,
) -> Result<AnyonState> {
    if message.basis().n_leaves() != 2 || resource.basis().shape() != &TreeShape::grouped(2, 2) {
        return Err(Error::Shape("expected a two-anyon message and a `((0 1)(2 3))` resource".into()));
    }
    match direction {
        Direction::AliceToBob => compose_states(message, resource, channel),
        Direction::BobToAlice => compose_states(resource, message, channel),
    }
}

#[derive(Clone, Debug)]
pub struct Branch {
    pub label: String,
    pub correction: Option<String>,
    pub probability: f64,
    /// Normalized receiver state after the correction; `None` when the
    /// branch has negligible probability.
    pub receiver_state: Option<BlockOperator>,
    pub fidelity: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct TeleportOutcome {
    pub branches: Vec<Branch>,
    /// What is left when no projector clicks; reported without correction.
    pub no_click: Branch,
    pub click_probability: f64,
    /// `Σ p_k F_k` including the no-click branch.
    pub average_fidelity: f64,
}

impl TeleportOutcome {
    pub fn total_probability(&self) -> f64 {
        self.click_probability + self.no_click.probability
    }
}

fn receiver_fidelity(target: &DVector<C64>, rho: &BlockOperator) -> f64 {
    target.dotc(&rho.apply(target)).re
}

/// Runs the scenario's measurement on a message.
pub fn run_protocol(scenario: &Scenario, message: &MessageQubit) -> Result<TeleportOutcome> {
    let model = scenario.resource.basis().model();
    let msg_basis = Arc::new(SectorBasis::new(model.clone(), TreeShape::left_comb(2))?);
    let composed = compose(&message.state(&msg_basis)?, &scenario.resource, scenario.direction, scenario.channel)?;
    run_protocol_on_state(scenario, &composed, message)
}

/// Runs the measurement on an already composed six-anyon state in any shape.
pub fn run_protocol_on_state(
    scenario: &Scenario,
    composed: &AnyonState,
    message: &MessageQubit,
) -> Result<TeleportOutcome> {
    let measurement = scenario
        .measurement
        .as_ref()
        .ok_or_else(|| Error::Domain(format!("scenario `{}` has no measurement", scenario.name)))?;
    let violations = scenario.validate(1e-10)?;
    if let Some(v) = violations.first() {
        return Err(Error::Domain(format!("invalid measurement in `{}`: {v}", scenario.name)));
    }
    let direction = scenario.direction;
    let measured = change_shape(composed, &direction.measured_shape())?;
    let bip = Bipartition::new(measured.basis())?;
    let receiver = bip.side(direction.receiver_side()).clone();
    let target = scenario.receiver_encoding.encode(&receiver, message)?;

    let psi = measured.amplitudes();
    let mut rest = psi.clone();
    let mut branches = Vec::with_capacity(measurement.projectors.len());
    for (k, v) in measurement.projectors.iter().enumerate() {
        let phi = bip.project_local(v, direction.measured_side(), psi);
        rest -= &phi;
        let correction = &measurement.corrections[k];
        let mut branch = conditional_branch(&bip, &measured, &phi, direction, Some(correction), &target)?;
        branch.label = measurement.labels[k].clone();
        branch.correction = Some(measurement.correction_labels[k].clone());
        branches.push(branch);
    }
    let mut no_click = conditional_branch(&bip, &measured, &rest, direction, None, &target)?;
    no_click.label = "no-click".into();

    let click_probability = branches.iter().map(|b| b.probability).sum();
    let average_fidelity =
        branches.iter().chain(std::iter::once(&no_click)).map(|b| b.probability * b.fidelity.unwrap_or(0.0)).sum();
    Ok(TeleportOutcome { branches, no_click, click_probability, average_fidelity })
}

fn conditional_branch(
    bip: &Bipartition,
    measured: &AnyonState,
    phi: &DVector<C64>,
    direction: Direction,
    correction: Option<&BlockOperator>,
    target: &DVector<C64>,
) -> Result<Branch> {
    let probability = phi.norm_squared();
    let mut branch =
        Branch { label: String::new(), correction: None, probability, receiver_state: None, fidelity: None };
    if probability < NEGLIGIBLE_PROBABILITY {
        return Ok(branch);
    }
    let rho = partial_trace_vector(phi, measured.basis(), bip, direction.measured_side())?.scale(c(1.0 / probability));
    let rho = match correction {
        Some(u) => u.conjugate(&rho),
        None => rho,
    };
    branch.fidelity = Some(receiver_fidelity(target, &rho));
    branch.receiver_state = Some(rho);
    Ok(branch)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PvmViolationKind {
    WrongDimension,
    CrossSector,
    NotHermitian,
    NotIdempotent,
    NotOrthogonal,
    ExceedsIdentity,
}

impl PvmViolationKind {
    pub fn description(self) -> &'static str {
        match self {
            PvmViolationKind::WrongDimension => "wrong dimension",
            PvmViolationKind::CrossSector => "cross-sector support",
            PvmViolationKind::NotHermitian => "projector not Hermitian",
            PvmViolationKind::NotIdempotent => "projector not idempotent",
            PvmViolationKind::NotOrthogonal => "projectors not orthogonal",
            PvmViolationKind::ExceedsIdentity => "projectors sum exceeds identity",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PvmViolation {
    pub kind: PvmViolationKind,
    pub detail: String,
}

impl fmt::Display for PvmViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind.description(), self.detail)
    }
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Checks that `projectors` are superselection-respecting, Hermitian,
/// idempotent, mutually orthogonal, and sum to at most the identity.
pub fn validate_pvm(projectors: &[DMatrix<C64>], basis: &SectorBasis, tol: f64) -> Vec<PvmViolation> {
    let d = basis.dim();
    let mut out = Vec::new();
    let mut push = |kind, detail: String| out.push(PvmViolation { kind, detail });
    for (k, p) in projectors.iter().enumerate() {
        if p.shape() != (d, d) {
            push(
                PvmViolationKind::WrongDimension,
                format!("projector {k} is {:?}, basis has dimension {d}", p.shape()),
            );
            return out;
        }
        if !crate::state::validate_cssr(basis, p, tol) {
            push(PvmViolationKind::CrossSector, format!("projector {k} couples different global charges"));
        }
        let h = max_abs(&(p - p.adjoint()));
        if h > tol {
            push(PvmViolationKind::NotHermitian, format!("projector {k}: residual {h:e}"));
        }
        let i = max_abs(&(p * p - p));
        if i > tol {
            push(PvmViolationKind::NotIdempotent, format!("projector {k}: residual {i:e}"));
        }
    }
    for (k, p) in projectors.iter().enumerate() {
        for (l, q) in projectors.iter().enumerate().skip(k + 1) {
            let o = max_abs(&(p * q));
            if o > tol {
                push(PvmViolationKind::NotOrthogonal, format!("projectors {k} and {l}: overlap {o:e}"));
            }
        }
    }
    if !projectors.is_empty() {
        let sum = projectors.iter().fold(DMatrix::<C64>::zeros(d, d), |acc, p| acc + p);
        let rest = DMatrix::<C64>::identity(d, d) - sum;
        let h = (&rest + rest.adjoint()) * c(0.5);
        let min = h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        if min < -tol {
            push(PvmViolationKind::ExceedsIdentity, format!("identity minus sum has eigenvalue {min:e}"));
        }
    }
    out
}

/// Operator mass (Frobenius norm) of `rho` outside the allowed entries.
pub fn off_support_mass(rho: &BlockOperator, support: &ReachableSupport) -> Result<f64> {
    let basis = rho.basis();
    let allowed: Vec<usize> = support.trees.iter().map(|t| basis.index_of(t)).collect::<Result<_>>()?;
    let mut mass = 0.0;
    for i in 0..basis.dim() {
        for j in 0..basis.dim() {
            let ok = allowed.contains(&i) && allowed.contains(&j) && (support.coherent || i == j);
            if !ok {
                mass += rho.get(i, j).norm_sqr();
            }
        }
    }
    Ok(mass.sqrt())
}

/// Best fidelity reachable from `rho` by a diagonal phase correction:
/// `|α|²ρ₀₀ + |β|²ρ₁₁ + 2|αβρ₀₁|`.
pub fn best_diagonal_fidelity(rho: &BlockOperator, encoding: &QubitEncoding, m: &MessageQubit) -> Result<f64> {
    let basis = rho.basis();
    let (z, o) = encoding.indices(basis)?;
    Ok(m.alpha.norm_sqr() * rho.get(z, z).re
        + m.beta.norm_sqr() * rho.get(o, o).re
        + 2.0 * (m.alpha * m.beta * rho.get(z, o)).norm())
}

/// Largest overlap of the encoded message with a classical mixture of the
/// reachable basis states: `max_t |⟨m|t⟩|²`.
pub fn classical_mixture_bound(encoding: &QubitEncoding, support: &ReachableSupport, m: &MessageQubit) -> f64 {
    support
        .trees
        .iter()
        .map(|t| {
            if *t == encoding.zero {
                m.alpha.norm_sqr()
            } else if *t == encoding.one {
                m.beta.norm_sqr()
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, Serialize)]
pub struct MessageReach {
    pub message: MessageQubit,
    /// `None` when the reachable support is coherent.
    pub classical_bound: Option<f64>,
    /// Highest average fidelity over sampled measurements, with the best
    /// diagonal correction chosen per outcome.
    pub max_average_fidelity: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReachabilityReport {
    pub measurements: usize,
    pub branches_checked: usize,
    pub max_off_support: f64,
    pub messages: Vec<MessageReach>,
}

/// Samples `samples` random superselection-respecting rank-one measurements
/// (or uses the scenario's own measurement when `samples` is zero) and checks
/// that every conditional receiver state stays inside the reachable support.
pub fn receiver_reachability_check(
    scenario: &Scenario,
    messages: &[MessageQubit],
    samples: usize,
    seed: u64,
) -> Result<ReachabilityReport> {
    let model = scenario.resource.basis().model();
    let meas_basis = measured_basis(model)?;
    let pvms: Vec<Vec<DVector<C64>>> = if samples == 0 {
        let m = scenario.measurement.as_ref().ok_or_else(|| {
            Error::Domain(format!("scenario `{}` has no measurement; request samples", scenario.name))
        })?;
        vec![m.projectors.clone()]
    } else {
        (0..samples).map(|s| random_sector_pvm(&meas_basis, &mut rng_for(seed, s as u64))).collect()
    };

    let direction = scenario.direction;
    let msg_basis = Arc::new(SectorBasis::new(model.clone(), TreeShape::left_comb(2))?);
    let mut report = ReachabilityReport {
        measurements: pvms.len(),
        branches_checked: 0,
        max_off_support: 0.0,
        messages: Vec::new(),
    };
    for m in messages {
        let composed = compose(&m.state(&msg_basis)?, &scenario.resource, direction, scenario.channel)?;
        let measured = change_shape(&composed, &direction.measured_shape())?;
        let bip = Bipartition::new(measured.basis())?;
        let mut best: f64 = 0.0;
        for pvm in &pvms {
            let mut avg = 0.0;
            for v in pvm {
                let phi = bip.project_local(v, direction.measured_side(), measured.amplitudes());
                let p = phi.norm_squared();
                if p < NEGLIGIBLE_PROBABILITY {
                    continue;
                }
                let rho =
                    partial_trace_vector(&phi, measured.basis(), &bip, direction.measured_side())?.scale(c(1.0 / p));
                report.max_off_support = report.max_off_support.max(off_support_mass(&rho, &scenario.reachable)?);
                report.branches_checked += 1;
                avg += p * best_diagonal_fidelity(&rho, &scenario.receiver_encoding, m)?;
            }
            best = best.max(avg);
        }
        let classical_bound = (!scenario.reachable.coherent)
            .then(|| classical_mixture_bound(&scenario.receiver_encoding, &scenario.reachable, m));
        report.messages.push(MessageReach { message: *m, classical_bound, max_average_fidelity: best });
    }
    Ok(report)
}

pub const SCENARIO_NAMES: [&str; 3] = ["main-text", "appendix-d1-symmetric", "appendix-d2-asymmetric"];

fn unit_vector(basis: &SectorBasis, terms: &[(&str, f64)]) -> Result<DVector<C64>> {
    let mut v = DVector::zeros(basis.dim());
    for (label, w) in terms {
        v[basis.index_of(&basis.parse_tree(label)?)?] += c(*w);
    }
    let n = v.norm();
    Ok(v / c(n))
}

/// Outcome label, the two weighted measured-basis labels of its projector, and its Pauli correction.
type Outcome<'a> = (&'a str, [(&'a str, f64); 2], usize);

fn measurement(model: &Arc<AnyonModel>, outcomes: &[Outcome], encoding: &QubitEncoding) -> Result<Measurement> {
    let basis = measured_basis(model)?;
    let receiver = Arc::new(SectorBasis::new(model.clone(), TreeShape::left_comb(2))?);
    let paulis = encoding.paulis(&receiver)?;
    const NAMES: [&str; 4] = ["X", "Y", "I", "Z"];
    let mut m = Measurement {
        labels: Vec::new(),
        projectors: Vec::new(),
        correction_labels: Vec::new(),
        corrections: Vec::new(),
    };
    for (label, terms, pauli) in outcomes {
        m.labels.push(label.to_string());
        m.projectors.push(unit_vector(&basis, terms)?);
        m.correction_labels.push(NAMES[*pauli].to_string());
        m.corrections.push(paulis[*pauli].clone());
    }
    Ok(m)
}

fn resource(model: &Arc<AnyonModel>, terms: &[(&str, f64)]) -> Result<AnyonState> {
    let basis = measured_basis(model)?;
    let weighted: Vec<(&str, C64)> = terms.iter().map(|(l, w)| (*l, c(*w))).collect();
    AnyonState::from_labels(&basis, &weighted)
}

fn trees(labels: &[&str]) -> Vec<FusionTree> {
    let model = Arc::new(fibonacci_model());
    let basis = SectorBasis::new(model, TreeShape::left_comb(2)).expect("two-anyon basis");
    labels.iter().map(|l| basis.parse_tree(l).expect("catalog label")).collect()
}

const X: usize = 0;
const Y: usize = 1;
const I: usize = 2;
const Z: usize = 3;

/// The built-in Fibonacci scenarios by name and direction.
pub fn builtin_scenario(name: &str, direction: Direction) -> Result<Scenario> {
    builtin_scenario_for(&Arc::new(fibonacci_model()), name, direction)
}

/// As [`builtin_scenario`], sharing an existing Fibonacci model instance.
pub fn builtin_scenario_for(model: &Arc<AnyonModel>, name: &str, direction: Direction) -> Result<Scenario> {
    let h = FRAC_1_SQRT_2;
    let tau_pair = || ReachableSupport { trees: trees(&["tau,e;tau", "e,tau;tau", "tau,tau;tau"]), coherent: true };
    let (resource, channel, measurement, encoding, reachable) = match (name, direction) {
        ("main-text", Direction::AliceToBob) => {
            let enc = QubitEncoding::tau_sector();
            let m = measurement(
                model,
                &[
                    ("lambda+", [("(tau,e),(e,e);tau,e;tau", h), ("(e,tau),(tau,e);tau,tau;tau", h)], X),
                    ("lambda-", [("(tau,e),(e,e);tau,e;tau", h), ("(e,tau),(tau,e);tau,tau;tau", -h)], Y),
                    ("eta+", [("(tau,e),(tau,e);tau,tau;tau", h), ("(e,tau),(e,e);tau,e;tau", h)], I),
                    ("eta-", [("(tau,e),(tau,e);tau,tau;tau", h), ("(e,tau),(e,e);tau,e;tau", -h)], Z),
                ],
                &enc,
            )?;
            (main_text_resource(model)?, E, Some(m), enc, tau_pair())
        }
        ("main-text", Direction::BobToAlice) => {
            let enc = QubitEncoding::new(trees(&["e,e;e"])[0].clone(), trees(&["tau,e;tau"])[0].clone());
            let reach = ReachableSupport { trees: trees(&["e,e;e", "tau,e;tau"]), coherent: false };
            (main_text_resource(model)?, E, None, enc, reach)
        }
        ("appendix-d1-symmetric", dir) => {
            let enc = QubitEncoding::vacuum_sector();
            let outcomes: [Outcome; 4] = match dir {
                Direction::AliceToBob => [
                    ("lambda+", [("(tau,e),(e,e);tau,e;tau", h), ("(e,tau),(tau,tau);tau,e;tau", h)], X),
                    ("lambda-", [("(tau,e),(e,e);tau,e;tau", h), ("(e,tau),(tau,tau);tau,e;tau", -h)], Y),
                    ("theta+", [("(tau,e),(tau,tau);tau,e;tau", h), ("(e,tau),(e,e);tau,e;tau", h)], I),
                    ("theta-", [("(tau,e),(tau,tau);tau,e;tau", h), ("(e,tau),(e,e);tau,e;tau", -h)], Z),
                ],
                Direction::BobToAlice => [
                    ("lambda+", [("(e,e),(tau,e);e,tau;tau", h), ("(tau,tau),(e,tau);e,tau;tau", h)], X),
                    ("lambda-", [("(e,e),(tau,e);e,tau;tau", h), ("(tau,tau),(e,tau);e,tau;tau", -h)], Y),
                    ("theta+", [("(tau,tau),(tau,e);e,tau;tau", h), ("(e,e),(e,tau);e,tau;tau", h)], I),
                    ("theta-", [("(tau,tau),(tau,e);e,tau;tau", h), ("(e,e),(e,tau);e,tau;tau", -h)], Z),
                ],
            };
            let m = measurement(model, &outcomes, &enc)?;
            let res = symmetric_family_resource(model, c(h), c(h))?;
            let reach = ReachableSupport { trees: trees(&["tau,tau;e", "e,e;e"]), coherent: true };
            (res, T, Some(m), enc, reach)
        }
        ("appendix-d2-asymmetric", Direction::BobToAlice) => {
            let enc = QubitEncoding::tau_sector();
            let m = measurement(
                model,
                &[
                    ("lambda+", [("(e,e),(tau,e);e,tau;tau", h), ("(e,tau),(e,tau);tau,tau;tau", h)], X),
                    ("lambda-", [("(e,e),(tau,e);e,tau;tau", h), ("(e,tau),(e,tau);tau,tau;tau", -h)], Y),
                    ("eta+", [("(e,tau),(tau,e);tau,tau;tau", h), ("(e,e),(e,tau);e,tau;tau", h)], I),
                    ("eta-", [("(e,tau),(tau,e);tau,tau;tau", h), ("(e,e),(e,tau);e,tau;tau", -h)], Z),
                ],
                &enc,
            )?;
            let reach = ReachableSupport { trees: trees(&["tau,e;tau", "e,tau;tau", "e,e;e"]), coherent: true };
            (asymmetric_resource(model)?, E, Some(m), enc, reach)
        }
        ("appendix-d2-asymmetric", Direction::AliceToBob) => {
            let enc = QubitEncoding::new(trees(&["e,tau;tau"])[0].clone(), trees(&["e,e;e"])[0].clone());
            let reach = ReachableSupport { trees: trees(&["e,tau;tau", "e,e;e"]), coherent: false };
            (asymmetric_resource(model)?, E, None, enc, reach)
        }
        _ => {
            return Err(Error::Domain(format!("unknown scenario `{name}` (available: {})", SCENARIO_NAMES.join(", "))))
        }
    };
    Ok(Scenario {
        name: name.to_string(),
        resource,
        direction,
        channel,
        measurement,
        receiver_encoding: encoding,
        reachable,
    })
}

/// Every built-in scenario in both directions.
pub fn builtin_scenarios() -> Result<Vec<Scenario>> {
    let model = Arc::new(fibonacci_model());
    let mut out = Vec::new();
    for name in SCENARIO_NAMES {
        for dir in [Direction::AliceToBob, Direction::BobToAlice] {
            out.push(builtin_scenario_for(&model, name, dir)?);
        }
    }
    Ok(out)
}

/// `(|(e,e),(e,τ);e,τ;τ⟩ + |(τ,e),(τ,e);τ,τ;τ⟩)/√2`: entangled, with equal marginal spectra.
pub fn main_text_resource(model: &Arc<AnyonModel>) -> Result<AnyonState> {
    resource(model, &[("(e,e),(e,tau);e,tau;tau", 1.0), ("(tau,e),(tau,e);tau,tau;tau", 1.0)])
}

/// `a|(e,e),(e,e);e,e;e⟩ + b|(τ,τ),(τ,τ);e,e;e⟩`, normalized.
pub fn symmetric_family_resource(model: &Arc<AnyonModel>, a: C64, b: C64) -> Result<AnyonState> {
    let basis = measured_basis(model)?;
    AnyonState::from_labels(&basis, &[("(e,e),(e,e);e,e;e", a), ("(tau,tau),(tau,tau);e,e;e", b)])
}

/// `(√2|(e,e),(e,τ);e,τ;τ⟩ + |(e,τ),(e,e);τ,e;τ⟩ + |(τ,e),(e,τ);τ,τ;τ⟩)/2`:
/// entangled, with different marginal spectra.
pub fn asymmetric_resource(model: &Arc<AnyonModel>) -> Result<AnyonState> {
    resource(
        model,
        &[
            ("(e,e),(e,tau);e,tau;tau", 2f64.sqrt()),
            ("(e,tau),(e,e);tau,e;tau", 1.0),
            ("(tau,e),(e,tau);tau,tau;tau", 1.0),
        ],
    )
}

/// A protocol that treats the sender's four anyons and the receiver's two as
/// an ordinary tensor product, ignoring superselection: measurement vectors
/// and corrections may couple different charges.
#[derive(Clone, Debug)]
pub struct UnrestrictedScenario {
    pub name: String,
    pub resource: AnyonState,
    pub direction: Direction,
    pub channel: Charge,
    pub labels: Vec<String>,
    pub projectors: Vec<DVector<C64>>,
    pub correction_labels: Vec<String>,
    pub corrections: Vec<DMatrix<C64>>,
    pub receiver_encoding: QubitEncoding,
}

#[derive(Clone, Debug, Serialize)]
pub struct UnrestrictedOutcome {
    pub probabilities: Vec<f64>,
    pub fidelities: Vec<Option<f64>>,
    pub average_fidelity: f64,
}

/// Bob-to-Alice teleportation through the main-text resource using
/// measurement vectors that superpose vacuum and τ total charge on Bob's side.
pub fn superselection_violating_scenario() -> Result<UnrestrictedScenario> {
    let model = Arc::new(fibonacci_model());
    let basis = measured_basis(&model)?;
    let receiver = SectorBasis::new(model.clone(), TreeShape::left_comb(2))?;
    let enc = QubitEncoding::new(trees(&["e,e;e"])[0].clone(), trees(&["tau,e;tau"])[0].clone());
    let [x, y, i, z] = enc.dense_paulis(&receiver)?;
    let h = FRAC_1_SQRT_2;
    let (x1, x2) = ("(e,tau),(tau,e);tau,tau;e", "(e,tau),(e,tau);tau,tau;e");
    let (y1, y2) = ("(tau,e),(tau,e);tau,tau;tau", "(tau,e),(e,tau);tau,tau;tau");
    let outcomes = [
        ("v1", [(x1, h), (y2, h)], "I", i),
        ("v2", [(x1, h), (y2, -h)], "Z", z),
        ("v3", [(x2, h), (y1, h)], "X", x),
        ("v4", [(x2, h), (y1, -h)], "Y", y),
    ];
    let mut s = UnrestrictedScenario {
        name: "main-text-unrestricted".into(),
        resource: main_text_resource(&model)?,
        direction: Direction::BobToAlice,
        channel: E,
        labels: Vec::new(),
        projectors: Vec::new(),
        correction_labels: Vec::new(),
        corrections: Vec::new(),
        receiver_encoding: enc,
    };
    for (label, terms, corr, u) in outcomes {
        s.labels.push(label.into());
        s.projectors.push(unit_vector(&basis, &terms)?);
        s.correction_labels.push(corr.into());
        s.corrections.push(u);
    }
    Ok(s)
}

/// Runs an [`UnrestrictedScenario`]. The composed state must lie in one
/// global sector, so each (sender labeling, receiver labeling) pair names a
/// unique basis tree and the receiver's conditional state is pure.
pub fn run_unrestricted(s: &UnrestrictedScenario, message: &MessageQubit) -> Result<UnrestrictedOutcome> {
    let model = s.resource.basis().model();
    let msg_basis = Arc::new(SectorBasis::new(model.clone(), TreeShape::left_comb(2))?);
    let composed = compose(&message.state(&msg_basis)?, &s.resource, s.direction, s.channel)?;
    let measured = change_shape(&composed, &s.direction.measured_shape())?;
    let bip = Bipartition::new(measured.basis())?;
    let receiver = bip.side(s.direction.receiver_side());
    let target = s.receiver_encoding.encode(receiver, message)?;
    let parts: Vec<(usize, usize)> = (0..measured.basis().dim())
        .map(|i| {
            let (a, b) = bip.parts(i);
            match s.direction.measured_side() {
                Side::A => (a, b),
                Side::B => (b, a),
            }
        })
        .collect();

    let mut out = UnrestrictedOutcome { probabilities: Vec::new(), fidelities: Vec::new(), average_fidelity: 0.0 };
    for (v, u) in s.projectors.iter().zip(&s.corrections) {
        let mut phi = DVector::<C64>::zeros(receiver.dim());
        for (j, &(m, r)) in parts.iter().enumerate() {
            phi[r] += v[m].conj() * measured.amplitudes()[j];
        }
        let p = phi.norm_squared();
        out.probabilities.push(p);
        if p < NEGLIGIBLE_PROBABILITY {
            out.fidelities.push(None);
            continue;
        }
        let corrected = u * phi / c(p.sqrt());
        let f = target.dotc(&corrected).norm_sqr();
        out.fidelities.push(Some(f));
        out.average_fidelity += p * f;
    }
    Ok(out)
}
