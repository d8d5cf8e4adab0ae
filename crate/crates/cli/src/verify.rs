//! Invariant suites behind `anyonic verify`.

use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use clap::ValueEnum;
use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use anyonic_core::correlations::{classify_pure_2anyon, is_uncorrelated};
use anyonic_core::fusion::fibonacci_number;
use anyonic_core::model::pentagon_residual;
use anyonic_core::random::{random_density, random_hermitian, random_state, rng_for};
use anyonic_core::recoupling::{change_along, rotation_path, shape_change};
use anyonic_core::state::trace_product;
use anyonic_core::teleport::{
    builtin_scenario_for, receiver_reachability_check, run_protocol, run_unrestricted,
    superselection_violating_scenario, Direction, MessageQubit, SCENARIO_NAMES,
};
use anyonic_core::{
    embed_local, partial_trace, partial_trace_pure, purity, spectrum, validate_model, AnyonState, Bipartition,
    BlockOperator, Charge, SectorBasis, Side, TreeShape, C64,
};

use crate::commands::dim_rows;
use crate::error::CliError;
use crate::render::{fixed, sci, Text};
use crate::Context;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Dims,
    Model,
    Recoupling,
    PartialTrace,
    Correlations,
    Purity,
    Teleport,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Dims => "dims",
            Suite::Model => "model",
            Suite::Recoupling => "recoupling",
            Suite::PartialTrace => "partial-trace",
            Suite::Correlations => "correlations",
            Suite::Purity => "purity",
            Suite::Teleport => "teleport",
        }
    }
}

#[derive(Serialize)]
pub struct SuiteResult {
    pub suite: &'static str,
    pub passed: bool,
    pub checks: usize,
    pub max_residual: f64,
    pub notes: Vec<String>,
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub suites: Vec<SuiteResult>,
}

impl Text for VerifyReport {
    fn text(&self) -> String {
        let mut s = String::new();
        for r in &self.suites {
            let verdict = if r.passed { "PASS" } else { "FAIL" };
            let _ =
                writeln!(s, "{verdict} {:<14} checks {:>6}  max residual {}", r.suite, r.checks, sci(r.max_residual));
            for n in &r.notes {
                let _ = writeln!(s, "     {n}");
            }
        }
        let _ = writeln!(s, "{}", if self.passed { "all suites passed" } else { "some suites FAILED" });
        s
    }

    fn succeeded(&self) -> bool {
        self.passed
    }
}

/// Accumulates residuals against a threshold.
struct Tally {
    tol: f64,
    checks: usize,
    max: f64,
    failed: bool,
    notes: Vec<String>,
}

impl Tally {
    fn new(tol: f64) -> Self {
        Tally { tol, checks: 0, max: 0.0, failed: false, notes: Vec::new() }
    }

    fn residual(&mut self, r: f64) {
        self.checks += 1;
        self.max = self.max.max(r);
        if r.is_nan() || r > self.tol {
            self.failed = true;
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failed = true;
            self.notes.push(format!("failed: {}", what()));
        }
    }

    fn finish(self, suite: Suite) -> SuiteResult {
        SuiteResult {
            suite: suite.name(),
            passed: !self.failed,
            checks: self.checks,
            max_residual: self.max,
            notes: self.notes,
        }
    }
}

pub fn run(ctx: &Context, only: Option<Suite>) -> VerifyReport {
    let suites = match only {
        Some(s) => vec![s],
        None => Suite::value_variants().to_vec(),
    };
    let mut results = Vec::new();
    for suite in suites {
        let start = Instant::now();
        let mut tally = Tally::new(ctx.tol);
        if let Err(e) = run_suite(ctx, suite, &mut tally) {
            tally.failed = true;
            tally.notes.push(format!("error: {e}"));
        }
        eprintln!("{}: {:.2} s", suite.name(), start.elapsed().as_secs_f64());
        results.push(tally.finish(suite));
    }
    VerifyReport { passed: results.iter().all(|r| r.passed), suites: results }
}

fn run_suite(ctx: &Context, suite: Suite, t: &mut Tally) -> Result<(), CliError> {
    match suite {
        Suite::Dims => dims(ctx, t),
        Suite::Model => model(ctx, t),
        Suite::Recoupling => recoupling(ctx, t),
        Suite::PartialTrace => partial_traces(ctx, t),
        Suite::Correlations => correlations(ctx, t),
        Suite::Purity => purities(ctx, t),
        Suite::Teleport => teleport(ctx, t),
    }
}

fn max_dev(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn dims(ctx: &Context, t: &mut Tally) -> Result<(), CliError> {
    for row in dim_rows(ctx, 8)? {
        let expected = fibonacci_number(2 * row.n + 1) as usize;
        t.check(row.dim == expected, || format!("N={} has dimension {} instead of {expected}", row.n, row.dim));
        let sectors: Vec<String> = row.sectors.iter().map(|d| d.to_string()).collect();
        t.notes.push(format!("N={} dim {:>4} = F_{} sectors [{}]", row.n, row.dim, 2 * row.n + 1, sectors.join(", ")));
    }
    Ok(())
}

fn model(ctx: &Context, t: &mut Tally) -> Result<(), CliError> {
    let violations = validate_model(&ctx.model, 1e-12);
    t.check(violations.is_empty(), || format!("{} model constraints violated", violations.len()));
    t.notes.extend(violations.iter().map(|v| v.to_string()));
    t.residual(pentagon_residual(&ctx.model));
    Ok(())
}

fn recoupling(ctx: &Context, t: &mut Tally) -> Result<(), CliError> {
    for n in 2..=5 {
        let shapes = TreeShape::all(n);
        let right = TreeShape::right_comb(n);
        for from in &shapes {
            let basis = Arc::new(SectorBasis::new(ctx.model.clone(), from.clone())?);
            let id = DMatrix::<C64>::identity(basis.dim(), basis.dim());
            let to_right = change_along(&basis, &rotation_path(from, &right)?)?;
            for to in &shapes {
                let there = shape_change(&basis, to)?;
                t.residual(there.unitarity_residual());
                let back = shape_change(there.target(), from)?;
                t.residual(max_dev(&there.then(&back)?.to_dense(), &id));
                let onward = change_along(to_right.target(), &rotation_path(&right, to)?)?;
                t.residual(max_dev(&there.to_dense(), &to_right.then(&onward)?.to_dense()));
            }
        }
    }
    Ok(())
}

fn partial_traces(ctx: &Context, t: &mut Tally) -> Result<(), CliError> {
    for (na, nb, pairs) in [(2, 2, 200), (3, 3, 40)] {
        let bip = Bipartition::grouped(&ctx.model, na, nb)?;
        for k in 0..pairs {
            let mut rng = rng_for(ctx.seed, (na * 1000 + k) as u64);
            let o_a = random_hermitian(bip.side(Side::A), &mut rng);
            let rho = random_density(bip.whole(), 3, &mut rng);
            let lhs = trace_product(&o_a, &partial_trace(&rho, &bip, Side::B)?);
            let rhs = trace_product(&embed_local(&o_a, &bip, Side::A)?, &rho);
            t.residual((lhs - rhs).norm());
        }
        let mut rng = rng_for(ctx.seed, 7 + na as u64);
        let x = random_hermitian(bip.side(Side::B), &mut rng);
        let y = random_hermitian(bip.side(Side::B), &mut rng);
        let lhs = embed_local(&(&x * &y), &bip, Side::B)?;
        let rhs = &embed_local(&x, &bip, Side::B)? * &embed_local(&y, &bip, Side::B)?;
        t.residual((&lhs - &rhs).max_abs());
    }
    Ok(())
}

fn pair_basis(ctx: &Context) -> Result<Arc<SectorBasis>, CliError> {
    Ok(Arc::new(SectorBasis::new(ctx.model.clone(), TreeShape::left_comb(2))?))
}

fn correlations(ctx: &Context, t: &mut Tally) -> Result<(), CliError> {
    let basis = pair_basis(ctx)?;
    let bip = Bipartition::new(&basis)?;
    let (mut agree, mut skipped) = (0, 0);
    for k in 0..1000 {
        let mut rng = rng_for(ctx.seed, k);
        let g = if rng.random::<bool>() { Charge::TAU } else { Charge::VACUUM };
        let mut psi = random_state(&basis, g, &mut rng)?;
        if rng.random::<f64>() < 0.3 {
            let range = basis.sector(g).expect("sampled sector").range.clone();
            let mut amps = psi.amplitudes().clone();
            amps[range.start + rng.random_range(0..range.len())] = C64::new(0.0, 0.0);
            psi = AnyonState::from_amplitudes(basis.clone(), amps)?.normalized()?;
        }
        let report = is_uncorrelated(&psi.density(), &bip, 1e-8)?;
        if !report.is_uncorrelated && report.max_violation < 1e-6 {
            skipped += 1;
            continue;
        }
        let class = classify_pure_2anyon(&psi, 1e-10)?.class;
        t.check(class.is_uncorrelated() == report.is_uncorrelated, || format!("sample {k}: {class} disagrees"));
        agree += 1;
    }
    t.notes.push(format!("{agree} samples agree, {skipped} near-boundary samples skipped"));
    let families = [vec![("e,tau;tau", 0.6), ("tau,tau;tau", 0.8)], vec![("tau,e;tau", 0.6), ("tau,tau;tau", 0.8)]];
    for terms in families {
        let terms: Vec<(&str, C64)> = terms.into_iter().map(|(l, x)| (l, C64::new(x, 0.0))).collect();
        let psi = AnyonState::from_labels(&basis, &terms)?;
        t.residual(is_uncorrelated(&psi.density(), &bip, 1e-12)?.max_violation);
    }
    Ok(())
}

fn purities(ctx: &Context, t: &mut Tally) -> Result<(), CliError> {
    for n in 1..=4 {
        let basis = Arc::new(SectorBasis::new(ctx.model.clone(), TreeShape::left_comb(n))?);
        for i in 0..basis.dim() {
            t.residual((purity(&AnyonState::basis_vector(&basis, i).density()) - 1.0).abs());
        }
    }
    let basis = Arc::new(SectorBasis::new(ctx.model.clone(), TreeShape::grouped(2, 2))?);
    for k in 0..200 {
        let mut rng = rng_for(ctx.seed, 50_000 + k);
        let g = if k % 2 == 0 { Charge::TAU } else { Charge::VACUUM };
        let psi = random_state(&basis, g, &mut rng)?;
        t.residual((purity(&psi.density()) - 1.0).abs());
    }

    let pair = pair_basis(ctx)?;
    let bip = Bipartition::new(&pair)?;
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let psi = AnyonState::from_labels(&pair, &[("e,tau;tau", h), ("tau,tau;tau", h)])?;
    let sa = spectrum(&partial_trace_pure(&psi, &bip, Side::B)?);
    let sb = spectrum(&partial_trace_pure(&psi, &bip, Side::A)?);
    t.residual((sa[0] - 0.5).abs().max((sa[1] - 0.5).abs()));
    t.residual((sb[0] - 1.0).abs().max(sb[1].abs()));
    t.notes.push(format!(
        "spectra of (|e,tau;tau> + |tau,tau;tau>)/sqrt2: A [{}, {}]  B [{}, {}]",
        fixed(sa[0]),
        fixed(sa[1]),
        fixed(sb[0]),
        fixed(sb[1])
    ));

    let mut mixed = BlockOperator::zeros(&pair);
    for label in ["tau,tau;e", "tau,tau;tau"] {
        let i = pair.index_of(&pair.parse_tree(label)?)?;
        mixed.add_entry(i, i, C64::new(0.5, 0.0))?;
    }
    t.residual((purity(&mixed) - 0.5).abs());
    for side in [Side::A, Side::B] {
        t.residual((purity(&partial_trace(&mixed, &bip, side)?) - 1.0).abs());
    }
    Ok(())
}

fn teleport(ctx: &Context, t: &mut Tally) -> Result<(), CliError> {
    let grid = MessageQubit::grid();
    for name in SCENARIO_NAMES {
        for dir in [Direction::AliceToBob, Direction::BobToAlice] {
            let s = builtin_scenario_for(&ctx.model, name, dir)?;
            for v in s.validate(1e-12)? {
                t.check(false, || format!("{name} {}: {v}", dir.as_str()));
            }
            if s.measurement.is_none() {
                let r = receiver_reachability_check(&s, &grid, 50, ctx.seed)?;
                t.residual(r.max_off_support);
                for m in &r.messages {
                    let bound = m.classical_bound.unwrap_or(1.0);
                    t.check(m.max_average_fidelity <= bound + ctx.tol, || {
                        format!("{name} {}: exceeds bound", dir.as_str())
                    });
                }
                continue;
            }
            for m in &grid {
                let out = run_protocol(&s, m)?;
                t.residual((out.total_probability() - 1.0).abs());
                for b in &out.branches {
                    if let Some(f) = b.fidelity {
                        t.residual((f - 1.0).abs());
                    }
                }
            }
        }
    }
    let unrestricted = superselection_violating_scenario()?;
    for m in &grid {
        t.residual((run_unrestricted(&unrestricted, m)?.average_fidelity - 1.0).abs());
    }
    Ok(())
}
