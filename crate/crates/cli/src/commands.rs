use std::fmt::Write as _;

use serde::Serialize;

use anyonic_core::correlations::{classify_pure_2anyon, is_uncorrelated};
use anyonic_core::teleport::{
    builtin_scenario_for, receiver_reachability_check, run_protocol, Branch, Direction, MessageQubit, Scenario,
};
use anyonic_core::{partial_trace, purity, spectrum, Bipartition, SectorBasis, Side, TreeShape};

use crate::error::CliError;
use crate::inputs::{self, Input};
use crate::render::{clean_spectrum, fixed, join_fixed, sci, OperatorJson, Report, Text};
use crate::{Context, StateInput, TeleportArgs};

#[derive(Serialize)]
pub struct SectorRow {
    pub charge: String,
    pub dim: usize,
    pub start: usize,
}

#[derive(Serialize)]
pub struct TreeRow {
    pub index: usize,
    pub sector: String,
    pub label: String,
}

#[derive(Serialize)]
pub struct BasisReport {
    pub n: usize,
    pub shape: String,
    pub dim: usize,
    pub sectors: Vec<SectorRow>,
    pub trees: Vec<TreeRow>,
}

impl Text for BasisReport {
    fn text(&self) -> String {
        let width = self.trees.iter().map(|t| t.sector.len()).max().unwrap_or(1);
        self.trees.iter().map(|t| format!("{:>4}  {:<width$}  {}\n", t.index, t.sector, t.label)).collect()
    }
}

pub fn basis(ctx: &Context, n: usize, shape: Option<&str>) -> Result<BasisReport, CliError> {
    let shape = match shape {
        Some(text) => {
            let s = TreeShape::parse(text)?;
            if s.n_leaves() != n {
                return Err(CliError::Usage(format!("shape `{text}` has {} leaves, not {n}", s.n_leaves())));
            }
            s
        }
        None => TreeShape::left_comb(n),
    };
    let basis = SectorBasis::new(ctx.model.clone(), shape)?;
    let model = basis.model();
    Ok(BasisReport {
        n,
        shape: basis.shape().to_string(),
        dim: basis.dim(),
        sectors: basis
            .sectors()
            .iter()
            .map(|s| SectorRow { charge: model.label(s.charge).to_string(), dim: s.dim(), start: s.range.start })
            .collect(),
        trees: (0..basis.dim())
            .map(|i| TreeRow { index: i, sector: model.label(basis.charge_of(i)).to_string(), label: basis.label(i) })
            .collect(),
    })
}

#[derive(Serialize)]
pub struct DimRow {
    pub n: usize,
    pub dim: usize,
    /// Parallel to the report's `charges`.
    pub sectors: Vec<usize>,
}

#[derive(Serialize)]
pub struct DimsReport {
    pub charges: Vec<String>,
    pub rows: Vec<DimRow>,
}

impl Text for DimsReport {
    fn text(&self) -> String {
        let mut s = format!("{:>3} {:>8}", "N", "dim");
        for c in &self.charges {
            let _ = write!(s, " {c:>8}");
        }
        s.push('\n');
        for r in &self.rows {
            let _ = write!(s, "{:>3} {:>8}", r.n, r.dim);
            for d in &r.sectors {
                let _ = write!(s, " {d:>8}");
            }
            s.push('\n');
        }
        s
    }
}

pub fn dim_rows(ctx: &Context, max_n: usize) -> Result<Vec<DimRow>, CliError> {
    (1..=max_n)
        .map(|n| {
            let basis = SectorBasis::new(ctx.model.clone(), TreeShape::left_comb(n))?;
            let sectors = ctx.model.charges().map(|g| basis.sector(g).map_or(0, |s| s.dim())).collect();
            Ok(DimRow { n, dim: basis.dim(), sectors })
        })
        .collect()
}

pub fn dims(ctx: &Context, max_n: usize) -> Result<DimsReport, CliError> {
    Ok(DimsReport {
        charges: ctx.model.charges().map(|c| ctx.model.label(c).to_string()).collect(),
        rows: dim_rows(ctx, max_n)?,
    })
}

#[derive(Serialize)]
pub struct MarginalsReport {
    pub shape: String,
    pub split: usize,
    pub global_purity: f64,
    pub rho_a: OperatorJson,
    pub rho_b: OperatorJson,
    pub spectrum_a: Vec<f64>,
    pub spectrum_b: Vec<f64>,
    pub purity_a: f64,
    pub purity_b: f64,
    pub spectra_symmetric: bool,
}

impl Text for MarginalsReport {
    fn text(&self) -> String {
        let mut s = format!("shape {}  split {}\n", self.shape, self.split);
        let _ = writeln!(s, "global purity  {}", fixed(self.global_purity));
        for (name, rho, spec, p) in
            [("A", &self.rho_a, &self.spectrum_a, self.purity_a), ("B", &self.rho_b, &self.spectrum_b, self.purity_b)]
        {
            let _ = writeln!(s, "rho_{name}  purity {}", fixed(p));
            let _ = writeln!(s, "  spectrum  {}", join_fixed(spec));
            s.push_str(&rho.text("  "));
        }
        let _ = writeln!(s, "spectra {}", if self.spectra_symmetric { "identical" } else { "different" });
        s
    }
}

pub fn marginals(ctx: &Context, input: &StateInput) -> Result<MarginalsReport, CliError> {
    let input = inputs::load(ctx, input)?;
    let rho = input.density();
    let bip = Bipartition::new(input.basis())?;
    let rho_a = partial_trace(&rho, &bip, Side::B)?;
    let rho_b = partial_trace(&rho, &bip, Side::A)?;
    let spectrum_a = clean_spectrum(spectrum(&rho_a));
    let spectrum_b = clean_spectrum(spectrum(&rho_b));
    let symmetric = anyonic_core::correlations::spectra_match(&spectrum_a, &spectrum_b, ctx.tol);
    Ok(MarginalsReport {
        shape: input.basis().shape().to_string(),
        split: bip.side(Side::A).n_leaves(),
        global_purity: purity(&rho),
        purity_a: purity(&rho_a),
        purity_b: purity(&rho_b),
        rho_a: OperatorJson::from_operator(&rho_a),
        rho_b: OperatorJson::from_operator(&rho_b),
        spectrum_a,
        spectrum_b,
        spectra_symmetric: symmetric,
    })
}

#[derive(Serialize)]
pub struct CorrelationsReport {
    pub shape: String,
    pub uncorrelated: bool,
    pub max_violation: f64,
    pub witness_a: usize,
    pub witness_b: usize,
    pub spectrum_a: Vec<f64>,
    pub spectrum_b: Vec<f64>,
    /// Closed-form class for two-anyon pure states; `null` otherwise.
    pub class: Option<String>,
}

impl Text for CorrelationsReport {
    fn text(&self) -> String {
        let mut s = format!("shape {}\n", self.shape);
        let _ = writeln!(s, "uncorrelated   {}", self.uncorrelated);
        let _ = writeln!(s, "max violation  {}", sci(self.max_violation));
        let _ = writeln!(s, "witness        A[{}] B[{}]", self.witness_a, self.witness_b);
        let _ = writeln!(s, "spectrum A     {}", join_fixed(&self.spectrum_a));
        let _ = writeln!(s, "spectrum B     {}", join_fixed(&self.spectrum_b));
        if let Some(c) = &self.class {
            let _ = writeln!(s, "class          {c}");
        }
        s
    }
}

pub fn correlations(ctx: &Context, input: &StateInput) -> Result<CorrelationsReport, CliError> {
    let input = inputs::load(ctx, input)?;
    let bip = Bipartition::new(input.basis())?;
    let report = is_uncorrelated(&input.density(), &bip, ctx.tol)?;
    let class = match &input {
        Input::Pure(psi) if psi.basis().n_leaves() == 2 && ctx.model.num_charges() == 2 => {
            Some(classify_pure_2anyon(psi, 1e-10)?.class.to_string())
        }
        _ => None,
    };
    Ok(CorrelationsReport {
        shape: input.basis().shape().to_string(),
        uncorrelated: report.is_uncorrelated,
        max_violation: report.max_violation,
        witness_a: report.witness.0,
        witness_b: report.witness.1,
        spectrum_a: clean_spectrum(report.spectrum_a),
        spectrum_b: clean_spectrum(report.spectrum_b),
        class,
    })
}

#[derive(Serialize)]
pub struct MessageJson {
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
}

impl MessageJson {
    fn new(m: &MessageQubit) -> Self {
        MessageJson { alpha: [m.alpha.re, m.alpha.im], beta: [m.beta.re, m.beta.im] }
    }
}

#[derive(Serialize)]
pub struct BranchJson {
    pub label: String,
    pub correction: Option<String>,
    pub probability: f64,
    pub fidelity: Option<f64>,
    pub receiver_state: Option<OperatorJson>,
}

impl BranchJson {
    fn new(b: &Branch) -> Self {
        BranchJson {
            label: b.label.clone(),
            correction: b.correction.clone(),
            probability: b.probability,
            fidelity: b.fidelity,
            receiver_state: b.receiver_state.as_ref().map(OperatorJson::from_operator),
        }
    }

    fn row(&self) -> String {
        let f = self.fidelity.map_or_else(|| "-".to_string(), fixed);
        format!(
            "{:<10} {:<4} {:>10} {:>10}\n",
            self.label,
            self.correction.as_deref().unwrap_or("-"),
            fixed(self.probability),
            f
        )
    }
}

#[derive(Serialize)]
pub struct TeleportReport {
    pub scenario: String,
    pub direction: Direction,
    pub message: MessageJson,
    pub outcomes: Vec<BranchJson>,
    pub no_click: BranchJson,
    pub click_probability: f64,
    pub total_probability: f64,
    pub average_fidelity: f64,
}

impl Text for TeleportReport {
    fn text(&self) -> String {
        let mut s = format!("scenario {}  direction {}\n", self.scenario, self.direction.as_str());
        let _ = writeln!(s, "{:<10} {:<4} {:>10} {:>10}", "outcome", "corr", "prob", "fidelity");
        for o in &self.outcomes {
            s.push_str(&o.row());
        }
        s.push_str(&self.no_click.row());
        let _ = writeln!(s, "click probability  {}", fixed(self.click_probability));
        let _ = writeln!(s, "average fidelity   {}", fixed(self.average_fidelity));
        s
    }
}

#[derive(Serialize)]
pub struct ReachableJson {
    pub labels: Vec<String>,
    pub coherent: bool,
}

#[derive(Serialize)]
pub struct ReachMessageJson {
    pub message: MessageJson,
    pub classical_bound: Option<f64>,
    pub max_average_fidelity: f64,
}

#[derive(Serialize)]
pub struct ReachabilityReport {
    pub scenario: String,
    pub direction: Direction,
    pub measurements: usize,
    pub branches_checked: usize,
    pub reachable: ReachableJson,
    pub max_off_support: f64,
    pub within_tolerance: bool,
    pub messages: Vec<ReachMessageJson>,
}

impl Text for ReachabilityReport {
    fn text(&self) -> String {
        let mut s = format!("scenario {}  direction {}\n", self.scenario, self.direction.as_str());
        let _ = writeln!(s, "measurements sampled  {}", self.measurements);
        let _ = writeln!(s, "branches checked      {}", self.branches_checked);
        let kind = if self.reachable.coherent { "coherent" } else { "diagonal" };
        let _ = writeln!(s, "reachable support     {} ({kind})", self.reachable.labels.join(", "));
        let _ = writeln!(s, "max off-support mass  {}", sci(self.max_off_support));
        for m in &self.messages {
            let _ = write!(s, "best average fidelity {}", fixed(m.max_average_fidelity));
            if let Some(b) = m.classical_bound {
                let _ = write!(s, "  (classical mixture bound {})", fixed(b));
            }
            s.push('\n');
        }
        s
    }
}

fn reachability(
    ctx: &Context,
    scenario: &Scenario,
    message: &MessageQubit,
    samples: usize,
) -> Result<ReachabilityReport, CliError> {
    let r = receiver_reachability_check(scenario, std::slice::from_ref(message), samples, ctx.seed)?;
    let pair = SectorBasis::new(ctx.model.clone(), TreeShape::left_comb(2))?;
    let labels = scenario.reachable.trees.iter().map(|t| pair.render(t)).collect::<Result<_, _>>()?;
    Ok(ReachabilityReport {
        scenario: scenario.name.clone(),
        direction: scenario.direction,
        measurements: r.measurements,
        branches_checked: r.branches_checked,
        reachable: ReachableJson { labels, coherent: scenario.reachable.coherent },
        max_off_support: r.max_off_support,
        within_tolerance: r.max_off_support <= ctx.tol,
        messages: r
            .messages
            .iter()
            .map(|m| ReachMessageJson {
                message: MessageJson::new(&m.message),
                classical_bound: m.classical_bound,
                max_average_fidelity: m.max_average_fidelity,
            })
            .collect(),
    })
}

/// Measurements drawn when a scenario has none and `--samples` is absent.
const DEFAULT_SAMPLES: usize = 200;

pub fn teleport(ctx: &Context, args: &TeleportArgs) -> Result<Box<dyn Report>, CliError> {
    let direction = Direction::parse(&args.direction)?;
    let scenario = builtin_scenario_for(&ctx.model, &args.scenario, direction)?;
    let message = MessageQubit::new(inputs::parse_amplitude(&args.alpha)?, inputs::parse_amplitude(&args.beta)?)?;
    if args.samples.is_some() || scenario.measurement.is_none() {
        let samples = args.samples.unwrap_or(DEFAULT_SAMPLES);
        return Ok(Box::new(reachability(ctx, &scenario, &message, samples)?));
    }
    let out = run_protocol(&scenario, &message)?;
    Ok(Box::new(TeleportReport {
        scenario: scenario.name.clone(),
        direction,
        message: MessageJson::new(&message),
        outcomes: out.branches.iter().map(BranchJson::new).collect(),
        no_click: BranchJson::new(&out.no_click),
        click_probability: out.click_probability,
        total_probability: out.total_probability(),
        average_fidelity: out.average_fidelity,
    }))
}
