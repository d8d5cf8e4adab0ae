//! Report types and their text/JSON renderings.

use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use anyonic_core::io::parse_operator;
use anyonic_core::{AnyonModel, AnyonState, BlockOperator, SectorBasis, TreeShape, C64};

use crate::error::CliError;

/// Something a subcommand prints.
pub trait Report {
    fn json(&self) -> Result<String, serde_json::Error>;
    fn text(&self) -> String;
    /// False turns a successful run into exit status 1.
    fn succeeded(&self) -> bool {
        true
    }
}

/// Text rendering for a serializable report.
pub trait Text {
    fn text(&self) -> String;
    fn succeeded(&self) -> bool {
        true
    }
}

impl<T: Serialize + Text> Report for T {
    fn json(&self) -> Result<String, serde_json::Error> {
        serde_json::to_string_pretty(self)
    }

    fn text(&self) -> String {
        Text::text(self)
    }

    fn succeeded(&self) -> bool {
        Text::succeeded(self)
    }
}

/// Six decimals, without a sign on zero.
pub fn fixed(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

pub fn sci(x: f64) -> String {
    format!("{x:.6e}")
}

/// Eigenvalues with roundoff below `1e-12` shown as exactly zero.
pub fn clean_spectrum(values: Vec<f64>) -> Vec<f64> {
    values.into_iter().map(|x| if x.abs() < 1e-12 { 0.0 } else { x }).collect()
}

pub fn join_fixed(values: &[f64]) -> String {
    values.iter().map(|&x| fixed(x)).collect::<Vec<_>>().join(" ")
}

fn complex_text(z: C64) -> String {
    if z.im == 0.0 {
        fixed(z.re)
    } else {
        format!("{}{}{}i", fixed(z.re), if z.im < 0.0 { "-" } else { "+" }, fixed(z.im.abs()))
    }
}

#[derive(Serialize, Deserialize)]
pub struct EntryJson {
    pub bra: String,
    pub ket: String,
    pub re: f64,
    pub im: f64,
}

/// An operator as nonzero `(bra, ket, value)` entries over a shape.
#[derive(Serialize, Deserialize)]
pub struct OperatorJson {
    pub shape: String,
    pub entries: Vec<EntryJson>,
}

impl OperatorJson {
    pub fn from_operator(op: &BlockOperator) -> OperatorJson {
        let basis = op.basis();
        let mut entries = Vec::new();
        for s in basis.sectors() {
            for i in s.range.clone() {
                for j in s.range.clone() {
                    let z = op.get(i, j);
                    if z != C64::new(0.0, 0.0) {
                        entries.push(EntryJson { bra: basis.label(i), ket: basis.label(j), re: z.re, im: z.im });
                    }
                }
            }
        }
        OperatorJson { shape: basis.shape().to_string(), entries }
    }

    pub fn to_operator(&self, model: &Arc<AnyonModel>) -> Result<BlockOperator, CliError> {
        let mut text = format!("shape: {}\n", self.shape);
        for e in &self.entries {
            let _ = writeln!(text, "{} | {} : {:?} {:?}", e.bra, e.ket, e.re, e.im);
        }
        Ok(parse_operator(&text, model)?)
    }

    /// Indented `bra | ket : value` lines.
    pub fn text(&self, indent: &str) -> String {
        self.entries
            .iter()
            .map(|e| format!("{indent}{} | {} : {}\n", e.bra, e.ket, complex_text(C64::new(e.re, e.im))))
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
pub struct AmplitudeJson {
    pub label: String,
    pub re: f64,
    pub im: f64,
}

#[derive(Serialize, Deserialize)]
pub struct StateJson {
    pub shape: String,
    pub amplitudes: Vec<AmplitudeJson>,
}

impl StateJson {
    pub fn to_state(&self, model: &Arc<AnyonModel>) -> Result<AnyonState, CliError> {
        let shape = TreeShape::parse(&self.shape)?;
        let basis = Arc::new(SectorBasis::new(model.clone(), shape)?);
        let mut amps = DVector::zeros(basis.dim());
        for a in &self.amplitudes {
            amps[basis.index_of(&basis.parse_tree(&a.label)?)?] += C64::new(a.re, a.im);
        }
        Ok(AnyonState::from_amplitudes(basis, amps)?)
    }
}
