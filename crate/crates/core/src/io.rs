//! Plain-text formats for models, states and operators.
//!
//! Model files hold one declaration per line:
//!
//! ```text
//! name fibonacci
//! charges e tau
//! dim tau 1.618033988749895
//! fusion tau tau -> e tau
//! F tau tau tau ; tau ; e e = 0.6180339887498949 0
//! R tau tau ; e = -0.8090169943749475 -0.5877852522924731
//! ```
//!
//! `charges` must precede everything except `name`; the first charge is the
//! vacuum. Undeclared entries take the [`ModelBuilder`] defaults.
//!
//! State files start with `shape: <shape>` followed by `<tree> : <re> <im>`
//! lines; operator files use `<bra tree> | <ket tree> : <re> <im>`. Blank
//! lines and text after `#` are ignored everywhere.

use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::DVector;

use crate::fusion::{SectorBasis, TreeShape};
use crate::model::{AnyonModel, Charge, FKey, ModelBuilder};
use crate::state::{AnyonState, BlockOperator};
use crate::{Error, Result, C64};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn parse_f64(line: usize, s: &str) -> Result<f64> {
    s.parse::<f64>().map_err(|_| parse_err(line, format!("`{s}` is not a number")))
}

fn parse_complex(line: usize, s: &str) -> Result<C64> {
    let parts: Vec<&str> = s.split_whitespace().collect();
    match parts.as_slice() {
        [re] => Ok(C64::new(parse_f64(line, re)?, 0.0)),
        [re, im] => Ok(C64::new(parse_f64(line, re)?, parse_f64(line, im)?)),
        _ => Err(parse_err(line, format!("expected `<re> <im>`, found `{s}`"))),
    }
}

/// Shortest decimal text that parses back to the same `f64`.
pub fn format_f64(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x}")
}

fn format_complex(z: C64) -> String {
    format!("{} {}", format_f64(z.re), format_f64(z.im))
}

pub fn parse_model(text: &str) -> Result<AnyonModel> {
    let mut name = "custom".to_string();
    let mut builder: Option<ModelBuilder> = None;
    for (n, line) in content_lines(text) {
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        if keyword == "name" {
            name = rest.to_string();
            continue;
        }
        if keyword == "charges" {
            if builder.is_some() {
                return Err(parse_err(n, "charges declared twice"));
            }
            let labels: Vec<&str> = rest.split_whitespace().collect();
            if labels.is_empty() || labels.len() > u8::MAX as usize {
                return Err(parse_err(n, "expected between 1 and 255 charge labels"));
            }
            for (i, l) in labels.iter().enumerate() {
                if labels[..i].contains(l) {
                    return Err(parse_err(n, format!("charge `{l}` declared twice")));
                }
            }
            builder = Some(ModelBuilder::new(&name, &labels));
            continue;
        }
        let b = builder.as_mut().ok_or_else(|| parse_err(n, format!("`{keyword}` before `charges`")))?;
        let charge = |b: &ModelBuilder, s: &str| -> Result<Charge> {
            let s = if s == "τ" { "tau" } else { s };
            b.labels()
                .iter()
                .position(|l| l == s)
                .map(|i| Charge(i as u8))
                .ok_or_else(|| parse_err(n, format!("unknown charge `{s}`")))
        };
        let charges =
            |b: &ModelBuilder, s: &str| -> Result<Vec<Charge>> { s.split_whitespace().map(|t| charge(b, t)).collect() };
        match keyword {
            "dim" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                let [c, d] = parts.as_slice() else {
                    return Err(parse_err(n, "expected `dim <charge> <value>`"));
                };
                let c = charge(b, c)?;
                let d = parse_f64(n, d)?;
                b.quantum_dim(c, d);
            }
            "fusion" => {
                let (lhs, rhs) = rest.split_once("->").ok_or_else(|| parse_err(n, "expected `fusion a b -> c ...`"))?;
                let lhs = charges(b, lhs)?;
                let rhs = charges(b, rhs)?;
                let [x, y] = lhs.as_slice() else {
                    return Err(parse_err(n, "fusion needs exactly two charges on the left"));
                };
                b.fusion(*x, *y, &rhs);
            }
            "F" => {
                let (lhs, value) = rest.split_once('=').ok_or_else(|| parse_err(n, "missing `=`"))?;
                let parts: Vec<&str> = lhs.split(';').collect();
                let [abc, g, df] = parts.as_slice() else {
                    return Err(parse_err(n, "expected `F a b c ; g ; d f = re im`"));
                };
                let (abc, g, df) = (charges(b, abc)?, charges(b, g)?, charges(b, df)?);
                let ([a, bb, c], [g], [d, f]) = (abc.as_slice(), g.as_slice(), df.as_slice()) else {
                    return Err(parse_err(n, "expected `F a b c ; g ; d f = re im`"));
                };
                let key = FKey { a: *a, b: *bb, c: *c, g: *g, d: *d, f: *f };
                let v = parse_complex(n, value)?;
                b.f_symbol(key, v);
            }
            "R" => {
                let (lhs, value) = rest.split_once('=').ok_or_else(|| parse_err(n, "missing `=`"))?;
                let parts: Vec<&str> = lhs.split(';').collect();
                let [ab, c] = parts.as_slice() else {
                    return Err(parse_err(n, "expected `R a b ; c = re im`"));
                };
                let (ab, c) = (charges(b, ab)?, charges(b, c)?);
                let ([x, y], [c]) = (ab.as_slice(), c.as_slice()) else {
                    return Err(parse_err(n, "expected `R a b ; c = re im`"));
                };
                let v = parse_complex(n, value)?;
                b.r_symbol(*x, *y, *c, v);
            }
            other => return Err(parse_err(n, format!("unknown declaration `{other}`"))),
        }
    }
    builder.map(|mut b| b.name(&name).build()).ok_or_else(|| parse_err(0, "no `charges` declaration"))
}

/// Writes every fusion rule, quantum dimension and stored F/R entry; the
/// output parses back to an identical model.
pub fn format_model(model: &AnyonModel) -> String {
    let mut s = String::new();
    let l = |c: Charge| model.label(c).to_string();
    let _ = writeln!(s, "name {}", model.name());
    let labels: Vec<String> = model.charges().map(l).collect();
    let _ = writeln!(s, "charges {}", labels.join(" "));
    for c in model.charges() {
        let _ = writeln!(s, "dim {} {}", l(c), format_f64(model.quantum_dim(c)));
    }
    for a in model.charges() {
        for b in model.charges() {
            let out: Vec<String> = model.fusion(a, b).iter().map(|&c| l(c)).collect();
            let _ = writeln!(s, "fusion {} {} -> {}", l(a), l(b), out.join(" "));
        }
    }
    let mut fs: Vec<_> = model.f_entries().collect();
    fs.sort_by_key(|(k, _)| (k.a, k.b, k.c, k.g, k.d, k.f));
    for (k, v) in fs {
        let _ = writeln!(
            s,
            "F {} {} {} ; {} ; {} {} = {}",
            l(k.a),
            l(k.b),
            l(k.c),
            l(k.g),
            l(k.d),
            l(k.f),
            format_complex(*v)
        );
    }
    let mut rs: Vec<_> = model.r_entries().collect();
    rs.sort_by_key(|(k, _)| **k);
    for (&(a, b, c), v) in rs {
        let _ = writeln!(s, "R {} {} ; {} = {}", l(a), l(b), l(c), format_complex(*v));
    }
    s
}

/// Body lines with their 1-based line numbers.
type NumberedLines = Vec<(usize, String)>;

fn parse_shape_header(text: &str, model: &Arc<AnyonModel>) -> Result<(Arc<SectorBasis>, NumberedLines)> {
    let mut lines = content_lines(text);
    let (n, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let shape = header.strip_prefix("shape:").ok_or_else(|| parse_err(n, "first line must be `shape: <shape>`"))?;
    let shape = TreeShape::parse(shape.trim()).map_err(|e| parse_err(n, e.to_string()))?;
    let basis = Arc::new(SectorBasis::new(model.clone(), shape).map_err(|e| parse_err(n, e.to_string()))?);
    Ok((basis, lines.map(|(n, l)| (n, l.to_string())).collect()))
}

fn parse_index(basis: &SectorBasis, line: usize, label: &str) -> Result<usize> {
    let tree = basis.parse_tree(label.trim()).map_err(|e| parse_err(line, e.to_string()))?;
    basis.index_of(&tree).map_err(|e| parse_err(line, e.to_string()))
}

/// Reads a state file. Amplitudes are taken as written (not normalized);
/// repeated labels add up.
pub fn parse_state(text: &str, model: &Arc<AnyonModel>) -> Result<AnyonState> {
    let (basis, lines) = parse_shape_header(text, model)?;
    let mut amps = DVector::zeros(basis.dim());
    for (n, line) in &lines {
        let (label, value) = line.rsplit_once(':').ok_or_else(|| parse_err(*n, "expected `<tree> : <re> <im>`"))?;
        amps[parse_index(&basis, *n, label)?] += parse_complex(*n, value)?;
    }
    AnyonState::from_amplitudes(basis, amps)
}

pub fn format_state(state: &AnyonState) -> String {
    let basis = state.basis();
    let mut s = format!("shape: {}\n", basis.shape());
    for (i, z) in state.amplitudes().iter().enumerate() {
        if *z != C64::new(0.0, 0.0) {
            let _ = writeln!(s, "{} : {}", basis.label(i), format_complex(*z));
        }
    }
    s
}

/// Reads an operator file; entries must respect charge superselection.
pub fn parse_operator(text: &str, model: &Arc<AnyonModel>) -> Result<BlockOperator> {
    let (basis, lines) = parse_shape_header(text, model)?;
    let mut op = BlockOperator::zeros(&basis);
    for (n, line) in &lines {
        let (labels, value) =
            line.rsplit_once(':').ok_or_else(|| parse_err(*n, "expected `<bra> | <ket> : <re> <im>`"))?;
        let (bra, ket) = labels.split_once('|').ok_or_else(|| parse_err(*n, "expected `<bra> | <ket>`"))?;
        let (i, j) = (parse_index(&basis, *n, bra)?, parse_index(&basis, *n, ket)?);
        op.add_entry(i, j, parse_complex(*n, value)?).map_err(|e| parse_err(*n, e.to_string()))?;
    }
    Ok(op)
}

pub fn format_operator(op: &BlockOperator) -> String {
    let basis = op.basis();
    let mut s = format!("shape: {}\n", basis.shape());
    for sector in basis.sectors() {
        for i in sector.range.clone() {
            for j in sector.range.clone() {
                let z = op.get(i, j);
                if z != C64::new(0.0, 0.0) {
                    let _ = writeln!(s, "{} | {} : {}", basis.label(i), basis.label(j), format_complex(z));
                }
            }
        }
    }
    s
}
