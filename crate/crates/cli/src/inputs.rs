//! Reading states, operators and message amplitudes from the command line.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyonic_core::io::{parse_operator, parse_state};
use anyonic_core::recoupling::shape_change;
use anyonic_core::teleport::{builtin_scenario_for, Direction};
use anyonic_core::{AnyonState, BlockOperator, SectorBasis, TreeShape, C64};

use crate::error::CliError;
use crate::render::{OperatorJson, StateJson};
use crate::{Context, StateInput};

pub enum Input {
    Pure(AnyonState),
    Mixed(BlockOperator),
}

impl Input {
    pub fn basis(&self) -> &Arc<SectorBasis> {
        match self {
            Input::Pure(s) => s.basis(),
            Input::Mixed(o) => o.basis(),
        }
    }

    pub fn density(&self) -> BlockOperator {
        match self {
            Input::Pure(s) => s.density(),
            Input::Mixed(o) => o.clone(),
        }
    }

    /// Recouples into the shape `(A B)` with `split` leaves on the A side.
    pub fn regrouped(self, split: usize) -> Result<Input, CliError> {
        let n = self.basis().n_leaves();
        if split == 0 || split >= n {
            return Err(CliError::Usage(format!("--split must lie between 1 and {} for {n} anyons", n - 1)));
        }
        let target = TreeShape::grouped(split, n - split);
        if self.basis().shape() == &target {
            return Ok(self);
        }
        Ok(match self {
            Input::Pure(s) => Input::Pure(anyonic_core::change_shape(&s, &target)?),
            Input::Mixed(o) => {
                let u = shape_change(o.basis(), &target)?;
                let dense = u.to_dense();
                let moved = &dense * o.to_dense() * dense.adjoint();
                Input::Mixed(BlockOperator::from_dense(u.target(), &moved, 1e-12)?)
            }
        })
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))
}

/// Loads whichever of `--state`, `--operator`, `--resource` was given and
/// groups it at `--split` (half the leaves by default).
pub fn load(ctx: &Context, input: &StateInput) -> Result<Input, CliError> {
    let loaded = if let Some(path) = &input.state {
        let text = read(path)?;
        let state = if text.trim_start().starts_with('{') {
            serde_json::from_str::<StateJson>(&text)?.to_state(&ctx.model)?
        } else {
            parse_state(&text, &ctx.model)?
        };
        if !state.is_normalized(ctx.tol) {
            return Err(anyonic_core::Error::Domain(format!("state has norm {}", state.norm())).into());
        }
        Input::Pure(state)
    } else if let Some(path) = &input.operator {
        let text = read(path)?;
        let op = if text.trim_start().starts_with('{') {
            serde_json::from_str::<OperatorJson>(&text)?.to_operator(&ctx.model)?
        } else {
            parse_operator(&text, &ctx.model)?
        };
        op.validate_density(ctx.tol)?;
        Input::Mixed(op)
    } else if let Some(name) = &input.resource {
        Input::Pure(builtin_scenario_for(&ctx.model, name, Direction::AliceToBob)?.resource)
    } else {
        unreachable!("clap requires one input")
    };
    let split = input.split.unwrap_or(loaded.basis().n_leaves() / 2).max(1);
    loaded.regrouped(split)
}

/// Parses `re`, `re,im` or `r@theta` (radians).
pub fn parse_amplitude(text: &str) -> Result<C64, CliError> {
    let bad = || CliError::Usage(format!("cannot read amplitude `{text}` (expected `re`, `re,im` or `r@theta`)"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    if let Some((r, theta)) = text.split_once('@') {
        Ok(C64::from_polar(num(r)?, num(theta)?))
    } else if let Some((re, im)) = text.split_once(',') {
        Ok(C64::new(num(re)?, num(im)?))
    } else {
        Ok(C64::new(num(text)?, 0.0))
    }
}
