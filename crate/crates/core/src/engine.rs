//! Engine selection for a single evaluation.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::backtrack::tv_backtrack_with_stats;
use crate::cyclotomic::{CyclotomicElement, CyclotomicField};
use crate::fpt::tv_fpt_with_stats;
use crate::homology::{tv3, HomologyError};
use crate::scalar::Coefficient;
use crate::triangulation::Triangulation;
use crate::tvcore::{AdmissibleColourings, TvError, WeightTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Engine {
    /// Homology when r = 3 and the input is connected and orientable, otherwise fpt.
    Auto,
    Direct,
    Backtrack,
    Fpt,
    HomologyR3,
}

impl Engine {
    pub const ALL: [Engine; 5] = [Engine::Auto, Engine::Direct, Engine::Backtrack, Engine::Fpt, Engine::HomologyR3];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Auto => "auto",
            Engine::Direct => "direct",
            Engine::Backtrack => "backtrack",
            Engine::Fpt => "fpt",
            Engine::HomologyR3 => "homology-r3",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown engine `{0}` (expected auto, direct, backtrack, fpt or homology-r3)")]
pub struct UnknownEngine(pub String);

impl FromStr for Engine {
    type Err = UnknownEngine;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Engine::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| UnknownEngine(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Tv(#[from] TvError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Computation<T> {
    pub value: CyclotomicElement<T>,
    /// The engine that ran; never `Auto`.
    pub engine: Engine,
    /// Engine-specific size: colourings enumerated, search nodes visited,
    /// largest DP table, or β₂.
    pub stat: u64,
}

fn homology_applies(tri: &Triangulation) -> bool {
    let report = tri.validate();
    report.closed && report.connected && report.orientable
}

/// The engine `Auto` resolves to for this input.
pub fn resolve(tri: &Triangulation, r: i64, engine: Engine) -> Engine {
    match engine {
        Engine::Auto if r == 3 && homology_applies(tri) => Engine::HomologyR3,
        Engine::Auto => Engine::Fpt,
        e => e,
    }
}

pub fn compute<T: Coefficient>(
    tri: &Triangulation,
    field: &CyclotomicField<T>,
    engine: Engine,
    budget: u64,
) -> Result<Computation<T>, EngineError> {
    let engine = resolve(tri, field.r(), engine);
    let (value, stat) = match engine {
        Engine::Auto => unreachable!(),
        Engine::Direct => {
            tri.require_closed().map_err(TvError::from)?;
            let sk = tri.skeleton();
            let table = WeightTable::new(field);
            let all = AdmissibleColourings::enumerate(&sk, table.r(), budget)?;
            (all.sum_weights(&sk, &table)?, all.enumerated())
        }
        Engine::Backtrack => {
            let (v, s) = tv_backtrack_with_stats(tri, field)?;
            (v, s.visits)
        }
        Engine::Fpt => {
            let (v, s) = tv_fpt_with_stats(tri, field)?;
            (v, s.max_table as u64)
        }
        Engine::HomologyR3 => {
            let h = tv3(tri)?;
            (h.value(field)?, h.beta2 as u64)
        }
    };
    Ok(Computation { value, engine, stat })
}
