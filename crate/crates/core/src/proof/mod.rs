//! Modular DRUP proofs: logging, text format, validation, trimming and
//! interpolation.

use std::fmt;

use crate::error::{Error, Result};
use crate::formula::{Clause, Lit, ModuleId};

mod interpolate;
mod propagator;
mod trim;
mod validate;

pub use interpolate::{
    check_interpolant, interpolate, Implication, Interpolant, InterpolantCheck, ItpCondition,
};
pub use propagator::{RupOutcome, UnitPropagator};
pub use trim::trim;
pub use validate::{check_drup, to_monolithic, validate, MonoStep};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepKind {
    Asserted(ModuleId),
    Rup(ModuleId),
    Copy { src: ModuleId, dst: ModuleId },
    Delete(ModuleId),
}

impl StepKind {
    /// The module whose clause set the step changes.
    pub fn target(self) -> ModuleId {
        match self {
            StepKind::Asserted(m) | StepKind::Rup(m) | StepKind::Delete(m) => m,
            StepKind::Copy { dst, .. } => dst,
        }
    }

    pub fn is_addition(self) -> bool {
        !matches!(self, StepKind::Delete(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProofStep {
    pub kind: StepKind,
    pub clause: Clause,
}

impl ProofStep {
    pub fn asserted(module: ModuleId, clause: Clause) -> Self {
        ProofStep {
            kind: StepKind::Asserted(module),
            clause,
        }
    }

    pub fn rup(module: ModuleId, clause: Clause) -> Self {
        ProofStep {
            kind: StepKind::Rup(module),
            clause,
        }
    }

    pub fn copy(src: ModuleId, clause: Clause) -> Self {
        ProofStep {
            kind: StepKind::Copy {
                src,
                dst: src.other(),
            },
            clause,
        }
    }

    pub fn delete(module: ModuleId, clause: Clause) -> Self {
        ProofStep {
            kind: StepKind::Delete(module),
            clause,
        }
    }

    /// True for the two admissible final steps: `rup m ⊥` and `cp(s) m ⊥`.
    pub fn is_final_refutation(&self) -> bool {
        self.clause.is_empty()
            && matches!(
                self.kind,
                StepKind::Rup(ModuleId::Main)
                    | StepKind::Copy {
                        src: ModuleId::Secondary,
                        dst: ModuleId::Main
                    }
            )
    }
}

impl fmt::Display for ProofStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            StepKind::Asserted(m) => write!(f, "a {} {}", m, self.clause),
            StepKind::Rup(m) => write!(f, "r {} {}", m, self.clause),
            StepKind::Copy { src, dst } => write!(f, "c {} {} {}", src, dst, self.clause),
            StepKind::Delete(m) => write!(f, "d {} {}", m, self.clause),
        }
    }
}

/// Receives proof steps as a solver produces them.
pub trait ProofSink {
    fn log(&mut self, step: ProofStep);
}

/// Discards every step.
pub struct NoProof;

impl ProofSink for NoProof {
    fn log(&mut self, _step: ProofStep) {}
}

/// An ordered sequence of modular proof steps.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModularProof {
    pub steps: Vec<ProofStep>,
}

impl ProofSink for ModularProof {
    fn log(&mut self, step: ProofStep) {
        self.steps.push(step);
    }
}

impl ModularProof {
    pub fn new(steps: Vec<ProofStep>) -> Self {
        ModularProof { steps }
    }

    pub fn append_step(&mut self, step: ProofStep) {
        self.steps.push(step);
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn has_deletions(&self) -> bool {
        self.steps
            .iter()
            .any(|s| matches!(s.kind, StepKind::Delete(_)))
    }

    /// Text form, one step per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&s.to_string());
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<ModularProof> {
        let mut steps = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| Error::Parse {
                line: line_no,
                msg: msg.to_string(),
            };
            let mut toks = line.split_whitespace();
            let tag = toks.next().ok_or_else(|| err("empty step"))?;
            let mut module = || -> Result<ModuleId> {
                toks.next()
                    .and_then(ModuleId::from_tag)
                    .ok_or_else(|| err("expected module tag `s` or `m`"))
            };
            let kind = match tag {
                "a" => StepKind::Asserted(module()?),
                "r" => StepKind::Rup(module()?),
                "d" => StepKind::Delete(module()?),
                "c" => {
                    let src = module()?;
                    let dst = module()?;
                    if src == dst {
                        return Err(err("copy step with identical source and destination"));
                    }
                    StepKind::Copy { src, dst }
                }
                other => return Err(err(&format!("unknown step kind `{other}`"))),
            };
            let mut lits = Vec::new();
            let mut terminated = false;
            for tok in toks {
                let v: i32 = tok.parse().map_err(|_| err("invalid literal"))?;
                if v == 0 {
                    terminated = true;
                    break;
                }
                lits.push(Lit::from_dimacs(v));
            }
            if !terminated {
                return Err(err("step is missing its terminating 0"));
            }
            steps.push(ProofStep {
                kind,
                clause: Clause::new(lits),
            });
        }
        Ok(ModularProof { steps })
    }
}
