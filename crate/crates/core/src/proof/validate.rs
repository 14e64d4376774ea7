use std::collections::HashSet;
use std::fmt;

use super::{ModularProof, RupOutcome, StepKind, UnitPropagator};
use crate::error::{Error, Result};
use crate::formula::{Clause, ModuleId, PartitionedFormula};

pub(crate) fn slot(m: ModuleId) -> usize {
    match m {
        ModuleId::Secondary => 0,
        ModuleId::Main => 1,
    }
}

fn invalid(step: usize, reason: impl Into<String>) -> Error {
    Error::InvalidProof {
        step,
        reason: reason.into(),
    }
}

/// State left behind by a successful forward replay.
pub(crate) struct Replay {
    pub ups: [UnitPropagator; 2],
    /// Per step: id of the clause the step added to, or removed from, the
    /// propagator of its target module.
    pub ids: Vec<usize>,
}

/// Replays `proof` with one propagator per module, checking every step.
/// Step numbers in errors are 1-based.
pub(crate) fn replay(proof: &ModularProof, pf: &PartitionedFormula) -> Result<Replay> {
    let parts: [HashSet<&Clause>; 2] = [
        pf.secondary.iter().collect(),
        pf.main.iter().collect(),
    ];
    let mut ups = [UnitPropagator::new(), UnitPropagator::new()];
    let mut ids = Vec::with_capacity(proof.len());
    for (i, step) in proof.steps.iter().enumerate() {
        let n = i + 1;
        let cls = &step.clause;
        let id = match step.kind {
            StepKind::Asserted(m) => {
                if !parts[slot(m)].contains(cls) {
                    return Err(invalid(n, format!("asserted clause ({cls}) is not in part {m}")));
                }
                ups[slot(m)].add(cls)
            }
            StepKind::Rup(m) => {
                if let RupOutcome::NotRefuted = ups[slot(m)].check_rup(cls) {
                    return Err(invalid(n, format!("clause ({cls}) is not RUP in {m}")));
                }
                ups[slot(m)].add(cls)
            }
            StepKind::Copy { src, dst } => {
                if let RupOutcome::NotRefuted = ups[slot(src)].check_rup(cls) {
                    return Err(invalid(
                        n,
                        format!("copied clause ({cls}) is not RUP in source {src}"),
                    ));
                }
                ups[slot(dst)].add(cls)
            }
            StepKind::Delete(m) => ups[slot(m)]
                .remove_one(cls)
                .ok_or_else(|| invalid(n, format!("deleted clause ({cls}) is not active in {m}")))?,
        };
        ids.push(id);
    }
    match proof.steps.last() {
        None => return Err(invalid(0, "empty proof does not derive the empty clause")),
        Some(last) if !last.is_final_refutation() => {
            return Err(invalid(
                proof.len(),
                "final step must add the empty clause to m by rup or copy from s",
            ))
        }
        _ => {}
    }
    Ok(Replay { ups, ids })
}

/// Checks the three validity conditions of a modular proof against `pf`.
pub fn validate(proof: &ModularProof, pf: &PartitionedFormula) -> Result<()> {
    replay(proof, pf).map(|_| ())
}

/// A step of a plain (single-module) DRUP proof.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MonoStep {
    Input(Clause),
    Lemma(Clause),
}

impl fmt::Display for MonoStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonoStep::Input(c) => write!(f, "i {c}"),
            MonoStep::Lemma(c) => write!(f, "{c}"),
        }
    }
}

/// Drops module tags, deletions, and copy steps whose clause was already
/// added earlier. A copy of a clause never added before becomes a lemma: it
/// is RUP in its source module, so it is RUP in the union. Keeping deleted
/// clauses only strengthens propagation.
pub fn to_monolithic(proof: &ModularProof) -> Vec<MonoStep> {
    let mut seen: HashSet<&Clause> = HashSet::new();
    let mut out = Vec::new();
    for s in &proof.steps {
        match s.kind {
            StepKind::Asserted(_) => {
                seen.insert(&s.clause);
                out.push(MonoStep::Input(s.clause.clone()));
            }
            StepKind::Rup(_) => {
                seen.insert(&s.clause);
                out.push(MonoStep::Lemma(s.clause.clone()));
            }
            StepKind::Copy { .. } => {
                if seen.insert(&s.clause) {
                    out.push(MonoStep::Lemma(s.clause.clone()));
                }
            }
            StepKind::Delete(_) => {}
        }
    }
    out
}

/// Checks a plain DRUP refutation of `formula`.
pub fn check_drup(formula: &[Clause], steps: &[MonoStep]) -> Result<()> {
    let inputs: HashSet<&Clause> = formula.iter().collect();
    let mut up = UnitPropagator::new();
    for (i, step) in steps.iter().enumerate() {
        match step {
            MonoStep::Input(c) => {
                if !inputs.contains(c) {
                    return Err(invalid(i + 1, format!("input clause ({c}) not in formula")));
                }
                up.add(c);
            }
            MonoStep::Lemma(c) => {
                if !up.check_rup(c).is_refuted() {
                    return Err(invalid(i + 1, format!("lemma ({c}) is not RUP")));
                }
                up.add(c);
            }
        }
    }
    if steps
        .iter()
        .any(|s| matches!(s, MonoStep::Lemma(c) if c.is_empty()))
    {
        Ok(())
    } else {
        Err(invalid(steps.len(), "proof never derives the empty clause"))
    }
}
