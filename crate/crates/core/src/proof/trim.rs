use super::validate::{replay, slot};
use super::{ModularProof, ProofStep, RupOutcome, StepKind};
use crate::error::{Error, Result};
use crate::formula::{ModuleId, PartitionedFormula};

/// Proofs up to this many steps also get a removal-based core pass.
const CORE_PASS_LIMIT: usize = 256;

/// Trims a valid proof: repeated backward marking passes until nothing more
/// is dropped. A proof the marking leaves intact is returned as is; otherwise
/// small proofs also lose every step whose absence keeps them valid. The
/// input is validated first.
pub fn trim(proof: &ModularProof, pf: &PartitionedFormula) -> Result<ModularProof> {
    let mut current = backward_fixpoint(proof.clone(), pf)?;
    if current.len() == proof.len() {
        return Ok(current);
    }
    if current.len() <= CORE_PASS_LIMIT {
        loop {
            let before = current.len();
            current = core_pass(current, pf)?;
            current = backward_fixpoint(current, pf)?;
            if current.len() == before {
                break;
            }
        }
    }
    Ok(current)
}

fn backward_fixpoint(mut proof: ModularProof, pf: &PartitionedFormula) -> Result<ModularProof> {
    loop {
        let next = backward_pass(&proof, pf)?;
        if next.len() == proof.len() {
            return Ok(next);
        }
        proof = next;
    }
}

/// One backward marking pass. Clause identity in the marked sets is the
/// replay id, so duplicate additions of the same clause are told apart.
fn backward_pass(proof: &ModularProof, pf: &PartitionedFormula) -> Result<ModularProof> {
    let mut rp = replay(proof, pf)?;
    let mut marked = [vec![false; rp.ups[0].len()], vec![false; rp.ups[1].len()]];
    let last = proof.len() - 1;
    marked[slot(ModuleId::Main)][rp.ids[last]] = true;

    let mut kept: Vec<ProofStep> = Vec::new();
    for (i, step) in proof.steps.iter().enumerate().rev() {
        let id = rp.ids[i];
        let target = slot(step.kind.target());
        if let StepKind::Delete(_) = step.kind {
            rp.ups[target].set_alive(id, true);
            continue;
        }
        // undo the addition so earlier checks only see earlier clauses
        rp.ups[target].set_alive(id, false);
        if !marked[target][id] {
            continue;
        }
        kept.push(step.clone());
        let check_in = match step.kind {
            StepKind::Rup(m) => Some(m),
            StepKind::Copy { src, .. } => {
                if let Some(src_id) = rp.ups[slot(src)].find_alive(&step.clause) {
                    marked[slot(src)][src_id] = true;
                    None
                } else {
                    Some(src)
                }
            }
            _ => None,
        };
        if let Some(m) = check_in {
            match rp.ups[slot(m)].check_rup(&step.clause) {
                RupOutcome::Refuted { cone } => {
                    for c in cone {
                        marked[slot(m)][c] = true;
                    }
                }
                RupOutcome::NotRefuted => {
                    return Err(Error::InvalidProof {
                        step: i + 1,
                        reason: "backward replay lost a derivation".into(),
                    })
                }
            }
        }
    }
    kept.reverse();
    Ok(ModularProof::new(kept))
}

fn core_pass(mut proof: ModularProof, pf: &PartitionedFormula) -> Result<ModularProof> {
    let mut i = proof.len().saturating_sub(1);
    while i > 0 {
        i -= 1;
        let mut candidate = proof.clone();
        candidate.steps.remove(i);
        if super::validate(&candidate, pf).is_ok() {
            proof = candidate;
        }
    }
    Ok(proof)
}
