//! Reference implementations used as oracles. Deliberately naive: no
//! watches, no learning, full clause scans.
#![allow(dead_code)]

use specsms::proof::{Interpolant, ModularProof, MonoStep, StepKind};
use specsms::{Clause, Lit, ModuleId, PartitionedFormula};

/// Partial assignment indexed by variable; `None` is unassigned.
pub type Partial = Vec<Option<bool>>;

fn value(a: &Partial, l: Lit) -> Option<bool> {
    a[l.var().index()].map(|b| b == l.is_positive())
}

/// Repeats full passes over `clauses` until nothing changes. Returns false
/// on a falsified clause.
pub fn propagate(clauses: &[&Clause], a: &mut Partial) -> bool {
    loop {
        let mut changed = false;
        for c in clauses {
            let mut open = None;
            let mut n_open = 0;
            let mut sat = false;
            for &l in c.lits() {
                match value(a, l) {
                    Some(true) => {
                        sat = true;
                        break;
                    }
                    Some(false) => {}
                    None => {
                        n_open += 1;
                        open = Some(l);
                    }
                }
            }
            if sat {
                continue;
            }
            match n_open {
                0 => return false,
                1 => {
                    let l = open.unwrap();
                    a[l.var().index()] = Some(l.is_positive());
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            return true;
        }
    }
}

fn n_vars_of(clauses: &[&Clause], extra: &Clause) -> usize {
    clauses
        .iter()
        .copied()
        .chain(std::iter::once(extra))
        .flat_map(|c| c.lits().iter().map(|l| l.var().index()))
        .max()
        .unwrap_or(0)
}

/// Reverse unit propagation: asserting the negation of `c` leads to a
/// falsified clause.
pub fn is_rup(clauses: &[&Clause], c: &Clause) -> bool {
    let mut a: Partial = vec![None; n_vars_of(clauses, c) + 1];
    for &l in c.lits() {
        match value(&a, !l) {
            Some(false) => return true,
            _ => a[l.var().index()] = Some(!l.is_positive()),
        }
    }
    !propagate(clauses, &mut a)
}

/// Plain DRUP refutation check over `formula`.
pub fn check_mono(formula: &[Clause], steps: &[MonoStep]) -> bool {
    let mut db: Vec<Clause> = formula.to_vec();
    let mut refuted = false;
    for s in steps {
        match s {
            MonoStep::Input(c) => {
                if !formula.contains(c) {
                    return false;
                }
                db.push(c.clone());
            }
            MonoStep::Lemma(c) => {
                let refs: Vec<&Clause> = db.iter().collect();
                if !is_rup(&refs, c) {
                    return false;
                }
                refuted |= c.is_empty();
                db.push(c.clone());
            }
        }
    }
    refuted
}

fn slot(m: ModuleId) -> usize {
    match m {
        ModuleId::Secondary => 0,
        ModuleId::Main => 1,
    }
}

/// Modular proof validity: asserted clauses come from their part, rup
/// clauses are RUP in their module, copied clauses are RUP in the source,
/// deletions remove an active copy, and the last step puts ⊥ in main.
pub fn check_modular(proof: &ModularProof, pf: &PartitionedFormula) -> bool {
    let mut db: [Vec<Clause>; 2] = [Vec::new(), Vec::new()];
    for step in &proof.steps {
        let c = &step.clause;
        match step.kind {
            StepKind::Asserted(m) => {
                if !pf.part(m).contains(c) {
                    return false;
                }
                db[slot(m)].push(c.clone());
            }
            StepKind::Rup(m) => {
                let refs: Vec<&Clause> = db[slot(m)].iter().collect();
                if !is_rup(&refs, c) {
                    return false;
                }
                db[slot(m)].push(c.clone());
            }
            StepKind::Copy { src, dst } => {
                let refs: Vec<&Clause> = db[slot(src)].iter().collect();
                if !is_rup(&refs, c) {
                    return false;
                }
                db[slot(dst)].push(c.clone());
            }
            StepKind::Delete(m) => match db[slot(m)].iter().position(|d| d == c) {
                Some(k) => {
                    db[slot(m)].remove(k);
                }
                None => return false,
            },
        }
    }
    matches!(
        proof.steps.last(),
        Some(s) if s.clause.is_empty() && s.kind.target() == ModuleId::Main && s.kind.is_addition()
    )
}

/// Chronological backtracking search with naive propagation. Returns a
/// model over variables `1..=n_vars`.
pub fn dpll(clauses: &[Clause], n_vars: usize) -> Option<Vec<bool>> {
    let refs: Vec<&Clause> = clauses.iter().collect();
    let mut a: Partial = vec![None; n_vars + 1];
    if search(&refs, &mut a) {
        Some(a.iter().map(|v| v.unwrap_or(false)).collect())
    } else {
        None
    }
}

fn search(clauses: &[&Clause], a: &mut Partial) -> bool {
    if !propagate(clauses, a) {
        return false;
    }
    let Some(v) = (1..a.len()).find(|&v| a[v].is_none()) else {
        return true;
    };
    for b in [true, false] {
        let mut next = a.clone();
        next[v] = Some(b);
        if search(clauses, &mut next) {
            *a = next;
            return true;
        }
    }
    false
}

/// Clauses equisatisfiable with `itp` (when `positive`) or with its
/// negation, over fresh variables above `base`.
fn encode(itp: &Interpolant, positive: bool, base: usize) -> (Vec<Clause>, usize) {
    let mut next = base;
    let mut fresh = || {
        next += 1;
        next as i32
    };
    let mut out = Vec::new();
    if positive {
        // each implication: some antecedent clause false, or the consequent
        for imp in &itp.implications {
            let mut big: Vec<i32> = imp.consequent.to_dimacs();
            for c in &imp.antecedent {
                let f = fresh();
                for l in c.to_dimacs() {
                    out.push(Clause::from_dimacs(&[-f, -l]));
                }
                big.push(f);
            }
            out.push(Clause::from_dimacs(&big));
        }
    } else {
        // some implication has every antecedent clause true and a false consequent
        let mut pick = Vec::new();
        for imp in &itp.implications {
            let t = fresh();
            for c in &imp.antecedent {
                let mut lits = c.to_dimacs();
                lits.push(-t);
                out.push(Clause::from_dimacs(&lits));
            }
            for l in imp.consequent.to_dimacs() {
                out.push(Clause::from_dimacs(&[-t, -l]));
            }
            pick.push(t);
        }
        out.push(Clause::from_dimacs(&pick));
    }
    (out, next)
}

/// Independent interpolant check by search: vocabulary within the
/// interface, Φ_s ∧ ¬itp unsatisfiable, itp ∧ Φ_m unsatisfiable.
pub fn interpolant_holds(itp: &Interpolant, pf: &PartitionedFormula) -> bool {
    if !itp.vars().iter().all(|v| pf.interface.contains(v)) {
        return false;
    }
    let (neg, n1) = encode(itp, false, pf.n_vars);
    let mut a = pf.secondary.clone();
    a.extend(neg);
    if dpll(&a, n1).is_some() {
        return false;
    }
    let (pos, n2) = encode(itp, true, pf.n_vars);
    let mut b = pf.main.clone();
    b.extend(pos);
    dpll(&b, n2).is_none()
}
