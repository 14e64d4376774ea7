//! Reference verdicts for small formulas, independent of the CDCL code.

use crate::error::{Error, Result};
use crate::formula::{Clause, PartitionedFormula};

/// Largest variable count for plain enumeration.
pub const ENUMERATION_LIMIT: usize = 20;
/// Largest variable count for the pruned search.
pub const SEARCH_LIMIT: usize = 60;

/// Plain enumeration of all assignments. Returns a model (indexed by
/// variable) if one exists.
pub fn enumerate(n_vars: usize, clauses: &[Clause]) -> Result<Option<Vec<bool>>> {
    if n_vars > ENUMERATION_LIMIT {
        return Err(Error::OracleTooLarge {
            vars: n_vars,
            limit: ENUMERATION_LIMIT,
        });
    }
    // clause as (positive mask, negative mask) over bit v-1
    let masks: Vec<(u32, u32)> = clauses
        .iter()
        .map(|c| {
            c.lits().iter().fold((0, 0), |(p, n), l| {
                let bit = 1u32 << (l.var().index() - 1);
                if l.is_positive() {
                    (p | bit, n)
                } else {
                    (p, n | bit)
                }
            })
        })
        .collect();
    for a in 0u32..(1u32 << n_vars) {
        if masks.iter().all(|&(p, n)| a & p != 0 || !a & n != 0) {
            return Ok(Some((0..=n_vars).map(|v| v > 0 && a >> (v - 1) & 1 == 1).collect()));
        }
    }
    Ok(None)
}

/// Exhaustive backtracking over variables `1..=n` in order, pruning a branch
/// as soon as a clause has all its variables assigned and is false.
pub fn search(n_vars: usize, clauses: &[Clause]) -> Result<Option<Vec<bool>>> {
    if n_vars > SEARCH_LIMIT {
        return Err(Error::OracleTooLarge {
            vars: n_vars,
            limit: SEARCH_LIMIT,
        });
    }
    if clauses.iter().any(Clause::is_empty) {
        return Ok(None);
    }
    let mut closing: Vec<Vec<&Clause>> = vec![Vec::new(); n_vars + 1];
    for c in clauses {
        let top = c.vars().map(|v| v.index()).max().unwrap_or(0);
        closing[top].push(c);
    }
    let mut value = vec![false; n_vars + 1];
    // next polarity to try per depth: 0 false, 1 true, 2 exhausted
    let mut tried = vec![0u8; n_vars + 2];
    let mut v = 1;
    while v >= 1 {
        if v > n_vars {
            return Ok(Some(value));
        }
        if tried[v] == 2 {
            tried[v] = 0;
            v -= 1;
            continue;
        }
        value[v] = tried[v] == 1;
        tried[v] += 1;
        if closing[v].iter().all(|c| c.eval(&value)) {
            v += 1;
        }
    }
    Ok(None)
}

/// Verdict for the conjunction of both parts: enumeration up to
/// [`ENUMERATION_LIMIT`] variables, the pruned search beyond.
pub fn oracle_solve(pf: &PartitionedFormula) -> Result<bool> {
    let all: Vec<Clause> = pf.secondary.iter().chain(&pf.main).cloned().collect();
    let model = if pf.n_vars <= ENUMERATION_LIMIT {
        enumerate(pf.n_vars, &all)?
    } else {
        search(pf.n_vars, &all)?
    };
    Ok(model.is_some())
}
