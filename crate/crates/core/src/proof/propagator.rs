use std::collections::HashMap;

use crate::formula::{Clause, Lit};

struct Stored {
    lits: Vec<Lit>,
    canon: Clause,
    alive: bool,
}

/// Result of a reverse-unit-propagation check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RupOutcome {
    /// Propagation conflicted. `cone` holds the ids of the conflict clause and
    /// every antecedent reachable from it in the implication graph.
    Refuted { cone: Vec<usize> },
    NotRefuted,
}

impl RupOutcome {
    pub fn is_refuted(&self) -> bool {
        matches!(self, RupOutcome::Refuted { .. })
    }
}

/// A clause store with watched-literal unit propagation used to replay
/// proofs. Clauses are never physically removed: deleting only flips a
/// liveness flag, so a deleted clause can be revived in place.
#[derive(Default)]
pub struct UnitPropagator {
    clauses: Vec<Stored>,
    watches: Vec<Vec<usize>>,
    units: Vec<usize>,
    empties: Vec<usize>,
    index: HashMap<Clause, Vec<usize>>,
    // scratch state for a single check
    value: Vec<i8>,
    reason: Vec<Option<usize>>,
    trail: Vec<Lit>,
}

impl UnitPropagator {
    pub fn new() -> Self {
        Self::default()
    }

    fn ensure_var(&mut self, lit: Lit) {
        let need = lit.var().index() + 1;
        if self.value.len() < need {
            self.value.resize(need, 0);
            self.reason.resize(need, None);
            self.watches.resize(2 * need, Vec::new());
        }
    }

    /// Adds a clause and returns its id.
    pub fn add(&mut self, clause: &Clause) -> usize {
        for &l in clause.lits() {
            self.ensure_var(l);
        }
        let id = self.clauses.len();
        let lits = clause.lits().to_vec();
        match lits.len() {
            0 => self.empties.push(id),
            1 => self.units.push(id),
            _ => {
                self.watches[lits[0].code()].push(id);
                self.watches[lits[1].code()].push(id);
            }
        }
        self.clauses.push(Stored {
            lits,
            canon: clause.clone(),
            alive: true,
        });
        self.index.entry(clause.clone()).or_default().push(id);
        id
    }

    /// Marks the most recently added live copy of `clause` as deleted.
    pub fn remove_one(&mut self, clause: &Clause) -> Option<usize> {
        let id = self.find_alive(clause)?;
        self.clauses[id].alive = false;
        Some(id)
    }

    pub fn set_alive(&mut self, id: usize, alive: bool) {
        self.clauses[id].alive = alive;
    }

    pub fn is_alive(&self, id: usize) -> bool {
        self.clauses[id].alive
    }

    pub fn contains(&self, clause: &Clause) -> bool {
        self.find_alive(clause).is_some()
    }

    /// Id of the most recently added live copy of `clause`.
    pub fn find_alive(&self, clause: &Clause) -> Option<usize> {
        self.index
            .get(clause)?
            .iter()
            .rev()
            .copied()
            .find(|&id| self.clauses[id].alive)
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn clause(&self, id: usize) -> &Clause {
        &self.clauses[id].canon
    }

    pub fn active_clauses(&self) -> impl Iterator<Item = &Clause> {
        self.clauses.iter().filter(|c| c.alive).map(|c| &c.canon)
    }

    #[inline]
    fn lit_value(&self, l: Lit) -> i8 {
        let v = self.value[l.var().index()];
        if l.is_positive() {
            v
        } else {
            -v
        }
    }

    fn assign(&mut self, l: Lit, reason: Option<usize>) {
        self.value[l.var().index()] = if l.is_positive() { 1 } else { -1 };
        self.reason[l.var().index()] = reason;
        self.trail.push(l);
    }

    fn reset(&mut self) {
        for l in self.trail.drain(..) {
            self.value[l.var().index()] = 0;
            self.reason[l.var().index()] = None;
        }
    }

    /// Checks whether asserting the negation of `clause` and propagating over
    /// the live clauses yields a conflict.
    pub fn check_rup(&mut self, clause: &Clause) -> RupOutcome {
        for &l in clause.lits() {
            self.ensure_var(l);
        }
        let conflict = self.propagate_from(clause);
        let outcome = match conflict {
            Some(Some(k)) => RupOutcome::Refuted {
                cone: self.cone(k),
            },
            Some(None) => RupOutcome::Refuted { cone: Vec::new() },
            None => RupOutcome::NotRefuted,
        };
        self.reset();
        outcome
    }

    /// `Some(Some(id))`: conflict in clause `id`; `Some(None)`: the negated
    /// clause is itself contradictory; `None`: no conflict.
    fn propagate_from(&mut self, clause: &Clause) -> Option<Option<usize>> {
        if let Some(&id) = self.empties.iter().find(|&&id| self.clauses[id].alive) {
            return Some(Some(id));
        }
        for &l in clause.lits() {
            match self.lit_value(!l) {
                1 => {}
                -1 => return Some(None),
                _ => self.assign(!l, None),
            }
        }
        for i in 0..self.units.len() {
            let id = self.units[i];
            if !self.clauses[id].alive {
                continue;
            }
            let l = self.clauses[id].lits[0];
            match self.lit_value(l) {
                1 => {}
                -1 => return Some(Some(id)),
                _ => self.assign(l, Some(id)),
            }
        }

        let mut head = 0;
        while head < self.trail.len() {
            let p = self.trail[head];
            head += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let mut i = 0;
            let mut conflict = None;
            while i < ws.len() {
                let id = ws[i];
                if !self.clauses[id].alive {
                    i += 1;
                    continue;
                }
                {
                    let lits = &mut self.clauses[id].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[id].lits[0];
                if self.lit_value(first) == 1 {
                    i += 1;
                    continue;
                }
                let len = self.clauses[id].lits.len();
                let mut moved = false;
                for k in 2..len {
                    let cand = self.clauses[id].lits[k];
                    if self.lit_value(cand) != -1 {
                        self.clauses[id].lits.swap(1, k);
                        self.watches[cand.code()].push(id);
                        ws.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                if self.lit_value(first) == -1 {
                    conflict = Some(id);
                    break;
                }
                self.assign(first, Some(id));
                i += 1;
            }
            // watches pushed while `ws` was taken belong to other literals
            let pushed = std::mem::replace(&mut self.watches[false_lit.code()], ws);
            self.watches[false_lit.code()].extend(pushed);
            if let Some(id) = conflict {
                return Some(Some(id));
            }
        }
        None
    }

    fn cone(&self, conflict: usize) -> Vec<usize> {
        let mut seen_clause = vec![false; self.clauses.len()];
        let mut seen_var = vec![false; self.value.len()];
        let mut stack = vec![conflict];
        let mut out = Vec::new();
        seen_clause[conflict] = true;
        while let Some(id) = stack.pop() {
            out.push(id);
            for &l in &self.clauses[id].lits {
                let v = l.var().index();
                if seen_var[v] {
                    continue;
                }
                seen_var[v] = true;
                if let Some(r) = self.reason[v] {
                    if r != id && !seen_clause[r] {
                        seen_clause[r] = true;
                        stack.push(r);
                    }
                }
            }
        }
        out
    }
}
