//! A single CDCL module: watched literals, VSIDS with phase saving, trail
//! entries for external literals and level placeholders, and the
//! inter-modular analysis hooks.

use std::collections::HashMap;

use crate::formula::{Clause, Lit, ModuleId, Var};

mod analyze;
mod order;
mod standalone;

pub use analyze::Analysis;
pub use standalone::solve_cnf;

use order::VarOrder;

pub type ClauseRef = usize;

/// Why a trail entry is there.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reason {
    Decision,
    /// Level placeholder with no assignment.
    Null,
    /// Justified by the other module.
    Ext,
    Clause(ClauseRef),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrailEntry {
    pub lit: Option<Lit>,
    pub level: u32,
    pub reason: Reason,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Asserted,
    Learned,
    Copied(ModuleId),
}

struct ClauseData {
    lits: Vec<Lit>,
    canon: Clause,
    provenance: Provenance,
    deleted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LBool {
    True,
    False,
    Undef,
}

pub struct ModuleSolver {
    pub id: ModuleId,
    n_vars: usize,
    interface: Vec<bool>,
    value: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<Reason>,
    trail_pos: Vec<usize>,
    trail: Vec<TrailEntry>,
    trail_lim: Vec<usize>,
    qhead: usize,
    export_head: usize,
    clauses: Vec<ClauseData>,
    watches: Vec<Vec<ClauseRef>>,
    index: HashMap<Clause, ClauseRef>,
    units: Vec<ClauseRef>,
    /// Clauses whose implied literal sits above the level of the others.
    late: Vec<ClauseRef>,
    decision_var: Vec<bool>,
    order: VarOrder,
    phase: Vec<bool>,
    pending_conflict: Option<ClauseRef>,
    /// Level-0 literals derivable by propagation over local clauses alone.
    local0: Vec<bool>,
    pub(crate) seen: Vec<bool>,
    pub decisions: u64,
    pub propagations: u64,
}

impl ModuleSolver {
    /// `interface` is indexed by variable and sized `n_vars + 1`.
    pub fn new(id: ModuleId, n_vars: usize, interface: Vec<bool>) -> Self {
        assert_eq!(interface.len(), n_vars + 1);
        ModuleSolver {
            id,
            n_vars,
            interface,
            value: vec![0; n_vars + 1],
            level: vec![0; n_vars + 1],
            reason: vec![Reason::Null; n_vars + 1],
            trail_pos: vec![0; n_vars + 1],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            export_head: 0,
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * (n_vars + 1)],
            index: HashMap::new(),
            units: Vec::new(),
            late: Vec::new(),
            decision_var: vec![false; n_vars + 1],
            order: VarOrder::new(n_vars),
            phase: vec![true; n_vars + 1],
            pending_conflict: None,
            local0: vec![false; n_vars + 1],
            seen: vec![false; n_vars + 1],
            decisions: 0,
            propagations: 0,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn is_interface(&self, v: Var) -> bool {
        self.interface[v.index()]
    }

    pub fn interface_clause(&self, c: &Clause) -> bool {
        c.vars().all(|v| self.is_interface(v))
    }

    pub fn level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    pub fn trail(&self) -> &[TrailEntry] {
        &self.trail
    }

    #[inline]
    pub fn value(&self, l: Lit) -> LBool {
        let v = self.value[l.var().index()];
        match (v, l.is_positive()) {
            (0, _) => LBool::Undef,
            (1, true) | (-1, false) => LBool::True,
            _ => LBool::False,
        }
    }

    #[inline]
    fn is_false(&self, l: Lit) -> bool {
        self.value(l) == LBool::False
    }

    /// Current value of `v`, if assigned.
    pub fn fixed(&self, v: Var) -> Option<bool> {
        match self.value[v.index()] {
            0 => None,
            x => Some(x > 0),
        }
    }

    pub fn var_level(&self, v: Var) -> u32 {
        self.level[v.index()]
    }

    pub fn reason(&self, v: Var) -> Reason {
        self.reason[v.index()]
    }

    pub fn clause_lits(&self, cref: ClauseRef) -> &[Lit] {
        &self.clauses[cref].lits
    }

    pub fn clause(&self, cref: ClauseRef) -> &Clause {
        &self.clauses[cref].canon
    }

    pub fn provenance(&self, cref: ClauseRef) -> Provenance {
        self.clauses[cref].provenance
    }

    pub fn contains_clause(&self, c: &Clause) -> bool {
        self.index
            .get(c)
            .is_some_and(|&cref| !self.clauses[cref].deleted)
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.iter().filter(|c| !c.deleted).count()
    }

    pub fn is_decision_var(&self, v: Var) -> bool {
        self.decision_var[v.index()]
    }

    /// Live clauses, for checks and tests.
    pub fn clauses(&self) -> impl Iterator<Item = &Clause> {
        self.clauses.iter().filter(|c| !c.deleted).map(|c| &c.canon)
    }

    /// Adds a clause and installs its watches against the current trail. A
    /// clause that is unit under the trail enqueues its literal; a falsified
    /// one becomes the conflict reported by the next `propagate`. Clauses
    /// already present are not duplicated and their existing id is returned.
    pub fn add_clause(&mut self, clause: &Clause, provenance: Provenance) -> ClauseRef {
        if let Some(&cref) = self.index.get(clause) {
            if !self.clauses[cref].deleted {
                self.rewatch(cref);
                self.settle(cref);
                return cref;
            }
        }
        for v in clause.vars() {
            assert!(v.index() <= self.n_vars, "variable {v} out of range");
            if !self.decision_var[v.index()] {
                self.decision_var[v.index()] = true;
                self.order.insert(v.index());
            }
        }
        let cref = self.clauses.len();
        let mut lits = clause.lits().to_vec();
        self.watch_order(&mut lits);
        if lits.len() >= 2 {
            self.watches[lits[0].code()].push(cref);
            self.watches[lits[1].code()].push(cref);
        } else if lits.len() == 1 {
            self.units.push(cref);
        }
        self.clauses.push(ClauseData {
            lits,
            canon: clause.clone(),
            provenance,
            deleted: false,
        });
        self.index.insert(clause.clone(), cref);
        self.settle(cref);
        cref
    }

    /// Watch order: true, then unassigned, then false by decreasing level.
    fn watch_order(&self, lits: &mut [Lit]) {
        lits.sort_by_key(|&l| match self.value(l) {
            LBool::True => (0, 0),
            LBool::Undef => (1, 0),
            LBool::False => (2, u32::MAX - self.level[l.var().index()]),
        });
    }

    /// Moves the watches of an existing clause to the best pair under the
    /// current trail.
    fn rewatch(&mut self, cref: ClauseRef) {
        if self.clauses[cref].lits.len() < 2 {
            return;
        }
        let mut lits = std::mem::take(&mut self.clauses[cref].lits);
        for &w in &lits[..2] {
            self.watches[w.code()].retain(|&c| c != cref);
        }
        self.watch_order(&mut lits);
        self.watches[lits[0].code()].push(cref);
        self.watches[lits[1].code()].push(cref);
        self.clauses[cref].lits = lits;
    }

    /// Enqueues or records a conflict for a clause that is unit or falsified.
    fn settle(&mut self, cref: ClauseRef) {
        let lits = &self.clauses[cref].lits;
        if lits.is_empty() {
            self.pending_conflict.get_or_insert(cref);
            return;
        }
        if self.value(lits[0]) == LBool::True {
            return;
        }
        let rest_false = lits[1..].iter().all(|&l| self.is_false(l));
        if !rest_false {
            return;
        }
        let first = lits[0];
        if self.value(first) == LBool::Undef {
            let below = self.max_level(&lits[1..]);
            if lits.len() > 1 && below < self.level() {
                self.late.push(cref);
            }
            self.assign(first, Reason::Clause(cref));
        } else {
            self.pending_conflict.get_or_insert(cref);
        }
    }

    /// Marks a learned clause deleted. Reasons of assigned literals are kept.
    pub fn delete_clause(&mut self, cref: ClauseRef) -> bool {
        let data = &self.clauses[cref];
        if data.deleted || data.provenance == Provenance::Asserted {
            return false;
        }
        if let Some(&l) = data.lits.first() {
            if self.value(l) == LBool::True && self.reason[l.var().index()] == Reason::Clause(cref)
            {
                return false;
            }
        }
        self.clauses[cref].deleted = true;
        self.index.remove(&self.clauses[cref].canon.clone());
        true
    }

    fn assign(&mut self, l: Lit, reason: Reason) {
        let v = l.var().index();
        debug_assert_eq!(self.value[v], 0);
        self.value[v] = if l.is_positive() { 1 } else { -1 };
        self.level[v] = self.level();
        self.reason[v] = reason;
        self.trail_pos[v] = self.trail.len();
        self.local0[v] = match reason {
            Reason::Clause(c) if self.trail_lim.is_empty() => self.clauses[c]
                .lits
                .iter()
                .all(|r| r.var().index() == v || self.local0[r.var().index()]),
            _ => false,
        };
        self.trail.push(TrailEntry {
            lit: Some(l),
            level: self.level(),
            reason,
        });
    }

    /// Puts `l` on the trail at the current level. Returns false when `l` is
    /// already false.
    pub fn enqueue(&mut self, l: Lit, reason: Reason) -> bool {
        match self.value(l) {
            LBool::True => true,
            LBool::False => false,
            LBool::Undef => {
                self.assign(l, reason);
                true
            }
        }
    }

    pub fn decide(&mut self, l: Lit) {
        assert_eq!(self.value(l), LBool::Undef, "deciding an assigned literal");
        self.trail_lim.push(self.trail.len());
        self.decisions += 1;
        self.assign(l, Reason::Decision);
    }

    /// Opens a new level without assigning anything.
    pub fn push_null(&mut self) {
        self.trail_lim.push(self.trail.len());
        self.trail.push(TrailEntry {
            lit: None,
            level: self.level(),
            reason: Reason::Null,
        });
    }

    pub fn has_pending(&self) -> bool {
        self.qhead < self.trail.len() || self.pending_conflict.is_some()
    }

    /// Unit propagation to fixpoint. Returns the first falsified clause.
    pub fn propagate(&mut self) -> Option<ClauseRef> {
        if let Some(c) = self.pending_conflict.take() {
            return Some(c);
        }
        while self.qhead < self.trail.len() {
            let entry = self.trail[self.qhead];
            self.qhead += 1;
            let Some(p) = entry.lit else { continue };
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let mut i = 0;
            let mut conflict = None;
            while i < ws.len() {
                let cref = ws[i];
                if self.clauses[cref].deleted {
                    ws.swap_remove(i);
                    continue;
                }
                if self.clauses[cref].lits[0] == false_lit {
                    self.clauses[cref].lits.swap(0, 1);
                }
                let first = self.clauses[cref].lits[0];
                if self.value(first) == LBool::True {
                    i += 1;
                    continue;
                }
                let len = self.clauses[cref].lits.len();
                let mut moved = false;
                for k in 2..len {
                    let cand = self.clauses[cref].lits[k];
                    if !self.is_false(cand) {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[cand.code()].push(cref);
                        ws.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                if self.is_false(first) {
                    conflict = Some(cref);
                    break;
                }
                self.propagations += 1;
                self.assign(first, Reason::Clause(cref));
                i += 1;
            }
            let pushed = std::mem::replace(&mut self.watches[false_lit.code()], ws);
            self.watches[false_lit.code()].extend(pushed);
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    /// Locally derived interface literals not yet handed to the other module.
    pub fn take_exports(&mut self) -> Vec<Lit> {
        let mut out = Vec::new();
        while self.export_head < self.trail.len() {
            let e = self.trail[self.export_head];
            self.export_head += 1;
            if let Some(l) = e.lit {
                if e.reason != Reason::Ext && self.interface[l.var().index()] {
                    out.push(l);
                }
            }
        }
        out
    }

    /// Removes every entry above `level`, then re-enqueues unit clauses that
    /// became unassigned.
    pub fn backjump(&mut self, level: u32) {
        if level >= self.level() {
            return;
        }
        let start = self.trail_lim[level as usize];
        for e in self.trail.drain(start..) {
            if let Some(l) = e.lit {
                let v = l.var().index();
                self.phase[v] = l.is_positive();
                self.value[v] = 0;
                self.reason[v] = Reason::Null;
                if self.decision_var[v] {
                    self.order.insert(v);
                }
            }
        }
        self.trail_lim.truncate(level as usize);
        self.qhead = self.qhead.min(self.trail.len());
        self.export_head = self.export_head.min(self.trail.len());
        self.pending_conflict = None;
        for i in 0..self.units.len() {
            let cref = self.units[i];
            if !self.clauses[cref].deleted {
                self.settle(cref);
            }
        }
        for cref in std::mem::take(&mut self.late) {
            if self.clauses[cref].deleted {
                continue;
            }
            let lits = &self.clauses[cref].lits;
            if self.value(lits[0]) == LBool::True {
                if self.level[lits[0].var().index()] > self.max_level(&lits[1..]) {
                    self.late.push(cref);
                }
            } else {
                self.rewatch(cref);
                self.settle(cref);
            }
        }
    }

    /// Unassigned decision variable of highest activity, with its saved
    /// phase. Variables in `prefer` are tried first, in order.
    pub fn pick_branch(&mut self, prefer: &[Var]) -> Option<Lit> {
        for &v in prefer {
            if v.index() <= self.n_vars && self.decision_var[v.index()] && self.fixed(v).is_none()
            {
                return Some(v.lit(self.phase[v.index()]));
            }
        }
        while let Some(v) = self.order.pop() {
            if self.value[v] == 0 && self.decision_var[v] {
                return Some(Var::new(v as u32).lit(self.phase[v]));
            }
        }
        None
    }

    /// True when every variable occurring in this module's clauses is
    /// assigned and nothing is left to propagate.
    pub fn is_full(&self) -> bool {
        !self.has_pending()
            && (1..=self.n_vars).all(|v| !self.decision_var[v] || self.value[v] != 0)
    }

    pub(crate) fn bump(&mut self, v: Var) {
        self.order.bump(v.index());
    }

    pub(crate) fn decay(&mut self) {
        self.order.decay();
    }

    /// Assigned literals, Null entries skipped.
    pub fn assigned(&self) -> impl Iterator<Item = (Lit, Reason, u32)> + '_ {
        self.trail
            .iter()
            .filter_map(|e| e.lit.map(|l| (l, e.reason, e.level)))
    }

    pub(crate) fn set_reason(&mut self, v: Var, r: Reason) {
        self.reason[v.index()] = r;
        let pos = self.trail_pos[v.index()];
        self.trail[pos].reason = r;
    }

    pub(crate) fn trail_pos(&self, v: Var) -> usize {
        self.trail_pos[v.index()]
    }

    pub(crate) fn is_local0(&self, v: Var) -> bool {
        self.local0[v.index()]
    }

    pub(crate) fn set_local0(&mut self, v: Var) {
        self.local0[v.index()] = true;
    }

    /// Drops a conflict recorded by `add_clause`, once the caller handles it.
    pub fn clear_conflict(&mut self) {
        self.pending_conflict = None;
    }

    /// Checks that every non-unit live clause has two non-false watches or is
    /// satisfied. Only meaningful right after a conflict-free `propagate`.
    pub fn watches_ok(&self) -> bool {
        self.clauses.iter().enumerate().all(|(cref, c)| {
            if c.deleted || c.lits.len() < 2 {
                return true;
            }
            let watched = |l: Lit| self.watches[l.code()].contains(&cref);
            if !(watched(c.lits[0]) && watched(c.lits[1])) {
                return false;
            }
            let sat = c.lits.iter().any(|&l| self.value(l) == LBool::True);
            sat || (!self.is_false(c.lits[0]) && !self.is_false(c.lits[1]))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solver(n: usize) -> ModuleSolver {
        ModuleSolver::new(ModuleId::Main, n, vec![false; n + 1])
    }

    fn l(x: i32) -> Lit {
        Lit::from_dimacs(x)
    }

    #[test]
    fn decide_propagate_backjump() {
        let mut s = solver(4);
        s.add_clause(&Clause::from_dimacs(&[-1, 2]), Provenance::Asserted);
        s.add_clause(&Clause::from_dimacs(&[-2, 3, 4]), Provenance::Asserted);
        s.decide(l(1));
        assert_eq!(s.propagate(), None);
        assert_eq!(s.fixed(Var::new(2)), Some(true));
        s.decide(l(-3));
        assert_eq!(s.propagate(), None);
        assert_eq!(s.fixed(Var::new(4)), Some(true));
        assert!(s.watches_ok());
        s.backjump(1);
        assert_eq!(s.fixed(Var::new(4)), None);
        assert_eq!(s.fixed(Var::new(2)), Some(true));
        s.backjump(0);
        assert!(s.trail().is_empty());
    }

    #[test]
    fn null_entries_hold_levels() {
        let mut s = solver(2);
        s.push_null();
        s.push_null();
        assert_eq!(s.level(), 2);
        assert!(s.assigned().next().is_none());
        s.backjump(1);
        assert_eq!(s.level(), 1);
    }

    #[test]
    fn conflicting_units() {
        let mut s = solver(1);
        s.add_clause(&Clause::from_dimacs(&[1]), Provenance::Asserted);
        let c = s.add_clause(&Clause::from_dimacs(&[-1]), Provenance::Asserted);
        assert_eq!(s.propagate(), Some(c));
    }

    #[test]
    fn duplicate_clause_is_shared() {
        let mut s = solver(2);
        let a = s.add_clause(&Clause::from_dimacs(&[1, 2]), Provenance::Asserted);
        let b = s.add_clause(&Clause::from_dimacs(&[2, 1]), Provenance::Learned);
        assert_eq!(a, b);
        assert_eq!(s.num_clauses(), 1);
    }

    #[test]
    fn fixed_reflects_trail() {
        let mut s = solver(3);
        s.add_clause(&Clause::from_dimacs(&[1, 2, 3]), Provenance::Asserted);
        assert_eq!(s.fixed(Var::new(1)), None);
        s.decide(l(1));
        assert_eq!(s.fixed(Var::new(1)), Some(true));
        for (lit, _, _) in s.assigned() {
            assert_eq!(s.fixed(lit.var()), Some(lit.is_positive()));
        }
    }
}
