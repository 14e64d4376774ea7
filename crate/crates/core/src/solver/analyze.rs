use super::{ClauseRef, ModuleSolver, Provenance, Reason};
use crate::formula::{Clause, Lit, Var};
use crate::proof::{ProofSink, ProofStep};

/// Outcome of conflict analysis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Analysis {
    /// An asserting clause and the level at which it becomes unit. The empty
    /// clause comes with level 0.
    Learned { clause: Clause, backjump: u32 },
    /// The other module could not explain an external literal with an
    /// interface clause. Carries the literal as it occurs in the clause being
    /// resolved, i.e. the negation of the trail literal.
    Refine(Lit),
}

impl ModuleSolver {
    /// Highest level among the literals of a clause.
    pub fn max_level(&self, lits: &[Lit]) -> u32 {
        lits.iter()
            .map(|l| self.var_level(l.var()))
            .max()
            .unwrap_or(0)
    }

    /// Explains the true literal `lit` by resolving backwards through local
    /// reasons. Interface literals are leaves unless they sit at level 0 with
    /// a local reason; decisions are leaves. The returned clause contains
    /// `lit` and the negated leaves; it holds no non-interface literal exactly
    /// when the explanation reached no local decision. `None` when `lit`
    /// itself has no local reason.
    pub fn analyze_final(&mut self, lit: Lit) -> Option<Clause> {
        match self.reason(lit.var()) {
            Reason::Clause(_) => {}
            _ => return None,
        }
        Some(self.explain(&[lit], true))
    }

    /// Explains a falsified clause: the result blocks the assignment that
    /// falsifies it, over leaves chosen as in [`Self::analyze_final`].
    pub fn analyze_final_conflict(&mut self, conflict: ClauseRef) -> Clause {
        let seeds: Vec<Lit> = self.clause_lits(conflict).iter().map(|&l| !l).collect();
        self.explain(&seeds, false)
    }

    fn explain(&mut self, seeds: &[Lit], keep_first: bool) -> Clause {
        let mut out = Vec::new();
        let mut marked = Vec::new();
        let mut top = 0;
        for &s in seeds {
            let v = s.var();
            if !self.seen[v.index()] {
                self.seen[v.index()] = true;
                marked.push(v);
                top = top.max(self.trail_pos(v) + 1);
            }
        }
        let seed = if keep_first { Some(seeds[0]) } else { None };
        if let Some(p) = seed {
            out.push(p);
        }
        for i in (0..top).rev() {
            let e = self.trail()[i];
            let Some(q) = e.lit else { continue };
            let v = q.var();
            if !self.seen[v.index()] {
                continue;
            }
            let expand = match e.reason {
                Reason::Clause(c) if Some(q) == seed || !self.is_interface(v) || e.level == 0 => {
                    Some(c)
                }
                _ => None,
            };
            match expand {
                Some(c) => {
                    for k in 0..self.clause_lits(c).len() {
                        let rv = self.clause_lits(c)[k].var();
                        if rv != v && !self.seen[rv.index()] {
                            self.seen[rv.index()] = true;
                            marked.push(rv);
                        }
                    }
                }
                None => {
                    if Some(q) != seed {
                        out.push(!q);
                    }
                }
            }
        }
        for v in marked {
            self.seen[v.index()] = false;
        }
        Clause::new(out)
    }

    /// Gives every level-0 literal reachable from `v` a local clause reason,
    /// copying explanations from `other` for external ones.
    pub(crate) fn root_justify(
        &mut self,
        v: Var,
        mut other: Option<&mut ModuleSolver>,
        sink: &mut dyn ProofSink,
    ) {
        let mut stack = vec![v];
        while let Some(v) = stack.pop() {
            if self.is_local0(v) || self.fixed(v).is_none() {
                continue;
            }
            debug_assert_eq!(self.var_level(v), 0);
            self.set_local0(v);
            let lit = v.lit(self.fixed(v).unwrap());
            let cref = match self.reason(v) {
                Reason::Clause(c) => c,
                Reason::Ext => {
                    let o = other.as_deref_mut().expect("external literal without a source");
                    let c = o
                        .analyze_final(lit)
                        .expect("level-0 literal is explained by its source");
                    debug_assert!(self.interface_clause(&c));
                    self.import(&c, o, sink, v)
                }
                r => unreachable!("level-0 literal with reason {r:?}"),
            };
            for &r in self.clause_lits(cref) {
                if r.var() != v {
                    stack.push(r.var());
                }
            }
        }
    }

    /// Adds a clause copied from `other` as the reason of `v`.
    fn import(
        &mut self,
        c: &Clause,
        other: &ModuleSolver,
        sink: &mut dyn ProofSink,
        v: Var,
    ) -> ClauseRef {
        if !self.contains_clause(c) {
            sink.log(ProofStep::copy(other.id, c.clone()));
        }
        let cref = self.add_clause(c, Provenance::Copied(other.id));
        self.set_reason(v, Reason::Clause(cref));
        cref
    }

    /// First-UIP analysis of a conflict at the current level. Reasons of
    /// external literals are requested from `other` on demand. Level-0
    /// literals are dropped when locally derivable and kept otherwise; a
    /// conflict at level 0 first imports explanations for every external
    /// level-0 literal it depends on and yields the empty clause.
    pub fn analyze_conflict(
        &mut self,
        conflict: ClauseRef,
        mut other: Option<&mut ModuleSolver>,
        sink: &mut dyn ProofSink,
    ) -> Analysis {
        let cur = self.level();
        debug_assert_eq!(self.max_level(self.clause_lits(conflict)), cur);
        if cur == 0 {
            let roots: Vec<Var> = self.clause_lits(conflict).iter().map(|l| l.var()).collect();
            for v in roots {
                self.root_justify(v, other.as_deref_mut(), sink);
            }
            return Analysis::Learned {
                clause: Clause::empty(),
                backjump: 0,
            };
        }

        let mut learnt: Vec<Lit> = Vec::new();
        let mut marked: Vec<Var> = Vec::new();
        let mut path = 0usize;
        let mut idx = self.trail().len();
        let mut reason_lits: Vec<Lit> = self.clause_lits(conflict).to_vec();
        let mut pivot: Option<Var> = None;
        let uip = loop {
            for &q in &reason_lits {
                let v = q.var();
                if Some(v) == pivot || self.seen[v.index()] {
                    continue;
                }
                let lvl = self.var_level(v);
                if lvl == 0 && self.is_local0(v) {
                    continue;
                }
                self.seen[v.index()] = true;
                marked.push(v);
                self.bump(v);
                if lvl == cur {
                    path += 1;
                } else {
                    learnt.push(q);
                }
            }
            let p = loop {
                idx -= 1;
                if let Some(l) = self.trail()[idx].lit {
                    if self.seen[l.var().index()] {
                        break l;
                    }
                }
            };
            self.seen[p.var().index()] = false;
            path -= 1;
            if path == 0 {
                break p;
            }
            pivot = Some(p.var());
            reason_lits = match self.reason(p.var()) {
                Reason::Clause(c) => self.clause_lits(c).to_vec(),
                Reason::Ext => {
                    let o = other.as_deref_mut().expect("external literal without a source");
                    match o.analyze_final(p) {
                        Some(c) if o.interface_clause(&c) => {
                            let cref = self.import(&c, o, sink, p.var());
                            self.clause_lits(cref).to_vec()
                        }
                        _ => {
                            for v in marked {
                                self.seen[v.index()] = false;
                            }
                            return Analysis::Refine(!p);
                        }
                    }
                }
                r => unreachable!("non-UIP literal at conflict level with reason {r:?}"),
            };
        };
        for v in marked {
            self.seen[v.index()] = false;
        }
        self.decay();
        let backjump = self.max_level(&learnt);
        learnt.push(!uip);
        Analysis::Learned {
            clause: Clause::new(learnt),
            backjump,
        }
    }
}
