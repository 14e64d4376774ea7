//! The speculative control loop: drives the secondary and main module
//! solvers through the states
//!
//! ```text
//! <P,D0>  main decides, secondary propagates
//! <Di,P>  speculation from base level i: secondary decides
//! <F,DM>  validation: secondary finished at level M, main decides
//! <DN,F>  main finished at level N, secondary decides
//! <F,F>   both finished (sat)
//! unsat
//! ```
//!
//! With speculation disabled only `<P,D0>`, `<DN,F>` and the final states
//! are reachable and clauses flow from the secondary module to the main one.

use std::fmt;
use std::time::{Duration, Instant};

use crate::error::Result;
use crate::formula::{Clause, Lit, ModuleId, PartitionedFormula, Var};
use crate::guidance::{check_vars, Guidance, SolverView, SplitAdvice};
use crate::proof::{ModularProof, ProofSink, ProofStep, StepKind};
use crate::solver::{Analysis, ClauseRef, LBool, ModuleSolver, Provenance, Reason};

/// Global state of the control loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    MainDecide,
    Speculate { base: u32 },
    Validate { base: u32, entry: u32 },
    SecondaryDecide { entry: u32 },
    Sat,
    Unsat,
}

/// Mode without level annotations, for the transition automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateKind {
    MainDecide,
    Speculate,
    Validate,
    SecondaryDecide,
    Sat,
    Unsat,
}

impl Mode {
    pub fn kind(self) -> StateKind {
        match self {
            Mode::MainDecide => StateKind::MainDecide,
            Mode::Speculate { .. } => StateKind::Speculate,
            Mode::Validate { .. } => StateKind::Validate,
            Mode::SecondaryDecide { .. } => StateKind::SecondaryDecide,
            Mode::Sat => StateKind::Sat,
            Mode::Unsat => StateKind::Unsat,
        }
    }

    /// Level at which the current speculation started, if any.
    pub fn speculation_base(self) -> Option<u32> {
        match self {
            Mode::Speculate { base } | Mode::Validate { base, .. } => Some(base),
            _ => None,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::MainDecide => write!(f, "<P,D0>"),
            Mode::Speculate { base } => write!(f, "<D{base},P>"),
            Mode::Validate { entry, .. } => write!(f, "<F,D{entry}>"),
            Mode::SecondaryDecide { entry } => write!(f, "<D{entry},F>"),
            Mode::Sat => write!(f, "<F,F>"),
            Mode::Unsat => write!(f, "unsat"),
        }
    }
}

impl StateKind {
    /// Edges of the state diagram; staying in a state is always allowed.
    pub fn allows(self, to: StateKind) -> bool {
        use StateKind::*;
        self == to
            || matches!(
                (self, to),
                (MainDecide, Unsat)
                    | (MainDecide, Speculate)
                    | (MainDecide, SecondaryDecide)
                    | (Speculate, Validate)
                    | (Speculate, MainDecide)
                    | (Validate, MainDecide)
                    | (Validate, Sat)
                    | (SecondaryDecide, MainDecide)
                    | (SecondaryDecide, Sat)
            )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub from: Mode,
    pub to: Mode,
    pub reason: &'static str,
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} : {}", self.from, self.to, self.reason)
    }
}

/// Replays a transition log against the state diagram. Returns the index and
/// text of the first bad transition.
pub fn check_trace(trace: &[Transition]) -> std::result::Result<(), (usize, String)> {
    let mut cur = StateKind::MainDecide;
    for (i, t) in trace.iter().enumerate() {
        if t.from.kind() != cur {
            return Err((i, format!("{t} does not continue from {cur:?}")));
        }
        if !cur.allows(t.to.kind()) {
            return Err((i, format!("{t} is not an edge")));
        }
        cur = t.to.kind();
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Honour speculation requests from guidance. Off gives plain SMS.
    pub speculation: bool,
    pub max_conflicts: Option<u64>,
    pub time_limit: Option<Duration>,
    /// Record a modular proof.
    pub proof: bool,
    /// Record every state transition.
    pub trace: bool,
    /// Check level synchronisation and interface mirroring after every step.
    pub check_sync: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            speculation: true,
            max_conflicts: None,
            time_limit: None,
            proof: true,
            trace: false,
            check_sync: false,
        }
    }
}

impl SolverConfig {
    /// Speculation disabled.
    pub fn sms() -> Self {
        SolverConfig {
            speculation: false,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone)]
pub enum Verdict {
    /// Total model indexed by variable; entry 0 is unused.
    Sat(Vec<bool>),
    /// Modular proof; empty when proof logging is off.
    Unsat(ModularProof),
    /// A budget ran out.
    Indeterminate,
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, Verdict::Unsat(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Sat(_) => "SAT",
            Verdict::Unsat(_) => "UNSAT",
            Verdict::Indeterminate => "UNKNOWN",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stats {
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
    pub refinements: u64,
    pub speculations: u64,
    pub copies: u64,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub verdict: Verdict,
    pub stats: Stats,
    pub trace: Vec<Transition>,
    /// Literal forced in the main module after each refinement.
    pub refine_lits: Vec<Lit>,
    /// Descriptions of synchronisation breaches seen with `check_sync`.
    pub sync_violations: Vec<String>,
}

struct ProofLog {
    enabled: bool,
    proof: ModularProof,
    copies: u64,
}

impl ProofSink for ProofLog {
    fn log(&mut self, step: ProofStep) {
        if matches!(step.kind, StepKind::Copy { .. }) {
            self.copies += 1;
        }
        if self.enabled {
            self.proof.append_step(step);
        }
    }
}

/// Solves `pf`, consulting `guidance` before every decision.
pub fn solve(
    pf: &PartitionedFormula,
    guidance: &mut dyn Guidance,
    cfg: &SolverConfig,
) -> Result<SolveResult> {
    check_vars(guidance, pf.n_vars)?;
    Ok(Orchestrator::new(pf, guidance, cfg).run())
}

struct Orchestrator<'a> {
    s: ModuleSolver,
    m: ModuleSolver,
    n_vars: usize,
    interface: Vec<Var>,
    mode: Mode,
    guidance: &'a mut dyn Guidance,
    cfg: &'a SolverConfig,
    log: ProofLog,
    forced: Option<Lit>,
    last: ModuleId,
    stats: Stats,
    trace: Vec<Transition>,
    refine_lits: Vec<Lit>,
    sync_violations: Vec<String>,
}

enum Step {
    Continue,
    Done,
}

impl<'a> Orchestrator<'a> {
    fn new(pf: &PartitionedFormula, guidance: &'a mut dyn Guidance, cfg: &'a SolverConfig) -> Self {
        let mask = pf.interface_mask();
        let mut o = Orchestrator {
            s: ModuleSolver::new(ModuleId::Secondary, pf.n_vars, mask.clone()),
            m: ModuleSolver::new(ModuleId::Main, pf.n_vars, mask),
            n_vars: pf.n_vars,
            interface: pf.interface.iter().copied().collect(),
            mode: Mode::MainDecide,
            guidance,
            cfg,
            log: ProofLog {
                enabled: cfg.proof,
                proof: ModularProof::default(),
                copies: 0,
            },
            forced: None,
            last: ModuleId::Main,
            stats: Stats::default(),
            trace: Vec::new(),
            refine_lits: Vec::new(),
            sync_violations: Vec::new(),
        };
        for id in [ModuleId::Secondary, ModuleId::Main] {
            for c in pf.part(id) {
                o.log.log(ProofStep::asserted(id, c.clone()));
                o.solver_mut(id).add_clause(c, Provenance::Asserted);
            }
        }
        o
    }

    fn run(mut self) -> SolveResult {
        let start = Instant::now();
        let verdict = loop {
            if self.cfg.max_conflicts.is_some_and(|n| self.stats.conflicts >= n)
                || self.cfg.time_limit.is_some_and(|t| start.elapsed() >= t)
            {
                break Verdict::Indeterminate;
            }
            let step = match self.propagate_all() {
                Some((who, cref)) => {
                    self.stats.conflicts += 1;
                    self.handle_conflict(who, cref);
                    Step::Continue
                }
                None => {
                    if self.cfg.check_sync {
                        self.check_mirroring();
                    }
                    self.decide()
                }
            };
            if self.cfg.check_sync {
                self.check_levels();
            }
            match (step, self.mode) {
                (_, Mode::Unsat) => break Verdict::Unsat(std::mem::take(&mut self.log.proof)),
                (_, Mode::Sat) => break Verdict::Sat(self.model()),
                (Step::Done, _) => unreachable!("finished outside a final state"),
                (Step::Continue, _) => {}
            }
        };
        self.stats.decisions = self.s.decisions + self.m.decisions;
        self.stats.propagations = self.s.propagations + self.m.propagations;
        self.stats.copies = self.log.copies;
        SolveResult {
            verdict,
            stats: self.stats,
            trace: self.trace,
            refine_lits: self.refine_lits,
            sync_violations: self.sync_violations,
        }
    }

    fn solver(&self, id: ModuleId) -> &ModuleSolver {
        match id {
            ModuleId::Secondary => &self.s,
            ModuleId::Main => &self.m,
        }
    }

    fn solver_mut(&mut self, id: ModuleId) -> &mut ModuleSolver {
        match id {
            ModuleId::Secondary => &mut self.s,
            ModuleId::Main => &mut self.m,
        }
    }

    /// The solver `id`, the other one, and the proof log.
    fn parts(&mut self, id: ModuleId) -> (&mut ModuleSolver, &mut ModuleSolver, &mut ProofLog) {
        match id {
            ModuleId::Secondary => (&mut self.s, &mut self.m, &mut self.log),
            ModuleId::Main => (&mut self.m, &mut self.s, &mut self.log),
        }
    }

    fn goto(&mut self, to: Mode, reason: &'static str) {
        if self.cfg.trace && to != self.mode {
            self.trace.push(Transition {
                from: self.mode,
                to,
                reason,
            });
        }
        self.mode = to;
    }

    fn backjump_both(&mut self, level: u32) {
        self.s.backjump(level);
        self.m.backjump(level);
    }

    // ---------------------------------------------------------------- propagation

    /// Alternating propagation to a joint fixpoint, starting with the solver
    /// that enqueued last. Returns the module holding a falsified clause.
    fn propagate_all(&mut self) -> Option<(ModuleId, ClauseRef)> {
        'retry: loop {
            // literals assigned outside propagation (units re-enqueued after a
            // backjump) are mirrored before anyone propagates
            for from in [ModuleId::Secondary, ModuleId::Main] {
                let exports = self.solver_mut(from).take_exports();
                for l in exports {
                    if !Self::mirror(self.solver_mut(from.other()), l) {
                        match self.cross_conflict(from, l) {
                            Some(c) => return Some(c),
                            None => continue 'retry,
                        }
                    }
                }
            }
            let mut cur = self.last;
            loop {
                let (a, b, _) = self.parts(cur);
                let confl = a.propagate();
                let mut sent = false;
                for l in a.take_exports() {
                    sent |= b.value(l) == LBool::Undef;
                    let ok = Self::mirror(b, l);
                    debug_assert!(ok, "exported literal contradicts the other trail");
                }
                if let Some(c) = confl {
                    return Some((cur, c));
                }
                if !sent && !b.has_pending() {
                    return None;
                }
                cur = cur.other();
            }
        }
    }

    fn mirror(to: &mut ModuleSolver, l: Lit) -> bool {
        to.enqueue(l, Reason::Ext)
    }

    /// `from` assigned `l` while the other module holds its negation. The
    /// explanation of `l` is copied over and becomes the conflict there;
    /// when it is not over the interface both solvers restart from level 0,
    /// where explanations always are.
    fn cross_conflict(&mut self, from: ModuleId, l: Lit) -> Option<(ModuleId, ClauseRef)> {
        let (a, b, log) = self.parts(from);
        match a.analyze_final(l) {
            Some(c) if a.interface_clause(&c) => {
                if !b.contains_clause(&c) {
                    log.log(ProofStep::copy(from, c.clone()));
                }
                let cref = b.add_clause(&c, Provenance::Copied(from));
                b.clear_conflict();
                Some((from.other(), cref))
            }
            _ => {
                assert!(self.m.level() > 0, "level-0 literal without interface explanation");
                self.backjump_both(0);
                None
            }
        }
    }

    // ---------------------------------------------------------------- conflicts

    fn handle_conflict(&mut self, who: ModuleId, cref: ClauseRef) {
        let level = {
            let x = self.solver(who);
            x.max_level(x.clause_lits(cref))
        };
        match (self.mode, who) {
            (Mode::MainDecide, ModuleId::Main) => self.learn_main(cref),
            (Mode::MainDecide, ModuleId::Secondary) => self.block_in_main(cref),
            (Mode::Speculate { base }, ModuleId::Secondary)
            | (Mode::Validate { base, .. }, ModuleId::Secondary) => {
                if level <= base {
                    self.goto(Mode::MainDecide, "secondary conflict below base");
                    self.block_in_main(cref);
                } else {
                    self.learn_secondary(cref, base);
                }
            }
            (Mode::Speculate { base }, ModuleId::Main) => {
                self.speculation_main_conflict(cref, level, base)
            }
            (Mode::Validate { base, entry }, ModuleId::Main) => {
                self.validation_conflict(cref, base, entry)
            }
            (Mode::SecondaryDecide { entry }, ModuleId::Secondary) => {
                if level <= entry {
                    self.goto(Mode::MainDecide, "secondary conflict below entry");
                    self.block_in_main(cref);
                } else {
                    self.learn_secondary(cref, entry);
                }
            }
            (Mode::SecondaryDecide { entry }, ModuleId::Main) => {
                // main is finished and its interface literals are mirrored,
                // so nothing crossing over can falsify one of its clauses
                debug_assert!(false, "main conflict after main finished");
                self.goto(Mode::MainDecide, "main conflict after main finished");
                self.backjump_both(entry.min(level.saturating_sub(1)));
            }
            (Mode::Sat | Mode::Unsat, _) => unreachable!("conflict in a final state"),
        }
    }

    /// 1UIP in the main module, requesting reasons from the secondary one.
    /// Only called in `<P,D0>`, where the secondary module has no decisions.
    fn learn_main(&mut self, cref: ClauseRef) {
        debug_assert_eq!(self.mode, Mode::MainDecide);
        let level = self.m.max_level(self.m.clause_lits(cref));
        self.backjump_both(level);
        match self.m.analyze_conflict(cref, Some(&mut self.s), &mut self.log) {
            Analysis::Learned { clause, backjump } => self.assert_main(clause, backjump),
            Analysis::Refine(l) => unreachable!("refinement on {l} without speculation"),
        }
    }

    fn assert_main(&mut self, clause: Clause, backjump: u32) {
        self.log.log(ProofStep::rup(ModuleId::Main, clause.clone()));
        if clause.is_empty() {
            self.goto(Mode::Unsat, "empty clause");
            return;
        }
        self.backjump_both(backjump);
        self.m.add_clause(&clause, Provenance::Learned);
        self.last = ModuleId::Main;
    }

    /// A secondary conflict involving no secondary decision: its interface
    /// explanation is copied into the main module and resolved there.
    fn block_in_main(&mut self, cref: ClauseRef) {
        debug_assert_eq!(self.mode, Mode::MainDecide);
        let level = self.s.max_level(self.s.clause_lits(cref));
        self.backjump_both(level);
        let c = self.s.analyze_final_conflict(cref);
        debug_assert!(self.s.interface_clause(&c));
        if !self.m.contains_clause(&c) {
            self.log.log(ProofStep::copy(ModuleId::Secondary, c.clone()));
        }
        if c.is_empty() {
            if self.m.contains_clause(&c) {
                self.log.log(ProofStep::rup(ModuleId::Main, c));
            }
            self.goto(Mode::Unsat, "empty clause");
            return;
        }
        let mc = self.m.add_clause(&c, Provenance::Copied(ModuleId::Secondary));
        self.m.clear_conflict();
        self.learn_main(mc);
    }

    /// 1UIP in the secondary module while it holds decisions above `floor`.
    fn learn_secondary(&mut self, cref: ClauseRef, floor: u32) {
        let level = self.s.max_level(self.s.clause_lits(cref));
        self.backjump_both(level);
        match self.s.analyze_conflict(cref, Some(&mut self.m), &mut self.log) {
            Analysis::Learned { clause, backjump } => {
                debug_assert!(!clause.is_empty());
                self.log.log(ProofStep::rup(ModuleId::Secondary, clause.clone()));
                self.backjump_both(backjump.max(floor));
                self.s.add_clause(&clause, Provenance::Learned);
                self.last = ModuleId::Secondary;
            }
            Analysis::Refine(l) => self.refine(l, floor),
        }
    }

    fn speculation_main_conflict(&mut self, cref: ClauseRef, level: u32, base: u32) {
        if level <= base {
            self.goto(Mode::MainDecide, "main conflict below base");
            self.learn_main(cref);
            return;
        }
        self.backjump_both(level);
        let c = self.m.analyze_final_conflict(cref);
        if c.is_empty() {
            self.goto(Mode::MainDecide, "main conflict without leaves");
            self.learn_main(cref);
        } else if self.m.interface_clause(&c) {
            // the secondary decisions alone are blocked
            if !self.s.contains_clause(&c) {
                self.log.log(ProofStep::copy(ModuleId::Main, c.clone()));
            }
            let sc = self.s.add_clause(&c, Provenance::Copied(ModuleId::Main));
            self.s.clear_conflict();
            if self.s.max_level(self.s.clause_lits(sc)) <= base {
                self.goto(Mode::MainDecide, "secondary conflict below base");
                self.block_in_main(sc);
            } else {
                self.learn_secondary(sc, base);
            }
        } else if let Some(l) = c
            .lits()
            .iter()
            .filter(|l| self.m.is_interface(l.var()) && self.m.var_level(l.var()) > base)
            .max_by_key(|l| self.m.trail_pos(l.var()))
        {
            // tangled: main decisions below base and secondary ones above
            self.refine(*l, base);
        } else {
            // every leaf sits at or below base
            let top = self.m.max_level(c.lits());
            self.goto(Mode::MainDecide, "main conflict below base");
            self.log.log(ProofStep::rup(ModuleId::Main, c.clone()));
            self.backjump_both(top);
            let mc = self.m.add_clause(&c, Provenance::Learned);
            self.m.clear_conflict();
            self.learn_main(mc);
        }
    }

    fn validation_conflict(&mut self, cref: ClauseRef, base: u32, entry: u32) {
        let level = self.m.max_level(self.m.clause_lits(cref));
        self.backjump_both(level);
        match self.m.analyze_conflict(cref, Some(&mut self.s), &mut self.log) {
            Analysis::Refine(l) => self.refine(l, base),
            Analysis::Learned { clause, backjump } => {
                if clause.is_empty() {
                    self.goto(Mode::MainDecide, "validation failed");
                    self.assert_main(clause, 0);
                } else if backjump < base {
                    self.goto(Mode::MainDecide, "validation failed");
                    self.assert_main(clause, backjump);
                } else if level > entry {
                    self.assert_main(clause, backjump.max(entry));
                } else {
                    self.goto(Mode::MainDecide, "validation failed");
                    self.log.log(ProofStep::rup(ModuleId::Main, clause.clone()));
                    self.backjump_both(base);
                    self.m.add_clause(&clause, Provenance::Learned);
                    self.last = ModuleId::Main;
                }
            }
        }
    }

    /// Abandons the speculation started at `base`; the main module decides
    /// `lit` next.
    fn refine(&mut self, lit: Lit, base: u32) {
        self.goto(Mode::MainDecide, "refine");
        self.backjump_both(base);
        self.forced = Some(lit);
        self.stats.refinements += 1;
        self.refine_lits.push(lit);
        self.last = ModuleId::Main;
    }

    // ---------------------------------------------------------------- decisions

    fn advice(&mut self) -> (bool, Vec<Var>) {
        let view = SolverView {
            secondary: &self.s,
            main: &self.m,
            mode: self.mode,
        };
        match self.guidance.next_split(&view) {
            SplitAdvice::None => (false, Vec::new()),
            SplitAdvice::Split { change_mode, vars } => (change_mode, vars),
        }
    }

    fn decide(&mut self) -> Step {
        match self.mode {
            Mode::MainDecide => {
                if let Some(l) = self.forced.take() {
                    if self.m.value(l) == LBool::Undef {
                        self.decide_in(ModuleId::Main, l);
                        return Step::Continue;
                    }
                }
                let (speculate, vars) = self.advice();
                if speculate && self.cfg.speculation {
                    let base = self.m.level();
                    self.goto(Mode::Speculate { base }, "speculate");
                    self.stats.speculations += 1;
                    return self.secondary_decision(&vars);
                }
                match self.m.pick_branch(&vars) {
                    Some(l) => {
                        self.decide_in(ModuleId::Main, l);
                        Step::Continue
                    }
                    None => {
                        let entry = self.m.level();
                        self.goto(Mode::SecondaryDecide { entry }, "main finished");
                        self.secondary_decision(&vars)
                    }
                }
            }
            Mode::Speculate { .. } | Mode::SecondaryDecide { .. } => {
                let (_, vars) = self.advice();
                self.secondary_decision(&vars)
            }
            Mode::Validate { .. } => {
                let (_, vars) = self.advice();
                self.validation_decision(&vars)
            }
            Mode::Sat | Mode::Unsat => Step::Done,
        }
    }

    fn decide_in(&mut self, id: ModuleId, l: Lit) {
        let (a, b, _) = self.parts(id);
        a.decide(l);
        b.push_null();
        self.last = id;
    }

    fn secondary_decision(&mut self, vars: &[Var]) -> Step {
        if let Some(l) = self.s.pick_branch(vars) {
            self.decide_in(ModuleId::Secondary, l);
            return Step::Continue;
        }
        match self.mode {
            Mode::Speculate { base } => {
                let entry = self.s.level();
                self.goto(Mode::Validate { base, entry }, "secondary finished");
                self.validation_decision(vars)
            }
            _ => {
                self.goto(Mode::Sat, "secondary finished");
                Step::Done
            }
        }
    }

    fn validation_decision(&mut self, vars: &[Var]) -> Step {
        match self.m.pick_branch(vars) {
            Some(l) => {
                self.decide_in(ModuleId::Main, l);
                Step::Continue
            }
            None => {
                self.goto(Mode::Sat, "main finished");
                Step::Done
            }
        }
    }

    // ---------------------------------------------------------------- results

    fn model(&self) -> Vec<bool> {
        let mut model = vec![false; self.n_vars + 1];
        for x in [&self.s, &self.m] {
            for (l, _, _) in x.assigned() {
                model[l.var().index()] = l.is_positive();
            }
        }
        debug_assert!(self
            .s
            .assigned()
            .all(|(l, _, _)| self.m.value(l) != LBool::False));
        model
    }

    fn check_levels(&mut self) {
        if self.s.level() != self.m.level() {
            self.sync_violations.push(format!(
                "levels differ in {}: secondary {} main {}",
                self.mode,
                self.s.level(),
                self.m.level()
            ));
        }
    }

    fn check_mirroring(&mut self) {
        for &v in &self.interface {
            let (a, b) = (self.s.fixed(v), self.m.fixed(v));
            if a != b {
                self.sync_violations.push(format!(
                    "interface variable {v} differs in {}: secondary {a:?} main {b:?}",
                    self.mode
                ));
            }
        }
    }
}
