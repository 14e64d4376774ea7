use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use super::{ModularProof, RupOutcome, StepKind, UnitPropagator};
use crate::error::{Error, Result};
use crate::formula::{Clause, Lit, ModuleId, PartitionedFormula, Var};
use crate::solver::solve_cnf;

/// `antecedent ⇒ consequent`, where the antecedent is a conjunction of
/// clauses and the consequent a single clause.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Implication {
    pub antecedent: BTreeSet<Clause>,
    pub consequent: Clause,
}

/// A conjunction of implications. The empty conjunction is true.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Interpolant {
    pub implications: Vec<Implication>,
}

impl Interpolant {
    pub fn vars(&self) -> BTreeSet<Var> {
        self.implications
            .iter()
            .flat_map(|imp| {
                imp.antecedent
                    .iter()
                    .chain(std::iter::once(&imp.consequent))
                    .flat_map(|c| c.vars())
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    /// Truth value under a total assignment indexed by variable.
    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.implications.iter().all(|imp| {
            !imp.antecedent.iter().all(|c| c.eval(assignment)) || imp.consequent.eval(assignment)
        })
    }

    /// Same implications regardless of order.
    pub fn equivalent_form(&self, other: &Interpolant) -> bool {
        let a: BTreeSet<_> = self.implications.iter().collect();
        let b: BTreeSet<_> = other.implications.iter().collect();
        a == b
    }
}

fn write_clause(f: &mut fmt::Formatter<'_>, c: &Clause) -> fmt::Result {
    if c.is_empty() {
        return write!(f, "false");
    }
    for (i, l) in c.lits().iter().enumerate() {
        if i > 0 {
            write!(f, " | ")?;
        }
        write!(f, "{l}")?;
    }
    Ok(())
}

impl fmt::Display for Implication {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "( ")?;
        if self.antecedent.is_empty() {
            write!(f, "true")?;
        }
        for (i, c) in self.antecedent.iter().enumerate() {
            if i > 0 {
                write!(f, " & ")?;
            }
            write_clause(f, c)?;
        }
        write!(f, " ) -> ( ")?;
        write_clause(f, &self.consequent)?;
        write!(f, " )")
    }
}

impl fmt::Display for Interpolant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for imp in &self.implications {
            writeln!(f, "{imp}")?;
        }
        Ok(())
    }
}

fn parse_clause(text: &str, line: usize) -> Result<Clause> {
    let text = text.trim();
    if text == "false" {
        return Ok(Clause::empty());
    }
    let mut lits = Vec::new();
    for tok in text.split('|') {
        let v: i32 = tok.trim().parse().map_err(|_| Error::Parse {
            line,
            msg: format!("invalid literal `{}`", tok.trim()),
        })?;
        if v == 0 {
            return Err(Error::Parse {
                line,
                msg: "literal 0 in interpolant".into(),
            });
        }
        lits.push(Lit::from_dimacs(v));
    }
    Ok(Clause::new(lits))
}

fn strip_parens(text: &str, line: usize) -> Result<&str> {
    text.trim()
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::Parse {
            line,
            msg: "expected a parenthesised group".into(),
        })
}

impl FromStr for Interpolant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Interpolant> {
        let mut implications = Vec::new();
        for (i, raw) in s.lines().enumerate() {
            let line = i + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let (lhs, rhs) = raw.split_once("->").ok_or_else(|| Error::Parse {
                line,
                msg: "missing `->`".into(),
            })?;
            let lhs = strip_parens(lhs, line)?.trim();
            let antecedent = if lhs == "true" {
                BTreeSet::new()
            } else {
                lhs.split('&')
                    .map(|c| parse_clause(c, line))
                    .collect::<Result<_>>()?
            };
            let consequent = parse_clause(strip_parens(rhs, line)?, line)?;
            implications.push(Implication {
                antecedent,
                consequent,
            });
        }
        Ok(Interpolant { implications })
    }
}

/// Extracts an interpolant from a deletion-free proof by one forward pass
/// over the secondary module. Every secondary clause carries the set of
/// backward clauses that support it; each first copy of a clause into the
/// main module contributes `support ⇒ clause`.
pub fn interpolate(proof: &ModularProof, pf: &PartitionedFormula) -> Result<Interpolant> {
    if proof.has_deletions() {
        return Err(Error::ProofHasDeletions);
    }
    super::validate(proof, pf)?;
    let mut up = UnitPropagator::new();
    let mut sup: Vec<BTreeSet<Clause>> = Vec::new();
    let mut seen_forward: HashMap<Clause, ()> = HashMap::new();
    let mut out = Vec::new();

    let support_of = |up: &mut UnitPropagator, sup: &[BTreeSet<Clause>], cls: &Clause| {
        match up.check_rup(cls) {
            RupOutcome::Refuted { cone } => cone.iter().flat_map(|&c| sup[c].clone()).collect(),
            RupOutcome::NotRefuted => unreachable!("validated proof"),
        }
    };

    for step in &proof.steps {
        let cls = &step.clause;
        match step.kind {
            StepKind::Asserted(ModuleId::Secondary) => {
                up.add(cls);
                sup.push(BTreeSet::new());
            }
            StepKind::Copy {
                src: ModuleId::Main,
                ..
            } => {
                up.add(cls);
                sup.push(BTreeSet::from([cls.clone()]));
            }
            StepKind::Rup(ModuleId::Secondary) => {
                let s = support_of(&mut up, &sup, cls);
                up.add(cls);
                sup.push(s);
            }
            StepKind::Copy {
                src: ModuleId::Secondary,
                ..
            } => {
                if seen_forward.insert(cls.clone(), ()).is_some() {
                    continue;
                }
                let antecedent = match up.find_alive(cls) {
                    Some(id) => sup[id].clone(),
                    None => support_of(&mut up, &sup, cls),
                };
                out.push(Implication {
                    antecedent,
                    consequent: cls.clone(),
                });
            }
            _ => {}
        }
    }
    Ok(Interpolant { implications: out })
}

/// Which interpolant property failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ItpCondition {
    /// The interpolant mentions a non-interface variable.
    Vocabulary(Var),
    /// Φ_s ∧ ¬itp is satisfiable.
    SecondaryImplies,
    /// itp ∧ Φ_m is satisfiable.
    MainInconsistent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InterpolantCheck {
    Pass,
    /// `witness` is a model over the problem variables when one exists.
    Fail {
        condition: ItpCondition,
        witness: Option<Vec<bool>>,
    },
}

impl InterpolantCheck {
    pub fn passed(&self) -> bool {
        matches!(self, InterpolantCheck::Pass)
    }
}

struct Fresh(u32);

impl Fresh {
    fn next(&mut self) -> Var {
        self.0 += 1;
        Var::new(self.0)
    }
}

fn base_var(itp: &Interpolant, pf: &PartitionedFormula) -> u32 {
    let itp_max = itp.vars().iter().map(|v| v.index()).max().unwrap_or(0);
    pf.n_vars.max(itp_max) as u32
}

/// Checks the vocabulary condition and decides the two unsatisfiability
/// conditions with the built-in CDCL solver.
pub fn check_interpolant(itp: &Interpolant, pf: &PartitionedFormula) -> InterpolantCheck {
    if let Some(v) = itp.vars().into_iter().find(|v| !pf.is_interface(*v)) {
        return InterpolantCheck::Fail {
            condition: ItpCondition::Vocabulary(v),
            witness: None,
        };
    }

    // Φ_s ∧ ¬itp, with t_i selecting a falsified implication
    let mut fresh = Fresh(base_var(itp, pf));
    let mut cnf: Vec<Clause> = pf.secondary.clone();
    let mut pick = Vec::new();
    for imp in &itp.implications {
        let t = fresh.next();
        pick.push(t.pos());
        for d in &imp.antecedent {
            let mut lits = d.lits().to_vec();
            lits.push(t.neg());
            cnf.push(Clause::new(lits));
        }
        for &l in imp.consequent.lits() {
            cnf.push(Clause::new(vec![t.neg(), !l]));
        }
    }
    cnf.push(Clause::new(pick));
    if let Some(model) = solve_cnf(fresh.0 as usize, &cnf) {
        return InterpolantCheck::Fail {
            condition: ItpCondition::SecondaryImplies,
            witness: Some(model[..=pf.n_vars].to_vec()),
        };
    }

    // itp ∧ Φ_m, with u_D standing for a falsified antecedent clause D
    let mut fresh = Fresh(base_var(itp, pf));
    let mut cnf: Vec<Clause> = pf.main.clone();
    let mut selector: HashMap<&Clause, Lit> = HashMap::new();
    for imp in &itp.implications {
        let mut lits = imp.consequent.lits().to_vec();
        for d in &imp.antecedent {
            let u = *selector.entry(d).or_insert_with(|| {
                let u = fresh.next();
                for &l in d.lits() {
                    cnf.push(Clause::new(vec![u.neg(), !l]));
                }
                u.pos()
            });
            lits.push(u);
        }
        cnf.push(Clause::new(lits));
    }
    if let Some(model) = solve_cnf(fresh.0 as usize, &cnf) {
        return InterpolantCheck::Fail {
            condition: ItpCondition::MainInconsistent,
            witness: Some(model[..=pf.n_vars].to_vec()),
        };
    }
    InterpolantCheck::Pass
}
