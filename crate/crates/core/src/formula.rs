//! Literals, clauses and partitioned formulas, plus the text formats used to
//! read and write them.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Not;

use crate::error::{Error, Result};

/// A propositional variable. Indices start at 1, as in DIMACS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    pub fn new(index: u32) -> Var {
        assert!(index >= 1, "variable indices start at 1");
        Var(index)
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn lit(self, positive: bool) -> Lit {
        Lit::new(self, positive)
    }

    #[inline]
    pub fn pos(self) -> Lit {
        Lit::new(self, true)
    }

    #[inline]
    pub fn neg(self) -> Lit {
        Lit::new(self, false)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A literal, encoded as `2 * var + polarity`.
///
/// The derived ordering sorts by variable and puts the negative literal
/// first on ties, which is the canonical clause order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    #[inline]
    pub fn new(var: Var, positive: bool) -> Lit {
        Lit(var.0 << 1 | positive as u32)
    }

    pub fn from_dimacs(value: i32) -> Lit {
        assert!(value != 0, "0 is not a literal");
        Lit::new(Var::new(value.unsigned_abs()), value > 0)
    }

    #[inline]
    pub fn to_dimacs(self) -> i32 {
        let v = (self.0 >> 1) as i32;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    #[inline]
    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 & 1 == 1
    }

    /// Dense index usable for per-literal tables of size `2 * (n_vars + 1)`.
    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }
}

impl Not for Lit {
    type Output = Lit;

    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A clause in canonical form: sorted and free of duplicates.
///
/// Canonical form is the clause identity used throughout the crate, most
/// importantly when matching copy and delete steps in proofs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    pub fn new(mut lits: Vec<Lit>) -> Clause {
        lits.sort_unstable();
        lits.dedup();
        Clause { lits }
    }

    pub fn from_dimacs(values: &[i32]) -> Clause {
        Clause::new(values.iter().map(|&v| Lit::from_dimacs(v)).collect())
    }

    /// The empty clause.
    pub fn empty() -> Clause {
        Clause { lits: Vec::new() }
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.lits.binary_search(&lit).is_ok()
    }

    /// True when the clause contains a literal and its negation. Such a pair
    /// is adjacent in canonical order.
    pub fn is_tautology(&self) -> bool {
        self.lits.windows(2).any(|w| w[0].var() == w[1].var())
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.lits.iter().map(|l| l.var())
    }

    pub fn to_dimacs(&self) -> Vec<i32> {
        self.lits.iter().map(|l| l.to_dimacs()).collect()
    }

    /// Evaluates the clause under a total assignment indexed by variable.
    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.lits
            .iter()
            .any(|l| assignment[l.var().index()] == l.is_positive())
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lits {
            write!(f, "{} ", l)?;
        }
        write!(f, "0")
    }
}

/// Which module of the pair a clause, step or solver belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModuleId {
    Secondary,
    Main,
}

impl ModuleId {
    pub fn other(self) -> ModuleId {
        match self {
            ModuleId::Secondary => ModuleId::Main,
            ModuleId::Main => ModuleId::Secondary,
        }
    }

    pub fn tag(self) -> char {
        match self {
            ModuleId::Secondary => 's',
            ModuleId::Main => 'm',
        }
    }

    pub fn from_tag(tag: &str) -> Option<ModuleId> {
        match tag {
            "s" => Some(ModuleId::Secondary),
            "m" => Some(ModuleId::Main),
            _ => None,
        }
    }
}

impl fmt::Display for ModuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tag())
    }
}

/// A CNF pair solved by two modules, together with the variables they share.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionedFormula {
    pub secondary: Vec<Clause>,
    pub main: Vec<Clause>,
    pub interface: BTreeSet<Var>,
    pub n_vars: usize,
    /// Tautological input clauses removed during loading.
    pub dropped_tautologies: usize,
}

impl PartitionedFormula {
    pub fn part(&self, module: ModuleId) -> &[Clause] {
        match module {
            ModuleId::Secondary => &self.secondary,
            ModuleId::Main => &self.main,
        }
    }

    pub fn is_interface(&self, var: Var) -> bool {
        self.interface.contains(&var)
    }

    /// Dense membership table indexed by variable.
    pub fn interface_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.n_vars + 1];
        for v in &self.interface {
            mask[v.index()] = true;
        }
        mask
    }

    /// Variables occurring in either part.
    pub fn vars(&self) -> BTreeSet<Var> {
        self.secondary
            .iter()
            .chain(self.main.iter())
            .flat_map(|c| c.vars())
            .collect()
    }

    /// True when `assignment` (indexed by variable) satisfies both parts.
    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.secondary
            .iter()
            .chain(self.main.iter())
            .all(|c| c.eval(assignment))
    }
}

fn vars_of(clauses: &[Clause]) -> BTreeSet<Var> {
    clauses.iter().flat_map(|c| c.vars()).collect()
}

/// Shared variables of the two parts: `vars(phi_s) ∩ vars(phi_m)`.
pub fn compute_interface(phi_s: &[Clause], phi_m: &[Clause]) -> BTreeSet<Var> {
    let s = vars_of(phi_s);
    let m = vars_of(phi_m);
    s.intersection(&m).copied().collect()
}

/// Builds a partitioned formula, dropping tautologies and computing the
/// interface unless one is given explicitly.
pub fn load_partitioned(
    sec: Vec<Clause>,
    main: Vec<Clause>,
    n_vars: usize,
    explicit_interface: Option<BTreeSet<Var>>,
) -> Result<PartitionedFormula> {
    let before = sec.len() + main.len();
    let sec: Vec<Clause> = sec.into_iter().filter(|c| !c.is_tautology()).collect();
    let main: Vec<Clause> = main.into_iter().filter(|c| !c.is_tautology()).collect();
    let dropped_tautologies = before - sec.len() - main.len();

    for v in sec.iter().chain(main.iter()).flat_map(|c| c.vars()) {
        if v.index() > n_vars {
            return Err(Error::VarOutOfRange { var: v, n_vars });
        }
    }

    let shared = compute_interface(&sec, &main);
    let interface = match explicit_interface {
        None => shared,
        Some(explicit) => {
            if let Some(&v) = shared.iter().find(|v| !explicit.contains(v)) {
                return Err(Error::InterfaceMissingShared(v));
            }
            let all: BTreeSet<Var> = vars_of(&sec).union(&vars_of(&main)).copied().collect();
            if let Some(&v) = explicit.iter().find(|v| !all.contains(v)) {
                return Err(Error::InterfaceUnknownVar(v));
            }
            explicit
        }
    };

    Ok(PartitionedFormula {
        secondary: sec,
        main,
        interface,
        n_vars,
        dropped_tautologies,
    })
}

/// Result of reading a DIMACS CNF file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dimacs {
    pub n_vars: usize,
    pub clauses: Vec<Clause>,
}

/// Splits a text into (1-based line number, trimmed line), skipping blank
/// lines and `c` comments.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('c') && !l.starts_with('%'))
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Accumulates clause literals across lines.
struct ClauseReader {
    n_vars: usize,
    pending: Vec<Lit>,
    pending_line: usize,
}

impl ClauseReader {
    fn new(n_vars: usize) -> Self {
        ClauseReader {
            n_vars,
            pending: Vec::new(),
            pending_line: 0,
        }
    }

    fn feed(&mut self, line_no: usize, line: &str, out: &mut Vec<Clause>) -> Result<()> {
        for tok in line.split_whitespace() {
            let value: i64 = tok
                .parse()
                .map_err(|_| parse_err(line_no, format!("invalid literal `{tok}`")))?;
            if value == 0 {
                out.push(Clause::new(std::mem::take(&mut self.pending)));
                continue;
            }
            if value.unsigned_abs() as usize > self.n_vars {
                return Err(parse_err(
                    line_no,
                    format!("literal {value} out of range (n_vars = {})", self.n_vars),
                ));
            }
            if self.pending.is_empty() {
                self.pending_line = line_no;
            }
            self.pending.push(Lit::from_dimacs(value as i32));
        }
        Ok(())
    }

    fn finish(self) -> Result<()> {
        if self.pending.is_empty() {
            Ok(())
        } else {
            Err(parse_err(self.pending_line, "clause is missing its terminating 0"))
        }
    }
}

/// Parses DIMACS CNF. Clauses are returned in file order, canonicalized.
pub fn parse_dimacs(text: &str) -> Result<Dimacs> {
    let mut lines = content_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing `p cnf` header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "p" || fields[1] != "cnf" {
        return Err(parse_err(hline, format!("malformed header `{header}`")));
    }
    let n_vars: usize = fields[2]
        .parse()
        .map_err(|_| parse_err(hline, "malformed variable count"))?;
    let _n_clauses: usize = fields[3]
        .parse()
        .map_err(|_| parse_err(hline, "malformed clause count"))?;

    let mut reader = ClauseReader::new(n_vars);
    let mut clauses = Vec::new();
    for (no, line) in lines {
        if line.starts_with('p') {
            return Err(parse_err(no, "duplicate header"));
        }
        reader.feed(no, line, &mut clauses)?;
    }
    reader.finish()?;
    Ok(Dimacs { n_vars, clauses })
}

pub fn write_dimacs(n_vars: usize, clauses: &[Clause]) -> String {
    let mut out = format!("p cnf {} {}\n", n_vars, clauses.len());
    for c in clauses {
        out.push_str(&c.to_string());
        out.push('\n');
    }
    out
}

/// Parses an interface file: whitespace separated variable indices ending in 0.
pub fn parse_interface(text: &str) -> Result<BTreeSet<Var>> {
    let mut vars = BTreeSet::new();
    for (no, line) in content_lines(text) {
        for tok in line.split_whitespace() {
            let v: u32 = tok
                .parse()
                .map_err(|_| parse_err(no, format!("invalid variable `{tok}`")))?;
            if v == 0 {
                return Ok(vars);
            }
            vars.insert(Var::new(v));
        }
    }
    Err(parse_err(text.lines().count().max(1), "interface list is missing its terminating 0"))
}

/// Parses the single-file format:
///
/// ```text
/// p msat <nvars>
/// i 1 2 3 0        (optional)
/// s
/// <secondary clauses>
/// m
/// <main clauses>
/// ```
pub fn parse_msat(text: &str) -> Result<PartitionedFormula> {
    let mut lines = content_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing `p msat` header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 || fields[0] != "p" || fields[1] != "msat" {
        return Err(parse_err(hline, format!("malformed header `{header}`")));
    }
    let n_vars: usize = fields[2]
        .parse()
        .map_err(|_| parse_err(hline, "malformed variable count"))?;

    let mut interface: Option<BTreeSet<Var>> = None;
    let mut section: Option<ModuleId> = None;
    let mut sec = Vec::new();
    let mut main = Vec::new();
    let mut reader = ClauseReader::new(n_vars);
    for (no, line) in lines {
        if let Some(rest) = line.strip_prefix('i') {
            if rest.is_empty() || rest.starts_with(char::is_whitespace) {
                let mut vars = BTreeSet::new();
                let mut terminated = false;
                for tok in rest.split_whitespace() {
                    let v: u32 = tok
                        .parse()
                        .map_err(|_| parse_err(no, format!("invalid variable `{tok}`")))?;
                    if v == 0 {
                        terminated = true;
                        break;
                    }
                    if v as usize > n_vars {
                        return Err(parse_err(no, format!("variable {v} out of range")));
                    }
                    vars.insert(Var::new(v));
                }
                if !terminated {
                    return Err(parse_err(no, "interface line is missing its terminating 0"));
                }
                interface = Some(vars);
                continue;
            }
        }
        if line == "s" || line == "m" {
            if !reader.pending.is_empty() {
                return Err(parse_err(reader.pending_line, "clause is missing its terminating 0"));
            }
            section = ModuleId::from_tag(line);
            continue;
        }
        let target = match section {
            Some(ModuleId::Secondary) => &mut sec,
            Some(ModuleId::Main) => &mut main,
            None => return Err(parse_err(no, "clause before any `s`/`m` section marker")),
        };
        reader.feed(no, line, target)?;
    }
    reader.finish()?;
    load_partitioned(sec, main, n_vars, interface)
}

pub fn write_msat(pf: &PartitionedFormula) -> String {
    let mut out = format!("p msat {}\ni", pf.n_vars);
    for v in &pf.interface {
        out.push_str(&format!(" {v}"));
    }
    out.push_str(" 0\ns\n");
    for c in &pf.secondary {
        out.push_str(&c.to_string());
        out.push('\n');
    }
    out.push_str("m\n");
    for c in &pf.main {
        out.push_str(&c.to_string());
        out.push('\n');
    }
    out
}
