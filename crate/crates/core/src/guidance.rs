//! User guidance consulted before every decision: whether to start
//! speculating and which variables to branch on first.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::formula::Var;
use crate::orchestrator::Mode;
use crate::solver::ModuleSolver;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SplitAdvice {
    /// Use the built-in heuristic.
    None,
    /// Optionally request speculation, and prefer `vars` (in order) for the
    /// next decision.
    Split { change_mode: bool, vars: Vec<Var> },
}

impl SplitAdvice {
    pub fn split(change_mode: bool, vars: impl IntoIterator<Item = Var>) -> Self {
        SplitAdvice::Split {
            change_mode,
            vars: vars.into_iter().collect(),
        }
    }
}

/// Read-only view of the solver handed to guidance callbacks.
pub struct SolverView<'a> {
    pub(crate) secondary: &'a ModuleSolver,
    pub(crate) main: &'a ModuleSolver,
    pub(crate) mode: Mode,
}

impl SolverView<'_> {
    /// Value of `v` if either module has assigned it.
    pub fn fixed(&self, v: Var) -> Option<bool> {
        if v.index() > self.main.n_vars() {
            return None;
        }
        self.main.fixed(v).or_else(|| self.secondary.fixed(v))
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn level(&self) -> u32 {
        self.main.level()
    }
}

pub trait Guidance {
    fn next_split(&mut self, view: &SolverView<'_>) -> SplitAdvice;

    /// Every variable the guidance may mention, checked at registration.
    fn referenced_vars(&self) -> Vec<Var>;
}

/// Always defers to the built-in heuristic.
#[derive(Debug, Clone, Default)]
pub struct NoGuidance;

impl Guidance for NoGuidance {
    fn next_split(&mut self, _view: &SolverView<'_>) -> SplitAdvice {
        SplitAdvice::None
    }

    fn referenced_vars(&self) -> Vec<Var> {
        Vec::new()
    }
}

/// Replays a fixed sequence of answers, then answers `None`.
#[derive(Debug, Clone, Default)]
pub struct Scripted {
    script: VecDeque<SplitAdvice>,
}

impl Scripted {
    pub fn new(script: impl IntoIterator<Item = SplitAdvice>) -> Self {
        Scripted {
            script: script.into_iter().collect(),
        }
    }
}

impl Guidance for Scripted {
    fn next_split(&mut self, _view: &SolverView<'_>) -> SplitAdvice {
        self.script.pop_front().unwrap_or(SplitAdvice::None)
    }

    fn referenced_vars(&self) -> Vec<Var> {
        advice_vars(self.script.iter())
    }
}

fn advice_vars<'a>(it: impl Iterator<Item = &'a SplitAdvice>) -> Vec<Var> {
    it.flat_map(|a| match a {
        SplitAdvice::None => Vec::new(),
        SplitAdvice::Split { vars, .. } => vars.clone(),
    })
    .collect()
}

/// Gives the same answer every time.
#[derive(Debug, Clone)]
pub struct Constant(pub SplitAdvice);

impl Constant {
    /// Speculate at once, preferring `vars`.
    pub fn speculate_first(vars: Vec<Var>) -> Self {
        Constant(SplitAdvice::Split {
            change_mode: true,
            vars,
        })
    }
}

impl Guidance for Constant {
    fn next_split(&mut self, _view: &SolverView<'_>) -> SplitAdvice {
        self.0.clone()
    }

    fn referenced_vars(&self) -> Vec<Var> {
        advice_vars(std::iter::once(&self.0))
    }
}

/// Works through stages in order: the first stage with an unassigned
/// variable is returned; once every stage is assigned the answer is `None`.
#[derive(Debug, Clone)]
pub struct Staged {
    stages: Vec<(bool, Vec<Var>)>,
}

impl Staged {
    pub fn new(stages: Vec<(bool, Vec<Var>)>) -> Self {
        Staged { stages }
    }
}

impl Guidance for Staged {
    fn next_split(&mut self, view: &SolverView<'_>) -> SplitAdvice {
        for (change_mode, vars) in &self.stages {
            if vars.iter().any(|&v| view.fixed(v).is_none()) {
                return SplitAdvice::Split {
                    change_mode: *change_mode,
                    vars: vars.clone(),
                };
            }
        }
        SplitAdvice::None
    }

    fn referenced_vars(&self) -> Vec<Var> {
        self.stages.iter().flat_map(|(_, v)| v.clone()).collect()
    }
}

/// Rejects guidance that mentions variables outside `1..=n_vars`.
pub fn check_vars(g: &dyn Guidance, n_vars: usize) -> Result<()> {
    match g.referenced_vars().into_iter().find(|v| v.index() > n_vars) {
        Some(v) => Err(Error::UnknownGuidanceVar(v)),
        None => Ok(()),
    }
}

fn parse_vars(text: &str) -> Result<Vec<Var>> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match t.parse::<u32>() {
            Ok(v) if v >= 1 => Ok(Var::new(v)),
            _ => Err(Error::GuidanceProfile(format!("bad variable `{t}`"))),
        })
        .collect()
}

/// Built-in profiles: `none`, `speculate-first[:v1,v2,..]`, and
/// `staged:v1,..;v2,..;...` where every stage but the last only steers
/// decisions and the last one requests speculation.
pub fn parse_profile(text: &str) -> Result<Box<dyn Guidance + Send>> {
    let (name, arg) = match text.split_once(':') {
        Some((n, a)) => (n.trim(), Some(a)),
        None => (text.trim(), None),
    };
    match (name, arg) {
        ("none", None) => Ok(Box::new(NoGuidance)),
        ("speculate-first", arg) => {
            let vars = arg.map(parse_vars).transpose()?.unwrap_or_default();
            Ok(Box::new(Constant::speculate_first(vars)))
        }
        ("staged", Some(arg)) => {
            let groups: Vec<&str> = arg.split(';').collect();
            let last = groups.len() - 1;
            let stages = groups
                .iter()
                .enumerate()
                .map(|(i, g)| Ok((i == last, parse_vars(g)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(Box::new(Staged::new(stages)))
        }
        _ => Err(Error::GuidanceProfile(format!("unknown profile `{text}`"))),
    }
}
