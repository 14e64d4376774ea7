//! Batch solving and the hidden-key timing sweep.

use std::time::{Duration, Instant};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::generators::{gen_hidden_key, HiddenKey};
use crate::error::Result;
use crate::guidance::Constant;
use crate::orchestrator::{solve, SolveResult, SolverConfig};

/// Applies `f` to every item, on the rayon pool when the `parallel` feature
/// is on and sequentially otherwise. Output order follows input order.
pub fn solve_many<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Sequential counterpart of [`solve_many`], always available.
pub fn solve_many_sequential<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    Sms,
    SpecSms,
}

impl SweepMode {
    pub fn name(self) -> &'static str {
        match self {
            SweepMode::Sms => "sms",
            SweepMode::SpecSms => "specsms",
        }
    }

    pub fn config(self, budget: &Budget) -> SolverConfig {
        SolverConfig {
            speculation: self == SweepMode::SpecSms,
            max_conflicts: budget.conflicts,
            time_limit: budget.time,
            proof: false,
            ..SolverConfig::default()
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Budget {
    pub conflicts: Option<u64>,
    pub time: Option<Duration>,
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub rounds: usize,
    pub mode: SweepMode,
    pub expected_sat: bool,
    pub verdict: &'static str,
    pub decisions: u64,
    pub conflicts: u64,
    pub seconds: f64,
}

/// The speculate-on-the-selector guidance used for both modes.
pub fn selector_guidance(hk: &HiddenKey) -> Constant {
    Constant::speculate_first(hk.selector.clone())
}

pub fn run_hidden_key(hk: &HiddenKey, mode: SweepMode, budget: &Budget) -> Result<(SolveResult, f64)> {
    let mut g = selector_guidance(hk);
    let start = Instant::now();
    let r = solve(&hk.formula, &mut g, &mode.config(budget))?;
    Ok((r, start.elapsed().as_secs_f64()))
}

/// Runs every (rounds, variant, mode) combination; instances run in
/// parallel under the `parallel` feature.
pub fn sweep(
    rounds: &[usize],
    k: usize,
    seed: u64,
    modes: &[SweepMode],
    budget: &Budget,
) -> Result<Vec<SweepRow>> {
    let mut jobs = Vec::new();
    for &r in rounds {
        for sat in [true, false] {
            for &mode in modes {
                jobs.push((r, sat, mode));
            }
        }
    }
    solve_many(&jobs, |&(r, sat, mode)| {
        let hk = gen_hidden_key(r, k, seed, sat)?;
        let (res, seconds) = run_hidden_key(&hk, mode, budget)?;
        Ok(SweepRow {
            rounds: r,
            mode,
            expected_sat: sat,
            verdict: res.verdict.name(),
            decisions: res.stats.decisions,
            conflicts: res.stats.conflicts,
            seconds,
        })
    })
    .into_iter()
    .collect()
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("rounds,mode,verdict,decisions,conflicts,seconds\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{:.3}\n",
            r.rounds,
            r.mode.name(),
            r.verdict,
            r.decisions,
            r.conflicts,
            r.seconds
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree() {
        let xs: Vec<u64> = (0..100).collect();
        assert_eq!(solve_many(&xs, |x| x * x), solve_many_sequential(&xs, |x| x * x));
    }

    #[test]
    fn csv_header_and_rows() {
        let rows = sweep(&[1], 2, 0, &[SweepMode::SpecSms], &Budget::default()).unwrap();
        let csv = to_csv(&rows);
        assert!(csv.starts_with("rounds,mode,verdict,decisions,conflicts,seconds\n"));
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.contains("1,specsms,SAT,"));
        assert!(csv.contains("1,specsms,UNSAT,"));
    }
}
