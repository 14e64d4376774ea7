//! Instance generators, reference oracles and benchmark sweeps.

pub mod generators;
pub mod oracle;
pub mod sweep;

pub use generators::{gen_chain, gen_hidden_key, gen_php_pair, gen_random_3cnf, random_suite, HiddenKey, PhpPair};
pub use oracle::oracle_solve;
pub use sweep::{solve_many, solve_many_sequential, sweep, Budget, SweepMode, SweepRow};
