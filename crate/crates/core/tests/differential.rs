use specsms::bench::{oracle_solve, random_suite};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specsms::guidance::{Constant, Guidance, NoGuidance, SolverView, SplitAdvice};
use specsms::orchestrator::{check_trace, solve, SolverConfig, Verdict};
use specsms::proof::{check_drup, interpolate, check_interpolant, to_monolithic, trim, validate};
use specsms::Clause;

/// Requests speculation at random moments.
struct Coin(ChaCha8Rng);

impl Guidance for Coin {
    fn next_split(&mut self, _view: &SolverView<'_>) -> SplitAdvice {
        if self.0.gen_bool(0.3) {
            SplitAdvice::split(true, [])
        } else {
            SplitAdvice::None
        }
    }

    fn referenced_vars(&self) -> Vec<specsms::Var> {
        Vec::new()
    }
}

/// Random 3-CNF where each part draws from a shared quarter of the
/// variables plus its own local half of the rest.
fn local_heavy(seed: u64) -> specsms::PartitionedFormula {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(16..=36);
    let shared = n / 4;
    let split = shared + (n - shared) / 2;
    let pool = |sec: bool| -> Vec<i32> {
        let local = if sec { shared..split } else { split..n };
        (0..shared).chain(local).map(|v| v as i32 + 1).collect()
    };
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for _ in 0..(n as f64 * 4.3) as usize {
        let sec = rng.gen_bool(0.5);
        let vars = pool(sec);
        let lits: Vec<i32> = rand::seq::index::sample(&mut rng, vars.len(), 3)
            .into_iter()
            .map(|k| if rng.gen() { vars[k] } else { -vars[k] })
            .collect();
        let c = Clause::from_dimacs(&lits);
        if sec { a.push(c) } else { b.push(c) }
    }
    specsms::formula::load_partitioned(a, b, n, None).unwrap()
}

fn cfg() -> SolverConfig {
    SolverConfig {
        trace: true,
        check_sync: true,
        max_conflicts: Some(20_000),
        ..SolverConfig::default()
    }
}

#[test]
fn random_instances_match_oracle_under_both_guidances() {
    let mut totals = [[0u64; 4]; 4];
    let mut suite = random_suite(300, 11);
    suite.extend((0..300).map(local_heavy));
    for (i, f) in suite.iter().enumerate() {
        let expected = oracle_solve(f).unwrap();
        let interface: Vec<_> = f.interface.iter().copied().collect();
        let guides: Vec<Box<dyn Guidance>> = vec![
            Box::new(NoGuidance),
            Box::new(Constant::speculate_first(Vec::new())),
            Box::new(Constant::speculate_first(interface.clone())),
            Box::new(Coin(ChaCha8Rng::seed_from_u64(i as u64))),
        ];
        for (gi, mut g) in guides.into_iter().enumerate() {
            let r = solve(f, g.as_mut(), &cfg()).unwrap();
            let t = &mut totals[gi];
            t[0] += r.stats.speculations;
            t[1] += r.stats.refinements;
            t[2] += r.stats.copies;
            t[3] += r.verdict.is_unsat() as u64;
            assert!(r.sync_violations.is_empty(), "instance {i} guide {gi}: {:?}", r.sync_violations);
            check_trace(&r.trace).unwrap_or_else(|e| panic!("instance {i} guide {gi}: {e:?}"));
            match r.verdict {
                Verdict::Sat(m) => {
                    assert!(expected, "instance {i} guide {gi}: sat but oracle unsat");
                    assert!(f.satisfied_by(&m), "instance {i} guide {gi}: bad model");
                }
                Verdict::Unsat(p) => {
                    assert!(!expected, "instance {i} guide {gi}: unsat but oracle sat");
                    validate(&p, f).unwrap_or_else(|e| panic!("instance {i} guide {gi}: {e}"));
                    let all: Vec<Clause> = f.secondary.iter().chain(&f.main).cloned().collect();
                    check_drup(&all, &to_monolithic(&p)).unwrap();
                    let t = trim(&p, f).unwrap();
                    validate(&t, f).unwrap();
                    let itp = interpolate(&t, f).unwrap();
                    assert!(check_interpolant(&itp, f).passed(), "instance {i} guide {gi}");
                }
                Verdict::Indeterminate => panic!("instance {i} guide {gi}: budget exhausted {:?} {}", r.stats, r.trace.len()),
            }
        }
    }
    assert_eq!(totals[0][0], 0);
    assert!(totals[1][0] > 0 && totals[3][1] > 0);
}
