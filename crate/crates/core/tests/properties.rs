mod common;

use proptest::prelude::*;
use specsms::bench::{oracle_solve, random_suite};
use specsms::formula::{load_partitioned, parse_msat, write_msat};
use specsms::guidance::{Constant, NoGuidance};
use specsms::orchestrator::{check_trace, solve, SolverConfig, Verdict};
use specsms::proof::{
    check_drup, check_interpolant, interpolate, to_monolithic, trim, validate, Implication, Interpolant,
    ModularProof, MonoStep, ProofStep, StepKind,
};
use specsms::{Clause, ModuleId, PartitionedFormula};

fn clause_strategy(n_vars: i32) -> impl Strategy<Value = Clause> {
    prop::collection::vec((1..=n_vars, any::<bool>()), 1..=3)
        .prop_map(|lits| Clause::from_dimacs(&lits.iter().map(|&(v, p)| if p { v } else { -v }).collect::<Vec<_>>()))
}

fn formula_strategy() -> impl Strategy<Value = PartitionedFormula> {
    (4i32..=12).prop_flat_map(|n| {
        let n_clauses = (n as usize) * 4;
        (
            prop::collection::vec(clause_strategy(n), n_clauses / 2),
            prop::collection::vec(clause_strategy(n), n_clauses / 2),
        )
            .prop_map(move |(s, m)| load_partitioned(s, m, n as usize, None).unwrap())
    })
}

fn config() -> SolverConfig {
    SolverConfig {
        trace: true,
        check_sync: true,
        ..SolverConfig::default()
    }
}

fn all_clauses(f: &PartitionedFormula) -> Vec<Clause> {
    f.secondary.iter().chain(&f.main).cloned().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn verdicts_match_search(f in formula_strategy(), speculate in any::<bool>()) {
        let expected = common::dpll(&all_clauses(&f), f.n_vars).is_some();
        let r = if speculate {
            solve(&f, &mut Constant::speculate_first(Vec::new()), &config()).unwrap()
        } else {
            solve(&f, &mut NoGuidance, &config()).unwrap()
        };
        prop_assert!(r.sync_violations.is_empty(), "{:?}", r.sync_violations);
        prop_assert!(check_trace(&r.trace).is_ok());
        match r.verdict {
            Verdict::Sat(m) => {
                prop_assert!(expected);
                prop_assert!(f.satisfied_by(&m));
            }
            Verdict::Unsat(p) => {
                prop_assert!(!expected);
                prop_assert!(validate(&p, &f).is_ok());
                prop_assert!(common::check_modular(&p, &f));
                let t = trim(&p, &f).unwrap();
                prop_assert!(t.len() <= p.len());
                prop_assert_eq!(trim(&t, &f).unwrap(), t.clone());
                let itp = interpolate(&t, &f).unwrap();
                prop_assert!(common::interpolant_holds(&itp, &f));
            }
            Verdict::Indeterminate => prop_assert!(false, "no budget was set"),
        }
    }

    #[test]
    fn library_oracle_agrees_with_search(f in formula_strategy()) {
        prop_assert_eq!(oracle_solve(&f).unwrap(), common::dpll(&all_clauses(&f), f.n_vars).is_some());
    }

    #[test]
    fn clauses_are_canonical(lits in prop::collection::vec((1i32..=9, any::<bool>()), 0..8)) {
        let d: Vec<i32> = lits.iter().map(|&(v, p)| if p { v } else { -v }).collect();
        let mut rev = d.clone();
        rev.reverse();
        let a = Clause::from_dimacs(&d);
        prop_assert_eq!(&a, &Clause::from_dimacs(&rev));
        prop_assert!(a.lits().windows(2).all(|w| w[0] != w[1]));
        for &x in &d {
            prop_assert!(a.to_dimacs().contains(&x));
        }
    }

    #[test]
    fn msat_text_round_trips(f in formula_strategy()) {
        let back = parse_msat(&write_msat(&f)).unwrap();
        prop_assert_eq!(back.secondary, f.secondary);
        prop_assert_eq!(back.main, f.main);
        prop_assert_eq!(back.interface, f.interface);
    }

    #[test]
    fn proof_text_round_trips(
        steps in prop::collection::vec((0u8..4, any::<bool>(), clause_strategy(9)), 0..20)
    ) {
        let p = ModularProof::new(steps.into_iter().map(|(k, main, c)| {
            let m = if main { ModuleId::Main } else { ModuleId::Secondary };
            match k {
                0 => ProofStep::asserted(m, c),
                1 => ProofStep::rup(m, c),
                2 => ProofStep::copy(m.other(), c),
                _ => ProofStep::delete(m, c),
            }
        }).collect());
        prop_assert_eq!(ModularProof::parse(&p.to_text()).unwrap(), p);
    }
}

/// UNSAT suite members with their proofs.
fn refutations() -> Vec<(PartitionedFormula, ModularProof)> {
    random_suite(200, 99)
        .into_iter()
        .filter_map(|f| match solve(&f, &mut NoGuidance, &config()).unwrap().verdict {
            Verdict::Unsat(p) => Some((f, p)),
            _ => None,
        })
        .take(40)
        .collect()
}

#[test]
fn validator_agrees_with_reference_under_mutation() {
    let mut rejected = 0;
    for (f, p) in refutations() {
        for i in 0..p.len() {
            let mut variants = Vec::new();
            let step = &p.steps[i];
            if step.clause.len() > 1 {
                let mut q = p.clone();
                let lits = step.clause.lits()[1..].to_vec();
                q.steps[i].clause = Clause::new(lits);
                variants.push(q);
            }
            let mut q = p.clone();
            q.steps[i].kind = match step.kind {
                StepKind::Asserted(m) | StepKind::Rup(m) => StepKind::Rup(m.other()),
                StepKind::Copy { src, dst } => StepKind::Copy { src: dst, dst: src },
                StepKind::Delete(m) => StepKind::Delete(m.other()),
            };
            variants.push(q);
            let mut q = p.clone();
            q.steps.remove(i);
            variants.push(q);
            for q in variants {
                let lib = validate(&q, &f).is_ok();
                assert_eq!(lib, common::check_modular(&q, &f), "step {i} of\n{}", q.to_text());
                rejected += !lib as usize;
            }
        }
    }
    assert!(rejected > 0);
}

#[test]
fn monolithic_checker_agrees_with_reference() {
    for (f, p) in refutations() {
        let all = all_clauses(&f);
        let mono = to_monolithic(&p);
        assert!(check_drup(&all, &mono).is_ok());
        assert!(common::check_mono(&all, &mono));
        // dropping any single lemma is judged alike
        for i in 0..mono.len() {
            if let MonoStep::Lemma(_) = mono[i] {
                let mut shorter = mono.clone();
                shorter.remove(i);
                assert_eq!(check_drup(&all, &shorter).is_ok(), common::check_mono(&all, &shorter));
            }
        }
    }
}

#[test]
fn interpolant_checker_agrees_with_reference_under_mutation() {
    let mut failing = 0;
    for (f, p) in refutations() {
        let itp = interpolate(&trim(&p, &f).unwrap(), &f).unwrap();
        assert!(check_interpolant(&itp, &f).passed());
        assert!(common::interpolant_holds(&itp, &f));
        let iface: Vec<_> = f.interface.iter().copied().collect();
        let mut mutants = vec![Interpolant::default(), Interpolant {
            implications: vec![Implication { antecedent: Default::default(), consequent: Clause::empty() }],
        }];
        for k in 0..itp.implications.len() {
            let mut m = itp.clone();
            m.implications.remove(k);
            mutants.push(m);
            if let Some(&v) = iface.first() {
                let mut m = itp.clone();
                m.implications[k].consequent = Clause::new(vec![v.pos()]);
                mutants.push(m);
            }
            let mut m = itp.clone();
            m.implications[k].antecedent.clear();
            mutants.push(m);
        }
        for m in mutants {
            let lib = check_interpolant(&m, &f).passed();
            assert_eq!(lib, common::interpolant_holds(&m, &f), "{m}");
            failing += !lib as usize;
        }
    }
    assert!(failing > 0);
}

#[test]
fn reference_propagator_matches_library_rup() {
    use specsms::proof::UnitPropagator;
    for f in random_suite(100, 3) {
        let all = all_clauses(&f);
        let refs: Vec<&Clause> = all.iter().collect();
        let mut up = UnitPropagator::new();
        for c in &all {
            up.add(c);
        }
        for c in f.secondary.iter().chain(&f.main).take(30) {
            let probe = Clause::new(c.lits()[..c.len().min(2)].iter().map(|&l| !l).collect());
            assert_eq!(up.check_rup(&probe).is_refuted(), common::is_rup(&refs, &probe));
        }
    }
}
