mod common;

use specsms::bench::gen_chain;
use specsms::formula::load_partitioned;
use specsms::proof::{check_drup, interpolate, to_monolithic, trim, validate, ModularProof, MonoStep};
use specsms::{Clause, Error, PartitionedFormula};

const CHAIN2_PROOF: &str = "\
a m 1 7 0
a m 1 -7 0
a s -1 -5 2 0
a s -1 5 2 0
a m -2 -8 3 0
a m -2 8 3 0
a s -3 -6 4 0
a s -3 6 4 0
a m -4 9 0
a m -4 -9 0
r m 1 0
r m -4 0
r m -2 3 0
c m s -2 3 0
r s -3 4 0
r s -1 4 0
c s m -1 4 0
r m 0
";

fn chain2() -> (PartitionedFormula, ModularProof) {
    (gen_chain(2).unwrap(), ModularProof::parse(CHAIN2_PROOF).unwrap())
}

#[test]
fn generator_reproduces_the_two_stage_chain() {
    let (f, p) = chain2();
    assert_eq!(f.n_vars, 9);
    assert_eq!(f.interface.iter().map(|v| v.index()).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
    assert!(validate(&p, &f).is_ok());
    assert!(common::check_modular(&p, &f));
}

#[test]
fn monolithic_form_keeps_inputs_and_first_additions() {
    let (f, p) = chain2();
    let mono = to_monolithic(&p);
    assert_eq!(mono.len(), 16);
    assert_eq!(mono.iter().filter(|s| matches!(s, MonoStep::Input(_))).count(), 10);
    let all: Vec<Clause> = f.secondary.iter().chain(&f.main).cloned().collect();
    assert!(check_drup(&all, &mono).is_ok());
    assert!(common::check_mono(&all, &mono));
}

#[test]
fn removing_the_first_copy_breaks_the_secondary_derivation() {
    let (f, mut p) = chain2();
    p.steps.remove(13);
    assert!(matches!(validate(&p, &f), Err(Error::InvalidProof { step: 15, .. })));
    assert!(!common::check_modular(&p, &f));
}

#[test]
fn irrelevant_assertion_is_trimmed() {
    let (f, p) = chain2();
    let mut padded = p.clone();
    padded.steps.insert(0, specsms::proof::ProofStep::asserted(specsms::ModuleId::Main, Clause::from_dimacs(&[1, 7])));
    let t = trim(&padded, &f).unwrap();
    assert!(t.len() < padded.len());
    assert!(validate(&t, &f).is_ok());
}

#[test]
fn proof_that_only_copies_bottom_gives_false() {
    let f = load_partitioned(
        vec![Clause::from_dimacs(&[1]), Clause::from_dimacs(&[-1])],
        vec![Clause::from_dimacs(&[1, 2])],
        2,
        None,
    )
    .unwrap();
    let p = ModularProof::parse("a s 1 0\na s -1 0\nr s 0\nc s m 0\n").unwrap();
    assert!(validate(&p, &f).is_ok());
    let itp = interpolate(&p, &f).unwrap();
    assert_eq!(itp.implications.len(), 1);
    assert!(itp.implications[0].antecedent.is_empty() && itp.implications[0].consequent.is_empty());
    assert!(!itp.eval(&[false, true, true]));
}

#[test]
fn interpolation_rejects_deletions() {
    let (f, p) = chain2();
    let mut with_del = ModularProof::parse("a m 1 7 0\nd m 1 7 0\n").unwrap();
    with_del.steps.extend(p.steps);
    assert!(validate(&with_del, &f).is_ok());
    assert_eq!(interpolate(&with_del, &f).unwrap_err(), Error::ProofHasDeletions);
    let t = trim(&with_del, &f).unwrap();
    assert!(!t.has_deletions());
    assert!(interpolate(&t, &f).is_ok());
}
