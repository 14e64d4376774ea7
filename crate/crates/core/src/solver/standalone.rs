use super::{Analysis, ModuleSolver, Provenance};
use crate::formula::{Clause, ModuleId};
use crate::proof::NoProof;

/// Plain CDCL over a single clause set. Returns a model indexed by variable
/// (unassigned variables false) or `None` when unsatisfiable.
pub fn solve_cnf(n_vars: usize, clauses: &[Clause]) -> Option<Vec<bool>> {
    let mut s = ModuleSolver::new(ModuleId::Main, n_vars, vec![false; n_vars + 1]);
    for c in clauses {
        if c.is_empty() {
            return None;
        }
        s.add_clause(c, Provenance::Asserted);
    }
    loop {
        if let Some(confl) = s.propagate() {
            let lvl = s.max_level(s.clause_lits(confl));
            s.backjump(lvl);
            match s.analyze_conflict(confl, None, &mut NoProof) {
                Analysis::Learned { clause, backjump } => {
                    if clause.is_empty() {
                        return None;
                    }
                    s.backjump(backjump);
                    s.add_clause(&clause, Provenance::Learned);
                }
                Analysis::Refine(_) => unreachable!("no external literals"),
            }
        } else {
            match s.pick_branch(&[]) {
                Some(l) => s.decide(l),
                None => {
                    let mut model = vec![false; n_vars + 1];
                    for (l, _, _) in s.assigned() {
                        model[l.var().index()] = l.is_positive();
                    }
                    return Some(model);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cnf(cs: &[&[i32]]) -> Vec<Clause> {
        cs.iter().map(|c| Clause::from_dimacs(c)).collect()
    }

    #[test]
    fn small_instances() {
        let sat = cnf(&[&[1, 2], &[-1, 2], &[-2, 3]]);
        let m = solve_cnf(3, &sat).unwrap();
        assert!(sat.iter().all(|c| c.eval(&m)));
        let unsat = cnf(&[&[1, 2], &[-1, 2], &[1, -2], &[-1, -2]]);
        assert_eq!(solve_cnf(2, &unsat), None);
        assert_eq!(solve_cnf(0, &[]), Some(vec![false]));
    }

    #[test]
    fn pigeonhole_three_into_two() {
        // p(i,h) = 2*i + h + 1 for pigeons 0..3, holes 0..2
        let p = |i: i32, h: i32| 2 * i + h + 1;
        let mut cs: Vec<Vec<i32>> = (0..3).map(|i| vec![p(i, 0), p(i, 1)]).collect();
        for h in 0..2 {
            for a in 0..3 {
                for b in a + 1..3 {
                    cs.push(vec![-p(a, h), -p(b, h)]);
                }
            }
        }
        let clauses: Vec<Clause> = cs.iter().map(|c| Clause::from_dimacs(c)).collect();
        assert_eq!(solve_cnf(6, &clauses), None);
    }
}
