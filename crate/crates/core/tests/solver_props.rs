mod support;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::Rng;
use sigmadb::lang::ast::{SelectQuery, Source};
use sigmadb::plan::{lower_query, optimize, CompleteScan, LogicalPlan};
use sigmadb::solver::{normalize, propagate, solve_all, VarDomain};
use sigmadb::{Scalar, SolveBudget, SolveOutcome};
use support::{eval, run_script, Generator, Relation, Val};

/// The generated relation and its engine-side complete scan.
fn compiled(seed: u64) -> (Relation, CompleteScan, Generator) {
    let mut g = Generator::new(seed);
    let rel = g.relation("a", "colour");
    let mut script = rel.type_ddl();
    script.push(rel.view_ddl("v"));
    let (catalog, _) = run_script(&script.join("\n"), &SolveBudget::default());
    let plan = optimize(&lower_query(&SelectQuery::star(Source::Named("v".into())), &catalog).unwrap()).unwrap();
    let LogicalPlan::CompleteScan(cs) = plan else {
        panic!("{plan}")
    };
    (rel, cs, g)
}

fn values(d: &VarDomain) -> BTreeSet<String> {
    d.values(1000).expect("finite").iter().map(Scalar::to_string).collect()
}

fn oracle_solutions(rel: &Relation) -> Vec<Vec<String>> {
    rel.assignments()
        .into_iter()
        .filter(|r| eval(&rel.predicate, r) == Some(Val::Bool(true)))
        .map(|r| rel.render_row(&r))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn normal_form_agrees_with_the_predicate_everywhere(seed in any::<u64>()) {
        let (rel, cs, _) = compiled(seed);
        let nf = normalize(&cs.constraint, &cs.heading);
        for row in rel.assignments() {
            let text = rel.render_row(&row);
            let scalars: Vec<Scalar> = text
                .iter()
                .zip(cs.heading.attrs())
                .map(|(t, a)| Scalar::parse_for(t, &a.domain).unwrap())
                .collect();
            let want = eval(&rel.predicate, &row) == Some(Val::Bool(true));
            prop_assert_eq!(nf.holds(&scalars, &cs.heading), want, "{:?}", text);
        }
    }

    #[test]
    fn propagation_only_shrinks_and_keeps_every_solution(seed in any::<u64>()) {
        let (rel, cs, mut g) = compiled(seed);
        let mut domains: Vec<VarDomain> = cs.heading.attrs().iter().map(|a| VarDomain::full(&a.domain)).collect();
        // Start from a random partial state: a few values already excluded.
        for d in domains.iter_mut() {
            let vals = d.values(1000).unwrap();
            if vals.len() > 1 && g.rng.gen_bool(0.3) {
                let v = &vals[g.rng.gen_range(0..vals.len())];
                let _ = d.exclude(v);
            }
        }
        let before: Vec<BTreeSet<String>> = domains.iter().map(values).collect();
        let solutions: Vec<Vec<String>> = oracle_solutions(&rel)
            .into_iter()
            .filter(|s| s.iter().zip(&before).all(|(v, d)| d.contains(v)))
            .collect();
        let mut nf = normalize(&cs.constraint, &cs.heading);
        match propagate(&cs.heading, &mut domains, &mut nf) {
            Err(_) => prop_assert!(solutions.is_empty(), "contradiction but {:?} satisfy", solutions),
            Ok(()) => {
                for (i, d) in domains.iter().enumerate() {
                    let after = values(d);
                    prop_assert!(after.is_subset(&before[i]), "domain {} grew", i);
                    for s in &solutions {
                        prop_assert!(after.contains(&s[i]), "solution {:?} lost at {}", s, i);
                    }
                }
            }
        }
    }

    #[test]
    fn solutions_stay_inside_their_domains(seed in any::<u64>()) {
        let (_, cs, _) = compiled(seed);
        let nf = normalize(&cs.constraint, &cs.heading);
        let SolveOutcome::AllSolutions(tuples) = solve_all(&cs.heading, &nf, &SolveBudget::default()) else {
            return Err(TestCaseError::fail("finite relation not solved"));
        };
        for t in &tuples {
            prop_assert!(t.conforms(&cs.heading));
        }
    }
}
