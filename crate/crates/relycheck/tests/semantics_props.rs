mod common;

use common::{expr, prog, program_text, rely_text, structure};
use proptest::prelude::*;
use relycheck::lang::ast::Prog;
use relycheck::lang::validate::validate_program;
use relycheck::logic::Evaluator;
use relycheck::semantics::{build_config_graph, initial_states, ConfigGraph, Environment, Label, Machine};
use relycheck::structure::{Structure, VarId};

fn scope(st: &Structure) -> Vec<VarId> {
    ["x", "y", "b"].iter().map(|v| st.var_id(v).unwrap()).collect()
}

fn graph(st: &Structure, z: &Prog, rely: &str) -> ConfigGraph {
    let m = Machine::new(st, 100_000);
    let init = initial_states(st, &scope(st), &expr(st, "true")).unwrap();
    let r = expr(st, rely);
    let env = Environment { rely: &r, scope: scope(st) };
    build_config_graph(&m, z, &init, &env).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(80))]

    #[test]
    fn sequential_programs_are_deterministic(src in program_text(3, true, false)) {
        let st = structure();
        let z = prog(&st, &src);
        prop_assume!(validate_program(&z, &st).is_ok());
        let m = Machine::new(&st, 100_000);
        let g = graph(&st, &z, "I");
        for n in 0..g.nodes.len() {
            if let Some(p) = g.residue(n) {
                prop_assert!(m.internal(p, &g.nodes[n].state).unwrap().len() <= 1);
            }
        }
    }

    #[test]
    fn graph_edges_follow_the_semantics(src in program_text(3, true, true), rely in rely_text()) {
        let st = structure();
        let z = prog(&st, &src);
        prop_assume!(validate_program(&z, &st).is_ok());
        let m = Machine::new(&st, 100_000);
        let g = graph(&st, &z, &rely);
        let ev = Evaluator::new(&st, &scope(&st)).unwrap();
        let r = expr(&st, &rely);
        for e in &g.edges {
            let (a, b) = (&g.nodes[e.from], &g.nodes[e.to]);
            if e.label == Label::External {
                prop_assert_eq!(a.residue, b.residue);
                prop_assert!(ev.holds(&r, Some(&a.state), &b.state).unwrap());
                for &h in &g.hid {
                    prop_assert_eq!(&a.state[h], &b.state[h]);
                }
                prop_assert!(a.state != b.state);
            }
        }
        for n in 0..g.nodes.len() {
            let Some(p) = g.residue(n) else {
                prop_assert!(!g.is_blocked(n));
                continue;
            };
            let succ = m.internal(p, &g.nodes[n].state).unwrap();
            prop_assert_eq!(g.is_blocked(n), succ.is_empty());
            for (res, s) in succ {
                let found = g.out[n].iter().any(|&e| {
                    let t = &g.nodes[g.edges[e].to];
                    g.edges[e].label == Label::Internal && t.state == s && g.residues[t.residue as usize] == res
                });
                prop_assert!(found);
            }
        }
    }
}
