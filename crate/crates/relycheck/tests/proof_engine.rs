use relycheck::lang::removal::explain_removal;
use relycheck::proof::check::FailureKind;
use relycheck::proof::{
    check_proof_tree, discharge_obligation, validate_rule_instance, Leaf, ProofReport, RuleInstance, RuleName,
};
use relycheck::syntax::{parse_source, SourceFile};

fn parse(src: &str) -> SourceFile {
    parse_source(src).unwrap_or_else(|e| panic!("{e}"))
}

fn prove(src: &str) -> ProofReport {
    let f = parse(src);
    check_proof_tree(&f.structure, f.proof.as_ref().unwrap())
}

fn leaves_of(src: &str, step: &str) -> Vec<Leaf> {
    let f = parse(src);
    let proof = f.proof.as_ref().unwrap();
    let s = proof.step(step).unwrap();
    let premises = s.premises.iter().map(|p| &proof.step(p).unwrap().conclusion).collect();
    let inst = RuleInstance { rule: s.rule, premises, conclusion: &s.conclusion, updates: &s.updates };
    validate_rule_instance(&f.structure, &inst).unwrap_or_else(|e| panic!("{e}"))
}

fn schema_error(src: &str) -> String {
    let r = prove(src);
    let f = r.failure.expect("expected a failure");
    assert_eq!(f.kind, FailureKind::Schema, "{f}");
    f.message
}

const SKIP_TREE: &str = "
    var v : 0..3;
    program { skip }
    spec ({v},{}) :: (true, v = ~v, false, v >= ~v, v = ~v);
    proof {
      s : skip |- program sat ({v},{}) :: (true, v = ~v, false, v >= ~v, v = ~v);
      c : consequence(s) |- program sat ({v},{}) :: (true, v = ~v, false, v >= ~v, v = ~v);
    }";

#[test]
fn skip_rule_leaves_nothing_open() {
    assert!(leaves_of(SKIP_TREE, "s").is_empty());
}

#[test]
fn two_node_tree_has_depth_two() {
    let r = prove(SKIP_TREE);
    assert!(r.is_valid(), "{:?}", r.failure);
    assert_eq!(r.depth, 2);
    assert!(r.lsp_b);
    assert_eq!(r.obligations, 5);
}

#[test]
fn identical_consequence_gives_five_tautologies() {
    let f = parse(SKIP_TREE);
    let leaves = leaves_of(SKIP_TREE, "c");
    assert_eq!(leaves.len(), 5);
    for l in leaves {
        let Leaf::Formula(ob) = l else { panic!("unexpected removal") };
        assert!(discharge_obligation(&f.structure, &ob).unwrap().holds);
    }
}

#[test]
fn strengthening_guar_after_the_fact_is_rejected() {
    let r = prove(
        "var v : 0..3;
         program { skip }
         proof {
           s : skip |- program sat ({v},{}) :: (true, v = ~v, false, v >= ~v, v = ~v);
           c : consequence(s) |- program sat ({v},{}) :: (true, v = ~v, false, v = ~v, v = ~v);
         }",
    );
    let f = r.failure.unwrap();
    assert_eq!(f.kind, FailureKind::Obligation);
    assert_eq!(f.path, vec!["c".to_string()]);
    assert!(f.message.contains("G1 => G2"), "{}", f.message);
    assert!(f.witness.is_some());
}

const INCREMENT: &str = "
    var x : 0..3;
    proof {
      a : assignment |- { x := x + 1 } sat ({x},{}) :: (true, I, false, x = ~x + 1 or x = ~x, I | x = ~x + 1 | I);
    }";

#[test]
fn assignment_leaves_one_obligation() {
    let f = parse(INCREMENT);
    let leaves = leaves_of(INCREMENT, "a");
    assert_eq!(leaves.len(), 1);
    let Leaf::Formula(ob) = &leaves[0] else { panic!() };
    assert!(discharge_obligation(&f.structure, ob).unwrap().holds);
    assert!(prove(INCREMENT).is_valid());
}

#[test]
fn assignment_with_wrong_effect_fails_its_obligation() {
    let r = prove(
        "var x : 0..3;
         proof { a : assignment |- { x := x + 1 } sat ({x},{}) :: (true, I, false, true, I | x = ~x + 2 | I); }",
    );
    assert_eq!(r.failure.unwrap().kind, FailureKind::Obligation);
}

#[test]
fn assignment_eff_must_be_sandwiched() {
    let m = schema_error(
        "var x : 0..3;
         proof { a : assignment |- { x := x + 1 } sat ({x},{}) :: (true, I, false, true, x = ~x + 1); }",
    );
    assert!(m.contains("eff-condition"), "{m}");
}

#[test]
fn sequential_then_consequence() {
    let r = prove(
        "var v : 0..9;
         proof {
           a1 : assignment |- { v := v + 1 } sat ({v},{}) :: (true, I, false, true, I | v = ~v + 1 | I);
           a2 : assignment |- { v := v + 2 } sat ({v},{}) :: (true, I, false, true, I | v = ~v + 2 | I);
           s : sequential(a1, a2) |- { v := v + 1; v := v + 2 }
                 sat ({v},{}) :: (true, I, false, true, I | v = ~v + 1 | I | I | v = ~v + 2 | I);
           c : consequence(s) |- { v := v + 1; v := v + 2 } sat ({v},{}) :: (true, I, false, true, v = ~v + 3);
         }",
    );
    assert!(r.is_valid(), "{:?}", r.failure);
    assert_eq!(r.depth, 3);
}

#[test]
fn while_rule_discharges_well_foundedness() {
    let src = "var v : 0..3;
         proof {
           b : assignment |- { v := v + 1 } sat ({v},{}) :: (v < 3, I, false, true, I | v = ~v + 1 | I);
           w : while(b) |- { while v < 3 do v := v + 1 od }
                 sat ({v},{}) :: (true, I, false, true, (closure(I | v = ~v + 1 | I) or I) and not v < 3);
         }";
    let r = prove(src);
    assert!(r.is_valid(), "{:?}", r.failure);
    let leaves = leaves_of(src, "w");
    assert_eq!(leaves.len(), 1);
}

#[test]
fn while_rule_rejects_a_cyclic_variant() {
    let r = prove(
        "var v : 0..3;
         proof {
           b : assignment |- { v := v } sat ({v},{}) :: (v < 3, I, false, true, I | v = ~v | I);
           w : while(b) |- { while v < 3 do v := v od }
                 sat ({v},{}) :: (true, I, false, true, (closure(I | v = ~v | I) or I) and not v < 3);
         }",
    );
    let f = r.failure.unwrap();
    assert_eq!(f.kind, FailureKind::Obligation);
    assert!(f.message.starts_with("wf"), "{}", f.message);
}

#[test]
fn lsps_while_needs_square_brackets() {
    let m = schema_error(
        "var v : 0..1;
         proof {
           b : skip |- { skip } sat ({v},{}) :: (true, I, false, true, I);
           w : lsps-while(b) |- { while true do skip od } sat ({v},{}) :: (true, I, false, true, false);
         }",
    );
    assert!(m.contains("square"), "{m}");
}

#[test]
fn plain_while_is_refused_under_square_brackets() {
    let m = schema_error(
        "var v : 0..1;
         proof {
           b : skip |- { skip } sat [{v},{}] :: [true, I, false, true, I];
           w : while(b) |- { while true do skip od } sat [{v},{}] :: [true, I, false, true, (closure(I) or I) and not true];
         }",
    );
    assert!(m.contains("lsps-while"), "{m}");
}

#[test]
fn lsps_while_has_no_termination_obligation() {
    let r = prove(
        "var v : 0..1;
         proof {
           b : skip |- { skip } sat [{v},{}] :: [true, I, false, true, I];
           w : lsps-while(b) |- { while true do skip od } sat [{v},{}] :: [true, I, false, true, (closure(I) or I) and not true];
         }",
    );
    assert!(r.is_valid(), "{:?}", r.failure);
    assert_eq!(r.obligations, 0);
}

#[test]
fn parallel_rule_on_disjoint_writers() {
    let r = prove(
        "var x, y : 0..1;
         proof {
           a : assignment |- { x := 1 } sat ({x, y},{}) :: (true, x = ~x, false, y = ~y, x = ~x | x = 1 | x = ~x);
           b : assignment |- { y := 1 } sat ({x, y},{}) :: (true, y = ~y, false, x = ~x, y = ~y | y = 1 | y = ~y);
           p : parallel(a, b) |- { par { x := 1 || y := 1 } }
                 sat ({x, y},{}) :: (true, x = ~x and y = ~y, false, true, (x = ~x | x = 1 | x = ~x) and (y = ~y | y = 1 | y = ~y));
         }",
    );
    assert!(r.is_valid(), "{:?}", r.failure);
}

#[test]
fn parallel_guar_must_include_the_other_rely() {
    let m = schema_error(
        "var x, y : 0..1;
         proof {
           a : assignment |- { x := 1 } sat ({x, y},{}) :: (true, x = ~x, false, true, x = ~x | x = 1 | x = ~x);
           b : assignment |- { y := 1 } sat ({x, y},{}) :: (true, y = ~y, false, x = ~x, y = ~y | y = 1 | y = ~y);
           p : parallel(a, b) |- { par { x := 1 || y := 1 } }
                 sat ({x, y},{}) :: (true, x = ~x and y = ~y, false, true, (x = ~x | x = 1 | x = ~x) and (y = ~y | y = 1 | y = ~y));
         }",
    );
    assert!(m.contains("premise 1 guar-condition"), "{m}");
}

#[test]
fn await_rule() {
    let r = prove(
        "var x : 0..1;
         proof {
           b : assignment |- { x := 1 } sat ({x},{}) :: (preserve(true, I) and x = 0, I, false, true, I | x = 1 | I);
           a : await(b) |- { await x = 0 do x := 1 od } sat ({x},{}) :: (true, I, not x = 0, true, I | x = 1 | I);
         }",
    );
    assert!(r.is_valid(), "{:?}", r.failure);
}

#[test]
fn await_rule_needs_a_wait_condition() {
    let r = prove(
        "var x : 0..1;
         proof {
           b : assignment |- { x := 1 } sat ({x},{}) :: (preserve(true, I) and x = 0, I, false, true, I | x = 1 | I);
           a : await(b) |- { await x = 0 do x := 1 od } sat ({x},{}) :: (true, I, false, true, I | x = 1 | I);
         }",
    );
    let f = r.failure.unwrap();
    assert_eq!(f.kind, FailureKind::Obligation);
    assert!(f.message.contains("=> W"), "{}", f.message);
}

#[test]
fn block_rule_freezes_locals() {
    let r = prove(
        "var x, t : 0..1;
         proof {
           a : assignment |- { t := 1 } sat ({x, t},{}) :: (true, I and t = ~t, false, x = ~x,
                 (I and t = ~t) | true | (I and t = ~t));
           c : consequence(a) |- { t := 1 } sat ({x, t},{}) :: (true, I and t = ~t, false, x = ~x, true);
           b : block(c) |- { begin loc t; t := 1 end } sat ({x},{}) :: (true, I, false, x = ~x, true);
         }",
    );
    assert!(r.is_valid(), "{:?}", r.failure);
    let r = prove(
        "var x, t : 0..1;
         proof {
           a : assignment |- { t := 1 } sat ({x, t},{}) :: (true, I and t = ~t, false, x = ~x, I | t = 1 | I);
           b : block(a) |- { begin loc t; t := 1 end } sat ({x},{}) :: (true, I, false, x = ~x, I | t = 1 | I);
         }",
    );
    assert_eq!(r.failure.unwrap().kind, FailureKind::Specification);
}

#[test]
fn pre_and_effect_rules() {
    let r = prove(
        "var v : 0..3;
         proof {
           s : skip |- { skip } sat ({v},{}) :: (v < 2, v >= ~v, false, true, v >= ~v);
           p : pre(s) |- { skip } sat ({v},{}) :: (v < 2, v >= ~v, false, true, ~v < 2 and v >= ~v);
           e : effect(p) |- { skip } sat ({v},{}) :: (v < 2, v >= ~v, false, true, (~v < 2 and v >= ~v) and closure(v >= ~v or true));
         }",
    );
    assert!(r.is_valid(), "{:?}", r.failure);
    assert_eq!(r.depth, 3);
}

#[test]
fn global_and_auxiliary_rules() {
    let r = prove(
        "var v, w, a : 0..1;
         proof {
           s : skip |- { skip } sat ({v},{}) :: (true, I, false, true, I);
           g : global(s) |- { skip } sat ({v, w},{}) :: (true, I, false, w = ~w, I);
           x : auxiliary(g) |- { skip } sat ({v, w},{a}) :: (true, I, false, w = ~w and a = ~a, I);
         }",
    );
    assert!(r.is_valid(), "{:?}", r.failure);
    let m = schema_error(
        "var v : 0..1;
         proof {
           s : skip |- { v := v } sat ({v},{}) :: (true, I, false, true, I);
         }",
    );
    assert!(m.contains("skip"), "{m}");
}

#[test]
fn elimination_rule() {
    let r = prove(
        "var v, a : 0..1;
         proof {
           s : skip |- { skip } sat ({v},{a}) :: (a = v, I, false, true, I);
           e : elimination(s) |- { skip } sat ({v},{}) :: (exists a : 0..1 . a = v, forall ~a : 0..1 . exists a : 0..1 . I, false, true, I);
         }",
    );
    assert!(r.is_valid(), "{:?}", r.failure);
}

#[test]
fn introduction_carries_a_removal_leaf() {
    let src = "var v, a : 0..1;
         program { v := 1 }
         witness { await true do a := 1; v := 1 od }
         proof {
           s : await(q) |- witness sat ({v, a},{}) :: (true, I, false, true, I | a = 1 and v = 1 | I);
           i : introduction(s) |- program sat ({v},{a}) :: (true, I, false, true, I | a = 1 and v = 1 | I);
         }";
    let leaves = {
        let f = parse(src);
        let proof = f.proof.as_ref().unwrap();
        let s = proof.step("i").unwrap();
        let premises = vec![&proof.steps[0].conclusion];
        let inst = RuleInstance { rule: RuleName::Introduction, premises, conclusion: &s.conclusion, updates: &[] };
        validate_rule_instance(&f.structure, &inst).unwrap()
    };
    assert_eq!(leaves.len(), 1);
    let Leaf::Removal(r) = &leaves[0] else { panic!() };
    explain_removal(r).unwrap();
    let report = prove(src);
    assert!(!report.lsp_b);
    assert_eq!(report.failure.unwrap().kind, FailureKind::Structure);
}

#[test]
fn unused_steps_are_noted() {
    let r = prove(
        "var v : 0..1;
         proof {
           u : skip |- { skip } sat ({v},{}) :: (true, I, false, true, I);
           s : skip |- { skip } sat ({v},{}) :: (true, v = ~v, false, true, v = ~v);
         }",
    );
    assert!(r.is_valid());
    assert_eq!(r.notes.len(), 1);
    assert!(r.notes[0].contains('u'));
}

#[test]
fn updates_only_on_assignment_and_await() {
    let m = schema_error(
        "var v, a : 0..1;
         proof { s : skip with a := 1 |- { skip } sat ({v},{a}) :: (true, I, false, true, I); }",
    );
    assert!(m.contains("updates"), "{m}");
}

#[test]
fn assignment_with_auxiliary_update() {
    let r = prove(
        "var v, a : 0..3;
         proof {
           s : assignment with a := a + 1 |- { v := v + 1 }
                 sat ({v},{a}) :: (true, I, false, v - ~v = a - ~a, I | v = ~v + 1 and a = ~a + 1 | I);
         }",
    );
    assert!(r.is_valid(), "{:?}", r.failure);
    let m = schema_error(
        "var v, a, b : 0..3;
         proof { s : assignment with a := b |- { v := 1 } sat ({v},{a}) :: (true, I, false, true, I | true | I); }",
    );
    assert!(m.contains("update"), "{m}");
}
