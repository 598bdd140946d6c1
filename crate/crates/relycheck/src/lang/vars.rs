//! Variable analyses: `var`, `hid`, declared and global variables.

use std::collections::BTreeSet;

use crate::lang::ast::{Program, ProgramKind};

/// Every variable occurring in `z`, declared or not (`var[z]`).
pub fn free_vars(z: &Program) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    walk(z, &mut |p| match &p.kind {
        ProgramKind::Assign { var, expr } => {
            out.insert(var.clone());
            out.extend(expr.free_vars());
        }
        ProgramKind::Block { decls, .. } => out.extend(decls.iter().cloned()),
        ProgramKind::If { test, .. } | ProgramKind::While { test, .. } | ProgramKind::Await { test, .. } => {
            out.extend(test.free_vars())
        }
        _ => {}
    });
    out
}

/// Variables declared by some block of `z`.
pub fn declared(z: &Program) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    walk(z, &mut |p| {
        if let ProgramKind::Block { decls, .. } = &p.kind {
            out.extend(decls.iter().cloned());
        }
    });
    out
}

/// Variables of `z` that are not declared in `z`.
pub fn globals(z: &Program) -> BTreeSet<String> {
    let d = declared(z);
    free_vars(z).into_iter().filter(|v| !d.contains(v)).collect()
}

/// `hid[z]`: declared variables plus variables read by if/while tests.
pub fn hid_set(z: &Program) -> BTreeSet<String> {
    let mut out = declared(z);
    walk(z, &mut |p| {
        if let ProgramKind::If { test, .. } | ProgramKind::While { test, .. } = &p.kind {
            out.extend(test.free_vars());
        }
    });
    out
}

/// Variables assigned somewhere in `z`.
pub fn assigned(z: &Program) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    walk(z, &mut |p| {
        if let ProgramKind::Assign { var, .. } = &p.kind {
            out.insert(var.clone());
        }
    });
    out
}

/// Pre-order traversal.
pub fn walk(z: &Program, f: &mut impl FnMut(&Program)) {
    f(z);
    for c in z.children() {
        walk(c, f);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::ast::*;
    use crate::logic::expr::*;

    fn names(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn hid_of_loop_example() {
        // begin loc y; y:=v; while x<100 do x:=x+y od end
        let z = block(
            vec!["y".into()],
            seq(
                assign("y", var("v")),
                while_(
                    bin(BinOp::Lt, var("x"), int(100)),
                    assign("x", bin(BinOp::Add, var("x"), var("y"))),
                ),
            ),
        );
        assert_eq!(hid_set(&z), names(&["x", "y"]));
        assert!(hid_set(&skip()).is_empty());
    }

    #[test]
    fn await_tests_are_not_hidden() {
        let z = await_(var("b"), assign("w", int(1)));
        assert!(hid_set(&z).is_empty());
    }

    #[test]
    fn var_of_block() {
        let z = block(vec!["y".into()], assign("y", var("v")));
        assert_eq!(free_vars(&z), names(&["v", "y"]));
        assert_eq!(globals(&z), names(&["v"]));
    }
}
