//! Small first-order syntax for nondeterministic computations over `i64`,
//! with a direct list-semantics evaluator and a translation to `Comp`.

use std::rc::Rc;

use memotab::nondet::{choice, fail, pure, Comp};
use proptest::prelude::*;

/// A leaf value, possibly depending on the innermost bound variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Val {
    Const(i64),
    Shift(i64),
    Scale(i64),
}

impl Val {
    pub fn at(self, x: i64) -> i64 {
        match self {
            Val::Const(c) => c,
            Val::Shift(c) => x.wrapping_add(c),
            Val::Scale(c) => x.wrapping_mul(c),
        }
    }
}

/// `Then(m, body)` binds each value of `m` as the variable of `body`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tree {
    Pure(Val),
    Fail,
    Choice(Rc<Tree>, Rc<Tree>),
    Then(Rc<Tree>, Rc<Tree>),
}

impl Tree {
    /// List-monad semantics with `x` as the current variable.
    pub fn eval(&self, x: i64) -> Vec<i64> {
        match self {
            Tree::Pure(v) => vec![v.at(x)],
            Tree::Fail => vec![],
            Tree::Choice(a, b) => {
                let mut out = a.eval(x);
                out.extend(b.eval(x));
                out
            }
            Tree::Then(m, body) => m.eval(x).into_iter().flat_map(|y| body.eval(y)).collect(),
        }
    }

    pub fn to_comp(self: &Rc<Self>, x: i64) -> Comp<i64> {
        match &**self {
            Tree::Pure(v) => pure(v.at(x)),
            Tree::Fail => fail(),
            Tree::Choice(a, b) => choice(&a.to_comp(x), &b.to_comp(x)),
            Tree::Then(m, body) => {
                let body = Rc::clone(body);
                m.to_comp(x).then(move |y| body.to_comp(y))
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Tree::Pure(_) | Tree::Fail => 1,
            Tree::Choice(a, b) | Tree::Then(a, b) => 1 + a.depth().max(b.depth()),
        }
    }
}

fn arb_val() -> impl Strategy<Value = Val> {
    prop_oneof![
        (-5i64..=5).prop_map(Val::Const),
        (-3i64..=3).prop_map(Val::Shift),
        (-2i64..=2).prop_map(Val::Scale),
    ]
}

/// Random trees of depth at most `depth`.
pub fn arb_tree(depth: u32) -> impl Strategy<Value = Tree> {
    let leaf = prop_oneof![4 => arb_val().prop_map(Tree::Pure), 1 => Just(Tree::Fail)];
    leaf.prop_recursive(depth.saturating_sub(1), 48, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Tree::Choice(Rc::new(a), Rc::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Tree::Then(Rc::new(a), Rc::new(b))),
        ]
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluator_basics() {
        let t = Tree::Then(
            Rc::new(Tree::Choice(
                Rc::new(Tree::Pure(Val::Const(1))),
                Rc::new(Tree::Pure(Val::Const(2))),
            )),
            Rc::new(Tree::Pure(Val::Shift(10))),
        );
        assert_eq!(t.eval(0), vec![11, 12]);
        assert_eq!(Tree::Fail.eval(3), Vec::<i64>::new());
    }
}
