use std::rc::Rc;

use memotab::nondet::{choice, fail, pure, run, Comp, Policy, Session};
use memotab_testkit::{arb_tree, sorted, Tree};
use proptest::prelude::*;

fn ms(c: &Comp<i64>) -> Vec<i64> {
    sorted(run(c))
}

fn body(t: &Rc<Tree>) -> impl Fn(i64) -> Comp<i64> + 'static {
    let t = Rc::clone(t);
    move |x| t.to_comp(x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn left_identity(x in -10i64..10, f in arb_tree(4)) {
        let f = Rc::new(f);
        prop_assert_eq!(ms(&pure(x).then(body(&f))), ms(&f.to_comp(x)));
    }

    #[test]
    fn right_identity(m in arb_tree(5)) {
        let m = Rc::new(m).to_comp(0);
        prop_assert_eq!(ms(&m.then(pure)), ms(&m));
    }

    #[test]
    fn bind_associativity(m in arb_tree(3), f in arb_tree(3), g in arb_tree(3)) {
        let (m, f, g) = (Rc::new(m).to_comp(1), Rc::new(f), Rc::new(g));
        let lhs = m.then(body(&f)).then(body(&g));
        let (f2, g2) = (Rc::clone(&f), Rc::clone(&g));
        let rhs = m.then(move |x| f2.to_comp(x).then(body(&g2)));
        prop_assert_eq!(ms(&lhs), ms(&rhs));
    }

    #[test]
    fn choice_associativity(a in arb_tree(3), b in arb_tree(3), c in arb_tree(3)) {
        let (a, b, c) = (Rc::new(a).to_comp(2), Rc::new(b).to_comp(2), Rc::new(c).to_comp(2));
        prop_assert_eq!(
            ms(&choice(&choice(&a, &b), &c)),
            ms(&choice(&a, &choice(&b, &c)))
        );
    }

    #[test]
    fn fail_is_two_sided_unit(m in arb_tree(5)) {
        let m = Rc::new(m).to_comp(-1);
        prop_assert_eq!(ms(&choice(&fail(), &m)), ms(&m));
        prop_assert_eq!(ms(&choice(&m, &fail())), ms(&m));
        prop_assert_eq!(ms(&fail::<i64>().then(pure)), Vec::<i64>::new());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn run_matches_list_semantics(t in arb_tree(6)) {
        prop_assume!(t.depth() <= 6);
        let expected = sorted(t.eval(0));
        prop_assert_eq!(ms(&Rc::new(t).to_comp(0)), expected);
    }

    #[test]
    fn results_independent_of_policy(t in arb_tree(6), seed in any::<u64>()) {
        let c = Rc::new(t).to_comp(3);
        let expected = ms(&c);
        for policy in [Policy::Lifo, Policy::Random(seed)] {
            prop_assert_eq!(sorted(Session::with_policy(policy).run(&c)), expected.clone());
        }
    }
}

#[test]
fn fifo_preserves_discovery_order() {
    let t = Rc::new(Tree::Choice(
        Rc::new(Tree::Pure(memotab_testkit::Val::Const(1))),
        Rc::new(Tree::Pure(memotab_testkit::Val::Const(2))),
    ));
    assert_eq!(run(&t.to_comp(0)), vec![1, 2]);
}
