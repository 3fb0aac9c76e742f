//! Naive fixpoint recognizer: the chart a tabled top-down recognizer must
//! produce, computed bottom-up without continuations or memo tables.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use memotab::dsl::{Expr, Rule, RuleSet};
use rand::seq::SliceRandom;
use rand::Rng;

type Ends = BTreeSet<usize>;

/// `ends[(rule, i)]` is every `j` with `rule =>* input[i..j]`; `calls` is every
/// `(rule, i)` a top-down recognizer started at `(start, 0)` invokes.
#[derive(Debug, Clone)]
pub struct ChartOracle {
    pub names: Vec<String>,
    pub ends: BTreeMap<(usize, usize), Ends>,
    pub calls: BTreeSet<(usize, usize)>,
}

impl ChartOracle {
    pub fn new(rules: &RuleSet, input: &[String]) -> Self {
        let rules = rules.rules();
        let names: Vec<String> = rules.iter().map(|r| r.name.clone()).collect();
        let n = input.len();
        let mut ends: BTreeMap<(usize, usize), Ends> = BTreeMap::new();
        for r in 0..rules.len() {
            for i in 0..=n {
                ends.insert((r, i), Ends::new());
            }
        }
        // Grow every entry by one rule application until nothing changes.
        loop {
            let mut changed = false;
            for (r, rule) in rules.iter().enumerate() {
                for i in 0..=n {
                    let found = eval(&rule.expr, i, input, &names, &ends, &mut |_, _| {});
                    let entry = ends.get_mut(&(r, i)).unwrap();
                    let before = entry.len();
                    entry.extend(found);
                    changed |= entry.len() != before;
                }
            }
            if !changed {
                break;
            }
        }

        let mut calls = BTreeSet::new();
        let mut queue = VecDeque::from([(0usize, 0usize)]);
        calls.insert((0, 0));
        while let Some((r, i)) = queue.pop_front() {
            let mut found = Vec::new();
            eval(&rules[r].expr, i, input, &names, &ends, &mut |m, p| found.push((m, p)));
            for call in found {
                if calls.insert(call) {
                    queue.push_back(call);
                }
            }
        }
        ChartOracle { names, ends, calls }
    }

    pub fn index(&self, name: &str) -> usize {
        self.names.iter().position(|n| n == name).expect("known rule")
    }

    /// Expected chart of `name`: one entry per called start position.
    pub fn chart(&self, name: &str) -> BTreeMap<usize, Ends> {
        let r = self.index(name);
        self.calls
            .iter()
            .filter(|(m, _)| *m == r)
            .map(|&(_, i)| (i, self.ends[&(r, i)].clone()))
            .collect()
    }

    pub fn accepts(&self, len: usize) -> bool {
        self.ends[&(0, 0)].contains(&len)
    }
}

fn eval(
    expr: &Expr,
    i: usize,
    input: &[String],
    names: &[String],
    ends: &BTreeMap<(usize, usize), Ends>,
    on_call: &mut dyn FnMut(usize, usize),
) -> Ends {
    match expr {
        Expr::Terminal(t) => {
            if input.get(i) == Some(t) {
                Ends::from([i + 1])
            } else {
                Ends::new()
            }
        }
        Expr::Eps => Ends::from([i]),
        Expr::NonTerm(name) => {
            let m = names.iter().position(|n| n == name).expect("validated");
            on_call(m, i);
            ends[&(m, i)].clone()
        }
        Expr::Seq(items) => {
            let mut here = Ends::from([i]);
            for item in items {
                let mut next = Ends::new();
                for &p in &here {
                    next.extend(eval(item, p, input, names, ends, on_call));
                }
                here = next;
            }
            here
        }
        Expr::Alt(items) => {
            let mut out = Ends::new();
            for item in items {
                out.extend(eval(item, i, input, names, ends, on_call));
            }
            out
        }
    }
}

/// Random grammar with at most `max_rules` nonterminals and at most three
/// alternatives per rule over terminals `a` and `b`. Roughly a third of the
/// rules get a directly left-recursive alternative.
pub fn random_rules(rng: &mut impl Rng, max_rules: usize) -> RuleSet {
    let count = rng.gen_range(1..=max_rules);
    let names: Vec<String> = (0..count).map(|i| format!("N{i}")).collect();
    let rules = names
        .iter()
        .map(|name| {
            let alts = rng.gen_range(1..=3);
            let mut items: Vec<Expr> = (0..alts).map(|_| random_seq(rng, &names)).collect();
            if rng.gen_bool(0.35) {
                let k = rng.gen_range(0..items.len());
                items[k] = match std::mem::replace(&mut items[k], Expr::Eps) {
                    Expr::Seq(mut xs) => {
                        xs.insert(0, Expr::NonTerm(name.clone()));
                        Expr::Seq(xs)
                    }
                    other => Expr::Seq(vec![Expr::NonTerm(name.clone()), other]),
                };
            }
            let expr = if items.len() == 1 {
                items.pop().unwrap()
            } else {
                Expr::Alt(items)
            };
            Rule {
                name: name.clone(),
                expr,
            }
        })
        .collect();
    RuleSet::new(rules).expect("generated grammar is valid")
}

fn random_seq(rng: &mut impl Rng, names: &[String]) -> Expr {
    let len = rng.gen_range(0..=3);
    if len == 0 {
        return Expr::Eps;
    }
    let mut items: Vec<Expr> = (0..len)
        .map(|_| {
            if rng.gen_bool(0.45) {
                Expr::NonTerm(names.choose(rng).unwrap().clone())
            } else {
                Expr::Terminal(if rng.gen_bool(0.5) { "a" } else { "b" }.to_string())
            }
        })
        .collect();
    if items.len() == 1 {
        items.pop().unwrap()
    } else {
        Expr::Seq(items)
    }
}

/// Random word of length at most `max_len` over `a` and `b`.
pub fn random_input(rng: &mut impl Rng, max_len: usize) -> Vec<String> {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| if rng.gen_bool(0.5) { "a" } else { "b" }.to_string())
        .collect()
}
