//! Built-in demo computations and grammars.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;
use std::str::FromStr;

use crate::combinators::{alt, epsilon, seq, term, Pos, Recognizer, Tokens};
use crate::memo::{Chart, Memo, Rec};
use crate::nondet::{fail, pure, sum, Comp, Session};

/// Open-recursive Fibonacci: 0 and 1 are base cases, anything larger sums the
/// two preceding values. Negative arguments deliver nothing.
pub fn fib_body(fib: &Rec<i64, u64>, n: i64) -> Comp<u64> {
    match n {
        _ if n < 0 => fail(),
        0 | 1 => pure(n as u64),
        _ => {
            let fib = fib.clone();
            fib.call(n - 1)
                .then(move |a| fib.call(n - 2).map(move |b| a + b))
        }
    }
}

/// A finite directed edge relation over named nodes.
#[derive(Debug, Clone, Default)]
pub struct EdgeSet {
    succ: HashMap<String, Vec<String>>,
}

impl EdgeSet {
    pub fn new<I, A, B>(edges: I) -> Self
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        let mut succ: HashMap<String, Vec<String>> = HashMap::new();
        for (from, to) in edges {
            succ.entry(from.into()).or_default().push(to.into());
        }
        EdgeSet { succ }
    }

    /// `a -> b`, `b -> c`.
    pub fn demo() -> Self {
        EdgeSet::new([("a", "b"), ("b", "c")])
    }

    pub fn edge(&self, from: &str) -> Comp<String> {
        match self.succ.get(from) {
            Some(targets) => sum(targets.iter().cloned().map(pure)),
            None => fail(),
        }
    }
}

/// Open-recursive transitive closure: a direct edge, or a path followed by a
/// path. Left recursive in its second branch.
pub fn path_body(edges: &EdgeSet, path: &Rec<String, String>, from: String) -> Comp<String> {
    let step = {
        let next = path.clone();
        path.call(from.clone()).then(move |mid| next.call(mid))
    };
    edges.edge(&from).or(&step)
}

/// Memoised Fibonacci in `session`.
pub fn fib(session: &Session) -> Memo<i64, u64> {
    session.memo_rec(fib_body)
}

/// Memoised transitive closure of `edges` in `session`.
pub fn path(session: &Session, edges: EdgeSet) -> Memo<String, String> {
    let edges = Rc::new(edges);
    session.memo_rec(move |p: &Rec<String, String>, x| path_body(&edges, p, x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GrammarId {
    Johnson,
    Sm,
    Sml,
    Smml,
}

impl GrammarId {
    pub const ALL: [GrammarId; 4] = [
        GrammarId::Johnson,
        GrammarId::Sm,
        GrammarId::Sml,
        GrammarId::Smml,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GrammarId::Johnson => "johnson",
            GrammarId::Sm => "sm",
            GrammarId::Sml => "sml",
            GrammarId::Smml => "smml",
        }
    }
}

impl fmt::Display for GrammarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown grammar `{0}` (expected johnson, sm, sml or smml)")]
pub struct UnknownGrammar(pub String);

impl FromStr for GrammarId {
    type Err = UnknownGrammar;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GrammarId::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| UnknownGrammar(s.to_string()))
    }
}

/// A memoised grammar bound to one token sequence: the start recognizer and
/// the named memo tables of its rules.
#[derive(Clone)]
pub struct Grammar {
    pub start: Recognizer,
    pub rules: Vec<(String, Memo<Pos, Pos>)>,
    pub input: Tokens,
}

impl Grammar {
    pub fn charts(&self) -> Vec<(String, Chart<Pos, Pos>)> {
        self.rules
            .iter()
            .map(|(name, memo)| (name.clone(), memo.chart()))
            .collect()
    }

    pub fn chart(&self, rule: &str) -> Option<Chart<Pos, Pos>> {
        self.rules
            .iter()
            .find(|(name, _)| name == rule)
            .map(|(_, memo)| memo.chart())
    }

    /// Run the start rule over the whole input and report whether some
    /// parse consumed all of it.
    pub fn accepts(&self, session: &Session) -> bool {
        crate::combinators::accepts(session, &self.start, self.input.len())
    }
}

/// `n` copies of the token `a`.
pub fn sentence(n: usize) -> Tokens {
    std::iter::repeat_n("a".to_string(), n).collect()
}

/// The demo sentence for the Johnson grammar.
pub fn johnson_sentence() -> Tokens {
    crate::combinators::tokens(["Sandy", "'s", "professor", "knows", "Kim"])
}

pub fn build(session: &Session, id: GrammarId, input: &Tokens) -> Grammar {
    match id {
        GrammarId::Johnson => johnson(session, input),
        GrammarId::Sm => sm(session, input),
        GrammarId::Sml => sml(session, input),
        GrammarId::Smml => smml(session, input),
    }
}

fn lit(input: &Tokens, tok: &str) -> Recognizer {
    term(input, tok.to_string())
}

fn johnson(session: &Session, input: &Tokens) -> Grammar {
    let t = |tok: &str| lit(input, tok);
    let v = alt(&t("likes"), &t("knows"));
    let pn = alt(&t("Kim"), &t("Sandy"));
    let det = alt(&t("every"), &t("no"));
    let n = alt(&t("student"), &t("professor"));
    let poss = t("'s");

    let np = session.memo_rec(move |np: &Rec<Pos, Pos>, p| {
        let np = Recognizer::from(np.clone());
        alt(&alt(&pn, &seq(&det, &n)), &seq(&seq(&np, &poss), &n)).at(p)
    });

    type Pair = (Rec<Pos, Pos>, Rec<Pos, Pos>);
    let np_rule = Recognizer::from(np.clone());
    let np_vp = np_rule.clone();
    let (vp, s) = session.memo_rec2(
        move |(_, s): &Pair, p| {
            let s = Recognizer::from(s.clone());
            alt(&seq(&v, &np_vp), &seq(&v, &s)).at(p)
        },
        move |(vp, _): &Pair, p| seq(&np_rule, &Recognizer::from(vp.clone())).at(p),
    );

    Grammar {
        start: s.clone().into(),
        rules: vec![("s".into(), s), ("np".into(), np), ("vp".into(), vp)],
        input: Rc::clone(input),
    }
}

fn sm(session: &Session, input: &Tokens) -> Grammar {
    let a = lit(input, "a");
    let sm = session.memo_rec(move |sm: &Rec<Pos, Pos>, p| {
        let sm = Recognizer::from(sm.clone());
        alt(&seq(&seq(&a, &sm), &sm), &epsilon()).at(p)
    });
    Grammar {
        start: sm.clone().into(),
        rules: vec![("sm".into(), sm)],
        input: Rc::clone(input),
    }
}

fn sml(session: &Session, input: &Tokens) -> Grammar {
    let a = lit(input, "a");
    let sml = session.memo_rec(move |sml: &Rec<Pos, Pos>, p| {
        let sml = Recognizer::from(sml.clone());
        alt(&seq(&seq(&sml, &sml), &a), &epsilon()).at(p)
    });
    Grammar {
        start: sml.clone().into(),
        rules: vec![("sml".into(), sml)],
        input: Rc::clone(input),
    }
}

fn smml(session: &Session, input: &Tokens) -> Grammar {
    type Pair = (Rec<Pos, Pos>, Rec<Pos, Pos>);
    let a = lit(input, "a");
    let (smml, aux) = session.memo_rec2(
        |(smml, aux): &Pair, p| {
            let smml = Recognizer::from(smml.clone());
            let aux = Recognizer::from(aux.clone());
            alt(&seq(&smml, &aux), &epsilon()).at(p)
        },
        move |(smml, _): &Pair, p| seq(&Recognizer::from(smml.clone()), &a).at(p),
    );
    Grammar {
        start: smml.clone().into(),
        rules: vec![("smml".into(), smml), ("aux".into(), aux)],
        input: Rc::clone(input),
    }
}
