//! Recognizer combinators over a fixed token sequence.
//!
//! A recognizer maps a start position to the computation of every position
//! where a match can end. Positions index into the session's token sequence;
//! the suffix `tokens[pos..]` is the remainder in list-based presentations.

use std::rc::Rc;

use crate::memo::{Memo, Rec};
use crate::nondet::{choice, fail, pure, Comp, Session};

/// Index of the next token to be consumed, `0 <= pos <= n`.
pub type Pos = usize;

/// Immutable token sequence shared by all recognizers of a parse session.
pub type Tokens<T = String> = Rc<[T]>;

pub fn tokens<I, S>(words: I) -> Tokens
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    words.into_iter().map(Into::into).collect()
}

/// Split text on whitespace into tokens.
pub fn tokenize(text: &str) -> Tokens {
    tokens(text.split_whitespace())
}

#[derive(Clone)]
pub struct Recognizer(Rc<dyn Fn(Pos) -> Comp<Pos>>);

impl Recognizer {
    pub fn new(f: impl Fn(Pos) -> Comp<Pos> + 'static) -> Self {
        Recognizer(Rc::new(f))
    }

    pub fn at(&self, pos: Pos) -> Comp<Pos> {
        (self.0)(pos)
    }

    pub fn seq(&self, next: &Recognizer) -> Recognizer {
        seq(self, next)
    }

    pub fn alt(&self, other: &Recognizer) -> Recognizer {
        alt(self, other)
    }
}

impl From<Memo<Pos, Pos>> for Recognizer {
    fn from(memo: Memo<Pos, Pos>) -> Self {
        Recognizer::new(move |p| memo.call(p))
    }
}

impl From<Rec<Pos, Pos>> for Recognizer {
    fn from(rec: Rec<Pos, Pos>) -> Self {
        Recognizer::new(move |p| rec.call(p))
    }
}

/// Matches the single token `tok`.
pub fn term<T: PartialEq + 'static>(input: &Rc<[T]>, tok: T) -> Recognizer {
    let input = Rc::clone(input);
    Recognizer::new(move |p| match input.get(p) {
        Some(t) if *t == tok => pure(p + 1),
        _ => fail(),
    })
}

/// Matches the empty sequence.
pub fn epsilon() -> Recognizer {
    Recognizer::new(pure)
}

pub fn seq(first: &Recognizer, next: &Recognizer) -> Recognizer {
    let (first, next) = (first.clone(), next.clone());
    Recognizer::new(move |p| {
        let next = next.clone();
        first.at(p).then(move |q| next.at(q))
    })
}

pub fn alt(a: &Recognizer, b: &Recognizer) -> Recognizer {
    let (a, b) = (a.clone(), b.clone());
    Recognizer::new(move |p| choice(&a.at(p), &b.at(p)))
}

/// Run `r` from the start of an input of length `len`; true iff some match
/// consumes the whole input.
pub fn accepts(session: &Session, r: &Recognizer, len: usize) -> bool {
    session.run(&r.at(0)).contains(&len)
}

/// The suffix of `input` starting at `pos`.
pub fn remainder<T>(input: &[T], pos: Pos) -> &[T] {
    &input[pos..]
}
