//! Text format for user grammars, compiled to memoised recognizers.
//!
//! ```text
//! # comment
//! s  = np vp ;
//! np = "Kim" | np "'s" "professor" ;
//! vp = "knows" np | eps ;
//! ```
//!
//! Sequencing is juxtaposition and binds tighter than `|`. Terminals are
//! double-quoted with backslash escapes, `eps` matches the empty sequence,
//! parentheses group. The first rule is the start symbol. Every nonterminal
//! gets its own memo table, so any mix of mutual and left recursion is fine.

use std::cell::OnceCell;
use std::collections::{HashMap, HashSet};
use std::fmt::{self, Write as _};
use std::rc::Rc;

use crate::combinators::{epsilon, Pos, Recognizer, Tokens};
use crate::grammars::Grammar;
use crate::memo::Rec;
use crate::nondet::{choice, fail, Comp, Session};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Terminal(String),
    NonTerm(String),
    Seq(Vec<Expr>),
    Alt(Vec<Expr>),
    Eps,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub expr: Expr,
}

/// A validated grammar: rule names are unique, every referenced nonterminal
/// is defined, and no sequence or alternation is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSet {
    rules: Vec<Rule>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GrammarError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("rule `{rule}` refers to undefined nonterminal `{name}`")]
    Undefined { rule: String, name: String },
    #[error("rule `{0}` is defined more than once")]
    Duplicate(String),
    #[error("rule `{0}` contains an empty sequence or alternation")]
    EmptyList(String),
    #[error("grammar has no rules")]
    NoRules,
}

impl RuleSet {
    pub fn new(rules: Vec<Rule>) -> Result<Self, GrammarError> {
        if rules.is_empty() {
            return Err(GrammarError::NoRules);
        }
        let mut names = HashSet::new();
        for rule in &rules {
            if !names.insert(rule.name.as_str()) {
                return Err(GrammarError::Duplicate(rule.name.clone()));
            }
        }
        for rule in &rules {
            check(&rule.expr, &rule.name, &names)?;
        }
        Ok(RuleSet { rules })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn start(&self) -> &str {
        &self.rules[0].name
    }
}

fn check(expr: &Expr, rule: &str, names: &HashSet<&str>) -> Result<(), GrammarError> {
    match expr {
        Expr::NonTerm(name) if !names.contains(name.as_str()) => Err(GrammarError::Undefined {
            rule: rule.to_string(),
            name: name.clone(),
        }),
        Expr::Seq(items) | Expr::Alt(items) => {
            if items.is_empty() {
                return Err(GrammarError::EmptyList(rule.to_string()));
            }
            items.iter().try_for_each(|e| check(e, rule, names))
        }
        _ => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    Eps,
    Eq,
    Bar,
    Semi,
    LParen,
    RParen,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Str(s) => write!(f, "terminal {s:?}"),
            Tok::Eps => f.write_str("`eps`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Bar => f.write_str("`|`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error<T>(&self, line: usize, column: usize, message: impl Into<String>) -> Result<T, GrammarError> {
        Err(GrammarError::Syntax {
            line,
            column,
            message: message.into(),
        })
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize, usize)>, GrammarError> {
        let mut out = Vec::new();
        while let Some(&c) = self.chars.peek() {
            let (line, column) = (self.line, self.column);
            match c {
                c if c.is_whitespace() => {
                    self.bump();
                }
                '#' => {
                    while self.chars.peek().is_some_and(|&c| c != '\n') {
                        self.bump();
                    }
                }
                '=' | '|' | ';' | '(' | ')' => {
                    self.bump();
                    let tok = match c {
                        '=' => Tok::Eq,
                        '|' => Tok::Bar,
                        ';' => Tok::Semi,
                        '(' => Tok::LParen,
                        _ => Tok::RParen,
                    };
                    out.push((tok, line, column));
                }
                '"' => {
                    self.bump();
                    let mut s = String::new();
                    loop {
                        match self.bump() {
                            None => return self.error(line, column, "unterminated terminal"),
                            Some('"') => break,
                            Some('\\') => match self.bump() {
                                Some('n') => s.push('\n'),
                                Some('t') => s.push('\t'),
                                Some(c @ ('"' | '\\')) => s.push(c),
                                Some(c) => {
                                    return self.error(
                                        self.line,
                                        self.column - 1,
                                        format!("unknown escape `\\{c}`"),
                                    )
                                }
                                None => return self.error(line, column, "unterminated terminal"),
                            },
                            Some(c) => s.push(c),
                        }
                    }
                    out.push((Tok::Str(s), line, column));
                }
                c if c.is_alphabetic() || c == '_' => {
                    let mut s = String::new();
                    while let Some(&c) = self.chars.peek() {
                        if c.is_alphanumeric() || c == '_' {
                            s.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    let tok = if s == "eps" { Tok::Eps } else { Tok::Ident(s) };
                    out.push((tok, line, column));
                }
                other => return self.error(line, column, format!("unexpected character `{other}`")),
            }
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    i: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(t, _, _)| t)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.i)
            .map(|&(_, l, c)| (l, c))
            .unwrap_or(self.end)
    }

    fn unexpected<T>(&self, expected: &str) -> Result<T, GrammarError> {
        let (line, column) = self.here();
        let found = match self.peek() {
            Some(t) => t.to_string(),
            None => "end of input".to_string(),
        };
        Err(GrammarError::Syntax {
            line,
            column,
            message: format!("expected {expected}, found {found}"),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), GrammarError> {
        if self.peek() == Some(&tok) {
            self.i += 1;
            Ok(())
        } else {
            self.unexpected(what)
        }
    }

    fn rules(&mut self) -> Result<Vec<Rule>, GrammarError> {
        let mut rules = Vec::new();
        while self.peek().is_some() {
            let name = match self.peek() {
                Some(Tok::Ident(name)) => name.clone(),
                _ => return self.unexpected("rule name"),
            };
            self.i += 1;
            self.expect(Tok::Eq, "`=`")?;
            let expr = self.alt()?;
            self.expect(Tok::Semi, "`;` or `|`")?;
            rules.push(Rule { name, expr });
        }
        Ok(rules)
    }

    fn alt(&mut self) -> Result<Expr, GrammarError> {
        let mut items = vec![self.seq()?];
        while self.peek() == Some(&Tok::Bar) {
            self.i += 1;
            items.push(self.seq()?);
        }
        Ok(collapse(items, Expr::Alt))
    }

    fn seq(&mut self) -> Result<Expr, GrammarError> {
        let mut items = Vec::new();
        loop {
            let atom = match self.peek() {
                Some(Tok::Str(s)) => Expr::Terminal(s.clone()),
                Some(Tok::Ident(n)) => Expr::NonTerm(n.clone()),
                Some(Tok::Eps) => Expr::Eps,
                Some(Tok::LParen) => {
                    self.i += 1;
                    let inner = self.alt()?;
                    self.expect(Tok::RParen, "`)`")?;
                    items.push(inner);
                    continue;
                }
                _ if items.is_empty() => return self.unexpected("terminal, nonterminal, `eps` or `(`"),
                _ => break,
            };
            self.i += 1;
            items.push(atom);
        }
        Ok(collapse(items, Expr::Seq))
    }
}

fn collapse(mut items: Vec<Expr>, wrap: fn(Vec<Expr>) -> Expr) -> Expr {
    if items.len() == 1 {
        items.pop().unwrap()
    } else {
        wrap(items)
    }
}

pub fn parse_grammar(text: &str) -> Result<RuleSet, GrammarError> {
    let toks = Lexer::new(text).tokens()?;
    let end = text.lines().count().max(1);
    let end_col = text.lines().last().map_or(1, |l| l.chars().count() + 1);
    let mut parser = Parser {
        toks,
        i: 0,
        end: (end, end_col),
    };
    let rules = parser.rules()?;
    RuleSet::new(rules)
}

/// Print `rules` in the text format; `parse_grammar` reads it back.
pub fn render(rules: &RuleSet) -> String {
    let mut out = String::new();
    for rule in &rules.rules {
        let _ = writeln!(out, "{} = {} ;", rule.name, render_expr(&rule.expr, Ctx::Top));
    }
    out
}

#[derive(Clone, Copy, PartialEq)]
enum Ctx {
    Top,
    InAlt,
    InSeq,
}

fn render_expr(expr: &Expr, ctx: Ctx) -> String {
    match expr {
        Expr::Terminal(t) => {
            let mut s = String::from('"');
            for c in t.chars() {
                match c {
                    '"' => s.push_str("\\\""),
                    '\\' => s.push_str("\\\\"),
                    '\n' => s.push_str("\\n"),
                    '\t' => s.push_str("\\t"),
                    c => s.push(c),
                }
            }
            s.push('"');
            s
        }
        Expr::NonTerm(n) => n.clone(),
        Expr::Eps => "eps".to_string(),
        Expr::Seq(items) if items.len() == 1 => render_expr(&items[0], ctx),
        Expr::Alt(items) if items.len() == 1 => render_expr(&items[0], ctx),
        Expr::Seq(items) => {
            let body: Vec<String> = items.iter().map(|e| render_expr(e, Ctx::InSeq)).collect();
            let body = body.join(" ");
            if ctx == Ctx::InSeq {
                format!("({body})")
            } else {
                body
            }
        }
        Expr::Alt(items) => {
            let body: Vec<String> = items.iter().map(|e| render_expr(e, Ctx::InAlt)).collect();
            let body = body.join(" | ");
            if ctx == Ctx::Top {
                body
            } else {
                format!("({body})")
            }
        }
    }
}

/// Rule body with nonterminal names resolved to group indices.
enum Node {
    Term(String),
    Call(usize),
    Seq(Vec<Node>),
    Alt(Vec<Node>),
    Eps,
}

fn resolve(expr: &Expr, index: &HashMap<&str, usize>) -> Node {
    match expr {
        Expr::Terminal(t) => Node::Term(t.clone()),
        Expr::NonTerm(n) => Node::Call(index[n.as_str()]),
        Expr::Seq(items) => Node::Seq(items.iter().map(|e| resolve(e, index)).collect()),
        Expr::Alt(items) => Node::Alt(items.iter().map(|e| resolve(e, index)).collect()),
        Expr::Eps => Node::Eps,
    }
}

fn recognizer(node: &Node, group: &Rc<[Rec<Pos, Pos>]>, input: &Tokens) -> Recognizer {
    match node {
        Node::Term(t) => crate::combinators::term(input, t.clone()),
        Node::Call(i) => Recognizer::from(group[*i].clone()),
        Node::Eps => epsilon(),
        Node::Seq(items) => {
            let mut parts = items.iter().map(|n| recognizer(n, group, input));
            let first = parts.next().expect("validated non-empty");
            parts.fold(first, |acc, r| acc.seq(&r))
        }
        Node::Alt(items) => {
            let parts: Vec<Recognizer> = items.iter().map(|n| recognizer(n, group, input)).collect();
            Recognizer::new(move |p| {
                parts
                    .iter()
                    .map(|r| r.at(p))
                    .reduce(|a, b| choice(&a, &b))
                    .unwrap_or_else(fail)
            })
        }
    }
}

type Body = Box<dyn Fn(&Rc<[Rec<Pos, Pos>]>, Pos) -> Comp<Pos>>;

/// Build memoised recognizers for every rule of `rules` over `input`.
pub fn compile(session: &Session, rules: &RuleSet, input: &Tokens) -> Grammar {
    let index: HashMap<&str, usize> = rules
        .rules
        .iter()
        .enumerate()
        .map(|(i, r)| (r.name.as_str(), i))
        .collect();
    let bodies: Vec<Body> = rules
        .rules
        .iter()
        .map(|rule| {
            let node = resolve(&rule.expr, &index);
            let input = Rc::clone(input);
            let built: OnceCell<Recognizer> = OnceCell::new();
            Box::new(move |group: &Rc<[Rec<Pos, Pos>]>, p: Pos| {
                built.get_or_init(|| recognizer(&node, group, &input)).at(p)
            }) as Body
        })
        .collect();
    let memos = session.memo_rec_group(bodies);
    Grammar {
        start: memos[0].clone().into(),
        rules: rules
            .rules
            .iter()
            .map(|r| r.name.clone())
            .zip(memos)
            .collect(),
        input: Rc::clone(input),
    }
}

/// DSL source for the built-in grammars.
pub mod sources {
    pub const SM: &str = "sm = \"a\" sm sm | eps ;\n";
    pub const SML: &str = "sml = sml sml \"a\" | eps ;\n";
    pub const SMML: &str = "smml = smml aux | eps ;\naux = smml \"a\" ;\n";
    pub const JOHNSON: &str = r#"# Johnson's left-recursive noun-phrase grammar
s   = np vp ;
np  = pn | det n | np "'s" n ;
vp  = v np | v s ;
v   = "likes" | "knows" ;
pn  = "Kim" | "Sandy" ;
det = "every" | "no" ;
n   = "student" | "professor" ;
"#;
}
