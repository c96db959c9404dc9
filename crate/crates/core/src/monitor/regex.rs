//! Regular patterns over event names, compiled to a total three-verdict DFA.
//!
//! Pipeline: pattern text → [`Pattern`] → Thompson NFA → subset construction
//! → co-reachability labelling. A DFA state is `match` when accepting,
//! `fail` when no accepting state is reachable from it, `unknown` otherwise.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::monitor::Verdict;
use crate::trace::BaseEvent;

/// Pattern syntax tree. Events are indices into the monitor alphabet.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pattern {
    Epsilon,
    Event(usize),
    Concat(Vec<Pattern>),
    Alt(Vec<Pattern>),
    Star(Box<Pattern>),
    Plus(Box<Pattern>),
    Opt(Box<Pattern>),
}

impl Pattern {
    /// Renders the pattern back to text using the alphabet's names.
    pub fn display<'a>(&'a self, alphabet: &'a [BaseEvent]) -> impl fmt::Display + 'a {
        PatternDisplay { pattern: self, alphabet }
    }

    /// Events mentioned anywhere in the pattern.
    pub fn events(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_events(&mut out);
        out
    }

    fn collect_events(&self, out: &mut BTreeSet<usize>) {
        match self {
            Pattern::Epsilon => {}
            Pattern::Event(e) => {
                out.insert(*e);
            }
            Pattern::Concat(ps) | Pattern::Alt(ps) => ps.iter().for_each(|p| p.collect_events(out)),
            Pattern::Star(p) | Pattern::Plus(p) | Pattern::Opt(p) => p.collect_events(out),
        }
    }
}

struct PatternDisplay<'a> {
    pattern: &'a Pattern,
    alphabet: &'a [BaseEvent],
}

impl PatternDisplay<'_> {
    // prec: 0 top level, 1 alternative, 2 concatenation item, 3 postfix operand
    fn write(&self, p: &Pattern, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match p {
            Pattern::Epsilon => f.write_str("ε"),
            Pattern::Event(e) => f.write_str(self.alphabet[*e].as_str()),
            Pattern::Alt(ps) => {
                if prec > 0 {
                    f.write_str("(")?;
                }
                for (i, q) in ps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    self.write(q, 1, f)?;
                }
                if prec > 0 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Pattern::Concat(ps) => {
                if prec > 1 {
                    f.write_str("(")?;
                }
                for (i, q) in ps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    self.write(q, 2, f)?;
                }
                if prec > 1 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Pattern::Star(q) | Pattern::Plus(q) | Pattern::Opt(q) => {
                self.write(q, 3, f)?;
                f.write_str(match p {
                    Pattern::Star(_) => "*",
                    Pattern::Plus(_) => "+",
                    _ => "?",
                })
            }
        }
    }
}

impl fmt::Display for PatternDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.pattern, 0, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Name(String),
    Bar,
    Star,
    Plus,
    Question,
    LParen,
    RParen,
    Epsilon,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.chars().enumerate().collect();
    let mut i = 0;
    while i < chars.len() {
        let (col, c) = chars[i];
        let col = col + 1;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '|' => Token::Bar,
            '*' => Token::Star,
            '+' => Token::Plus,
            '?' => Token::Question,
            '(' => Token::LParen,
            ')' => Token::RParen,
            'ε' => Token::Epsilon,
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                    i += 1;
                }
                let name: String = chars[start..i].iter().map(|(_, c)| c).collect();
                out.push((col, Token::Name(name)));
                continue;
            }
            other => {
                return Err(Error::PatternSyntax { column: col, message: format!("unexpected character `{other}`") });
            }
        };
        out.push((col, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a, F> {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end_col: usize,
    resolve: &'a F,
}

impl<F: Fn(&str) -> Option<usize>> Parser<'_, F> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn col(&self) -> usize {
        self.tokens.get(self.pos).map(|(c, _)| *c).unwrap_or(self.end_col)
    }

    fn err<T>(&self, message: &str) -> Result<T> {
        Err(Error::PatternSyntax { column: self.col(), message: message.to_string() })
    }

    fn alternation(&mut self) -> Result<Pattern> {
        let mut alts = vec![self.concatenation()?];
        while self.peek() == Some(&Token::Bar) {
            self.pos += 1;
            alts.push(self.concatenation()?);
        }
        Ok(if alts.len() == 1 { alts.pop().unwrap() } else { Pattern::Alt(alts) })
    }

    fn concatenation(&mut self) -> Result<Pattern> {
        let mut items = Vec::new();
        while matches!(self.peek(), Some(Token::Name(_) | Token::LParen | Token::Epsilon)) {
            items.push(self.postfix()?);
        }
        match items.len() {
            0 => self.err("expected an event, `ε` or `(`"),
            1 => Ok(items.pop().unwrap()),
            _ => Ok(Pattern::Concat(items)),
        }
    }

    fn postfix(&mut self) -> Result<Pattern> {
        let mut p = self.atom()?;
        loop {
            p = match self.peek() {
                Some(Token::Star) => Pattern::Star(Box::new(p)),
                Some(Token::Plus) => Pattern::Plus(Box::new(p)),
                Some(Token::Question) => Pattern::Opt(Box::new(p)),
                _ => return Ok(p),
            };
            self.pos += 1;
        }
    }

    fn atom(&mut self) -> Result<Pattern> {
        match self.peek().cloned() {
            Some(Token::Name(n)) => {
                self.pos += 1;
                (self.resolve)(&n).map(Pattern::Event).ok_or(Error::UnknownEventInPattern(n))
            }
            Some(Token::Epsilon) => {
                self.pos += 1;
                Ok(Pattern::Epsilon)
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.alternation()?;
                if self.peek() != Some(&Token::RParen) {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => self.err("expected an event, `ε` or `(`"),
        }
    }
}

/// Parses pattern text, resolving event names through `resolve`.
pub fn parse_pattern<F>(text: &str, resolve: &F) -> Result<Pattern>
where
    F: Fn(&str) -> Option<usize>,
{
    let tokens = tokenize(text)?;
    let end_col = text.chars().count() + 1;
    let mut parser = Parser { tokens, pos: 0, end_col, resolve };
    let p = parser.alternation()?;
    if parser.pos != parser.tokens.len() {
        return parser.err("unexpected token");
    }
    Ok(p)
}

#[derive(Default)]
struct Nfa {
    eps: Vec<Vec<usize>>,
    on: Vec<Vec<(usize, usize)>>,
}

impl Nfa {
    fn state(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.on.push(Vec::new());
        self.eps.len() - 1
    }

    /// Thompson fragment for `p`; returns (entry, exit).
    fn build(&mut self, p: &Pattern) -> (usize, usize) {
        match p {
            Pattern::Epsilon => {
                let s = self.state();
                (s, s)
            }
            Pattern::Event(e) => {
                let (s, t) = (self.state(), self.state());
                self.on[s].push((*e, t));
                (s, t)
            }
            Pattern::Concat(ps) => {
                let (first_in, mut last_out) = self.build(&ps[0]);
                for q in &ps[1..] {
                    let (i, o) = self.build(q);
                    self.eps[last_out].push(i);
                    last_out = o;
                }
                (first_in, last_out)
            }
            Pattern::Alt(ps) => {
                let (s, t) = (self.state(), self.state());
                for q in ps {
                    let (i, o) = self.build(q);
                    self.eps[s].push(i);
                    self.eps[o].push(t);
                }
                (s, t)
            }
            Pattern::Star(q) | Pattern::Plus(q) | Pattern::Opt(q) => {
                let (s, t) = (self.state(), self.state());
                let (i, o) = self.build(q);
                self.eps[s].push(i);
                self.eps[o].push(t);
                if !matches!(p, Pattern::Plus(_)) {
                    self.eps[s].push(t);
                }
                if !matches!(p, Pattern::Opt(_)) {
                    self.eps[o].push(i);
                }
                (s, t)
            }
        }
    }

    fn closure(&self, seeds: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
        let mut set = BTreeSet::new();
        let mut stack: Vec<usize> = seeds.into_iter().collect();
        while let Some(s) = stack.pop() {
            if set.insert(s) {
                stack.extend(self.eps[s].iter().copied());
            }
        }
        set
    }
}

/// A total DFA over alphabet indices `0..alphabet_size` with a verdict per
/// state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    alphabet_size: usize,
    start: usize,
    next: Vec<usize>,
    labels: Vec<Verdict>,
}

impl Dfa {
    pub fn start(&self) -> usize {
        self.start
    }

    pub fn state_count(&self) -> usize {
        self.labels.len()
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn step(&self, state: usize, event: usize) -> usize {
        self.next[state * self.alphabet_size + event]
    }

    pub fn label(&self, state: usize) -> Verdict {
        self.labels[state]
    }

    /// Verdict after reading `word` from the start state.
    pub fn classify(&self, word: &[usize]) -> Verdict {
        self.label(word.iter().fold(self.start, |s, &e| self.step(s, e)))
    }
}

/// Builds the labelled DFA for `pattern` over `alphabet_size` events.
pub fn compile_pattern(pattern: &Pattern, alphabet_size: usize) -> Dfa {
    let mut nfa = Nfa::default();
    let (entry, exit) = nfa.build(pattern);

    let mut ids: HashMap<BTreeSet<usize>, usize> = HashMap::new();
    let mut sets: Vec<BTreeSet<usize>> = Vec::new();
    let mut next: Vec<usize> = Vec::new();
    let start_set = nfa.closure([entry]);
    ids.insert(start_set.clone(), 0);
    sets.push(start_set);
    let mut queue = VecDeque::from([0usize]);
    while let Some(d) = queue.pop_front() {
        let mut row = vec![0usize; alphabet_size];
        for (ev, slot) in row.iter_mut().enumerate() {
            let targets = sets[d]
                .iter()
                .flat_map(|&s| nfa.on[s].iter().filter(|(e, _)| *e == ev).map(|&(_, t)| t))
                .collect::<Vec<_>>();
            let set = nfa.closure(targets);
            *slot = match ids.get(&set) {
                Some(&id) => id,
                None => {
                    let id = sets.len();
                    ids.insert(set.clone(), id);
                    sets.push(set);
                    queue.push_back(id);
                    id
                }
            };
        }
        debug_assert_eq!(next.len(), d * alphabet_size);
        next.extend(row);
    }

    let n = sets.len();
    let accepting: Vec<bool> = sets.iter().map(|s| s.contains(&exit)).collect();
    let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); n];
    for s in 0..n {
        for e in 0..alphabet_size {
            reverse[next[s * alphabet_size + e]].push(s);
        }
    }
    let mut live = accepting.clone();
    let mut stack: Vec<usize> = (0..n).filter(|&s| accepting[s]).collect();
    while let Some(s) = stack.pop() {
        for &p in &reverse[s] {
            if !live[p] {
                live[p] = true;
                stack.push(p);
            }
        }
    }
    let labels = (0..n)
        .map(|s| {
            if accepting[s] {
                Verdict::Match
            } else if live[s] {
                Verdict::Unknown
            } else {
                Verdict::Fail
            }
        })
        .collect();
    Dfa { alphabet_size, start: 0, next, labels }
}

/// Parses and compiles `text` over `alphabet`.
pub fn compile_regex(text: &str, alphabet: &[BaseEvent]) -> Result<Dfa> {
    let resolve = |name: &str| alphabet.iter().position(|e| e.as_str() == name);
    let pattern = parse_pattern(text, &resolve)?;
    Ok(compile_pattern(&pattern, alphabet.len()))
}
