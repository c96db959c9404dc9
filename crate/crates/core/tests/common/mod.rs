//! Brute-force oracles shared by the integration suites. None of them call
//! the library's lattice, slicing or automaton code.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use tracemon::lattice::ParamInstance;
use tracemon::monitor::Pattern;
use tracemon::trace::ParametricTrace;

/// An instance as a plain map.
pub type Map = BTreeMap<String, String>;

pub fn to_map(theta: &ParamInstance) -> Map {
    theta.bindings().iter().map(|(n, v)| (n.to_string(), v.to_string())).collect()
}

pub fn from_map(m: &Map) -> ParamInstance {
    let pairs: Vec<(&str, &str)> = m.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
    ParamInstance::from_pairs(&pairs).unwrap()
}

pub fn below(a: &Map, b: &Map) -> bool {
    a.iter().all(|(k, v)| b.get(k) == Some(v))
}

pub fn join(a: &Map, b: &Map) -> Option<Map> {
    let mut out = a.clone();
    for (k, v) in b {
        match out.get(k) {
            Some(w) if w != v => return None,
            _ => {
                out.insert(k.clone(), v.clone());
            }
        }
    }
    Some(out)
}

/// Smallest set containing ⊥ and `seeds` that is closed under pairwise
/// joins, by naive fixpoint iteration.
pub fn closure(seeds: &BTreeSet<Map>) -> BTreeSet<Map> {
    let mut set = seeds.clone();
    set.insert(Map::new());
    loop {
        let items: Vec<Map> = set.iter().cloned().collect();
        let mut grew = false;
        for a in &items {
            for b in &items {
                if let Some(j) = join(a, b) {
                    grew |= set.insert(j);
                }
            }
        }
        if !grew {
            return set;
        }
    }
}

/// Instances occurring in the trace, closed under joins.
pub fn trace_domain(tau: &ParametricTrace) -> BTreeSet<Map> {
    closure(&tau.iter().map(|ev| to_map(&ev.instance)).collect())
}

/// The base-event names of events whose instance is below `theta`.
pub fn slice(tau: &ParametricTrace, theta: &Map) -> Vec<String> {
    tau.iter().filter(|ev| below(&to_map(&ev.instance), theta)).map(|ev| ev.base.to_string()).collect()
}

/// The member of `set` below `theta` that dominates every other such
/// member, if there is exactly one.
pub fn greatest_below(theta: &Map, set: &BTreeSet<Map>) -> Option<Map> {
    let lower: Vec<&Map> = set.iter().filter(|t| below(t, theta)).collect();
    lower.iter().find(|c| lower.iter().all(|t| below(t, c))).map(|c| (*c).clone())
}

/// Verdict classes of the three-way regex classifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Class {
    Match,
    Fail,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Re {
    Empty,
    Eps,
    Sym(usize),
    Cat(Rc<Re>, Rc<Re>),
    Alt(BTreeSet<Rc<Re>>),
    Star(Rc<Re>),
}

fn cat(a: Rc<Re>, b: Rc<Re>) -> Rc<Re> {
    match (&*a, &*b) {
        (Re::Empty, _) | (_, Re::Empty) => Rc::new(Re::Empty),
        (Re::Eps, _) => b,
        (_, Re::Eps) => a,
        // Right-associate so equal languages get equal terms more often.
        (Re::Cat(x, y), _) => cat(x.clone(), cat(y.clone(), b)),
        _ => Rc::new(Re::Cat(a, b)),
    }
}

fn alt(a: Rc<Re>, b: Rc<Re>) -> Rc<Re> {
    let mut set = BTreeSet::new();
    for t in [a, b] {
        match &*t {
            Re::Empty => {}
            Re::Alt(items) => set.extend(items.iter().cloned()),
            _ => {
                set.insert(t);
            }
        }
    }
    match set.len() {
        0 => Rc::new(Re::Empty),
        1 => set.into_iter().next().unwrap(),
        _ => Rc::new(Re::Alt(set)),
    }
}

fn star(a: Rc<Re>) -> Rc<Re> {
    match &*a {
        Re::Empty | Re::Eps => Rc::new(Re::Eps),
        Re::Star(_) => a,
        _ => Rc::new(Re::Star(a)),
    }
}

fn nullable(r: &Re) -> bool {
    match r {
        Re::Empty | Re::Sym(_) => false,
        Re::Eps | Re::Star(_) => true,
        Re::Cat(a, b) => nullable(a) && nullable(b),
        Re::Alt(items) => items.iter().any(|t| nullable(t)),
    }
}

fn derive(r: &Rc<Re>, e: usize) -> Rc<Re> {
    match &**r {
        Re::Empty | Re::Eps => Rc::new(Re::Empty),
        Re::Sym(s) => Rc::new(if *s == e { Re::Eps } else { Re::Empty }),
        Re::Cat(a, b) => {
            let left = cat(derive(a, e), b.clone());
            if nullable(a) {
                alt(left, derive(b, e))
            } else {
                left
            }
        }
        Re::Alt(items) => items.iter().fold(Rc::new(Re::Empty), |acc, t| alt(acc, derive(t, e))),
        Re::Star(a) => cat(derive(a, e), r.clone()),
    }
}

fn lower(p: &Pattern) -> Rc<Re> {
    match p {
        Pattern::Epsilon => Rc::new(Re::Eps),
        Pattern::Event(e) => Rc::new(Re::Sym(*e)),
        Pattern::Concat(items) => items.iter().fold(Rc::new(Re::Eps), |acc, t| cat(acc, lower(t))),
        Pattern::Alt(items) => items.iter().fold(Rc::new(Re::Empty), |acc, t| alt(acc, lower(t))),
        Pattern::Star(t) => star(lower(t)),
        Pattern::Plus(t) => {
            let inner = lower(t);
            cat(inner.clone(), star(inner))
        }
        Pattern::Opt(t) => alt(Rc::new(Re::Eps), lower(t)),
    }
}

/// Three-way classifier by Brzozowski derivatives with memoized term
/// interning. A word is `Fail` when no extension of length at most
/// `horizon` is in the language.
pub struct DerivativeOracle {
    alphabet: usize,
    horizon: usize,
    terms: Vec<Rc<Re>>,
    ids: HashMap<Rc<Re>, usize>,
    steps: HashMap<(usize, usize), usize>,
    live: HashMap<usize, bool>,
}

impl DerivativeOracle {
    pub fn new(pattern: &Pattern, alphabet: usize, horizon: usize) -> Self {
        let mut o = DerivativeOracle {
            alphabet,
            horizon,
            terms: Vec::new(),
            ids: HashMap::new(),
            steps: HashMap::new(),
            live: HashMap::new(),
        };
        o.intern(lower(pattern));
        o
    }

    fn intern(&mut self, t: Rc<Re>) -> usize {
        if let Some(&id) = self.ids.get(&t) {
            return id;
        }
        let id = self.terms.len();
        self.terms.push(t.clone());
        self.ids.insert(t, id);
        id
    }

    pub fn start(&self) -> usize {
        0
    }

    pub fn step(&mut self, term: usize, e: usize) -> usize {
        if let Some(&next) = self.steps.get(&(term, e)) {
            return next;
        }
        let d = derive(&self.terms[term], e);
        let next = self.intern(d);
        self.steps.insert((term, e), next);
        next
    }

    /// Whether some word of length `<= horizon` leads from `term` to a
    /// nullable term, by breadth-first search.
    fn can_match(&mut self, term: usize) -> bool {
        if let Some(&v) = self.live.get(&term) {
            return v;
        }
        let mut frontier = vec![term];
        let mut seen = BTreeSet::from([term]);
        let mut found = false;
        for depth in 0..=self.horizon {
            if frontier.iter().any(|&t| nullable(&self.terms[t])) {
                found = true;
                break;
            }
            if depth == self.horizon {
                break;
            }
            let mut next = Vec::new();
            for &t in &frontier {
                for e in 0..self.alphabet {
                    let n = self.step(t, e);
                    if seen.insert(n) {
                        next.push(n);
                    }
                }
            }
            frontier = next;
        }
        self.live.insert(term, found);
        found
    }

    pub fn classify_term(&mut self, term: usize) -> Class {
        if nullable(&self.terms[term]) {
            Class::Match
        } else if self.can_match(term) {
            Class::Unknown
        } else {
            Class::Fail
        }
    }

    pub fn classify(&mut self, word: &[usize]) -> Class {
        let mut t = self.start();
        for &e in word {
            t = self.step(t, e);
        }
        self.classify_term(t)
    }
}

/// Lock balance by explicit bracket matching: `begin`/`end` and
/// `acquire`/`release` are two bracket kinds, and a word is violated once it
/// cannot be extended to a well-nested one.
pub fn balance_oracle(word: &[&str]) -> (bool, bool) {
    let mut stack: Vec<&str> = Vec::new();
    for &w in word {
        match w {
            "begin" | "acquire" => stack.push(w),
            "end" => {
                // Only the procedure's own acquires may be open, and none.
                if stack.last() != Some(&"begin") {
                    return (true, false);
                }
                stack.pop();
            }
            "release" => {
                if stack.last() != Some(&"acquire") {
                    return (true, false);
                }
                stack.pop();
            }
            _ => {}
        }
    }
    (false, stack.is_empty())
}
