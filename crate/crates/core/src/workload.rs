//! Seeded generators for specs, traces and benchmark workloads.
//!
//! Random cases use a four-event alphabet `e0..e3`, up to three parameters
//! `a`, `b`, `c`, and value pools of at most three values per parameter.
//! Each event binds a random subset of its declared parameters. The base
//! monitor rotates through random FSMs, random regexes, a success ratio and
//! a lock balance counter.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::lattice::{ParamInstance, ParamName, ParamValue};
use crate::monitor::{
    compile_pattern, Balance, BalanceRoles, EventDecl, Fsm, MonitorKind, MonitorSpec, Pattern, Ratio, Verdict,
    VerdictTag,
};
use crate::trace::{BaseEvent, ParametricEvent, ParametricTrace};

const PARAM_NAMES: [&str; 3] = ["a", "b", "c"];
const EVENT_COUNT: usize = 4;

/// Size limits for random cases.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CaseLimits {
    pub max_events: usize,
    pub max_params: usize,
    pub max_values: usize,
}

impl Default for CaseLimits {
    fn default() -> Self {
        CaseLimits { max_events: 50, max_params: 3, max_values: 3 }
    }
}

/// A random spec together with the value pools its traces draw from.
#[derive(Clone, Debug)]
pub struct RandomCase {
    pub spec: MonitorSpec,
    pub pools: Vec<(ParamName, Vec<ParamValue>)>,
    pub trace: ParametricTrace,
}

fn name(s: &str) -> ParamName {
    ParamName::new(s).expect("static parameter name")
}

fn value(s: &str) -> ParamValue {
    ParamValue::new(s).expect("generated value")
}

fn event_name(i: usize) -> BaseEvent {
    BaseEvent::new(&format!("e{i}")).expect("generated event name")
}

fn random_verdict<R: Rng>(rng: &mut R) -> Verdict {
    [Verdict::Match, Verdict::Fail, Verdict::Unknown][rng.gen_range(0..3)]
}

/// A random pattern over `alphabet_size` events with nesting depth at most
/// `depth`.
pub fn random_pattern<R: Rng>(rng: &mut R, alphabet_size: usize, depth: usize) -> Pattern {
    if depth == 0 || rng.gen_bool(0.3) {
        return if rng.gen_bool(0.1) { Pattern::Epsilon } else { Pattern::Event(rng.gen_range(0..alphabet_size)) };
    }
    let children = |rng: &mut R| {
        let n = rng.gen_range(2..=3);
        (0..n).map(|_| random_pattern(rng, alphabet_size, depth - 1)).collect::<Vec<_>>()
    };
    match rng.gen_range(0..5) {
        0 => Pattern::Concat(children(rng)),
        1 => Pattern::Alt(children(rng)),
        2 => Pattern::Star(Box::new(random_pattern(rng, alphabet_size, depth - 1))),
        3 => Pattern::Plus(Box::new(random_pattern(rng, alphabet_size, depth - 1))),
        _ => Pattern::Opt(Box::new(random_pattern(rng, alphabet_size, depth - 1))),
    }
}

fn random_fsm<R: Rng>(rng: &mut R) -> Fsm {
    let n = rng.gen_range(2..=4);
    let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let mut transitions = Vec::new();
    for s in 0..n {
        for e in 0..EVENT_COUNT {
            transitions.push((s, e, rng.gen_range(0..n)));
        }
    }
    let labels = (0..n).map(|_| random_verdict(rng)).collect();
    Fsm::new(states, 0, EVENT_COUNT, &transitions, labels).expect("generated FSM is total")
}

/// Builds the monitor kind used for case number `case`.
fn random_kind<R: Rng>(rng: &mut R, case: usize) -> (MonitorKind, BTreeSet<VerdictTag>) {
    let finite_trigger = |rng: &mut R| {
        let tags = [VerdictTag::Match, VerdictTag::Fail, VerdictTag::Unknown];
        let picked: BTreeSet<VerdictTag> = tags.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        if picked.is_empty() {
            BTreeSet::from([VerdictTag::Fail])
        } else {
            picked
        }
    };
    match case % 4 {
        0 => (MonitorKind::Fsm(random_fsm(rng)), finite_trigger(rng)),
        1 => {
            let pattern = random_pattern(rng, EVENT_COUNT, 3);
            let alphabet: Vec<BaseEvent> = (0..EVENT_COUNT).map(event_name).collect();
            let text = pattern.display(&alphabet).to_string();
            let dfa = compile_pattern(&pattern, EVENT_COUNT);
            (MonitorKind::Regex { pattern: text, dfa }, finite_trigger(rng))
        }
        2 => (MonitorKind::Ratio(Ratio { success: rng.gen_range(0..EVENT_COUNT) }), BTreeSet::from([VerdictTag::Ratio])),
        _ => {
            let mut roles: Vec<usize> = (0..EVENT_COUNT).collect();
            roles.shuffle(rng);
            let roles = BalanceRoles { begin: roles[0], end: roles[1], acquire: roles[2], release: roles[3] };
            (MonitorKind::Balance(Balance { roles }), finite_trigger(rng))
        }
    }
}

/// Random spec and trace for case number `case`.
pub fn random_case<R: Rng>(rng: &mut R, case: usize, limits: CaseLimits) -> RandomCase {
    let param_count = rng.gen_range(1..=limits.max_params.clamp(1, PARAM_NAMES.len()));
    let params: Vec<ParamName> = PARAM_NAMES[..param_count].iter().map(|p| name(p)).collect();
    let pools: Vec<(ParamName, Vec<ParamValue>)> = params
        .iter()
        .map(|p| {
            let n = rng.gen_range(1..=limits.max_values.max(1));
            (p.clone(), (1..=n).map(|i| value(&format!("{p}{i}"))).collect())
        })
        .collect();
    let events: Vec<EventDecl> = (0..EVENT_COUNT)
        .map(|i| EventDecl { event: event_name(i), params: params.iter().filter(|_| rng.gen_bool(0.6)).cloned().collect() })
        .collect();
    let (kind, trigger) = random_kind(rng, case);
    let spec = MonitorSpec::new(format!("Random{case}"), params, events, kind, trigger).expect("generated spec is valid");

    let len = rng.gen_range(0..=limits.max_events);
    let trace = (0..len)
        .map(|_| {
            let decl = &spec.events[rng.gen_range(0..spec.events.len())];
            let mut bindings = Vec::new();
            for p in &decl.params {
                if rng.gen_bool(0.75) {
                    let pool = &pools.iter().find(|(q, _)| q == p).expect("pool per parameter").1;
                    bindings.push((p.clone(), pool.choose(rng).expect("nonempty pool").clone()));
                }
            }
            let instance = ParamInstance::from_bindings(bindings).expect("distinct names");
            ParametricEvent::new(decl.event.clone(), instance)
        })
        .collect();
    RandomCase { spec, pools, trace }
}

/// A random instance over the case's parameters, sometimes using a value
/// that never occurs in the trace.
pub fn random_query<R: Rng>(rng: &mut R, pools: &[(ParamName, Vec<ParamValue>)]) -> ParamInstance {
    let mut bindings = Vec::new();
    for (p, pool) in pools {
        if !rng.gen_bool(0.6) {
            continue;
        }
        let v = if rng.gen_bool(0.2) {
            value(&format!("{p}{}", pool.len() + 1))
        } else {
            pool.choose(rng).expect("nonempty pool").clone()
        };
        bindings.push((p.clone(), v));
    }
    ParamInstance::from_bindings(bindings).expect("distinct names")
}

/// Unsafe-iterator property over collections `c` and iterators `i`:
/// matching means an iterator was used after its collection changed.
pub const ITERATOR_SPEC: &str = "\
property UnsafeIter
params: c, i
event createIter(c, i)
event next(i)
event hasnext(i)
event updateColl(c)
monitor: regex
pattern: createIter (next | hasnext)* updateColl+ (hasnext* updateColl*)* next
report: match
";

/// Iterator-style workload: 4 collections with 4 iterators each, creation
/// first, then a long tail of accesses and occasional updates.
pub fn iterator_trace<R: Rng>(rng: &mut R, events: usize) -> ParametricTrace {
    const COLLECTIONS: usize = 4;
    const ITERATORS: usize = 16;
    let mut out = Vec::with_capacity(events);
    for k in 0..ITERATORS.min(events) {
        let c = format!("c{}", k % COLLECTIONS);
        let i = format!("i{k}");
        out.push(ParametricEvent::of("createIter", &[("c", &c), ("i", &i)]).expect("valid event"));
    }
    while out.len() < events {
        let roll = rng.gen_range(0..100);
        let ev = if roll < 3 {
            let c = format!("c{}", rng.gen_range(0..COLLECTIONS));
            ParametricEvent::of("updateColl", &[("c", &c)])
        } else {
            let i = format!("i{}", rng.gen_range(0..ITERATORS));
            ParametricEvent::of(if roll < 60 { "next" } else { "hasnext" }, &[("i", &i)])
        };
        out.push(ev.expect("valid event"));
    }
    out.into()
}

/// Ratio property for the adversarial workload.
pub const ADVERSARIAL_SPEC: &str = "\
property FreshUse
params: a
event use(a)
event ping()
monitor: ratio
success: use
report: ratio
";

/// Adversarial workload: every `use` carries a value never seen before, and
/// every eighth event is a parameterless `ping` that reaches every instance.
pub fn adversarial_trace(events: usize) -> ParametricTrace {
    (0..events)
        .map(|k| {
            if k % 8 == 7 {
                ParametricEvent::of("ping", &[])
            } else {
                ParametricEvent::of("use", &[("a", &format!("a{k}"))])
            }
            .expect("valid event")
        })
        .collect()
}
