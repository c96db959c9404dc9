//! Parser for the line-oriented property-spec format.
//!
//! ```text
//! property UnsafeIter
//! params: c, i
//! event createIter(c, i)
//! event next(i)
//! event updateColl(c)
//! monitor: regex
//! pattern: createIter next* updateColl+ next
//! report: match
//! ```
//!
//! FSM specs use `state <s> [initial]`, `trans <s> <event> <s'>` and
//! `label <s> match|fail|unknown`. Ratio specs may name the success event
//! with `success: <event>`; balance specs may map roles with `begin:`,
//! `end:`, `acquire:` and `release:`. Each defaults to the event of the
//! same name. `report:` defaults to `fail`.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::lattice::{is_identifier, ParamName};
use crate::monitor::{
    compile_regex, Balance, BalanceRoles, EventDecl, Fsm, MonitorKind, MonitorSpec, Ratio, Verdict, VerdictTag,
};
use crate::trace::BaseEvent;

#[derive(Default)]
struct Draft {
    name: Option<String>,
    params: Option<(usize, Vec<ParamName>)>,
    events: Vec<(usize, EventDecl)>,
    kind: Option<(usize, String)>,
    pattern: Option<(usize, String)>,
    states: Vec<(usize, String, bool)>,
    transitions: Vec<(usize, String, String, String)>,
    labels: Vec<(usize, String, String)>,
    report: Option<BTreeSet<VerdictTag>>,
    roles: HashMap<&'static str, (usize, String)>,
}

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::SpecSyntax { line, message: message.into() }
}

fn split_list(text: &str) -> Vec<&str> {
    text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

fn parse_event_decl(rest: &str, line: usize) -> Result<EventDecl> {
    let rest = rest.trim();
    let open = rest.find('(').ok_or_else(|| syntax(line, "expected `event <name>(<params>)`"))?;
    if !rest.ends_with(')') {
        return Err(syntax(line, "expected `)` at end of event declaration"));
    }
    let name = rest[..open].trim();
    let event = BaseEvent::new(name).map_err(|_| syntax(line, format!("invalid event name `{name}`")))?;
    let inner = &rest[open + 1..rest.len() - 1];
    let mut params = Vec::new();
    for p in split_list(inner) {
        let p = ParamName::new(p).map_err(|_| syntax(line, format!("invalid parameter name `{p}`")))?;
        if params.contains(&p) {
            return Err(syntax(line, format!("parameter `{p}` listed twice")));
        }
        params.push(p);
    }
    Ok(EventDecl { event, params })
}

/// Parses and validates a property spec.
pub fn parse_property_spec(text: &[u8]) -> Result<MonitorSpec> {
    let text = std::str::from_utf8(text).map_err(|_| syntax(0, "spec is not valid UTF-8"))?;
    let mut d = Draft::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = match raw.find('#') {
            Some(k) => &raw[..k],
            None => raw,
        }
        .trim();
        if content.is_empty() {
            continue;
        }
        if let Some((key, value)) = content.split_once(':') {
            let key = key.trim();
            let value = value.trim();
            match key {
                "params" => {
                    if d.params.is_some() {
                        return Err(syntax(line, "duplicate `params:` line"));
                    }
                    let mut ps = Vec::new();
                    for p in split_list(value) {
                        let p = ParamName::new(p).map_err(|_| syntax(line, format!("invalid parameter name `{p}`")))?;
                        if ps.contains(&p) {
                            return Err(syntax(line, format!("parameter `{p}` declared twice")));
                        }
                        ps.push(p);
                    }
                    d.params = Some((line, ps));
                }
                "monitor" => d.kind = Some((line, value.to_string())),
                "pattern" => d.pattern = Some((line, value.to_string())),
                "report" => {
                    let mut tags = BTreeSet::new();
                    for t in split_list(value) {
                        tags.insert(t.parse::<VerdictTag>().map_err(|m| syntax(line, m))?);
                    }
                    d.report = Some(tags);
                }
                "success" | "begin" | "end" | "acquire" | "release" => {
                    let role = match key {
                        "success" => "success",
                        "begin" => "begin",
                        "end" => "end",
                        "acquire" => "acquire",
                        _ => "release",
                    };
                    d.roles.insert(role, (line, value.to_string()));
                }
                other => return Err(syntax(line, format!("unknown directive `{other}:`"))),
            }
            continue;
        }
        let (head, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
        let rest = rest.trim();
        match head {
            "property" => {
                if d.name.is_some() {
                    return Err(syntax(line, "duplicate `property` line"));
                }
                if !is_identifier(rest) {
                    return Err(syntax(line, format!("invalid property name `{rest}`")));
                }
                d.name = Some(rest.to_string());
            }
            "event" => d.events.push((line, parse_event_decl(rest, line)?)),
            "state" => {
                let words: Vec<&str> = rest.split_whitespace().collect();
                match words.as_slice() {
                    [s] => d.states.push((line, s.to_string(), false)),
                    [s, "initial"] => d.states.push((line, s.to_string(), true)),
                    _ => return Err(syntax(line, "expected `state <name> [initial]`")),
                }
            }
            "trans" => {
                let words: Vec<&str> = rest.split_whitespace().collect();
                let [s, e, t] = words.as_slice() else {
                    return Err(syntax(line, "expected `trans <state> <event> <state>`"));
                };
                d.transitions.push((line, s.to_string(), e.to_string(), t.to_string()));
            }
            "label" => {
                let words: Vec<&str> = rest.split_whitespace().collect();
                let [s, v] = words.as_slice() else {
                    return Err(syntax(line, "expected `label <state> match|fail|unknown`"));
                };
                d.labels.push((line, s.to_string(), v.to_string()));
            }
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }
    build(d)
}

fn build(mut d: Draft) -> Result<MonitorSpec> {
    let name = d.name.take().ok_or_else(|| syntax(0, "missing `property <Name>` line"))?;
    let params = d.params.take().map(|(_, p)| p).ok_or_else(|| syntax(0, "missing `params:` line"))?;
    let (kind_line, kind_name) = d.kind.take().ok_or_else(|| syntax(0, "missing `monitor:` line"))?;

    let mut seen = BTreeSet::new();
    for (_, decl) in &d.events {
        if !seen.insert(decl.event.clone()) {
            return Err(Error::DuplicateEventDecl(decl.event.to_string()));
        }
        for p in &decl.params {
            if !params.contains(p) {
                return Err(Error::UndeclaredParameter { event: decl.event.to_string(), param: p.to_string() });
            }
        }
    }
    let events: Vec<EventDecl> = std::mem::take(&mut d.events).into_iter().map(|(_, e)| e).collect();
    let alphabet: Vec<BaseEvent> = events.iter().map(|e| e.event.clone()).collect();
    let event_id = |line: usize, name: &str| {
        alphabet
            .iter()
            .position(|e| e.as_str() == name)
            .ok_or_else(|| syntax(line, format!("undeclared event `{name}`")))
    };
    let role = |role: &'static str| -> Result<usize> {
        match d.roles.get(role) {
            Some((line, name)) => event_id(*line, name),
            None => event_id(kind_line, role),
        }
    };

    let kind = match kind_name.as_str() {
        "regex" => {
            let (_, pattern) = d.pattern.clone().ok_or_else(|| syntax(kind_line, "regex monitor needs `pattern:`"))?;
            let dfa = compile_regex(&pattern, &alphabet)?;
            MonitorKind::Regex { pattern, dfa }
        }
        "fsm" => build_fsm(&d, &alphabet, kind_line)?,
        "balance" => MonitorKind::Balance(Balance {
            roles: BalanceRoles {
                begin: role("begin")?,
                end: role("end")?,
                acquire: role("acquire")?,
                release: role("release")?,
            },
        }),
        "ratio" => MonitorKind::Ratio(Ratio { success: role("success")? }),
        other => return Err(syntax(kind_line, format!("unknown monitor kind `{other}`"))),
    };
    if kind_name != "regex" {
        if let Some((line, _)) = d.pattern {
            return Err(syntax(line, "`pattern:` is only valid for regex monitors"));
        }
    }
    if kind_name != "fsm" {
        if let Some((line, ..)) = d.states.first() {
            return Err(syntax(*line, "`state` is only valid for fsm monitors"));
        }
    }
    let trigger = d.report.unwrap_or_else(|| BTreeSet::from([VerdictTag::Fail]));
    MonitorSpec::new(name, params, events, kind, trigger)
}

fn build_fsm(d: &Draft, alphabet: &[BaseEvent], kind_line: usize) -> Result<MonitorKind> {
    if d.states.is_empty() {
        return Err(syntax(kind_line, "fsm monitor declares no states"));
    }
    let mut names: Vec<String> = Vec::new();
    let mut initial = None;
    for (line, s, is_initial) in &d.states {
        if names.contains(s) {
            return Err(syntax(*line, format!("state `{s}` declared twice")));
        }
        if *is_initial {
            if initial.is_some() {
                return Err(syntax(*line, "more than one initial state"));
            }
            initial = Some(names.len());
        }
        names.push(s.clone());
    }
    let initial = initial.ok_or_else(|| syntax(d.states[0].0, "no initial state"))?;
    let state_id = |line: usize, s: &str| {
        names.iter().position(|n| n == s).ok_or_else(|| syntax(line, format!("undeclared state `{s}`")))
    };
    let mut transitions = Vec::new();
    for (line, s, e, t) in &d.transitions {
        let ev = alphabet
            .iter()
            .position(|x| x.as_str() == e)
            .ok_or_else(|| syntax(*line, format!("undeclared event `{e}`")))?;
        transitions.push((state_id(*line, s)?, ev, state_id(*line, t)?));
    }
    let mut labels = vec![Verdict::Unknown; names.len()];
    for (line, s, v) in &d.labels {
        labels[state_id(*line, s)?] = match v.as_str() {
            "match" => Verdict::Match,
            "fail" => Verdict::Fail,
            "unknown" => Verdict::Unknown,
            other => return Err(syntax(*line, format!("invalid label `{other}`"))),
        };
    }
    let fsm = Fsm::new(names, initial, alphabet.len(), &transitions, labels).map_err(|e| match e {
        Error::SpecSyntax { message, .. } => syntax(kind_line, message),
        other => other,
    })?;
    Ok(MonitorKind::Fsm(fsm))
}

/// Renders a spec in the format accepted by [`parse_property_spec`].
pub fn render_property_spec(spec: &MonitorSpec) -> String {
    use std::fmt::Write;

    let mut out = String::new();
    let name = |i: usize| spec.events[i].event.as_str();
    let join = |items: &mut dyn Iterator<Item = String>| items.collect::<Vec<_>>().join(", ");
    let _ = writeln!(out, "property {}", spec.name);
    let _ = writeln!(out, "params: {}", join(&mut spec.params.iter().map(|p| p.to_string())));
    for decl in &spec.events {
        let _ = writeln!(out, "event {}({})", decl.event, join(&mut decl.params.iter().map(|p| p.to_string())));
    }
    let _ = writeln!(out, "monitor: {}", spec.kind.name());
    match &spec.kind {
        MonitorKind::Regex { pattern, .. } => {
            let _ = writeln!(out, "pattern: {pattern}");
        }
        MonitorKind::Fsm(fsm) => {
            for s in 0..fsm.state_count() {
                let initial = if s == fsm.initial() { " initial" } else { "" };
                let _ = writeln!(out, "state {}{initial}", fsm.state_name(s));
            }
            for s in 0..fsm.state_count() {
                for e in 0..spec.events.len() {
                    let _ = writeln!(out, "trans {} {} {}", fsm.state_name(s), name(e), fsm.state_name(fsm.step(s, e)));
                }
            }
            for s in 0..fsm.state_count() {
                let _ = writeln!(out, "label {} {}", fsm.state_name(s), fsm.label(s));
            }
        }
        MonitorKind::Balance(b) => {
            let r = &b.roles;
            for (role, e) in [("begin", r.begin), ("end", r.end), ("acquire", r.acquire), ("release", r.release)] {
                let _ = writeln!(out, "{role}: {}", name(e));
            }
        }
        MonitorKind::Ratio(r) => {
            let _ = writeln!(out, "success: {}", name(r.success));
        }
    }
    let _ = writeln!(out, "report: {}", join(&mut spec.trigger.iter().map(|t| t.to_string())));
    out
}
