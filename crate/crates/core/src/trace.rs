//! Parametric events and traces, the trace-log format, and the definitional
//! slicing semantics used as the reference for the online algorithms.

use std::fmt;
use std::io::BufRead;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::{
    is_identifier, is_value_token, less_informative, lub_closure, InstanceSet, ParamInstance, ParamName, ParamValue,
};
use crate::monitor::{BaseMonitor, Verdict};

/// A base (non-parametric) event name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BaseEvent(Arc<str>);

impl BaseEvent {
    pub fn new(name: &str) -> Result<Self> {
        if is_identifier(name) {
            Ok(BaseEvent(Arc::from(name)))
        } else {
            Err(Error::InvalidName(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for BaseEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for BaseEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// `e⟨θ⟩`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ParametricEvent {
    pub base: BaseEvent,
    pub instance: ParamInstance,
}

impl ParametricEvent {
    pub fn new(base: BaseEvent, instance: ParamInstance) -> Self {
        ParametricEvent { base, instance }
    }

    /// Shorthand for tests and fixtures: `ParametricEvent::of("acquire", &[("r", "r1")])`.
    pub fn of(name: &str, pairs: &[(&str, &str)]) -> Result<Self> {
        Ok(ParametricEvent { base: BaseEvent::new(name)?, instance: ParamInstance::from_pairs(pairs)? })
    }
}

impl fmt::Display for ParametricEvent {
    /// Renders one trace-log line (without the newline).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.base.as_str())?;
        for (n, v) in self.instance.bindings() {
            write!(f, " {n}={v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ParametricEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.base, self.instance)
    }
}

/// A finite sequence of parametric events.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct ParametricTrace(Vec<ParametricEvent>);

impl ParametricTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, event: ParametricEvent) {
        self.0.push(event);
    }

    pub fn events(&self) -> &[ParametricEvent] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The first `k` events.
    pub fn prefix(&self, k: usize) -> ParametricTrace {
        ParametricTrace(self.0[..k.min(self.0.len())].to_vec())
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ParametricEvent> {
        self.0.iter()
    }
}

impl From<Vec<ParametricEvent>> for ParametricTrace {
    fn from(v: Vec<ParametricEvent>) -> Self {
        ParametricTrace(v)
    }
}

impl FromIterator<ParametricEvent> for ParametricTrace {
    fn from_iter<I: IntoIterator<Item = ParametricEvent>>(iter: I) -> Self {
        ParametricTrace(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a ParametricTrace {
    type Item = &'a ParametricEvent;
    type IntoIter = std::slice::Iter<'a, ParametricEvent>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A finite sequence of base events; rendered space-separated.
#[derive(Clone, Default, PartialEq, Eq, Debug, Hash)]
pub struct BaseTrace(pub Vec<BaseEvent>);

impl BaseTrace {
    pub fn events(&self) -> &[BaseEvent] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses a space-separated word such as `e1 e5 e6`.
    pub fn from_words(text: &str) -> Result<Self> {
        text.split_whitespace().map(BaseEvent::new).collect::<Result<Vec<_>>>().map(BaseTrace)
    }
}

impl fmt::Display for BaseTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(e.as_str())?;
        }
        Ok(())
    }
}

/// `τ↾θ`: base events of `tau` whose instance is `⊑ theta`, in order.
pub fn slice_by_definition(tau: &ParametricTrace, theta: &ParamInstance) -> BaseTrace {
    BaseTrace(tau.iter().filter(|ev| less_informative(&ev.instance, theta)).map(|ev| ev.base.clone()).collect())
}

/// `Θ_τ`: lub closure of every instance occurring in `tau`.
pub fn theta_of_trace(tau: &ParametricTrace) -> InstanceSet {
    let seen: InstanceSet = tau.iter().map(|ev| ev.instance.clone()).collect();
    lub_closure(&seen)
}

/// `(ΛX.P)(τ)(θ)`: the base monitor's verdict on the definitional slice.
pub fn parametric_property_eval<M: BaseMonitor>(
    monitor: &M,
    tau: &ParametricTrace,
    theta: &ParamInstance,
) -> Result<Verdict> {
    let slice = slice_by_definition(tau, theta);
    let state = monitor.run(slice.events())?;
    Ok(monitor.output(&state))
}

/// Parses one trace-log line. Blank and comment-only lines yield `None`.
pub fn parse_event_line(line: &str, line_no: usize) -> Result<Option<ParametricEvent>> {
    let content = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut tokens = content.split_whitespace();
    let Some(name) = tokens.next() else {
        return Ok(None);
    };
    let parse_err = |message: String| Error::Parse { line: line_no, message };
    if !is_identifier(name) {
        return Err(parse_err(format!("invalid event name `{name}`")));
    }
    let mut bindings: Vec<(ParamName, ParamValue)> = Vec::new();
    for tok in tokens {
        let Some((n, v)) = tok.split_once('=') else {
            return Err(parse_err(format!("expected `param=value`, found `{tok}`")));
        };
        if !is_identifier(n) {
            return Err(parse_err(format!("invalid parameter name `{n}`")));
        }
        if !is_value_token(v) {
            return Err(parse_err(format!("invalid value in `{tok}`")));
        }
        let name = ParamName::new(n)?;
        if bindings.iter().any(|(m, _)| *m == name) {
            return Err(Error::DuplicateParam { param: n.to_string(), line: Some(line_no) });
        }
        bindings.push((name, ParamValue::new(v)?));
    }
    let base = BaseEvent::new(name)?;
    Ok(Some(ParametricEvent::new(base, ParamInstance::from_bindings(bindings)?)))
}

/// Streaming reader over the trace-log format.
///
/// Yields `(line number, event)` pairs so consumers can process events as
/// they arrive.
pub struct TraceReader<R> {
    reader: R,
    line_no: usize,
    buf: Vec<u8>,
}

impl<R: BufRead> TraceReader<R> {
    pub fn new(reader: R) -> Self {
        TraceReader { reader, line_no: 0, buf: Vec::new() }
    }
}

impl<R: BufRead> Iterator for TraceReader<R> {
    type Item = Result<(usize, ParametricEvent)>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            match self.reader.read_until(b'\n', &mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => {
                    return Some(Err(Error::Parse { line: self.line_no + 1, message: e.to_string() }));
                }
            }
            self.line_no += 1;
            let line = match std::str::from_utf8(&self.buf) {
                Ok(s) => s,
                Err(_) => {
                    return Some(Err(Error::Parse { line: self.line_no, message: "invalid UTF-8".into() }));
                }
            };
            match parse_event_line(line, self.line_no) {
                Ok(Some(ev)) => return Some(Ok((self.line_no, ev))),
                Ok(None) => continue,
                Err(e) => return Some(Err(e)),
            }
        }
    }
}

/// Parses a whole trace log.
pub fn parse_trace(text: &[u8]) -> Result<ParametricTrace> {
    TraceReader::new(text).map(|r| r.map(|(_, ev)| ev)).collect()
}

/// Canonical rendering: one event per line, parameters in name order.
pub fn render_trace(tau: &ParametricTrace) -> String {
    let mut out = String::new();
    for ev in tau {
        out.push_str(&ev.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(name: &str, pairs: &[(&str, &str)]) -> ParametricEvent {
        ParametricEvent::of(name, pairs).unwrap()
    }

    #[test]
    fn parse_examples() {
        let t = parse_trace(b"next i=i1\n").unwrap();
        assert_eq!(t.events(), &[ev("next", &[("i", "i1")])]);

        let t = parse_trace(b"begin\nacquire r=r1\n").unwrap();
        assert_eq!(t.events(), &[ev("begin", &[]), ev("acquire", &[("r", "r1")])]);

        let err = parse_trace(b"acquire r=r1 r=r2").unwrap_err();
        assert_eq!(err, Error::DuplicateParam { param: "r".into(), line: Some(1) });
    }

    #[test]
    fn comments_blank_lines_and_errors() {
        let t = parse_trace(b"# header\n\n  e1 a=a1   # trailing\n\te2\n").unwrap();
        assert_eq!(t.len(), 2);
        assert!(matches!(parse_trace(b"e1\n e2 a\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_trace(b"1e\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_trace(b"e a=\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_trace(b"e a=b=c\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_trace(b"e\n\xff\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn empty_trace_slices_to_empty() {
        let empty = ParametricTrace::new();
        assert!(slice_by_definition(&empty, &ParamInstance::from_pairs(&[("a", "a1")]).unwrap()).is_empty());
        assert_eq!(theta_of_trace(&empty), InstanceSet::bottom_only());
    }

    #[test]
    fn render_is_canonical() {
        let t = parse_trace(b"e z=1 a=2\n").unwrap();
        assert_eq!(render_trace(&t), "e a=2 z=1\n");
    }
}
