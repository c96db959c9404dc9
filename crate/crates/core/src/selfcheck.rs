//! Differential self-check over seeded random cases.
//!
//! Each case runs three comparisons:
//!
//! * the slicer against the definitional slice, for every stored instance
//!   and for random instances that may lie outside the stored set;
//! * the full-scan engine against the indexed engine, comparing state
//!   tables, verdict tables and reports after every event;
//! * the indexed engine against the reference verdict.
//!
//! A failing case is shrunk by deleting events while the same comparison
//! keeps failing.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::lattice::DEFAULT_CAP;
use crate::monitor::MonitorSpec;
use crate::param::{reference_verdict, FullScanMonitor, IndexedMonitor, ParametricMonitor, ReportPolicy};
use crate::slicer::Slicer;
use crate::trace::{slice_by_definition, theta_of_trace, ParametricTrace};
use crate::workload::{random_case, random_query, CaseLimits, RandomCase};

/// Random off-domain queries per case.
pub const QUERIES_PER_CASE: usize = 10;

/// Deliberate defects, used to confirm the checks can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// The indexed engine never joins new instances with compatible ones.
    SkipJoin,
    /// The slicer reads slices written earlier in the same step.
    NoSnapshot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    SlicerVsOracle,
    FullScanVsIndexed,
    IndexedVsReference,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Check::SlicerVsOracle => "slicer vs oracle",
            Check::FullScanVsIndexed => "full-scan vs indexed",
            Check::IndexedVsReference => "indexed vs reference",
        })
    }
}

/// A failing input, already shrunk.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub case: usize,
    pub check: Check,
    pub detail: String,
    pub spec: MonitorSpec,
    pub trace: ParametricTrace,
}

#[derive(Clone, Debug, Default)]
pub struct Summary {
    pub cases: usize,
    pub slicer_ok: usize,
    pub engines_agree: usize,
    pub reference_ok: usize,
    /// First failure, if any.
    pub counterexample: Option<Counterexample>,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
            && self.slicer_ok == self.cases
            && self.engines_agree == self.cases
            && self.reference_ok == self.cases
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.cases;
        write!(
            f,
            "{}: {}/{n} A=oracle, {}/{n} B=C, {}/{n} C=ref",
            if self.passed() { "ok" } else { "FAIL" },
            self.slicer_ok,
            self.engines_agree,
            self.reference_ok
        )
    }
}

#[derive(Clone, Debug)]
pub struct Config {
    pub seed: u64,
    pub cases: usize,
    pub limits: CaseLimits,
    pub mutation: Option<Mutation>,
    pub cap: usize,
}

impl Config {
    pub fn new(seed: u64, cases: usize) -> Self {
        Config { seed, cases, limits: CaseLimits::default(), mutation: None, cap: DEFAULT_CAP }
    }
}

/// The random case with number `case` under `seed`. Each case has its own
/// stream, so cases can be regenerated independently.
pub fn case_for(seed: u64, case: usize, limits: CaseLimits) -> (RandomCase, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64);
    let c = random_case(&mut rng, case, limits);
    (c, rng)
}

/// Runs every case and stops shrinking at the first failure. Remaining
/// cases still count toward the summary.
pub fn run(config: &Config) -> Summary {
    let mut summary = Summary { cases: config.cases, ..Summary::default() };
    for case in 0..config.cases {
        let (c, mut rng) = case_for(config.seed, case, config.limits);
        let queries: Vec<_> = (0..QUERIES_PER_CASE).map(|_| random_query(&mut rng, &c.pools)).collect();
        let ctx = Context { spec: &c.spec, queries: &queries, mutation: config.mutation, cap: config.cap };
        let results = [
            (Check::SlicerVsOracle, ctx.slicer(&c.trace)),
            (Check::FullScanVsIndexed, ctx.engines(&c.trace)),
            (Check::IndexedVsReference, ctx.reference(&c.trace)),
        ];
        for (check, result) in results {
            match result {
                Ok(()) => match check {
                    Check::SlicerVsOracle => summary.slicer_ok += 1,
                    Check::FullScanVsIndexed => summary.engines_agree += 1,
                    Check::IndexedVsReference => summary.reference_ok += 1,
                },
                Err(detail) if summary.counterexample.is_none() => {
                    let (trace, detail) = ctx.shrink(check, c.trace.clone(), detail);
                    summary.counterexample = Some(Counterexample { case, check, detail, spec: c.spec.clone(), trace });
                }
                Err(_) => {}
            }
        }
    }
    summary
}

struct Context<'a> {
    spec: &'a MonitorSpec,
    queries: &'a [crate::lattice::ParamInstance],
    mutation: Option<Mutation>,
    cap: usize,
}

type CheckResult = std::result::Result<(), String>;

impl Context<'_> {
    fn run_check(&self, check: Check, trace: &ParametricTrace) -> CheckResult {
        match check {
            Check::SlicerVsOracle => self.slicer(trace),
            Check::FullScanVsIndexed => self.engines(trace),
            Check::IndexedVsReference => self.reference(trace),
        }
    }

    fn slicer(&self, trace: &ParametricTrace) -> CheckResult {
        let mut slicer = Slicer::new(self.cap).with_live_reads(self.mutation == Some(Mutation::NoSnapshot));
        slicer.extend(trace).map_err(|e| format!("slicer error: {e}"))?;
        let expected = theta_of_trace(trace);
        if slicer.instances() != expected {
            return Err(format!("stored instances {:?}, expected {expected:?}", slicer.instances()));
        }
        for (theta, slice) in slicer.iter() {
            let want = slice_by_definition(trace, theta);
            if slice != want {
                return Err(format!("stored slice for {theta:?} is `{slice}`, expected `{want}`"));
            }
        }
        for q in self.queries {
            let got = slicer.slice(q).map_err(|e| format!("slicer error: {e}"))?;
            let want = slice_by_definition(trace, q);
            if got != want {
                return Err(format!("slice for {q:?} is `{got}`, expected `{want}`"));
            }
        }
        Ok(())
    }

    fn indexed(&self) -> IndexedMonitor<&MonitorSpec> {
        IndexedMonitor::new(self.spec, ReportPolicy::new(self.spec.trigger.clone()))
            .with_cap(self.cap)
            .with_skip_join(self.mutation == Some(Mutation::SkipJoin))
    }

    fn engines(&self, trace: &ParametricTrace) -> CheckResult {
        let mut b = FullScanMonitor::new(self.spec, ReportPolicy::new(self.spec.trigger.clone())).with_cap(self.cap);
        let mut c = self.indexed();
        for (k, ev) in trace.iter().enumerate() {
            let rb = b.process(ev).map_err(|e| format!("full-scan error at event {}: {e}", k + 1))?;
            let rc = c.process(ev).map_err(|e| format!("indexed error at event {}: {e}", k + 1))?;
            if rb != rc {
                return Err(format!("reports differ at event {}: {rb:?} vs {rc:?}", k + 1));
            }
            if b.states() != c.states() {
                return Err(format!("state tables differ at event {}: {:?} vs {:?}", k + 1, b.states(), c.states()));
            }
            if b.verdicts() != c.verdicts() {
                return Err(format!("verdict tables differ at event {}", k + 1));
            }
            c.check_index().map_err(|e| format!("after event {}: {e}", k + 1))?;
        }
        Ok(())
    }

    fn reference(&self, trace: &ParametricTrace) -> CheckResult {
        let mut c = self.indexed();
        for (k, ev) in trace.iter().enumerate() {
            c.process(ev).map_err(|e| format!("indexed error at event {}: {e}", k + 1))?;
        }
        let stored = c.states().into_keys();
        for theta in stored.chain(self.queries.iter().cloned()) {
            let got = c.verdict_for(&theta).map_err(|e| e.to_string())?;
            let want = reference_verdict(self.spec, trace, &theta).map_err(|e| e.to_string())?;
            if got != want {
                return Err(format!("verdict for {theta:?} is {got}, expected {want}"));
            }
        }
        Ok(())
    }

    /// Greedily removes single events while `check` still fails.
    fn shrink(&self, check: Check, mut trace: ParametricTrace, mut detail: String) -> (ParametricTrace, String) {
        let mut i = 0;
        while i < trace.len() {
            let candidate: ParametricTrace =
                trace.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, e)| e.clone()).collect();
            match self.run_check(check, &candidate) {
                Err(d) => {
                    trace = candidate;
                    detail = d;
                }
                Ok(()) => i += 1,
            }
        }
        (trace, detail)
    }
}
