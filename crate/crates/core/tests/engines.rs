mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tracemon::error::Error;
use tracemon::lattice::ParamInstance;
use tracemon::monitor::{parse_property_spec, BaseMonitor, MonitorSpec};
use tracemon::param::{reference_verdict, run_to_end, FullScanMonitor, IndexedMonitor, ParametricMonitor, ReportPolicy};
use tracemon::trace::{parse_trace, BaseEvent, ParametricEvent};
use tracemon::workload::{random_case, random_query, CaseLimits, RandomCase};

fn case(seed: u64, k: usize) -> (RandomCase, Vec<ParamInstance>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = random_case(&mut rng, k, CaseLimits::default());
    let queries = (0..10).map(|_| random_query(&mut rng, &c.pools)).collect();
    (c, queries)
}

fn engines(spec: &MonitorSpec) -> (FullScanMonitor<&MonitorSpec>, IndexedMonitor<&MonitorSpec>) {
    let policy = ReportPolicy::new(spec.trigger.clone());
    (FullScanMonitor::new(spec, policy.clone()), IndexedMonitor::new(spec, policy))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn full_scan_and_indexed_agree_stepwise(seed in any::<u64>(), k in 0..4usize) {
        let (c, _) = case(seed, k);
        let (mut b, mut ix) = engines(&c.spec);
        for ev in &c.trace {
            prop_assert_eq!(b.process(ev).unwrap(), ix.process(ev).unwrap());
            prop_assert_eq!(b.states(), ix.states());
            prop_assert_eq!(b.verdicts(), ix.verdicts());
            prop_assert_eq!(b.instance_count(), ix.instance_count());
            prop_assert_eq!(ix.check_index(), Ok(()));
        }
    }

    #[test]
    fn indexed_matches_monitor_on_oracle_slice(seed in any::<u64>(), k in 0..4usize) {
        let (c, queries) = case(seed, k);
        let (_, mut ix) = engines(&c.spec);
        run_to_end(&mut ix, &c.trace).unwrap();
        let domain: Vec<ParamInstance> = common::trace_domain(&c.trace).iter().map(common::from_map).collect();
        for theta in domain.iter().chain(&queries) {
            let word: Vec<BaseEvent> =
                common::slice(&c.trace, &common::to_map(theta)).iter().map(|e| BaseEvent::new(e).unwrap()).collect();
            let want = c.spec.output(&c.spec.run(&word).unwrap());
            prop_assert_eq!(ix.verdict_for(theta).unwrap(), want);
            prop_assert_eq!(reference_verdict(&c.spec, &c.trace, theta).unwrap(), want);
        }
    }

    #[test]
    fn reports_are_deterministic(seed in any::<u64>(), k in 0..4usize) {
        let (c, _) = case(seed, k);
        let (mut b1, mut c1) = engines(&c.spec);
        let (mut b2, mut c2) = engines(&c.spec);
        let first = run_to_end(&mut c1, &c.trace).unwrap();
        prop_assert_eq!(&first, &run_to_end(&mut c2, &c.trace).unwrap());
        prop_assert_eq!(&first, &run_to_end(&mut b1, &c.trace).unwrap());
        prop_assert_eq!(&first, &run_to_end(&mut b2, &c.trace).unwrap());
        let mut last = 0;
        for r in &first {
            prop_assert!(r.event_index >= last);
            last = r.event_index;
        }
    }

    #[test]
    fn clones_evolve_independently(seed in any::<u64>(), k in 0..4usize, cut in 0..50usize) {
        let (c, _) = case(seed, k);
        let cut = cut.min(c.trace.len());
        let (mut b, mut ix) = engines(&c.spec);
        for ev in &c.trace.events()[..cut] {
            b.process(ev).unwrap();
            ix.process(ev).unwrap();
        }
        let (b_snapshot, ix_snapshot) = (b.states(), ix.states());
        let (mut b_fork, mut ix_fork) = (b.clone(), ix.clone());
        for ev in &c.trace.events()[cut..] {
            b_fork.process(ev).unwrap();
            ix_fork.process(ev).unwrap();
        }
        prop_assert_eq!(b.states(), b_snapshot);
        prop_assert_eq!(ix.states(), ix_snapshot);
        for ev in &c.trace.events()[cut..] {
            b.process(ev).unwrap();
            ix.process(ev).unwrap();
        }
        prop_assert_eq!(b.states(), b_fork.states());
        prop_assert_eq!(ix.states(), ix_fork.states());
    }
}

const ACQREL: &str = "\
property AcquireRelease
params: r
event begin()
event end()
event acquire(r)
event release(r)
monitor: regex
pattern: (begin (ε | acquire (acquire | release)* release) end)*
report: fail
";

#[test]
fn report_every_repeats_unchanged_verdicts() {
    let spec = parse_property_spec(ACQREL.as_bytes()).unwrap();
    let tau = parse_trace(b"begin\nacquire r=r1\nend\nend\nbegin\n").unwrap();
    let mut policy = ReportPolicy::new(spec.trigger.clone());
    let mut once = IndexedMonitor::new(&spec, policy.clone());
    policy.every = true;
    let mut every = IndexedMonitor::new(&spec, policy);
    let once: Vec<String> = run_to_end(&mut once, &tau).unwrap().iter().map(|r| r.to_string()).collect();
    let every: Vec<String> = run_to_end(&mut every, &tau).unwrap().iter().map(|r| r.to_string()).collect();
    // ⊥ sees `begin end end`, r=r1 sees `begin acquire end end begin`.
    assert_eq!(once, ["3\tfail\tr=r1\tend", "4\tfail\t\tend"]);
    assert_eq!(
        every,
        ["3\tfail\tr=r1\tend", "4\tfail\t\tend", "4\tfail\tr=r1\tend", "5\tfail\t\tbegin", "5\tfail\tr=r1\tbegin"]
    );
}

#[test]
fn cap_errors_leave_both_engines_unchanged() {
    let spec = parse_property_spec(ACQREL.as_bytes()).unwrap();
    let policy = ReportPolicy::new(spec.trigger.clone());
    let mut b = FullScanMonitor::new(&spec, policy.clone()).with_cap(0);
    let mut ix = IndexedMonitor::new(&spec, policy).with_cap(0);
    let ev = ParametricEvent::of("acquire", &[("r", "r1")]).unwrap();
    assert!(matches!(b.process(&ev), Err(Error::CapExceeded { .. })));
    assert!(matches!(ix.process(&ev), Err(Error::CapExceeded { .. })));
    assert_eq!(b.instance_count(), 1);
    assert_eq!(ix.instance_count(), 1);
    assert_eq!(ix.counters().events, b.counters().events);
}
