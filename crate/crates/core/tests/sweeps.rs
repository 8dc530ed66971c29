use std::time::Instant;

use cppforge::{run_sweep, ExhaustiveCap, SweepKind, SweepOptions};

#[test]
fn every_sweep_is_clean_with_fibre_checks() {
    for kind in SweepKind::ALL {
        let opts = SweepOptions {
            max_order: 256,
            random_h: 10,
            general_instances: 60,
            with_agw: true,
            // the quadratic-tower sweep is bounded by the cap alone
            cap: ExhaustiveCap(4096),
            ..SweepOptions::default()
        };
        let start = Instant::now();
        let report = run_sweep(kind, &opts).unwrap();
        println!(
            "{}: {}/{} agree, fibre {}/{}, {:?}, {:.2?}",
            report.name, report.agreements, report.total, report.agw_agreements, report.agw_checked,
            report.counts, start.elapsed()
        );
        assert!(report.passed(), "{:?}", report.counterexamples);
        assert!(report.total > 0, "{} visited nothing", report.name);
        assert!(report.agw_checked > 0);
    }
}

#[test]
fn sweeps_are_deterministic() {
    let opts = SweepOptions {
        max_order: 256,
        random_h: 5,
        general_instances: 20,
        ..SweepOptions::default()
    };
    for kind in [SweepKind::TraceGeneral, SweepKind::TraceSimple] {
        let a = serde_json::to_string(&run_sweep(kind, &opts).unwrap()).unwrap();
        let b = serde_json::to_string(&run_sweep(kind, &opts).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn both_truth_directions_occur() {
    let opts = SweepOptions {
        max_order: 512,
        ..SweepOptions::default()
    };
    let report = run_sweep(SweepKind::NormLift, &opts).unwrap();
    let cpp = report.count("cpp");
    assert!(cpp > 0 && cpp < report.total);
    let kernel = run_sweep(SweepKind::KernelBinomial, &opts).unwrap();
    assert!(kernel.count("necessity_checked") > 0);
    assert!(kernel.count("no_case") > 0);
}
