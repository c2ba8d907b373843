use std::fs;

use netfloc::harness::gen::{random_instance, random_trace, rng, FuzzConfig};
use netfloc::harness::{run_trace, verify_trace, Mode, Trace};
use netfloc::instance_file::read_instance;
use netfloc::{DynamicFacilityLocation, Instance};

#[test]
fn generated_files_round_trip_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = rng(3);
    let file = random_instance(&mut r, &FuzzConfig::default());
    let trace = random_trace(&mut r, FuzzConfig::default().points, 1000);
    let ip = dir.path().join("inst.json");
    let tp = dir.path().join("events.trace");
    fs::write(&ip, file.to_json()).unwrap();
    fs::write(&tp, trace.to_text()).unwrap();

    let inst: Instance<f64> = read_instance(&ip).unwrap();
    let back = Trace::read(&tp).unwrap();
    assert_eq!(back.to_text(), trace.to_text());
    assert_eq!(inst.facilities().len(), FuzzConfig::default().facilities);

    let report = verify_trace(&inst, &back).unwrap();
    assert!(report.is_clean(), "{}", report.failure.unwrap());
    assert_eq!(report.verified_states, back.len() - back.query_count());
}

#[test]
fn replay_is_deterministic() {
    let mut r = rng(9);
    let inst: Instance<f64> = random_instance(&mut r, &FuzzConfig::default()).to_instance().unwrap();
    let trace = random_trace(&mut r, FuzzConfig::default().points, 400);
    let replay = || {
        let mut e = DynamicFacilityLocation::new(inst.clone()).unwrap();
        let report = run_trace(&mut e, &trace, Mode::Fast).unwrap();
        (report.outputs, report.totals, e.snapshot().state_hash())
    };
    assert_eq!(replay(), replay());
}
