use cfmetric::RayonExecutor;
use cfmetric_core::cantor::{holder_report_with, schedule, MassMode, ScheduleMode};
use cfmetric_core::mc::{digit_frequencies, hit_fraction_curve, hit_fraction_with, EventFamily, EventTag, SampleStream};
use cfmetric_core::pressure::{dimension_with, s_n_root_with, Functional, PotentialSpec};
use cfmetric_core::{Executor, Sequential};
use proptest::prelude::*;

fn pools() -> (RayonExecutor, RayonExecutor) {
    (RayonExecutor::new(Some(1)).unwrap(), RayonExecutor::new(Some(8)).unwrap())
}

#[test]
fn pool_sizes_are_respected() {
    let (one, eight) = pools();
    assert_eq!(one.threads(), 1);
    assert_eq!(eight.threads(), 8);
}

#[test]
fn enumeration_and_operator_roots_ignore_thread_count() {
    let (one, eight) = pools();
    let spec = PotentialSpec::new(2.0, Functional::F2, 6).unwrap();
    let a = s_n_root_with(&one, 7, &spec, 1e-13).unwrap();
    let b = s_n_root_with(&eight, 7, &spec, 1e-13).unwrap();
    let c = s_n_root_with(&Sequential, 7, &spec, 1e-13).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert_eq!(dimension_with(&one, &spec, 1e-10).unwrap(), dimension_with(&eight, &spec, 1e-10).unwrap());
}

#[test]
fn monte_carlo_ignores_thread_count() {
    let (one, eight) = pools();
    let stream = SampleStream::covering(7, 500, 300).unwrap();
    let fam = EventFamily::new(EventTag::F1, "n^0.7".parse().unwrap()).unwrap();
    assert_eq!(
        hit_fraction_with(&one, &fam, 50..=500, &stream).unwrap(),
        hit_fraction_with(&eight, &fam, 50..=500, &stream).unwrap()
    );
    assert_eq!(
        hit_fraction_curve(&one, &fam, 50, &[100, 300, 500], &stream).unwrap(),
        hit_fraction_curve(&eight, &fam, 50, &[100, 300, 500], &stream).unwrap()
    );
    assert_eq!(digit_frequencies(&one, &stream, 12), digit_frequencies(&eight, &stream, 12));
}

#[test]
fn holder_audit_ignores_thread_count() {
    let (one, eight) = pools();
    let params = schedule(2, 3, 2.0, ScheduleMode::Scaled(1)).unwrap();
    let a = holder_report_with(&one, &params, 25, 40, 5, MassMode::Normalized).unwrap();
    let b = holder_report_with(&eight, &params, 25, 40, 5, MassMode::Normalized).unwrap();
    assert_eq!(a, b);
}

#[test]
fn curve_matches_individual_windows() {
    let exec = RayonExecutor::new(Some(4)).unwrap();
    let stream = SampleStream::covering(2, 400, 200).unwrap();
    let fam = EventFamily::new(EventTag::E2, "n".parse().unwrap()).unwrap();
    let curve = hit_fraction_curve(&exec, &fam, 10, &[50, 400], &stream).unwrap();
    assert_eq!(curve[0], hit_fraction_with(&exec, &fam, 10..=50, &stream).unwrap());
    assert_eq!(curve[1], hit_fraction_with(&exec, &fam, 10..=400, &stream).unwrap());
    assert!(curve[0].hits <= curve[1].hits);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn map_preserves_job_order(jobs in 0usize..500, threads in 1usize..9) {
        let exec = RayonExecutor::new(Some(threads)).unwrap();
        let got = exec.map(jobs, |i| i * i);
        prop_assert_eq!(got, Sequential.map(jobs, |i| i * i));
    }
}
