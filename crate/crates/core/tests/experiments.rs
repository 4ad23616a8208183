use orbitlab_core::experiments::{
    run_experiment, scenario_catalog, trial_seed, Experiment, ExperimentConfig, ExperimentKind, Outcome,
};
use orbitlab_core::{ClosednessStatus, Error, Field, GroupSpec};

fn small(name: &str, trials: usize) -> ExperimentConfig {
    let mut c = ExperimentConfig::from_catalog(name).unwrap();
    c.trials = trials;
    c
}

#[test]
fn catalog_has_the_required_scenarios() {
    let names: Vec<&str> = scenario_catalog().iter().map(|e| e.name).collect();
    for want in ["example1", "sl4-block", "normal-factor", "sym2-sum", "sl2-real-complex"] {
        assert!(names.contains(&want), "{want} missing from {names:?}");
    }
}

#[test]
fn reports_are_a_pure_function_of_the_config() {
    let config = small("sym2-sum", 6);
    let a = serde_json::to_string(&run_experiment(config.clone()).unwrap()).unwrap();
    let b = serde_json::to_string(&run_experiment(config).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn trial_order_does_not_change_the_report() {
    let exp = Experiment::new(small("normal-factor", 8)).unwrap();
    let forward: Vec<_> = (0..exp.trial_count()).map(|i| exp.run_trial(i)).collect();
    let mut backward = forward.clone();
    backward.reverse();
    assert_eq!(exp.assemble(forward), exp.assemble(backward));
}

#[test]
fn trial_seeds_differ_by_index_and_seed() {
    let seeds: Vec<u64> = (0..50).map(|i| trial_seed(7, i)).collect();
    let mut unique = seeds.clone();
    unique.sort_unstable();
    unique.dedup();
    assert_eq!(unique.len(), seeds.len());
    assert_ne!(trial_seed(7, 0), trial_seed(8, 0));
}

#[test]
fn counts_sum_to_trials() {
    for name in ["sym2-sum", "sl2-real-complex"] {
        let report = run_experiment(small(name, 8)).unwrap();
        let c = report.summary.closedness.unwrap();
        assert_eq!(c.closed + c.non_closed + c.inconclusive, 8, "{name}");
        let r = report.summary.reductivity.unwrap();
        assert_eq!(r.reductive + r.not_reductive + r.inconclusive, 8, "{name}");
    }
    // H-verdicts only exist for trials whose G-orbit is closed
    let report = run_experiment(small("normal-factor", 8)).unwrap();
    let c = report.summary.closedness.unwrap();
    let g_closed = report.trials.iter().filter(|t| t.g_status == Some(ClosednessStatus::Closed)).count();
    assert_eq!(c.closed + c.non_closed + c.inconclusive, g_closed);
}

#[test]
fn zero_trials_is_a_configuration_error() {
    let config = small("example1", 0);
    assert!(matches!(Experiment::new(config), Err(Error::Config(_))));
}

#[test]
fn mismatched_subgroup_is_a_configuration_error() {
    let mut config = small("sym2-sum", 4);
    config.scenario.subgroup = GroupSpec::special_linear(3, Field::Complex);
    assert!(Experiment::new(config).is_err());
}

#[test]
fn example_pipeline_passes() {
    let report = run_experiment(ExperimentConfig::from_catalog("example1").unwrap()).unwrap();
    assert_eq!(report.summary.outcome, Outcome::Pass);
    assert!(report.trials.is_empty());
    let failed: Vec<_> = report.summary.checks.iter().filter(|c| !c.passed).collect();
    assert!(failed.is_empty(), "{failed:?}");
}

#[test]
fn real_complex_trials_agree_on_small_runs() {
    let mut config = small("sl2-real-complex", 12);
    config.kind = ExperimentKind::RealComplexAgreement;
    let report = run_experiment(config).unwrap();
    for t in &report.trials {
        if let (Some(a), Some(b)) = (t.real_status, t.complex_status) {
            if a != ClosednessStatus::Inconclusive && b != ClosednessStatus::Inconclusive {
                assert_eq!(a, b, "trial {}", t.index);
            }
        }
    }
}
