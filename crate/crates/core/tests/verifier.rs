use std::collections::BTreeMap;

use nevlab::corpus::{Corpus, CorpusEntry};
use nevlab::verifier::{run_all, summarize, CheckReport, RunConfig, Verdict, CHECK_IDS, REPORT_SCHEMA};

const SUBSET: [&str; 3] = ["exp", "rational-1", "pole-at-2"];

fn entries(ids: &[&str]) -> Vec<CorpusEntry> {
    let reference = Corpus::reference();
    ids.iter().map(|id| reference.get(id).unwrap().entry.clone()).collect()
}

fn small_config(seed: u64) -> RunConfig {
    RunConfig {
        seed,
        lemma_samples: 2000,
        lemma_circle_points: 50,
        shift_samples: 3,
        halvings: 8,
        ..RunConfig::default()
    }
}

fn to_json(reports: &[CheckReport]) -> String {
    serde_json::to_string(reports).unwrap()
}

fn by_key(reports: &[CheckReport]) -> BTreeMap<(String, String), String> {
    reports
        .iter()
        .filter(|r| r.check_id != "check_lemmas")
        .map(|r| ((r.check_id.clone(), r.function_id.clone()), serde_json::to_string(r).unwrap()))
        .collect()
}

#[test]
fn reports_are_deterministic_across_thread_counts() {
    let corpus = Corpus::from_entries(entries(&SUBSET)).unwrap();
    let one = run_all(&corpus, &RunConfig { threads: Some(1), ..small_config(7) }).unwrap();
    let two = run_all(&corpus, &RunConfig { threads: Some(2), ..small_config(7) }).unwrap();
    assert_eq!(to_json(&one), to_json(&two));
    let other_seed = run_all(&corpus, &small_config(8)).unwrap();
    assert_ne!(to_json(&one), to_json(&other_seed));
}

#[test]
fn reports_follow_check_then_corpus_order() {
    let corpus = Corpus::from_entries(entries(&SUBSET)).unwrap();
    let reports = run_all(&corpus, &small_config(1)).unwrap();
    let member_checks: Vec<&str> = CHECK_IDS.iter().copied().filter(|c| *c != "check_lemmas").collect();
    let head: Vec<(&str, &str)> = reports
        .iter()
        .take(member_checks.len() * SUBSET.len())
        .map(|r| (r.check_id.as_str(), r.function_id.as_str()))
        .collect();
    let expected: Vec<(&str, &str)> =
        member_checks.iter().flat_map(|c| SUBSET.iter().map(move |f| (*c, *f))).collect();
    assert_eq!(head, expected);
    assert!(reports[head.len()..].iter().all(|r| r.check_id == "check_lemmas"));
}

#[test]
fn permuting_the_corpus_permutes_the_reports() {
    let mut reversed = SUBSET;
    reversed.reverse();
    let a = run_all(&Corpus::from_entries(entries(&SUBSET)).unwrap(), &small_config(3)).unwrap();
    let b = run_all(&Corpus::from_entries(entries(&reversed)).unwrap(), &small_config(3)).unwrap();
    assert_eq!(a.len(), b.len());
    assert_eq!(by_key(&a), by_key(&b));
}

#[test]
fn filter_selects_checks_in_canonical_order() {
    let corpus = Corpus::from_entries(entries(&SUBSET)).unwrap();
    let config = RunConfig {
        check_filter: vec!["check_smt_vanishing".into(), "check_first_main".into()],
        ..small_config(2)
    };
    let reports = run_all(&corpus, &config).unwrap();
    let ids: Vec<&str> = reports.iter().map(|r| r.check_id.as_str()).collect();
    assert_eq!(ids, [["check_first_main"; 3], ["check_smt_vanishing"; 3]].concat());
}

#[test]
fn invalid_configs_are_rejected() {
    let corpus = Corpus::from_entries(entries(&["exp"])).unwrap();
    let bad = [
        RunConfig { tol: 0.0, ..RunConfig::default() },
        RunConfig { betas: vec![1.0], ..RunConfig::default() },
        RunConfig { eps: 1.5, ..RunConfig::default() },
        RunConfig { threads: Some(0), ..RunConfig::default() },
        RunConfig { smt_radii: vec![0.5], ..RunConfig::default() },
        RunConfig { check_filter: vec!["check_everything".into()], ..RunConfig::default() },
    ];
    for config in bad {
        assert!(run_all(&corpus, &config).is_err(), "{config:?}");
    }
}

#[test]
fn empty_corpus_yields_no_reports() {
    let corpus = Corpus::from_entries(Vec::new()).unwrap();
    assert!(run_all(&corpus, &small_config(0)).unwrap().is_empty());
}

#[test]
fn reports_round_trip_and_carry_the_schema() {
    let corpus = Corpus::from_entries(entries(&SUBSET)).unwrap();
    let reports = run_all(&corpus, &small_config(5)).unwrap();
    let text = to_json(&reports);
    let back: Vec<CheckReport> = serde_json::from_str(&text).unwrap();
    assert_eq!(to_json(&back), text);
    for r in &reports {
        assert_eq!(r.schema, REPORT_SCHEMA);
        assert!(!r.paper_anchor.is_empty());
        assert!(CHECK_IDS.contains(&r.check_id.as_str()));
        let expected = match (r.samples.is_empty(), r.violations()) {
            _ if r.notes.starts_with("error") => Verdict::Fail,
            (true, _) => Verdict::SkippedCapability,
            (false, 0) => Verdict::Pass,
            (false, _) => Verdict::Fail,
        };
        assert_eq!(r.verdict, expected, "{} {}", r.check_id, r.function_id);
        for s in &r.samples {
            if s.margin.is_finite() {
                assert!((s.margin - (s.rhs + r.slack() - s.lhs)).abs() <= 1e-9 * s.rhs.abs().max(1.0));
            }
        }
    }
    let counts = summarize(&reports);
    assert_eq!(counts.iter().map(|(_, c)| c.pass + c.fail + c.skipped).sum::<usize>(), reports.len());
}

#[test]
fn limit_checks_record_their_sequences() {
    let corpus = Corpus::from_entries(entries(&["rational-1"])).unwrap();
    let config = RunConfig {
        check_filter: vec!["check_vanishing_proximity".into(), "check_smt_vanishing".into()],
        ..small_config(4)
    };
    let reports = run_all(&corpus, &config).unwrap();
    let proximity = &reports[0];
    let finals = proximity.samples.iter().filter(|s| s.inputs["kind"] == "final").count();
    assert_eq!(finals, config.vanishing_radii.len());
    // the full halving sequence is kept per radius, not only the tested tail
    let sequences = proximity.parameters["sequences"].as_array().unwrap();
    assert_eq!(sequences.len(), config.vanishing_radii.len());
    for seq in sequences {
        assert_eq!(seq["etas"].as_array().unwrap().len(), config.halvings as usize + 1);
        assert_eq!(seq["sums"].as_array().unwrap().len(), config.halvings as usize + 1);
    }
    let smt = &reports[1];
    let witnesses = smt.parameters["witnesses"].as_array().unwrap();
    assert_eq!(witnesses.len(), config.smt_radii.len());
    assert!(witnesses.iter().all(|w| w["k0"].as_u64().is_some()));
}
