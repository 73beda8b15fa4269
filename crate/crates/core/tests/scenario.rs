use an_wiretap::error::Error;
use an_wiretap::scenario::{Power, ScenarioFile};
use proptest::prelude::*;

const BASE: &str = r#"
[system]
p_a = { db = 10.0 }
p_b = { linear = 10.0 }
sigma2_a = { linear = 0.1 }
sigma2_b = { db = -10.0 }
sigma2_e = { linear = 0.1 }

[design]
alpha = 0.8
r_b = 2.0
r_s = 1.0
"#;

fn power() -> impl Strategy<Value = Power> {
    prop_oneof![(-30.0..30.0f64).prop_map(Power::Db), (1e-3..1e3f64).prop_map(Power::Linear)]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn scenarios_round_trip(p_a in power(), p_b in power(), s_a in power(), s_b in power(), s_e in power(),
                            alpha in 0.01..1.0f64, r_s in 0.1..3.0f64, gap in 0.0..3.0f64, seed in any::<u64>()) {
        let text = format!(
            "[system]\np_a = {}\np_b = {}\nsigma2_a = {}\nsigma2_b = {}\nsigma2_e = {}\n\
             [design]\nalpha = {alpha}\nr_b = {}\nr_s = {r_s}\n[sim]\nseed = {seed}\nblocks = 10\n",
            inline(&p_a), inline(&p_b), inline(&s_a), inline(&s_b), inline(&s_e), r_s + gap
        );
        let s = ScenarioFile::parse(&text).unwrap();
        let again = ScenarioFile::parse(&s.to_toml().unwrap()).unwrap();
        prop_assert_eq!(&s, &again);
        prop_assert_eq!(s.params(), s.normalized().params());
    }
}

fn inline(p: &Power) -> String {
    match p {
        Power::Db(v) => format!("{{ db = {v:?} }}"),
        Power::Linear(v) => format!("{{ linear = {v:?} }}"),
    }
}

#[test]
fn db_tags_convert_to_linear() {
    let s = ScenarioFile::parse(BASE).unwrap();
    let p = s.params();
    assert!((p.p_a - 10.0).abs() < 1e-12);
    assert!((p.sigma2_b - 0.1).abs() < 1e-15);
    let conv = s.unit_conversions();
    assert!(conv.iter().any(|(k, v)| k == "p_a" && v.contains("dB")));
}

#[test]
fn unknown_keys_report_their_position() {
    let text = BASE.replace("r_s = 1.0", "r_s = 1.0\nbogus = 3");
    match ScenarioFile::parse(&text) {
        Err(Error::Scenario { location, message }) => {
            assert_eq!(location, "line 13, column 1");
            assert!(message.contains("bogus"), "{message}");
        }
        other => panic!("expected a scenario error, got {other:?}"),
    }
}

#[test]
fn untagged_powers_are_rejected() {
    let text = BASE.replace("p_a = { db = 10.0 }", "p_a = 10.0");
    assert!(matches!(ScenarioFile::parse(&text), Err(Error::Scenario { .. })));
    let both = BASE.replace("p_a = { db = 10.0 }", "p_a = { db = 10.0, linear = 10.0 }");
    assert!(ScenarioFile::parse(&both).is_err());
}

#[test]
fn invalid_values_are_rejected() {
    assert!(ScenarioFile::parse(&BASE.replace("alpha = 0.8", "alpha = 1.5")).is_err());
    assert!(ScenarioFile::parse(&BASE.replace("r_b = 2.0", "r_b = 0.5")).is_err());
    assert!(ScenarioFile::parse(&BASE.replace("sigma2_b = { db = -10.0 }", "sigma2_b = { linear = 0.0 }")).is_err());
    let sweep = format!("{BASE}\n[sweep]\nvariable = \"epsilon\"\nstart = 0.1\nstop = 1.0\ncount = 3\n");
    assert!(ScenarioFile::parse(&sweep).is_err(), "epsilon sweep without constraints");
}

#[test]
fn db_sweeps_expand_per_point() {
    let text = format!("{BASE}\n[sweep]\nvariable = \"p_a\"\nstart = 0.0\nstop = 20.0\ncount = 3\nunit = \"db\"\n");
    let s = ScenarioFile::parse(&text).unwrap();
    let pts = s.points().unwrap();
    let p_a: Vec<f64> = pts.iter().map(|p| p.params.p_a).collect();
    for (got, want) in p_a.iter().zip([1.0, 10.0, 100.0]) {
        assert!((got - want).abs() < 1e-9 * want);
    }
}

#[test]
fn shipped_scenarios_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        ScenarioFile::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        n += 1;
    }
    assert!(n >= 5);
}
