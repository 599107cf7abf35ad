use ardl_core::ardl::{BoundsVerdict, EcmVerdict, Significance};
use ardl_core::diagnostics::Verdict;
use ardl_kit::report::stars;
use ardl_kit::synthetic::{reference_csv, REFERENCE_CSV, REFERENCE_SEED};
use ardl_kit::{render_text, run_reference, Report};

const GOLDEN_JSON: &str = include_str!("golden/reference_report.json");
const GOLDEN_TEXT: &str = include_str!("golden/reference_report.txt");

#[test]
fn json_matches_golden_file_byte_for_byte() {
    let json = run_reference().unwrap().to_json();
    assert!(json == GOLDEN_JSON, "report JSON drifted from tests/golden/reference_report.json");
}

#[test]
fn text_matches_golden_file() {
    assert_eq!(render_text(&run_reference().unwrap()), GOLDEN_TEXT);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = run_reference().unwrap();
    let b = run_reference().unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(render_text(&a), render_text(&b));
}

#[test]
fn json_round_trips() {
    let r = run_reference().unwrap();
    let back = Report::from_json(&r.to_json()).unwrap();
    assert_eq!(back, r);
    assert_eq!(back.to_json(), r.to_json());
}

#[test]
fn bundled_csv_is_the_generator_output() {
    assert_eq!(REFERENCE_CSV, reference_csv(REFERENCE_SEED));
}

#[test]
fn reference_run_reaches_the_expected_verdicts() {
    let r = run_reference().unwrap();
    let orders: Vec<&str> = r.unit_root.iter().map(|u| u.order.label()).collect();
    assert_eq!(orders, ["I(1)", "I(1)", "I(1)", "I(0)"]);
    assert_eq!(r.bounds.k, 3);
    assert_eq!(r.bounds.verdict, BoundsVerdict::Cointegrated(Significance::One));
    assert!(r.diagnostics.iter().all(|d| d.verdict == Verdict::Pass));
    assert_eq!(r.ecm.as_ref().unwrap().verdict, EcmVerdict::NegativeSignificant);
    assert!(r.cusum.stable);
    assert!(r.notes.is_empty(), "{:?}", r.notes);
}

#[test]
fn text_has_six_numbered_sections_and_the_verdict_line() {
    let text = render_text(&run_reference().unwrap());
    let mut from = 0;
    for n in 1..=6 {
        let at = text[from..]
            .find(&format!("\n{n}. "))
            .unwrap_or_else(|| panic!("section {n} missing or out of order"));
        from += at + 1;
    }
    let verdict = text.lines().find(|l| l.starts_with("Verdict:")).unwrap();
    assert!(verdict.contains("F = 6.622020 > upper(1%) = 4.840000"), "{verdict}");
    assert!(text.contains("CUSUM of recursive residuals"));
}

#[test]
fn stars_follow_the_conventional_thresholds() {
    assert_eq!(stars(0.0505), "*");
    assert_eq!(stars(0.0050), "***");
    assert_eq!(stars(0.0499), "**");
    assert_eq!(stars(0.01), "**");
    assert_eq!(stars(0.10), "");
    assert_eq!(stars(0.5), "");
}

#[test]
fn text_stars_agree_with_stored_pvalues() {
    let r = run_reference().unwrap();
    let text = render_text(&r);
    for row in &r.long_run.as_ref().unwrap().coefficients {
        let cell = format!("{:.6}{}", row.coef, stars(row.pvalue));
        assert!(text.contains(&cell), "missing `{cell}`");
    }
}
