use proptest::prelude::*;
use thetalift::automorphic::{CoefficientSeries, Parity, SeriesKind};
use thetalift::special::SpectralParam;
use thetalift_cli::coeffs::{strip_comments, CoeffFile, IngestError, Kind};

#[test]
fn singleton_maass_file() {
    let f = CoeffFile::parse("kind=maass t=9.533695\n1 1.0\n").unwrap();
    assert_eq!(f.kind, Kind::Maass);
    assert_eq!(f.len(), 1);
    let s = f.to_series().unwrap();
    assert_eq!(s.kind(), SeriesKind::MaassIntegral);
    assert_eq!(s.get(1), 1.0);
    assert_eq!(s.parity(), Parity::Even);
}

#[test]
fn header_fields() {
    let f = CoeffFile::parse("kind=half t=0.25i\n1 0.5\n-3 1\n").unwrap();
    assert_eq!(f.t, SpectralParam::Imaginary(0.25));
    assert_eq!(f.kind, Kind::Half);
    let odd = CoeffFile::parse("t=9.5 parity=odd kind=maass\n1 1\n").unwrap();
    assert_eq!(odd.parity, Parity::Odd);
    for bad in ["kind=maass\n1 1\n", "t=9.5\n1 1\n", "kind=maass t=9.5 weight=2\n", "kind=cusp t=1\n", "kind=maass t=x\n"] {
        assert!(matches!(CoeffFile::parse(bad), Err(IngestError::Malformed { line: 1, .. })), "{bad:?}");
    }
}

#[test]
fn kohnen_violation_names_the_invariant() {
    match CoeffFile::parse("kind=half t=9.5\n1 0.5\n6 0.25\n") {
        Err(IngestError::Invariant { invariant, detail }) => {
            assert!(invariant.contains("mod 4"), "{invariant}");
            assert!(detail.contains('6'), "{detail}");
        }
        other => panic!("{other:?}"),
    }
    let parity = CoeffFile::parse("kind=half t=9.5 parity=odd\n1 1\n");
    assert!(matches!(parity, Err(IngestError::Invariant { .. })));
    let nonpositive = CoeffFile::parse("kind=maass t=9.5\n0 1\n");
    assert!(matches!(nonpositive, Err(IngestError::Invariant { .. })));
}

#[test]
fn malformed_lines_report_their_number() {
    let cases = [
        ("kind=maass t=9.5\n1 1.0\n\n# c\n2 x\n", 5),
        ("kind=maass t=9.5\n1 1.0 3\n", 2),
        ("kind=maass t=9.5\n1\n", 2),
        ("kind=maass t=9.5\n1.5 2\n", 2),
        ("kind=maass t=9.5\n1 1\n1 2\n", 3),
        ("kind=maass t=9.5\n1 inf\n", 2),
        ("kind=maass t=9.5\n1 NaN\n", 2),
    ];
    for (src, want) in cases {
        match CoeffFile::parse(src) {
            Err(IngestError::Malformed { line, .. }) => assert_eq!(line, want, "{src:?}"),
            other => panic!("{src:?}: {other:?}"),
        }
    }
    assert!(matches!(CoeffFile::parse("# only a comment\n"), Err(IngestError::MissingHeader)));
}

#[test]
fn serialization_drops_only_comments() {
    let src = "# header comment\nkind=maass t=9.53369526135355755 parity=odd  # R\n\n1 1.0\n2 -1.068333551223571 # λ(2)\n3   -0.45619\n";
    let f = CoeffFile::parse(src).unwrap();
    assert_eq!(f.serialize(), strip_comments(src));
    assert_eq!(CoeffFile::parse(&f.serialize()).unwrap(), f);
}

#[test]
fn fixture_round_trips() {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/maass_r9.txt");
    let src = std::fs::read_to_string(&path).unwrap();
    let f = CoeffFile::read(&path).unwrap();
    assert_eq!(f.len(), 10);
    assert_eq!(f.serialize(), strip_comments(&src));
}

fn admissible() -> impl Strategy<Value = i64> {
    (-500i64..500).prop_map(|k| if k.rem_euclid(2) == 0 { 2 * k } else { 2 * k - 1 }).prop_filter("nonzero", |n| *n != 0)
}

proptest! {
    #[test]
    fn half_series_round_trip(
        coeffs in prop::collection::btree_map(admissible(), -1e6f64..1e6, 0..40),
        t in 0.1f64..40.0,
    ) {
        let s = CoefficientSeries::half_integral(SpectralParam::real(t).unwrap(), coeffs.clone()).unwrap();
        let file = CoeffFile::from_series(&s);
        let text = file.serialize();
        let back = CoeffFile::parse(&text).unwrap();
        prop_assert_eq!(back.serialize(), text);
        let s2 = back.to_series().unwrap();
        prop_assert_eq!(s2.t(), s.t());
        prop_assert_eq!(s2.coefficients(), s.coefficients());
    }

    #[test]
    fn maass_series_round_trip(
        values in prop::collection::vec(-10f64..10.0, 1..30),
        t in 0.1f64..40.0,
        odd in any::<bool>(),
    ) {
        let pairs: Vec<(u64, f64)> =
            values.iter().enumerate().map(|(i, v)| (i as u64 + 1, if i == 0 { 1.0 } else { *v })).collect();
        let parity = if odd { Parity::Odd } else { Parity::Even };
        let s = CoefficientSeries::maass(SpectralParam::real(t).unwrap(), pairs).unwrap().with_parity(parity).unwrap();
        let back = CoeffFile::parse(&CoeffFile::from_series(&s).serialize()).unwrap().to_series().unwrap();
        prop_assert_eq!(back.parity(), parity);
        prop_assert_eq!(back.coefficients(), s.coefficients());
    }

    #[test]
    fn garbage_never_panics(src in "[ -~\n]{0,200}") {
        let _ = CoeffFile::parse(&src);
    }
}
