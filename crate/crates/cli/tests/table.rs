use proptest::prelude::*;
use shearkit::table::*;
use shearkit::CliError;

fn any_f64() -> impl Strategy<Value = f64> {
    prop_oneof![any::<f64>(), -1e3..1e3f64, Just(0.0), Just(-0.0)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn seminorm_rows_round_trip(index in prop::array::uniform8(0u32..5), value in any_f64(), b1 in any_f64(), b2 in any_f64(),
                                s in any_f64(), a in any_f64(), interior in any::<bool>()) {
        let line = SeminormRow { index, value, b: [b1, b2], s, a, interior }.format();
        prop_assert_eq!(SeminormRow::parse(&line).unwrap().format(), line);
    }

    #[test]
    fn field_and_decay_rows_round_trip(i1 in 0usize..4096, i2 in 0usize..4096, x1 in any_f64(), x2 in any_f64(), re in any_f64(), im in any_f64()) {
        let line = FieldRow { i1, i2, x: [x1, x2], re, im }.format();
        prop_assert_eq!(FieldRow::parse(&line).unwrap().format(), line);
        let line = DecayRow { radius: x1, max_abs: re }.format();
        prop_assert_eq!(DecayRow::parse(&line).unwrap().format(), line);
    }
}

#[test]
fn tables_round_trip_and_reject_bad_rows() {
    let rows = vec![
        SeminormRow { index: [0, 1, 2, 3, 0, 0, 0, 0], value: 0.25, b: [-1.0, 3.5], s: 0.0, a: -0.5, interior: true },
        SeminormRow { index: [3; 8], value: 1e-300, b: [0.1, 0.2], s: 2.5, a: 4.0, interior: false },
    ];
    let text = render(&rows);
    assert!(text.starts_with("k1,k2,l,m,alpha1,alpha2,beta,gamma,value,b1,b2,s,a,interior\n"));
    assert_eq!(parse_table::<SeminormRow>(&text).unwrap(), rows);
    assert!(matches!(DecayRow::parse("1e0"), Err(CliError::CsvParse(_))));
    assert!(matches!(DecayRow::parse("1e0,x"), Err(CliError::CsvParse(_))));
    assert!(matches!(SeminormRow::parse(&rows[0].format().replace("true", "yes")), Err(CliError::CsvParse(_))));
    assert!(matches!(parse_table::<DecayRow>("r,m\n"), Err(CliError::CsvParse(_))));
}
