use num_complex::Complex64;
use proptest::prelude::*;

use thermolimit_cli::config::Format;
use thermolimit_cli::table::{Column, ColumnKind, Metadata, ResultTable, Value};

fn kind() -> impl Strategy<Value = ColumnKind> {
    prop_oneof![
        Just(ColumnKind::Real),
        Just(ColumnKind::Integer),
        Just(ColumnKind::Complex),
        Just(ColumnKind::Bool),
        Just(ColumnKind::Text),
    ]
}

fn real() -> impl Strategy<Value = f64> {
    prop_oneof![
        8 => any::<f64>(),
        1 => Just(f64::INFINITY),
        1 => Just(f64::NEG_INFINITY),
        1 => Just(f64::NAN),
        1 => Just(-0.0),
    ]
}

fn value(kind: ColumnKind) -> BoxedStrategy<Value> {
    match kind {
        ColumnKind::Real => real().prop_map(Value::Real).boxed(),
        ColumnKind::Integer => any::<i64>().prop_map(Value::Integer).boxed(),
        ColumnKind::Complex => (real(), real()).prop_map(|(a, b)| Value::Complex(Complex64::new(a, b))).boxed(),
        ColumnKind::Bool => any::<bool>().prop_map(Value::Bool).boxed(),
        ColumnKind::Text => "[a-z ,\"\n]{1,12}".prop_map(Value::Text).boxed(),
    }
}

fn table() -> impl Strategy<Value = ResultTable> {
    prop::collection::vec(kind(), 1..6).prop_flat_map(|kinds| {
        let row: Vec<BoxedStrategy<Value>> = kinds.iter().map(|&k| value(k)).collect();
        prop::collection::vec(row, 0..8).prop_map(move |rows| {
            let columns = kinds.iter().enumerate().map(|(i, &k)| Column::new(&format!("c{i}"), k)).collect();
            let mut t = ResultTable::new("exp", "stage", columns);
            for r in rows {
                t.push(r).unwrap();
            }
            t
        })
    })
}

fn metadata(t: &ResultTable) -> Metadata {
    Metadata {
        experiment: t.experiment.clone(),
        stage: t.stage.clone(),
        version: "0.1.0".into(),
        config: "{\"experiment\": \"validate-all\"}\n".into(),
        seed: 3,
        format: Format::Json,
        wall_clock_seconds: 0.25,
        columns: t.columns().to_vec(),
    }
}

proptest! {
    #[test]
    fn csv_round_trip(t in table()) {
        let bytes = t.to_csv().unwrap();
        let back = ResultTable::from_csv(&t.experiment, &t.stage, t.columns().to_vec(), &bytes).unwrap();
        prop_assert!(back.same(&t), "{t:?}\n{back:?}");
    }

    #[test]
    fn json_round_trip(t in table()) {
        let meta = metadata(&t);
        let (back, meta_back) = ResultTable::from_json(&t.to_json(&meta).unwrap()).unwrap();
        prop_assert!(back.same(&t), "{t:?}\n{back:?}");
        prop_assert_eq!(meta_back, meta);
    }

    #[test]
    fn reals_use_seventeen_significant_digits(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let mut t = ResultTable::new("e", "s", vec![Column::new("x", ColumnKind::Real)]);
        t.push(vec![x.into()]).unwrap();
        let text = String::from_utf8(t.to_csv().unwrap()).unwrap();
        let field = text.lines().nth(1).unwrap();
        let mantissa = field.trim_start_matches('-').split('e').next().unwrap();
        prop_assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
        prop_assert_eq!(field.parse::<f64>().unwrap().to_bits(), x.to_bits());
    }
}

#[test]
fn complex_columns_split_into_re_and_im() {
    let mut t = ResultTable::new("e", "s", vec![Column::new("z", ColumnKind::Complex)]);
    t.push(vec![Complex64::new(1.0, -2.0).into()]).unwrap();
    let text = String::from_utf8(t.to_csv().unwrap()).unwrap();
    assert!(text.starts_with("z_re,z_im\n"));
}
