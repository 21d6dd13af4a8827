use expanderlab::export::{contour_plot, format_number, line_plot, Cell, Series, Table};

fn parse_csv(text: &str) -> Vec<Vec<String>> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}
use proptest::prelude::*;

#[test]
fn csv_header_and_quoting() {
    let mut t = Table::new(["k", "label", "value"]);
    t.push(vec![Cell::from(1usize), Cell::from("plain"), Cell::from(0.5)]);
    t.push(vec![Cell::from(2usize), Cell::from("a, \"b\""), Cell::from(-1e-300)]);
    let text = t.to_csv();
    assert!(text.starts_with("k,label,value\r\n"));
    assert!(text.contains("\"a, \"\"b\"\"\""));
    let rows = parse_csv(&text);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2][1], "a, \"b\"");
    assert_eq!(rows[1][2].parse::<f64>().unwrap(), 0.5);
}

#[test]
fn numbers_have_seventeen_digits() {
    assert_eq!(format_number(0.1), "1.0000000000000001e-1");
    assert_eq!(format_number(f64::NAN), "NaN");
    assert_eq!(format_number(f64::NEG_INFINITY), "-inf");
}

#[test]
fn csv_is_deterministic() {
    let x = [0.0, 0.25, 0.5];
    let y = [1.0, 2.0, 3.0];
    let a = Table::from_columns(&["x", "y"], &[&x, &y]).to_csv();
    let b = Table::from_columns(&["x", "y"], &[&x, &y]).to_csv();
    assert_eq!(a, b);
}

#[test]
fn svg_line_plot_structure() {
    let x: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
    let y: Vec<f64> = x.iter().map(|v| v * v).collect();
    let svg = line_plot("profile", "r", "u", &[Series { label: "u".into(), x: &x, y: &y }]);
    assert!(svg.starts_with("<svg"));
    assert!(svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<polyline").count(), 1);
}

#[test]
fn svg_contours_of_cone() {
    let xs: Vec<f64> = (0..21).map(|i| -1.0 + 0.1 * i as f64).collect();
    let values: Vec<f64> = xs.iter().flat_map(|y| xs.iter().map(move |x| x.hypot(*y))).collect();
    let svg = contour_plot("cone", &xs, &xs, &values, 5);
    assert_eq!(svg.matches("<path").count(), 5);
    let flat = contour_plot("flat", &xs, &xs, &vec![1.0; 441], 5);
    assert_eq!(flat.matches("<path").count(), 0);
}

proptest! {
    #[test]
    fn numbers_round_trip(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
        prop_assert_eq!(format_number(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn text_round_trips(s in "[ -~\n]{0,20}") {
        let mut t = Table::new(["a", "b"]);
        t.push(vec![Cell::from(s.as_str()), Cell::from(1.5)]);
        let rows = parse_csv(&t.to_csv());
        prop_assert_eq!(&rows[1][0], &s);
    }
}
