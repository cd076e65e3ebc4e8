//! Property tests: quadrature exactness on random trigonometric
//! polynomials and bit-exact JSON round-trips of reports.

use proptest::prelude::*;
use qfe::cli::{Report, Table};
use qfe::spectra::FiberGrid;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The uniform n-node rule integrates any trigonometric polynomial of
    /// degree < n to its zeroth Fourier coefficient within 1e−12.
    #[test]
    fn quadrature_exact_on_trig_polynomials(
        n_nodes in 4usize..96,
        c0 in -2.0f64..2.0,
        coeffs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..12),
    ) {
        prop_assume!(coeffs.len() < n_nodes);
        let grid = FiberGrid::uniform(n_nodes).unwrap();
        let values: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&t| {
                let mut v = c0;
                for (p, &(a, b)) in coeffs.iter().enumerate() {
                    let k = (p + 1) as f64;
                    v += a * (k * t).cos() + b * (k * t).sin();
                }
                v
            })
            .collect();
        let integral = grid.integrate(&values).unwrap();
        prop_assert!((integral - c0).abs() <= 1e-12);
    }

    /// Serializing a report to JSON and back preserves every numeric field
    /// bit for bit.
    #[test]
    fn report_round_trip_is_bit_exact(
        seed in any::<u64>(),
        values in proptest::collection::vec(
            (0.0f64..1e6, proptest::num::f64::NORMAL | proptest::num::f64::ZERO),
            0..6,
        ),
        rows in proptest::collection::vec(
            proptest::collection::vec(proptest::num::f64::NORMAL | proptest::num::f64::ZERO, 3),
            0..8,
        ),
    ) {
        let mut report = Report::new("prop", "rate", seed);
        for (i, (tol, v)) in values.iter().enumerate() {
            report.push_value(&format!("v{i}"), *v, "nats", *tol, "empirical");
        }
        report.tables.push(Table {
            name: "t".into(),
            columns: vec!["a".into(), "b".into(), "c".into()],
            rows: rows.clone(),
        });
        let text = serde_json::to_string(&report).unwrap();
        let back: Report = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&report, &back);
        for (orig, round) in report.values.iter().zip(back.values.iter()) {
            prop_assert_eq!(orig.value.to_bits(), round.value.to_bits());
        }
        for (orig, round) in report.tables[0].rows.iter().zip(back.tables[0].rows.iter()) {
            for (a, b) in orig.iter().zip(round.iter()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
