use std::f64::consts::PI;

use mhessian::catalog::{catalog_function, CatalogParams, TestFunction};
use mhessian::hermitian::{eigenvalues, HermitianMatrix};
use mhessian::integration::{energy, energy_monte_carlo};
use mhessian::operator::Parameters;
use mhessian::report::{
    read_csv_rows, EntryBody, NamedValue, ReportBuilder, ReportDocument, RunConfig,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn fact(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

// e_{p,m}(c(|z|^2 - 1)) = c^{m+p} (4 pi)^n n! p! / (n+p)! for integer p
fn quadratic_energy(n: u32, m: u32, p: u32, c: f64) -> f64 {
    c.powi((m + p) as i32) * (4.0 * PI).powi(n as i32) * fact(n) * fact(p) / fact(n + p)
}

fn scaled_quadratic(n: usize, m: usize, p: f64, c: f64) -> TestFunction {
    catalog_function("quadratic_exhaustion", &CatalogParams::new(n, m, p))
        .unwrap()
        .scaled(c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn energy_of_scaled_quadratic(n in 2usize..5, mm in 1usize..5, p in 0u32..3, c in 0.1f64..4.0) {
        let m = mm.min(n);
        let u = scaled_quadratic(n, m, p as f64, c);
        let e = energy(&u, &Parameters::new(n, m, p as f64).unwrap()).unwrap().value;
        let exact = quadratic_energy(n as u32, m as u32, p, c);
        prop_assert!((e - exact).abs() <= 1e-9 * exact, "{} vs {}", e, exact);
    }

    #[test]
    fn spectrum_is_unitarily_invariant(
        d in prop::collection::vec(-3.0f64..3.0, 3),
        v in prop::collection::vec(-1.0f64..1.0, 6),
    ) {
        // A = U diag(d) U with the Householder reflection U = I - 2 w w^* / |w|^2
        let w: Vec<Complex64> = v.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
        let norm2: f64 = w.iter().map(|z| z.norm_sqr()).sum();
        prop_assume!(norm2 > 1e-3);
        let n = 3;
        let u = |j: usize, k: usize| {
            let id = if j == k { 1.0 } else { 0.0 };
            Complex64::new(id, 0.0) - w[j] * w[k].conj() * (2.0 / norm2)
        };
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            for k in 0..n {
                entries[j * n + k] = (0..n).map(|l| u(j, l) * d[l] * u(l, k)).sum();
            }
        }
        let (a, _) = HermitianMatrix::symmetrize(n, entries).unwrap();
        let got = eigenvalues(&a).unwrap();
        let mut want = d.clone();
        want.sort_by(f64::total_cmp);
        let mut have = got.values().to_vec();
        have.sort_by(f64::total_cmp);
        for (x, y) in have.iter().zip(&want) {
            prop_assert!((x - y).abs() < 1e-10, "{:?} vs {:?}", have, want);
        }
    }
}

#[test]
fn monte_carlo_agrees_with_quadrature_for_a_polynomial() {
    let params = Parameters::new(2, 1, 1.0).unwrap();
    let mut cp = CatalogParams::new(2, 1, 1.0);
    cp.coeffs = Some(vec![0.5, 0.25, 0.125]);
    let u = catalog_function("smooth_radial_polynomial", &cp).unwrap();
    let quad = energy(&u, &params).unwrap().value;
    let mc = energy_monte_carlo(&u, &params, 11, 400_000).unwrap();
    assert!(
        (mc.value - quad).abs() <= 4.0 * mc.abs_error_estimate,
        "{} +- {} vs {quad}",
        mc.value,
        mc.abs_error_estimate
    );
}

#[test]
fn report_round_trips_through_json_and_csv() {
    let params = Parameters::new(2, 1, 0.0).unwrap();
    let mut b = ReportBuilder::new(RunConfig::new("energy", params));
    for c in [0.5, 1.0 / 3.0, 2.0] {
        let u = scaled_quadratic(2, 1, 0.0, c);
        b.run(format!("c={c}"), || {
            Ok(EntryBody::Value(NamedValue {
                label: u.label().to_string(),
                params,
                quantity: "energy".into(),
                value: energy(&u, &params)?,
            }))
        })
        .unwrap();
    }
    let doc = b.finish().unwrap();
    let back = ReportDocument::from_json(&doc.to_json_pretty().unwrap()).unwrap();
    assert_eq!(back, doc);
    assert_eq!(back.compute_hash().unwrap(), doc.determinism_hash);

    let mut buf = Vec::new();
    doc.write_csv(&mut buf).unwrap();
    assert_eq!(read_csv_rows(buf.as_slice()).unwrap(), doc.rows);
}
