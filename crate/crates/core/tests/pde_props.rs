use cpldpc_core::pde::{
    alpha_discriminant, alpha_discriminant_forms, alpha_substitution, classify_point, classify_point_f64, discriminant,
    expansion_audit, pde_coefficients, pde_residual, printed_f, printed_f_roots, printed_nature,
    published_alpha_one_root, published_case_nature, region_map, residual_polynomial, Nature, RootLoc, Window,
};
use cpldpc_core::poly::{Poly1, Poly3};
use cpldpc_core::rational::{frac, int};
use cpldpc_core::{BaseConfig, CoeffTable, EnsembleParams, Rational};
use num_traits::Zero;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-200i64..=200, 1i64..=40).prop_map(|(p, q)| frac(p, q))
}

fn checks(m: u32) -> EnsembleParams {
    EnsembleParams::new(16 * u64::from(m), frac(15, 16)).unwrap()
}

/// `B² - AC` straight from the coefficient list.
fn disc_oracle(y: &Rational, z: &Rational) -> Rational {
    let a = y * y * (y - int(1));
    let b = frac(1, 2) * y * (int(2) * z * z - y - z);
    let c = z * (z * z - y);
    &b * &b - a * c
}

fn poly3() -> impl Strategy<Value = Poly3> {
    prop::collection::vec(((0u32..4, 0u32..4, 0u32..4), rational()), 0..10)
        .prop_map(|terms| Poly3::from_terms(terms.into_iter().map(|((v, t, s), c)| ([v, t, s], c))))
}

#[test]
fn coefficient_examples() {
    let c = pde_coefficients(&checks(5));
    assert_eq!(c.a.eval(&[int(2), int(9)]), int(4));
    assert_eq!(c.f.eval(&[int(0), int(1)]), int(20));
    assert_eq!(c.b.eval(&[int(2), int(1)]), int(-1));
}

#[test]
fn discriminant_examples() {
    let d = discriminant(&checks(5));
    assert_eq!(d.eval(&[int(2), int(1)]), int(5));
    assert_eq!(d.eval(&[int(3), int(2)]), frac(-63, 4));
    assert_eq!(d.eval(&[int(2), int(2)]), int(0));
    assert_eq!(classify_point(&int(2), &int(1)).nature, Nature::Hyperbolic);
    assert_eq!(classify_point(&int(2), &int(2)).nature, Nature::Parabolic);
    assert_eq!(classify_point(&int(3), &int(2)).nature, Nature::Elliptic);
}

#[test]
fn float_classification_needs_opt_in_tolerance() {
    assert_eq!(classify_point_f64(2.0, 1.0, 0.0).0, Nature::Hyperbolic);
    assert_eq!(classify_point_f64(3.0, 2.0, 0.0).0, Nature::Elliptic);
    let (nature, value) = classify_point_f64(2.0, 2.0 + 1e-9, 0.0);
    assert!(value != 0.0 && value.abs() < 1e-6);
    assert_ne!(nature, Nature::Parabolic);
    assert_eq!(classify_point_f64(2.0, 2.0 + 1e-9, 1e-6).0, Nature::Parabolic);
}

#[test]
fn region_grid() {
    let points = region_map((&int(1), &int(4)), (&int(1), &int(4)), 4).unwrap();
    assert_eq!(points.len(), 16);
    let count = |n| points.iter().filter(|p| p.nature == n).count();
    assert_eq!((count(Nature::Hyperbolic), count(Nature::Parabolic), count(Nature::Elliptic)), (10, 4, 2));
    let zero_row = region_map((&int(0), &int(1)), (&int(-3), &int(3)), 7).unwrap();
    assert!(zero_row.iter().filter(|p| p.y.is_zero()).all(|p| p.nature == Nature::Parabolic));
    assert!(region_map((&int(0), &int(1)), (&int(0), &int(1)), 1).is_err());
}

#[test]
fn alpha_examples() {
    assert_eq!(alpha_discriminant(&int(1)), int(0));
    assert_eq!(alpha_discriminant(&int(0)), int(-7));
    assert_eq!(alpha_discriminant(&int(2)), int(25));
    assert!(alpha_substitution(&int(0)).exact.is_zero());
}

#[test]
fn printed_alpha_one_has_double_root_at_one() {
    let roots = printed_f_roots(&int(1));
    assert!(roots.double);
    assert_eq!(roots.roots, vec![RootLoc::Exact(int(1))]);
    assert_eq!(printed_f(&int(1)), Poly1::from_terms([([2], int(3)), ([1], int(-6)), ([0], int(3))]));
    assert_ne!(published_alpha_one_root(), int(1));
    // The exact substitution vanishes identically on y = z.
    assert!(alpha_substitution(&int(1)).exact.is_zero());
}

#[test]
fn printed_form_differs_from_exact_substitution() {
    let sub = alpha_substitution(&int(5));
    assert!(!sub.agrees());
    assert_eq!(sub.exact.dense(), [0, 0, 0, 0, 400, 2000, -400].map(int));
    assert_eq!(sub.printed.dense(), [0, 0, 0, 0, 775, -450, -25].map(int));
}

#[test]
fn printed_sign_pattern_matches_published_cases() {
    let zs: Vec<Rational> = (-40..=40).filter(|&k| k != 0).map(|k| frac(k, 8)).collect();
    for alpha in [frac(1, 2), int(2), int(4), int(5)] {
        for z in &zs {
            if let Some(published) = published_case_nature(&alpha, z) {
                assert_eq!(printed_nature(&alpha, z), published, "alpha={alpha} z={z}");
            }
        }
    }
    assert_eq!(printed_nature(&int(4), &frac(7, 5)), Nature::Parabolic);
    assert_eq!(printed_nature(&int(4), &int(2)), Nature::Elliptic);
    assert_eq!(printed_nature(&int(4), &int(1)), Nature::Hyperbolic);
    // alpha = 1: printed f is parabolic at its own double root, hyperbolic elsewhere.
    for z in &zs {
        let expected = if *z == int(1) { Nature::Parabolic } else { Nature::Hyperbolic };
        assert_eq!(printed_nature(&int(1), z), expected);
    }
}

#[test]
fn audit_rows_are_consistent() {
    let points: Vec<(Rational, Rational)> = vec![(int(2), int(1)), (int(0), int(3)), (frac(1, 3), int(0))];
    let rows = expansion_audit(&points);
    for row in &rows {
        assert_eq!(row.exact, int(4) * disc_oracle(&row.y, &row.z));
    }
    assert!(rows[2].alpha_form.is_none());
    assert!(rows[1].first_line_agrees() && rows[1].expansion_agrees());
}

#[test]
fn empty_table_residual_is_zero() {
    assert!(residual_polynomial(&checks(4), &Poly3::zero()).is_zero());
    let table = CoeffTable::fill(checks(5), 6, BaseConfig::Default).unwrap();
    let report = pde_residual(&table, Window { vmax: 6, tmax: 5, smax: 5 }).unwrap();
    assert!(report.interior_checked > 0);
    assert!(pde_residual(&table, Window { vmax: 7, tmax: 5, smax: 5 }).is_err());
}

proptest! {
    #[test]
    fn alpha_forms_agree(alpha in rational()) {
        let forms = alpha_discriminant_forms(&alpha);
        let cubic = int(4) * &alpha * &alpha * &alpha - int(3) * &alpha * &alpha + int(6) * &alpha - int(7);
        prop_assert_eq!(&forms.expanded, &forms.factored);
        prop_assert_eq!(forms.factored, cubic);
    }

    #[test]
    fn discriminant_matches_oracle(y in rational(), z in rational()) {
        let point = classify_point(&y, &z);
        prop_assert_eq!(&point.discriminant, &disc_oracle(&y, &z));
        prop_assert_eq!(point.nature, Nature::of_rational(&point.discriminant));
    }

    #[test]
    fn y_zero_line_is_parabolic(z in rational()) {
        prop_assert_eq!(classify_point(&int(0), &z).nature, Nature::Parabolic);
    }

    #[test]
    fn discriminant_is_k_independent(m1 in 1u32..40, m2 in 1u32..40) {
        prop_assert_eq!(discriminant(&checks(m1)), discriminant(&checks(m2)));
    }

    #[test]
    fn exact_substitution_matches_pointwise(alpha in rational(), z in rational()) {
        let sub = alpha_substitution(&alpha);
        let y = &alpha * &z;
        prop_assert_eq!(sub.exact.eval(&[z.clone()]), int(4) * disc_oracle(&y, &z));
    }

    #[test]
    fn residual_is_linear(m in 1u32..6, g in poly3(), h in poly3(), c in rational()) {
        let params = checks(m);
        let sum = &g + &h.scale(&c);
        let lhs = residual_polynomial(&params, &sum);
        let rhs = &residual_polynomial(&params, &g) + &residual_polynomial(&params, &h).scale(&c);
        prop_assert_eq!(lhs, rhs);
    }
}
