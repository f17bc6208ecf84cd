use affsurf::classify::{
    classify_type_a, classify_type_b, linear_transform, linear_transform_exact, scale_transform, shear_transform,
    ScaleFactor, TypeAOptions, Verdict, Witness,
};
use affsurf::{get_model, ChristoffelField, Coefficients, ModelName, Point2, Rational};
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn canonical(name: &ModelName) -> [Rational; 6] {
    get_model(name).unwrap().field.coefficients().unwrap().exact().clone()
}

fn nonzero_ratio() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=7).prop_filter("nonzero", |(n, _)| *n != 0).prop_map(|(n, d)| q(n, d))
}

fn type_b_models() -> Vec<ModelName> {
    let mut v = vec![ModelName::L2, ModelName::H2, ModelName::S5];
    for c in [q(1, 1), q(-1, 1), q(-1, 2), q(2, 3), q(-7, 4)] {
        v.push(ModelName::S4(c));
    }
    v
}

/// Christoffel symbols of the chart `w = W x` at `W p`, from those at `p`,
/// via the tensor transformation law on `christoffel_at`.
fn numeric_pullback(field: &ChristoffelField, w: [[f64; 2]; 2], p: Point2) -> [f64; 6] {
    let g = field.christoffel_at(p).unwrap();
    let six = [g[0][0][0], g[0][0][1], g[0][1][0], g[0][1][1], g[1][1][0], g[1][1][1]];
    linear_transform(&six, w)
}

#[test]
fn shear_agrees_with_change_of_variables() {
    // w¹ = x¹, w² = 2x¹ + x²: the Type B chart keeps Γ = D/w¹ with w¹ = x¹.
    let c = Coefficients::from_ints([0, 0, 0, 0, 1, 0]);
    let d = shear_transform(c.exact(), &q(2, 1));
    let field = ChristoffelField::TypeB(c);
    for p in [Point2::new(1.0, 0.0), Point2::new(2.5, -1.0)] {
        let got = numeric_pullback(&field, [[1.0, 0.0], [2.0, 1.0]], p);
        for s in 0..6 {
            let want = d[s].to_f64().unwrap() / p.x1;
            assert!((got[s] - want).abs() < 1e-12);
        }
    }
}

#[test]
fn inverse_shear_is_affinely_equivalent() {
    let l2 = canonical(&ModelName::L2);
    let back = shear_transform(&shear_transform(&l2, &q(1, 1)), &q(-1, 1));
    assert_eq!(back, l2);
}

#[test]
fn s4_parameter_survives_scaling() {
    for c in [q(3, 1), q(-2, 5)] {
        let s4 = canonical(&ModelName::S4(c.clone()));
        let input = scale_transform(&shear_transform(&s4, &q(4, 3)), &q(-5, 2));
        assert_eq!(classify_type_b(&Coefficients::new(input)).verdict, Verdict::S4 { c });
    }
}

#[test]
fn impossible_endpoints_are_rejected() {
    // Case 1b and 2b endpoints: ρ vanishes.
    for c in [[1, 0, 0, 0, 1, 0], [1, 0, 0, 0, -1, 0]] {
        assert_eq!(classify_type_b(&Coefficients::from_ints(c)).verdict, Verdict::Flat, "{c:?}");
    }
    // Case 3 candidates: C22¹ = 0, C22² = 1.
    for c in [[0, 0, 1, 0, 0, 1], [0, 0, 1, -1, 0, 1], [0, 0, 0, 0, 0, 1], [-1, 0, 0, -1, 0, 1]] {
        assert_eq!(classify_type_b(&Coefficients::from_ints(c)).verdict, Verdict::NotLocallySymmetric, "{c:?}");
    }
    // Case 4 with C12¹ ≠ 0 or C11¹ ≠ −1.
    for c in [[-1, 0, 1, 1, 0, 0], [2, 0, 0, 1, 0, 0]] {
        assert_eq!(classify_type_b(&Coefficients::from_ints(c)).verdict, Verdict::NotLocallySymmetric, "{c:?}");
    }
}

#[test]
fn type_b_verdicts_match_catalog() {
    for name in type_b_models() {
        let nf = classify_type_b(&Coefficients::new(canonical(&name)));
        assert_eq!(nf.verdict.model(), Some(name.clone()));
        assert_eq!(nf.residual, 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn type_b_round_trip(model in 0usize..8, delta in nonzero_ratio(), gamma in nonzero_ratio(), a in nonzero_ratio()) {
        let name = type_b_models()[model].clone();
        let m = canonical(&name);
        let a = if a < Rational::zero() { -a } else { a };
        // The a-homothety leaves Type B coefficients unchanged.
        let input = scale_transform(&shear_transform(&m, &delta), &gamma);
        let field_in = ChristoffelField::TypeB(Coefficients::new(input.clone()));
        let x = Point2::new(1.3, 0.4);
        let scaled = Point2::new(a.to_f64().unwrap() * x.x1, a.to_f64().unwrap() * x.x2);
        let g1 = field_in.christoffel_at(x).unwrap();
        let g2 = field_in.christoffel_at(scaled).unwrap();
        prop_assert!((g1[1][1][0] - a.to_f64().unwrap() * g2[1][1][0]).abs() < 1e-9);

        let nf = classify_type_b(&Coefficients::new(input.clone()));
        prop_assert_eq!(nf.verdict.model(), Some(name));
        let Some(Witness::ShearScale(w)) = nf.witness else { panic!("shear witness expected") };
        prop_assert!(matches!(w.gamma, ScaleFactor::Rational(_)));
        prop_assert_eq!(w.apply_exact(&input).unwrap(), m);
    }

    #[test]
    fn type_b_irrational_scale_round_trip(model in 0usize..2, delta in nonzero_ratio(), k in 2i64..40) {
        // Rescaling x² by 1/√k multiplies C22¹ of H2 or L2 by k and leaves
        // the other (even-exponent or zero) slots alone.
        let m = canonical(&type_b_models()[model]);
        let mut scaled = m.clone();
        scaled[4] = &scaled[4] * Rational::from_integer(k.into());
        let input = shear_transform(&scaled, &delta);
        let nf = classify_type_b(&Coefficients::new(input.clone()));
        let Some(Witness::ShearScale(w)) = nf.witness else { panic!("shear witness expected") };
        prop_assert_eq!(w.gamma.squared(), Rational::from_integer(k.into()));
        prop_assert_eq!(w.apply_exact(&input).unwrap(), m);
    }
}

fn rational_matrix() -> impl Strategy<Value = [[Rational; 2]; 2]> {
    proptest::array::uniform4((-4i64..=4, 1i64..=3))
        .prop_map(|e| [[q(e[0].0, e[0].1), q(e[1].0, e[1].1)], [q(e[2].0, e[2].1), q(e[3].0, e[3].1)]])
        .prop_filter("invertible and tame", |w| {
            let det = &w[0][0] * &w[1][1] - &w[0][1] * &w[1][0];
            !det.is_zero() && det.to_f64().unwrap().abs() > 0.2
        })
}

#[test]
fn canonical_s1_identity_witness() {
    let nf = classify_type_a(&Coefficients::new(canonical(&ModelName::S1)), &TypeAOptions::default()).unwrap();
    assert_eq!(nf.verdict, Verdict::TypeAS1);
    let Some(Witness::Linear(w)) = nf.witness else { panic!() };
    assert!(nf.residual < 1e-12);
    assert!(
        (w[0][0] - 1.0).abs() < 1e-12
            && w[0][1].abs() < 1e-12
            && w[1][0].abs() < 1e-12
            && (w[1][1] - 1.0).abs() < 1e-12
    );
}

#[test]
fn pushed_s2_is_recovered() {
    let a = [[q(2, 1), q(1, 1)], [q(0, 1), q(1, 1)]];
    let input = linear_transform_exact(&canonical(&ModelName::S2), &a).unwrap();
    let nf = classify_type_a(&Coefficients::new(input.clone()), &TypeAOptions::default()).unwrap();
    assert_eq!(nf.verdict, Verdict::TypeAS2);
    assert!(nf.residual < 1e-9);
    // The witness is A⁻¹ up to the stabiliser of S2; check it does its job.
    let Some(Witness::Linear(w)) = nf.witness else { panic!() };
    let target = Coefficients::new(canonical(&ModelName::S2));
    let got = linear_transform(Coefficients::new(input).approx(), w);
    for s in 0..6 {
        assert!((got[s] - target.approx()[s]).abs() < 1e-9);
    }
}

#[test]
fn inconclusive_with_tiny_budget_is_reported() {
    let a = [[q(3, 1), q(-2, 1)], [q(1, 1), q(4, 1)]];
    let input = linear_transform_exact(&canonical(&ModelName::S3), &a).unwrap();
    let opts = TypeAOptions { tolerance: 0.0, ..TypeAOptions::default() };
    assert!(classify_type_a(&Coefficients::new(input), &opts).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn type_a_round_trip(model in 0usize..3, a in rational_matrix()) {
        let (name, verdict) = [(ModelName::S1, Verdict::TypeAS1), (ModelName::S2, Verdict::TypeAS2), (ModelName::S3, Verdict::TypeAS3)][model].clone();
        let input = linear_transform_exact(&canonical(&name), &a).unwrap();
        let nf = classify_type_a(&Coefficients::new(input), &TypeAOptions::default()).unwrap();
        prop_assert_eq!(nf.verdict, verdict);
        prop_assert!(nf.residual < 1e-9);
    }
}
