use proptest::prelude::*;
use rgw_core::{
    codazzi_solution_space, curvature_set, examples, levi_civita_product, project_algebra, sectional, torsion,
    validate_space, Invariant, Matrix, Rational, Scalar, SpaceSpec, SymForm,
};

fn scaled(spec: &SpaceSpec<f64>, c: f64) -> SpaceSpec<f64> {
    let mut out = spec.clone();
    out.gram = spec.gram.scale(&c);
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn levi_civita_is_torsion_free_and_metric(d in prop::array::uniform3(0.2f64..5.0)) {
        let spec = examples::su2(&d);
        let alg = project_algebra(&spec);
        let alpha = levi_civita_product(&spec).unwrap();
        prop_assert!(torsion(&alg, &alpha).max_magnitude() < 1e-12);
        prop_assert!(rgw_core::connections::skew_residual(&spec.gram, &alpha) < 1e-12);
    }

    #[test]
    fn scaling_the_metric(d in prop::array::uniform3(0.2f64..5.0), c in 0.1f64..10.0) {
        let a = examples::su2(&d);
        let b = scaled(&a, c);
        let (ga, gb) = (project_algebra(&a), project_algebra(&b));
        let ca = curvature_set(&ga, &a.gram, &levi_civita_product(&a).unwrap()).unwrap();
        let cb = curvature_set(&gb, &b.gram, &levi_civita_product(&b).unwrap()).unwrap();
        // the connection, hence R and Ric, do not change; K and s scale by 1/c
        prop_assert!(ca.ric.sub(&cb.ric).max_magnitude() < 1e-10);
        prop_assert!((ca.s - c * cb.s).abs() < 1e-9 * (1.0 + ca.s.abs()));
        let (x, y) = (ga.basis(0), ga.basis(2));
        let ka = sectional(&ca.r, &a.gram, &x, &y).unwrap();
        let kb = sectional(&cb.r, &b.gram, &x, &y).unwrap();
        prop_assert!((ka - c * kb).abs() < 1e-9 * (1.0 + ka.abs()));
        let na = codazzi_solution_space(&a, &levi_civita_product(&a).unwrap(), 1e-9).unwrap().len();
        let nb = codazzi_solution_space(&b, &levi_civita_product(&b).unwrap(), 1e-9).unwrap().len();
        prop_assert_eq!(na, nb);
    }

    #[test]
    fn exact_and_double_agree(d in prop::array::uniform3(1i64..6)) {
        let q: SpaceSpec<Rational> = examples::su2(&d.map(Rational::from_i64));
        let f: SpaceSpec<f64> = examples::su2(&d.map(|v| v as f64));
        let cq = curvature_set(&project_algebra(&q), &q.gram, &levi_civita_product(&q).unwrap()).unwrap();
        let cf = curvature_set(&project_algebra(&f), &f.gram, &levi_civita_product(&f).unwrap()).unwrap();
        prop_assert!((cq.s.to_f64() - cf.s).abs() < 1e-12);
        let nq = codazzi_solution_space(&q, &levi_civita_product(&q).unwrap(), 0.0).unwrap().len();
        let nf = codazzi_solution_space(&f, &levi_civita_product(&f).unwrap(), 1e-9).unwrap().len();
        prop_assert_eq!(nq, nf);
    }

    #[test]
    fn validator_catches_perturbations(i in 0usize..3, j in 0usize..3, k in 0usize..3, eps in 1e-6f64..1e-2) {
        prop_assume!(i != j);
        let mut spec = examples::su2(&[1.0, 2.0, 3.0]);
        let v = *spec.structure.get(i, j, k);
        spec.structure.set(i, j, k, v + eps);
        let rep = validate_space(&spec, 1e-9).unwrap();
        prop_assert!(!rep.is_valid());
        prop_assert!(!rep.check(Invariant::Antisymmetry).unwrap().passed);
    }

    #[test]
    fn validator_catches_asymmetric_metric(eps in 1e-6f64..1e-2) {
        let mut spec = examples::su2(&[1.0, 2.0, 3.0]);
        spec.gram.set(0, 1, eps);
        prop_assert!(!validate_space(&spec, 1e-9).unwrap().is_valid());
    }
}

#[test]
fn metric_is_always_a_codazzi_tensor() {
    for spec in [examples::heisenberg::<f64>(), examples::su2(&[1.0, 2.0, 5.0]), examples::so4_so2()] {
        let sols = codazzi_solution_space(&spec, &levi_civita_product(&spec).unwrap(), 1e-9).unwrap();
        let rows: Vec<Vec<f64>> = sols.iter().map(|s| s.coords().to_vec()).collect();
        let g = SymForm::symmetrize(&spec.gram);
        assert!(rgw_core::scalar::in_span(&rows, g.coords(), 1e-8));
    }
}

#[test]
fn non_invariant_metric_is_rejected() {
    let mut spec = examples::s2::<f64>();
    spec.gram = Matrix::diagonal(&[1.0, 2.0]);
    let rep = validate_space(&spec, 1e-9).unwrap();
    assert!(!rep.check(Invariant::MetricInvariance).unwrap().passed);
}
