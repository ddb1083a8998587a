//! Curvature of left-invariant metrics on three-dimensional unimodular
//! groups, compared with Milnor's closed formulas.

use approx::assert_relative_eq;
use rgw_core::{curvature_set, examples, levi_civita_product, project_algebra, sectional, SpaceSpec};

/// Ricci curvature on the orthonormal frame `f_i = e_i / sqrt(d_i)` of
/// `su(2)` with `[e1,e2] = e3` cyclically and metric `diag(d)`.
fn milnor_su2(d: [f64; 3]) -> [f64; 3] {
    // [f_j, f_k] = lambda_i f_i for (i, j, k) cyclic
    let lambda = [0, 1, 2].map(|i| {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        (d[i] / (d[j] * d[k])).sqrt()
    });
    let half = lambda.iter().sum::<f64>() / 2.0;
    let mu = lambda.map(|l| half - l);
    [0, 1, 2].map(|i| 2.0 * mu[(i + 1) % 3] * mu[(i + 2) % 3])
}

fn frame_ricci(spec: &SpaceSpec<f64>) -> ([f64; 3], f64) {
    let alg = project_algebra(spec);
    let alpha = levi_civita_product(spec).unwrap();
    let c = curvature_set(&alg, &spec.gram, &alpha).unwrap();
    let ric = [0, 1, 2].map(|i| c.ric.get(i, i) / spec.gram.get(i, i));
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                assert!(c.ric.get(i, j).abs() < 1e-12);
            }
        }
    }
    (ric, c.s)
}

#[test]
fn berger_and_generic_su2_match_milnor() {
    for d in [[1.0, 1.0, 1.0], [1.0, 1.0, 2.0], [1.0, 4.0, 1.0], [0.5, 2.0, 3.0], [7.0, 0.25, 1.5]] {
        let (ric, s) = frame_ricci(&examples::su2(&d));
        let expected = milnor_su2(d);
        for i in 0..3 {
            assert_relative_eq!(ric[i], expected[i], epsilon = 1e-12, max_relative = 1e-12);
        }
        assert_relative_eq!(s, expected.iter().sum::<f64>(), epsilon = 1e-12, max_relative = 1e-12);
    }
}

#[test]
fn heisenberg_curvatures() {
    let spec = examples::heisenberg::<f64>();
    let alg = project_algebra(&spec);
    let alpha = levi_civita_product(&spec).unwrap();
    let c = curvature_set(&alg, &spec.gram, &alpha).unwrap();
    let e = |i| alg.basis(i);
    assert_relative_eq!(sectional(&c.r, &spec.gram, &e(0), &e(1)).unwrap(), -0.75, epsilon = 1e-14);
    assert_relative_eq!(sectional(&c.r, &spec.gram, &e(0), &e(2)).unwrap(), 0.25, epsilon = 1e-14);
    assert_relative_eq!(sectional(&c.r, &spec.gram, &e(1), &e(2)).unwrap(), 0.25, epsilon = 1e-14);
    for (i, v) in [-0.5, -0.5, 0.5].into_iter().enumerate() {
        assert_relative_eq!(*c.ric.get(i, i), v, epsilon = 1e-14);
    }
    assert_relative_eq!(c.s, -0.5, epsilon = 1e-14);
}

#[test]
fn round_sphere_has_unit_curvature() {
    for n in 2..=4 {
        let spec = examples::sphere::<f64>(n);
        let alg = project_algebra(&spec);
        let alpha = levi_civita_product(&spec).unwrap();
        let c = curvature_set(&alg, &spec.gram, &alpha).unwrap();
        for i in 0..n {
            for j in (i + 1)..n {
                assert_relative_eq!(sectional(&c.r, &spec.gram, &alg.basis(i), &alg.basis(j)).unwrap(), 1.0, epsilon = 1e-12);
            }
        }
        assert_relative_eq!(c.s, (n * (n - 1)) as f64, epsilon = 1e-12);
    }
}
