//! Small hand-built spaces used throughout the tests and the corpus.
//!
//! Every builder is generic over the scalar type, so each instance is
//! available both in double precision and exactly.

use crate::algebra::space::SpaceSpec;
use crate::scalar::Scalar;
use crate::tensor::{Bilinear, Matrix};

fn int<S: Scalar>(v: i64) -> S {
    S::from_i64(v)
}

fn vec_from<S: Scalar>(n: usize, entries: &[(usize, i64)]) -> Vec<S> {
    let mut v = vec![S::zero(); n];
    for &(k, c) in entries {
        v[k] = int(c);
    }
    v
}

/// `R^n` with the zero bracket and the identity metric.
pub fn abelian<S: Scalar>(n: usize) -> SpaceSpec<S> {
    SpaceSpec::new(0, n, Bilinear::zeros(n, n), Matrix::identity(n))
}

/// Heisenberg algebra `[e1, e2] = e3`, identity metric.
pub fn heisenberg<S: Scalar>() -> SpaceSpec<S> {
    SpaceSpec::from_brackets(0, 3, &[(0, 1, vec_from(3, &[(2, 1)]))], Matrix::identity(3))
}

/// `su(2)` with `[e1,e2] = e3` cyclically and metric `diag(d)`.
pub fn su2<S: Scalar>(diag: &[S]) -> SpaceSpec<S> {
    assert_eq!(diag.len(), 3);
    SpaceSpec::from_brackets(
        0,
        3,
        &[
            (0, 1, vec_from(3, &[(2, 1)])),
            (1, 2, vec_from(3, &[(0, 1)])),
            (2, 0, vec_from(3, &[(1, 1)])),
        ],
        Matrix::diagonal(diag),
    )
}

/// The round sphere `SO(3)/SO(2)`: `[h,e1] = e2`, `[h,e2] = -e1`, `[e1,e2] = h`.
pub fn s2<S: Scalar>() -> SpaceSpec<S> {
    SpaceSpec::from_brackets(
        1,
        2,
        &[
            (0, 1, vec_from(3, &[(2, 1)])),
            (0, 2, vec_from(3, &[(1, -1)])),
            (1, 2, vec_from(3, &[(0, 1)])),
        ],
        Matrix::identity(2),
    )
}

/// Solvable, non-nilpotent: `[e1, e2] = e2`.
pub fn affine_line<S: Scalar>() -> SpaceSpec<S> {
    SpaceSpec::from_brackets(0, 2, &[(0, 1, vec_from(2, &[(1, 1)]))], Matrix::identity(2))
}

/// Euclidean motions of the plane: `[e1, e2] = e3`, `[e1, e3] = -e2`.
pub fn euclidean_plane<S: Scalar>() -> SpaceSpec<S> {
    SpaceSpec::from_brackets(
        0,
        3,
        &[(0, 1, vec_from(3, &[(2, 1)])), (0, 2, vec_from(3, &[(1, -1)]))],
        Matrix::identity(3),
    )
}

/// Coefficients of `[E_ij, E_kl]` in `so(n)`, as signed pairs `(a, b, sign)`
/// meaning `sign * E_ab`.
fn so_bracket(p: (usize, usize), q: (usize, usize)) -> Vec<(usize, usize, i64)> {
    let (i, j) = p;
    let (k, l) = q;
    let mut out = Vec::new();
    if j == k {
        out.push((i, l, 1));
    }
    if i == k {
        out.push((j, l, -1));
    }
    if j == l {
        out.push((i, k, -1));
    }
    if i == l {
        out.push((j, k, 1));
    }
    out
}

/// `so(n)` over the basis `E_ab` (`a < b`) listed in `order`; the first
/// `dim_h` pairs span `h`. The metric on `m` is the identity.
pub fn so_quotient<S: Scalar>(n: usize, order: &[(usize, usize)], dim_h: usize) -> SpaceSpec<S> {
    let dim = order.len();
    assert_eq!(dim, n * (n - 1) / 2);
    let index = |a: usize, b: usize| -> (usize, i64) {
        if a < b {
            (order.iter().position(|&p| p == (a, b)).expect("pair listed"), 1)
        } else {
            (order.iter().position(|&p| p == (b, a)).expect("pair listed"), -1)
        }
    };
    let mut c = Bilinear::<S>::zeros(dim, dim);
    for (x, &p) in order.iter().enumerate() {
        for (y, &q) in order.iter().enumerate() {
            for (a, b, s) in so_bracket(p, q) {
                if a == b {
                    continue;
                }
                let (z, sign) = index(a, b);
                let v = c.get(x, y, z).clone() + int::<S>(s * sign);
                c.set(x, y, z, v);
            }
        }
    }
    SpaceSpec::new(dim_h, dim - dim_h, c, Matrix::identity(dim - dim_h))
}

/// `S^n = SO(n+1)/SO(n)` with the metric of constant curvature one.
pub fn sphere<S: Scalar>(n: usize) -> SpaceSpec<S> {
    let mut order = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            order.push((a, b));
        }
    }
    let dim_h = order.len();
    order.extend((0..n).map(|a| (a, n)));
    so_quotient(n + 1, &order, dim_h)
}

/// `SO(4)/SO(2)` with `h = E_01`; here `[.,.]_m` is not a Lie bracket.
pub fn so4_so2<S: Scalar>() -> SpaceSpec<S> {
    so_quotient(4, &[(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)], 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::space::validate_space;
    use crate::Rational;

    #[test]
    fn all_examples_validate_exactly() {
        let one = Rational::from_i64(1);
        let specs: Vec<SpaceSpec<Rational>> = vec![
            abelian(2),
            abelian(3),
            heisenberg(),
            su2(&[one.clone(), one.clone(), one.clone()]),
            su2(&[one.clone(), Rational::from_i64(4), one]),
            s2(),
            affine_line(),
            euclidean_plane(),
            sphere(2),
            sphere(3),
            sphere(4),
            so4_so2(),
        ];
        for spec in specs {
            let report = validate_space(&spec, 0.0).unwrap();
            assert!(report.is_valid(), "{:?}", report.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn sphere2_is_s2_with_reversed_h() {
        let a: SpaceSpec<f64> = sphere(2);
        let b: SpaceSpec<f64> = s2();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let flip = if (i == 0) as u8 + (j == 0) as u8 + (k == 0) as u8 == 1 { -1.0 } else { 1.0 };
                    assert_eq!(*a.structure.get(i, j, k), flip * b.structure.get(i, j, k), "{i}{j}{k}");
                }
            }
        }
    }

    #[test]
    fn so4_so2_is_not_jacobi_on_m() {
        let spec: SpaceSpec<f64> = so4_so2();
        let table = crate::algebra::space::m_bracket_table(&spec);
        let worst = crate::algebra::space::jacobi_residuals(&table).iter().fold(0.0f64, |a, x| a.max(x.abs()));
        assert!(worst > 0.5);
    }
}
