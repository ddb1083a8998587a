//! Invariant connections as products on `m`, with torsion, curvature and
//! covariant differentials of invariant tensors.

use crate::algebra::malgebra::MAlgebra;
use crate::algebra::space::{is_positive_definite, m_bracket_table, SpaceSpec};
use crate::error::{Error, Result};
use crate::scalar::{basis_vector, Scalar};
use crate::tensor::{Bilinear, CovTensor, CurvTensor, Matrix, ProductTable};

/// Levi-Civita product from the Koszul formula
/// `2<a(X,Y),Z> = <[X,Y]_m,Z> - <X,[Y,Z]_m> - <[X,Z]_m,Y>`.
pub fn levi_civita_product<S: Scalar>(spec: &SpaceSpec<S>) -> Result<ProductTable<S>> {
    spec.check_shapes()?;
    koszul_product(&m_bracket_table(spec), &spec.gram)
}

/// Koszul solve for a given `[.,.]_m` table and Gram matrix.
pub fn koszul_product<S: Scalar>(bracket: &Bilinear<S>, gram: &Matrix<S>) -> Result<ProductTable<S>> {
    let n = gram.rows;
    if !is_positive_definite(gram) {
        return Err(Error::NotPositiveDefinite);
    }
    let ginv = gram.inverse().ok_or(Error::NotPositiveDefinite)?;
    // lowered brackets: low[i][j][l] = <[e_i, e_j]_m, e_l>
    let mut low = Bilinear::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let g = gram.mul_vec(&bracket.basis_product(i, j));
            for (l, v) in g.into_iter().enumerate() {
                low.set(i, j, l, v);
            }
        }
    }
    let half = S::half();
    let mut alpha = Bilinear::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let rhs: Vec<S> = (0..n)
                .map(|l| {
                    (low.get(i, j, l).clone() - low.get(j, l, i).clone() - low.get(i, l, j).clone()) * half.clone()
                })
                .collect();
            for (k, v) in ginv.mul_vec(&rhs).into_iter().enumerate() {
                alpha.set(i, j, k, v);
            }
        }
    }
    Ok(alpha)
}

/// The zero product, standing for the canonical connection of the second kind.
pub fn canonical_product<S: Scalar>(dim: usize) -> ProductTable<S> {
    Bilinear::zero_product(dim)
}

/// Largest deviation from the Koszul identity over basis triples.
pub fn koszul_residual<S: Scalar>(alg: &MAlgebra<S>, gram: &Matrix<S>, prod: &ProductTable<S>) -> f64 {
    let n = alg.dim;
    let e = |i: usize| basis_vector::<S>(n, i);
    let two = S::from_i64(2);
    let mut r: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (x, y, z) = (e(i), e(j), e(k));
                let lhs = two.clone() * gram.pair(&prod.apply(&x, &y), &z);
                let rhs = gram.pair(&alg.bracket(&x, &y), &z)
                    - gram.pair(&x, &alg.bracket(&y, &z))
                    - gram.pair(&alg.bracket(&x, &z), &y);
                r = r.max((lhs - rhs).magnitude());
            }
        }
    }
    r
}

/// Largest `|<a(X,Y),Z> + <Y,a(X,Z)>|` over basis triples.
pub fn skew_residual<S: Scalar>(gram: &Matrix<S>, prod: &ProductTable<S>) -> f64 {
    let n = gram.rows;
    let mut r: f64 = 0.0;
    for x in 0..n {
        let l = gram.mul(&prod.left_matrix(&basis_vector(n, x)));
        r = r.max(l.add(&l.transpose()).max_magnitude());
    }
    r
}

/// Largest residual of `ad(W) a(X,Y) = a(ad(W)X, Y) + a(X, ad(W)Y)` over the
/// `h` basis, and of `M a(X,Y) = a(MX, MY)` over the isotropy generators.
pub fn equivariance_residual<S: Scalar>(spec: &SpaceSpec<S>, prod: &ProductTable<S>) -> f64 {
    let n = spec.dim_m;
    let e = |i: usize| basis_vector::<S>(n, i);
    let mut r: f64 = 0.0;
    for w in 0..spec.dim_h {
        let ad = crate::algebra::space::ad_h_block(spec, w);
        for i in 0..n {
            for j in 0..n {
                let lhs = ad.mul_vec(&prod.basis_product(i, j));
                let a = prod.apply(&ad.column(i), &e(j));
                let b = prod.apply(&e(i), &ad.column(j));
                for ((l, a), b) in lhs.into_iter().zip(a).zip(b) {
                    r = r.max((l - a - b).magnitude());
                }
            }
        }
    }
    for m in &spec.isotropy_generators {
        for i in 0..n {
            for j in 0..n {
                let lhs = m.mul_vec(&prod.basis_product(i, j));
                let rhs = prod.apply(&m.column(i), &m.column(j));
                for (l, x) in lhs.into_iter().zip(rhs) {
                    r = r.max((l - x).magnitude());
                }
            }
        }
    }
    r
}

/// Whether `prod` is `ad(h)`-equivariant (and commutes with the isotropy generators).
pub fn check_equivariance<S: Scalar>(spec: &SpaceSpec<S>, prod: &ProductTable<S>, tol: f64) -> bool {
    let r = equivariance_residual(spec, prod);
    if S::EXACT {
        r == 0.0
    } else {
        r <= tol
    }
}

/// `T(X,Y) = a(X,Y) - a(Y,X) - [X,Y]_m`.
pub fn torsion<S: Scalar>(alg: &MAlgebra<S>, prod: &ProductTable<S>) -> Bilinear<S> {
    let n = alg.dim;
    let mut t = Bilinear::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v = prod.get(i, j, k).clone() - prod.get(j, i, k).clone() - alg.bracket_m.get(i, j, k).clone();
                t.set(i, j, k, v);
            }
        }
    }
    t
}

/// `R(X,Y)Z = a(X,a(Y,Z)) - a(Y,a(X,Z)) - a([X,Y]_m,Z) - [[X,Y]_h,Z]`.
pub fn curvature<S: Scalar>(alg: &MAlgebra<S>, prod: &ProductTable<S>) -> CurvTensor<S> {
    let n = alg.dim;
    let left: Vec<Matrix<S>> = (0..n).map(|i| prod.left_matrix(&basis_vector(n, i))).collect();
    let combo = |mats: &[Matrix<S>], v: &[S]| -> Matrix<S> {
        let mut m = Matrix::zeros(n, n);
        for (a, c) in v.iter().enumerate() {
            if !c.is_exact_zero() {
                m = m.add(&mats[a].scale(c));
            }
        }
        m
    };
    let mut r = CurvTensor::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut op = left[i].mul(&left[j]).sub(&left[j].mul(&left[i]));
            op = op.sub(&combo(&left, &alg.bracket_m.basis_product(i, j)));
            op = op.sub(&combo(&alg.h_action, &alg.bracket_h.basis_product(i, j)));
            for k in 0..n {
                for l in 0..n {
                    r.set(i, j, k, l, op.get(l, k).clone());
                }
            }
        }
    }
    r
}

/// `(a(X, theta))(Y_1..Y_k) = -sum_s theta(Y_1, .., a(X, Y_s), .., Y_k)`,
/// with `X` in the first slot of the result.
pub fn covariant_differential<S: Scalar>(prod: &ProductTable<S>, theta: &CovTensor<S>) -> CovTensor<S> {
    let n = theta.dim;
    let k = theta.rank;
    let mut out = CovTensor::zeros(n, k + 1);
    let indices: Vec<Vec<usize>> = theta.indices().collect();
    for x in 0..n {
        for idx in &indices {
            let mut acc = S::zero();
            for s in 0..k {
                let mut moved = idx.clone();
                for l in 0..n {
                    let a = prod.get(x, idx[s], l);
                    if a.is_exact_zero() {
                        continue;
                    }
                    moved[s] = l;
                    acc = acc - a.clone() * theta.get(&moved).clone();
                }
            }
            let mut full = Vec::with_capacity(k + 1);
            full.push(x);
            full.extend_from_slice(idx);
            out.set(&full, acc);
        }
    }
    out
}
