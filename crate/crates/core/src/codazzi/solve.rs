use crate::algebra::forms::{add_rows, invariance_rows, orthonormalize_forms, sub_rows, sym_pairing_row, SymForm};
use crate::algebra::space::SpaceSpec;
use crate::error::Result;
use crate::scalar::{basis_vector, dot, Scalar};
use crate::tensor::ProductTable;

/// Rows of the Codazzi system in the upper-triangle coordinates of `A`:
/// `D(X,Y,Z) - D(Y,X,Z) = 0` with `D(X,Y,Z) = -A(a(X,Y),Z) - A(Y,a(X,Z))`.
pub fn codazzi_rows<S: Scalar>(alpha: &ProductTable<S>) -> Vec<Vec<S>> {
    let n = alpha.dim_in;
    let e = |i: usize| basis_vector::<S>(n, i);
    let mut rows = Vec::new();
    for x in 0..n {
        for y in (x + 1)..n {
            for z in 0..n {
                let pos = add_rows(
                    sym_pairing_row(&alpha.basis_product(y, x), &e(z)),
                    sym_pairing_row(&e(x), &alpha.basis_product(y, z)),
                );
                let neg = add_rows(
                    sym_pairing_row(&alpha.basis_product(x, y), &e(z)),
                    sym_pairing_row(&e(y), &alpha.basis_product(x, z)),
                );
                let row = sub_rows(pos, neg);
                if !row.iter().all(Scalar::is_exact_zero) {
                    rows.push(row);
                }
            }
        }
    }
    rows
}

/// Basis of the invariant Codazzi forms, orthonormal under
/// `tr(G^-1 S G^-1 T)` and with the metric first.
pub fn codazzi_solution_space<S: Scalar>(
    spec: &SpaceSpec<S>,
    alpha: &ProductTable<S>,
    tol: f64,
) -> Result<Vec<SymForm<S>>> {
    spec.check_shapes()?;
    let n = spec.dim_m;
    let mut rows = invariance_rows(spec);
    rows.extend(codazzi_rows(alpha));
    let null = S::nullspace(&rows, n * (n + 1) / 2, tol);
    Ok(orthonormalize_forms(null, &spec.gram, tol))
}

/// Largest residual of the Codazzi system for `a`.
pub fn codazzi_residual<S: Scalar>(alpha: &ProductTable<S>, a: &SymForm<S>) -> f64 {
    codazzi_rows(alpha)
        .iter()
        .map(|r| dot(r, a.coords()).magnitude())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connections::levi_civita_product;
    use crate::examples;
    use crate::Rational;

    #[test]
    fn abelian_solutions_are_all_forms() {
        for n in 1..5 {
            let spec = examples::abelian::<f64>(n);
            let alpha = levi_civita_product(&spec).unwrap();
            assert_eq!(codazzi_solution_space(&spec, &alpha, 1e-9).unwrap().len(), n * (n + 1) / 2);
        }
    }

    #[test]
    fn bi_invariant_su2_has_only_metric() {
        let one = Rational::from_i64(1);
        let spec = examples::su2(&[one.clone(), one.clone(), one]);
        let alpha = levi_civita_product(&spec).unwrap();
        let sols = codazzi_solution_space(&spec, &alpha, 0.0).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0], SymForm::identity(3));
    }

    #[test]
    fn s2_has_only_metric() {
        let spec = examples::s2::<f64>();
        let alpha = levi_civita_product(&spec).unwrap();
        let sols = codazzi_solution_space(&spec, &alpha, 1e-9).unwrap();
        assert_eq!(sols.len(), 1);
        assert!(codazzi_residual(&alpha, &sols[0]) < 1e-14);
    }

    #[test]
    fn balanced_su2_has_a_nonparallel_solution() {
        let q = Rational::from_i64;
        let spec = examples::su2(&[q(1), q(4), q(1)]);
        let alpha = levi_civita_product(&spec).unwrap();
        let sols = codazzi_solution_space(&spec, &alpha, 0.0).unwrap();
        // the metric, diag(0, 4, 2) and its rotations in the (e1, e3) plane
        assert_eq!(sols.len(), 3);
        // diag(0, 4, 2) restricts to 0, 1, 2 on the orthonormal axes
        let a = SymForm::symmetrize(&crate::Matrix::diagonal(&[q(0), q(4), q(2)]));
        assert_eq!(codazzi_residual(&alpha, &a), 0.0);
    }
}
