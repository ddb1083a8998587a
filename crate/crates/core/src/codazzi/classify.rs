use crate::algebra::forms::SymForm;
use crate::algebra::malgebra::{is_ideal, MAlgebra};
use crate::codazzi::compat::FrameBrackets;
use crate::codazzi::solve::codazzi_residual;
use crate::connections::covariant_differential;
use crate::error::{Error, Result};
use crate::spectral::{spectral_decompose, SpectralDecomp, CLUSTER_TOL};
use crate::tensor::{CovTensor, Matrix, ProductTable};

#[derive(Debug, Clone, PartialEq)]
pub struct CodazziClassification {
    pub decomp: SpectralDecomp,
    pub codazzi_residual: f64,
    /// `max |a(X, A)|`.
    pub nabla_residual: f64,
    /// Decided from the covariant differential.
    pub parallel: bool,
    /// Decided from brackets between three distinct eigenspaces.
    pub triple_parallel: bool,
    /// Largest `<X_i, [Y_j, Z_k]_m>` over mutually distinct blocks, as
    /// `(i, j, k, value)`.
    pub triple_witness: Option<(usize, usize, usize, f64)>,
    /// Eigenspaces that are ideals of `(m, [.,.]_m)`.
    pub ideal_blocks: Vec<usize>,
    pub essential: bool,
}

impl CodazziClassification {
    pub fn criteria_agree(&self) -> bool {
        self.parallel == self.triple_parallel
    }

    /// Nonparallel solutions have at least three eigenvalues.
    pub fn rank_condition_holds(&self) -> bool {
        self.parallel || self.decomp.r() >= 3
    }
}

/// Scale used to turn the absolute tolerance into one for `a`-dependent residuals.
pub(crate) fn residual_scale(alpha: &ProductTable<f64>, a: &SymForm<f64>) -> f64 {
    1.0 + alpha.max_magnitude().max(1.0) * a.max_magnitude()
}

/// Classify an invariant Codazzi form as parallel or not, and essential or not.
pub fn classify(
    alg: &MAlgebra<f64>,
    gram: &Matrix<f64>,
    alpha: &ProductTable<f64>,
    a: &SymForm<f64>,
    tol: f64,
) -> Result<CodazziClassification> {
    let scale = residual_scale(alpha, a);
    let cod = codazzi_residual(alpha, a);
    if cod > tol * scale {
        return Err(Error::NotCodazzi(cod));
    }
    let decomp = spectral_decompose(a, gram, CLUSTER_TOL)?;
    let nabla = covariant_differential(alpha, &CovTensor::from_matrix(&a.to_matrix())).max_magnitude();
    let parallel = nabla <= tol * scale;

    let fb = FrameBrackets::new(alg, &decomp);
    let bscale = 1.0 + fb.c.max_magnitude();
    let mut witness: Option<(usize, usize, usize, f64)> = None;
    for x in 0..fb.dim() {
        for y in 0..fb.dim() {
            for z in 0..fb.dim() {
                let (i, j, k) = (fb.labels[x], fb.labels[y], fb.labels[z]);
                if i == j || j == k || i == k {
                    continue;
                }
                let v = fb.at(y, z, x);
                if witness.is_none_or(|w| v.abs() > w.3.abs()) {
                    witness = Some((i, j, k, v));
                }
            }
        }
    }
    let triple_parallel = witness.is_none_or(|w| w.3.abs() <= tol * bscale);

    let mut ideal_blocks = Vec::new();
    for (i, block) in decomp.blocks.iter().enumerate() {
        if matches!(is_ideal(alg, block, tol.max(1e-9)), Ok(true)) {
            ideal_blocks.push(i);
        }
    }
    let essential = !parallel && ideal_blocks.is_empty();
    Ok(CodazziClassification {
        decomp,
        codazzi_residual: cod,
        nabla_residual: nabla,
        parallel,
        triple_parallel,
        triple_witness: witness,
        ideal_blocks,
        essential,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::malgebra::project_algebra;
    use crate::codazzi::solve::codazzi_solution_space;
    use crate::connections::levi_civita_product;
    use crate::examples;

    #[test]
    fn metric_is_parallel() {
        for spec in [examples::su2::<f64>(&[1.0, 1.0, 1.0]), examples::heisenberg(), examples::s2()] {
            let alg = project_algebra(&spec);
            let alpha = levi_civita_product(&spec).unwrap();
            let g = SymForm::symmetrize(&spec.gram);
            let c = classify(&alg, &spec.gram, &alpha, &g, 1e-9).unwrap();
            assert!(c.parallel && c.triple_parallel && !c.essential);
            assert_eq!(c.decomp.r(), 1);
        }
    }

    #[test]
    fn abelian_diagonal_is_parallel() {
        let spec = examples::abelian::<f64>(3);
        let alg = project_algebra(&spec);
        let alpha = levi_civita_product(&spec).unwrap();
        let a = SymForm::symmetrize(&Matrix::diagonal(&[1.0, 2.0, 3.0]));
        let c = classify(&alg, &spec.gram, &alpha, &a, 1e-9).unwrap();
        assert!(c.parallel && c.criteria_agree());
        assert_eq!(c.ideal_blocks, vec![0, 1, 2]);
    }

    #[test]
    fn balanced_su2_is_essential() {
        let spec = examples::su2::<f64>(&[1.0, 4.0, 1.0]);
        let alg = project_algebra(&spec);
        let alpha = levi_civita_product(&spec).unwrap();
        let a = SymForm::symmetrize(&Matrix::diagonal(&[0.0, 4.0, 2.0]));
        let c = classify(&alg, &spec.gram, &alpha, &a, 1e-9).unwrap();
        assert!(!c.parallel && c.criteria_agree() && c.essential && c.rank_condition_holds());
        let sols = codazzi_solution_space(&spec, &alpha, 1e-9).unwrap();
        assert_eq!(sols.len(), 3);
        for s in &sols[1..] {
            assert!(!classify(&alg, &spec.gram, &alpha, s, 1e-9).unwrap().parallel);
        }
    }

    #[test]
    fn non_codazzi_is_rejected() {
        let spec = examples::su2::<f64>(&[1.0, 1.0, 1.0]);
        let alg = project_algebra(&spec);
        let alpha = levi_civita_product(&spec).unwrap();
        let a = SymForm::symmetrize(&Matrix::diagonal(&[1.0, 2.0, 3.0]));
        assert!(matches!(classify(&alg, &spec.gram, &alpha, &a, 1e-9), Err(Error::NotCodazzi(_))));
    }
}
