use nalgebra::{Complex, DMatrix};

use crate::algebra::forms::SymForm;
use crate::algebra::killing::{ad_in_frame, frame_indices, sub_block};
use crate::algebra::malgebra::MAlgebra;
use crate::error::{Error, Result};
use crate::spectral::{assemble, decomposition_from_blocks, SpectralDecomp};
use crate::tensor::{Bilinear, Matrix, ProductTable};

/// Structure constants of `[.,.]_m` in the orthonormal frame of a
/// decomposition: `c[a][b][c] = <[q_a, q_b]_m, q_c>`.
#[derive(Debug, Clone)]
pub struct FrameBrackets {
    /// Block label of each frame vector.
    pub labels: Vec<usize>,
    /// Eigenvalue of each frame vector.
    pub lambda: Vec<f64>,
    pub frame: Vec<Vec<f64>>,
    pub c: Bilinear<f64>,
}

impl FrameBrackets {
    pub fn new(alg: &MAlgebra<f64>, decomp: &SpectralDecomp) -> Self {
        let frame: Vec<(usize, Vec<f64>)> = decomp.frame().into_iter().map(|(i, v)| (i, v.to_vec())).collect();
        let n = frame.len();
        let mut c = Bilinear::zeros(n, n);
        for (a, (_, qa)) in frame.iter().enumerate() {
            for (b, (_, qb)) in frame.iter().enumerate() {
                let br = alg.bracket(qa, qb);
                for (k, (_, qc)) in frame.iter().enumerate() {
                    c.set(a, b, k, decomp.inner(&br, qc));
                }
            }
        }
        Self {
            labels: frame.iter().map(|(i, _)| *i).collect(),
            lambda: frame.iter().map(|(i, _)| decomp.lambdas[*i]).collect(),
            frame: frame.into_iter().map(|(_, v)| v).collect(),
            c,
        }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// `<[q_a, q_b]_m, q_c>`.
    #[inline]
    pub fn at(&self, a: usize, b: usize, c: usize) -> f64 {
        *self.c.get(a, b, c)
    }

    /// Frame indices belonging to block `i`.
    pub fn block(&self, i: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&a| self.labels[a] == i).collect()
    }

    /// `||[q_a, q_b]_k||^2`.
    pub fn block_norm_sq(&self, a: usize, b: usize, k: usize) -> f64 {
        self.block(k).iter().map(|&c| self.at(a, b, c).powi(2)).sum()
    }
}

/// A frame triple at which the compatibility condition fails.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Block labels `(i, j, k)`.
    pub blocks: (usize, usize, usize),
    /// Frame vector indices `(a, b, c)` with `q_a` in block `i` and so on.
    pub vectors: (usize, usize, usize),
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Compatibility {
    pub holds: bool,
    pub max_residual: f64,
    pub violations: Vec<Violation>,
}

/// `(l_i - l_k)^2 <[X_i,Y_j]_m, Z_k> + (l_j - l_i)^2 <[X_i,Z_k]_m, Y_j>`
/// over all frame triples.
pub fn check_compatibility(alg: &MAlgebra<f64>, decomp: &SpectralDecomp, tol: f64) -> Compatibility {
    let fb = FrameBrackets::new(alg, decomp);
    compatibility_from_frame(&fb, tol)
}

pub(crate) fn compatibility_from_frame(fb: &FrameBrackets, tol: f64) -> Compatibility {
    let n = fb.dim();
    let l = &fb.lambda;
    let mut violations = Vec::new();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let r = (l[a] - l[c]).powi(2) * fb.at(a, b, c) + (l[b] - l[a]).powi(2) * fb.at(a, c, b);
                worst = worst.max(r.abs());
                if r.abs() > tol {
                    violations.push(Violation {
                        blocks: (fb.labels[a], fb.labels[b], fb.labels[c]),
                        vectors: (a, b, c),
                        residual: r,
                    });
                }
            }
        }
    }
    Compatibility { holds: violations.is_empty(), max_residual: worst, violations }
}

/// `A = sum_i lambda_i <.,.>|_{m_i x m_i}` for a compatible decomposition
/// into `ad(h)`-invariant blocks.
pub fn construct_codazzi(
    alg: &MAlgebra<f64>,
    gram: &Matrix<f64>,
    blocks: &[Vec<Vec<f64>>],
    lambdas: &[f64],
    tol: f64,
) -> Result<SymForm<f64>> {
    let decomp = decomposition_from_blocks(gram, blocks, lambdas, tol)?;
    for (i, block) in decomp.blocks.iter().enumerate() {
        for w in &alg.h_action {
            for v in block {
                let img = w.mul_vec(v);
                let outside = decomp.project_perp(i, &img);
                if outside.iter().any(|x| x.abs() > tol) {
                    return Err(Error::BadDecomposition(format!("block {i} is not ad(h)-invariant")));
                }
            }
        }
    }
    let compat = check_compatibility(alg, &decomp, tol);
    if let Some(v) = compat.violations.first() {
        let (i, j, k) = v.blocks;
        return Err(Error::Compatibility { i, j, k, residual: v.residual });
    }
    Ok(assemble(gram, &decomp.blocks, &decomp.lambdas))
}

/// Largest residuals of the two identities expressing `<[X_i,Z_k]_m,Y_j>` and
/// `<X_i,[Y_j,Z_k]_m>` through `<[X_i,Y_j]_m,Z_k>` when `i != j`.
pub fn intermediate_residuals(alg: &MAlgebra<f64>, decomp: &SpectralDecomp) -> (f64, f64) {
    let fb = FrameBrackets::new(alg, decomp);
    let n = fb.dim();
    let l = &fb.lambda;
    let (mut first, mut second): (f64, f64) = (0.0, 0.0);
    for a in 0..n {
        for b in 0..n {
            if fb.labels[a] == fb.labels[b] {
                continue;
            }
            let gap = (l[b] - l[a]).powi(2);
            for c in 0..n {
                let base = fb.at(a, b, c);
                let lhs1 = fb.at(a, c, b);
                let rhs1 = -(l[a] - l[c]).powi(2) / gap * base;
                // <X_i, [Y_j, Z_k]_m>
                let lhs2 = fb.at(b, c, a);
                let rhs2 = (l[b] - l[c]).powi(2) / gap * base;
                first = first.max((lhs1 - rhs1).abs());
                second = second.max((lhs2 - rhs2).abs());
            }
        }
    }
    (first, second)
}

fn compatible(fb: &FrameBrackets, tol: f64) -> Result<()> {
    let compat = compatibility_from_frame(fb, tol);
    match compat.violations.first() {
        Some(v) => Err(Error::Compatibility { i: v.blocks.0, j: v.blocks.1, k: v.blocks.2, residual: v.residual }),
        None => Ok(()),
    }
}

/// Predicted `a(X_i, Y_j) = sum_k (l_i - l_k)/(l_i - l_j) [X_i,Y_j]_k` on the
/// frame vectors of blocks `i != j`, as `(a, b, vector)` triples.
pub fn eigen_alpha(
    alg: &MAlgebra<f64>,
    decomp: &SpectralDecomp,
    i: usize,
    j: usize,
    tol: f64,
) -> Result<Vec<(usize, usize, Vec<f64>)>> {
    if i == j {
        return Err(Error::SameBlock(i));
    }
    let r = decomp.r();
    for idx in [i, j] {
        if idx >= r {
            return Err(Error::OutOfRange { index: idx, limit: r });
        }
    }
    let fb = FrameBrackets::new(alg, decomp);
    compatible(&fb, tol)?;
    Ok(predict(&fb, i, j))
}

fn predict(fb: &FrameBrackets, i: usize, j: usize) -> Vec<(usize, usize, Vec<f64>)> {
    let m = fb.frame[0].len();
    let l = &fb.lambda;
    let mut out = Vec::new();
    for &a in &fb.block(i) {
        for &b in &fb.block(j) {
            let mut v = vec![0.0; m];
            for c in 0..fb.dim() {
                let w = (l[a] - l[c]) / (l[a] - l[b]) * fb.at(a, b, c);
                for (o, q) in v.iter_mut().zip(&fb.frame[c]) {
                    *o += w * q;
                }
            }
            out.push((a, b, v));
        }
    }
    out
}

/// Largest difference between the predicted mixed-block products and `alpha`.
pub fn eigen_alpha_residual(alg: &MAlgebra<f64>, alpha: &ProductTable<f64>, decomp: &SpectralDecomp) -> f64 {
    let fb = FrameBrackets::new(alg, decomp);
    let mut worst: f64 = 0.0;
    for i in 0..decomp.r() {
        for j in 0..decomp.r() {
            if i == j {
                continue;
            }
            for (a, b, v) in predict(&fb, i, j) {
                let actual = alpha.apply(&fb.frame[a], &fb.frame[b]);
                for (x, y) in actual.iter().zip(&v) {
                    worst = worst.max((x - y).abs());
                }
            }
        }
    }
    worst
}

/// Skew-adjointness of `pi_k^perp ad_m(Z_k)|_perp` for the modified inner
/// product, and the spectra of these operators.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewRepresentation {
    pub skew_residual: f64,
    /// Spectrum for each frame vector of block `k`.
    pub spectra: Vec<Vec<Complex<f64>>>,
    pub max_real_part: f64,
    pub holds: bool,
}

pub fn skew_representation_check(
    alg: &MAlgebra<f64>,
    decomp: &SpectralDecomp,
    k: usize,
    tol: f64,
) -> Result<SkewRepresentation> {
    if k >= decomp.r() {
        return Err(Error::OutOfRange { index: k, limit: decomp.r() });
    }
    let fb = FrameBrackets::new(alg, decomp);
    compatible(&fb, tol)?;
    let (_, outside) = frame_indices(decomp, k);
    // on m_k^perp the modified inner product is diagonal in the frame
    let weights: Vec<f64> = outside.iter().map(|&a| (fb.lambda[a] - decomp.lambdas[k]).powi(2)).collect();
    let w = Matrix::diagonal(&weights);
    let mut skew: f64 = 0.0;
    let mut spectra = Vec::new();
    let mut max_re: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for z in &decomp.blocks[k] {
        let p = sub_block(&ad_in_frame(alg, decomp, z), &outside, &outside);
        scale = scale.max(p.max_magnitude());
        let wp = w.mul(&p);
        skew = skew.max(wp.add(&wp.transpose()).max_magnitude());
        let spectrum: Vec<Complex<f64>> = if outside.is_empty() {
            Vec::new()
        } else {
            DMatrix::from_row_slice(p.rows, p.cols, &p.data).complex_eigenvalues().iter().copied().collect()
        };
        max_re = spectrum.iter().fold(max_re, |m, z| m.max(z.re.abs()));
        spectra.push(spectrum);
    }
    let wscale = weights.iter().fold(1.0f64, |m, x| m.max(*x));
    let holds = skew <= tol * wscale * scale && max_re <= tol.max(1e-8) * scale;
    Ok(SkewRepresentation { skew_residual: skew, spectra, max_real_part: max_re, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::malgebra::project_algebra;
    use crate::connections::levi_civita_product;
    use crate::examples;
    use crate::spectral::{spectral_decompose, CLUSTER_TOL};

    fn axes(n: usize) -> Vec<Vec<Vec<f64>>> {
        (0..n).map(|i| vec![crate::scalar::basis_vector(n, i)]).collect()
    }

    #[test]
    fn su2_axes_are_incompatible() {
        let spec = examples::su2::<f64>(&[1.0, 1.0, 1.0]);
        let alg = project_algebra(&spec);
        let decomp = decomposition_from_blocks(&spec.gram, &axes(3), &[0.0, 1.0, -1.0], 1e-9).unwrap();
        let compat = check_compatibility(&alg, &decomp, 1e-9);
        assert!(!compat.holds);
        assert!((compat.max_residual - 3.0).abs() < 1e-12);
        let err = construct_codazzi(&alg, &spec.gram, &axes(3), &[1.0, 2.0, 3.0], 1e-9).unwrap_err();
        assert!(matches!(err, Error::Compatibility { .. }));
    }

    #[test]
    fn heisenberg_split_is_incompatible() {
        let spec = examples::heisenberg::<f64>();
        let alg = project_algebra(&spec);
        let blocks = vec![vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]], vec![vec![0.0, 0.0, 1.0]]];
        let decomp = decomposition_from_blocks(&spec.gram, &blocks, &[1.0, 2.0], 1e-9).unwrap();
        assert!(!check_compatibility(&alg, &decomp, 1e-9).holds);
    }

    #[test]
    fn abelian_construction() {
        let spec = examples::abelian::<f64>(2);
        let alg = project_algebra(&spec);
        let a = construct_codazzi(&alg, &spec.gram, &axes(2), &[1.0, 2.0], 1e-9).unwrap();
        assert_eq!(a.to_matrix(), Matrix::diagonal(&[1.0, 2.0]));
        assert!(matches!(
            construct_codazzi(&alg, &spec.gram, &axes(2), &[1.0, 1.0], 1e-9),
            Err(Error::RepeatedEigenvalues)
        ));
    }

    #[test]
    fn sphere_single_block() {
        let spec = examples::s2::<f64>();
        let alg = project_algebra(&spec);
        let blocks = vec![vec![vec![1.0, 0.0], vec![0.0, 1.0]]];
        let a = construct_codazzi(&alg, &spec.gram, &blocks, &[5.0], 1e-9).unwrap();
        assert_eq!(a.to_matrix(), Matrix::diagonal(&[5.0, 5.0]));
        let split = construct_codazzi(&alg, &spec.gram, &axes(2), &[1.0, 2.0], 1e-9);
        assert!(matches!(split, Err(Error::BadDecomposition(_))));
    }

    #[test]
    fn balanced_su2_identities() {
        let spec = examples::su2::<f64>(&[1.0, 4.0, 1.0]);
        let alg = project_algebra(&spec);
        let alpha = levi_civita_product(&spec).unwrap();
        let a = SymForm::symmetrize(&Matrix::diagonal(&[0.0, 4.0, 2.0]));
        let decomp = spectral_decompose(&a, &spec.gram, CLUSTER_TOL).unwrap();
        assert_eq!(decomp.r(), 3);
        assert!(check_compatibility(&alg, &decomp, 1e-12).holds);
        let (x, y) = intermediate_residuals(&alg, &decomp);
        assert!(x < 1e-12 && y < 1e-12);
        assert!(eigen_alpha_residual(&alg, &alpha, &decomp) < 1e-12);
        assert!(matches!(eigen_alpha(&alg, &decomp, 1, 1, 1e-9), Err(Error::SameBlock(1))));
        for k in 0..3 {
            let rep = skew_representation_check(&alg, &decomp, k, 1e-9).unwrap();
            assert!(rep.holds, "{rep:?}");
        }
    }
}
