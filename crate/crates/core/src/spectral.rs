//! Orthogonal eigenspace decompositions of `m` relative to the metric.

use crate::algebra::forms::SymForm;
use crate::error::{Error, Result};
use crate::scalar::dot;
use crate::tensor::Matrix;

/// Default merging threshold for eigenvalue clusters, relative to the
/// spectral scale `max(spread, max |lambda|)`.
pub const CLUSTER_TOL: f64 = 1e-7;

/// `m = m_1 + ... + m_r`, mutually orthogonal, with `lambda_1 < ... < lambda_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomp {
    pub lambdas: Vec<f64>,
    /// Gram-orthonormal basis vectors of each block.
    pub blocks: Vec<Vec<Vec<f64>>>,
    pub gram: Matrix<f64>,
}

impl SpectralDecomp {
    pub fn r(&self) -> usize {
        self.lambdas.len()
    }

    pub fn dim(&self) -> usize {
        self.gram.rows
    }

    pub fn block_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        self.gram.pair(x, y)
    }

    /// The projection `(x)_i` onto block `i`.
    pub fn project(&self, i: usize, x: &[f64]) -> Vec<f64> {
        let gx = self.gram.mul_vec(x);
        let mut out = vec![0.0; x.len()];
        for b in &self.blocks[i] {
            let c = dot(b, &gx);
            for (o, v) in out.iter_mut().zip(b) {
                *o += c * v;
            }
        }
        out
    }

    /// Projection onto the orthogonal complement of block `k`.
    pub fn project_perp(&self, k: usize, x: &[f64]) -> Vec<f64> {
        let p = self.project(k, x);
        x.iter().zip(p).map(|(a, b)| a - b).collect()
    }

    /// All block basis vectors in order, with their block labels.
    pub fn frame(&self) -> Vec<(usize, &[f64])> {
        self.blocks
            .iter()
            .enumerate()
            .flat_map(|(i, b)| b.iter().map(move |v| (i, v.as_slice())))
            .collect()
    }

    /// Block basis vectors of every block except `k`.
    pub fn perp_frame(&self, k: usize) -> Vec<&[f64]> {
        self.frame().into_iter().filter(|(i, _)| *i != k).map(|(_, v)| v).collect()
    }

    /// The form `sum_i lambda_i <., .>|_{m_i x m_i}`.
    pub fn reconstruct(&self) -> SymForm<f64> {
        assemble(&self.gram, &self.blocks, &self.lambdas)
    }

    /// Largest violation of block orthonormality and of spanning.
    pub fn orthonormality_residual(&self) -> f64 {
        let frame = self.frame();
        let mut r: f64 = 0.0;
        for (a, (_, x)) in frame.iter().enumerate() {
            for (b, (_, y)) in frame.iter().enumerate() {
                let e = if a == b { 1.0 } else { 0.0 };
                r = r.max((self.inner(x, y) - e).abs());
            }
        }
        if frame.len() != self.dim() {
            r = f64::INFINITY;
        }
        r
    }
}

/// `sum_i lambda_i G B_i B_i^T G` as a form.
pub(crate) fn assemble(gram: &Matrix<f64>, blocks: &[Vec<Vec<f64>>], lambdas: &[f64]) -> SymForm<f64> {
    let n = gram.rows;
    let mut m = Matrix::zeros(n, n);
    for (block, &lam) in blocks.iter().zip(lambdas) {
        for b in block {
            let gb = gram.mul_vec(b);
            for p in 0..n {
                for q in 0..n {
                    let v = m.get(p, q) + lam * gb[p] * gb[q];
                    m.set(p, q, v);
                }
            }
        }
    }
    SymForm::symmetrize(&m)
}

/// Lower Cholesky factor of an SPD matrix.
pub fn cholesky(gram: &Matrix<f64>) -> Result<Matrix<f64>> {
    let chol = gram.to_nalgebra().cholesky().ok_or(Error::NotPositiveDefinite)?;
    Ok(Matrix::from_nalgebra(&chol.l()))
}

/// Gram-orthonormal basis of `m` built from the Cholesky factor.
pub fn orthonormal_frame(gram: &Matrix<f64>) -> Result<Vec<Vec<f64>>> {
    let l = cholesky(gram)?;
    // columns of L^{-T}
    let linv_t = l.inverse().ok_or(Error::NotPositiveDefinite)?.transpose();
    Ok((0..gram.rows).map(|j| linv_t.column(j)).collect())
}

/// Solve the metric-self-adjoint eigenproblem of `a` and merge eigenvalues
/// whose gaps are within `cluster_tol` of the spectral scale.
pub fn spectral_decompose(a: &SymForm<f64>, gram: &Matrix<f64>, cluster_tol: f64) -> Result<SpectralDecomp> {
    let n = gram.rows;
    let l = cholesky(gram)?;
    let linv = l.inverse().ok_or(Error::NotPositiveDefinite)?;
    // C = L^{-1} A L^{-T} is symmetric; eigenvectors v give x = L^{-T} v.
    let c = linv.mul(&a.to_matrix()).mul(&linv.transpose());
    let mut cs = c.to_nalgebra();
    cs = (&cs + cs.transpose()) * 0.5;
    let eig = nalgebra::SymmetricEigen::new(cs);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let linv_t = linv.transpose();
    let vecs: Vec<Vec<f64>> = order
        .iter()
        .map(|&i| {
            let v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            linv_t.mul_vec(&v)
        })
        .collect();

    let spread = vals.last().copied().unwrap_or(0.0) - vals.first().copied().unwrap_or(0.0);
    let scale = spread.max(vals.iter().fold(0.0f64, |m, v| m.max(v.abs()))).max(f64::MIN_POSITIVE);
    let mut lambdas: Vec<f64> = Vec::new();
    let mut blocks: Vec<Vec<Vec<f64>>> = Vec::new();
    let mut members: Vec<Vec<f64>> = Vec::new();
    for (idx, (&v, x)) in vals.iter().zip(vecs).enumerate() {
        let new_cluster = idx == 0 || (v - vals[idx - 1]) > cluster_tol * scale;
        if new_cluster {
            lambdas.push(v);
            members.push(vec![v]);
            blocks.push(vec![x]);
        } else {
            members.last_mut().unwrap().push(v);
            blocks.last_mut().unwrap().push(x);
        }
    }
    for (lam, m) in lambdas.iter_mut().zip(&members) {
        *lam = m.iter().sum::<f64>() / m.len() as f64;
    }
    Ok(SpectralDecomp { lambdas, blocks, gram: gram.clone() })
}

/// Build a decomposition from given blocks (any bases) and eigenvalues,
/// orthonormalizing each block and sorting by eigenvalue.
pub fn decomposition_from_blocks(
    gram: &Matrix<f64>,
    blocks: &[Vec<Vec<f64>>],
    lambdas: &[f64],
    tol: f64,
) -> Result<SpectralDecomp> {
    let n = gram.rows;
    if blocks.len() != lambdas.len() {
        return Err(Error::Shape(format!("{} blocks but {} eigenvalues", blocks.len(), lambdas.len())));
    }
    let mut sorted: Vec<usize> = (0..lambdas.len()).collect();
    sorted.sort_by(|&a, &b| lambdas[a].total_cmp(&lambdas[b]));
    for w in sorted.windows(2) {
        if lambdas[w[1]] - lambdas[w[0]] <= tol.max(f64::EPSILON * lambdas[w[1]].abs()) {
            return Err(Error::RepeatedEigenvalues);
        }
    }
    let mut out_blocks = Vec::new();
    for &i in &sorted {
        let mut ortho: Vec<Vec<f64>> = Vec::new();
        for v in &blocks[i] {
            if v.len() != n {
                return Err(Error::Shape(format!("block vector of length {} in dimension {n}", v.len())));
            }
            let mut w = v.clone();
            for b in &ortho {
                let c = gram.pair(b, &w);
                for (x, y) in w.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
            let nn = gram.pair(&w, &w);
            if nn <= tol * tol {
                return Err(Error::BadDecomposition(format!("block {i} has dependent vectors")));
            }
            let s = nn.sqrt();
            ortho.push(w.iter().map(|x| x / s).collect());
        }
        out_blocks.push(ortho);
    }
    let decomp = SpectralDecomp {
        lambdas: sorted.iter().map(|&i| lambdas[i]).collect(),
        blocks: out_blocks,
        gram: gram.clone(),
    };
    let total: usize = decomp.block_dims().iter().sum();
    if total != n {
        return Err(Error::BadDecomposition(format!("blocks span {total} of {n} dimensions")));
    }
    let res = decomp.orthonormality_residual();
    if res > tol.max(1e-9) {
        return Err(Error::BadDecomposition(format!("blocks not mutually orthogonal (residual {res:e})")));
    }
    Ok(decomp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(d: &[f64]) -> SymForm<f64> {
        SymForm::symmetrize(&Matrix::diagonal(d))
    }

    #[test]
    fn metric_has_one_block() {
        let g = Matrix::diagonal(&[1.0, 2.0, 3.0]);
        let d = spectral_decompose(&SymForm::symmetrize(&g), &g, CLUSTER_TOL).unwrap();
        assert_eq!(d.r(), 1);
        assert!((d.lambdas[0] - 1.0).abs() < 1e-12);
        assert_eq!(d.block_dims(), vec![3]);
    }

    #[test]
    fn diagonal_multiplicities() {
        let g = Matrix::identity(3);
        let d = spectral_decompose(&diag(&[1.0, 2.0, 2.0]), &g, CLUSTER_TOL).unwrap();
        assert_eq!(d.r(), 2);
        assert!((d.lambdas[0] - 1.0).abs() < 1e-12 && (d.lambdas[1] - 2.0).abs() < 1e-12);
        assert_eq!(d.block_dims(), vec![1, 2]);
    }

    #[test]
    fn near_degenerate_pair_is_merged() {
        let g = Matrix::identity(3);
        let d = spectral_decompose(&diag(&[1.0, 1.0 + 1e-12, 3.0]), &g, CLUSTER_TOL).unwrap();
        assert_eq!(d.r(), 2);
        assert_eq!(d.block_dims(), vec![2, 1]);
    }

    #[test]
    fn reconstruction_matches() {
        let g = Matrix::from_rows(&[vec![2.0, 0.5, 0.0], vec![0.5, 1.0, 0.2], vec![0.0, 0.2, 3.0]]);
        let a = SymForm::symmetrize(&Matrix::from_rows(&[
            vec![1.0, 0.3, -0.2],
            vec![0.3, 0.0, 0.7],
            vec![-0.2, 0.7, 2.0],
        ]));
        let d = spectral_decompose(&a, &g, CLUSTER_TOL).unwrap();
        assert!(d.orthonormality_residual() < 1e-12);
        assert!(d.lambdas.windows(2).all(|w| w[0] < w[1]));
        let back = d.reconstruct();
        for i in 0..3 {
            for j in 0..3 {
                assert!((back.get(i, j) - a.get(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn indefinite_metric_is_rejected() {
        let g = Matrix::diagonal(&[1.0, -1.0]);
        assert_eq!(spectral_decompose(&diag(&[1.0, 2.0]), &g, CLUSTER_TOL), Err(Error::NotPositiveDefinite));
    }
}
