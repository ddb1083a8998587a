use crate::algebra::malgebra::MAlgebra;
use crate::error::{Error, Result};
use crate::spectral::SpectralDecomp;
use crate::tensor::Matrix;

/// Both sides of the block splitting of `beta(Z, Z)` for one block vector `Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct KillingSplit {
    /// `tr(ad_m(Z)^2)`.
    pub beta: f64,
    /// Killing form of `(m_k, [.,.]_k)` at `Z`.
    pub beta_block: f64,
    /// `tr[(pi_k^perp ad_m(Z)|_{m_k^perp})^2]`.
    pub correction: f64,
    pub residual: f64,
}

/// `ad_m(z)` expressed in the orthonormal frame of a decomposition.
pub(crate) fn ad_in_frame(alg: &MAlgebra<f64>, decomp: &SpectralDecomp, z: &[f64]) -> Matrix<f64> {
    let frame = decomp.frame();
    let n = frame.len();
    let mut a = Matrix::zeros(n, n);
    for (b, (_, qb)) in frame.iter().enumerate() {
        let img = alg.bracket(z, qb);
        for (r, (_, qa)) in frame.iter().enumerate() {
            a.set(r, b, decomp.inner(qa, &img));
        }
    }
    a
}

pub(crate) fn sub_block(a: &Matrix<f64>, rows: &[usize], cols: &[usize]) -> Matrix<f64> {
    let mut m = Matrix::zeros(rows.len(), cols.len());
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            m.set(i, j, *a.get(r, c));
        }
    }
    m
}

pub(crate) fn frame_indices(decomp: &SpectralDecomp, k: usize) -> (Vec<usize>, Vec<usize>) {
    let labels: Vec<usize> = decomp.frame().iter().map(|(i, _)| *i).collect();
    let inside = (0..labels.len()).filter(|&a| labels[a] == k).collect();
    let outside = (0..labels.len()).filter(|&a| labels[a] != k).collect();
    (inside, outside)
}

/// Evaluate both sides of `beta(Z,Z) = beta_k(Z,Z) + tr[(pi_k^perp ad(Z)|perp)^2]`
/// for each basis vector `Z` of block `k`.
///
/// The identity holds when `m_k` is a subalgebra of `(m, [.,.]_m)`, which is
/// the case for every eigenspace of an invariant Codazzi tensor.
pub fn killing_split(alg: &MAlgebra<f64>, decomp: &SpectralDecomp, k: usize) -> Result<Vec<KillingSplit>> {
    if k >= decomp.r() {
        return Err(Error::OutOfRange { index: k, limit: decomp.r() });
    }
    let (inside, outside) = frame_indices(decomp, k);
    Ok(decomp.blocks[k]
        .iter()
        .map(|z| {
            let a = ad_in_frame(alg, decomp, z);
            let beta = a.mul(&a).trace();
            let blk = sub_block(&a, &inside, &inside);
            let perp = sub_block(&a, &outside, &outside);
            let beta_block = blk.mul(&blk).trace();
            let correction = perp.mul(&perp).trace();
            KillingSplit { beta, beta_block, correction, residual: (beta - beta_block - correction).abs() }
        })
        .collect())
}
