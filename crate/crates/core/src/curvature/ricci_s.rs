use nalgebra::{DMatrix, SymmetricEigen};

use crate::algebra::forms::{invariance_residual, SymForm};
use crate::algebra::malgebra::{is_abelian, MAlgebra};
use crate::algebra::space::SpaceSpec;
use crate::codazzi::classify::{classify, residual_scale};
use crate::codazzi::compat::FrameBrackets;
use crate::codazzi::solve::codazzi_residual;
use crate::error::{Error, Result};
use crate::spectral::SpectralDecomp;
use crate::tensor::{CurvTensor, Matrix, ProductTable};

/// `Ric^d_i` on the frame of block `i`, and its trace `s^d_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedRicci {
    /// Entries `Ric^d_i(q_a, q_b)` for frame vectors of the block.
    pub block: Matrix<f64>,
    pub sd: f64,
    /// Largest component outside `m_i` of `R^d(X_i,Y_i)Z_i`.
    pub leak: f64,
    pub preserved: bool,
}

fn frame_coords(decomp: &SpectralDecomp, v: &[f64]) -> Vec<f64> {
    decomp.frame().iter().map(|(_, q)| decomp.inner(q, v)).collect()
}

pub fn restricted_ricci(rd: &CurvTensor<f64>, decomp: &SpectralDecomp, i: usize, tol: f64) -> Result<RestrictedRicci> {
    if i >= decomp.r() {
        return Err(Error::OutOfRange { index: i, limit: decomp.r() });
    }
    let labels: Vec<usize> = decomp.frame().iter().map(|(l, _)| *l).collect();
    let blk = &decomp.blocks[i];
    let d = blk.len();
    let mut m = Matrix::zeros(d, d);
    let mut leak: f64 = 0.0;
    for (b, y) in blk.iter().enumerate() {
        for (c, z) in blk.iter().enumerate() {
            let mut tr = 0.0;
            for (a, x) in blk.iter().enumerate() {
                let coords = frame_coords(decomp, &rd.apply(x, y, z));
                for (f, v) in coords.iter().enumerate() {
                    if labels[f] != i {
                        leak = leak.max(v.abs());
                    }
                }
                tr += decomp.inner(&rd.apply(x, y, z), &blk[a]);
            }
            m.set(b, c, tr);
        }
    }
    let scale = 1.0 + rd.max_magnitude();
    Ok(RestrictedRicci { sd: m.trace(), block: m, leak, preserved: leak <= tol * scale })
}

/// Checks around the difference Ricci curvature of a Codazzi decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct RicciSReport {
    pub cyclic_residual: f64,
    /// Largest eigenvalue of `Ric^d - Ric^d_j` on `m_j` for `j = 1` and `j = r`.
    pub inequality_excess: Vec<(usize, f64)>,
    pub inequality_holds: bool,
    /// `Ric^d - Ric^d_j` on `m_j` for intermediate `j`, recorded as data.
    pub intermediate_excess: Vec<(usize, f64)>,
    pub sd_blocks: Vec<f64>,
    pub sd: f64,
    pub sum_residual: f64,
    /// Both expansions of `Ric^d(Y_j)` against the tensor value.
    pub first_residual: f64,
    pub estimate_residual: f64,
    pub restriction_preserved: bool,
}

impl RicciSReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.cyclic_residual <= tol
            && self.inequality_holds
            && self.sum_residual <= tol
            && self.first_residual <= tol
            && self.estimate_residual <= tol
            && self.restriction_preserved
    }
}

fn ricd_quadratic(ricd: &Matrix<f64>, y: &[f64]) -> f64 {
    ricd.pair(y, y)
}

pub fn ricci_s_checks(
    fb: &FrameBrackets,
    decomp: &SpectralDecomp,
    rd: &CurvTensor<f64>,
    ricd: &Matrix<f64>,
    sd: f64,
    tol: f64,
) -> Result<RicciSReport> {
    let r = decomp.r();
    let n = fb.dim();
    let l = &fb.lambda;
    let lab = &fb.labels;

    let mut cyclic: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let (i, j, k) = (lab[a], lab[b], lab[c]);
                if i == j || j == k || i == k {
                    continue;
                }
                let (li, lj, lk) = (l[a], l[b], l[c]);
                let t1 = (li - lk) * (lj - lk) / (li - lj).powi(2) * fb.at(a, b, c).powi(2);
                let t2 = (lj - li) * (lk - li) / (lj - lk).powi(2) * fb.at(b, c, a).powi(2);
                let t3 = (lk - lj) * (li - lj) / (lk - li).powi(2) * fb.at(c, a, b).powi(2);
                cyclic = cyclic.max((t1 + t2 + t3).abs());
            }
        }
    }

    let restricted: Vec<RestrictedRicci> = (0..r).map(|i| restricted_ricci(rd, decomp, i, tol)).collect::<Result<_>>()?;
    let mut inequality_excess = Vec::new();
    let mut intermediate_excess = Vec::new();
    for (j, rr) in restricted.iter().enumerate() {
        let blk = &decomp.blocks[j];
        let d = blk.len();
        let diff = DMatrix::from_fn(d, d, |b, c| {
            let full = ricd.pair(&blk[b], &blk[c]) + ricd.pair(&blk[c], &blk[b]);
            let part = rr.block.get(b, c) + rr.block.get(c, b);
            (full - part) / 2.0
        });
        let top = SymmetricEigen::new(diff).eigenvalues.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
        if j == 0 || j + 1 == r {
            inequality_excess.push((j, top));
        } else {
            intermediate_excess.push((j, top));
        }
    }
    let scale = 1.0 + rd.max_magnitude();
    let inequality_holds = inequality_excess.iter().all(|(_, e)| *e <= tol * scale);

    let sd_blocks: Vec<f64> = restricted.iter().map(|rr| rr.sd).collect();
    let sum_residual = (sd_blocks.iter().sum::<f64>() - sd).abs();

    let mut first: f64 = 0.0;
    let mut estimate: f64 = 0.0;
    for (j, rr) in restricted.iter().enumerate() {
        for (cidx, &y) in fb.block(j).iter().enumerate() {
            let lj = l[y];
            let full = ricd_quadratic(ricd, &fb.frame[y]);
            let part = *rr.block.get(cidx, cidx);
            let mut s1 = 0.0;
            let mut s2 = 0.0;
            for a in (0..n).filter(|&a| lab[a] != j) {
                for b in (0..n).filter(|&b| lab[b] != j) {
                    let (li, lk) = (l[a], l[b]);
                    s1 += (li - lk) * (lj - lk) / (li - lj).powi(2) * fb.at(a, y, b).powi(2);
                    if lab[a] != lab[b] {
                        s2 += (lk - lj) * (li - lj) / (lk - li).powi(2) * fb.at(b, a, y).powi(2);
                    }
                }
            }
            first = first.max((full - part - 2.0 * s1).abs());
            estimate = estimate.max((full - part + s2).abs());
        }
    }

    Ok(RicciSReport {
        cyclic_residual: cyclic,
        inequality_excess,
        inequality_holds,
        intermediate_excess,
        sd_blocks,
        sd,
        sum_residual,
        first_residual: first,
        estimate_residual: estimate,
        restriction_preserved: restricted.iter().all(|rr| rr.preserved),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum CorollaryOutcome {
    /// `Ric^d` is not symmetric, so it cannot be a Codazzi tensor.
    Skipped(String),
    HypothesesNotMet(String),
    Checked {
        sd_blocks: Vec<f64>,
        sd_last_nonzero: bool,
        non_abelian_blocks: Vec<usize>,
        holds: bool,
    },
}

/// If `Ric^d` is a nonparallel Codazzi tensor with `s^d_i >= 0` for all but
/// the last eigenspace, then `s^d_r != 0` and some eigenspace is non-abelian.
pub fn ricci_corollary_check(
    spec: &SpaceSpec<f64>,
    alg: &MAlgebra<f64>,
    alpha: &ProductTable<f64>,
    rd: &CurvTensor<f64>,
    ricd: &Matrix<f64>,
    tol: f64,
) -> Result<CorollaryOutcome> {
    let scale = 1.0 + ricd.max_magnitude();
    if ricd.max_asymmetry() > tol * scale {
        return Ok(CorollaryOutcome::Skipped(format!("Ric^d not symmetric (asymmetry {:e})", ricd.max_asymmetry())));
    }
    let form = SymForm::symmetrize(ricd);
    let inv = invariance_residual(spec, &form);
    let cod = codazzi_residual(alpha, &form);
    if inv > tol * scale || cod > tol * residual_scale(alpha, &form) {
        return Ok(CorollaryOutcome::HypothesesNotMet("Ric^d is not an invariant Codazzi tensor".into()));
    }
    let class = classify(alg, &spec.gram, alpha, &form, tol)?;
    if class.parallel {
        return Ok(CorollaryOutcome::HypothesesNotMet("Ric^d is parallel".into()));
    }
    let decomp = &class.decomp;
    let r = decomp.r();
    let sd_blocks: Vec<f64> =
        (0..r).map(|i| restricted_ricci(rd, decomp, i, tol).map(|rr| rr.sd)).collect::<Result<_>>()?;
    let sscale = 1.0 + rd.max_magnitude();
    if sd_blocks[..r - 1].iter().any(|s| *s < -tol * sscale) {
        return Ok(CorollaryOutcome::HypothesesNotMet("some s^d_i < 0 with i < r".into()));
    }
    let sd_last_nonzero = sd_blocks[r - 1].abs() > tol * sscale;
    let mut non_abelian_blocks = Vec::new();
    for (i, blk) in decomp.blocks.iter().enumerate() {
        if !is_abelian(alg, blk, tol.max(1e-9))? {
            non_abelian_blocks.push(i);
        }
    }
    let holds = sd_last_nonzero && !non_abelian_blocks.is_empty();
    Ok(CorollaryOutcome::Checked { sd_blocks, sd_last_nonzero, non_abelian_blocks, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::malgebra::project_algebra;
    use crate::connections::levi_civita_product;
    use crate::curvature::tensors::curvature_set;
    use crate::examples;
    use crate::spectral::{spectral_decompose, CLUSTER_TOL};

    fn setup(spec: &SpaceSpec<f64>, a: &SymForm<f64>) -> (MAlgebra<f64>, SpectralDecomp, crate::curvature::CurvatureSet<f64>) {
        let alg = project_algebra(spec);
        let c = curvature_set(&alg, &spec.gram, &levi_civita_product(spec).unwrap()).unwrap();
        let d = spectral_decompose(a, &spec.gram, CLUSTER_TOL).unwrap();
        (alg, d, c)
    }

    #[test]
    fn balanced_su2_ricci_checks() {
        let spec = examples::su2::<f64>(&[1.0, 4.0, 1.0]);
        let a = SymForm::symmetrize(&Matrix::diagonal(&[0.0, 4.0, 2.0]));
        let (alg, d, c) = setup(&spec, &a);
        let fb = FrameBrackets::new(&alg, &d);
        let rep = ricci_s_checks(&fb, &d, &c.rd, &c.ricd, c.sd, 1e-9).unwrap();
        assert!(rep.passed(1e-10), "{rep:?}");
        // one-dimensional eigenspaces carry no restricted curvature
        assert!(rep.sd_blocks.iter().all(|s| s.abs() < 1e-12));
        assert!(c.sd.abs() < 1e-12);
    }

    #[test]
    fn single_block_restriction_is_everything() {
        let spec = examples::su2::<f64>(&[1.0, 1.0, 2.0]);
        let g = SymForm::symmetrize(&spec.gram);
        let (_, d, c) = setup(&spec, &g);
        let rr = restricted_ricci(&c.rd, &d, 0, 1e-9).unwrap();
        assert!(rr.preserved);
        assert!((rr.sd - c.sd).abs() < 1e-12);
        assert!(matches!(restricted_ricci(&c.rd, &d, 1, 1e-9), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn corollary_hypotheses() {
        for spec in [examples::abelian::<f64>(3), examples::su2(&[1.0, 1.0, 1.0])] {
            let alg = project_algebra(&spec);
            let alpha = levi_civita_product(&spec).unwrap();
            let c = curvature_set(&alg, &spec.gram, &alpha).unwrap();
            let out = ricci_corollary_check(&spec, &alg, &alpha, &c.rd, &c.ricd, 1e-9).unwrap();
            assert!(matches!(out, CorollaryOutcome::HypothesesNotMet(_)), "{out:?}");
        }
    }
}
