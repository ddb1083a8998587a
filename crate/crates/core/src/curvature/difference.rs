use crate::algebra::malgebra::MAlgebra;
use crate::codazzi::compat::FrameBrackets;
use crate::curvature::tensors::sectional;
use crate::error::{Error, Result};
use crate::spectral::{orthonormal_frame, SpectralDecomp};
use crate::tensor::{CurvTensor, Matrix};

/// Closed form of `<R^d(X_i,Y_j)Y_j,X_i>` for frame vectors `q_a`, `q_b` of
/// distinct eigenspaces of a Codazzi tensor.
pub fn sec_d_eigenformula(fb: &FrameBrackets, a: usize, b: usize) -> Result<f64> {
    let (i, j) = (fb.labels[a], fb.labels[b]);
    if i == j {
        return Err(Error::SameBlock(i));
    }
    let l = |blk: usize| fb.lambda[fb.block(blk)[0]];
    let (li, lj) = (fb.lambda[a], fb.lambda[b]);
    let r = fb.labels.iter().max().map_or(0, |m| m + 1);
    let mut sum = 0.0;
    for k in (0..r).filter(|&k| k != j) {
        let lk = l(k);
        sum += (li - lk) * (lj - lk) * fb.block_norm_sq(a, b, k);
    }
    Ok(2.0 / (li - lj).powi(2) * sum)
}

/// Largest difference between the closed form and the tensor value over
/// frame pairs in distinct blocks.
pub fn sec_d_residual(fb: &FrameBrackets, rd: &CurvTensor<f64>, gram: &Matrix<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for a in 0..fb.dim() {
        for b in 0..fb.dim() {
            if fb.labels[a] == fb.labels[b] {
                continue;
            }
            let formula = sec_d_eigenformula(fb, a, b).expect("distinct blocks");
            let (x, y) = (&fb.frame[a], &fb.frame[b]);
            let direct = gram.pair(&rd.apply(x, y, y), x);
            worst = worst.max((formula - direct).abs());
        }
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessSource {
    /// From the smallest non-subalgebra `m_1 + ... + m_rho`.
    Rho,
    /// From the widest non-subalgebra pair `m_mu + m_nu`.
    MuNu,
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `K^d` of the plane, evaluated directly from the tensor.
    pub kd: f64,
    pub source: WitnessSource,
}

#[derive(Debug, Clone, PartialEq)]
pub enum KdSigns {
    Parallel,
    Found {
        positive: Plane,
        negative: Plane,
        rho: Option<usize>,
        mu_nu: Option<(usize, usize)>,
    },
    /// The search failed to find one of the signs.
    Missing {
        positive: Option<Plane>,
        negative: Option<Plane>,
        rho: Option<usize>,
        mu_nu: Option<(usize, usize)>,
    },
}

fn blocks_subalgebra(fb: &FrameBrackets, blocks: &[usize], tol: f64) -> bool {
    let inside: Vec<usize> = (0..fb.dim()).filter(|&a| blocks.contains(&fb.labels[a])).collect();
    let outside: Vec<usize> = (0..fb.dim()).filter(|&a| !blocks.contains(&fb.labels[a])).collect();
    inside
        .iter()
        .all(|&a| inside.iter().all(|&b| outside.iter().all(|&c| fb.at(a, b, c).abs() <= tol)))
}

fn kd(rd: &CurvTensor<f64>, gram: &Matrix<f64>, x: &[f64], y: &[f64]) -> f64 {
    sectional(rd, gram, x, y).unwrap_or(0.0)
}

/// Planes of strictly positive and strictly negative difference curvature
/// for a nonparallel Codazzi tensor, following the structured construction
/// first and scanning frame pairs otherwise. `margin` is the strictness bound.
pub fn kd_sign_search(
    fb: &FrameBrackets,
    rd: &CurvTensor<f64>,
    gram: &Matrix<f64>,
    parallel: bool,
    tol: f64,
    margin: f64,
) -> KdSigns {
    if parallel {
        return KdSigns::Parallel;
    }
    let r = fb.labels.iter().max().map_or(0, |m| m + 1);
    let btol = tol * (1.0 + fb.c.max_magnitude());
    let plane = |a: usize, b: usize, source| Plane {
        x: fb.frame[a].clone(),
        y: fb.frame[b].clone(),
        kd: kd(rd, gram, &fb.frame[a], &fb.frame[b]),
        source,
    };
    let bracket_nonzero = |a: usize, b: usize, skip: &[usize]| {
        (0..fb.dim()).any(|c| !skip.contains(&fb.labels[c]) && fb.at(a, b, c).abs() > btol)
    };

    let rho = (2..r).find(|&p| {
        let first: Vec<usize> = (0..p).collect();
        !blocks_subalgebra(fb, &first, btol)
    });
    // rho counts blocks, so the block index is rho - 1
    let mut positive: Option<Plane> = None;
    if let Some(p) = rho {
        let top = p - 1;
        for a in (0..fb.dim()).filter(|&a| fb.labels[a] < top) {
            for &b in &fb.block(top) {
                if bracket_nonzero(a, b, &[]) {
                    let cand = plane(a, b, WitnessSource::Rho);
                    if positive.as_ref().is_none_or(|p| cand.kd > p.kd) {
                        positive = Some(cand);
                    }
                }
            }
        }
    }

    let mut mu_nu: Option<(usize, usize)> = None;
    'outer: for width in (1..r).rev() {
        for mu in 0..(r - width) {
            let nu = mu + width;
            if !blocks_subalgebra(fb, &[mu, nu], btol) {
                mu_nu = Some((mu, nu));
                break 'outer;
            }
        }
    }
    let mut negative: Option<Plane> = None;
    if let Some((mu, nu)) = mu_nu {
        for &a in &fb.block(mu) {
            for &b in &fb.block(nu) {
                if bracket_nonzero(a, b, &[mu, nu]) {
                    let cand = plane(a, b, WitnessSource::MuNu);
                    if negative.as_ref().is_none_or(|p| cand.kd < p.kd) {
                        negative = Some(cand);
                    }
                }
            }
        }
    }

    let strictly = |p: &Option<Plane>, sign: f64| p.as_ref().is_some_and(|p| sign * p.kd > margin);
    if !strictly(&positive, 1.0) || !strictly(&negative, -1.0) {
        for a in 0..fb.dim() {
            for b in (a + 1)..fb.dim() {
                let cand = plane(a, b, WitnessSource::Exhaustive);
                if !strictly(&positive, 1.0) && cand.kd > margin {
                    positive = Some(cand.clone());
                }
                if !strictly(&negative, -1.0) && cand.kd < -margin {
                    negative = Some(cand);
                }
            }
        }
    }
    let rho_block = rho.map(|p| p - 1);
    match (positive, negative) {
        (Some(p), Some(n)) if p.kd > margin && n.kd < -margin => {
            KdSigns::Found { positive: p, negative: n, rho: rho_block, mu_nu }
        }
        (p, n) => KdSigns::Missing { positive: p, negative: n, rho: rho_block, mu_nu },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NaturallyReductive {
    pub holds: bool,
    /// Largest `|<[X,Y]_m,Z> + <Y,[X,Z]_m>|` over basis triples.
    pub identity_residual: f64,
    /// Largest `|K^d - ||[X,Y]_m||^2 / 4|` over orthonormal frame planes,
    /// evaluated only when the identity holds.
    pub kd_formula_residual: Option<f64>,
    pub kd_nonnegative: Option<bool>,
}

pub fn naturally_reductive_check(
    alg: &MAlgebra<f64>,
    gram: &Matrix<f64>,
    rd: &CurvTensor<f64>,
    tol: f64,
) -> Result<NaturallyReductive> {
    let n = alg.dim;
    let mut worst: f64 = 0.0;
    for x in 0..n {
        let ad = gram.mul(&alg.ad(&alg.basis(x)));
        worst = worst.max(ad.add(&ad.transpose()).max_magnitude());
    }
    let scale = 1.0 + alg.bracket_m.max_magnitude() * gram.max_magnitude();
    let holds = worst <= tol * scale;
    if !holds {
        return Ok(NaturallyReductive { holds, identity_residual: worst, kd_formula_residual: None, kd_nonnegative: None });
    }
    let frame = orthonormal_frame(gram)?;
    let mut resid: f64 = 0.0;
    let mut nonneg = true;
    for a in 0..n {
        for b in (a + 1)..n {
            let value = kd(rd, gram, &frame[a], &frame[b]);
            let br = alg.bracket(&frame[a], &frame[b]);
            let expected = gram.pair(&br, &br) / 4.0;
            resid = resid.max((value - expected).abs());
            nonneg &= value >= -tol * scale;
        }
    }
    Ok(NaturallyReductive {
        holds,
        identity_residual: worst,
        kd_formula_residual: Some(resid),
        kd_nonnegative: Some(nonneg),
    })
}

/// Decomposition-free helper used by reports: `K^d` on each frame pair.
pub fn kd_on_frame(decomp: &SpectralDecomp, rd: &CurvTensor<f64>) -> Vec<(usize, usize, f64)> {
    let frame: Vec<&[f64]> = decomp.frame().into_iter().map(|(_, v)| v).collect();
    let mut out = Vec::new();
    for a in 0..frame.len() {
        for b in (a + 1)..frame.len() {
            out.push((a, b, kd(rd, &decomp.gram, frame[a], frame[b])));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::forms::SymForm;
    use crate::algebra::malgebra::project_algebra;
    use crate::connections::levi_civita_product;
    use crate::curvature::tensors::curvature_set;
    use crate::examples;
    use crate::spectral::{spectral_decompose, CLUSTER_TOL};

    #[test]
    fn bi_invariant_su2_is_naturally_reductive() {
        let spec = examples::su2::<f64>(&[1.0, 1.0, 1.0]);
        let alg = project_algebra(&spec);
        let c = curvature_set(&alg, &spec.gram, &levi_civita_product(&spec).unwrap()).unwrap();
        let nr = naturally_reductive_check(&alg, &spec.gram, &c.rd, 1e-9).unwrap();
        assert!(nr.holds && nr.kd_nonnegative == Some(true));
        assert!(nr.kd_formula_residual.unwrap() < 1e-15);
        assert_eq!(kd(&c.rd, &spec.gram, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]), 0.25);
    }

    #[test]
    fn berger_metric_is_not_naturally_reductive() {
        let spec = examples::su2::<f64>(&[1.0, 1.0, 2.0]);
        let alg = project_algebra(&spec);
        let c = curvature_set(&alg, &spec.gram, &levi_civita_product(&spec).unwrap()).unwrap();
        let nr = naturally_reductive_check(&alg, &spec.gram, &c.rd, 1e-9).unwrap();
        assert!(!nr.holds && nr.identity_residual > 0.5);
    }

    #[test]
    fn balanced_su2_signs() {
        let spec = examples::su2::<f64>(&[1.0, 4.0, 1.0]);
        let alg = project_algebra(&spec);
        let c = curvature_set(&alg, &spec.gram, &levi_civita_product(&spec).unwrap()).unwrap();
        let a = SymForm::symmetrize(&Matrix::diagonal(&[0.0, 4.0, 2.0]));
        let decomp = spectral_decompose(&a, &spec.gram, CLUSTER_TOL).unwrap();
        let fb = FrameBrackets::new(&alg, &decomp);
        assert!(sec_d_residual(&fb, &c.rd, &spec.gram) < 1e-12);
        let KdSigns::Found { positive, negative, .. } = kd_sign_search(&fb, &c.rd, &spec.gram, false, 1e-9, 1e-8) else {
            panic!("signs not found")
        };
        assert!(positive.kd > 1e-8 && negative.kd < -1e-8);
        assert_eq!(positive.source, WitnessSource::Rho);
        assert_eq!(negative.source, WitnessSource::MuNu);
        assert!(matches!(kd_sign_search(&fb, &c.rd, &spec.gram, true, 1e-9, 1e-8), KdSigns::Parallel));
    }
}
