use crate::algebra::malgebra::MAlgebra;
use crate::connections::{canonical_product, curvature};
use crate::error::{Error, Result};
use crate::scalar::{basis_vector, Scalar};
use crate::tensor::{CurvTensor, Matrix, ProductTable};

/// `<R(X,Y)Y,X>` after orthonormalizing `(x, y)` against the metric.
pub fn sectional(r: &CurvTensor<f64>, gram: &Matrix<f64>, x: &[f64], y: &[f64]) -> Result<f64> {
    let nx = gram.pair(x, x);
    if nx <= 0.0 {
        return Err(Error::DependentVectors);
    }
    let u: Vec<f64> = x.iter().map(|v| v / nx.sqrt()).collect();
    let c = gram.pair(&u, y);
    let w: Vec<f64> = y.iter().zip(&u).map(|(b, a)| b - c * a).collect();
    let nw = gram.pair(&w, &w);
    let ny = gram.pair(y, y);
    if nw <= 1e-24 * ny.max(1.0) {
        return Err(Error::DependentVectors);
    }
    let v: Vec<f64> = w.iter().map(|t| t / nw.sqrt()).collect();
    Ok(gram.pair(&r.apply(&u, &v, &v), &u))
}

/// `Ric(Y,Z) = tr(X -> R(X,Y)Z)`; not symmetrized.
pub fn ricci<S: Scalar>(r: &CurvTensor<S>) -> Matrix<S> {
    let n = r.dim;
    let mut m = Matrix::zeros(n, n);
    for y in 0..n {
        for z in 0..n {
            let t = (0..n).fold(S::zero(), |acc, x| acc + r.get(x, y, z, x).clone());
            m.set(y, z, t);
        }
    }
    m
}

/// Metric trace of a twice covariant tensor.
pub fn scalar<S: Scalar>(ric: &Matrix<S>, gram: &Matrix<S>) -> Result<S> {
    let ginv = gram.inverse().ok_or(Error::NotPositiveDefinite)?;
    Ok(ginv.mul(ric).trace())
}

/// `R`, `R0` and `R^d = R - R0` with their Ricci and scalar curvatures.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureSet<S> {
    pub r: CurvTensor<S>,
    pub r0: CurvTensor<S>,
    pub rd: CurvTensor<S>,
    pub ric: Matrix<S>,
    pub ric0: Matrix<S>,
    pub ricd: Matrix<S>,
    pub s: S,
    pub s0: S,
    pub sd: S,
}

pub fn curvature_set<S: Scalar>(alg: &MAlgebra<S>, gram: &Matrix<S>, alpha: &ProductTable<S>) -> Result<CurvatureSet<S>> {
    let r = curvature(alg, alpha);
    let r0 = curvature(alg, &canonical_product(alg.dim));
    let rd = r.sub(&r0);
    let ric = ricci(&r);
    let ric0 = ricci(&r0);
    let ricd = ricci(&rd);
    let s = scalar(&ric, gram)?;
    let s0 = scalar(&ric0, gram)?;
    let sd = s.clone() - s0.clone();
    Ok(CurvatureSet { r, r0, rd, ric, ric0, ricd, s, s0, sd })
}

impl<S: Scalar> CurvatureSet<S> {
    pub fn to_f64(&self) -> CurvatureSet<f64> {
        CurvatureSet {
            r: self.r.map(Scalar::to_f64),
            r0: self.r0.map(Scalar::to_f64),
            rd: self.rd.map(Scalar::to_f64),
            ric: self.ric.map(Scalar::to_f64),
            ric0: self.ric0.map(Scalar::to_f64),
            ricd: self.ricd.map(Scalar::to_f64),
            s: self.s.to_f64(),
            s0: self.s0.to_f64(),
            sd: self.sd.to_f64(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BianchiCheck {
    pub bianchi: bool,
    pub bianchi_residual: f64,
    pub pair_skew: bool,
    pub pair_skew_residual: f64,
    /// Whether `[.,.]_m` satisfies the Jacobi identity.
    pub jacobi: bool,
    pub jacobi_residual: f64,
}

impl BianchiCheck {
    /// Bianchi identity of `R0` holds exactly when `[.,.]_m` is a Lie bracket.
    pub fn equivalence_holds(&self) -> bool {
        self.bianchi == self.jacobi
    }
}

/// First Bianchi identity and pair skew-symmetry of a curvature tensor,
/// alongside the Jacobi identity of `[.,.]_m`.
pub fn bianchi_check<S: Scalar>(r0: &CurvTensor<S>, alg: &MAlgebra<S>, gram: &Matrix<S>, tol: f64) -> BianchiCheck {
    let n = r0.dim;
    let mut bianchi: f64 = 0.0;
    let mut bianchi_ok = true;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let v = r0.get(i, j, k, l).clone() + r0.get(j, k, i, l).clone() + r0.get(k, i, j, l).clone();
                    bianchi = bianchi.max(v.magnitude());
                    bianchi_ok &= v.is_zero_within(tol);
                }
            }
        }
    }
    let mut skew: f64 = 0.0;
    let mut skew_ok = true;
    for i in 0..n {
        for j in 0..n {
            // <R(e_i,e_j)e_k, e_w> as a matrix in (k, w)
            let mut m = Matrix::zeros(n, n);
            for k in 0..n {
                let img: Vec<S> = (0..n).map(|l| r0.get(i, j, k, l).clone()).collect();
                let low = gram.mul_vec(&img);
                for (w, v) in low.into_iter().enumerate() {
                    m.set(k, w, v);
                }
            }
            let sum = m.add(&m.transpose());
            skew = skew.max(sum.max_magnitude());
            skew_ok &= sum.data.iter().all(|v| v.is_zero_within(tol));
        }
    }
    let jac = crate::algebra::space::jacobi_residuals(&alg.bracket_m);
    let jacobi_residual = jac.iter().map(Scalar::magnitude).fold(0.0, f64::max);
    let jacobi = jac.iter().all(|v| v.is_zero_within(tol));
    BianchiCheck {
        bianchi: bianchi_ok,
        bianchi_residual: bianchi,
        pair_skew: skew_ok,
        pair_skew_residual: skew,
        jacobi,
        jacobi_residual,
    }
}

/// Sectional curvatures of all coordinate planes of an orthonormal frame.
pub fn frame_sectionals(r: &CurvTensor<f64>, gram: &Matrix<f64>, frame: &[Vec<f64>]) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for a in 0..frame.len() {
        for b in (a + 1)..frame.len() {
            if let Ok(k) = sectional(r, gram, &frame[a], &frame[b]) {
                out.push((a, b, k));
            }
        }
    }
    out
}

/// Basis planes `(e_i, e_j)` as vector pairs.
pub fn coordinate_plane<S: Scalar>(n: usize, i: usize, j: usize) -> (Vec<S>, Vec<S>) {
    (basis_vector(n, i), basis_vector(n, j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::malgebra::project_algebra;
    use crate::connections::levi_civita_product;
    use crate::examples;
    use crate::Rational;

    #[test]
    fn su2_curvatures_exact() {
        let one = Rational::from_i64(1);
        let spec = examples::su2(&[one.clone(), one.clone(), one]);
        let alg = project_algebra(&spec);
        let alpha = levi_civita_product(&spec).unwrap();
        let c = curvature_set(&alg, &spec.gram, &alpha).unwrap();
        let half = Rational::new(1.into(), 2.into());
        assert_eq!(c.ric, Matrix::identity(3).scale(&half));
        assert_eq!(c.s, Rational::new(3.into(), 2.into()));
        assert_eq!(c.r0.max_magnitude(), 0.0);
        let f = c.to_f64();
        let (x, y) = coordinate_plane::<f64>(3, 0, 1);
        assert_eq!(sectional(&f.r, &spec.gram.map(Scalar::to_f64), &x, &y).unwrap(), 0.25);
    }

    #[test]
    fn sphere_curvatures() {
        let spec = examples::s2::<f64>();
        let alg = project_algebra(&spec);
        let alpha = levi_civita_product(&spec).unwrap();
        let c = curvature_set(&alg, &spec.gram, &alpha).unwrap();
        assert_eq!(sectional(&c.r, &spec.gram, &[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(sectional(&c.r0, &spec.gram, &[1.0, 0.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(c.ric, Matrix::identity(2));
        assert_eq!(c.s, 2.0);
        assert_eq!(c.rd.max_magnitude(), 0.0);
        let b = bianchi_check(&c.r0, &alg, &spec.gram, 1e-12);
        assert!(b.bianchi && b.pair_skew && b.jacobi);
        assert!(sectional(&c.r, &spec.gram, &[1.0, 0.0], &[2.0, 0.0]).is_err());
    }

    #[test]
    fn so4_so2_breaks_bianchi() {
        let spec = examples::so4_so2::<f64>();
        let alg = project_algebra(&spec);
        let c = curvature_set(&alg, &spec.gram, &levi_civita_product(&spec).unwrap()).unwrap();
        let b = bianchi_check(&c.r0, &alg, &spec.gram, 1e-9);
        assert!(!b.bianchi && !b.jacobi && b.pair_skew && b.equivalence_holds());
    }
}
