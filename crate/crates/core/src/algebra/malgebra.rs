use crate::algebra::space::{ad_h_block, m_bracket_table, SpaceSpec};
use crate::error::{Error, Result};
use crate::scalar::{basis_vector, in_span, rank, Scalar};
use crate::tensor::{Bilinear, Matrix};

/// The non-associative algebra `(m, [.,.]_m)` together with the `h`-parts of
/// brackets and the isotropy action of `h` on `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct MAlgebra<S> {
    pub dim: usize,
    pub dim_h: usize,
    /// `[X, Y]_m`.
    pub bracket_m: Bilinear<S>,
    /// `[X, Y]_h`, with values in `h` coordinates.
    pub bracket_h: Bilinear<S>,
    /// `ad(W)|_m` for each basis vector `W` of `h`.
    pub h_action: Vec<Matrix<S>>,
}

/// Split the structure constants along `g = h + m`.
pub fn project_algebra<S: Scalar>(spec: &SpaceSpec<S>) -> MAlgebra<S> {
    let dh = spec.dim_h;
    let dm = spec.dim_m;
    let mut bracket_h = Bilinear::zeros(dm, dh);
    for i in 0..dm {
        for j in 0..dm {
            for k in 0..dh {
                bracket_h.set(i, j, k, spec.structure.get(dh + i, dh + j, k).clone());
            }
        }
    }
    MAlgebra {
        dim: dm,
        dim_h: dh,
        bracket_m: m_bracket_table(spec),
        bracket_h,
        h_action: (0..dh).map(|w| ad_h_block(spec, w)).collect(),
    }
}

impl<S: Scalar> MAlgebra<S> {
    pub fn bracket(&self, x: &[S], y: &[S]) -> Vec<S> {
        self.bracket_m.apply(x, y)
    }

    pub fn bracket_h(&self, x: &[S], y: &[S]) -> Vec<S> {
        self.bracket_h.apply(x, y)
    }

    /// `[W, Z]` for `W` in `h` (given in `h` coordinates) and `Z` in `m`.
    pub fn act(&self, w: &[S], z: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.dim];
        for (a, wa) in w.iter().enumerate() {
            if wa.is_exact_zero() {
                continue;
            }
            let img = self.h_action[a].mul_vec(z);
            for (o, v) in out.iter_mut().zip(img) {
                *o = o.clone() + wa.clone() * v;
            }
        }
        out
    }

    /// Matrix of `ad_m(X) = [X, .]_m`.
    pub fn ad(&self, x: &[S]) -> Matrix<S> {
        self.bracket_m.left_matrix(x)
    }

    pub fn basis(&self, i: usize) -> Vec<S> {
        basis_vector(self.dim, i)
    }

    pub fn to_f64(&self) -> MAlgebra<f64> {
        MAlgebra {
            dim: self.dim,
            dim_h: self.dim_h,
            bracket_m: self.bracket_m.map(Scalar::to_f64),
            bracket_h: self.bracket_h.map(Scalar::to_f64),
            h_action: self.h_action.iter().map(|m| m.map(Scalar::to_f64)).collect(),
        }
    }

    /// Cyclic sums of `[[X,Y]_m, Z]_m` on basis triples; zero iff `[.,.]_m`
    /// satisfies the Jacobi identity.
    pub fn jacobi_residual(&self) -> f64 {
        crate::algebra::space::jacobi_residuals(&self.bracket_m)
            .iter()
            .map(Scalar::magnitude)
            .fold(0.0, f64::max)
    }
}

/// `beta(X, Y) = tr(ad_m(X) ad_m(Y))`.
pub fn killing_form<S: Scalar>(alg: &MAlgebra<S>) -> crate::algebra::forms::SymForm<S> {
    let n = alg.dim;
    let ads: Vec<Matrix<S>> = (0..n).map(|i| alg.ad(&alg.basis(i))).collect();
    crate::algebra::forms::SymForm::from_fn(n, |i, j| ads[i].mul(&ads[j]).trace())
}

fn check_subspace<S: Scalar>(alg: &MAlgebra<S>, subspace: &[Vec<S>], tol: f64) -> Result<()> {
    for v in subspace {
        if v.len() != alg.dim {
            return Err(Error::Shape(format!("subspace vector of length {} in dimension {}", v.len(), alg.dim)));
        }
    }
    let r = rank(subspace, alg.dim, tol);
    if r < subspace.len() {
        return Err(Error::RankDeficient { rank: r, cols: subspace.len() });
    }
    Ok(())
}

/// `[m, S]_m` contained in `S`.
pub fn is_ideal<S: Scalar>(alg: &MAlgebra<S>, subspace: &[Vec<S>], tol: f64) -> Result<bool> {
    check_subspace(alg, subspace, tol)?;
    for i in 0..alg.dim {
        let e = alg.basis(i);
        for s in subspace {
            if !in_span(subspace, &alg.bracket(&e, s), tol) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `[S, S]_m` contained in `S`.
pub fn is_subalgebra<S: Scalar>(alg: &MAlgebra<S>, subspace: &[Vec<S>], tol: f64) -> Result<bool> {
    check_subspace(alg, subspace, tol)?;
    for a in subspace {
        for b in subspace {
            if !in_span(subspace, &alg.bracket(a, b), tol) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `[S, S]_m = 0`.
pub fn is_abelian<S: Scalar>(alg: &MAlgebra<S>, subspace: &[Vec<S>], tol: f64) -> Result<bool> {
    check_subspace(alg, subspace, tol)?;
    Ok(subspace
        .iter()
        .all(|a| subspace.iter().all(|b| alg.bracket(a, b).iter().all(|x| x.is_zero_within(tol)))))
}

fn span_bracket<S: Scalar>(alg: &MAlgebra<S>, p: &[Vec<S>], q: &[Vec<S>], acc: &mut Vec<Vec<S>>) {
    for a in p {
        for b in q {
            let v = alg.bracket(a, b);
            if !v.iter().all(Scalar::is_exact_zero) {
                acc.push(v);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Nilpotency {
    pub nilpotent: bool,
    /// Least `t` with `m^t = 0`.
    pub degree: Option<usize>,
    /// Dimensions of `m^1, m^2, ...` as computed.
    pub chain_dims: Vec<usize>,
}

/// Descending chain `m^1 = m`, `m^t = sum_{p+q=t} [m^p, m^q]_m`.
///
/// The chain is monotone, and once `m^{2k} = m^k` every later term equals
/// `m^k`, so a nonzero repeat at a doubled index proves non-nilpotency.
pub fn is_nilpotent<S: Scalar>(alg: &MAlgebra<S>, tol: f64) -> Nilpotency {
    let n = alg.dim;
    let mut powers: Vec<Vec<Vec<S>>> = vec![Vec::new(), (0..n).map(|i| alg.basis(i)).collect()];
    let cap = 1usize << (n.min(16) + 1);
    let mut t = 2;
    loop {
        let mut gens = Vec::new();
        for p in 1..=t / 2 {
            span_bracket(alg, &powers[p], &powers[t - p], &mut gens);
        }
        let basis = if gens.is_empty() { Vec::new() } else { S::row_basis(&gens, n, tol) };
        powers.push(basis);
        let dims = || powers[1..].iter().map(Vec::len).collect::<Vec<_>>();
        if powers[t].is_empty() {
            return Nilpotency { nilpotent: true, degree: Some(t), chain_dims: dims() };
        }
        if t % 2 == 0 && powers[t].len() == powers[t / 2].len() {
            return Nilpotency { nilpotent: false, degree: None, chain_dims: dims() };
        }
        if t >= cap {
            return Nilpotency { nilpotent: false, degree: None, chain_dims: dims() };
        }
        t += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;

    #[test]
    fn s2_projection() {
        let alg = project_algebra(&examples::s2::<f64>());
        assert!(alg.bracket_m.data.iter().all(|&x| x == 0.0));
        assert_eq!(alg.bracket_h.basis_product(0, 1), vec![1.0]);
        assert_eq!(alg.h_action[0], Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]));
    }

    #[test]
    fn su2_projection_has_no_h_part() {
        let spec = examples::su2(&[1.0, 1.0, 1.0]);
        let alg = project_algebra(&spec);
        assert!(alg.bracket_h.data.is_empty());
        assert_eq!(alg.bracket_m, spec.structure);
    }

    #[test]
    fn heisenberg_projection_copies_table() {
        let alg = project_algebra(&examples::heisenberg::<f64>());
        assert_eq!(alg.bracket_m.basis_product(0, 1), vec![0.0, 0.0, 1.0]);
        let nonzero = alg.bracket_m.data.iter().filter(|x| **x != 0.0).count();
        assert_eq!(nonzero, 2);
    }

    #[test]
    fn killing_forms() {
        let su2 = project_algebra(&examples::su2(&[1.0, 1.0, 1.0]));
        let b = killing_form(&su2);
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { -2.0 } else { 0.0 };
                assert_eq!(*b.get(i, j), e);
            }
        }
        let heis = project_algebra(&examples::heisenberg::<f64>());
        assert!(killing_form(&heis).to_matrix().data.iter().all(|&x| x == 0.0));
        let ab = project_algebra(&examples::abelian::<f64>(3));
        assert!(killing_form(&ab).to_matrix().data.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn nilpotency_degrees() {
        let tol = 1e-9;
        let ab = is_nilpotent(&project_algebra(&examples::abelian::<f64>(3)), tol);
        assert_eq!((ab.nilpotent, ab.degree), (true, Some(2)));
        let h = is_nilpotent(&project_algebra(&examples::heisenberg::<f64>()), tol);
        assert_eq!((h.nilpotent, h.degree), (true, Some(3)));
        assert_eq!(h.chain_dims, vec![3, 1, 0]);
        let su2 = is_nilpotent(&project_algebra(&examples::su2(&[1.0, 1.0, 1.0])), tol);
        assert!(!su2.nilpotent);
        assert_eq!(su2.degree, None);
        let aff = is_nilpotent(&project_algebra(&examples::affine_line::<f64>()), tol);
        assert!(!aff.nilpotent);
    }

    #[test]
    fn ideals_and_subalgebras() {
        let tol = 1e-9;
        let heis = project_algebra(&examples::heisenberg::<f64>());
        let e3 = vec![vec![0.0, 0.0, 1.0]];
        assert!(is_ideal(&heis, &e3, tol).unwrap());
        let su2 = project_algebra(&examples::su2(&[1.0, 1.0, 1.0]));
        assert!(is_subalgebra(&su2, &e3, tol).unwrap());
        assert!(!is_ideal(&su2, &e3, tol).unwrap());
        assert!(is_abelian(&su2, &e3, tol).unwrap());
        let full: Vec<Vec<f64>> = (0..3).map(|i| su2.basis(i)).collect();
        assert!(is_ideal(&su2, &full, tol).unwrap());
        assert!(!is_abelian(&su2, &full, tol).unwrap());
        let dependent = vec![vec![1.0, 0.0, 0.0], vec![2.0, 0.0, 0.0]];
        assert!(matches!(is_ideal(&su2, &dependent, tol), Err(Error::RankDeficient { .. })));
    }
}
