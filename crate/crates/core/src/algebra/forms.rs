use crate::algebra::space::SpaceSpec;
use crate::scalar::{dot, in_span, Scalar};
use crate::tensor::Matrix;

/// Symmetric bilinear form on `m`, stored as its upper triangle so that it is
/// symmetric by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymForm<S> {
    dim: usize,
    upper: Vec<S>,
}

/// Position of `(p, q)`, `p <= q`, in the upper-triangle ordering.
#[inline]
pub fn sym_index(n: usize, p: usize, q: usize) -> usize {
    let (p, q) = if p <= q { (p, q) } else { (q, p) };
    p * (2 * n - p + 1) / 2 + (q - p)
}

impl<S: Scalar> SymForm<S> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, upper: vec![S::zero(); dim * (dim + 1) / 2] }
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> S) -> Self {
        let mut upper = Vec::with_capacity(dim * (dim + 1) / 2);
        for p in 0..dim {
            for q in p..dim {
                upper.push(f(p, q));
            }
        }
        Self { dim, upper }
    }

    /// Upper triangle of `m`; the lower triangle is ignored.
    pub fn from_upper(m: &Matrix<S>) -> Self {
        Self::from_fn(m.rows, |p, q| m.get(p, q).clone())
    }

    /// Symmetric part `(M + M^T) / 2`.
    pub fn symmetrize(m: &Matrix<S>) -> Self {
        Self::from_fn(m.rows, |p, q| (m.get(p, q).clone() + m.get(q, p).clone()) * S::half())
    }

    /// Coordinates in the upper-triangle variable ordering.
    pub fn from_coords(dim: usize, coords: Vec<S>) -> Self {
        assert_eq!(coords.len(), dim * (dim + 1) / 2);
        Self { dim, upper: coords }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |p, q| if p == q { S::one() } else { S::zero() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[S] {
        &self.upper
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.upper[sym_index(self.dim, i, j)]
    }

    pub fn to_matrix(&self) -> Matrix<S> {
        let n = self.dim;
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn eval(&self, x: &[S], y: &[S]) -> S {
        self.to_matrix().pair(x, y)
    }

    pub fn scale(&self, s: &S) -> Self {
        Self { dim: self.dim, upper: self.upper.iter().map(|x| s.clone() * x.clone()).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            upper: self.upper.iter().zip(&other.upper).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    pub fn max_magnitude(&self) -> f64 {
        self.upper.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    pub fn to_f64(&self) -> SymForm<f64> {
        SymForm { dim: self.dim, upper: self.upper.iter().map(Scalar::to_f64).collect() }
    }
}

/// Coefficients of `A(u, v)` as a linear function of the upper-triangle
/// coordinates of `A`.
pub fn sym_pairing_row<S: Scalar>(u: &[S], v: &[S]) -> Vec<S> {
    let n = u.len();
    let mut row = Vec::with_capacity(n * (n + 1) / 2);
    for p in 0..n {
        for q in p..n {
            if p == q {
                row.push(u[p].clone() * v[p].clone());
            } else {
                row.push(u[p].clone() * v[q].clone() + u[q].clone() * v[p].clone());
            }
        }
    }
    row
}

pub(crate) fn add_rows<S: Scalar>(a: Vec<S>, b: Vec<S>) -> Vec<S> {
    a.into_iter().zip(b).map(|(x, y)| x + y).collect()
}

pub(crate) fn sub_rows<S: Scalar>(a: Vec<S>, b: Vec<S>) -> Vec<S> {
    a.into_iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Linear equations cutting out the `ad(h)`- and isotropy-invariant forms.
pub(crate) fn invariance_rows<S: Scalar>(spec: &SpaceSpec<S>) -> Vec<Vec<S>> {
    let n = spec.dim_m;
    let e = |i: usize| crate::scalar::basis_vector::<S>(n, i);
    let mut rows = Vec::new();
    for w in 0..spec.dim_h {
        let ad = crate::algebra::space::ad_h_block(spec, w);
        for p in 0..n {
            for q in p..n {
                rows.push(add_rows(
                    sym_pairing_row(&ad.column(p), &e(q)),
                    sym_pairing_row(&e(p), &ad.column(q)),
                ));
            }
        }
    }
    for m in &spec.isotropy_generators {
        for p in 0..n {
            for q in p..n {
                rows.push(sub_rows(sym_pairing_row(&m.column(p), &m.column(q)), sym_pairing_row(&e(p), &e(q))));
            }
        }
    }
    rows.retain(|r| !r.iter().all(Scalar::is_exact_zero));
    rows
}

/// Basis of the invariant symmetric forms on `m`, with the metric first.
pub fn invariant_symmetric_forms<S: Scalar>(spec: &SpaceSpec<S>, tol: f64) -> Vec<SymForm<S>> {
    let n = spec.dim_m;
    let rows = invariance_rows(spec);
    let nvars = n * (n + 1) / 2;
    let null = S::nullspace(&rows, nvars, tol);
    orthonormalize_forms(null, &spec.gram, tol)
}

/// Frobenius-type pairing `tr(G^-1 S G^-1 T)` between forms.
pub fn form_pairing<S: Scalar>(a: &SymForm<S>, b: &SymForm<S>, gram_inv: &Matrix<S>) -> S {
    let x = gram_inv.mul(&a.to_matrix());
    let y = gram_inv.mul(&b.to_matrix());
    x.mul(&y).trace()
}

/// Orthonormalize a spanning set of forms under the gram-induced pairing,
/// listing the metric first whenever it lies in the span. Exact scalars are
/// orthogonalized without normalization.
pub fn orthonormalize_forms<S: Scalar>(span: Vec<Vec<S>>, gram: &Matrix<S>, tol: f64) -> Vec<SymForm<S>> {
    let n = gram.rows;
    let Some(gram_inv) = gram.inverse() else {
        return span.into_iter().map(|c| SymForm::from_coords(n, c)).collect();
    };
    let g = SymForm::symmetrize(gram);
    let target = span.len();
    let mut candidates: Vec<SymForm<S>> = Vec::new();
    if !span.is_empty() && in_span(&span, g.coords(), tol) {
        candidates.push(g);
    }
    candidates.extend(span.into_iter().map(|c| SymForm::from_coords(n, c)));
    let mut out: Vec<SymForm<S>> = Vec::new();
    let mut norms: Vec<S> = Vec::new();
    for cand in candidates {
        let mut v = cand.clone();
        for (b, nb) in out.iter().zip(&norms) {
            let c = form_pairing(&v, b, &gram_inv) / nb.clone();
            v = v.add(&b.scale(&-c));
        }
        let nv = form_pairing(&v, &v, &gram_inv);
        let keep = if S::EXACT { !nv.is_exact_zero() } else { nv.to_f64() > (tol * tol).max(1e-20) };
        if !keep {
            continue;
        }
        let s = S::unit_scale(&nv);
        let v = v.scale(&s);
        let nv = nv * s.clone() * s;
        out.push(v);
        norms.push(nv);
        if out.len() >= target {
            break;
        }
    }
    out
}

/// Largest residual of the invariance equations for a given form.
pub fn invariance_residual<S: Scalar>(spec: &SpaceSpec<S>, form: &SymForm<S>) -> f64 {
    invariance_rows(spec)
        .iter()
        .map(|r| dot(r, form.coords()).magnitude())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;

    #[test]
    fn sym_index_is_row_major_upper() {
        let n = 4;
        let mut k = 0;
        for p in 0..n {
            for q in p..n {
                assert_eq!(sym_index(n, p, q), k);
                assert_eq!(sym_index(n, q, p), k);
                k += 1;
            }
        }
    }

    #[test]
    fn no_isotropy_gives_all_forms() {
        for n in 1..5 {
            let forms = invariant_symmetric_forms(&examples::abelian::<f64>(n), 1e-9);
            assert_eq!(forms.len(), n * (n + 1) / 2);
        }
    }

    #[test]
    fn sphere_forms_are_multiples_of_metric() {
        let forms = invariant_symmetric_forms(&examples::s2::<f64>(), 1e-9);
        assert_eq!(forms.len(), 1);
        let m = forms[0].to_matrix();
        assert!((m.get(0, 0) - m.get(1, 1)).abs() < 1e-12);
        assert!(m.get(0, 1).abs() < 1e-12);
        for n in 2..6 {
            assert_eq!(invariant_symmetric_forms(&examples::sphere::<f64>(n), 1e-9).len(), 1, "S^{n}");
        }
    }

    #[test]
    fn exact_forms_list_metric_first() {
        let spec = examples::sphere::<crate::Rational>(3);
        let forms = invariant_symmetric_forms(&spec, 0.0);
        assert_eq!(forms.len(), 1);
        assert_eq!(forms[0], SymForm::symmetrize(&spec.gram));
    }
}
