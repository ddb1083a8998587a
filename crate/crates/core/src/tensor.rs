//! Dense coefficient blocks over a fixed basis.

use crate::scalar::{dot, Scalar};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let data = rows.iter().flat_map(|row| row.iter().cloned()).collect();
        Self { rows: r, cols: c, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<S>], nrows: usize) -> Self {
        let mut m = Self::zeros(nrows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn diagonal(diag: &[S]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, d.clone());
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_exact_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j).clone() + a.clone() * other.get(k, j).clone();
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: &S) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| s.clone() * x.clone()).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(S, S) -> S) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(a.clone(), b.clone()))
                .collect(),
        }
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    /// Bilinear pairing `x^T M y`.
    pub fn pair(&self, x: &[S], y: &[S]) -> S {
        dot(x, &self.mul_vec(y))
    }

    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut r: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols.min(self.rows) {
                r = r.max((self.get(i, j).clone() - self.get(j, i).clone()).magnitude());
            }
        }
        r
    }

    /// Gauss-Jordan inverse with partial pivoting; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self.max_magnitude().max(f64::MIN_POSITIVE);
        for c in 0..n {
            let p = (c..n).max_by(|&x, &y| a.get(x, c).magnitude().total_cmp(&a.get(y, c).magnitude()))?;
            if a.get(p, c).is_zero_within(1e-14 * scale) {
                return None;
            }
            if p != c {
                for j in 0..n {
                    a.data.swap(p * n + j, c * n + j);
                    inv.data.swap(p * n + j, c * n + j);
                }
            }
            let d = S::one() / a.get(c, c).clone();
            for j in 0..n {
                a.set(c, j, a.get(c, j).clone() * d.clone());
                inv.set(c, j, inv.get(c, j).clone() * d.clone());
            }
            for i in 0..n {
                if i == c || a.get(i, c).is_exact_zero() {
                    continue;
                }
                let f = a.get(i, c).clone();
                for j in 0..n {
                    a.set(i, j, a.get(i, j).clone() - f.clone() * a.get(c, j).clone());
                    inv.set(i, j, inv.get(i, j).clone() - f.clone() * inv.get(c, j).clone());
                }
            }
        }
        Some(inv)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl Matrix<f64> {
    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &nalgebra::DMatrix<f64>) -> Self {
        let mut out = Self::zeros(m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                out.set(i, j, m[(i, j)]);
            }
        }
        out
    }
}

/// Bilinear map `V x V -> W` with `prod(e_i, e_j) = sum_k c[i][j][k] w_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bilinear<S> {
    pub dim_in: usize,
    pub dim_out: usize,
    pub data: Vec<S>,
}

/// A multiplication on a single space; the data type behind connections.
pub type ProductTable<S> = Bilinear<S>;

impl<S: Scalar> Bilinear<S> {
    pub fn zeros(dim_in: usize, dim_out: usize) -> Self {
        Self { dim_in, dim_out, data: vec![S::zero(); dim_in * dim_in * dim_out] }
    }

    /// Zero product on a space of dimension `dim`.
    pub fn zero_product(dim: usize) -> Self {
        Self::zeros(dim, dim)
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim_in + j) * self.dim_out + k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> &S {
        &self.data[self.idx(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: S) {
        let ix = self.idx(i, j, k);
        self.data[ix] = v;
    }

    /// Image of a pair of basis vectors.
    pub fn basis_product(&self, i: usize, j: usize) -> Vec<S> {
        let start = self.idx(i, j, 0);
        self.data[start..start + self.dim_out].to_vec()
    }

    pub fn apply(&self, x: &[S], y: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.dim_out];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_exact_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_exact_zero() {
                    continue;
                }
                let w = xi.clone() * yj.clone();
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.get(i, j, k);
                    if !c.is_exact_zero() {
                        *o = o.clone() + w.clone() * c.clone();
                    }
                }
            }
        }
        out
    }

    /// Matrix of `y -> prod(x, y)`.
    pub fn left_matrix(&self, x: &[S]) -> Matrix<S> {
        let mut m = Matrix::zeros(self.dim_out, self.dim_in);
        for j in 0..self.dim_in {
            let col = self.apply(x, &crate::scalar::basis_vector(self.dim_in, j));
            for (k, v) in col.into_iter().enumerate() {
                m.set(k, j, v);
            }
        }
        m
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }

    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Bilinear<T> {
        Bilinear { dim_in: self.dim_in, dim_out: self.dim_out, data: self.data.iter().map(f).collect() }
    }

    /// Largest `|prod(e_i,e_j) + prod(e_j,e_i)|` entry.
    pub fn antisymmetry_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for i in 0..self.dim_in {
            for j in 0..self.dim_in {
                for k in 0..self.dim_out {
                    r = r.max((self.get(i, j, k).clone() + self.get(j, i, k).clone()).magnitude());
                }
            }
        }
        r
    }
}

/// Curvature-type (1,3) tensor: `R(e_i, e_j) e_k = sum_l R[i][j][k][l] e_l`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvTensor<S> {
    pub dim: usize,
    pub data: Vec<S>,
}

impl<S: Scalar> CurvTensor<S> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![S::zero(); dim.pow(4)] }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.dim + j) * self.dim + k) * self.dim + l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> &S {
        &self.data[self.idx(i, j, k, l)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: S) {
        let ix = self.idx(i, j, k, l);
        self.data[ix] = v;
    }

    /// `R(x, y) z` for arbitrary vectors.
    pub fn apply(&self, x: &[S], y: &[S], z: &[S]) -> Vec<S> {
        let n = self.dim;
        let mut out = vec![S::zero(); n];
        for i in 0..n {
            if x[i].is_exact_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_exact_zero() {
                    continue;
                }
                let xy = x[i].clone() * y[j].clone();
                for k in 0..n {
                    if z[k].is_exact_zero() {
                        continue;
                    }
                    let w = xy.clone() * z[k].clone();
                    for (l, o) in out.iter_mut().enumerate() {
                        let c = self.get(i, j, k, l);
                        if !c.is_exact_zero() {
                            *o = o.clone() + w.clone() * c.clone();
                        }
                    }
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }

    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    /// Largest `|R^l_{ijk} + R^l_{jik}|`.
    pub fn antisymmetry_residual(&self) -> f64 {
        let n = self.dim;
        let mut r: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        r = r.max((self.get(i, j, k, l).clone() + self.get(j, i, k, l).clone()).magnitude());
                    }
                }
            }
        }
        r
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> CurvTensor<T> {
        CurvTensor { dim: self.dim, data: self.data.iter().map(f).collect() }
    }
}

/// Covariant tensor with `rank` slots over a space of dimension `dim`;
/// index order is lexicographic in the slots.
#[derive(Debug, Clone, PartialEq)]
pub struct CovTensor<S> {
    pub dim: usize,
    pub rank: usize,
    pub data: Vec<S>,
}

impl<S: Scalar> CovTensor<S> {
    pub fn zeros(dim: usize, rank: usize) -> Self {
        Self { dim, rank, data: vec![S::zero(); dim.pow(rank as u32)] }
    }

    pub fn from_matrix(m: &Matrix<S>) -> Self {
        assert_eq!(m.rows, m.cols);
        Self { dim: m.rows, rank: 2, data: m.data.clone() }
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> &S {
        &self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: S) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    /// Multi-indices in storage order.
    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let total = self.data.len();
        let (dim, rank) = (self.dim, self.rank);
        (0..total).map(move |mut flat| {
            let mut idx = vec![0; rank];
            for slot in (0..rank).rev() {
                idx[slot] = flat % dim;
                flat /= dim;
            }
            idx
        })
    }

    /// Evaluate on vectors by multilinear expansion.
    pub fn eval(&self, vectors: &[&[S]]) -> S {
        assert_eq!(vectors.len(), self.rank);
        let mut acc = S::zero();
        for (flat, idx) in self.indices().enumerate() {
            let c = &self.data[flat];
            if c.is_exact_zero() {
                continue;
            }
            let mut w = c.clone();
            for (slot, &i) in idx.iter().enumerate() {
                w = w * vectors[slot][i].clone();
            }
            acc = acc + w;
        }
        acc
    }

    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]);
        let inv = m.inverse().unwrap();
        let id = m.mul(&inv);
        for i in 0..2 {
            for j in 0..2 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((id.get(i, j) - e).abs() < 1e-14);
            }
        }
        assert!(Matrix::<f64>::zeros(2, 2).inverse().is_none());
    }

    #[test]
    fn cov_tensor_indices_follow_storage() {
        let t = CovTensor::<f64>::zeros(3, 3);
        for (flat, idx) in t.indices().enumerate() {
            assert_eq!(t.offset(&idx), flat);
        }
    }
}
