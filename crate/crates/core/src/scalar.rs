//! Scalar fields the algebraic routines are generic over.
//!
//! Two implementations exist: `f64`, where every zero test is a tolerance
//! comparison and rank decisions go through a singular value decomposition,
//! and [`Rational`], where every zero test is exact and rank decisions use
//! fraction-free row reduction.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// Arbitrary precision rational number used by the exact mode.
pub type Rational = num_rational::BigRational;

/// Singular values at or below `RANK_RTOL * sigma_max` count as zero.
pub const RANK_RTOL: f64 = 1e-9;

/// Default absolute tolerance for residual checks in double precision.
pub const DEFAULT_TOL: f64 = 1e-9;

pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when zero tests ignore the tolerance argument.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;

    /// Zero test: `|x| <= tol` for floats, `x == 0` for exact scalars.
    fn is_zero_within(&self, tol: f64) -> bool;

    /// Absolute value as a float, used for pivoting and residual reporting.
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }

    /// Basis of the row space of `rows` (each of length `ncols`).
    fn row_basis(rows: &[Vec<Self>], ncols: usize, tol: f64) -> Vec<Vec<Self>>;

    /// Basis of `{x : rows * x = 0}`.
    fn nullspace(rows: &[Vec<Self>], ncols: usize, tol: f64) -> Vec<Vec<Self>>;

    /// Factor turning a vector with squared norm `norm_sq` into a unit vector.
    /// Exact scalars have no square roots and return one.
    fn unit_scale(norm_sq: &Self) -> Self;

    fn half() -> Self {
        Self::one() / Self::from_i64(2)
    }

    fn is_exact_zero(&self) -> bool {
        self.is_zero_within(0.0)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_zero_within(&self, tol: f64) -> bool {
        self.abs() <= tol
    }
    fn row_basis(rows: &[Vec<Self>], ncols: usize, tol: f64) -> Vec<Vec<Self>> {
        if rows.is_empty() || ncols == 0 {
            return Vec::new();
        }
        let (sv, vt) = svd_parts(rows, ncols);
        let cut = rank_cut(&sv, tol);
        (0..sv.len())
            .filter(|&i| sv[i] > cut)
            .map(|i| vt.row(i).iter().copied().collect())
            .collect()
    }
    fn nullspace(rows: &[Vec<Self>], ncols: usize, tol: f64) -> Vec<Vec<Self>> {
        if ncols == 0 {
            return Vec::new();
        }
        if rows.is_empty() {
            return identity_rows(ncols);
        }
        // Pad to a square-or-tall system so that V is a full orthogonal basis.
        let mut padded: Vec<Vec<f64>> = rows.to_vec();
        while padded.len() < ncols {
            padded.push(vec![0.0; ncols]);
        }
        let (sv, vt) = svd_parts(&padded, ncols);
        let cut = rank_cut(&sv, tol);
        let mut out = Vec::new();
        for i in 0..ncols {
            let s = sv.get(i).copied().unwrap_or(0.0);
            if s <= cut {
                out.push(vt.row(i).iter().copied().collect());
            }
        }
        out
    }
    fn unit_scale(norm_sq: &Self) -> Self {
        1.0 / norm_sq.sqrt()
    }
}

fn identity_rows<S: Scalar>(n: usize) -> Vec<Vec<S>> {
    (0..n)
        .map(|i| {
            let mut v = vec![S::zero(); n];
            v[i] = S::one();
            v
        })
        .collect()
}

fn svd_parts(rows: &[Vec<f64>], ncols: usize) -> (Vec<f64>, DMatrix<f64>) {
    let nrows = rows.len();
    let m = DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]);
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    (svd.singular_values.iter().copied().collect(), vt)
}

fn rank_cut(sv: &[f64], tol: f64) -> f64 {
    let smax = sv.iter().copied().fold(0.0, f64::max);
    (RANK_RTOL * smax).max(tol)
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_zero_within(&self, _tol: f64) -> bool {
        Zero::is_zero(self)
    }
    fn magnitude(&self) -> f64 {
        ToPrimitive::to_f64(&self.abs()).unwrap_or(f64::INFINITY)
    }
    fn row_basis(rows: &[Vec<Self>], ncols: usize, _tol: f64) -> Vec<Vec<Self>> {
        let (rref, _) = row_reduce(rows.to_vec(), ncols, 0.0);
        rref
    }
    fn nullspace(rows: &[Vec<Self>], ncols: usize, _tol: f64) -> Vec<Vec<Self>> {
        nullspace_from_rref(rows, ncols, 0.0)
    }
    fn unit_scale(_norm_sq: &Self) -> Self {
        Self::one()
    }
}

/// Reduced row echelon form; returns the nonzero rows and the pivot columns.
pub fn row_reduce<S: Scalar>(mut rows: Vec<Vec<S>>, ncols: usize, tol: f64) -> (Vec<Vec<S>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let best = (r..rows.len())
            .filter(|&i| !rows[i][c].is_zero_within(tol))
            .max_by(|&a, &b| rows[a][c].magnitude().total_cmp(&rows[b][c].magnitude()));
        let Some(p) = best else { continue };
        rows.swap(r, p);
        let inv = S::one() / rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows.len() {
            if i == r || rows[i][c].is_exact_zero() {
                continue;
            }
            let f = rows[i][c].clone();
            for j in 0..ncols {
                let sub = f.clone() * rows[r][j].clone();
                rows[i][j] = rows[i][j].clone() - sub;
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

fn nullspace_from_rref<S: Scalar>(rows: &[Vec<S>], ncols: usize, tol: f64) -> Vec<Vec<S>> {
    let (rref, pivots) = row_reduce(rows.to_vec(), ncols, tol);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![S::zero(); ncols];
            v[f] = S::one();
            for (row, &p) in rref.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Rank of a list of vectors.
pub fn rank<S: Scalar>(vectors: &[Vec<S>], ncols: usize, tol: f64) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    S::row_basis(vectors, ncols, tol).len()
}

/// Whether `v` lies in the span of `basis`.
pub fn in_span<S: Scalar>(basis: &[Vec<S>], v: &[S], tol: f64) -> bool {
    let n = v.len();
    if v.iter().all(|x| x.is_zero_within(tol)) {
        return true;
    }
    let r0 = rank(basis, n, tol);
    let mut ext = basis.to_vec();
    ext.push(v.to_vec());
    rank(&ext, n, tol) == r0
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn axpy<S: Scalar>(alpha: &S, x: &[S], y: &mut [S]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi = yi.clone() + alpha.clone() * xi.clone();
    }
}

pub fn scaled<S: Scalar>(alpha: &S, x: &[S]) -> Vec<S> {
    x.iter().map(|v| alpha.clone() * v.clone()).collect()
}

pub fn max_magnitude<S: Scalar>(xs: impl IntoIterator<Item = S>) -> f64 {
    xs.into_iter().map(|x| x.magnitude()).fold(0.0, f64::max)
}

pub fn basis_vector<S: Scalar>(n: usize, i: usize) -> Vec<S> {
    let mut v = vec![S::zero(); n];
    v[i] = S::one();
    v
}

/// Parse `"p/q"`, an integer, or a finite decimal such as `"-0.25"` exactly.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let negative = int.trim_start().starts_with('-');
        let int_part: BigInt = match int {
            "" | "-" | "+" => BigInt::zero(),
            s => s.parse().ok()?,
        };
        let frac_part: BigInt = frac.parse().ok()?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mag = int_part.abs() * &scale + frac_part;
        let num = if negative { -mag } else { mag };
        return Some(Rational::new(num, scale));
    }
    t.parse::<BigInt>().ok().map(Rational::from_integer)
}

/// Exact rational value of a finite float.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}
