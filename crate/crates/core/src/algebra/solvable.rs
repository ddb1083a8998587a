//! Split-solvability: a full flag of ideals with one-dimensional quotients.
//!
//! The real-spectrum necessary condition is always decided. The flag itself
//! is searched top-down: a codimension-one ideal of an ideal `a` corresponds
//! to a common eigenvector of the transposed restrictions `ad_m(X)|_a`, found
//! from the eigenspaces of seeded random linear combinations.

use nalgebra::{DMatrix, DVector};
use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::malgebra::{is_ideal, MAlgebra};
use crate::scalar::{rank, Scalar};

/// Seed for the probes and generic combinations.
pub const SEARCH_SEED: u64 = 0x5eed_50_1fab1e;
/// Retries for a generic combination that turned out non-generic.
pub const RETRIES: usize = 8;
const RANDOM_PROBES: usize = 4;
/// Imaginary parts below this (relative to the operator norm) count as real.
/// Nilpotent Jordan blocks perturb computed eigenvalues by about `sqrt(eps)`.
pub const IMAG_RTOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum SplitSolvable {
    /// Ideals of `m` from `m` itself down to a line, each of codimension one
    /// in its predecessor; every entry is an orthonormal basis.
    Yes { chain: Vec<Vec<Vec<f64>>> },
    /// `ad_m(witness)` has a non-real eigenvalue.
    No { witness: Vec<f64>, eigenvalues: Vec<Complex<f64>> },
    Undetermined,
}

impl SplitSolvable {
    pub fn is_yes(&self) -> bool {
        matches!(self, SplitSolvable::Yes { .. })
    }
}

fn to_na(m: &crate::tensor::Matrix<f64>) -> DMatrix<f64> {
    m.to_nalgebra()
}

fn op_norm(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

fn non_real(m: &DMatrix<f64>, tol: f64) -> Option<Vec<Complex<f64>>> {
    if m.nrows() == 0 {
        return None;
    }
    let ev = m.complex_eigenvalues();
    let cut = tol.max(IMAG_RTOL * op_norm(m).max(1.0));
    if ev.iter().any(|z| z.im.abs() > cut) {
        Some(ev.iter().copied().collect())
    } else {
        None
    }
}

/// Decide split-solvability of `(m, [.,.]_m)` as far as the search allows.
pub fn is_split_solvable(alg: &MAlgebra<f64>, tol: f64) -> SplitSolvable {
    let n = alg.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(SEARCH_SEED);
    let mut probes: Vec<Vec<f64>> = (0..n).map(|i| alg.basis(i)).collect();
    for _ in 0..RANDOM_PROBES {
        probes.push((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
    }
    for x in probes {
        let ad = to_na(&alg.ad(&x));
        if let Some(eigenvalues) = non_real(&ad, tol) {
            return SplitSolvable::No { witness: x, eigenvalues };
        }
    }

    let generators: Vec<DMatrix<f64>> = (0..n).map(|i| to_na(&alg.ad(&alg.basis(i)))).collect();
    let mut current = DMatrix::<f64>::identity(n, n);
    let mut chain = vec![columns(&current)];
    while current.ncols() > 1 {
        // transposed restrictions to the current ideal
        let ops: Vec<DMatrix<f64>> = generators
            .iter()
            .map(|l| (current.transpose() * l * &current).transpose())
            .collect();
        let Some(psi) = common_eigenvector(&ops, &mut rng, tol) else {
            return SplitSolvable::Undetermined;
        };
        let next = &current * orthogonal_complement(&psi);
        let basis = columns(&next);
        if !matches!(is_ideal(alg, &basis, tol), Ok(true)) {
            return SplitSolvable::Undetermined;
        }
        chain.push(basis);
        current = next;
    }
    if verify_chain(alg, &chain, tol) {
        SplitSolvable::Yes { chain }
    } else {
        SplitSolvable::Undetermined
    }
}

/// Deterministic check of a claimed chain: starts at `m`, dimensions drop by
/// one down to a line, each member is an ideal of `m` inside its predecessor.
pub fn verify_chain<S: Scalar>(alg: &MAlgebra<S>, chain: &[Vec<Vec<S>>], tol: f64) -> bool {
    let n = alg.dim;
    if chain.len() != n || chain.first().is_none_or(|c| c.len() != n) {
        return false;
    }
    for (idx, member) in chain.iter().enumerate() {
        if member.len() != n - idx || !matches!(is_ideal(alg, member, tol), Ok(true)) {
            return false;
        }
        if idx > 0 {
            let mut joint = chain[idx - 1].clone();
            joint.extend(member.iter().cloned());
            if rank(&joint, n, tol) != chain[idx - 1].len() {
                return false;
            }
        }
    }
    true
}

fn columns(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.ncols()).map(|j| m.column(j).iter().copied().collect()).collect()
}

fn orthonormal_basis_of(cols: &[DVector<f64>], dim: usize, tol: f64) -> DMatrix<f64> {
    let rows: Vec<Vec<f64>> = cols.iter().map(|c| c.iter().copied().collect()).collect();
    let basis = f64::row_basis(&rows, dim, tol);
    DMatrix::from_fn(dim, basis.len(), |i, j| basis[j][i])
}

/// Orthonormal basis of `psi^perp`.
fn orthogonal_complement(psi: &DVector<f64>) -> DMatrix<f64> {
    let d = psi.len();
    let null = f64::nullspace(&[psi.iter().copied().collect()], d, 1e-12);
    DMatrix::from_fn(d, null.len(), |i, j| null[j][i])
}

fn null_basis(m: &DMatrix<f64>, rtol: f64) -> DMatrix<f64> {
    let rows: Vec<Vec<f64>> = (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
    let scale = op_norm(m).max(1.0);
    let null = f64::nullspace(&rows, m.ncols(), rtol * scale);
    DMatrix::from_fn(m.ncols(), null.len(), |i, j| null[j][i])
}

fn is_scalar(m: &DMatrix<f64>, tol: f64) -> bool {
    let d = m.nrows();
    if d == 0 {
        return true;
    }
    let mu = m.trace() / d as f64;
    (m - DMatrix::identity(d, d) * mu).iter().all(|x| x.abs() <= tol * op_norm(m).max(1.0))
}

/// A common eigenvector of all `ops`, if the search finds one.
fn common_eigenvector(ops: &[DMatrix<f64>], rng: &mut ChaCha8Rng, tol: f64) -> Option<DVector<f64>> {
    let d = ops.first().map_or(0, DMatrix::nrows);
    if d == 0 {
        return None;
    }
    let start = DMatrix::<f64>::identity(d, d);
    let v = search(ops, start, rng, tol, 0)?;
    let v = v.normalize();
    let ok = ops.iter().all(|a| {
        let av = a * &v;
        let mu = v.dot(&av);
        (av - &v * mu).norm() <= 1e-7 * op_norm(a).max(1.0)
    });
    ok.then_some(v)
}

/// Shrink span(`u`) to its largest subspace invariant under every op.
fn invariant_core(ops: &[DMatrix<f64>], mut u: DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    loop {
        let e = u.ncols();
        if e == 0 {
            return u;
        }
        let d = u.nrows();
        let proj_out = DMatrix::<f64>::identity(d, d) - &u * u.transpose();
        let mut stacked = DMatrix::<f64>::zeros(ops.len() * d, e);
        for (i, a) in ops.iter().enumerate() {
            let blk = &proj_out * a * &u;
            stacked.view_mut((i * d, 0), (d, e)).copy_from(&blk);
        }
        let n = null_basis(&stacked, tol.max(1e-10));
        if n.ncols() == e {
            return u;
        }
        let next = &u * n;
        let cols: Vec<DVector<f64>> = (0..next.ncols()).map(|j| next.column(j).into_owned()).collect();
        u = orthonormal_basis_of(&cols, d, 1e-12);
    }
}

fn search(ops: &[DMatrix<f64>], u: DMatrix<f64>, rng: &mut ChaCha8Rng, tol: f64, depth: usize) -> Option<DVector<f64>> {
    let u = invariant_core(ops, u, tol);
    let e = u.ncols();
    if e == 0 || depth > u.nrows() + 1 {
        return None;
    }
    let compressed: Vec<DMatrix<f64>> = ops.iter().map(|a| u.transpose() * a * &u).collect();
    if compressed.iter().all(|b| is_scalar(b, 1e-9)) {
        return Some(u.column(0).into_owned());
    }
    for _ in 0..RETRIES {
        let mut m = DMatrix::<f64>::zeros(e, e);
        for b in &compressed {
            m += b * rng.gen_range(-1.0..1.0);
        }
        if is_scalar(&m, 1e-9) {
            continue;
        }
        let cut = IMAG_RTOL * op_norm(&m).max(1.0);
        let mut reals: Vec<f64> = m.complex_eigenvalues().iter().filter(|z| z.im.abs() <= cut).map(|z| z.re).collect();
        reals.sort_by(f64::total_cmp);
        reals.dedup_by(|a, b| (*a - *b).abs() <= 1e-6 * op_norm(&m).max(1.0));
        for mu in reals {
            let shifted = &m - DMatrix::<f64>::identity(e, e) * mu;
            let k = null_basis(&shifted, 1e-6);
            if k.ncols() == 0 || k.ncols() == e {
                continue;
            }
            if let Some(v) = search(ops, &u * k, rng, tol, depth + 1) {
                return Some(v);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::malgebra::project_algebra;
    use crate::examples;

    #[test]
    fn heisenberg_chain() {
        let alg = project_algebra(&examples::heisenberg::<f64>());
        let SplitSolvable::Yes { chain } = is_split_solvable(&alg, 1e-9) else { panic!("expected yes") };
        assert_eq!(chain.iter().map(Vec::len).collect::<Vec<_>>(), vec![3, 2, 1]);
        // the only one-dimensional ideal is the centre
        let line = &chain[2][0];
        assert!(line[0].abs() < 1e-9 && line[1].abs() < 1e-9);
        let stated = vec![
            (0..3).map(|i| alg.basis(i)).collect::<Vec<_>>(),
            vec![alg.basis(1), alg.basis(2)],
            vec![alg.basis(2)],
        ];
        assert!(verify_chain(&alg, &stated, 1e-9));
        let bad = vec![stated[0].clone(), vec![alg.basis(0), alg.basis(1)], vec![alg.basis(0)]];
        assert!(!verify_chain(&alg, &bad, 1e-9));
    }

    #[test]
    fn su2_is_not_split_solvable() {
        let alg = project_algebra(&examples::su2::<f64>(&[1.0, 1.0, 1.0]));
        let SplitSolvable::No { witness, eigenvalues } = is_split_solvable(&alg, 1e-9) else { panic!() };
        assert_eq!(witness, vec![1.0, 0.0, 0.0]);
        let mut ims: Vec<f64> = eigenvalues.iter().map(|z| z.im).collect();
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + 1.0).abs() < 1e-12 && ims[1].abs() < 1e-12 && (ims[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn abelian_and_affine_are_split_solvable() {
        for spec in [examples::abelian::<f64>(3), examples::affine_line::<f64>()] {
            let alg = project_algebra(&spec);
            assert!(is_split_solvable(&alg, 1e-9).is_yes());
        }
    }

    #[test]
    fn euclidean_plane_has_rotation_witness() {
        let alg = project_algebra(&examples::euclidean_plane::<f64>());
        assert!(matches!(is_split_solvable(&alg, 1e-9), SplitSolvable::No { .. }));
    }
}
