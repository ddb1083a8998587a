use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{Bilinear, Matrix};

/// Lie algebra `g = h + m` given by structure constants over a basis that
/// lists the `h` vectors first, together with an inner product on `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceSpec<S> {
    pub dim_h: usize,
    pub dim_m: usize,
    /// `[f_i, f_j] = sum_k c[i][j][k] f_k` over all `dim_h + dim_m` basis vectors.
    pub structure: Bilinear<S>,
    /// Gram matrix of the inner product on `m`.
    pub gram: Matrix<S>,
    /// Optional `Ad(h)` blocks acting on `m` for chosen isotropy elements.
    pub isotropy_generators: Vec<Matrix<S>>,
}

impl<S: Scalar> SpaceSpec<S> {
    pub fn new(dim_h: usize, dim_m: usize, structure: Bilinear<S>, gram: Matrix<S>) -> Self {
        Self { dim_h, dim_m, structure, gram, isotropy_generators: Vec::new() }
    }

    pub fn dim_g(&self) -> usize {
        self.dim_h + self.dim_m
    }

    /// Build from a list of nonzero brackets `[f_i, f_j] = v` (only `i < j` needed).
    pub fn from_brackets(
        dim_h: usize,
        dim_m: usize,
        brackets: &[(usize, usize, Vec<S>)],
        gram: Matrix<S>,
    ) -> Self {
        let n = dim_h + dim_m;
        let mut c = Bilinear::zeros(n, n);
        for (i, j, v) in brackets {
            for (k, x) in v.iter().enumerate() {
                c.set(*i, *j, k, x.clone());
                c.set(*j, *i, k, -x.clone());
            }
        }
        Self::new(dim_h, dim_m, c, gram)
    }

    pub fn check_shapes(&self) -> Result<()> {
        let n = self.dim_g();
        if self.dim_m == 0 {
            return Err(Error::Degenerate);
        }
        let s = &self.structure;
        if s.dim_in != n || s.dim_out != n || s.data.len() != n * n * n {
            return Err(Error::Shape(format!(
                "structure constants are {}x{}->{} ({} entries), expected {n}x{n}->{n}",
                s.dim_in,
                s.dim_in,
                s.dim_out,
                s.data.len()
            )));
        }
        let g = &self.gram;
        if g.rows != self.dim_m || g.cols != self.dim_m || g.data.len() != self.dim_m * self.dim_m {
            return Err(Error::Shape(format!(
                "gram is {}x{}, expected {}x{}",
                g.rows, g.cols, self.dim_m, self.dim_m
            )));
        }
        for (idx, m) in self.isotropy_generators.iter().enumerate() {
            if m.rows != self.dim_m || m.cols != self.dim_m || m.data.len() != self.dim_m * self.dim_m {
                return Err(Error::Shape(format!("isotropy generator {idx} is {}x{}", m.rows, m.cols)));
            }
        }
        Ok(())
    }

    /// Inner product of two vectors of `m`.
    pub fn inner(&self, x: &[S], y: &[S]) -> S {
        self.gram.pair(x, y)
    }

    /// Embed `m` coordinates into `g` coordinates.
    pub fn embed_m(&self, x: &[S]) -> Vec<S> {
        let mut v = vec![S::zero(); self.dim_h];
        v.extend_from_slice(x);
        v
    }

    pub fn to_f64(&self) -> SpaceSpec<f64> {
        SpaceSpec {
            dim_h: self.dim_h,
            dim_m: self.dim_m,
            structure: self.structure.map(Scalar::to_f64),
            gram: self.gram.map(Scalar::to_f64),
            isotropy_generators: self.isotropy_generators.iter().map(|m| m.map(Scalar::to_f64)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Invariant {
    Antisymmetry,
    Jacobi,
    Subalgebra,
    Reductive,
    MetricPositiveDefinite,
    MetricInvariance,
    IsotropyGenerators,
}

impl Invariant {
    pub fn name(self) -> &'static str {
        match self {
            Invariant::Antisymmetry => "antisymmetry",
            Invariant::Jacobi => "jacobi",
            Invariant::Subalgebra => "h_subalgebra",
            Invariant::Reductive => "reductive",
            Invariant::MetricPositiveDefinite => "metric_spd",
            Invariant::MetricInvariance => "metric_ad_h_invariant",
            Invariant::IsotropyGenerators => "isotropy_generators",
        }
    }
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantCheck {
    pub invariant: Invariant,
    pub residual: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<InvariantCheck>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &InvariantCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, inv: Invariant) -> Option<&InvariantCheck> {
        self.checks.iter().find(|c| c.invariant == inv)
    }
}

fn push<S: Scalar>(checks: &mut Vec<InvariantCheck>, invariant: Invariant, residuals: impl IntoIterator<Item = S>, tol: f64) {
    let mut worst = 0.0f64;
    let mut passed = true;
    for r in residuals {
        worst = worst.max(r.magnitude());
        passed &= r.is_zero_within(tol);
    }
    checks.push(InvariantCheck { invariant, residual: worst, passed });
}

/// Check every structural invariant of a space. Exact scalars ignore `tol`.
pub fn validate_space<S: Scalar>(spec: &SpaceSpec<S>, tol: f64) -> Result<ValidationReport> {
    spec.check_shapes()?;
    let n = spec.dim_g();
    let dh = spec.dim_h;
    let dm = spec.dim_m;
    let c = &spec.structure;
    let mut checks = Vec::new();

    let mut anti = Vec::new();
    for i in 0..n {
        for j in i..n {
            for k in 0..n {
                anti.push(c.get(i, j, k).clone() + c.get(j, i, k).clone());
            }
        }
    }
    push(&mut checks, Invariant::Antisymmetry, anti, tol);

    push(&mut checks, Invariant::Jacobi, jacobi_residuals(c), tol);

    let mut sub = Vec::new();
    for i in 0..dh {
        for j in 0..dh {
            for k in dh..n {
                sub.push(c.get(i, j, k).clone());
            }
        }
    }
    push(&mut checks, Invariant::Subalgebra, sub, tol);

    let mut red = Vec::new();
    for i in 0..dh {
        for j in dh..n {
            for k in 0..dh {
                red.push(c.get(i, j, k).clone());
                red.push(c.get(j, i, k).clone());
            }
        }
    }
    push(&mut checks, Invariant::Reductive, red, tol);

    let asym = spec.gram.max_asymmetry();
    let pd = is_positive_definite(&spec.gram);
    let sym_ok = if S::EXACT { asym == 0.0 && spec.gram == spec.gram.transpose() } else { asym <= tol };
    checks.push(InvariantCheck {
        invariant: Invariant::MetricPositiveDefinite,
        residual: asym,
        passed: sym_ok && pd,
    });

    // <[W,X]_m, Y> + <X, [W,Y]_m> for W in h, X, Y in m.
    let mut inv = Vec::new();
    for w in 0..dh {
        let ad = ad_h_block(spec, w);
        let g_ad = spec.gram.mul(&ad);
        let sum = g_ad.add(&g_ad.transpose());
        inv.extend(sum.data);
    }
    push(&mut checks, Invariant::MetricInvariance, inv, tol);

    if !spec.isotropy_generators.is_empty() {
        let mut gen = Vec::new();
        let bm = m_bracket_table(spec);
        for m in &spec.isotropy_generators {
            let pulled = m.transpose().mul(&spec.gram).mul(m).sub(&spec.gram);
            gen.extend(pulled.data);
            // M [x, y]_m = [M x, M y]_m on basis pairs
            for i in 0..dm {
                for j in 0..dm {
                    let lhs = m.mul_vec(&bm.basis_product(i, j));
                    let rhs = bm.apply(&m.column(i), &m.column(j));
                    gen.extend(lhs.into_iter().zip(rhs).map(|(a, b)| a - b));
                }
            }
        }
        push(&mut checks, Invariant::IsotropyGenerators, gen, tol);
    }

    Ok(ValidationReport { checks })
}

/// `ad(f_w)` restricted to `m`, as a `dim_m x dim_m` block (`w` indexes `h`).
pub fn ad_h_block<S: Scalar>(spec: &SpaceSpec<S>, w: usize) -> Matrix<S> {
    let dh = spec.dim_h;
    let dm = spec.dim_m;
    let mut m = Matrix::zeros(dm, dm);
    for j in 0..dm {
        for k in 0..dm {
            m.set(k, j, spec.structure.get(w, dh + j, dh + k).clone());
        }
    }
    m
}

/// `[., .]_m` as a product table on `m`.
pub(crate) fn m_bracket_table<S: Scalar>(spec: &SpaceSpec<S>) -> Bilinear<S> {
    let dh = spec.dim_h;
    let dm = spec.dim_m;
    let mut t = Bilinear::zeros(dm, dm);
    for i in 0..dm {
        for j in 0..dm {
            for k in 0..dm {
                t.set(i, j, k, spec.structure.get(dh + i, dh + j, dh + k).clone());
            }
        }
    }
    t
}

/// Cyclic Jacobi sums on basis triples `i < j < k`, as flat residual entries.
/// Pairs with a repeated index reduce to antisymmetry, checked separately.
pub fn jacobi_residuals<S: Scalar>(c: &Bilinear<S>) -> Vec<S> {
    let n = c.dim_in;
    // sparse rows of the table: nonzero (l, value) for each basis pair
    let sparse: Vec<Vec<(usize, S)>> = (0..n * n)
        .map(|ij| {
            let (i, j) = (ij / n, ij % n);
            (0..c.dim_out)
                .filter(|&l| !c.get(i, j, l).is_exact_zero())
                .map(|l| (l, c.get(i, j, l).clone()))
                .collect()
        })
        .collect();
    let bracket_then = |i: usize, j: usize, k: usize, acc: &mut Vec<S>| {
        // [[f_i, f_j], f_k]
        for (l, a) in &sparse[i * n + j] {
            for (m, b) in &sparse[l * n + k] {
                acc[*m] = acc[*m].clone() + a.clone() * b.clone();
            }
        }
    };
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let mut acc = vec![S::zero(); c.dim_out];
                bracket_then(i, j, k, &mut acc);
                bracket_then(j, k, i, &mut acc);
                bracket_then(k, i, j, &mut acc);
                out.extend(acc);
            }
        }
    }
    out
}

/// Sylvester-style test: all pivots of symmetric elimination are positive.
pub fn is_positive_definite<S: Scalar>(g: &Matrix<S>) -> bool {
    let n = g.rows;
    if n != g.cols {
        return false;
    }
    // symmetrize so that a tiny asymmetry does not decide definiteness
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a.set(i, j, (g.get(i, j).clone() + g.get(j, i).clone()) * S::half());
        }
    }
    let scale = g.max_magnitude();
    for k in 0..n {
        let p = a.get(k, k).clone();
        let positive = p.to_f64() > 0.0 && !p.is_zero_within(1e-14 * scale);
        if !positive {
            return false;
        }
        for i in (k + 1)..n {
            let f = a.get(i, k).clone() / p.clone();
            for j in k..n {
                let v = a.get(i, j).clone() - f.clone() * a.get(k, j).clone();
                a.set(i, j, v);
            }
        }
    }
    true
}
