//! Seeded random spaces.
//!
//! Instance `k` of seed `s` is drawn from its own ChaCha stream, so any
//! instance can be regenerated from `(s, k, dim)` alone.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rgw_core::{examples, invariant_symmetric_forms, validate_space, Bilinear, Matrix, SpaceSpec};

use crate::document::SpaceDocument;

pub const MAX_DIM: usize = 8;
/// Largest accepted condition number of a fuzzed metric.
pub const MAX_METRIC_CONDITION: f64 = 1e3;
/// Largest accepted condition number of a basis change.
pub const MAX_BASIS_CONDITION: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Abelian,
    Heisenberg,
    Triangular,
    Su2,
    /// `su(2)` with metric `diag(a^2, (a+b)^2, b^2)` plus a flat factor.
    Balanced,
    DirectSum,
    Sphere,
    /// `SO(4)/SO(2)` or `SO(5)/SO(3)`.
    Stiefel,
    /// `su(2) + l` with `h` a line in `su(2)`.
    Carved,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Abelian => "abelian",
            Family::Heisenberg => "heisenberg",
            Family::Triangular => "triangular",
            Family::Su2 => "su2",
            Family::Balanced => "balanced",
            Family::DirectSum => "sum",
            Family::Sphere => "sphere",
            Family::Stiefel => "stiefel",
            Family::Carved => "carved",
        }
    }

    pub fn available(dim: usize) -> Vec<Family> {
        let mut out = vec![Family::Abelian];
        if dim >= 2 {
            out.extend([Family::Triangular, Family::Sphere, Family::Carved]);
        }
        if dim >= 3 {
            out.extend([Family::Heisenberg, Family::Su2, Family::Balanced]);
        }
        if dim >= 4 {
            out.push(Family::DirectSum);
        }
        if dim == 5 || dim == 7 {
            out.push(Family::Stiefel);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzInstance {
    pub seed: u64,
    pub index: u64,
    pub family: Family,
    pub doc: SpaceDocument,
    /// Rejected draws before this one.
    pub rejected: usize,
}

impl FuzzInstance {
    pub fn reproducer(&self) -> String {
        format!("rgw fuzz --seed {} --count {} --dim {} (instance {})", self.seed, self.index + 1, self.doc.dim_m, self.index)
    }
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}

fn zero_table(n: usize) -> Bilinear<f64> {
    Bilinear::zeros(n, n)
}

fn set_bracket(c: &mut Bilinear<f64>, i: usize, j: usize, k: usize, v: f64) {
    c.set(i, j, k, *c.get(i, j, k) + v);
    c.set(j, i, k, *c.get(j, i, k) - v);
}

fn direct_sum(a: &Bilinear<f64>, b: &Bilinear<f64>) -> Bilinear<f64> {
    let (p, q) = (a.dim_in, b.dim_in);
    let mut c = zero_table(p + q);
    for i in 0..p {
        for j in 0..p {
            for k in 0..p {
                c.set(i, j, k, *a.get(i, j, k));
            }
        }
    }
    for i in 0..q {
        for j in 0..q {
            for k in 0..q {
                c.set(p + i, p + j, p + k, *b.get(i, j, k));
            }
        }
    }
    c
}

fn su2_table() -> Bilinear<f64> {
    examples::su2::<f64>(&[1.0, 1.0, 1.0]).structure
}

/// `h_{2k+1} + R^rest` with `[e_2i, e_2i+1] = z_i e_last`.
fn heisenberg_type(rng: &mut ChaCha8Rng, n: usize) -> Bilinear<f64> {
    let pairs = rng.gen_range(1..=(n - 1) / 2);
    let mut c = zero_table(n);
    for i in 0..pairs {
        set_bracket(&mut c, 2 * i, 2 * i + 1, n - 1, uniform(rng, 0.5, 2.0));
    }
    c
}

/// `R e_0` acting on the abelian ideal `span(e_1..)` by a lower triangular matrix.
fn triangular(rng: &mut ChaCha8Rng, n: usize) -> Bilinear<f64> {
    let mut c = zero_table(n);
    for i in 1..n {
        for k in i..n {
            let v = if k == i { f64::from(rng.gen_range(-2i32..=2)) } else { uniform(rng, -1.0, 1.0) };
            if v != 0.0 {
                set_bracket(&mut c, 0, i, k, v);
            }
        }
    }
    c
}

/// A Lie algebra from the non-composite families.
fn simple_piece(rng: &mut ChaCha8Rng, n: usize) -> Bilinear<f64> {
    let mut options = vec![0];
    if n >= 2 {
        options.push(1);
    }
    if n >= 3 {
        options.push(2);
    }
    if n == 3 {
        options.push(3);
    }
    match *options.choose(rng).expect("nonempty") {
        0 => zero_table(n),
        1 => triangular(rng, n),
        2 => heisenberg_type(rng, n),
        _ => su2_table(),
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> Matrix<f64> {
    let mut m = Matrix::zeros(n, n);
    for v in m.data.iter_mut() {
        *v = uniform(rng, -1.0, 1.0);
    }
    m
}

pub fn condition_number(m: &Matrix<f64>) -> f64 {
    if m.rows == 0 {
        return 1.0;
    }
    let s = m.to_nalgebra().singular_values();
    let lo = s.min();
    if lo <= 0.0 {
        f64::INFINITY
    } else {
        s.max() / lo
    }
}

fn basis_change(rng: &mut ChaCha8Rng, n: usize) -> Matrix<f64> {
    loop {
        let mut p = random_matrix(rng, n);
        for i in 0..n {
            p.set(i, i, *p.get(i, i) + 1.5);
        }
        if condition_number(&p) <= MAX_BASIS_CONDITION {
            return p;
        }
    }
}

/// `L L^T` with a random lower triangular factor.
fn random_factor_metric(rng: &mut ChaCha8Rng, n: usize) -> Matrix<f64> {
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..i {
            l.set(i, j, uniform(rng, -1.0, 1.0));
        }
        l.set(i, i, uniform(rng, 0.5, 2.0));
    }
    l.mul(&l.transpose())
}

/// Structure constants in the basis given by the columns of `p`.
fn transform_structure(c: &Bilinear<f64>, p: &Matrix<f64>) -> Option<Bilinear<f64>> {
    let n = c.dim_in;
    let pinv = p.inverse()?;
    let cols: Vec<Vec<f64>> = (0..n).map(|a| p.column(a)).collect();
    let mut out = zero_table(n);
    for a in 0..n {
        for b in 0..n {
            let v = pinv.mul_vec(&c.apply(&cols[a], &cols[b]));
            for (k, x) in v.into_iter().enumerate() {
                out.set(a, b, k, x);
            }
        }
    }
    Some(out)
}

fn block_diagonal(a: &Matrix<f64>, b: &Matrix<f64>) -> Matrix<f64> {
    let n = a.rows + b.rows;
    let mut m = Matrix::zeros(n, n);
    for i in 0..a.rows {
        for j in 0..a.cols {
            m.set(i, j, *a.get(i, j));
        }
    }
    for i in 0..b.rows {
        for j in 0..b.cols {
            m.set(a.rows + i, a.rows + j, *b.get(i, j));
        }
    }
    m
}

/// Change basis separately on `h` and on `m`, carrying the metric along.
fn change_basis(rng: &mut ChaCha8Rng, spec: &SpaceSpec<f64>) -> Option<SpaceSpec<f64>> {
    let ph = basis_change(rng, spec.dim_h);
    let pm = basis_change(rng, spec.dim_m);
    let p = block_diagonal(&ph, &pm);
    let structure = transform_structure(&spec.structure, &p)?;
    let gram = pm.transpose().mul(&spec.gram).mul(&pm);
    Some(SpaceSpec::new(spec.dim_h, spec.dim_m, structure, symmetrized(&gram)))
}

fn symmetrized(g: &Matrix<f64>) -> Matrix<f64> {
    let mut s = g.clone();
    for i in 0..g.rows {
        for j in 0..g.cols {
            s.set(i, j, 0.5 * (g.get(i, j) + g.get(j, i)));
        }
    }
    s
}

/// Random positive combination of the invariant forms of a space whose
/// current metric is invariant.
fn random_invariant_metric(rng: &mut ChaCha8Rng, spec: &SpaceSpec<f64>) -> Option<Matrix<f64>> {
    let forms = invariant_symmetric_forms(spec, 1e-9);
    let n = spec.dim_m;
    let mut pert = Matrix::zeros(n, n);
    for f in &forms {
        pert = pert.add(&f.to_matrix().scale(&uniform(rng, -1.0, 1.0)));
    }
    let norm = pert.to_nalgebra().symmetric_eigenvalues().amax();
    let base = spec.gram.clone();
    if norm == 0.0 {
        return Some(base);
    }
    let lo = base.to_nalgebra().symmetric_eigenvalues().min();
    let g = base.add(&pert.scale(&(0.9 * lo / norm)));
    Some(symmetrized(&g))
}

/// `su(2) + l` with `h` spanned by a random unit vector of `su(2)`.
fn carved(rng: &mut ChaCha8Rng, dim_m: usize) -> SpaceSpec<f64> {
    let rest = simple_piece(rng, dim_m - 2);
    let g = direct_sum(&su2_table(), &rest);
    let n = g.dim_in;
    let mut u = [uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0) + 2.0];
    let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    u.iter_mut().for_each(|x| *x /= norm);
    // orthonormal completion of u inside su(2)
    let pick = if u[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d = pick.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>();
    let mut v: Vec<f64> = pick.iter().zip(&u).map(|(a, b)| a - d * b).collect();
    let vn = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= vn);
    let w = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
    let mut p = Matrix::zeros(n, n);
    for k in 0..3 {
        p.set(k, 0, u[k]);
        p.set(k, 1, v[k]);
        p.set(k, 2, w[k]);
    }
    for k in 3..n {
        p.set(k, k, 1.0);
    }
    let c = transform_structure(&g, &p).expect("orthogonal change");
    SpaceSpec::new(1, dim_m, c, Matrix::identity(dim_m))
}

fn stiefel(dim_m: usize) -> SpaceSpec<f64> {
    if dim_m == 5 {
        return examples::so4_so2();
    }
    let mut order = vec![(0, 1), (0, 2), (1, 2)];
    order.extend([(0, 3), (1, 3), (2, 3), (0, 4), (1, 4), (2, 4), (3, 4)]);
    examples::so_quotient(5, &order, 3)
}

fn lie_group(structure: Bilinear<f64>, gram: Matrix<f64>) -> SpaceSpec<f64> {
    let n = structure.dim_in;
    SpaceSpec::new(0, n, structure, gram)
}

fn draw(rng: &mut ChaCha8Rng, family: Family, dim: usize) -> Option<SpaceSpec<f64>> {
    let spec = match family {
        Family::Abelian | Family::Heisenberg | Family::Triangular | Family::Su2 | Family::DirectSum => {
            let c = match family {
                Family::Abelian => zero_table(dim),
                Family::Heisenberg => heisenberg_type(rng, dim),
                Family::Triangular => triangular(rng, dim),
                Family::Su2 => direct_sum(&su2_table(), &zero_table(dim - 3)),
                _ => {
                    let first = rng.gen_range(2..=dim - 2);
                    let a = simple_piece(rng, first);
                    let b = simple_piece(rng, dim - first);
                    direct_sum(&a, &b)
                }
            };
            let p = basis_change(rng, dim);
            let c = transform_structure(&c, &p)?;
            lie_group(c, random_factor_metric(rng, dim))
        }
        Family::Balanced => {
            let (a, b) = (uniform(rng, 0.5, 2.0), uniform(rng, 0.5, 2.0));
            let head = Matrix::diagonal(&[a * a, (a + b) * (a + b), b * b]);
            let gram = block_diagonal(&head, &random_factor_metric(rng, dim - 3));
            change_basis(rng, &lie_group(direct_sum(&su2_table(), &zero_table(dim - 3)), gram))?
        }
        Family::Sphere | Family::Stiefel | Family::Carved => {
            let mut base = match family {
                Family::Sphere => examples::sphere(dim),
                Family::Stiefel => stiefel(dim),
                _ => carved(rng, dim),
            };
            base.gram = random_invariant_metric(rng, &base)?;
            change_basis(rng, &base)?
        }
    };
    Some(spec)
}

fn acceptable(spec: &SpaceSpec<f64>) -> bool {
    condition_number(&spec.gram) <= MAX_METRIC_CONDITION
        && validate_space(spec, rgw_core::DEFAULT_TOL).map(|r| r.is_valid()).unwrap_or(false)
}

/// Instance `index` of the stream for `seed`, rejection-sampled until valid.
pub fn fuzz_instance(seed: u64, index: u64, dim: usize) -> FuzzInstance {
    assert!((1..=MAX_DIM).contains(&dim), "dim must lie in 1..={MAX_DIM}");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let families = Family::available(dim);
    let mut rejected = 0;
    loop {
        let family = *families.choose(&mut rng).expect("nonempty");
        if let Some(spec) = draw(&mut rng, family, dim) {
            if acceptable(&spec) {
                let name = format!("fuzz-s{seed}-d{dim}-i{index}-{}", family.name());
                let doc = SpaceDocument::from_f64_spec(&name, &spec);
                return FuzzInstance { seed, index, family, doc, rejected };
            }
        }
        rejected += 1;
    }
}

pub fn fuzz_instances(seed: u64, count: u64, dim: usize) -> impl Iterator<Item = FuzzInstance> {
    (0..count).map(move |k| fuzz_instance(seed, k, dim))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::parse_document;

    #[test]
    fn deterministic_and_valid() {
        for dim in 1..=MAX_DIM {
            let a: Vec<FuzzInstance> = fuzz_instances(7, 6, dim).collect();
            let b: Vec<FuzzInstance> = fuzz_instances(7, 6, dim).collect();
            assert_eq!(a, b);
            for inst in &a {
                let spec = parse_document(&inst.doc.to_json()).unwrap().to_f64_spec();
                assert_eq!(spec.dim_m, dim);
                assert!(validate_space(&spec, 1e-9).unwrap().is_valid(), "{}", inst.doc.name);
                assert!(condition_number(&spec.gram) <= MAX_METRIC_CONDITION);
            }
        }
    }

    #[test]
    fn every_family_is_reachable() {
        for dim in [3, 5, 7] {
            let mut seen: Vec<Family> = fuzz_instances(1, 200, dim).map(|i| i.family).collect();
            seen.dedup();
            for f in Family::available(dim) {
                assert!(seen.contains(&f), "{f:?} missing at dim {dim}");
            }
        }
    }

    #[test]
    fn seeds_differ() {
        assert_ne!(fuzz_instance(0, 0, 4).doc, fuzz_instance(1, 0, 4).doc);
    }
}
