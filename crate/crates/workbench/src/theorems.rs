//! The full pipeline on one space, with every identity and proposition
//! turned into a pass/fail check.

use std::time::{Duration, Instant};

use rgw_core::scalar::in_span;
use rgw_core::{
    bianchi_check, check_compatibility, classify, codazzi_residual, codazzi_solution_space, construct_codazzi,
    covariant_differential, curvature_set, eigen_alpha_residual, intermediate_residuals, invariant_symmetric_forms,
    is_nilpotent, is_split_solvable, is_subalgebra, kd_sign_search, killing_form, killing_split, levi_civita_product,
    naturally_reductive_check, project_algebra, ricci_corollary_check, ricci_s_checks, sec_d_residual, sectional,
    skew_representation_check, torsion, validate_space, CorollaryOutcome, CovTensor, CurvatureSet, FrameBrackets,
    KdSigns, MAlgebra, ProductTable, Rational, Scalar, SpaceSpec, SplitSolvable, SymForm,
};
use serde::Serialize;

use crate::document::SpaceDocument;

/// Bound on the residuals of the identity suite.
pub const IDENTITY_TOL: f64 = 1e-8;
/// Schema tag of machine-readable output.
pub const SCHEMA: &str = "rgw-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlaneWitness {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub kd: f64,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionReport {
    /// Position in the solver's basis; `None` for the generic combination.
    pub index: Option<usize>,
    pub eigenvalues: Vec<f64>,
    pub block_dims: Vec<usize>,
    pub parallel: bool,
    pub essential: bool,
    pub ideal_blocks: Vec<usize>,
    /// `(i, j, k, <X_i, [Y_j, Z_k]_m>)` of largest size.
    pub triple_witness: Option<(usize, usize, usize, f64)>,
    pub kd_positive: Option<PlaneWitness>,
    pub kd_negative: Option<PlaneWitness>,
    pub sd_blocks: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub nilpotent: bool,
    pub nilpotency_degree: Option<usize>,
    /// `yes`, `no` or `undetermined`.
    pub split_solvable: String,
    /// Dimensions of the verified chain of ideals.
    pub chain_dims: Vec<usize>,
    /// `ad_m(witness)` eigenvalues as `(re, im)` when not split-solvable.
    pub witness: Option<Vec<f64>>,
    pub witness_eigenvalues: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub instance: String,
    pub reproducer: String,
    pub exact: bool,
    pub dim_h: usize,
    pub dim_m: usize,
    pub valid: bool,
    pub codazzi_dim: Option<usize>,
    pub naturally_reductive: Option<bool>,
    pub scalar_curvature: Option<(f64, f64, f64)>,
    pub structure: Option<StructureReport>,
    pub corollary: String,
    pub solutions: Vec<SolutionReport>,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl RunReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Checks whose name ends with `suffix`, across solutions.
    pub fn checks_ending(&self, suffix: &str) -> impl Iterator<Item = &Check> + '_ {
        let suffix = suffix.to_string();
        self.checks.iter().filter(move |c| c.name.ends_with(&suffix))
    }
}

#[derive(Default)]
struct Checks {
    prefix: String,
    list: Vec<Check>,
}

impl Checks {
    fn name(&self, name: &str) -> String {
        format!("{}{name}", self.prefix)
    }

    fn bounded(&mut self, name: &str, residual: f64, bound: f64) -> bool {
        let ok = residual.is_finite() && residual <= bound;
        let status = if ok { Status::Pass } else { Status::Fail };
        self.list.push(Check { name: self.name(name), status, residual: Some(residual), bound: Some(bound), detail: String::new() });
        ok
    }

    fn assert(&mut self, name: &str, ok: bool, detail: impl Into<String>) -> bool {
        let status = if ok { Status::Pass } else { Status::Fail };
        self.list.push(Check { name: self.name(name), status, residual: None, bound: None, detail: detail.into() });
        ok
    }

    fn skip(&mut self, name: &str, detail: impl Into<String>) {
        self.list.push(Check { name: self.name(name), status: Status::Skip, residual: None, bound: None, detail: detail.into() });
    }
}

/// The Levi-Civita product and the quantities derived from it, in double
/// precision, computed exactly first when the document is exact.
struct Geometry {
    spec: SpaceSpec<f64>,
    alg: MAlgebra<f64>,
    alpha: ProductTable<f64>,
    curv: CurvatureSet<f64>,
    exact: Option<ExactGeometry>,
}

struct ExactGeometry {
    spec: SpaceSpec<Rational>,
    alg: MAlgebra<Rational>,
    alpha: ProductTable<Rational>,
}

fn bound(tol: f64, scale: f64) -> f64 {
    tol * scale.max(1.0)
}

fn validate(doc: &SpaceDocument, tol: f64, out: &mut Checks) -> bool {
    let report = if doc.exact { validate_space(&doc.to_exact_spec(), tol) } else { validate_space(&doc.to_f64_spec(), tol) };
    match report {
        Ok(rep) => {
            for c in &rep.checks {
                let detail = if c.passed { String::new() } else { format!("residual {:e}", c.residual) };
                out.assert(&format!("validate.{}", c.invariant.name()), c.passed, detail);
            }
            rep.is_valid()
        }
        Err(e) => out.assert("validate.shapes", false, e.to_string()),
    }
}

fn levi_civita(doc: &SpaceDocument, tol: f64, out: &mut Checks) -> Option<Geometry> {
    let spec = doc.to_f64_spec();
    let alg = project_algebra(&spec);
    let scale = 1.0 + alg.bracket_m.max_magnitude() * (1.0 + spec.gram.max_magnitude());
    let (alpha, exact) = if doc.exact {
        let qspec = doc.to_exact_spec();
        let qalg = project_algebra(&qspec);
        let qalpha = match levi_civita_product(&qspec) {
            Ok(a) => a,
            Err(e) => {
                out.assert("levi_civita.product", false, e.to_string());
                return None;
            }
        };
        out.bounded("levi_civita.torsion", torsion(&qalg, &qalpha).max_magnitude(), 0.0);
        out.bounded("levi_civita.metric", rgw_core::connections::skew_residual(&qspec.gram, &qalpha), 0.0);
        out.bounded("levi_civita.koszul", rgw_core::connections::koszul_residual(&qalg, &qspec.gram, &qalpha), 0.0);
        out.bounded("levi_civita.equivariance", rgw_core::connections::equivariance_residual(&qspec, &qalpha), 0.0);
        (qalpha.map(Scalar::to_f64), Some(ExactGeometry { spec: qspec, alg: qalg, alpha: qalpha }))
    } else {
        let alpha = match levi_civita_product(&spec) {
            Ok(a) => a,
            Err(e) => {
                out.assert("levi_civita.product", false, e.to_string());
                return None;
            }
        };
        let b = bound(tol, scale);
        out.bounded("levi_civita.torsion", torsion(&alg, &alpha).max_magnitude(), b);
        out.bounded("levi_civita.metric", rgw_core::connections::skew_residual(&spec.gram, &alpha), b);
        out.bounded("levi_civita.koszul", rgw_core::connections::koszul_residual(&alg, &spec.gram, &alpha), b);
        out.bounded("levi_civita.equivariance", rgw_core::connections::equivariance_residual(&spec, &alpha), b);
        (alpha, None)
    };
    let curv = match &exact {
        Some(q) => curvature_set(&q.alg, &q.spec.gram, &q.alpha).map(|c| c.to_f64()),
        None => curvature_set(&alg, &spec.gram, &alpha),
    };
    let curv = match curv {
        Ok(c) => c,
        Err(e) => {
            out.assert("curvature.tensors", false, e.to_string());
            return None;
        }
    };
    Some(Geometry { spec, alg, alpha, curv, exact })
}

fn curvature_checks(g: &Geometry, tol: f64, out: &mut Checks) {
    let n = g.alg.dim;
    let c = &g.curv;
    // R0(X,Y)Z = -[[X,Y]_h, Z], evaluated from the structure constants
    let mut r0_err: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let w = g.alg.bracket_h(&g.alg.basis(i), &g.alg.basis(j));
            for k in 0..n {
                let v = g.alg.act(&w, &g.alg.basis(k));
                for (l, x) in v.iter().enumerate() {
                    r0_err = r0_err.max((c.r0.get(i, j, k, l) + x).abs());
                }
            }
        }
    }
    let scale = 1.0 + c.r.max_magnitude();
    out.bounded("canonical.curvature_formula", r0_err, bound(tol, scale));

    let ric_err = c.ricd.sub(&c.ric.sub(&c.ric0)).max_magnitude();
    let s_err = (c.sd - (c.s - c.s0)).abs();
    let mut k_err: f64 = 0.0;
    if let Ok(frame) = rgw_core::spectral::orthonormal_frame(&g.spec.gram) {
        for a in 0..n {
            for b in (a + 1)..n {
                let k = |r| sectional(r, &g.spec.gram, &frame[a], &frame[b]).unwrap_or(f64::NAN);
                k_err = k_err.max((k(&c.rd) - (k(&c.r) - k(&c.r0))).abs());
            }
        }
    }
    out.bounded("difference.curvature", ric_err.max(s_err).max(k_err), bound(tol, scale));

    let b = match &g.exact {
        Some(q) => {
            let c0 = rgw_core::curvature(&q.alg, &rgw_core::canonical_product(n));
            bianchi_check(&c0, &q.alg, &q.spec.gram, 0.0)
        }
        None => bianchi_check(&c.r0, &g.alg, &g.spec.gram, bound(tol, scale)),
    };
    out.assert(
        "canonical.bianchi_iff_jacobi",
        b.equivalence_holds(),
        format!("bianchi {} ({:e}), jacobi {} ({:e})", b.bianchi, b.bianchi_residual, b.jacobi, b.jacobi_residual),
    );
    out.assert("canonical.pair_skew", b.pair_skew, format!("residual {:e}", b.pair_skew_residual));
}

fn structure(g: &Geometry, tol: f64, out: &mut Checks) -> StructureReport {
    let nil = match &g.exact {
        Some(q) => is_nilpotent(&q.alg, 0.0),
        None => is_nilpotent(&g.alg, tol),
    };
    if nil.nilpotent {
        let beta = match &g.exact {
            Some(q) => killing_form(&q.alg).max_magnitude(),
            None => killing_form(&g.alg).max_magnitude(),
        };
        let b = if g.exact.is_some() { 0.0 } else { bound(tol, 1.0 + g.alg.bracket_m.max_magnitude().powi(2)) };
        out.bounded("structure.nilpotent_killing_zero", beta, b);
    }
    let split = is_split_solvable(&g.alg, tol);
    let mut report = StructureReport {
        nilpotent: nil.nilpotent,
        nilpotency_degree: nil.degree,
        split_solvable: String::new(),
        chain_dims: Vec::new(),
        witness: None,
        witness_eigenvalues: Vec::new(),
    };
    match &split {
        SplitSolvable::Yes { chain } => {
            report.split_solvable = "yes".into();
            report.chain_dims = chain.iter().map(Vec::len).collect();
            let btol = bound(tol.max(1e-9), 1.0 + g.alg.bracket_m.max_magnitude());
            out.assert("structure.split_chain_verified", rgw_core::verify_chain(&g.alg, chain, btol), "");
        }
        SplitSolvable::No { witness, eigenvalues } => {
            report.split_solvable = "no".into();
            report.witness = Some(witness.clone());
            report.witness_eigenvalues = eigenvalues.iter().map(|z| (z.re, z.im)).collect();
        }
        SplitSolvable::Undetermined => report.split_solvable = "undetermined".into(),
    }
    out.assert(
        "structure.nilpotent_implies_real_spectra",
        !(nil.nilpotent && matches!(split, SplitSolvable::No { .. })),
        "",
    );
    report
}

fn form_rows<S: Scalar>(forms: &[SymForm<S>]) -> Vec<Vec<S>> {
    forms.iter().map(|f| f.coords().to_vec()).collect()
}

fn solve(g: &Geometry, tol: f64, out: &mut Checks) -> Option<(Vec<SymForm<f64>>, Vec<Option<bool>>)> {
    match &g.exact {
        Some(q) => {
            let sols = match codazzi_solution_space(&q.spec, &q.alpha, 0.0) {
                Ok(s) => s,
                Err(e) => {
                    out.assert("codazzi.solve", false, e.to_string());
                    return None;
                }
            };
            let gram = SymForm::symmetrize(&q.spec.gram);
            out.assert("codazzi.metric_in_span", in_span(&form_rows(&sols), gram.coords(), 0.0), "");
            let inv = invariant_symmetric_forms(&q.spec, 0.0);
            out.assert("codazzi.within_invariant_forms", sols.iter().all(|s| in_span(&form_rows(&inv), s.coords(), 0.0)), "");
            let par: Vec<Option<bool>> = sols
                .iter()
                .map(|s| Some(covariant_differential(&q.alpha, &CovTensor::from_matrix(&s.to_matrix())).max_magnitude() == 0.0))
                .collect();
            Some((sols.iter().map(SymForm::to_f64).collect(), par))
        }
        None => {
            let sols = match codazzi_solution_space(&g.spec, &g.alpha, tol) {
                Ok(s) => s,
                Err(e) => {
                    out.assert("codazzi.solve", false, e.to_string());
                    return None;
                }
            };
            let gram = SymForm::symmetrize(&g.spec.gram);
            let unit = gram.scale(&(1.0 / gram.max_magnitude()));
            out.assert("codazzi.metric_in_span", in_span(&form_rows(&sols), unit.coords(), 1e-7), "");
            let n_sol = sols.len();
            Some((sols, vec![None; n_sol]))
        }
    }
}

/// A fixed combination with unequal weights of the whole solution basis.
fn generic_combination(sols: &[SymForm<f64>]) -> SymForm<f64> {
    let mut acc = SymForm::zeros(sols[0].dim());
    for (k, s) in sols.iter().enumerate() {
        acc = acc.add(&s.scale(&(1.0 / (k as f64 + 1.0) + 0.25 * k as f64)));
    }
    acc
}

struct Context<'a> {
    g: &'a Geometry,
    tol: f64,
    nilpotent: bool,
    split_yes: bool,
    naturally_reductive: bool,
}

fn plane_witness(p: &rgw_core::Plane) -> PlaneWitness {
    PlaneWitness { x: p.x.clone(), y: p.y.clone(), kd: p.kd, source: format!("{:?}", p.source).to_lowercase() }
}

fn check_solution(
    cx: &Context,
    index: Option<usize>,
    a: &SymForm<f64>,
    exact_parallel: Option<bool>,
    out: &mut Checks,
) -> Option<SolutionReport> {
    let g = cx.g;
    let tol = cx.tol;
    let gram = &g.spec.gram;
    let class = match classify(&g.alg, gram, &g.alpha, a, tol) {
        Ok(c) => c,
        Err(e) => {
            out.assert("classify", false, e.to_string());
            return None;
        }
    };
    let decomp = &class.decomp;
    let r = decomp.r();
    out.assert(
        "parallel_criteria_agree",
        class.criteria_agree(),
        format!("nabla {:e}, triple {:?}", class.nabla_residual, class.triple_witness),
    );
    if let Some(p) = exact_parallel {
        out.assert("parallel_exact_agrees", p == class.parallel, format!("exact {p}, double {}", class.parallel));
    }
    out.assert("nonparallel_rank", class.rank_condition_holds(), format!("r = {r}"));
    out.assert(
        "naturally_reductive_parallel",
        !cx.naturally_reductive || class.parallel,
        "naturally reductive metric with a nonparallel Codazzi tensor",
    );
    out.assert(
        "essential_obstructions",
        !class.essential || (!cx.nilpotent && !cx.split_yes),
        format!("nilpotent {}, split-solvable {}", cx.nilpotent, cx.split_yes),
    );

    let compat = check_compatibility(&g.alg, decomp, IDENTITY_TOL);
    out.bounded("compatibility", compat.max_residual, IDENTITY_TOL);

    for (tag, lambdas) in [("construct", decomp.lambdas.clone()), ("construct_affine", decomp.lambdas.iter().map(|l| 1.0 - 2.0 * l).collect())] {
        match construct_codazzi(&g.alg, gram, &decomp.blocks, &lambdas, IDENTITY_TOL) {
            Ok(b) => {
                let bscale = 1.0 + g.alpha.max_magnitude().max(1.0) * b.max_magnitude();
                out.bounded(tag, codazzi_residual(&g.alpha, &b), bound(tol, bscale));
            }
            Err(e) => {
                out.assert(tag, false, e.to_string());
            }
        }
    }

    let sub_ok = decomp.blocks.iter().all(|b| matches!(is_subalgebra(&g.alg, b, IDENTITY_TOL), Ok(true)));
    out.assert("eigenspaces_subalgebras", sub_ok, "");

    let fb = FrameBrackets::new(&g.alg, decomp);
    let (first, second) = intermediate_residuals(&g.alg, decomp);
    out.bounded("intermediate_brackets", first.max(second), IDENTITY_TOL);
    out.bounded("eigen_alpha", eigen_alpha_residual(&g.alg, &g.alpha, decomp), IDENTITY_TOL);
    out.bounded("sec_d", sec_d_residual(&fb, &g.curv.rd, gram), IDENTITY_TOL);

    let mut sd_blocks = Vec::new();
    match ricci_s_checks(&fb, decomp, &g.curv.rd, &g.curv.ricd, g.curv.sd, IDENTITY_TOL) {
        Ok(rep) => {
            out.bounded("cyclic_identity", rep.cyclic_residual, IDENTITY_TOL);
            out.bounded("scalar_sum", rep.sum_residual, IDENTITY_TOL);
            out.bounded("ricci_first", rep.first_residual, IDENTITY_TOL);
            out.bounded("ricci_estimate", rep.estimate_residual, IDENTITY_TOL);
            let worst = rep.inequality_excess.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
            out.assert("ricci_inequality", rep.inequality_holds, format!("largest excess {worst:e}"));
            out.assert("restricted_ricci_preserved", rep.restriction_preserved, "");
            sd_blocks = rep.sd_blocks.clone();
        }
        Err(e) => {
            out.assert("ricci_s", false, e.to_string());
        }
    }

    let mut killing: f64 = 0.0;
    let mut skew_ok = true;
    let mut skew_detail = String::new();
    for k in 0..r {
        match killing_split(&g.alg, decomp, k) {
            Ok(parts) => killing = parts.iter().fold(killing, |m, p| m.max(p.residual)),
            Err(_) => killing = f64::INFINITY,
        }
        match skew_representation_check(&g.alg, decomp, k, IDENTITY_TOL) {
            Ok(rep) if rep.holds => {}
            Ok(rep) => {
                skew_ok = false;
                skew_detail = format!("block {k}: skew {:e}, real part {:e}", rep.skew_residual, rep.max_real_part);
            }
            Err(e) => {
                skew_ok = false;
                skew_detail = format!("block {k}: {e}");
            }
        }
    }
    out.bounded("killing_split", killing, IDENTITY_TOL);
    out.assert("skew_representation", skew_ok, skew_detail);

    let margin = 10.0 * tol;
    let (mut kd_positive, mut kd_negative) = (None, None);
    match kd_sign_search(&fb, &g.curv.rd, gram, class.parallel, tol, margin) {
        KdSigns::Parallel => {}
        KdSigns::Found { positive, negative, .. } => {
            // evaluate both witnesses again from the tensor
            let pos = sectional(&g.curv.rd, gram, &positive.x, &positive.y).unwrap_or(f64::NAN);
            let neg = sectional(&g.curv.rd, gram, &negative.x, &negative.y).unwrap_or(f64::NAN);
            out.assert("kd_sign_witnesses", pos > margin && neg < -margin, format!("K^d values {pos:e} and {neg:e}"));
            kd_positive = Some(plane_witness(&positive));
            kd_negative = Some(plane_witness(&negative));
        }
        KdSigns::Missing { positive, negative, .. } => {
            out.assert(
                "kd_sign_witnesses",
                false,
                format!("positive {:?}, negative {:?}", positive.map(|p| p.kd), negative.map(|p| p.kd)),
            );
        }
    }

    Some(SolutionReport {
        index,
        eigenvalues: decomp.lambdas.clone(),
        block_dims: decomp.block_dims(),
        parallel: class.parallel,
        essential: class.essential,
        ideal_blocks: class.ideal_blocks.clone(),
        triple_witness: class.triple_witness,
        kd_positive,
        kd_negative,
        sd_blocks,
    })
}

/// Run every check on a document. `reproducer` says how to regenerate it.
pub fn run_theorems(doc: &SpaceDocument, tol: f64, reproducer: &str) -> RunReport {
    let start = Instant::now();
    let mut out = Checks::default();
    let mut report = RunReport {
        instance: doc.name.clone(),
        reproducer: reproducer.to_string(),
        exact: doc.exact,
        dim_h: doc.dim_h,
        dim_m: doc.dim_m,
        valid: false,
        codazzi_dim: None,
        naturally_reductive: None,
        scalar_curvature: None,
        structure: None,
        corollary: String::new(),
        solutions: Vec::new(),
        checks: Vec::new(),
        elapsed: Duration::ZERO,
    };
    report.valid = validate(doc, tol, &mut out);
    if report.valid {
        if let Some(g) = levi_civita(doc, tol, &mut out) {
            pipeline(&g, tol, &mut out, &mut report);
        }
    }
    report.checks = out.list;
    report.elapsed = start.elapsed();
    report
}

fn pipeline(g: &Geometry, tol: f64, out: &mut Checks, report: &mut RunReport) {
    curvature_checks(g, tol, out);
    report.scalar_curvature = Some((g.curv.s, g.curv.s0, g.curv.sd));

    let nr = match naturally_reductive_check(&g.alg, &g.spec.gram, &g.curv.rd, tol) {
        Ok(nr) => nr,
        Err(e) => {
            out.assert("naturally_reductive", false, e.to_string());
            return;
        }
    };
    report.naturally_reductive = Some(nr.holds);
    if let (Some(res), Some(nonneg)) = (nr.kd_formula_residual, nr.kd_nonnegative) {
        out.bounded("naturally_reductive.kd_formula", res, IDENTITY_TOL);
        out.assert("naturally_reductive.kd_nonnegative", nonneg, "");
    }

    let st = structure(g, tol, out);
    let (nilpotent, split_yes) = (st.nilpotent, st.split_solvable == "yes");
    report.structure = Some(st);

    let Some((sols, exact_parallel)) = solve(g, tol, out) else { return };
    report.codazzi_dim = Some(sols.len());
    let cx = Context { g, tol, nilpotent, split_yes, naturally_reductive: nr.holds };
    let mut candidates: Vec<(Option<usize>, SymForm<f64>, Option<bool>)> =
        sols.iter().zip(&exact_parallel).enumerate().map(|(k, (s, p))| (Some(k), s.clone(), *p)).collect();
    if sols.len() > 1 {
        candidates.push((None, generic_combination(&sols), None));
    }
    for (index, a, par) in candidates {
        out.prefix = match index {
            Some(k) => format!("solution[{k}]."),
            None => "solution[generic].".into(),
        };
        let scale = 1.0 + g.alpha.max_magnitude().max(1.0) * a.max_magnitude();
        out.bounded("codazzi_residual", codazzi_residual(&g.alpha, &a), bound(tol, scale));
        out.bounded("invariance", rgw_core::algebra::forms::invariance_residual(&g.spec, &a), bound(tol, scale));
        if let Some(s) = check_solution(&cx, index, &a, par, out) {
            report.solutions.push(s);
        }
    }
    out.prefix.clear();

    match ricci_corollary_check(&g.spec, &g.alg, &g.alpha, &g.curv.rd, &g.curv.ricd, tol) {
        Ok(CorollaryOutcome::Checked { sd_blocks, sd_last_nonzero, non_abelian_blocks, holds }) => {
            report.corollary = "checked".into();
            out.assert(
                "corollary",
                holds,
                format!("s^d blocks {sd_blocks:?}, last nonzero {sd_last_nonzero}, non-abelian {non_abelian_blocks:?}"),
            );
        }
        Ok(CorollaryOutcome::HypothesesNotMet(why)) => {
            report.corollary = format!("hypotheses not met: {why}");
            out.skip("corollary", why);
        }
        Ok(CorollaryOutcome::Skipped(why)) => {
            report.corollary = format!("skipped: {why}");
            out.skip("corollary", why);
        }
        Err(e) => {
            report.corollary = format!("error: {e}");
            out.assert("corollary", false, e.to_string());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{builtin_corpus, corpus_instance};

    fn failures(r: &RunReport) -> Vec<String> {
        r.failures().map(|c| format!("{} {:?} {}", c.name, c.residual, c.detail)).collect()
    }

    #[test]
    fn corpus_passes_exactly() {
        for doc in builtin_corpus() {
            let r = run_theorems(&doc, 1e-9, &doc.name);
            assert!(r.passed(), "{}: {:?}", doc.name, failures(&r));
        }
    }

    #[test]
    fn abelian_r3() {
        let r = run_theorems(&corpus_instance("abelian-r3").unwrap(), 1e-9, "");
        assert_eq!(r.codazzi_dim, Some(6));
        assert!(r.solutions.iter().all(|s| s.parallel));
        assert_eq!(r.scalar_curvature, Some((0.0, 0.0, 0.0)));
    }

    #[test]
    fn round_su2() {
        let r = run_theorems(&corpus_instance("su2-round").unwrap(), 1e-9, "");
        assert_eq!(r.naturally_reductive, Some(true));
        assert_eq!(r.codazzi_dim, Some(1));
        assert!(r.solutions[0].parallel);
        assert_eq!(r.scalar_curvature, Some((1.5, 0.0, 1.5)));
        assert!(r.check("naturally_reductive.kd_formula").unwrap().residual.unwrap() < 1e-12);
    }

    #[test]
    fn balanced_su2_witnesses() {
        let r = run_theorems(&corpus_instance("su2-balanced").unwrap(), 1e-9, "");
        assert!(r.passed(), "{:?}", failures(&r));
        assert_eq!(r.codazzi_dim, Some(3));
        let essential: Vec<&SolutionReport> = r.solutions.iter().filter(|s| s.essential).collect();
        assert!(!essential.is_empty());
        for s in essential {
            assert!(s.kd_positive.as_ref().unwrap().kd > 1e-8);
            assert!(s.kd_negative.as_ref().unwrap().kd < -1e-8);
        }
        assert_eq!(r.structure.as_ref().unwrap().split_solvable, "no");
    }

    #[test]
    fn float_corpus_matches_exact() {
        for mut doc in builtin_corpus() {
            let exact = run_theorems(&doc, 1e-9, "");
            doc.exact = false;
            doc = crate::document::parse_document(&doc.to_json().replace("\"exact\": true", "\"exact\": false")).unwrap();
            let float = run_theorems(&doc, 1e-9, "");
            assert!(float.passed(), "{}: {:?}", doc.name, failures(&float));
            assert_eq!(exact.codazzi_dim, float.codazzi_dim, "{}", doc.name);
            let par = |r: &RunReport| r.solutions.iter().map(|s| s.parallel).collect::<Vec<_>>();
            assert_eq!(par(&exact), par(&float), "{}", doc.name);
        }
    }

    #[test]
    fn invalid_document_stops_early() {
        let mut doc = corpus_instance("heisenberg").unwrap();
        doc.metric[0] = crate::document::Number::Exact(Rational::from_i64(-1));
        let r = run_theorems(&doc, 1e-9, "");
        assert!(!r.valid && !r.passed());
        assert_eq!(r.check("validate.metric_spd").unwrap().status, Status::Fail);
        assert!(r.codazzi_dim.is_none());
    }
}
