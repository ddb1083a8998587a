use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rgw_core::{
    classify, codazzi_solution_space, curvature_report, is_nilpotent, is_split_solvable, levi_civita_product,
    project_algebra, torsion, validate_space, Matrix, Scalar, SplitSolvable, SymForm, DEFAULT_TOL,
};
use rgw_workbench::corpus::builtin_corpus;
use rgw_workbench::document::{parse_document_with, SpaceDocument};
use rgw_workbench::fuzz::{fuzz_instances, MAX_DIM};
use rgw_workbench::theorems::{run_theorems, RunReport, Status, SCHEMA};
use serde_json::{json, Value};

const OK: u8 = 0;
const ASSERTION_FAILURE: u8 = 1;
const INPUT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(name = "rgw", version, about = "Invariant connections, curvature and Codazzi tensors on reductive spaces")]
struct Cli {
    /// Absolute tolerance for residual tests in double precision.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Read every value as an exact rational.
    #[arg(long, global = true)]
    exact: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Check the structural invariants of a space.
    Validate { file: PathBuf },
    /// Levi-Civita product, curvatures and structure of a space.
    Report { file: PathBuf },
    /// Invariant Codazzi tensors and their classification.
    Codazzi { file: PathBuf },
    /// Run every identity and proposition check.
    Theorems {
        #[arg(required_unless_present = "corpus")]
        file: Option<PathBuf>,
        /// Run on the built-in corpus instead of a file.
        #[arg(long, conflicts_with = "file")]
        corpus: bool,
    },
    /// Generate random spaces, optionally checking each.
    Fuzz {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        count: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=MAX_DIM as u64))]
        dim: u64,
        #[arg(long)]
        theorems: bool,
    },
}

struct Failure(u8, String);

fn load(path: &Path, exact: bool) -> Result<SpaceDocument, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure(INPUT_ERROR, format!("{}: {e}", path.display())))?;
    let mut doc = parse_document_with(&text, exact).map_err(|e| Failure(INPUT_ERROR, format!("{}: {e}", path.display())))?;
    if doc.name.is_empty() {
        let stem = path.file_name().and_then(|s| s.to_str()).unwrap_or("unnamed");
        doc.name = stem.trim_end_matches(".rgw.json").trim_end_matches(".json").to_string();
    }
    Ok(doc)
}

fn machine(mut v: Value, command: &str) -> String {
    if let Value::Object(map) = &mut v {
        map.insert("schema".into(), json!(SCHEMA));
        map.insert("command".into(), json!(command));
    }
    serde_json::to_string_pretty(&v).expect("serializable") + "\n"
}

fn fmt_vec<S: Scalar>(v: &[S]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_matrix<S: Scalar>(m: &Matrix<S>, indent: &str) -> String {
    (0..m.rows).map(|i| format!("{indent}{}\n", fmt_vec(m.row(i)))).collect()
}

fn matrix_json(m: &Matrix<f64>) -> Value {
    json!((0..m.rows).map(|i| m.row(i).to_vec()).collect::<Vec<_>>())
}

fn validate_cmd(doc: &SpaceDocument, tol: f64, format: Format) -> Result<(u8, String), Failure> {
    let rep = if doc.exact { validate_space(&doc.to_exact_spec(), tol) } else { validate_space(&doc.to_f64_spec(), tol) };
    let rep = rep.map_err(|e| Failure(INPUT_ERROR, format!("{}: {e}", doc.name)))?;
    let code = if rep.is_valid() { OK } else { ASSERTION_FAILURE };
    let out = match format {
        Format::Machine => machine(
            json!({
                "instance": doc.name,
                "exact": doc.exact,
                "valid": rep.is_valid(),
                "checks": rep.checks.iter().map(|c| json!({
                    "invariant": c.invariant.name(),
                    "passed": c.passed,
                    "residual": c.residual,
                })).collect::<Vec<_>>(),
            }),
            "validate",
        ),
        Format::Text => {
            let mut s = format!("{}: {}\n", doc.name, if rep.is_valid() { "valid" } else { "INVALID" });
            for c in &rep.checks {
                let _ = writeln!(s, "  {:<24} {}  {:e}", c.invariant.name(), if c.passed { "pass" } else { "FAIL" }, c.residual);
            }
            s
        }
    };
    Ok((code, out))
}

fn require_valid(doc: &SpaceDocument, tol: f64) -> Result<(), Failure> {
    let (code, text) = validate_cmd(doc, tol, Format::Text)?;
    if code != OK {
        return Err(Failure(ASSERTION_FAILURE, text));
    }
    Ok(())
}

fn alpha_lines(doc: &SpaceDocument) -> Result<Vec<(usize, usize, String, Vec<f64>)>, Failure> {
    let n = doc.dim_m;
    let err = |e: rgw_core::Error| Failure(ASSERTION_FAILURE, format!("{}: {e}", doc.name));
    let mut out = Vec::new();
    if doc.exact {
        let a = levi_civita_product(&doc.to_exact_spec()).map_err(err)?;
        for i in 0..n {
            for j in 0..n {
                let v = a.basis_product(i, j);
                if v.iter().any(|x| !x.is_exact_zero()) {
                    out.push((i, j, fmt_vec(&v), v.iter().map(Scalar::to_f64).collect()));
                }
            }
        }
    } else {
        let a = levi_civita_product(&doc.to_f64_spec()).map_err(err)?;
        for i in 0..n {
            for j in 0..n {
                let v = a.basis_product(i, j);
                if v.iter().any(|x| *x != 0.0) {
                    out.push((i, j, fmt_vec(&v), v));
                }
            }
        }
    }
    Ok(out)
}

fn report_cmd(doc: &SpaceDocument, tol: f64, format: Format) -> Result<(u8, String), Failure> {
    require_valid(doc, tol)?;
    let spec = doc.to_f64_spec();
    let alg = project_algebra(&spec);
    let err = |e: rgw_core::Error| Failure(ASSERTION_FAILURE, format!("{}: {e}", doc.name));
    let alpha = if doc.exact {
        levi_civita_product(&doc.to_exact_spec()).map_err(err)?.map(Scalar::to_f64)
    } else {
        levi_civita_product(&spec).map_err(err)?
    };
    let products = alpha_lines(doc)?;
    let n = spec.dim_m;
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    let planes: Vec<(Vec<f64>, Vec<f64>)> = pairs.iter().map(|&(i, j)| (alg.basis(i), alg.basis(j))).collect();
    let rep = curvature_report(&alg, &spec.gram, &alpha, &planes, None, tol).map_err(err)?;
    let tors = torsion(&alg, &alpha).max_magnitude();
    let metric = rgw_core::connections::skew_residual(&spec.gram, &alpha);
    let nil = is_nilpotent(&alg, tol);
    let split = match is_split_solvable(&alg, tol) {
        SplitSolvable::Yes { .. } => "yes",
        SplitSolvable::No { .. } => "no",
        SplitSolvable::Undetermined => "undetermined",
    };
    let nr = &rep.naturally_reductive;
    let out = match format {
        Format::Machine => machine(
            json!({
                "instance": doc.name,
                "levi_civita": products.iter().map(|(i, j, _, v)| json!({"i": i, "j": j, "value": v})).collect::<Vec<_>>(),
                "torsion_residual": tors,
                "metric_residual": metric,
                "planes": rep.planes.iter().zip(&pairs).map(|(p, (i, j))| {
                    json!({"i": i, "j": j, "k": p.k, "k0": p.k0, "kd": p.kd})
                }).collect::<Vec<_>>(),
                "ricci": matrix_json(&rep.ric),
                "ricci0": matrix_json(&rep.ric0),
                "ricci_d": matrix_json(&rep.ricd),
                "scalar": {"s": rep.s, "s0": rep.s0, "sd": rep.sd},
                "bianchi_r0": rep.bianchi.bianchi,
                "jacobi_m": rep.bianchi.jacobi,
                "naturally_reductive": nr.holds,
                "nilpotent": nil.nilpotent,
                "nilpotency_degree": nil.degree,
                "split_solvable": split,
            }),
            "report",
        ),
        Format::Text => {
            let mut s = format!("{} (dim h = {}, dim m = {}{})\n", doc.name, doc.dim_h, doc.dim_m, if doc.exact { ", exact" } else { "" });
            s.push_str("Levi-Civita product, nonzero a(e_i, e_j):\n");
            for (i, j, text, _) in &products {
                let _ = writeln!(s, "  a(e{i}, e{j}) = {text}");
            }
            let _ = writeln!(s, "torsion residual {tors:e}, metric residual {metric:e}");
            s.push_str("sectional curvature of coordinate planes: K, K0, Kd\n");
            for (p, (i, j)) in rep.planes.iter().zip(&pairs) {
                let _ = writeln!(s, "  (e{i}, e{j})  {}  {}  {}", p.k, p.k0, p.kd);
            }
            let _ = write!(s, "Ric:\n{}Ric0:\n{}Ric^d:\n{}", fmt_matrix(&rep.ric, "  "), fmt_matrix(&rep.ric0, "  "), fmt_matrix(&rep.ricd, "  "));
            let _ = writeln!(s, "scalar curvature s = {}, s0 = {}, s^d = {}", rep.s, rep.s0, rep.sd);
            let _ = writeln!(
                s,
                "Bianchi identity of R0: {}, Jacobi identity of [.,.]_m: {}",
                rep.bianchi.bianchi, rep.bianchi.jacobi
            );
            let _ = writeln!(s, "naturally reductive: {}", nr.holds);
            let _ = writeln!(s, "nilpotent: {} (degree {:?}), split-solvable: {split}", nil.nilpotent, nil.degree);
            s
        }
    };
    Ok((OK, out))
}

fn codazzi_cmd(doc: &SpaceDocument, tol: f64, format: Format) -> Result<(u8, String), Failure> {
    require_valid(doc, tol)?;
    let spec = doc.to_f64_spec();
    let alg = project_algebra(&spec);
    let err = |e: rgw_core::Error| Failure(ASSERTION_FAILURE, format!("{}: {e}", doc.name));
    let (alpha, sols, shown): (_, Vec<SymForm<f64>>, Vec<String>) = if doc.exact {
        let q = doc.to_exact_spec();
        let a = levi_civita_product(&q).map_err(err)?;
        let s = codazzi_solution_space(&q, &a, 0.0).map_err(err)?;
        let shown = s.iter().map(|f| fmt_matrix(&f.to_matrix(), "    ")).collect();
        (a.map(Scalar::to_f64), s.iter().map(SymForm::to_f64).collect(), shown)
    } else {
        let a = levi_civita_product(&spec).map_err(err)?;
        let s = codazzi_solution_space(&spec, &a, tol).map_err(err)?;
        let shown = s.iter().map(|f| fmt_matrix(&f.to_matrix(), "    ")).collect();
        (a, s, shown)
    };
    let mut entries = Vec::new();
    let mut text = format!("{}: Codazzi solution space of dimension {}\n", doc.name, sols.len());
    for (k, a) in sols.iter().enumerate() {
        let c = classify(&alg, &spec.gram, &alpha, a, tol).map_err(err)?;
        let compat = rgw_core::check_compatibility(&alg, &c.decomp, tol.max(1e-8));
        let _ = write!(
            text,
            "  solution {k}:\n{}    eigenvalues {:?}, multiplicities {:?}\n    parallel {}, essential {}, ideal eigenspaces {:?}, compatibility residual {:e}\n",
            shown[k],
            c.decomp.lambdas,
            c.decomp.block_dims(),
            c.parallel,
            c.essential,
            c.ideal_blocks,
            compat.max_residual
        );
        entries.push(json!({
            "index": k,
            "form": matrix_json(&a.to_matrix()),
            "eigenvalues": c.decomp.lambdas,
            "multiplicities": c.decomp.block_dims(),
            "parallel": c.parallel,
            "essential": c.essential,
            "ideal_blocks": c.ideal_blocks,
            "compatibility_residual": compat.max_residual,
        }));
    }
    let out = match format {
        Format::Machine => machine(json!({"instance": doc.name, "dimension": sols.len(), "solutions": entries}), "codazzi"),
        Format::Text => text,
    };
    Ok((OK, out))
}

fn summary_line(r: &RunReport) -> String {
    let failed = r.failures().count();
    let skipped = r.checks.iter().filter(|c| c.status == Status::Skip).count();
    format!(
        "{}: {} ({} checks, {} failed, {} skipped, codazzi dim {}) [{:.1} ms]\n",
        r.instance,
        if failed == 0 { "PASS" } else { "FAIL" },
        r.checks.len(),
        failed,
        skipped,
        r.codazzi_dim.map_or("-".into(), |d| d.to_string()),
        r.elapsed.as_secs_f64() * 1e3
    )
}

fn check_line(c: &rgw_workbench::theorems::Check) -> String {
    let status = match c.status {
        Status::Pass => "pass",
        Status::Fail => "FAIL",
        Status::Skip => "skip",
    };
    let mut s = format!("  {status}  {}", c.name);
    if let (Some(r), Some(b)) = (c.residual, c.bound) {
        let _ = write!(s, "  {r:e} <= {b:e}");
    }
    if !c.detail.is_empty() {
        let _ = write!(s, "  ({})", c.detail);
    }
    s.push('\n');
    s
}

fn render_reports(reports: &[RunReport], verbose: bool, format: Format, extra: Value) -> (u8, String) {
    let failed = reports.iter().filter(|r| !r.passed()).count();
    let code = if failed == 0 { OK } else { ASSERTION_FAILURE };
    let out = match format {
        Format::Machine => {
            let mut v = extra;
            if let Value::Object(map) = &mut v {
                map.insert("failed_instances".into(), json!(failed));
                map.insert("reports".into(), serde_json::to_value(reports).expect("serializable"));
            }
            machine(v, "theorems")
        }
        Format::Text => {
            let mut s = String::new();
            for r in reports {
                s.push_str(&summary_line(r));
                for c in &r.checks {
                    if verbose || c.status == Status::Fail {
                        s.push_str(&check_line(c));
                    }
                }
                if !r.passed() {
                    let _ = writeln!(s, "  reproducer: {}", r.reproducer);
                }
            }
            let _ = writeln!(s, "{} instances, {failed} with failures", reports.len());
            s
        }
    };
    (code, out)
}

fn run(cli: Cli) -> Result<(u8, String), Failure> {
    let tol = cli.tol;
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Failure(INPUT_ERROR, format!("invalid tolerance {tol}")));
    }
    match &cli.command {
        Command::Validate { file } => validate_cmd(&load(file, cli.exact)?, tol, cli.format),
        Command::Report { file } => report_cmd(&load(file, cli.exact)?, tol, cli.format),
        Command::Codazzi { file } => codazzi_cmd(&load(file, cli.exact)?, tol, cli.format),
        Command::Theorems { file, corpus } => {
            let (docs, verbose): (Vec<(SpaceDocument, String)>, bool) = if *corpus {
                let docs = builtin_corpus()
                    .into_iter()
                    .map(|d| {
                        let d = if cli.exact { d.into_exact() } else { d };
                        let rep = format!("rgw theorems --corpus (instance {})", d.name);
                        (d, rep)
                    })
                    .collect();
                (docs, false)
            } else {
                let path = file.as_ref().expect("clap requires a file");
                (vec![(load(path, cli.exact)?, format!("rgw theorems {}", path.display()))], true)
            };
            let reports: Vec<RunReport> = docs.iter().map(|(d, rep)| run_theorems(d, tol, rep)).collect();
            Ok(render_reports(&reports, verbose, cli.format, json!({"tol": tol})))
        }
        Command::Fuzz { seed, count, dim, theorems } => {
            let instances = fuzz_instances(*seed, *count, *dim as usize).map(|mut inst| {
                if cli.exact {
                    inst.doc = inst.doc.into_exact();
                }
                inst
            });
            let extra = json!({"seed": seed, "count": count, "dim": dim, "tol": tol});
            if *theorems {
                let reports: Vec<RunReport> = instances.map(|i| run_theorems(&i.doc, tol, &i.reproducer())).collect();
                return Ok(render_reports(&reports, false, cli.format, extra));
            }
            let out = match cli.format {
                Format::Machine => {
                    let list: Vec<Value> = instances
                        .map(|i| {
                            let doc: Value = serde_json::from_str(&i.doc.to_json()).expect("normalized json");
                            json!({"index": i.index, "family": i.family.name(), "rejected": i.rejected, "document": doc})
                        })
                        .collect();
                    let mut v = extra;
                    v["instances"] = json!(list);
                    machine(v, "fuzz")
                }
                Format::Text => instances
                    .map(|i| {
                        format!(
                            "{:>5}  {:<10}  dim h {:<2}  rejected {:<3}  {}\n",
                            i.index,
                            i.family.name(),
                            i.doc.dim_h,
                            i.rejected,
                            i.doc.name
                        )
                    })
                    .collect(),
            };
            Ok((OK, out))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((code, out)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(Failure(code, msg)) => {
            eprint!("{msg}");
            if !msg.ends_with('\n') {
                eprintln!();
            }
            ExitCode::from(code)
        }
    }
}
