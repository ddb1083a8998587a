//! Curvature of the Levi-Civita connection, the canonical connection and
//! their difference, and the identities tying them to Codazzi tensors.

pub mod difference;
pub mod ricci_s;
pub mod tensors;

pub use difference::{
    kd_on_frame, kd_sign_search, naturally_reductive_check, sec_d_eigenformula, sec_d_residual, KdSigns,
    NaturallyReductive, Plane, WitnessSource,
};
pub use ricci_s::{restricted_ricci, ricci_corollary_check, ricci_s_checks, CorollaryOutcome, RestrictedRicci, RicciSReport};
pub use tensors::{bianchi_check, curvature_set, ricci, scalar, sectional, BianchiCheck, CurvatureSet};

use crate::algebra::malgebra::MAlgebra;
use crate::error::Result;
use crate::spectral::SpectralDecomp;
use crate::tensor::{Matrix, ProductTable};

#[derive(Debug, Clone, PartialEq)]
pub struct PlaneCurvature {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub k: f64,
    pub k0: f64,
    pub kd: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureReport {
    pub planes: Vec<PlaneCurvature>,
    pub ric: Matrix<f64>,
    pub ric0: Matrix<f64>,
    pub ricd: Matrix<f64>,
    pub s: f64,
    pub s0: f64,
    pub sd: f64,
    /// `Ric^d_i` and `s^d_i` per eigenspace, when a decomposition is given.
    pub blocks: Vec<RestrictedRicci>,
    pub bianchi: BianchiCheck,
    pub naturally_reductive: NaturallyReductive,
}

pub fn curvature_report(
    alg: &MAlgebra<f64>,
    gram: &Matrix<f64>,
    alpha: &ProductTable<f64>,
    planes: &[(Vec<f64>, Vec<f64>)],
    decomp: Option<&SpectralDecomp>,
    tol: f64,
) -> Result<CurvatureReport> {
    let c = curvature_set(alg, gram, alpha)?;
    let mut out = Vec::new();
    for (x, y) in planes {
        out.push(PlaneCurvature {
            x: x.clone(),
            y: y.clone(),
            k: sectional(&c.r, gram, x, y)?,
            k0: sectional(&c.r0, gram, x, y)?,
            kd: sectional(&c.rd, gram, x, y)?,
        });
    }
    let blocks = match decomp {
        Some(d) => (0..d.r()).map(|i| restricted_ricci(&c.rd, d, i, tol)).collect::<Result<_>>()?,
        None => Vec::new(),
    };
    Ok(CurvatureReport {
        planes: out,
        bianchi: bianchi_check(&c.r0, alg, gram, tol),
        naturally_reductive: naturally_reductive_check(alg, gram, &c.rd, tol)?,
        ric: c.ric,
        ric0: c.ric0,
        ricd: c.ricd,
        s: c.s,
        s0: c.s0,
        sd: c.sd,
        blocks,
    })
}
