//! Single evaluations shared by `eval`, `psi` and `table`.

use clap::ValueEnum;
use mtds_core::complex::BranchedBase;
use mtds_core::mt::{in_convergence_region, mt_direct, mt_eval, CoefficientSequence, MtPoint, MtRoute, MtValue};
use mtds_core::psi::{psi, psi_by_route, PsiEvaluation, PsiParams, Route};
use mtds_core::{Error, Result};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MtRouteChoice {
    /// Refuse outside the region of absolute convergence, then pick the
    /// cheapest route.
    Auto,
    /// Box summation only.
    Direct,
    /// Allow analytic continuation by contour integrals.
    Continued,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PsiRouteChoice {
    Auto,
    Integral,
    Mb,
    Asym,
    Reflected,
}

pub fn mt_route_name(r: MtRoute) -> &'static str {
    match r {
        MtRoute::Dirichlet => "dirichlet",
        MtRoute::Direct => "direct",
        MtRoute::MellinBarnes => "mellin_barnes",
    }
}

pub fn psi_route_name(r: Route) -> &'static str {
    match r {
        Route::Integral => "integral",
        Route::MellinBarnes => "mellin_barnes",
        Route::Asymptotic => "asymptotic",
        Route::Reflected => "reflected",
    }
}

pub fn psi_params_text(p: &PsiParams) -> String {
    match *p {
        PsiParams::Integral { phi, nodes } => format!("phi = {phi}, nodes = {nodes}"),
        PsiParams::MellinBarnes { gamma, height, step, residues } => {
            format!("gamma = {gamma}, height = {height}, step = {step}, residues = {residues}")
        }
        PsiParams::Asymptotic { terms } => format!("terms = {terms}"),
    }
}

pub fn eval_mt(s: &[Complex64], coeffs: &[CoefficientSequence], tol: f64, route: MtRouteChoice) -> Result<MtValue> {
    let p = MtPoint::new(s.to_vec())?;
    if coeffs.len() != p.depth() {
        return Err(Error::InvalidInput(format!(
            "{} coefficient sequences for {} arguments",
            coeffs.len(),
            s.len()
        )));
    }
    match route {
        MtRouteChoice::Auto => {
            let alphas: Vec<f64> = coeffs.iter().map(|a| a.alpha()).collect();
            let region = in_convergence_region(&p, &alphas)?;
            if !region.inside {
                return Err(Error::Region { witness: region.witness, slack: region.slack });
            }
            mt_eval(&p, coeffs, tol)
        }
        MtRouteChoice::Direct => {
            let (value, t) = mt_direct(&p, coeffs, tol)?;
            Ok(MtValue { value, error: t.tail_bound, route: MtRoute::Direct, terms: t.terms_used })
        }
        MtRouteChoice::Continued => mt_eval(&p, coeffs, tol),
    }
}

pub fn eval_psi(a: Complex64, c: Complex64, x: &BranchedBase, route: PsiRouteChoice) -> Result<PsiEvaluation> {
    let forced = match route {
        PsiRouteChoice::Auto => return psi(a, c, x),
        PsiRouteChoice::Integral => Route::Integral,
        PsiRouteChoice::Mb => Route::MellinBarnes,
        PsiRouteChoice::Asym => Route::Asymptotic,
        PsiRouteChoice::Reflected => Route::Reflected,
    };
    psi_by_route(a, c, x, forced)
}

/// Exit status for a failed evaluation: 1 for bad input, 2 for a refusal.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_)
        | Error::ZeroArgument
        | Error::ZeroBase
        | Error::OutOfRange { .. }
        | Error::NotPrimitive { .. }
        | Error::ParityMismatch { .. }
        | Error::HyperplaneMismatch { .. } => 1,
        _ => 2,
    }
}
