//! CSV tables of values over a sweep, for plotting elsewhere.

use mtds_core::complex::BranchedBase;
use mtds_core::mt::CoefficientSequence;
use mtds_core::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::eval::{eval_mt, eval_psi, mt_route_name, psi_route_name, MtRouteChoice, PsiRouteChoice};
use crate::text::{fmt_complex, fmt_real};

/// One row's input: the sweep parameter, if any, and the arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub t: Option<f64>,
    pub args: Vec<Complex64>,
}

pub enum Evaluator {
    Mt { coeffs: Vec<CoefficientSequence>, tol: f64, route: MtRouteChoice },
    Psi { a: Complex64, c: Complex64, route: PsiRouteChoice },
}

impl Evaluator {
    pub fn columns(&self) -> Vec<String> {
        let mut cols = vec!["index".to_string(), "t".to_string()];
        match self {
            Evaluator::Mt { coeffs, .. } => cols.extend((1..=coeffs.len() + 1).map(|j| format!("s{j}"))),
            Evaluator::Psi { .. } => cols.push("x".into()),
        }
        cols.extend(["value_re", "value_im", "abs", "error_bound", "route", "terms"].map(String::from));
        cols
    }

    fn row(&self, index: usize, p: &SweepPoint) -> Result<Vec<String>> {
        let (value, error, route, terms) = match self {
            Evaluator::Mt { coeffs, tol, route } => {
                let v = eval_mt(&p.args, coeffs, *tol, *route)?;
                (v.value, v.error, mt_route_name(v.route), v.terms)
            }
            Evaluator::Psi { a, c, route } => {
                let [x] = p.args[..] else {
                    return Err(Error::InvalidInput(format!("psi rows take one argument, got {}", p.args.len())));
                };
                if x == Complex64::new(0.0, 0.0) {
                    return Err(Error::ZeroArgument);
                }
                let e = eval_psi(*a, *c, &BranchedBase::principal(x), *route)?;
                (e.value, e.error_bound, psi_route_name(e.route), 0)
            }
        };
        let mut row = vec![index.to_string(), p.t.map(fmt_real).unwrap_or_default()];
        row.extend(p.args.iter().map(|&z| fmt_complex(z)));
        row.extend([
            fmt_real(value.re),
            fmt_real(value.im),
            fmt_real(value.norm()),
            fmt_real(error),
            route.to_string(),
            terms.to_string(),
        ]);
        Ok(row)
    }

    /// All rows in sweep order; the first failing row, by index, aborts.
    pub fn rows(&self, points: &[SweepPoint]) -> std::result::Result<Vec<Vec<String>>, (usize, Error)> {
        let out: Vec<_> = points.par_iter().enumerate().map(|(i, p)| self.row(i, p)).collect();
        out.into_iter()
            .enumerate()
            .map(|(i, r)| r.map_err(|e| (i, e)))
            .collect()
    }
}

/// `# columns: ...` followed by the rows.
pub fn render(columns: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for row in rows {
        w.write_record(row).expect("writing to memory");
    }
    let body = String::from_utf8(w.into_inner().expect("writing to memory")).expect("rows are UTF-8");
    format!("# columns: {}\n{body}", columns.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use mtds_core::complex::real;

    #[test]
    fn header_only_when_empty() {
        let ev = Evaluator::Psi { a: real(1.0), c: real(2.0), route: PsiRouteChoice::Auto };
        let rows = ev.rows(&[]).unwrap();
        assert_eq!(render(&ev.columns(), &rows), "# columns: index,t,x,value_re,value_im,abs,error_bound,route,terms\n");
    }

    #[test]
    fn failing_row_is_reported_by_index() {
        let ev = Evaluator::Psi { a: real(1.0), c: real(2.0), route: PsiRouteChoice::Auto };
        let pts = [real(5.0), real(0.0)].map(|x| SweepPoint { t: None, args: vec![x] });
        let (i, e) = ev.rows(&pts).unwrap_err();
        assert_eq!((i, e), (1, Error::ZeroArgument));
    }
}
