//! Problem descriptions: built-in presets and expression-based specs.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use dmpfem::solver::{CMode, CoefficientSet};
use serde::{Deserialize, Serialize};

use crate::expr::{Expr, Var};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Poisson,
    AdvectionDiffusion,
    Quasilinear,
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "poisson" => Ok(Preset::Poisson),
            "advection-diffusion" => Ok(Preset::AdvectionDiffusion),
            "quasilinear" | "quasilinear-a" => Ok(Preset::Quasilinear),
            other => Err(format!("unknown preset `{other}` (poisson, advection-diffusion, quasilinear)")),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Poisson => "poisson",
            Preset::AdvectionDiffusion => "advection-diffusion",
            Preset::Quasilinear => "quasilinear",
        })
    }
}

/// Coefficients as expression strings over `x, y, z, eta, p1, p2, p3`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub a: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
    pub f: String,
    pub g: String,
    /// `∇·b` as a function of `(x, η, p)`; finite differences when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub div_b: Option<String>,
    pub lambda: f64,
    pub big_lambda: f64,
    /// Required unless `b` and `c` are constants, in which case it is
    /// computed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    /// Required when `c` is not a constant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_mode: Option<CMode>,
}

impl ProblemSpec {
    pub fn preset(preset: Preset, f: &str, g: &str, a0: f64, b: &[f64]) -> Self {
        let base = ProblemSpec {
            a: "1".into(),
            b: None,
            c: None,
            f: f.into(),
            g: g.into(),
            div_b: None,
            lambda: 1.0,
            big_lambda: 1.0,
            nu: None,
            c_mode: None,
        };
        match preset {
            Preset::Poisson => base,
            Preset::AdvectionDiffusion => ProblemSpec {
                a: format!("{a0}"),
                b: Some(b.iter().map(|v| format!("{v}")).collect()),
                lambda: a0,
                big_lambda: a0,
                ..base
            },
            Preset::Quasilinear => ProblemSpec { a: "1 + eta^2 / (1 + eta^2)".into(), big_lambda: 2.0, ..base },
        }
    }

    pub fn read(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    /// Parses every expression and builds the coefficient callbacks.
    pub fn build(&self, dim: usize) -> Result<CoefficientSet, CliError> {
        let parse = |name: &str, src: &str| -> Result<Expr, CliError> {
            let e = Expr::parse(src).map_err(|e| CliError::Usage(format!("coefficient {name} `{src}`: {e}")))?;
            if dim == 2 && e.uses(Var::is_3d_only) {
                return Err(CliError::Usage(format!("coefficient {name} uses z or p3 on a 2D mesh")));
            }
            Ok(e)
        };
        if !(self.lambda > 0.0 && self.big_lambda >= self.lambda && self.big_lambda.is_finite()) {
            return Err(CliError::Usage(format!(
                "need 0 < lambda <= big_lambda < inf, got {} and {}",
                self.lambda, self.big_lambda
            )));
        }
        let a = parse("a", &self.a)?;
        let f = parse("f", &self.f)?;
        let g = parse("g", &self.g)?;
        let b = match &self.b {
            None => None,
            Some(comps) => {
                if comps.len() != dim {
                    return Err(CliError::Usage(format!("b has {} components on a {dim}D mesh", comps.len())));
                }
                let comps = comps
                    .iter()
                    .enumerate()
                    .map(|(i, s)| parse(&format!("b[{i}]"), s))
                    .collect::<Result<Vec<_>, _>>()?;
                // An identically zero b is dropped so the Laplace shortcuts apply.
                (!comps.iter().all(|e| e.constant_value() == Some(0.0))).then_some(comps)
            }
        };
        let c = match &self.c {
            None => None,
            Some(src) => {
                let e = parse("c", src)?;
                (e.constant_value() != Some(0.0)).then_some(e)
            }
        };
        let div_b = self.div_b.as_deref().map(|s| parse("div_b", s)).transpose()?;

        let c_mode = match (&c, self.c_mode) {
            (_, Some(mode)) => mode,
            (None, None) => CMode::IdenticallyZero,
            (Some(e), None) => match e.constant_value() {
                Some(v) if v >= 0.0 => CMode::Nonnegative,
                Some(_) => CMode::General,
                None => return Err(CliError::Usage("c is not constant, so c_mode must be given".into())),
            },
        };

        let b_const: Option<Vec<f64>> = match &b {
            None => Some(vec![0.0; dim]),
            Some(comps) => comps.iter().map(Expr::constant_value).collect(),
        };
        let c_const = match &c {
            None => Some(0.0),
            Some(e) => e.constant_value(),
        };
        let nu = match (self.nu, &b_const, c_const) {
            (Some(nu), _, _) => nu,
            (None, Some(bv), Some(cv)) => (bv.iter().map(|v| v * v).sum::<f64>() + cv * cv).sqrt() / self.lambda,
            _ => return Err(CliError::Usage("nu must be given when b or c is not constant".into())),
        };

        let operator: Vec<&Expr> = std::iter::once(&a).chain(b.iter().flatten()).chain(c.iter()).collect();
        let linear = !operator.iter().any(|e| e.uses(Var::is_state));
        let constant = operator.iter().all(|e| e.constant_value().is_some());

        let (fa, ff, fg) = (Arc::new(a.clone()), Arc::new(f), Arc::new(g));
        let mut set = CoefficientSet::new(
            move |x, eta, p| fa.eval(x, eta, p),
            move |x| ff.eval_x(x),
            move |x| fg.eval_x(x),
            self.lambda,
            self.big_lambda,
        )
        .with_nu(nu);
        if let Some(comps) = b {
            let comps = Arc::new(comps);
            set = set.with_b(move |x, eta, p| {
                let mut out = [0.0; 3];
                for (o, e) in out.iter_mut().zip(comps.iter()) {
                    *o = e.eval(x, eta, p);
                }
                out
            });
            match div_b {
                Some(d) => set = set.with_div_b(move |x, eta, p| d.eval(x, eta, p)),
                None if b_const.is_some() => set = set.with_div_b(|_, _, _| 0.0),
                None => {}
            }
        }
        if let Some(ce) = c {
            let ce = Arc::new(ce);
            set = set.with_c(move |x, eta| ce.eval(x, eta, &[0.0; 3]), c_mode);
        } else {
            set.c_mode = c_mode;
        }
        if constant {
            set = set.constant();
        } else if linear {
            set = set.linear();
        }
        if set.b.is_none() && set.c.is_none() {
            set.laplace_scale = a.constant_value();
        }
        Ok(set)
    }
}
