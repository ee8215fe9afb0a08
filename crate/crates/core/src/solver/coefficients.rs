//! Coefficients of the operator `−∇·(a ∇u) + b·∇u + c u = f`.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::mesh::{geom, Mesh, Point};
use crate::p1::QuadratureRule;
use crate::{Error, Result};

/// `(x, η, p) ↦ a`.
pub type ScalarFn = Arc<dyn Fn(&Point, f64, &Point) -> f64 + Send + Sync>;
/// `(x, η, p) ↦ b`; components beyond the mesh dimension are ignored.
pub type VectorFn = Arc<dyn Fn(&Point, f64, &Point) -> Point + Send + Sync>;
/// `(x, η) ↦ c`.
pub type ReactionFn = Arc<dyn Fn(&Point, f64) -> f64 + Send + Sync>;
/// `x ↦ f` or `x ↦ g`.
pub type SourceFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;

/// Sign information on the reaction coefficient `c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CMode {
    Nonnegative,
    IdenticallyZero,
    General,
}

impl std::str::FromStr for CMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nonnegative" => Ok(CMode::Nonnegative),
            "identically-zero" => Ok(CMode::IdenticallyZero),
            "general" => Ok(CMode::General),
            other => Err(Error::InvalidParameter(format!("unknown c_mode `{other}`"))),
        }
    }
}

/// Coefficient callbacks plus the declared bounds `λ ≤ a ≤ Λ` and
/// `λ⁻²(|b|² + c²) ≤ ν²`. An absent `b` or `c` is identically zero.
#[derive(Clone)]
pub struct CoefficientSet {
    pub a: ScalarFn,
    pub b: Option<VectorFn>,
    pub c: Option<ReactionFn>,
    pub f: SourceFn,
    pub g: SourceFn,
    pub div_b: Option<ScalarFn>,
    pub lambda: f64,
    pub big_lambda: f64,
    pub nu: f64,
    pub c_mode: CMode,
    /// `a`, `b`, `c` do not depend on `η` or `p`.
    pub linear: bool,
    /// `a`, `b`, `c` are constant, so degree-2 quadrature is exact.
    pub constant: bool,
    /// `Some(a₀)` when `a ≡ a₀`, `b ≡ 0` and `c ≡ 0`.
    pub laplace_scale: Option<f64>,
}

impl fmt::Debug for CoefficientSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientSet")
            .field("has_b", &self.b.is_some())
            .field("has_c", &self.c.is_some())
            .field("lambda", &self.lambda)
            .field("big_lambda", &self.big_lambda)
            .field("nu", &self.nu)
            .field("c_mode", &self.c_mode)
            .field("linear", &self.linear)
            .field("constant", &self.constant)
            .finish()
    }
}

fn source(f: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> SourceFn {
    Arc::new(f)
}

impl CoefficientSet {
    /// General constructor: diffusion only, nonlinear and non-constant until
    /// told otherwise.
    pub fn new(
        a: impl Fn(&Point, f64, &Point) -> f64 + Send + Sync + 'static,
        f: impl Fn(&Point) -> f64 + Send + Sync + 'static,
        g: impl Fn(&Point) -> f64 + Send + Sync + 'static,
        lambda: f64,
        big_lambda: f64,
    ) -> Self {
        CoefficientSet {
            a: Arc::new(a),
            b: None,
            c: None,
            f: source(f),
            g: source(g),
            div_b: None,
            lambda,
            big_lambda,
            nu: 0.0,
            c_mode: CMode::IdenticallyZero,
            linear: false,
            constant: false,
            laplace_scale: None,
        }
    }

    /// `−Δu = f`, `u = g` on the boundary.
    pub fn poisson(
        f: impl Fn(&Point) -> f64 + Send + Sync + 'static,
        g: impl Fn(&Point) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let mut set = Self::new(|_, _, _| 1.0, f, g, 1.0, 1.0);
        set.linear = true;
        set.constant = true;
        set.laplace_scale = Some(1.0);
        set
    }

    /// `−a₀Δu + b·∇u = f` with constant `a₀ > 0` and constant `b`.
    pub fn advection_diffusion(
        a0: f64,
        b: [f64; 3],
        f: impl Fn(&Point) -> f64 + Send + Sync + 'static,
        g: impl Fn(&Point) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let mut set = Self::new(move |_, _, _| a0, f, g, a0, a0);
        set.b = Some(Arc::new(move |_, _, _| b));
        set.div_b = Some(Arc::new(|_, _, _| 0.0));
        set.nu = geom::norm(&b) / a0;
        set.linear = true;
        set.constant = true;
        set
    }

    /// `a(η) = 1 + η²/(1 + η²)`, so `1 ≤ a ≤ 2`.
    pub fn quasilinear(
        f: impl Fn(&Point) -> f64 + Send + Sync + 'static,
        g: impl Fn(&Point) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(|_, eta, _| 1.0 + eta * eta / (1.0 + eta * eta), f, g, 1.0, 2.0)
    }

    pub fn with_b(mut self, b: impl Fn(&Point, f64, &Point) -> Point + Send + Sync + 'static) -> Self {
        self.b = Some(Arc::new(b));
        self.laplace_scale = None;
        self
    }

    pub fn with_div_b(mut self, div_b: impl Fn(&Point, f64, &Point) -> f64 + Send + Sync + 'static) -> Self {
        self.div_b = Some(Arc::new(div_b));
        self
    }

    pub fn with_c(mut self, c: impl Fn(&Point, f64) -> f64 + Send + Sync + 'static, mode: CMode) -> Self {
        self.c = Some(Arc::new(c));
        self.c_mode = mode;
        self.laplace_scale = None;
        self
    }

    pub fn with_nu(mut self, nu: f64) -> Self {
        self.nu = nu;
        self
    }

    /// Declares the coefficients independent of `η` and `p`.
    pub fn linear(mut self) -> Self {
        self.linear = true;
        self
    }

    /// Declares the coefficients constant (implies linear).
    pub fn constant(mut self) -> Self {
        self.linear = true;
        self.constant = true;
        self
    }

    pub fn eval_a(&self, x: &Point, eta: f64, p: &Point) -> f64 {
        (self.a)(x, eta, p)
    }

    pub fn eval_b(&self, x: &Point, eta: f64, p: &Point) -> Point {
        self.b.as_ref().map_or([0.0; 3], |b| b(x, eta, p))
    }

    pub fn eval_c(&self, x: &Point, eta: f64) -> f64 {
        self.c.as_ref().map_or(0.0, |c| c(x, eta))
    }

    /// Quadrature used when none is given: degree 2 for constant
    /// coefficients, degree 4 otherwise.
    pub fn default_rule(&self, dim: usize) -> Result<QuadratureRule> {
        QuadratureRule::new(dim, if self.constant { 2 } else { 4 })
    }

    /// Spot-checks the declared bounds at `samples` random `(x, η, p)` with
    /// `x` in the mesh, `η ∈ [−10, 10]` and `p ∈ [−10, 10]^d`.
    pub fn spot_check(&self, mesh: &Mesh, samples: usize, seed: u64) -> CoefficientCheck {
        let mut rng = SplitMix64::seed_from_u64(seed);
        let dim = mesh.dim();
        let mut report = CoefficientCheck {
            samples,
            seed,
            a_min: f64::INFINITY,
            a_max: f64::NEG_INFINITY,
            nu_observed: 0.0,
            c_min: f64::INFINITY,
            c_max: f64::NEG_INFINITY,
            violations: Vec::new(),
        };
        let tol = 1e-12;
        for _ in 0..samples {
            let cell = rng.gen_range(0..mesh.num_cells());
            let mut bary: Vec<f64> = (0..=dim).map(|_| -rng.gen::<f64>().ln()).collect();
            let total: f64 = bary.iter().sum();
            bary.iter_mut().for_each(|b| *b /= total);
            let x = mesh.point_at(cell, &bary);
            let eta = rng.gen_range(-10.0..10.0);
            let mut p = [0.0; 3];
            for comp in p.iter_mut().take(dim) {
                *comp = rng.gen_range(-10.0..10.0);
            }
            let a = self.eval_a(&x, eta, &p);
            let b = self.eval_b(&x, eta, &p);
            let c = self.eval_c(&x, eta);
            report.a_min = report.a_min.min(a);
            report.a_max = report.a_max.max(a);
            report.c_min = report.c_min.min(c);
            report.c_max = report.c_max.max(c);
            let b2: f64 = b[..dim].iter().map(|v| v * v).sum();
            let nu = ((b2 + c * c) / (self.lambda * self.lambda)).sqrt();
            report.nu_observed = report.nu_observed.max(nu);
            let mut flag = |what: String| {
                if report.violations.len() < 10 {
                    report.violations.push(what);
                }
            };
            if a < self.lambda * (1.0 - tol) {
                flag(format!("a = {a} < λ at x = {x:?}, η = {eta}"));
            }
            if a.abs() > self.big_lambda * (1.0 + tol) {
                flag(format!("|a| = {} > Λ at x = {x:?}, η = {eta}", a.abs()));
            }
            if nu > self.nu * (1.0 + tol) + tol {
                flag(format!("λ⁻¹(|b|² + c²)^½ = {nu} > ν at x = {x:?}, η = {eta}"));
            }
            match self.c_mode {
                CMode::IdenticallyZero if c != 0.0 => flag(format!("c = {c} ≠ 0 at x = {x:?}")),
                CMode::Nonnegative if c < 0.0 => flag(format!("c = {c} < 0 at x = {x:?}")),
                _ => {}
            }
        }
        report
    }
}

/// Outcome of [`CoefficientSet::spot_check`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoefficientCheck {
    pub samples: usize,
    pub seed: u64,
    pub a_min: f64,
    pub a_max: f64,
    pub nu_observed: f64,
    pub c_min: f64,
    pub c_max: f64,
    pub violations: Vec<String>,
}

impl CoefficientCheck {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<Self> {
        if self.ok() {
            Ok(self)
        } else {
            Err(Error::CoefficientViolation(self.violations.join("; ")))
        }
    }
}
