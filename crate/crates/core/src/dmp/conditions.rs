//! Element-based and edge-based sufficient conditions for Assumption A.

use serde::{Deserialize, Serialize};

use crate::mesh::{Mesh, ANGLE_TOL};
use crate::p1::{angle_from_gradients, P1Field, QuadratureRule};
use crate::par::{self, Execution};
use crate::solver::{element_integrals, CMode, CoefficientSet};
use crate::{Error, Result};

/// Which of the three element conditions is checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ElementCase {
    /// General `b`, `c ≥ 0`: `D_ij ≥ λ*‖∇ℓ_i‖‖∇ℓ_j‖|T|`.
    GeneralB,
    /// `b = 0`, `c ≥ 0`: same bound.
    BZeroCNonneg,
    /// `b = 0`, `c = 0`: `D_ij ≥ λ‖∇ℓ_i‖‖∇ℓ_j‖cos(α_ij)|T|` on non-obtuse cells.
    PoissonLike,
}

impl ElementCase {
    /// The most specific case the coefficients allow.
    pub fn select(coeffs: &CoefficientSet) -> Self {
        let c_zero = coeffs.c.is_none() || coeffs.c_mode == CMode::IdenticallyZero;
        match (coeffs.b.is_none(), c_zero) {
            (true, true) => ElementCase::PoissonLike,
            (true, false) => ElementCase::BZeroCNonneg,
            _ => ElementCase::GeneralB,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ElementCase::GeneralB => "general-b",
            ElementCase::BZeroCNonneg => "b-zero-c-nonneg",
            ElementCase::PoissonLike => "poisson-like",
        }
    }
}

impl std::str::FromStr for ElementCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general-b" | "i" => Ok(ElementCase::GeneralB),
            "b-zero-c-nonneg" | "ii" => Ok(ElementCase::BZeroCNonneg),
            "poisson-like" | "iii" => Ok(ElementCase::PoissonLike),
            other => Err(Error::InvalidParameter(format!("unknown element case `{other}`"))),
        }
    }
}

/// Verdict for the ordered local pair `(i, j)` of one cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairVerdict {
    pub cell: usize,
    pub i: usize,
    pub j: usize,
    /// `−∫_T {a∇ℓ_i·∇ℓ_j + b·(∇ℓ_i)ℓ_j + cℓ_iℓ_j}`.
    pub d_ij: f64,
    pub bound: f64,
    pub angle: f64,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementConditionReport {
    pub case: ElementCase,
    pub lambda_star: f64,
    /// The coefficients meet the case's structural requirements.
    pub requirements_met: bool,
    pub pairs: Vec<PairVerdict>,
    pub failures: usize,
    pub all_pass: bool,
    pub notes: Vec<String>,
}

impl ElementConditionReport {
    pub fn failing_pairs(&self) -> impl Iterator<Item = &PairVerdict> {
        self.pairs.iter().filter(|p| !p.passes)
    }
}

/// Checks every ordered pair `i ≠ j` of every cell with the coefficients
/// frozen at `w` (zero when absent). When all pairs pass, every term of the
/// element expansion of `𝔔(v; (v−k)_−, (v−k)_+)` is a product of two
/// non-positive factors, so the form is non-negative for every P1 field.
pub fn element_condition_check(
    mesh: &Mesh,
    coeffs: &CoefficientSet,
    rule: &QuadratureRule,
    case: ElementCase,
    lambda_star: f64,
    w: Option<&P1Field<'_>>,
    exec: Execution,
) -> Result<ElementConditionReport> {
    if rule.dim != mesh.dim() {
        return Err(Error::DimensionMismatch { expected: mesh.dim(), found: rule.dim });
    }
    if !(lambda_star > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda_star must be positive, got {lambda_star}")));
    }
    let zero = P1Field::zeros(mesh);
    let w = w.unwrap_or(&zero);
    let mut notes = Vec::new();
    let c_nonneg = matches!(coeffs.c_mode, CMode::Nonnegative | CMode::IdenticallyZero) || coeffs.c.is_none();
    let requirements_met = match case {
        ElementCase::GeneralB => c_nonneg,
        ElementCase::BZeroCNonneg => coeffs.b.is_none() && c_nonneg,
        ElementCase::PoissonLike => true,
    };
    if !requirements_met {
        notes.push(format!("coefficients do not meet the structural requirements of case {}", case.as_str()));
    }
    if case == ElementCase::GeneralB {
        notes.push("case general-b holds only for sufficiently small h; the verdict applies to this mesh".into());
    }
    let n = mesh.nodes_per_cell();
    let per_cell = par::map_indexed(exec, mesh.num_cells(), |c| {
        let e = element_integrals(mesh, c, w, coeffs, rule);
        let shape = &e.shape;
        let mut out = Vec::with_capacity(n * (n - 1));
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let k = i * n + j;
                let scale = shape.gradient_norms[i] * shape.gradient_norms[j] * shape.measure;
                let d_ij = -e.total(i, j);
                let angle = angle_from_gradients(shape, i, j);
                let (bound, passes) = match case {
                    ElementCase::GeneralB | ElementCase::BZeroCNonneg => {
                        let bound = lambda_star * scale;
                        (bound, d_ij >= bound)
                    }
                    ElementCase::PoissonLike => {
                        let bound = coeffs.lambda * scale * angle.cos();
                        let tol = 1e-12 * coeffs.big_lambda.max(1.0) * scale;
                        let lower_order_vanish = e.advection[k] == 0.0 && e.reaction[k] == 0.0;
                        let non_obtuse = angle <= std::f64::consts::FRAC_PI_2 + ANGLE_TOL;
                        (bound, lower_order_vanish && non_obtuse && d_ij >= bound - tol)
                    }
                };
                out.push(PairVerdict { cell: c, i, j, d_ij, bound, angle, passes: passes && requirements_met });
            }
        }
        out
    });
    let pairs: Vec<PairVerdict> = per_cell.into_iter().flatten().collect();
    let failures = pairs.iter().filter(|p| !p.passes).count();
    Ok(ElementConditionReport { case, lambda_star, requirements_met, all_pass: failures == 0, failures, pairs, notes })
}

/// Two-cell sums for one interior edge with endpoints `m < n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeVerdict {
    pub node_m: usize,
    pub node_n: usize,
    pub adjacent_cells: [usize; 2],
    /// Angles opposite the edge in the two cells.
    pub alpha: f64,
    pub beta: f64,
    /// `Σ_s ∫_{T_s} {a∇ℓ_m·∇ℓ_n + b·(∇ℓ_m)ℓ_n + cℓ_mℓ_n}`.
    pub s_mn: f64,
    /// Same with the roles of `m` and `n` exchanged.
    pub s_nm: f64,
    /// `−a₀ sin(α+β)/(2 sinα sinβ)` for `a ≡ a₀`, `b = 0`, `c = 0`.
    pub closed_form: Option<f64>,
    pub closed_form_matches: Option<bool>,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeConditionReport {
    pub edges: Vec<EdgeVerdict>,
    pub failures: usize,
    pub all_pass: bool,
    pub closed_form_mismatches: usize,
}

/// Edge sums for every interior edge of a triangulation, with the
/// coefficients frozen at `w` (zero when absent).
pub fn edge_condition_check_2d(
    mesh: &Mesh,
    coeffs: &CoefficientSet,
    rule: &QuadratureRule,
    w: Option<&P1Field<'_>>,
    exec: Execution,
) -> Result<EdgeConditionReport> {
    let edges = mesh.interior_edges_2d()?;
    if rule.dim != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: rule.dim });
    }
    let zero = P1Field::zeros(mesh);
    let w = w.unwrap_or(&zero);
    let verdicts = par::map_indexed(exec, edges.len(), |idx| {
        let edge = &edges[idx];
        let (mut s_mn, mut s_nm, mut scale) = (0.0, 0.0, 0.0);
        for &c in &edge.adjacent_cells {
            let e = element_integrals(mesh, c, w, coeffs, rule);
            let local = |node: usize| mesh.cell(c).iter().position(|&v| v == node).expect("edge endpoint in cell");
            let (lm, ln) = (local(edge.node_m), local(edge.node_n));
            s_mn += e.total(lm, ln);
            s_nm += e.total(ln, lm);
            // Roundoff is relative to the cell's largest entry, not to the
            // (possibly vanishing) edge entries themselves.
            let largest = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            scale += largest(&e.diffusion) + largest(&e.advection) + largest(&e.reaction);
        }
        let tol = 1e-12 * scale.max(f64::MIN_POSITIVE);
        let (alpha, beta) = edge.opposite_angles;
        let closed_form = coeffs.laplace_scale.map(|a0| -a0 * (alpha + beta).sin() / (2.0 * alpha.sin() * beta.sin()));
        let closed_form_matches = closed_form.map(|cf| (s_mn - cf).abs() <= 1e-12 * cf.abs().max(1.0));
        EdgeVerdict {
            node_m: edge.node_m,
            node_n: edge.node_n,
            adjacent_cells: edge.adjacent_cells,
            alpha,
            beta,
            s_mn,
            s_nm,
            closed_form,
            closed_form_matches,
            passes: s_mn <= tol && s_nm <= tol,
        }
    });
    let failures = verdicts.iter().filter(|v| !v.passes).count();
    let closed_form_mismatches = verdicts.iter().filter(|v| v.closed_form_matches == Some(false)).count();
    Ok(EdgeConditionReport { all_pass: failures == 0, failures, closed_form_mismatches, edges: verdicts })
}
