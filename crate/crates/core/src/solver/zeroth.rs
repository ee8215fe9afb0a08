//! The pointwise condition `c − ½∇·b ≥ 0` on a computed solution.

use serde::{Deserialize, Serialize};

use crate::mesh::{Mesh, Point};
use crate::p1::{P1Field, QuadratureRule};
use crate::solver::CoefficientSet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZerothOrderReport {
    /// Minimum of `c − ½∇·b` over all quadrature points.
    pub min_value: f64,
    pub cell: usize,
    pub point: Point,
    pub holds: bool,
    /// `∇·b` was approximated by central differences in `x`.
    pub finite_differences: bool,
    pub note: String,
}

const LIMITATION: &str = "divergence of x -> b(x, u_h, grad u_h) is evaluated per cell with u_h and grad u_h \
frozen at each quadrature point; jump terms across cell faces are not included";

/// Evaluates `c(x, u_h) − ½∇·b(x, u_h, ∇u_h)` at the quadrature points of
/// every cell, using `div_b` when supplied and central differences in `x`
/// with step `10⁻⁶h` otherwise.
pub fn check_zeroth_order_condition(
    mesh: &Mesh,
    u_h: &P1Field<'_>,
    coeffs: &CoefficientSet,
    rule: &QuadratureRule,
) -> ZerothOrderReport {
    let step = 1e-6 * mesh.h();
    let dim = mesh.dim();
    let mut report = ZerothOrderReport {
        min_value: f64::INFINITY,
        cell: 0,
        point: [0.0; 3],
        holds: true,
        finite_differences: coeffs.b.is_some() && coeffs.div_b.is_none(),
        note: LIMITATION.to_string(),
    };
    for c in 0..mesh.num_cells() {
        let p = u_h.gradient(c);
        for bary in &rule.points {
            let x = mesh.point_at(c, bary);
            let eta = u_h.eval_bary(c, bary);
            let div = match (&coeffs.b, &coeffs.div_b) {
                (None, _) => 0.0,
                (Some(_), Some(div_b)) => div_b(&x, eta, &p),
                (Some(b), None) => (0..dim)
                    .map(|d| {
                        let (mut xp, mut xm) = (x, x);
                        xp[d] += step;
                        xm[d] -= step;
                        (b(&xp, eta, &p)[d] - b(&xm, eta, &p)[d]) / (2.0 * step)
                    })
                    .sum(),
            };
            let value = coeffs.eval_c(&x, eta) - 0.5 * div;
            if value < report.min_value {
                report.min_value = value;
                report.cell = c;
                report.point = x;
            }
        }
    }
    report.holds = report.min_value >= -1e-10;
    report
}
