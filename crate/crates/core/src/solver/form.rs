//! Direct evaluation of `𝔔(w; u, v)` by quadrature.

use crate::mesh::geom;
use crate::p1::{shape_data, P1Field, QuadratureRule};
use crate::par::{self, Execution};
use crate::solver::CoefficientSet;

/// `∫_Ω {a∇u·∇v + b·(∇u)v + cuv}` with `a`, `b`, `c` frozen at `w`.
pub fn q_apply(
    w: &P1Field<'_>,
    u: &P1Field<'_>,
    v: &P1Field<'_>,
    coeffs: &CoefficientSet,
    rule: &QuadratureRule,
) -> f64 {
    q_apply_with(w, u, v, coeffs, rule, Execution::default())
}

pub fn q_apply_with(
    w: &P1Field<'_>,
    u: &P1Field<'_>,
    v: &P1Field<'_>,
    coeffs: &CoefficientSet,
    rule: &QuadratureRule,
    exec: Execution,
) -> f64 {
    let mesh = w.mesh();
    let per_cell = par::map_indexed(exec, mesh.num_cells(), |c| {
        let shape = shape_data(mesh, c);
        let grad = |field: &P1Field<'_>| {
            let mut g = [0.0; 3];
            for (&i, gi) in mesh.cell(c).iter().zip(&shape.gradients) {
                for d in 0..3 {
                    g[d] += field.value(i) * gi[d];
                }
            }
            g
        };
        let (gw, gu, gv) = (grad(w), grad(u), grad(v));
        let guv = geom::dot(&gu, &gv);
        let mut sum = 0.0;
        for (bary, &wq) in rule.points.iter().zip(&rule.weights) {
            let x = mesh.point_at(c, bary);
            let eta = w.eval_bary(c, bary);
            let uq = u.eval_bary(c, bary);
            let vq = v.eval_bary(c, bary);
            let mut val = coeffs.eval_a(&x, eta, &gw) * guv;
            if coeffs.b.is_some() {
                val += geom::dot(&coeffs.eval_b(&x, eta, &gw), &gu) * vq;
            }
            if coeffs.c.is_some() {
                val += coeffs.eval_c(&x, eta) * uq * vq;
            }
            sum += wq * val;
        }
        sum * shape.measure
    });
    par::pairwise_sum(&per_cell)
}
