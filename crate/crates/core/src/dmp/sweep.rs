//! The cut level `k*` and the sweep of `𝔔(u_h; (u_h−k)_−, (u_h−k)_+)`.

use serde::{Deserialize, Serialize};

use crate::mesh::Mesh;
use crate::p1::{P1Field, QuadratureRule};
use crate::par::{self, Execution};
use crate::solver::{assemble_q_with, BoundaryValues, CMode, CoefficientSet};
use crate::{Error, Result};

/// `max_A max(g_A, 0)` for `c ≥ 0` and `max_A g_A` for `c ≡ 0`, over the
/// boundary nodes `A`. The supremum of a P1 interpolant on the boundary is
/// attained at a node.
pub fn compute_k_star(mesh: &Mesh, bc: &BoundaryValues, c_mode: CMode) -> Result<f64> {
    let mut top = f64::NEG_INFINITY;
    for &node in mesh.boundary_nodes() {
        let g = bc.values.get(node).copied().flatten().ok_or(Error::MissingBoundaryValue(node))?;
        top = top.max(g);
    }
    match c_mode {
        CMode::Nonnegative => Ok(top.max(0.0)),
        CMode::IdenticallyZero => Ok(top),
        CMode::General => Err(Error::UnsupportedCMode),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionSweep {
    pub k_star: f64,
    /// Ascending probe levels, all `≥ k*`.
    pub k_values: Vec<f64>,
    pub q_values: Vec<f64>,
    pub min_value: f64,
    pub argmin_k: f64,
    pub tolerance: f64,
    pub satisfied: bool,
}

/// Probe levels: `k*`, every distinct nodal value above `k*`, and the
/// midpoints between consecutive levels.
fn sweep_grid(values: &[f64], k_star: f64) -> Vec<f64> {
    let mut levels: Vec<f64> = values.iter().copied().filter(|&v| v > k_star).collect();
    levels.push(k_star);
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let mut grid = Vec::with_capacity(2 * levels.len());
    for (i, &k) in levels.iter().enumerate() {
        if i > 0 {
            grid.push(0.5 * (levels[i - 1] + k));
        }
        grid.push(k);
    }
    grid
}

pub fn assumption_a_sweep(
    mesh: &Mesh,
    u_h: &P1Field<'_>,
    coeffs: &CoefficientSet,
    rule: &QuadratureRule,
    k_star: f64,
) -> Result<AssumptionSweep> {
    assumption_a_sweep_with(mesh, u_h, coeffs, rule, k_star, Execution::default())
}

/// Evaluates `𝔔(u_h; (u_h−k)_−, (u_h−k)_+)` on the probe grid through the
/// matrix `A(u_h)` assembled once: the form equals `φᵀ A ψ` with the same
/// quadrature.
pub fn assumption_a_sweep_with(
    mesh: &Mesh,
    u_h: &P1Field<'_>,
    coeffs: &CoefficientSet,
    rule: &QuadratureRule,
    k_star: f64,
    exec: Execution,
) -> Result<AssumptionSweep> {
    let system = assemble_q_with(mesh, u_h, coeffs, rule, exec)?;
    let matrix = &system.matrix;
    let u = u_h.values();
    let k_values = sweep_grid(u, k_star);
    let q_values = par::map_indexed(exec, k_values.len(), |idx| {
        let k = k_values[idx];
        let mut total = 0.0;
        for (m, &um) in u.iter().enumerate() {
            if um <= k {
                continue;
            }
            let row: f64 = matrix.row(m).filter(|&(n, _)| u[n] < k).map(|(n, v)| v * (u[n] - k)).sum();
            total += (um - k) * row;
        }
        total
    });
    let (mut min_value, mut argmin_k) = (f64::INFINITY, k_star);
    for (&k, &q) in k_values.iter().zip(&q_values) {
        if q < min_value {
            min_value = q;
            argmin_k = k;
        }
    }
    let scale = q_values.iter().fold(1.0_f64, |m, q| m.max(q.abs()));
    let tolerance = 1e-10 * scale;
    Ok(AssumptionSweep {
        k_star,
        k_values,
        q_values,
        min_value,
        argmin_k,
        tolerance,
        satisfied: min_value >= -tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_structured_2d, Pattern};
    use crate::solver::{interpolate_boundary, picard_solve, q_apply, SolveOptions};

    #[test]
    fn k_star_modes() {
        let m = generate_structured_2d(3, 3, Pattern::RightDiagonal, 0.0).unwrap();
        let neg = interpolate_boundary(&m, |_| -2.0);
        assert_eq!(compute_k_star(&m, &neg, CMode::Nonnegative).unwrap(), 0.0);
        assert_eq!(compute_k_star(&m, &neg, CMode::IdenticallyZero).unwrap(), -2.0);
        let x = interpolate_boundary(&m, |x| x[0]);
        assert_eq!(compute_k_star(&m, &x, CMode::Nonnegative).unwrap(), 1.0);
        assert_eq!(compute_k_star(&m, &x, CMode::IdenticallyZero).unwrap(), 1.0);
        assert!(matches!(compute_k_star(&m, &x, CMode::General), Err(Error::UnsupportedCMode)));
        let mut missing = x.clone();
        missing.values[m.boundary_nodes()[0]] = None;
        assert!(compute_k_star(&m, &missing, CMode::Nonnegative).is_err());
    }

    #[test]
    fn grid_is_sorted_and_above_k_star() {
        let g = sweep_grid(&[0.5, -1.0, 2.0, 0.5, 1.0], 0.0);
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0]);
        assert_eq!(sweep_grid(&[-3.0, -1.0], 0.0), vec![0.0]);
    }

    #[test]
    fn constant_field_and_levels_above_max_give_zero() {
        let m = generate_structured_2d(4, 4, Pattern::RightDiagonal, 0.0).unwrap();
        let coeffs = CoefficientSet::poisson(|_| 0.0, |_| 0.0);
        let rule = QuadratureRule::new(2, 2).unwrap();
        let s = assumption_a_sweep(&m, &P1Field::constant(&m, 0.3), &coeffs, &rule, 0.0).unwrap();
        assert!(s.q_values.iter().all(|&q| q == 0.0) && s.satisfied);
        let u = P1Field::interpolate(&m, |x| x[0] * x[1]);
        let s = assumption_a_sweep(&m, &u, &coeffs, &rule, 0.0).unwrap();
        assert_eq!(*s.k_values.last().unwrap(), u.max());
        assert_eq!(*s.q_values.last().unwrap(), 0.0);
    }

    #[test]
    fn matches_direct_form_evaluation() {
        let m = generate_structured_2d(8, 8, Pattern::Crisscross, 0.0).unwrap();
        let coeffs = CoefficientSet::advection_diffusion(1.0, [2.0, 1.0, 0.0], |x| (4.0 * x[0]).sin() - 0.5, |x| x[1]);
        let rule = QuadratureRule::new(2, 2).unwrap();
        let r = picard_solve(&m, &coeffs, &SolveOptions::default(), None).unwrap();
        let s = assumption_a_sweep(&m, &r.u_h, &coeffs, &rule, 1.0).unwrap();
        for (&k, &q) in s.k_values.iter().zip(&s.q_values).step_by(7) {
            let direct = q_apply(&r.u_h, &r.u_h.cut_minus(k), &r.u_h.cut_plus(k), &coeffs, &rule);
            assert!((direct - q).abs() <= 1e-12 * direct.abs().max(1.0), "{k}: {direct} vs {q}");
        }
    }

    #[test]
    fn poisson_on_non_obtuse_mesh_is_satisfied() {
        let m = generate_structured_2d(8, 8, Pattern::RightDiagonal, 0.0).unwrap();
        let coeffs = CoefficientSet::poisson(|x| (7.0 * x[0]).cos() * 5.0, |x| x[0] - x[1]);
        let rule = QuadratureRule::new(2, 2).unwrap();
        let r = picard_solve(&m, &coeffs, &SolveOptions::default(), None).unwrap();
        let k_star = compute_k_star(&m, &interpolate_boundary(&m, &*coeffs.g), coeffs.c_mode).unwrap();
        let seq = assumption_a_sweep_with(&m, &r.u_h, &coeffs, &rule, k_star, Execution::Sequential).unwrap();
        let par = assumption_a_sweep_with(&m, &r.u_h, &coeffs, &rule, k_star, Execution::Parallel).unwrap();
        assert!(seq.satisfied);
        assert_eq!(seq, par);
        // Hand-assembled sum over element pairs at one level.
        let k = seq.k_values[seq.k_values.len() / 2];
        let mut hand = 0.0;
        for c in 0..m.num_cells() {
            let shape = crate::p1::shape_data(&m, c);
            let nodes = m.cell(c);
            for (i, &ni) in nodes.iter().enumerate() {
                for (j, &nj) in nodes.iter().enumerate() {
                    let psi = (r.u_h.value(ni) - k).min(0.0);
                    let phi = (r.u_h.value(nj) - k).max(0.0);
                    let g = crate::mesh::geom::dot(&shape.gradients[i], &shape.gradients[j]);
                    hand += psi * phi * g * shape.measure;
                }
            }
        }
        let idx = seq.k_values.len() / 2;
        assert!((hand - seq.q_values[idx]).abs() < 1e-12 * hand.abs().max(1.0));
    }
}
