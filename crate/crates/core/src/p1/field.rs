//! Nodal P1 fields.

use std::io::{BufRead, Write};

use crate::mesh::{Mesh, Point};
use crate::p1::{shape_data, QuadratureRule};
use crate::par::{self, Execution};
use crate::{Error, Result};

/// Largest exponent accepted by the `L^p` norms.
pub const MAX_EXPONENT: f64 = 64.0;

/// A continuous piecewise-linear function given by its vertex values.
#[derive(Clone, Debug, PartialEq)]
pub struct P1Field<'m> {
    mesh: &'m Mesh,
    values: Vec<f64>,
}

impl<'m> P1Field<'m> {
    pub fn new(mesh: &'m Mesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.num_vertices() {
            return Err(Error::LengthMismatch { expected: mesh.num_vertices(), found: values.len() });
        }
        Ok(P1Field { mesh, values })
    }

    pub fn constant(mesh: &'m Mesh, value: f64) -> Self {
        P1Field { mesh, values: vec![value; mesh.num_vertices()] }
    }

    pub fn zeros(mesh: &'m Mesh) -> Self {
        Self::constant(mesh, 0.0)
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(mesh: &'m Mesh, f: impl Fn(&Point) -> f64) -> Self {
        P1Field { mesh, values: mesh.vertices().iter().map(f).collect() }
    }

    pub fn mesh(&self) -> &'m Mesh {
        self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn value(&self, node: usize) -> f64 {
        self.values[node]
    }

    /// Values at the vertices of cell `c`, in local order.
    pub fn cell_values(&self, c: usize) -> Vec<f64> {
        self.mesh.cell(c).iter().map(|&i| self.values[i]).collect()
    }

    /// Value at barycentric coordinates `bary` of cell `c`.
    pub fn eval_bary(&self, c: usize, bary: &[f64]) -> f64 {
        self.mesh.cell(c).iter().zip(bary).map(|(&i, b)| b * self.values[i]).sum()
    }

    /// Value at a physical point known to lie in cell `c`.
    pub fn eval_at(&self, c: usize, x: &Point) -> f64 {
        self.eval_bary(c, &crate::p1::barycentric(self.mesh, c, x))
    }

    /// The constant gradient on cell `c`.
    pub fn gradient(&self, c: usize) -> Point {
        let shape = shape_data(self.mesh, c);
        let mut g = [0.0; 3];
        for (&i, grad) in self.mesh.cell(c).iter().zip(&shape.gradients) {
            for d in 0..3 {
                g[d] += self.values[i] * grad[d];
            }
        }
        g
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Nodal non-negative part `(v − k)_+`.
    pub fn cut_plus(&self, k: f64) -> Self {
        let values = self.values.iter().map(|&v| if v >= k { v - k } else { 0.0 }).collect();
        P1Field { mesh: self.mesh, values }
    }

    /// Nodal non-positive part `(v − k)_− = (v − k) − (v − k)_+`.
    pub fn cut_minus(&self, k: f64) -> Self {
        let values = self.values.iter().map(|&v| if v >= k { 0.0 } else { v - k }).collect();
        P1Field { mesh: self.mesh, values }
    }

    /// `α·self + β·other`.
    pub fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| alpha * a + beta * b).collect();
        P1Field { mesh: self.mesh, values }
    }

    /// Writes `node_index,x,y[,z],value` rows after a header line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let dim = self.mesh.dim();
        writeln!(out, "{}", if dim == 2 { "node_index,x,y,value" } else { "node_index,x,y,z,value" })?;
        for (i, (p, v)) in self.mesh.vertices().iter().zip(&self.values).enumerate() {
            write!(out, "{i}")?;
            for c in &p[..dim] {
                write!(out, ",{c}")?;
            }
            writeln!(out, ",{v}")?;
        }
        Ok(())
    }

    /// Reads a file produced by [`P1Field::write_csv`]. Only the node index
    /// and value columns are used.
    pub fn read_csv<R: BufRead>(mesh: &'m Mesh, input: R) -> Result<Self> {
        let mut values = vec![f64::NAN; mesh.num_vertices()];
        for (n, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if n == 0 || line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            let bad = || Error::InvalidParameter(format!("malformed field CSV line {}", n + 1));
            if cols.len() != mesh.dim() + 2 {
                return Err(bad());
            }
            let i: usize = cols[0].parse().map_err(|_| bad())?;
            let v: f64 = cols[cols.len() - 1].parse().map_err(|_| bad())?;
            *values.get_mut(i).ok_or_else(bad)? = v;
        }
        if let Some(missing) = values.iter().position(|v| v.is_nan()) {
            return Err(Error::InvalidParameter(format!("field CSV has no value for node {missing}")));
        }
        P1Field::new(mesh, values)
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 || (p > MAX_EXPONENT && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("exponent {p} outside [1, {MAX_EXPONENT}] ∪ {{∞}}")));
    }
    Ok(())
}

/// Rule of degree `⌈p⌉ + 1`, capped at the highest tabulated degree.
fn rule_for_exponent(dim: usize, p: f64) -> Result<QuadratureRule> {
    let wanted = if p.is_finite() { p.ceil() as usize + 1 } else { QuadratureRule::max_degree(dim) };
    QuadratureRule::new(dim, wanted.min(QuadratureRule::max_degree(dim)))
}

/// `‖v‖_{L^p}` by quadrature.
pub fn lp_norm(field: &P1Field<'_>, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let rule = rule_for_exponent(field.mesh.dim(), p)?;
    lp_norm_with(field, p, &rule, Execution::default())
}

pub fn lp_norm_with(field: &P1Field<'_>, p: f64, rule: &QuadratureRule, exec: Execution) -> Result<f64> {
    check_exponent(p)?;
    let mesh = field.mesh;
    let per_cell = par::map_indexed(exec, mesh.num_cells(), |c| {
        if p.is_infinite() {
            return field.cell_values(c).into_iter().map(f64::abs).fold(0.0, f64::max);
        }
        let local: f64 =
            rule.points.iter().zip(&rule.weights).map(|(b, w)| w * field.eval_bary(c, b).abs().powf(p)).sum();
        local * mesh.cell_measure(c)
    });
    Ok(if p.is_infinite() {
        per_cell.into_iter().fold(0.0, f64::max)
    } else {
        par::pairwise_sum(&per_cell).powf(1.0 / p)
    })
}

/// `(Σ_j |v(A_j)|^p |Ω_j|)^{1/p}`.
pub fn discrete_lp(field: &P1Field<'_>, p: f64) -> Result<f64> {
    check_exponent(p)?;
    if p.is_infinite() {
        return Ok(field.values.iter().map(|v| v.abs()).fold(0.0, f64::max));
    }
    let terms: Vec<f64> =
        field.values.iter().zip(field.mesh.macro_measures()).map(|(v, m)| v.abs().powf(p) * m).collect();
    Ok(par::pairwise_sum(&terms).powf(1.0 / p))
}

/// `‖f‖_{L^p}` of a function given pointwise. For `p = ∞` the maximum of
/// `|f|` over the quadrature points and vertices is returned.
pub fn function_lp_norm<F>(mesh: &Mesh, f: F, p: f64, rule: &QuadratureRule) -> Result<f64>
where
    F: Fn(&Point) -> f64 + Sync + Send,
{
    check_exponent(p)?;
    if p.is_infinite() {
        let per_cell = par::map_indexed(Execution::default(), mesh.num_cells(), |c| {
            let at_points = rule.points.iter().map(|b| f(&mesh.point_at(c, b)).abs());
            let at_vertices = mesh.cell(c).iter().map(|&i| f(mesh.vertex(i)).abs());
            at_points.chain(at_vertices).fold(0.0, f64::max)
        });
        return Ok(per_cell.into_iter().fold(0.0, f64::max));
    }
    Ok(crate::p1::integrate(mesh, |x| f(x).abs().powf(p), rule).powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_structured_2d, generate_structured_3d, Pattern};
    use proptest::prelude::*;

    fn square(n: usize) -> Mesh {
        generate_structured_2d(n, n, Pattern::RightDiagonal, 0.0).unwrap()
    }

    #[test]
    fn evaluation_at_vertices_is_exact() {
        let m = square(3);
        let f = P1Field::interpolate(&m, |x| x[0].sin() + 3.0 * x[1]);
        for c in 0..m.num_cells() {
            for (a, &i) in m.cell(c).iter().enumerate() {
                let mut bary = vec![0.0; 3];
                bary[a] = 1.0;
                assert_eq!(f.eval_bary(c, &bary), f.value(i));
            }
        }
        assert!(P1Field::new(&m, vec![0.0; 3]).is_err());
    }

    #[test]
    fn affine_gradient() {
        let m = generate_structured_3d(2, 1, 1).unwrap();
        let f = P1Field::interpolate(&m, |x| 2.0 * x[0] - x[1] + 0.5 * x[2] + 1.0);
        for c in 0..m.num_cells() {
            let g = f.gradient(c);
            assert!((g[0] - 2.0).abs() < 1e-13 && (g[1] + 1.0).abs() < 1e-13 && (g[2] - 0.5).abs() < 1e-13);
        }
    }

    #[test]
    fn cuts_of_constants() {
        let m = square(2);
        let five = P1Field::constant(&m, 5.0);
        assert!(five.cut_plus(3.0).values().iter().all(|&v| v == 2.0));
        assert!(five.cut_minus(3.0).values().iter().all(|&v| v == 0.0));
        let one = P1Field::constant(&m, 1.0);
        assert!(one.cut_plus(3.0).values().iter().all(|&v| v == 0.0));
        assert!(one.cut_minus(3.0).values().iter().all(|&v| v == -2.0));
        let at = P1Field::constant(&m, 3.0);
        assert!(at.cut_plus(3.0).values().iter().chain(at.cut_minus(3.0).values()).all(|&v| v == 0.0));
    }

    #[test]
    fn norms_of_constants() {
        for m in [square(4), generate_structured_3d(2, 2, 1).unwrap()] {
            let c = P1Field::constant(&m, -1.5);
            let area = m.measure();
            let d = (m.dim() + 1) as f64;
            for p in [1.0, 2.0, 3.5] {
                assert!((lp_norm(&c, p).unwrap() - 1.5 * area.powf(1.0 / p)).abs() < 1e-13);
                assert!((discrete_lp(&c, p).unwrap() - 1.5 * (d * area).powf(1.0 / p)).abs() < 1e-13);
            }
            let z = P1Field::zeros(&m);
            assert_eq!(lp_norm(&z, 2.0).unwrap(), 0.0);
            assert_eq!(discrete_lp(&z, 2.0).unwrap(), 0.0);
        }
        let m = square(1);
        assert!(lp_norm(&P1Field::zeros(&m), 0.5).is_err());
        assert!(lp_norm(&P1Field::zeros(&m), 65.0).is_err());
        assert_eq!(lp_norm(&P1Field::constant(&m, -2.0), f64::INFINITY).unwrap(), 2.0);
    }

    #[test]
    fn l2_norm_of_linear_function() {
        let m = square(4);
        let f = P1Field::interpolate(&m, |x| x[0]);
        assert!((lp_norm(&f, 2.0).unwrap() - (1.0f64 / 3.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn csv_round_trip() {
        let m = square(2);
        let f = P1Field::interpolate(&m, |x| x[0] * 0.1 + x[1] / 3.0);
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("node_index,x,y,value\n0,0,0,0\n"));
        let back = P1Field::read_csv(&m, buf.as_slice()).unwrap();
        assert_eq!(back, f);
    }

    proptest! {
        #[test]
        fn cut_decomposition(values in proptest::collection::vec(-5.0f64..5.0, 9), k in -6.0f64..6.0) {
            let m = square(2);
            let v = P1Field::new(&m, values).unwrap();
            let (plus, minus) = (v.cut_plus(k), v.cut_minus(k));
            for i in 0..9 {
                prop_assert!(plus.value(i) >= 0.0);
                prop_assert!(minus.value(i) <= 0.0);
                prop_assert!(plus.value(i) == 0.0 || minus.value(i) == 0.0);
                prop_assert!((plus.value(i) + minus.value(i) + k - v.value(i)).abs() <= 1e-14 * (1.0 + k.abs()));
            }
            if k >= v.max() { prop_assert!(plus.values().iter().all(|&x| x == 0.0)); }
            if k <= v.min() { prop_assert!(minus.values().iter().all(|&x| x == 0.0)); }
        }

        #[test]
        fn cut_norm_non_increasing(values in proptest::collection::vec(-5.0f64..5.0, 9), k1 in -6.0f64..6.0, dk in 0.0f64..3.0) {
            let m = square(2);
            let v = P1Field::new(&m, values).unwrap();
            let a = lp_norm(&v.cut_plus(k1), 2.0).unwrap();
            let b = lp_norm(&v.cut_plus(k1 + dk), 2.0).unwrap();
            prop_assert!(b <= a + 1e-12);
        }
    }
}
