//! Symmetric quadrature rules on simplices with positive weights.

// Tabulated values keep the digits of their published form.
#![allow(clippy::excessive_precision)]

use crate::mesh::{Mesh, Point};
use crate::par::{self, Execution};
use crate::{Error, Result};

/// A rule in barycentric coordinates. Weights sum to one and are scaled by
/// the cell measure when used.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub dim: usize,
    pub degree: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// The smallest tabulated rule that is exact for polynomials of total
    /// degree `degree`.
    pub fn new(dim: usize, degree: usize) -> Result<Self> {
        match dim {
            2 => Self::triangle(degree),
            3 => Self::tetrahedron(degree),
            _ => Err(Error::NoQuadratureRule { dim, degree }),
        }
    }

    /// Highest-degree rule available for the dimension.
    pub fn max_degree(dim: usize) -> usize {
        if dim == 2 {
            6
        } else {
            5
        }
    }

    pub fn triangle(degree: usize) -> Result<Self> {
        let mut r = Builder::new(2);
        match degree {
            0 | 1 => {
                r.centroid(1.0);
                r.finish(1)
            }
            2 => {
                r.s21(1.0 / 6.0, 1.0 / 3.0);
                r.finish(2)
            }
            3 | 4 => {
                r.s21(0.445_948_490_915_964_886_318_329_253_883_05, 0.223_381_589_678_011_465_695_007_008_433_12);
                r.s21(0.091_576_213_509_770_743_459_571_463_402_202, 0.109_951_743_655_321_867_638_326_324_900_21);
                r.finish(4)
            }
            5 | 6 => {
                r.s21(0.249_286_745_170_910_421_291_638_553_107_02, 0.116_786_275_726_379_366_025_289_611_385_58);
                r.s21(0.063_089_014_491_502_228_340_331_602_870_819, 0.050_844_906_370_206_816_920_936_809_106_869);
                r.s111(
                    0.053_145_049_844_816_947_353_249_671_631_398,
                    0.310_352_451_033_784_405_416_607_733_956_55,
                    0.082_851_075_618_373_575_193_553_456_420_442,
                );
                r.finish(6)
            }
            _ => Err(Error::NoQuadratureRule { dim: 2, degree }),
        }
    }

    pub fn tetrahedron(degree: usize) -> Result<Self> {
        let mut r = Builder::new(3);
        match degree {
            0 | 1 => {
                r.centroid(1.0);
                r.finish(1)
            }
            2 => {
                r.s31((5.0 - 5f64.sqrt()) / 20.0, 0.25);
                r.finish(2)
            }
            3..=5 => {
                r.s31(0.310_885_919_263_300_609_797_345_733_763_46, 0.112_687_925_718_015_850_799_886_324_441_26);
                r.s31(0.092_735_250_310_891_226_402_591_007_728_7, 0.073_493_043_116_361_949_544_503_667_445_8);
                r.s22(0.045_503_704_125_649_649_492_392_812_186_19, 0.042_546_020_777_081_466_438_069_341_481_8);
                r.finish(5)
            }
            _ => Err(Error::NoQuadratureRule { dim: 3, degree }),
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

struct Builder {
    dim: usize,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl Builder {
    fn new(dim: usize) -> Self {
        Builder { dim, points: Vec::new(), weights: Vec::new() }
    }

    fn push(&mut self, p: Vec<f64>, w: f64) {
        self.points.push(p);
        self.weights.push(w);
    }

    fn centroid(&mut self, w: f64) {
        let n = self.dim + 1;
        self.push(vec![1.0 / n as f64; n], w);
    }

    /// Orbit of `(a, a, 1 − 2a)`.
    fn s21(&mut self, a: f64, w: f64) {
        let b = 1.0 - 2.0 * a;
        for p in [[b, a, a], [a, b, a], [a, a, b]] {
            self.push(p.to_vec(), w);
        }
    }

    /// Orbit of `(a, b, 1 − a − b)`.
    fn s111(&mut self, a: f64, b: f64, w: f64) {
        let c = 1.0 - a - b;
        for p in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
            self.push(p.to_vec(), w);
        }
    }

    /// Orbit of `(a, a, a, 1 − 3a)`.
    fn s31(&mut self, a: f64, w: f64) {
        let b = 1.0 - 3.0 * a;
        for k in 0..4 {
            let mut p = vec![a; 4];
            p[k] = b;
            self.push(p, w);
        }
    }

    /// Orbit of `(a, a, ½ − a, ½ − a)`.
    fn s22(&mut self, a: f64, w: f64) {
        let b = 0.5 - a;
        for (i, j) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
            let mut p = vec![b; 4];
            p[i] = a;
            p[j] = a;
            self.push(p, w);
        }
    }

    fn finish(self, degree: usize) -> Result<QuadratureRule> {
        Ok(QuadratureRule { dim: self.dim, degree, points: self.points, weights: self.weights })
    }
}

/// `Σ_T |T| Σ_q w_q f(x_q)`, summed pairwise in cell order.
pub fn integrate<F>(mesh: &Mesh, integrand: F, rule: &QuadratureRule) -> f64
where
    F: Fn(&Point) -> f64 + Sync + Send,
{
    integrate_with(mesh, integrand, rule, Execution::default())
}

pub fn integrate_with<F>(mesh: &Mesh, integrand: F, rule: &QuadratureRule, exec: Execution) -> f64
where
    F: Fn(&Point) -> f64 + Sync + Send,
{
    let per_cell = par::map_indexed(exec, mesh.num_cells(), |c| {
        let local: f64 = rule.points.iter().zip(&rule.weights).map(|(b, w)| w * integrand(&mesh.point_at(c, b))).sum();
        local * mesh.cell_measure(c)
    });
    par::pairwise_sum(&per_cell)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_structured_2d, Pattern};

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    /// Exact `∫ x^a y^b z^c` over the reference simplex.
    fn monomial_integral(exps: &[u32]) -> f64 {
        let total: u32 = exps.iter().sum();
        exps.iter().map(|&e| factorial(e)).product::<f64>() / factorial(total + exps.len() as u32)
    }

    fn check_exactness(rule: &QuadratureRule) {
        let dim = rule.dim;
        let reference_measure = if dim == 2 { 0.5 } else { 1.0 / 6.0 };
        assert!((rule.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(rule.weights.iter().all(|&w| w > 0.0));
        for p in &rule.points {
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            assert!(p.iter().all(|&l| l >= 0.0));
        }
        let deg = rule.degree as u32;
        let mut exps = vec![0u32; dim];
        loop {
            if exps.iter().sum::<u32>() <= deg {
                let approx: f64 = rule
                    .points
                    .iter()
                    .zip(&rule.weights)
                    .map(|(b, w)| w * exps.iter().enumerate().map(|(k, &e)| b[k + 1].powi(e as i32)).product::<f64>())
                    .sum::<f64>()
                    * reference_measure;
                let exact = monomial_integral(&exps);
                assert!(
                    ((approx - exact) / exact).abs() < 1e-13,
                    "dim {dim} degree {} monomial {exps:?}: {approx} vs {exact}",
                    rule.degree
                );
            }
            let mut k = 0;
            loop {
                if k == dim {
                    return;
                }
                exps[k] += 1;
                if exps[k] <= deg {
                    break;
                }
                exps[k] = 0;
                k += 1;
            }
        }
    }

    #[test]
    fn triangle_rules_are_exact() {
        for d in [1, 2, 4, 6] {
            check_exactness(&QuadratureRule::triangle(d).unwrap());
        }
    }

    #[test]
    fn tetrahedron_rules_are_exact() {
        for d in [1, 2, 4] {
            let rule = QuadratureRule::tetrahedron(d).unwrap();
            assert!(rule.degree >= d);
            check_exactness(&rule);
        }
    }

    #[test]
    fn degree_beyond_tables_is_an_error() {
        assert!(QuadratureRule::triangle(7).is_err());
        assert!(QuadratureRule::tetrahedron(6).is_err());
        assert!(QuadratureRule::new(4, 1).is_err());
    }

    #[test]
    fn integrals_over_unit_square() {
        let m = generate_structured_2d(3, 5, Pattern::Crisscross, 0.0).unwrap();
        let r1 = QuadratureRule::triangle(1).unwrap();
        assert!((integrate(&m, |_| 1.0, &r1) - 1.0).abs() < 1e-14);
        assert!((integrate(&m, |x| x[0], &r1) - 0.5).abs() < 1e-14);
        let r6 = QuadratureRule::triangle(6).unwrap();
        assert!((integrate(&m, |x| x[0].powi(3) * x[1].powi(3), &r6) - 1.0 / 16.0).abs() < 1e-14);
    }

    #[test]
    fn shape_function_products() {
        let m = Mesh::from_triangles(&[[0.1, 0.2], [1.3, 0.1], [0.4, 0.9]], &[[0, 1, 2]]).unwrap();
        let area = m.cell_measure(0);
        let r2 = QuadratureRule::triangle(2).unwrap();
        let r6 = QuadratureRule::triangle(6).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let prod = |x: &Point| {
                    let l = crate::p1::barycentric(&m, 0, x);
                    l[i] * l[j]
                };
                let exact = if i == j { area / 6.0 } else { area / 12.0 };
                assert!((integrate(&m, prod, &r2) - exact).abs() < 1e-15);
                assert!((integrate(&m, prod, &r6) - exact).abs() < 1e-15);
            }
        }
    }
}
