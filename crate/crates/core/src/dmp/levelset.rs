//! Measures of the super-level cell sets `G(k)`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::mesh::Mesh;
use crate::p1::P1Field;
use crate::par::{self, Execution};
use crate::Result;

/// `|G(k)|`: total measure of the cells with a vertex value above `k`.
pub fn level_set_measure(mesh: &Mesh, u_h: &P1Field<'_>, k: f64) -> f64 {
    let measures: Vec<f64> = (0..mesh.num_cells())
        .map(|c| {
            let above = mesh.cell(c).iter().any(|&i| u_h.value(i) > k);
            if above {
                mesh.cell_measure(c)
            } else {
                0.0
            }
        })
        .collect();
    par::pairwise_sum(&measures)
}

/// `|G(k)|` at `k0` and at every distinct nodal value above it. Since
/// `|G|` is right-continuous and constant between nodal values, these
/// samples determine it on `[k0, ∞)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSetProfile {
    pub k: Vec<f64>,
    pub measure: Vec<f64>,
}

pub fn level_set_profile(mesh: &Mesh, u_h: &P1Field<'_>, k0: f64, exec: Execution) -> LevelSetProfile {
    let mut k: Vec<f64> = u_h.values().iter().copied().filter(|&v| v > k0).collect();
    k.push(k0);
    k.sort_by(f64::total_cmp);
    k.dedup();
    let measure = par::map_indexed(exec, k.len(), |i| level_set_measure(mesh, u_h, k[i]));
    LevelSetProfile { k, measure }
}

impl LevelSetProfile {
    pub fn is_non_increasing(&self) -> bool {
        self.measure.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "k,measure")?;
        for (k, m) in self.k.iter().zip(&self.measure) {
            writeln!(out, "{k:e},{m:e}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_structured_2d, Pattern};
    use proptest::prelude::*;

    #[test]
    fn extremes() {
        let m = generate_structured_2d(4, 4, Pattern::Crisscross, 0.0).unwrap();
        let u = P1Field::interpolate(&m, |x| (x[0] * 5.0).sin() + x[1]);
        assert!((level_set_measure(&m, &u, u.min() - 1.0) - 1.0).abs() < 1e-14);
        assert_eq!(level_set_measure(&m, &u, u.max()), 0.0);
    }

    #[test]
    fn hand_count_on_small_mesh() {
        // For k = 0.5 only the four cells of the right column have a
        // vertex at x = 1; for k = 0.25 every cell has a vertex at x ≥ 0.5.
        let m = generate_structured_2d(2, 2, Pattern::RightDiagonal, 0.0).unwrap();
        let u = P1Field::interpolate(&m, |x| x[0]);
        let touching: f64 = (0..m.num_cells())
            .filter(|&c| m.cell(c).iter().any(|&i| m.vertex(i)[0] > 0.5))
            .map(|c| m.cell_measure(c))
            .sum();
        assert_eq!(touching, 0.5);
        assert_eq!(level_set_measure(&m, &u, 0.5), touching);
        assert_eq!(level_set_measure(&m, &u, 0.25), 1.0);
    }

    #[test]
    fn profile_and_csv() {
        let m = generate_structured_2d(4, 4, Pattern::RightDiagonal, 0.0).unwrap();
        let u = P1Field::interpolate(&m, |x| x[0] * x[1]);
        let p = level_set_profile(&m, &u, 0.0, Execution::Parallel);
        assert_eq!(p.k[0], 0.0);
        assert_eq!(*p.measure.last().unwrap(), 0.0);
        assert!(p.is_non_increasing());
        let mut out = Vec::new();
        p.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("k,measure\n"));
        assert_eq!(text.lines().count(), p.k.len() + 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn non_increasing(values in prop::collection::vec(-1.0f64..1.0, 25), k1 in -1.2f64..1.2, dk in 0.0f64..1.0) {
            let m = generate_structured_2d(4, 4, Pattern::RightDiagonal, 0.0).unwrap();
            let u = P1Field::new(&m, values).unwrap();
            prop_assert!(level_set_measure(&m, &u, k1) >= level_set_measure(&m, &u, k1 + dk));
        }
    }
}
