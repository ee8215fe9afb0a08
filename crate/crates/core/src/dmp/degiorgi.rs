//! The De Giorgi iteration lemma for non-increasing step functions.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A non-negative, non-increasing, right-continuous step function on
/// `[k_0, ∞)`: `φ(k) = values[j]` for `k ∈ [breakpoints[j], breakpoints[j+1])`,
/// and `values.last()` beyond the final breakpoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepProfile {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
}

impl StepProfile {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != values.len() {
            return Err(Error::InvalidParameter("step profile needs matching, non-empty samples".into()));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter("breakpoints must be strictly increasing".into()));
        }
        if values.iter().any(|&v| !(v >= 0.0)) || values.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidParameter("φ must be non-negative and non-increasing".into()));
        }
        Ok(StepProfile { breakpoints, values })
    }

    pub fn k0(&self) -> f64 {
        self.breakpoints[0]
    }

    /// `φ(k)` for `k ≥ k_0`.
    pub fn eval(&self, k: f64) -> f64 {
        let idx = self.breakpoints.partition_point(|&b| b <= k);
        self.values[idx.saturating_sub(1)]
    }
}

/// Inputs of the lemma: `φ(s) ≤ (M/(s−k))^α φ(k)^β` for all `s > k ≥ k_0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeGiorgiInput {
    pub m: f64,
    pub alpha: f64,
    pub beta: f64,
    pub phi: StepProfile,
}

impl DeGiorgiInput {
    pub fn new(m: f64, alpha: f64, beta: f64, phi: StepProfile) -> Result<Self> {
        let input = DeGiorgiInput { m, alpha, beta, phi };
        input.validate()?;
        Ok(input)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0 && self.alpha > 0.0 && self.beta > 1.0) || !self.m.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "need M > 0, α > 0, β > 1; got M = {}, α = {}, β = {}",
                self.m, self.alpha, self.beta
            )));
        }
        Ok(())
    }

    /// Smallest `M` for which the hypothesis holds on the whole of
    /// `[k_0, ∞)`, or `None` when a positive tail makes it fail for all `M`.
    pub fn fit_m(phi: &StepProfile, alpha: f64, beta: f64) -> Option<f64> {
        let n = phi.values.len();
        if phi.values[n - 1] > 0.0 {
            return None;
        }
        let mut m = 0.0_f64;
        for i in 0..n {
            for j in i..n - 1 {
                if phi.values[j] > 0.0 {
                    let width = phi.breakpoints[j + 1] - phi.breakpoints[i];
                    m = m.max(width * (phi.values[j] / phi.values[i].powf(beta)).powf(1.0 / alpha));
                }
            }
        }
        Some(m)
    }
}

/// `ρ = M φ(k_0)^{(β−1)/α} 2^{β/(β−1)}`.
pub fn de_giorgi_rho(input: &DeGiorgiInput) -> Result<f64> {
    input.validate()?;
    let phi0 = input.phi.values[0];
    Ok(input.m * phi0.powf((input.beta - 1.0) / input.alpha) * 2f64.powf(input.beta / (input.beta - 1.0)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeGiorgiReport {
    pub m: f64,
    pub alpha: f64,
    pub beta: f64,
    pub k0: f64,
    pub rho: f64,
    /// `r = 2^{α/(β−1)}`.
    pub ratio: f64,
    pub hypothesis_holds: bool,
    /// Interval indices `(i, j)` of the first violation: `k ∈ [k_i, k_{i+1})`,
    /// `s ∈ [k_j, k_{j+1})`.
    pub first_violation: Option<(usize, usize)>,
    pub k_tau: Vec<f64>,
    pub phi_tau: Vec<f64>,
    pub decay_bound: Vec<f64>,
    pub decay_holds: bool,
    pub first_decay_violation: Option<usize>,
    pub phi_at_k0_plus_rho: f64,
    pub vanishes: bool,
    pub note: String,
}

const NOTE: &str = "the lemma statement writes rho >= M phi(k0)^((beta-1)/alpha) 2^(beta/(beta-1)) \
while its proof sets rho equal to that expression; the proof's value is used";

/// Checks the hypothesis on the step-function continuum, the decay
/// `φ(k_τ) ≤ φ(k_0)/r^τ` for `τ ≤ tau_max` and `φ(k_0 + ρ) = 0`. Never fails
/// on a violated hypothesis; see [`de_giorgi_verify`].
pub fn de_giorgi_check(input: &DeGiorgiInput, rho: f64, tau_max: usize) -> Result<DeGiorgiReport> {
    input.validate()?;
    let DeGiorgiInput { m, alpha, beta, ref phi } = *input;
    let n = phi.values.len();
    let rel = 1e-10;

    // On [k_i, k_{i+1}) × [k_j, k_{j+1}) the worst case is s − k → k_{j+1} − k_i.
    let mut first_violation = None;
    'outer: for i in 0..n {
        for j in i..n {
            let pj = phi.values[j];
            if pj == 0.0 {
                break;
            }
            if j == n - 1 {
                first_violation = Some((i, j));
                break 'outer;
            }
            let width = phi.breakpoints[j + 1] - phi.breakpoints[i];
            let lhs = width.powf(alpha) * pj;
            let rhs = m.powf(alpha) * phi.values[i].powf(beta);
            if lhs > rhs * (1.0 + rel) {
                first_violation = Some((i, j));
                break 'outer;
            }
        }
    }

    let k0 = phi.k0();
    let phi0 = phi.values[0];
    let ratio = 2f64.powf(alpha / (beta - 1.0));
    let mut k_tau = Vec::with_capacity(tau_max + 1);
    let mut phi_tau = Vec::with_capacity(tau_max + 1);
    let mut decay_bound = Vec::with_capacity(tau_max + 1);
    let mut first_decay_violation = None;
    for tau in 0..=tau_max {
        let k = k0 + rho - rho / 2f64.powi(tau as i32);
        let value = phi.eval(k);
        let bound = phi0 / ratio.powi(tau as i32);
        if value > bound * (1.0 + rel) && first_decay_violation.is_none() {
            first_decay_violation = Some(tau);
        }
        k_tau.push(k);
        phi_tau.push(value);
        decay_bound.push(bound);
    }
    let phi_end = phi.eval(k0 + rho);
    Ok(DeGiorgiReport {
        m,
        alpha,
        beta,
        k0,
        rho,
        ratio,
        hypothesis_holds: first_violation.is_none(),
        first_violation,
        k_tau,
        phi_tau,
        decay_bound,
        decay_holds: first_decay_violation.is_none(),
        first_decay_violation,
        phi_at_k0_plus_rho: phi_end,
        vanishes: phi_end <= 1e-12 * phi0,
        note: NOTE.to_string(),
    })
}

/// Like [`de_giorgi_check`], but returns `HypothesisViolated` when the
/// profile does not satisfy the hypothesis.
pub fn de_giorgi_verify(input: &DeGiorgiInput, rho: f64, tau_max: usize) -> Result<DeGiorgiReport> {
    let report = de_giorgi_check(input, rho, tau_max)?;
    match report.first_violation {
        Some((i, j)) => Err(Error::HypothesisViolated { k: input.phi.breakpoints[i], s: input.phi.breakpoints[j] }),
        None => Ok(report),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn step(b: &[f64], v: &[f64]) -> StepProfile {
        StepProfile::new(b.to_vec(), v.to_vec()).unwrap()
    }

    #[test]
    fn rho_examples() {
        let unit = DeGiorgiInput::new(1.0, 1.0, 2.0, step(&[0.0, 5.0], &[1.0, 0.0])).unwrap();
        assert_eq!(de_giorgi_rho(&unit).unwrap(), 4.0);
        let zero = DeGiorgiInput::new(1.0, 1.0, 2.0, step(&[0.0], &[0.0])).unwrap();
        assert_eq!(de_giorgi_rho(&zero).unwrap(), 0.0);
        let other = DeGiorgiInput::new(2.0, 2.0, 3.0, step(&[0.0, 1.0], &[4.0, 0.0])).unwrap();
        let expected = 2.0 * 4.0 * 2f64.sqrt().powi(3);
        assert!((de_giorgi_rho(&other).unwrap() - expected).abs() < 1e-13);
        assert!((expected - 22.627416997969522).abs() < 1e-12);
    }

    #[test]
    fn parameter_and_profile_validation() {
        let p = step(&[0.0], &[0.0]);
        assert!(DeGiorgiInput::new(0.0, 1.0, 2.0, p.clone()).is_err());
        assert!(DeGiorgiInput::new(1.0, 0.0, 2.0, p.clone()).is_err());
        assert!(DeGiorgiInput::new(1.0, 1.0, 1.0, p).is_err());
        assert!(StepProfile::new(vec![0.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(StepProfile::new(vec![1.0, 0.0], vec![1.0, 0.0]).is_err());
        assert!(StepProfile::new(vec![], vec![]).is_err());
    }

    #[test]
    fn step_evaluation_is_right_continuous() {
        let p = step(&[0.0, 1.0, 2.0], &[3.0, 2.0, 0.0]);
        assert_eq!(p.eval(0.0), 3.0);
        assert_eq!(p.eval(0.999), 3.0);
        assert_eq!(p.eval(1.0), 2.0);
        assert_eq!(p.eval(7.0), 0.0);
    }

    #[test]
    fn zero_profile_passes() {
        let input = DeGiorgiInput::new(1.0, 1.0, 2.0, step(&[0.0], &[0.0])).unwrap();
        let r = de_giorgi_verify(&input, 0.0, 40).unwrap();
        assert!(r.hypothesis_holds && r.decay_holds && r.vanishes);
    }

    #[test]
    fn constant_profile_violates_hypothesis() {
        let input = DeGiorgiInput::new(1.0, 1.0, 2.0, step(&[0.0], &[1.0])).unwrap();
        assert!(matches!(de_giorgi_verify(&input, 4.0, 40), Err(Error::HypothesisViolated { .. })));
        let r = de_giorgi_check(&input, 4.0, 40).unwrap();
        assert_eq!(r.first_violation, Some((0, 0)));
        assert!(!r.vanishes);
    }

    #[test]
    fn fitted_constant_makes_hypothesis_hold() {
        let p = step(&[0.0, 0.1, 0.3, 0.35], &[1.0, 0.6, 0.05, 0.0]);
        let (alpha, beta) = (4.0, 1.5);
        let m = DeGiorgiInput::fit_m(&p, alpha, beta).unwrap();
        let input = DeGiorgiInput::new(m, alpha, beta, p.clone()).unwrap();
        let rho = de_giorgi_rho(&input).unwrap();
        let r = de_giorgi_verify(&input, rho, 40).unwrap();
        assert!(r.decay_holds && r.vanishes);
        let smaller = DeGiorgiInput::new(0.9 * m, alpha, beta, p.clone()).unwrap();
        assert!(!de_giorgi_check(&smaller, rho, 40).unwrap().hypothesis_holds);
        assert!(DeGiorgiInput::fit_m(&step(&[0.0, 1.0], &[1.0, 0.5]), alpha, beta).is_none());
    }

    /// Random non-increasing profiles: when the hypothesis holds for some
    /// `M`, the decay chain and the vanishing at `k_0 + ρ` follow.
    fn profile() -> impl Strategy<Value = StepProfile> {
        (1usize..12).prop_flat_map(|n| {
            (prop::collection::vec(0.01f64..1.0, n), prop::collection::vec(0.0f64..1.0, n)).prop_map(|(gaps, drops)| {
                let mut b = vec![0.0];
                let mut v = vec![1.0];
                for (g, d) in gaps.iter().zip(&drops) {
                    b.push(b.last().unwrap() + g);
                    v.push(v.last().unwrap() * d);
                }
                *v.last_mut().unwrap() = 0.0;
                StepProfile::new(b, v).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn hypothesis_implies_conclusions(p in profile(), alpha in 0.5f64..5.0, beta in 1.1f64..4.0, inflate in 1.0f64..3.0) {
            let m = DeGiorgiInput::fit_m(&p, alpha, beta).unwrap() * inflate;
            prop_assume!(m > 0.0);
            let input = DeGiorgiInput::new(m, alpha, beta, p).unwrap();
            let rho = de_giorgi_rho(&input).unwrap();
            let r = de_giorgi_check(&input, rho, 40).unwrap();
            prop_assert!(r.hypothesis_holds);
            prop_assert!(r.decay_holds, "{:?}", r.first_decay_violation);
            prop_assert!(r.vanishes);
        }
    }
}
