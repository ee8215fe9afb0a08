//! Exponents of the `L^∞` bound.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Sobolev exponent `p`, Hölder exponent `r` and the margins of the
/// element checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DmpParams {
    pub p: f64,
    pub r: f64,
    /// Margin for element cases (i) and (ii); `0.1λ` when absent.
    pub lambda_star: Option<f64>,
    /// Exponent `α` of the `O(h^α)`-acuteness fit.
    pub alpha_exponent: f64,
}

impl Default for DmpParams {
    fn default() -> Self {
        DmpParams { p: 4.0, r: 2.0, lambda_star: None, alpha_exponent: 1.0 }
    }
}

impl DmpParams {
    pub fn validate(&self, dim: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.p > 2.0) || !self.p.is_finite() {
            return bad(format!("p must be finite and > 2, got {}", self.p));
        }
        if dim > 2 {
            let limit = 2.0 * dim as f64 / (dim as f64 - 2.0);
            if !(self.p < limit) {
                return bad(format!("p must be < {limit} in dimension {dim}, got {}", self.p));
            }
        }
        if !(self.r >= 1.0 && self.r < self.p - 1.0) {
            return bad(format!("r must satisfy 1 <= r < p - 1, got r = {}", self.r));
        }
        if let Some(ls) = self.lambda_star {
            if !(ls > 0.0) {
                return bad(format!("lambda_star must be positive, got {ls}"));
            }
        }
        if !(self.alpha_exponent >= 0.0) {
            return bad(format!("alpha_exponent must be >= 0, got {}", self.alpha_exponent));
        }
        Ok(())
    }

    /// Conjugate `q = p/(p−1)`.
    pub fn q(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    /// Conjugate `s = r/(r−1)`, infinite for `r = 1`.
    pub fn s(&self) -> f64 {
        if self.r == 1.0 {
            f64::INFINITY
        } else {
            self.r / (self.r - 1.0)
        }
    }

    /// `qs = pr/((p−1)(r−1))`, the exponent of the norm of `f`.
    pub fn f_norm_exponent(&self) -> f64 {
        if self.r == 1.0 {
            f64::INFINITY
        } else {
            self.p * self.r / ((self.p - 1.0) * (self.r - 1.0))
        }
    }

    /// De Giorgi exponents `(α, β) = (p, (p−1)/r)` of the level-set
    /// recursion.
    pub fn de_giorgi_exponents(&self) -> (f64, f64) {
        (self.p, (self.p - 1.0) / self.r)
    }

    /// `2^{(p−1)/(p−1−r)} |Ω|^{(p−1−r)/(pr)}`.
    pub fn domain_factor(&self, measure: f64) -> f64 {
        let gap = self.p - 1.0 - self.r;
        2f64.powf((self.p - 1.0) / gap) * measure.powf(gap / (self.p * self.r))
    }

    pub fn lambda_star_for(&self, lambda: f64) -> f64 {
        self.lambda_star.unwrap_or(0.1 * lambda)
    }
}
