//! Discrete maximum principle verification: the cut level `k*`, the
//! Assumption-A sweep, element and edge sufficient conditions, level-set
//! measures, the De Giorgi lemma and the combined certificate.

mod certificate;
mod conditions;
mod degiorgi;
mod levelset;
mod params;
mod sweep;

pub use certificate::{dmp_certificate, CertificateOptions, DmpCertificate, Verdict};
pub use conditions::{
    edge_condition_check_2d, element_condition_check, EdgeConditionReport, EdgeVerdict, ElementCase,
    ElementConditionReport, PairVerdict,
};
pub use degiorgi::{de_giorgi_check, de_giorgi_rho, de_giorgi_verify, DeGiorgiInput, DeGiorgiReport, StepProfile};
pub use levelset::{level_set_measure, level_set_profile, LevelSetProfile};
pub use params::DmpParams;
pub use sweep::{assumption_a_sweep, assumption_a_sweep_with, compute_k_star, AssumptionSweep};
