//! The combined discrete maximum principle certificate.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dmp::{
    assumption_a_sweep_with, compute_k_star, de_giorgi_check, de_giorgi_rho, edge_condition_check_2d,
    element_condition_check, level_set_profile, AssumptionSweep, DeGiorgiInput, DeGiorgiReport, DmpParams,
    EdgeConditionReport, ElementCase, ElementConditionReport, LevelSetProfile, StepProfile,
};
use crate::mesh::{acuteness_audit_with, AngleReport, Mesh};
use crate::p1::{function_lp_norm, QuadratureRule};
use crate::par::Execution;
use crate::solver::{
    check_zeroth_order_condition, interpolate_boundary, CMode, CoefficientSet, SolveResult, ZerothOrderReport,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable => "not-applicable",
        }
    }
}

/// Which optional sections are computed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CertificateOptions {
    /// Element case; chosen from the coefficients when absent.
    pub element_case: Option<ElementCase>,
    pub element_condition: bool,
    pub edge_condition: bool,
    pub level_sets: bool,
    pub de_giorgi: bool,
    pub tau_max: usize,
    /// Slack in `sup u_h ≤ k*`.
    pub bound_tolerance: f64,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        CertificateOptions {
            element_case: None,
            element_condition: true,
            edge_condition: true,
            level_sets: true,
            de_giorgi: true,
            tau_max: 40,
            bound_tolerance: 1e-9,
            execution: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Section<T> {
    pub verdict: Verdict,
    #[serde(flatten)]
    pub evidence: Option<T>,
}

impl<T> Section<T> {
    fn skipped() -> Self {
        Section { verdict: Verdict::NotApplicable, evidence: None }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KStar {
    pub value: f64,
    pub c_mode: CMode,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SupUh {
    pub value: f64,
    pub node: usize,
    /// `sup u_h ≤ k* + tolerance`.
    pub below_k_star: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Theorem32 {
    pub p: f64,
    pub r: f64,
    pub f_norm_exponent: f64,
    pub f_norm: f64,
    /// `(sup u_h − k*)_+ / ‖f‖`, absent when `‖f‖ = 0`.
    pub empirical_c: Option<f64>,
    /// `2^{(p−1)/(p−1−r)} |Ω|^{(p−1−r)/(pr)}`.
    pub domain_factor: f64,
    pub assumption_a_satisfied: bool,
    pub zeroth_order: ZerothOrderReport,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Theorem33 {
    pub applicable: bool,
    pub f_nonpositive: bool,
    pub max_f: f64,
    pub h: f64,
    pub nu: f64,
    pub h_nu: f64,
    pub assumption_a_satisfied: bool,
    pub bound_holds: bool,
    pub tolerance: f64,
    pub reasons: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelSets {
    pub k: Vec<f64>,
    pub measure: Vec<f64>,
    pub non_increasing: bool,
    pub vanishes_at_sup: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeGiorgi {
    /// `M / ‖f‖`, the constant of the level-set recursion per unit `f`.
    pub m_over_f_norm: Option<f64>,
    /// `sup u_h ≤ k* + ρ`.
    pub sup_within_rho: bool,
    #[serde(flatten)]
    pub report: DeGiorgiReport,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DmpCertificate {
    pub k_star: Section<KStar>,
    pub sup_uh: Section<SupUh>,
    pub theorem_3_2: Section<Theorem32>,
    pub theorem_3_3: Section<Theorem33>,
    pub assumption_a: Section<AssumptionSweep>,
    pub element_condition: Section<ElementConditionReport>,
    pub edge_condition: Section<EdgeConditionReport>,
    pub level_sets: Section<LevelSets>,
    pub de_giorgi: Section<DeGiorgi>,
    pub angles: Section<AngleReport>,
}

impl DmpCertificate {
    pub fn k_star(&self) -> f64 {
        self.k_star.evidence.as_ref().map_or(f64::NAN, |k| k.value)
    }

    pub fn sup_uh(&self) -> f64 {
        self.sup_uh.evidence.as_ref().map_or(f64::NAN, |s| s.value)
    }

    pub fn assumption_a_satisfied(&self) -> bool {
        self.assumption_a.evidence.as_ref().is_some_and(|s| s.satisfied)
    }

    pub fn empirical_c(&self) -> Option<f64> {
        self.theorem_3_2.evidence.as_ref().and_then(|t| t.empirical_c)
    }

    /// `(name, verdict)` for every section, in schema order.
    pub fn verdicts(&self) -> Vec<(&'static str, Verdict)> {
        vec![
            ("k_star", self.k_star.verdict),
            ("sup_uh", self.sup_uh.verdict),
            ("theorem_3_2", self.theorem_3_2.verdict),
            ("theorem_3_3", self.theorem_3_3.verdict),
            ("assumption_a", self.assumption_a.verdict),
            ("element_condition", self.element_condition.verdict),
            ("edge_condition", self.edge_condition.verdict),
            ("level_sets", self.level_sets.verdict),
            ("de_giorgi", self.de_giorgi.verdict),
            ("angles", self.angles.verdict),
        ]
    }

    /// A requested check produced `fail`.
    pub fn any_failure(&self) -> bool {
        self.verdicts().iter().any(|(_, v)| *v == Verdict::Fail)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }

    pub fn level_set_profile(&self) -> Option<LevelSetProfile> {
        self.level_sets.evidence.as_ref().map(|l| LevelSetProfile { k: l.k.clone(), measure: l.measure.clone() })
    }
}

/// Runs every requested check on a converged solution.
pub fn dmp_certificate(
    mesh: &Mesh,
    solution: &SolveResult<'_>,
    coeffs: &CoefficientSet,
    rule: &QuadratureRule,
    params: &DmpParams,
    options: &CertificateOptions,
) -> Result<DmpCertificate> {
    if !solution.converged {
        return Err(Error::NotConverged);
    }
    params.validate(mesh.dim())?;
    let exec = options.execution;
    let u_h = &solution.u_h;

    let bc = interpolate_boundary(mesh, &*coeffs.g);
    let k_star = compute_k_star(mesh, &bc, coeffs.c_mode)?;
    let (sup_node, sup) =
        u_h.values()
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best });
    let below = sup <= k_star + options.bound_tolerance;

    let sweep = assumption_a_sweep_with(mesh, u_h, coeffs, rule, k_star, exec)?;
    let satisfied = sweep.satisfied;

    // Bound without source: f ≤ 0, hν < 1, c ≥ 0 or c ≡ 0, Assumption A.
    let mut max_f = f64::NEG_INFINITY;
    for c in 0..mesh.num_cells() {
        for bary in &rule.points {
            max_f = max_f.max((coeffs.f)(&mesh.point_at(c, bary)));
        }
    }
    for x in mesh.vertices() {
        max_f = max_f.max((coeffs.f)(x));
    }
    let f_nonpositive = max_f <= 0.0;
    let h_nu = mesh.h() * coeffs.nu;
    let mut reasons = Vec::new();
    if !f_nonpositive {
        reasons.push(format!("f is positive somewhere (max sampled value {max_f:e})"));
    }
    if !(h_nu < 1.0) {
        reasons.push(format!("h*nu = {h_nu:e} is not below 1"));
    }
    if !satisfied {
        reasons.push(format!("Assumption A fails at k = {:e}", sweep.argmin_k));
    }
    let applicable = f_nonpositive && h_nu < 1.0;
    let t33_verdict = match (applicable && satisfied, below) {
        (false, _) => Verdict::NotApplicable,
        (true, ok) => Verdict::from_bool(ok),
    };
    let theorem_3_3 = Section {
        verdict: t33_verdict,
        evidence: Some(Theorem33 {
            applicable,
            f_nonpositive,
            max_f,
            h: mesh.h(),
            nu: coeffs.nu,
            h_nu,
            assumption_a_satisfied: satisfied,
            bound_holds: below,
            tolerance: options.bound_tolerance,
            reasons,
        }),
    };

    // Bound with source: Assumption A and c − ½∇·b ≥ 0.
    let exponent = params.f_norm_exponent();
    let f_norm = function_lp_norm(mesh, &*coeffs.f, exponent, rule)?;
    let excess = (sup - k_star).max(0.0);
    let empirical_c = (f_norm > 0.0).then(|| excess / f_norm);
    let zeroth_order = check_zeroth_order_condition(mesh, u_h, coeffs, rule);
    let t32_applicable = satisfied && zeroth_order.holds;
    let t32_verdict = if !t32_applicable {
        Verdict::NotApplicable
    } else if f_norm > 0.0 {
        Verdict::Pass
    } else {
        Verdict::from_bool(below)
    };
    let theorem_3_2 = Section {
        verdict: t32_verdict,
        evidence: Some(Theorem32 {
            p: params.p,
            r: params.r,
            f_norm_exponent: exponent,
            f_norm,
            empirical_c,
            domain_factor: params.domain_factor(mesh.measure()),
            assumption_a_satisfied: satisfied,
            zeroth_order,
            notes: vec!["the constant C is generic; only the empirical ratio is reported".into()],
        }),
    };

    let element_condition = if options.element_condition {
        let case = options.element_case.unwrap_or_else(|| ElementCase::select(coeffs));
        let report =
            element_condition_check(mesh, coeffs, rule, case, params.lambda_star_for(coeffs.lambda), Some(u_h), exec)?;
        Section { verdict: Verdict::from_bool(report.all_pass), evidence: Some(report) }
    } else {
        Section::skipped()
    };

    let edge_condition = if options.edge_condition && mesh.dim() == 2 {
        let report = edge_condition_check_2d(mesh, coeffs, rule, Some(u_h), exec)?;
        let ok = report.all_pass && report.closed_form_mismatches == 0;
        Section { verdict: Verdict::from_bool(ok), evidence: Some(report) }
    } else {
        Section::skipped()
    };

    let profile = (options.level_sets || options.de_giorgi).then(|| level_set_profile(mesh, u_h, k_star, exec));
    let level_sets = match (&profile, options.level_sets) {
        (Some(p), true) => {
            let non_increasing = p.is_non_increasing();
            let vanishes_at_sup = crate::dmp::level_set_measure(mesh, u_h, sup) == 0.0;
            Section {
                verdict: Verdict::from_bool(non_increasing && vanishes_at_sup),
                evidence: Some(LevelSets {
                    k: p.k.clone(),
                    measure: p.measure.clone(),
                    non_increasing,
                    vanishes_at_sup,
                }),
            }
        }
        _ => Section::skipped(),
    };

    let de_giorgi = match (&profile, options.de_giorgi) {
        (Some(p), true) => de_giorgi_section(p, params, f_norm, sup, options.tau_max)?,
        _ => Section::skipped(),
    };

    let audit = acuteness_audit_with(mesh, params.alpha_exponent, exec);
    let angles = Section { verdict: Verdict::from_bool(audit.obtuse.is_empty()), evidence: Some(audit) };

    Ok(DmpCertificate {
        k_star: Section { verdict: Verdict::Pass, evidence: Some(KStar { value: k_star, c_mode: coeffs.c_mode }) },
        sup_uh: Section {
            verdict: Verdict::from_bool(below),
            evidence: Some(SupUh { value: sup, node: sup_node, below_k_star: below }),
        },
        theorem_3_2,
        theorem_3_3,
        assumption_a: Section { verdict: Verdict::from_bool(satisfied), evidence: Some(sweep) },
        element_condition,
        edge_condition,
        level_sets,
        de_giorgi,
        angles,
    })
}

/// Fits the smallest `M` for the measured `|G(k)|` with `(α, β) = (p, (p−1)/r)`
/// and checks the lemma's conclusions with it.
fn de_giorgi_section(
    profile: &LevelSetProfile,
    params: &DmpParams,
    f_norm: f64,
    sup: f64,
    tau_max: usize,
) -> Result<Section<DeGiorgi>> {
    let (alpha, beta) = params.de_giorgi_exponents();
    let phi = StepProfile::new(profile.k.clone(), profile.measure.clone())?;
    let Some(fit) = DeGiorgiInput::fit_m(&phi, alpha, beta) else {
        return Ok(Section::skipped());
    };
    let m = if fit > 0.0 { fit } else { 1.0 };
    let input = DeGiorgiInput::new(m, alpha, beta, phi)?;
    let rho = de_giorgi_rho(&input)?;
    let report = de_giorgi_check(&input, rho, tau_max)?;
    let sup_within_rho = sup <= report.k0 + rho * (1.0 + 1e-12) + 1e-300;
    let verdict = if !report.hypothesis_holds {
        Verdict::NotApplicable
    } else {
        Verdict::from_bool(report.decay_holds && report.vanishes && sup_within_rho)
    };
    let m_over_f_norm = (f_norm > 0.0 && fit > 0.0).then(|| fit / f_norm);
    Ok(Section { verdict, evidence: Some(DeGiorgi { m_over_f_norm, sup_within_rho, report }) })
}
