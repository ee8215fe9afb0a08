//! The four subcommands.

use std::cmp::Ordering;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use dmpfem::dmp::{dmp_certificate, CertificateOptions, DmpCertificate, DmpParams, ElementCase, Verdict};
use dmpfem::mesh::{acuteness_audit_with, write_vtk, Mesh};
use dmpfem::p1::{P1Field, QuadratureRule};
use dmpfem::solver::{picard_solve, CoefficientCheck, CoefficientSet, SolveOptions, SolveResult, SolveSummary};
use dmpfem::Execution;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::{CheckArgs, MeshGenArgs, ReportArgs, SolveArgs, ALL_CHECKS};
use crate::config::{MeshSource, RunConfig};
use crate::problem::{Preset, ProblemSpec};
use crate::CliError;

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

fn flush(mut out: BufWriter<File>, path: &Path) -> Result<(), CliError> {
    out.flush().map_err(|e| CliError::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(value).map_err(dmpfem::Error::from)? + "\n")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeshStats {
    pub dim: usize,
    pub vertices: usize,
    pub cells: usize,
    pub h: f64,
    pub measure: f64,
}

impl MeshStats {
    fn of(mesh: &Mesh) -> Self {
        MeshStats {
            dim: mesh.dim(),
            vertices: mesh.num_vertices(),
            cells: mesh.num_cells(),
            h: mesh.h(),
            measure: mesh.measure(),
        }
    }
}

pub fn mesh_gen(args: &MeshGenArgs, exec: Execution) -> Result<(), CliError> {
    let source = MeshSource::from_generator(&args.generator)?
        .ok_or_else(|| CliError::Usage("mesh-gen needs --square or --cube".into()))?;
    let mesh = source.load()?;
    write_text(&args.output, &mesh.to_json()?)?;
    if let Some(path) = &args.vtk {
        let mut out = create(path)?;
        write_vtk(&mut out, &mesh, &[], &[])?;
        flush(out, path)?;
    }
    let audit = acuteness_audit_with(&mesh, args.alpha_exponent, exec);
    println!(
        "wrote {}: dim {}, {} vertices, {} cells, h = {:.6}",
        args.output.display(),
        mesh.dim(),
        mesh.num_vertices(),
        mesh.num_cells(),
        mesh.h()
    );
    println!(
        "angles: min {:.4} deg, max {:.4} deg, {} obtuse, gamma fit {:.4}",
        audit.min_angle.to_degrees(),
        audit.max_angle.to_degrees(),
        audit.obtuse.len(),
        audit.gamma_fit
    );
    println!("audit: {}", audit.classification.as_str());
    Ok(())
}

/// What `solve` writes to `result.json`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveRecord {
    #[serde(flatten)]
    pub summary: SolveSummary,
    pub mesh: MeshStats,
    pub coefficient_check: CoefficientCheck,
}

struct Prepared {
    config: RunConfig,
    mesh: Mesh,
    coeffs: CoefficientSet,
    check: CoefficientCheck,
}

fn prepare(config: RunConfig) -> Result<Prepared, CliError> {
    let mesh = config.mesh.load()?;
    let coeffs = config.problem.build(mesh.dim())?;
    let check = coeffs.spot_check(&mesh, config.samples, config.seed).into_result()?;
    config.prepare_output()?;
    Ok(Prepared { config, mesh, coeffs, check })
}

fn run_solve<'m>(mesh: &'m Mesh, coeffs: &CoefficientSet, opts: &SolveOptions) -> Result<SolveResult<'m>, CliError> {
    let result = picard_solve(mesh, coeffs, opts, None)?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    Ok(result)
}

fn write_solution(p: &Prepared, result: &SolveResult<'_>) -> Result<Vec<PathBuf>, CliError> {
    let dir = &p.config.output;
    let csv = dir.join("solution.csv");
    let mut out = create(&csv)?;
    result.u_h.write_csv(&mut out)?;
    flush(out, &csv)?;

    let vtk = dir.join("solution.vtk");
    let mut out = create(&vtk)?;
    write_vtk(&mut out, &p.mesh, &[("u_h", result.u_h.values())], &[])?;
    flush(out, &vtk)?;

    let json = dir.join("result.json");
    let record =
        SolveRecord { summary: result.summary(), mesh: MeshStats::of(&p.mesh), coefficient_check: p.check.clone() };
    write_text(&json, &to_json(&record)?)?;
    Ok(vec![csv, vtk, json])
}

fn print_solve_summary(result: &SolveResult<'_>) {
    println!(
        "converged: {} Picard iteration(s), last update {:e}, linear residual {:e}, Galerkin residual {:e}",
        result.picard_iterations, result.final_update_norm, result.final_linear_residual, result.galerkin_residual
    );
    println!("u_h range: [{}, {}]", result.u_h.min(), result.u_h.max());
}

fn print_written(paths: &[PathBuf]) {
    let names: Vec<String> = paths.iter().map(|p| p.display().to_string()).collect();
    println!("wrote {}", names.join(", "));
}

pub fn solve(args: &SolveArgs, exec: Execution) -> Result<(), CliError> {
    let config = RunConfig::new(&args.mesh, &args.problem, &args.solver, None, &args.out, exec)?;
    let p = prepare(config)?;
    let result = run_solve(&p.mesh, &p.coeffs, &p.config.solver)?;
    print_solve_summary(&result);
    print_written(&write_solution(&p, &result)?);
    Ok(())
}

/// Certificate sections governed by each `--checks` entry.
fn sections_of(check: &str) -> &'static [&'static str] {
    match check {
        "angles" => &["angles"],
        "element" => &["element_condition"],
        "edge" => &["edge_condition"],
        "assumption" => &["assumption_a"],
        "bounds" => &["sup_uh", "theorem_3_2", "theorem_3_3"],
        "degiorgi" => &["level_sets", "de_giorgi"],
        _ => &[],
    }
}

#[derive(Serialize)]
struct RunRecord<'a> {
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    preset: Option<Preset>,
    problem: &'a ProblemSpec,
    mesh: MeshStats,
    solver: &'a SolveOptions,
    dmp: &'a DmpParams,
    coefficient_check: &'a CoefficientCheck,
}

/// `certificate.json`: the certificate sections at top level plus the run
/// description and the overall status of the requested checks.
#[derive(Serialize)]
struct CertificateFile<'a> {
    run: RunRecord<'a>,
    requested_checks: &'a [String],
    status: &'static str,
    failed_checks: &'a [&'static str],
    #[serde(flatten)]
    certificate: &'a DmpCertificate,
}

fn read_solution<'m>(mesh: &'m Mesh, csv: &Path, json: &Path) -> Result<SolveResult<'m>, CliError> {
    let file = File::open(csv).map_err(|e| CliError::io(csv, e))?;
    let u_h = P1Field::read_csv(mesh, BufReader::new(file))?;
    let text = fs::read_to_string(json).map_err(|e| CliError::io(json, e))?;
    let s: SolveSummary =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", json.display())))?;
    Ok(SolveResult {
        u_h,
        picard_iterations: s.picard_iterations,
        final_update_norm: s.final_update_norm,
        final_linear_residual: s.final_linear_residual,
        galerkin_residual: s.galerkin_residual,
        converged: s.converged,
        update_history: s.update_history,
        warnings: s.warnings,
    })
}

pub fn dmp_check(args: &CheckArgs, exec: Execution) -> Result<(), CliError> {
    let mut checks: Vec<String> = Vec::new();
    for c in &args.checks {
        let c = c.trim().to_string();
        if !ALL_CHECKS.contains(&c.as_str()) {
            return Err(CliError::Usage(format!("unknown check `{c}` (expected one of {})", ALL_CHECKS.join(", "))));
        }
        if !checks.contains(&c) {
            checks.push(c);
        }
    }
    if !args.solve && args.solution.is_none() {
        return Err(CliError::Usage("dmp-check needs --solve or --solution".into()));
    }
    let element_case = args.element_case.as_deref().map(str::parse::<ElementCase>).transpose()?;
    let config = RunConfig::new(&args.mesh, &args.problem, &args.solver, Some(&args.dmp), &args.out, exec)?;
    config.dmp.validate(match config.mesh {
        MeshSource::Cube { .. } => 3,
        _ => 2,
    })?;
    let p = prepare(config)?;
    let mut written = Vec::new();
    let solution = if args.solve {
        let result = run_solve(&p.mesh, &p.coeffs, &p.config.solver)?;
        print_solve_summary(&result);
        written.extend(write_solution(&p, &result)?);
        result
    } else {
        let csv = args.solution.clone().unwrap_or_default();
        let json = args.result.clone().unwrap_or_else(|| csv.with_file_name("result.json"));
        read_solution(&p.mesh, &csv, &json)?
    };

    let rule = match p.config.solver.quadrature_degree {
        Some(d) => QuadratureRule::new(p.mesh.dim(), d)?,
        None => p.coeffs.default_rule(p.mesh.dim())?,
    };
    let wants = |c: &str| checks.iter().any(|x| x == c);
    let options = CertificateOptions {
        element_case,
        element_condition: wants("element"),
        edge_condition: wants("edge"),
        level_sets: true,
        de_giorgi: wants("degiorgi"),
        tau_max: args.tau_max,
        bound_tolerance: args.bound_tolerance,
        execution: exec,
    };
    let cert = dmp_certificate(&p.mesh, &solution, &p.coeffs, &rule, &p.config.dmp, &options)?;

    let requested: Vec<&str> =
        std::iter::once("k_star").chain(checks.iter().flat_map(|c| sections_of(c).iter().copied())).collect();
    let failed: Vec<&'static str> = cert
        .verdicts()
        .into_iter()
        .filter(|(name, v)| *v == Verdict::Fail && requested.contains(name))
        .map(|(name, _)| name)
        .collect();
    let file = CertificateFile {
        run: RunRecord {
            seed: p.config.seed,
            preset: p.config.preset,
            problem: &p.config.problem,
            mesh: MeshStats::of(&p.mesh),
            solver: &p.config.solver,
            dmp: &p.config.dmp,
            coefficient_check: &p.check,
        },
        requested_checks: &checks,
        status: if failed.is_empty() { "pass" } else { "fail" },
        failed_checks: &failed,
        certificate: &cert,
    };
    let cert_path = p.config.output.join("certificate.json");
    write_text(&cert_path, &to_json(&file)?)?;
    written.push(cert_path);
    if let Some(profile) = cert.level_set_profile() {
        let path = p.config.output.join("level_sets.csv");
        let mut out = create(&path)?;
        profile.write_csv(&mut out)?;
        flush(out, &path)?;
        written.push(path);
    }

    println!("k* = {}, sup u_h = {}", cert.k_star(), cert.sup_uh());
    for (name, verdict) in cert.verdicts() {
        let mark = if requested.contains(&name) { "" } else { "  (not requested)" };
        println!("  {name:<18} {}{mark}", verdict.as_str());
    }
    print_written(&written);
    if failed.is_empty() {
        println!("status: pass");
        Ok(())
    } else {
        println!("status: fail ({})", failed.join(", "));
        Err(CliError::CertificateFailed(failed.join(", ")))
    }
}

/// One row of the report table.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub file: String,
    pub h: f64,
    pub max_angle_deg: f64,
    pub k_star: f64,
    pub sup_uh: f64,
    pub assumption_a_min: f64,
    pub empirical_c: Option<f64>,
    pub verdicts: Vec<String>,
}

const REPORT_SECTIONS: [(&str, &str); 8] = [
    ("theorem_3_2", "t3.2"),
    ("theorem_3_3", "t3.3"),
    ("assumption_a", "A"),
    ("element_condition", "elem"),
    ("edge_condition", "edge"),
    ("level_sets", "lvl"),
    ("de_giorgi", "dg"),
    ("angles", "ang"),
];

fn num(v: &Value, path: &[&str]) -> f64 {
    path.iter().try_fold(v, |v, k| v.get(k)).and_then(Value::as_f64).unwrap_or(f64::NAN)
}

impl ReportRow {
    pub fn from_json(file: &str, v: &Value) -> Result<Self, CliError> {
        if !v.is_object() || v.get("k_star").is_none() {
            return Err(CliError::Usage(format!("{file}: not a certificate")));
        }
        let mut h = num(v, &["run", "mesh", "h"]);
        if h.is_nan() {
            h = num(v, &["angles", "h"]);
        }
        let verdicts = REPORT_SECTIONS
            .iter()
            .map(|(key, _)| {
                let verdict = v.get(key).and_then(|s| s.get("verdict")).and_then(Value::as_str).unwrap_or("missing");
                if verdict == "not-applicable" { "n/a" } else { verdict }.to_string()
            })
            .collect();
        Ok(ReportRow {
            file: file.to_string(),
            h,
            max_angle_deg: num(v, &["angles", "max_angle"]).to_degrees(),
            k_star: num(v, &["k_star", "value"]),
            sup_uh: num(v, &["sup_uh", "value"]),
            assumption_a_min: num(v, &["assumption_a", "min_value"]),
            empirical_c: v.get("theorem_3_2").and_then(|t| t.get("empirical_c")).and_then(Value::as_f64),
            verdicts,
        })
    }
}

/// Fixed-column table, one row per certificate.
pub fn format_table(rows: &[ReportRow]) -> String {
    let mut out = format!(
        "{:<28} {:>10} {:>9} {:>12} {:>12} {:>12} {:>11}",
        "certificate", "h", "max_angle", "k*", "sup_u_h", "A_min", "C_ratio"
    );
    for (_, label) in REPORT_SECTIONS {
        out.push_str(&format!(" {label:>5}"));
    }
    out.push('\n');
    for r in rows {
        let c = r.empirical_c.map_or_else(|| "-".to_string(), |c| format!("{c:.4e}"));
        let mut name = r.file.clone();
        if name.chars().count() > 28 {
            let tail: String = name.chars().rev().take(27).collect::<Vec<_>>().into_iter().rev().collect();
            name = format!("…{tail}");
        }
        out.push_str(&format!(
            "{:<28} {:>10.4e} {:>9.3} {:>12.4e} {:>12.4e} {:>12.4e} {:>11}",
            name, r.h, r.max_angle_deg, r.k_star, r.sup_uh, r.assumption_a_min, c
        ));
        for v in &r.verdicts {
            out.push_str(&format!(" {v:>5}"));
        }
        out.push('\n');
    }
    out
}

pub fn format_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from("file,h,max_angle_deg,k_star,sup_uh,assumption_a_min,empirical_c\n");
    for r in rows {
        let c = r.empirical_c.map_or_else(String::new, |c| c.to_string());
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.file, r.h, r.max_angle_deg, r.k_star, r.sup_uh, r.assumption_a_min, c
        ));
    }
    out
}

pub fn report(args: &ReportArgs) -> Result<(), CliError> {
    if args.certificates.is_empty() {
        return Err(CliError::Usage("report needs at least one certificate".into()));
    }
    let mut rows = Vec::with_capacity(args.certificates.len());
    for path in &args.certificates {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let value: Value =
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        rows.push(ReportRow::from_json(&path.display().to_string(), &value)?);
    }
    rows.sort_by(|a, b| a.h.partial_cmp(&b.h).unwrap_or(Ordering::Equal).then_with(|| a.file.cmp(&b.file)));
    print!("{}", format_table(&rows));
    if let Some(path) = &args.csv {
        write_text(path, &format_csv(&rows))?;
    }
    Ok(())
}
