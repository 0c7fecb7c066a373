//! One function per subcommand; each returns the rendered document.

use std::f64::consts::PI;

use halfline_core::boundary::{PairDiagnostics, DEFAULT_CLASS_TOL};
use halfline_core::jost::jost_matrix;
use halfline_core::matkernel::{self, c, lsq_slope, paper_norm, I};
use halfline_core::scattering::{asymptotic_model, s0_reference, s_matrix, s_matrix_sweep};
use halfline_core::spectrum::{find_bound_states, levinson_verify, BoundStateSearch, PhaseGrid, DEFAULT_MU_TOL};
use halfline_core::{BoundaryPair, Error, JostOptions, SpectralPoint};
use serde_json::Value;

use crate::config::ProblemConfig;
use crate::output::{float, floats, matrix, render_json, Csv, Object};
use crate::{error_kind, CliError, EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION};

/// Tolerance on `|identity_residual| / pi` for the Levinson verdict.
pub const LEVINSON_TOL: f64 = 1e-3;

/// Command-line settings that take precedence over the config file.
#[derive(Debug, Clone, Copy)]
pub struct Overrides {
    pub tol_integrator: Option<f64>,
    pub kappa_max: Option<f64>,
    pub k_max: Option<f64>,
    pub strict: bool,
}

impl Default for Overrides {
    fn default() -> Self {
        Self {
            tol_integrator: None,
            kappa_max: None,
            k_max: None,
            strict: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub exit_code: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, exit_code: EXIT_OK }
    }
}

fn jost_options(cfg: &ProblemConfig, ov: &Overrides) -> Result<JostOptions, CliError> {
    match ov.tol_integrator.or(cfg.tolerances.integrator_tol) {
        Some(t) if !(t > 0.0 && t < 1.0) => {
            Err(CliError::Parse(format!("integrator tolerance must lie in (0, 1), got {t}")))
        }
        Some(t) => Ok(JostOptions::with_tol(t)),
        None => Ok(JostOptions::default()),
    }
}

fn search(cfg: &ProblemConfig, ov: &Overrides) -> BoundStateSearch {
    let mut s = BoundStateSearch {
        strict: ov.strict,
        kappa_max: ov.kappa_max,
        ..BoundStateSearch::default()
    };
    if let Some(t) = cfg.tolerances.kernel_tol {
        s.kernel_tol = t;
    }
    if let Some(t) = cfg.tolerances.refine_tol {
        s.refine_tol = t;
    }
    s
}

fn problem(cfg: &ProblemConfig) -> Result<(halfline_core::PotentialModel, BoundaryPair), CliError> {
    let bp = cfg.boundary_pair()?;
    let p = cfg.potential_model()?;
    if p.n() != bp.n() {
        return Err(Error::DimensionMismatch {
            expected: bp.n(),
            actual: p.n(),
        }
        .into());
    }
    Ok((p, bp))
}

fn error_entry(field: &str, e: &Error) -> Value {
    let mut o = Object::new()
        .set("field", field)
        .set("kind", error_kind(e))
        .set("message", e.to_string());
    if let Error::NotSelfadjoint { index, .. } = e {
        o = o.set("index", *index as u64);
    }
    o.into()
}

/// Residuals of the boundary and potential conditions; fails with exit 2.
pub fn validate(cfg: &ProblemConfig) -> Output {
    let mut errors = Vec::new();
    let boundary = match cfg.boundary_matrices() {
        Ok((a, b)) => {
            let mut o = Object::new();
            if a.iter().chain(b.iter()).all(|z| z.re.is_finite() && z.im.is_finite()) {
                let d = PairDiagnostics::compute(&a, &b);
                o = o
                    .f("selfadjointness_residual", d.selfadjointness_residual)
                    .f("selfadjointness_bound", d.selfadjointness_bound)
                    .f("rank_ratio", d.rank_ratio);
            }
            let passed = match BoundaryPair::new(a, b) {
                Ok(_) => true,
                Err(e) => {
                    errors.push(error_entry("boundary", &e));
                    false
                }
            };
            o.set("pass", passed)
        }
        Err(e) => {
            errors.push(Object::new().set("field", "boundary").set("kind", "Parse").set("message", e.to_string()).into());
            Object::new().set("pass", false)
        }
    };
    let potential = match cfg.potential_model() {
        Ok(p) => {
            let d = p.diagnostics();
            Object::new()
                .set("pass", true)
                .f("max_selfadjoint_residual", d.max_selfadjoint_residual)
                .f("l1_norm", d.l1_norm)
                .f("first_moment", d.first_moment)
                .f("support_end", p.support_end())
        }
        Err(CliError::Validation { source, .. }) | Err(CliError::Numerical { source, .. }) => {
            errors.push(error_entry("potential", &source));
            Object::new().set("pass", false)
        }
        Err(e) => {
            errors.push(Object::new().set("field", "potential").set("kind", "Parse").set("message", e.to_string()).into());
            Object::new().set("pass", false)
        }
    };
    let pass = errors.is_empty();
    let doc: Value = Object::new()
        .set("boundary", boundary)
        .set("potential", potential)
        .set("n", cfg.n as u64)
        .set("errors", Value::Array(errors))
        .set("status", if pass { "pass" } else { "fail" })
        .into();
    Output {
        text: render_json(&doc),
        exit_code: if pass { EXIT_OK } else { EXIT_VALIDATION },
    }
}

pub fn canonicalize(cfg: &ProblemConfig, _ov: &Overrides) -> Result<Output, CliError> {
    let bp = cfg.boundary_pair()?;
    let cb = bp.canonicalize_with_tol(cfg.tolerances.class_tol.unwrap_or(DEFAULT_CLASS_TOL))?;
    let doc: Value = Object::new()
        .set("theta", floats(&cb.theta))
        .set("n_M", cb.n_mixed as u64)
        .set("n_D", cb.n_dirichlet as u64)
        .set("n_N", cb.n_neumann as u64)
        .set("M", matrix(&cb.m))
        .set("T1", matrix(&cb.t1))
        .set("T2", matrix(&cb.t2))
        .f("reconstruction_residual", cb.reconstruction_residual(&bp))
        .into();
    Ok(Output::ok(render_json(&doc)))
}

/// `S(k)` on the configured grid. Rows where `S` cannot be formed keep their
/// place with `nan` entries and the error kind in `status`.
pub fn scattering(cfg: &ProblemConfig, ov: &Overrides) -> Result<Output, CliError> {
    let (p, bp) = problem(cfg)?;
    let opts = jost_options(cfg, ov)?;
    let ks = cfg.k_grid()?;
    let n = bp.n();
    let mut header = vec!["k".to_string()];
    for i in 1..=n {
        for j in 1..=n {
            header.push(format!("S_re_{i}_{j}"));
            header.push(format!("S_im_{i}_{j}"));
        }
    }
    header.extend(["unitarity_defect", "det_phase_unwrapped", "status"].map(String::from));
    let mut csv = Csv::new(&header);

    let samples = s_matrix_sweep(&p, &bp, &ks, &opts);
    let mut phase: Option<(f64, f64)> = None;
    for (&k, sample) in ks.iter().zip(samples) {
        let mut row = vec![float(k)];
        match sample {
            Ok(s) => {
                for i in 0..n {
                    for j in 0..n {
                        row.push(float(s.s[(i, j)].re));
                        row.push(float(s.s[(i, j)].im));
                    }
                }
                let arg = matkernel::det(&s.s).arg();
                let unwrapped = match phase {
                    None => arg,
                    Some((prev_arg, prev)) => prev + wrap(arg - prev_arg),
                };
                phase = Some((arg, unwrapped));
                row.push(float(s.unitarity_defect));
                row.push(float(unwrapped));
                row.push("ok".into());
            }
            Err(e) => {
                if !matches!(e, Error::SingularJost { .. } | Error::InvalidArgument(_)) {
                    return Err(e.into());
                }
                row.extend(std::iter::repeat(float(f64::NAN)).take(2 * n * n + 2));
                row.push(error_kind(&e).into());
            }
        }
        csv.row(&row);
    }
    Ok(Output::ok(csv.finish()))
}

/// Maps an angle difference into `(-pi, pi]`.
fn wrap(d: f64) -> f64 {
    let mut d = d % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    } else if d <= -PI {
        d += 2.0 * PI;
    }
    d
}

pub fn boundstates(cfg: &ProblemConfig, ov: &Overrides) -> Result<Output, CliError> {
    let (p, bp) = problem(cfg)?;
    let opts = jost_options(cfg, ov)?;
    let s = search(cfg, ov);
    let kappa_max = match s.kappa_max {
        Some(k) => k,
        None => halfline_core::spectrum::default_kappa_max(&p, &bp)?,
    };
    let found = find_bound_states(&p, &bp, &BoundStateSearch { kappa_max: Some(kappa_max), ..s }, &opts)?;
    let mut states = Vec::with_capacity(found.len());
    for b in &found {
        let j = jost_matrix(&p, &bp, SpectralPoint::imag(b.kappa)?, &opts)?.j;
        states.push(
            Object::new()
                .f("kappa", b.kappa)
                .f("energy", b.energy())
                .set("multiplicity", b.multiplicity as u64)
                .set("winding", b.winding)
                .f("det_residual", matkernel::det(&j).norm())
                .f("uncertainty", b.uncertainty)
                .set("kernel_dim_j", b.kernel_j.dim as u64)
                .set("kernel_dim_jdag", b.kernel_jdag.dim as u64)
                .set("mismatch", b.mismatch)
                .into(),
        );
    }
    let doc: Value = Object::new()
        .set("bound_states", Value::Array(states))
        .set("n_total", found.iter().map(|b| b.multiplicity as u64).sum::<u64>())
        .f("kappa_min", s.kappa_min)
        .f("kappa_max", kappa_max)
        .into();
    Ok(Output::ok(render_json(&doc)))
}

pub fn levinson(cfg: &ProblemConfig, ov: &Overrides) -> Result<Output, CliError> {
    let (p, bp) = problem(cfg)?;
    let opts = jost_options(cfg, ov)?;
    let grid = PhaseGrid {
        k_max: ov.k_max,
        ..PhaseGrid::default()
    };
    let r = levinson_verify(&p, &bp, &grid, &search(cfg, ov), DEFAULT_MU_TOL, &opts)?;
    let residual_over_pi = r.identity_residual / PI;
    let pass = residual_over_pi.abs() <= LEVINSON_TOL;
    let states: Vec<Value> = r
        .bound_states
        .iter()
        .map(|b| {
            Object::new()
                .f("kappa", b.kappa)
                .set("multiplicity", b.multiplicity as u64)
                .set("winding", b.winding)
                .into()
        })
        .collect();
    let predicted = 2 * r.n_total as i64 + r.mu as i64 - r.n_mixed as i64 - r.n_neumann as i64;
    let doc: Value = Object::new()
        .set("bound_states", Value::Array(states))
        .set("n_total", r.n_total as u64)
        .set("mu", r.mu as u64)
        .set("n_M", r.n_mixed as u64)
        .set("n_D", r.n_dirichlet as u64)
        .set("n_N", r.n_neumann as u64)
        .f("phase_at_zero", r.phase_at_zero)
        .f("phase_at_infinity", r.phase_at_infinity)
        .f("phase_difference_over_pi", (r.phase_at_zero - r.phase_at_infinity) / PI)
        .set("predicted_integer", predicted)
        .f("identity_residual", r.identity_residual)
        .f("identity_residual_over_pi", residual_over_pi)
        .f("tolerance", LEVINSON_TOL)
        .set("verdict", if pass { "pass" } else { "fail" })
        .f("k_max", r.k_max)
        .set("s_zero", matrix(&r.s_zero))
        .set(
            "trace",
            Object::new().set("k", floats(&r.trace.ks)).set("phase", floats(&r.trace.phase)),
        )
        .into();
    Ok(Output {
        text: render_json(&doc),
        exit_code: if pass || !ov.strict { EXIT_OK } else { EXIT_NUMERICAL },
    })
}

/// Residuals of the high-energy models at `k = 2^4, 2^5, ...`, followed by
/// a `slope` row holding the fitted decay orders.
pub fn asymptotics(cfg: &ProblemConfig, ov: &Overrides) -> Result<Output, CliError> {
    let (p, bp) = problem(cfg)?;
    let opts = jost_options(cfg, ov)?;
    let k_top = ov.k_max.unwrap_or(256.0);
    if !(k_top >= 32.0) {
        return Err(Error::InvalidArgument(format!("--k-max must be at least 32 here, got {k_top}")).into());
    }
    let ks: Vec<f64> = (4..).map(|j| 2f64.powi(j)).take_while(|&k| k <= k_top).collect();
    let model = asymptotic_model(&p, &bp)?;
    let header = [
        "k",
        "s_first_order_residual",
        "s_residual",
        "j_first_order_residual",
        "j_residual",
    ]
    .map(String::from);
    let mut csv = Csv::new(&header);
    let mut cols: [Vec<f64>; 4] = Default::default();
    let id = matkernel::identity(bp.n());
    for &k in &ks {
        let s = s_matrix(&p, &bp, k, &opts)?.s;
        let first = paper_norm(&(&s - &model.s_inf));
        let second = paper_norm(&(&s - model.s_model(k)?));
        let kc = c(k, 0.0);
        let j = jost_matrix(&p, &bp, SpectralPoint::real(k)?, &opts)?.j;
        let j0_inv = s0_reference(&bp, kc)?.j0_inv;
        let j_first = paper_norm(&(&j * &j0_inv - &id));
        // J J0^{-1} = I - [Q1 + Q2(k) S(inf)] / (ik) + O(1/k^2)
        let corr = (&model.moments.q1 + model.moments.q2(kc)? * &model.s_inf) / (I * k);
        let j_second = paper_norm(&(&j * &j0_inv - &id + corr));
        for (col, v) in cols.iter_mut().zip([first, second, j_first, j_second]) {
            col.push(v);
        }
        csv.row(&[float(k), float(first), float(second), float(j_first), float(j_second)]);
    }
    let logk: Vec<f64> = ks.iter().map(|k| k.ln()).collect();
    let mut slope_row = vec!["slope".to_string()];
    for col in &cols {
        let order = if col.iter().all(|&v| v > 0.0) {
            -lsq_slope(&logk, &col.iter().map(|v| v.ln()).collect::<Vec<_>>())
        } else {
            f64::NAN
        };
        slope_row.push(float(order));
    }
    csv.row(&slope_row);
    Ok(Output::ok(csv.finish()))
}
