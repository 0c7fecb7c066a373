//! Bound states, zero-energy degeneracy and Levinson's theorem.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::boundary::{BoundaryPair, CanonicalBoundary, DEFAULT_CLASS_TOL};
use crate::error::{Error, Result};
use crate::jost::{jost_matrix, regular_solution, JostOptions, SpectralPoint};
use crate::matkernel::{
    self, c, kernel, lsq_slope, paper_norm, singular_values, unitary_eig_with_tol, ComplexMatrix,
    KernelBasis, I,
};
use crate::potential::PotentialModel;
use crate::scattering::{s_at_zero, s_matrix};

pub const DEFAULT_KAPPA_MIN: f64 = 1e-4;
pub const DEFAULT_GRID_POINTS: usize = 400;
pub const DEFAULT_REFINE_TOL: f64 = 1e-12;
pub const DEFAULT_BOUND_KERNEL_TOL: f64 = 1e-7;
pub const DEFAULT_MU_TOL: f64 = 1e-3;
pub const SMALL_K_NODES: [f64; 4] = [1e-2, 5e-3, 2.5e-3, 1.25e-3];
const WINDING_START_SAMPLES: usize = 64;
const WINDING_MAX_DOUBLINGS: u32 = 8;
const PHASE_SAMPLE_CAP: usize = 1 << 20;

/// `det J(i kappa)`.
pub fn detj_imag_axis(
    p: &PotentialModel,
    bp: &BoundaryPair,
    kappa: f64,
    opts: &JostOptions,
) -> Result<Complex64> {
    if !(kappa > 0.0) {
        return Err(Error::InvalidArgument(format!("kappa must be positive, got {kappa}")));
    }
    Ok(matkernel::det(&jost_matrix(p, bp, SpectralPoint::imag(kappa)?, opts)?.j))
}

fn jost_at(p: &PotentialModel, bp: &BoundaryPair, k: Complex64, opts: &JostOptions) -> Result<ComplexMatrix> {
    Ok(jost_matrix(p, bp, SpectralPoint::new(k)?, opts)?.j)
}

/// Winding number of `det J` around the circle `|k - i center| = radius`.
pub fn winding_number(
    p: &PotentialModel,
    bp: &BoundaryPair,
    center_kappa: f64,
    radius: f64,
    samples: usize,
    opts: &JostOptions,
) -> Result<i64> {
    if !(radius > 0.0) || !(center_kappa - radius >= 0.0) {
        return Err(Error::InvalidArgument(
            "winding circle must lie in the closed upper half plane".into(),
        ));
    }
    let point = |t: f64| I * center_kappa + Complex64::from_polar(radius, t);
    let eval = |ts: Vec<f64>| -> Result<Vec<Complex64>> {
        ts.into_par_iter()
            .map(|t| Ok(matkernel::det(&jost_at(p, bp, point(t), opts)?)))
            .collect()
    };
    let mut count = samples.max(4);
    let mut values = eval((0..count).map(|j| 2.0 * PI * j as f64 / count as f64).collect())?;
    for doubling in 0..=WINDING_MAX_DOUBLINGS {
        if values.iter().any(|v| v.norm() == 0.0) {
            return Err(Error::PhaseStepTooLarge { doublings: doubling });
        }
        let steps: Vec<f64> = (0..count)
            .map(|j| (values[(j + 1) % count] / values[j]).arg())
            .collect();
        if steps.iter().all(|s| s.abs() < FRAC_PI_2) {
            let total: f64 = steps.iter().sum();
            return Ok((total / (2.0 * PI)).round() as i64);
        }
        if doubling == WINDING_MAX_DOUBLINGS {
            return Err(Error::PhaseStepTooLarge { doublings: doubling });
        }
        let mids = eval(
            (0..count)
                .map(|j| 2.0 * PI * (j as f64 + 0.5) / count as f64)
                .collect(),
        )?;
        values = values
            .into_iter()
            .zip(mids)
            .flat_map(|(a, b)| [a, b])
            .collect();
        count *= 2;
    }
    unreachable!()
}

#[derive(Debug, Clone, Copy)]
pub struct BoundStateSearch {
    pub kappa_min: f64,
    /// `None` selects `1 + int ||V|| + max |cot theta|` over mixed channels.
    pub kappa_max: Option<f64>,
    pub grid_points: usize,
    pub refine_tol: f64,
    pub kernel_tol: f64,
    /// Fail on kernel/winding disagreement instead of flagging it.
    pub strict: bool,
    /// Cross-check the scan with winding numbers on circles tiling the range.
    pub audit: bool,
}

impl Default for BoundStateSearch {
    fn default() -> Self {
        Self {
            kappa_min: DEFAULT_KAPPA_MIN,
            kappa_max: None,
            grid_points: DEFAULT_GRID_POINTS,
            refine_tol: DEFAULT_REFINE_TOL,
            kernel_tol: DEFAULT_BOUND_KERNEL_TOL,
            strict: false,
            audit: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoundState {
    pub kappa: f64,
    pub multiplicity: usize,
    pub kernel_j: KernelBasis,
    pub kernel_jdag: KernelBasis,
    pub winding: i64,
    /// Width of the final bracket around `kappa`.
    pub uncertainty: f64,
    /// Set when the kernel dimensions disagree with the winding number.
    pub mismatch: bool,
}

impl BoundState {
    pub fn energy(&self) -> f64 {
        -self.kappa * self.kappa
    }
}

pub fn default_kappa_max(p: &PotentialModel, bp: &BoundaryPair) -> Result<f64> {
    let cb = bp.canonicalize_with_tol(DEFAULT_CLASS_TOL)?;
    Ok(1.0 + p.l1_norm() + cb.mixed_cot_max())
}

fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let count = count.max(2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|j| (a + (b - a) * j as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Golden-section minimization of `f` on `[a, b]`.
fn golden<F: Fn(f64) -> Result<f64>>(f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2)?;
        }
    }
    let x = if f1 <= f2 { x1 } else { x2 };
    Ok((x, b - a))
}

/// Zeros of `det J(i kappa)` with their multiplicities.
pub fn find_bound_states(
    p: &PotentialModel,
    bp: &BoundaryPair,
    search: &BoundStateSearch,
    opts: &JostOptions,
) -> Result<Vec<BoundState>> {
    let kappa_max = match search.kappa_max {
        Some(k) => k,
        None => default_kappa_max(p, bp)?,
    };
    if !(search.kappa_min > 0.0 && search.kappa_min < kappa_max) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < kappa_min < kappa_max, got {} and {}",
            search.kappa_min, kappa_max
        )));
    }
    let mut found = scan(p, bp, search.kappa_min, kappa_max, search, opts)?;
    if search.audit {
        audit(p, bp, search.kappa_min, kappa_max, &mut found, search, opts, 0)?;
    }
    found.sort_by(|a, b| a.kappa.total_cmp(&b.kappa));
    for bs in &found {
        if bs.mismatch && search.strict {
            return Err(Error::MultiplicityMismatch {
                kappa: bs.kappa,
                kernel_dim: bs.kernel_j.dim,
                winding: bs.winding,
            });
        }
    }
    Ok(found)
}

fn same_zero(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6 * a.max(1.0)
}

/// Grid scan of `|det J(i kappa)|` on `[lo, hi]` followed by refinement of
/// every interior local minimum.
fn scan(
    p: &PotentialModel,
    bp: &BoundaryPair,
    lo: f64,
    hi: f64,
    search: &BoundStateSearch,
    opts: &JostOptions,
) -> Result<Vec<BoundState>> {
    let grid = log_grid(lo, hi, search.grid_points);
    let dets: Vec<f64> = grid
        .par_iter()
        .map(|&kappa| Ok(detj_imag_axis(p, bp, kappa, opts)?.norm()))
        .collect::<Result<_>>()?;

    let candidates: Vec<usize> = (1..grid.len() - 1)
        .filter(|&i| dets[i] <= dets[i - 1] && dets[i] <= dets[i + 1])
        .collect();

    let refined: Vec<Option<BoundState>> = candidates
        .par_iter()
        .map(|&i| refine_candidate(p, bp, &grid, i, search, opts))
        .collect::<Result<_>>()?;

    let mut found: Vec<BoundState> = Vec::new();
    for bs in refined.into_iter().flatten() {
        // neighbouring minima can refine onto the same zero
        if found.iter().any(|f| same_zero(f.kappa, bs.kappa)) {
            continue;
        }
        found.push(bs);
    }
    Ok(found)
}

const AUDIT_MAX_DEPTH: u32 = 6;

/// Moves a tiling edge off any known zero so the audit circles stay clear.
fn clear_edge(mut x: f64, found: &[BoundState]) -> f64 {
    while found.iter().any(|b| (b.kappa - x).abs() < 0.02 * x) {
        x *= 1.03;
    }
    x
}

/// Counts zeros with the argument principle on circles tiling the search
/// range and rescans any piece whose count exceeds what the scan found.
#[allow(clippy::too_many_arguments)]
fn audit(
    p: &PotentialModel,
    bp: &BoundaryPair,
    lo: f64,
    hi: f64,
    found: &mut Vec<BoundState>,
    search: &BoundStateSearch,
    opts: &JostOptions,
    depth: u32,
) -> Result<()> {
    let mut edges = vec![lo];
    loop {
        let last = *edges.last().unwrap();
        if last >= hi {
            break;
        }
        edges.push(clear_edge((2.0 * last).min(hi), found).min(hi));
    }
    let pieces: Vec<(f64, f64)> = edges.windows(2).map(|w| (w[0], w[1])).collect();
    let counts: Vec<i64> = pieces
        .par_iter()
        .map(|&(a, b)| winding_number(p, bp, 0.5 * (a + b), 0.5 * (b - a), WINDING_START_SAMPLES, opts))
        .collect::<Result<_>>()?;
    for (&(a, b), &count) in pieces.iter().zip(&counts) {
        let known: i64 = found
            .iter()
            .filter(|f| f.kappa > a && f.kappa < b)
            .map(|f| f.multiplicity as i64)
            .sum();
        if count <= known {
            continue;
        }
        let dense = BoundStateSearch {
            grid_points: search.grid_points.max(100),
            ..*search
        };
        for bs in scan(p, bp, a, b, &dense, opts)? {
            if !found.iter().any(|f| same_zero(f.kappa, bs.kappa)) {
                found.push(bs);
            }
        }
        let known: i64 = found
            .iter()
            .filter(|f| f.kappa > a && f.kappa < b)
            .map(|f| f.multiplicity as i64)
            .sum();
        if count > known && depth < AUDIT_MAX_DEPTH {
            let mut mid = clear_edge((a * b).sqrt(), found);
            if mid >= b {
                mid = (a * b).sqrt();
            }
            audit(p, bp, a, mid, found, search, opts, depth + 1)?;
            audit(p, bp, mid, b, found, search, opts, depth + 1)?;
        }
    }
    Ok(())
}

fn refine_candidate(
    p: &PotentialModel,
    bp: &BoundaryPair,
    grid: &[f64],
    i: usize,
    search: &BoundStateSearch,
    opts: &JostOptions,
) -> Result<Option<BoundState>> {
    let (lo, hi) = (grid[i - 1], grid[i + 1]);
    let det_abs = |kappa: f64| Ok(detj_imag_axis(p, bp, kappa, opts)?.norm());
    let (mut kappa, mut width) = golden(det_abs, lo, hi, search.refine_tol)?;

    let spacing = grid[i + 1] - grid[i];
    let radius = (0.25 * spacing).min(0.5 * kappa);
    let winding = winding_number(p, bp, kappa, radius, WINDING_START_SAMPLES, opts)?;
    if winding < 1 {
        return Ok(None);
    }
    let m = winding as usize;

    if m >= 2 && m <= p.n() {
        // a semisimple zero makes the m-th smallest singular value vanish linearly
        let sigma_m = |k: f64| -> Result<f64> {
            let s = singular_values(&jost_at(p, bp, c(0.0, k), opts)?);
            Ok(s[s.len() - m])
        };
        let half = (1e3 * width).max(1e-6 * kappa).min(0.5 * radius);
        let (k2, w2) = golden(sigma_m, kappa - half, kappa + half, search.refine_tol)?;
        kappa = k2;
        width = w2;
    }

    let j = jost_at(p, bp, c(0.0, kappa), opts)?;
    // at a zero sigma_max itself can be tiny, so measure against the free scale
    let sigma_max = singular_values(&j)[0];
    let scale = sigma_max.max(paper_norm(bp.b()) + kappa * paper_norm(bp.a()));
    let rel = if sigma_max > 0.0 {
        search.kernel_tol * scale / sigma_max
    } else {
        search.kernel_tol
    };
    let kernel_j = kernel(&j, rel);
    let kernel_jdag = kernel(&j.adjoint(), rel);
    let mismatch = kernel_j.dim != m || kernel_jdag.dim != m;
    Ok(Some(BoundState {
        kappa,
        multiplicity: m,
        kernel_j,
        kernel_jdag,
        winding,
        uncertainty: width,
        mismatch,
    }))
}

/// Number of eigenvalues of `S(0)` at `+1`; the rest must sit at `-1`.
pub fn mu_from_s(s0: &ComplexMatrix, tol: f64) -> Result<usize> {
    let eig = unitary_eig_with_tol(s0, tol.max(1e-5))?;
    let mut mu = 0;
    for z in eig.eigenvalues {
        if (z - 1.0).norm() <= tol {
            mu += 1;
        } else if (z + 1.0).norm() > tol {
            return Err(Error::EigenvalueNotPlusMinusOne { re: z.re, im: z.im });
        }
    }
    Ok(mu)
}

pub fn mu_from_s_zero(p: &PotentialModel, bp: &BoundaryPair, tol: f64, opts: &JostOptions) -> Result<usize> {
    mu_from_s(&s_at_zero(p, bp, opts)?, tol)
}

/// Least-squares slope of `log |det J(k)|` against `log k` on the nodes `ks`.
pub fn detj_order(p: &PotentialModel, bp: &BoundaryPair, ks: &[f64], opts: &JostOptions) -> Result<f64> {
    let ys: Vec<f64> = ks
        .par_iter()
        .map(|&k| {
            let j = jost_matrix(p, bp, SpectralPoint::real(k)?, opts)?.j;
            Ok(matkernel::det(&j).norm().ln())
        })
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = ks.iter().map(|k| k.ln()).collect();
    Ok(lsq_slope(&xs, &ys))
}

/// Small-`k` order of `det J`, which should equal `mu`.
pub fn detj_smallk_order(p: &PotentialModel, bp: &BoundaryPair, opts: &JostOptions) -> Result<f64> {
    detj_order(p, bp, &SMALL_K_NODES, opts)
}

/// Both sides of `i beta^dagger J'(i kappa) alpha = 2 kappa int |phi alpha|^2`.
#[derive(Debug, Clone, Copy)]
pub struct DerivativeIdentity {
    pub lhs: Complex64,
    pub rhs: f64,
    pub discrepancy: f64,
    pub match_residual: f64,
}

pub fn derivative_identity_check(
    p: &PotentialModel,
    bp: &BoundaryPair,
    bs: &BoundState,
    h: f64,
    opts: &JostOptions,
) -> Result<DerivativeIdentity> {
    let alpha = bs
        .kernel_j
        .basis
        .first()
        .ok_or_else(|| Error::InvalidArgument("bound state has an empty kernel".into()))?;
    derivative_identity_for(p, bp, bs.kappa, alpha, h, opts)
}

/// The identity for an explicit kernel vector `alpha` of `J(i kappa)`.
pub fn derivative_identity_for(
    p: &PotentialModel,
    bp: &BoundaryPair,
    kappa: f64,
    alpha: &matkernel::ComplexVector,
    h: f64,
    opts: &JostOptions,
) -> Result<DerivativeIdentity> {
    if !(h > 0.0 && h < kappa) {
        return Err(Error::InvalidArgument("need 0 < h < kappa".into()));
    }
    let jp = jost_at(p, bp, c(0.0, kappa + h), opts)?;
    let jm = jost_at(p, bp, c(0.0, kappa - h), opts)?;
    let jdot = (jp - jm) / (2.0 * I * h);

    let x_end = p.support_end();
    let xs: Vec<f64> = if x_end > 0.0 { vec![0.0, x_end] } else { vec![0.0] };
    let trace = regular_solution(p, bp, c(0.0, kappa), &xs, opts.tol.min(1e-11))?;
    let last = xs.len() - 1;
    let phi_a = &trace.phi[last] * alpha;
    let phip_a = &trace.phip[last] * alpha;
    // beyond the support phi alpha = f(i kappa, x) beta = exp(-kappa x) beta
    let beta = &phi_a * c((kappa * x_end).exp(), 0.0);
    let scale = phi_a.norm() * kappa + phip_a.norm();
    let match_residual = (&phip_a + &phi_a * c(kappa, 0.0)).norm() / scale.max(f64::MIN_POSITIVE);
    if match_residual > 1e-6 {
        return Err(Error::BetaMatchFailure {
            residual: match_residual,
        });
    }
    let inside = (alpha.adjoint() * &trace.gram[last] * alpha)[(0, 0)].re;
    let tail = phi_a.norm_squared() / (2.0 * kappa);
    let rhs = 2.0 * kappa * (inside + tail);
    let lhs = I * (beta.adjoint() * jdot * alpha)[(0, 0)];
    Ok(DerivativeIdentity {
        lhs,
        rhs,
        discrepancy: (lhs - rhs).norm() / rhs.abs(),
        match_residual,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct PhaseGrid {
    pub k_min: f64,
    /// `None` doubles from 8 until `||S(k) - S(inf)|| <= 0.05`.
    pub k_max: Option<f64>,
    pub initial_points: usize,
}

impl Default for PhaseGrid {
    fn default() -> Self {
        Self {
            k_min: 1e-3,
            k_max: None,
            initial_points: 200,
        }
    }
}

/// Continuously unwrapped `arg det S(k)` on an adaptively refined grid.
#[derive(Debug, Clone)]
pub struct PhaseTrace {
    pub ks: Vec<f64>,
    pub phase: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct LevinsonReport {
    pub bound_states: Vec<BoundState>,
    pub n_total: usize,
    pub mu: usize,
    pub n_mixed: usize,
    pub n_dirichlet: usize,
    pub n_neumann: usize,
    pub phase_at_zero: f64,
    pub phase_at_infinity: f64,
    pub identity_residual: f64,
    pub k_max: f64,
    pub s_zero: ComplexMatrix,
    pub trace: PhaseTrace,
}

impl LevinsonReport {
    /// `pi (2N + mu - n_M - n_N)`.
    pub fn predicted_difference(&self) -> f64 {
        PI * (2.0 * self.n_total as f64 + self.mu as f64
            - self.n_mixed as f64
            - self.n_neumann as f64)
    }
}

const TAIL_SETTLED: f64 = 0.05;
const TAIL_MAX_K: f64 = 65536.0;

fn settle_k_max(
    p: &PotentialModel,
    bp: &BoundaryPair,
    s_inf: &ComplexMatrix,
    opts: &JostOptions,
) -> Result<f64> {
    let mut k = 8.0;
    loop {
        let s = s_matrix(p, bp, k, opts)?.s;
        if paper_norm(&(s - s_inf)) <= TAIL_SETTLED {
            return Ok(k);
        }
        k *= 2.0;
        if k > TAIL_MAX_K {
            return Err(Error::UnsettledTail { k_max: k / 2.0 });
        }
    }
}

/// `arg det S` unwrapped from `k_max` down to `k_min`, anchored at `anchor`
/// at the top end.
pub fn phase_trace(
    p: &PotentialModel,
    bp: &BoundaryPair,
    k_min: f64,
    k_max: f64,
    initial_points: usize,
    anchor: f64,
    opts: &JostOptions,
) -> Result<PhaseTrace> {
    let det_s = |k: f64| -> Result<Complex64> {
        let d = matkernel::det(&s_matrix(p, bp, k, opts)?.s);
        Ok(d / d.norm())
    };
    let mut ks = log_grid(k_min, k_max, initial_points);
    let mut vals: Vec<Complex64> = ks.par_iter().map(|&k| det_s(k)).collect::<Result<_>>()?;
    let mut rounds = 0u32;
    loop {
        let bad: Vec<usize> = (0..ks.len() - 1)
            .filter(|&j| (vals[j + 1] / vals[j]).arg().abs() >= FRAC_PI_4)
            .collect();
        if bad.is_empty() {
            break;
        }
        if ks.len() + bad.len() > PHASE_SAMPLE_CAP {
            return Err(Error::PhaseStepTooLarge { doublings: rounds });
        }
        let mids: Vec<f64> = bad.iter().map(|&j| (ks[j] * ks[j + 1]).sqrt()).collect();
        let mid_vals: Vec<Complex64> = mids.par_iter().map(|&k| det_s(k)).collect::<Result<_>>()?;
        let mut new_ks = Vec::with_capacity(ks.len() + mids.len());
        let mut new_vals = Vec::with_capacity(ks.len() + mids.len());
        let mut b = 0;
        for j in 0..ks.len() {
            new_ks.push(ks[j]);
            new_vals.push(vals[j]);
            if b < bad.len() && bad[b] == j {
                new_ks.push(mids[b]);
                new_vals.push(mid_vals[b]);
                b += 1;
            }
        }
        ks = new_ks;
        vals = new_vals;
        rounds += 1;
    }
    let top = ks.len() - 1;
    let mut phase = vec![0.0; ks.len()];
    phase[top] = anchor + (vals[top] / Complex64::from_polar(1.0, anchor)).arg();
    for j in (0..top).rev() {
        phase[j] = phase[j + 1] + (vals[j] / vals[j + 1]).arg();
    }
    Ok(PhaseTrace { ks, phase })
}

/// Checks `arg det S(0+) - arg det S(inf) = pi (2N + mu - n_M - n_N)`.
pub fn levinson_verify(
    p: &PotentialModel,
    bp: &BoundaryPair,
    grid: &PhaseGrid,
    search: &BoundStateSearch,
    mu_tol: f64,
    opts: &JostOptions,
) -> Result<LevinsonReport> {
    let cb: CanonicalBoundary = bp.canonicalize_with_tol(DEFAULT_CLASS_TOL)?;
    let s_inf = cb.s_infinity();
    let sweep = JostOptions::fast(opts.tol);
    let k_max = match grid.k_max {
        Some(k) => k,
        None => settle_k_max(p, bp, &s_inf, &sweep)?,
    };
    if !(grid.k_min > 0.0 && grid.k_min < k_max) {
        return Err(Error::InvalidArgument("need 0 < k_min < k_max".into()));
    }
    let phase_at_infinity = if cb.n_dirichlet % 2 == 1 { PI } else { 0.0 };
    let trace = phase_trace(p, bp, grid.k_min, k_max, grid.initial_points, phase_at_infinity, &sweep)?;

    let s_zero = s_at_zero(p, bp, opts)?;
    let det0 = matkernel::det(&s_zero);
    let low = Complex64::from_polar(1.0, trace.phase[0]);
    let phase_at_zero = trace.phase[0] + (det0 / low).arg();
    let mu = mu_from_s(&s_zero, mu_tol)?;

    let bound_states = find_bound_states(p, bp, search, opts)?;
    let n_total = bound_states.iter().map(|b| b.multiplicity).sum();
    let mut report = LevinsonReport {
        bound_states,
        n_total,
        mu,
        n_mixed: cb.n_mixed,
        n_dirichlet: cb.n_dirichlet,
        n_neumann: cb.n_neumann,
        phase_at_zero,
        phase_at_infinity,
        identity_residual: 0.0,
        k_max,
        s_zero,
        trace,
    };
    report.identity_residual = phase_at_zero - phase_at_infinity - report.predicted_difference();
    Ok(report)
}

/// `delta_S(0+)` with `det S = exp(2 i delta_S)` and `delta_S(inf) = 0`.
pub fn levinson_dirichlet_convention(report: &LevinsonReport) -> Result<f64> {
    if report.n_mixed + report.n_neumann > 0 {
        return Err(Error::NotDirichlet);
    }
    Ok(0.5 * (report.phase_at_zero - report.phase_at_infinity))
}
