//! Jost solution, regular solution and Jost matrix.
//!
//! The Jost solution is integrated in the factored form
//! `m(k, x) = exp(-ikx) f(k, x)`, which solves `m'' = -2ik m' + V m` with
//! `m = I`, `m' = 0` at the end of the support. Backward integration is
//! stable on the whole closed upper half plane.

use std::cell::Cell;

use num_complex::Complex64;

use crate::boundary::BoundaryPair;
use crate::error::{Error, Result};
use crate::matkernel::{self, c, inverse, paper_norm, ComplexMatrix, I};
use crate::ode::{Dop853, OdeConfig};
use crate::potential::PotentialModel;

pub const DEFAULT_TOL: f64 = 1e-10;

/// A point of the closed upper half plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint(Complex64);

impl SpectralPoint {
    pub fn new(k: Complex64) -> Result<Self> {
        if !k.re.is_finite() || !k.im.is_finite() {
            return Err(Error::InvalidArgument("non-finite spectral point".into()));
        }
        if k.im < -1e-14 {
            return Err(Error::LowerHalfPlane { re: k.re, im: k.im });
        }
        Ok(Self(c(k.re, k.im.max(0.0))))
    }

    pub fn real(k: f64) -> Result<Self> {
        Self::new(c(k, 0.0))
    }

    pub fn imag(kappa: f64) -> Result<Self> {
        Self::new(c(0.0, kappa))
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }

    /// `-k*`, the point whose Jost data enter `J(k)`.
    pub fn reflected(&self) -> Self {
        Self(c(-self.0.re, self.0.im))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct JostOptions {
    pub tol: f64,
    /// Repeat the integration at a tighter tolerance and report the
    /// difference as the error estimate.
    pub estimate_error: bool,
}

impl Default for JostOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            estimate_error: true,
        }
    }
}

impl JostOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    pub fn fast(tol: f64) -> Self {
        Self {
            tol,
            estimate_error: false,
        }
    }

    fn configs(&self) -> Result<(OdeConfig, OdeConfig)> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        let coarse = OdeConfig::with_rtol(self.tol);
        let fine = OdeConfig::with_rtol((self.tol * 1e-2).max(1e-14));
        Ok((coarse, fine))
    }
}

/// `f(k, 0)` and `f'(k, 0)`.
#[derive(Debug, Clone)]
pub struct JostOrigin {
    pub k: SpectralPoint,
    pub f0: ComplexMatrix,
    pub fp0: ComplexMatrix,
    pub err_est: f64,
}

/// `J(k) = f(-k*, 0)^dagger B - f'(-k*, 0)^dagger A`.
/// `f0`, `fp0` hold the Jost data at `-k*` that were used to build `j`.
#[derive(Debug, Clone)]
pub struct JostEvaluation {
    pub k: SpectralPoint,
    pub f0: ComplexMatrix,
    pub fp0: ComplexMatrix,
    pub j: ComplexMatrix,
    pub err_est: f64,
}

#[derive(Debug, Clone)]
pub struct RegularSolutionTrace {
    pub k: Complex64,
    pub xs: Vec<f64>,
    pub phi: Vec<ComplexMatrix>,
    pub phip: Vec<ComplexMatrix>,
    /// `int_0^x phi^dagger phi`.
    pub gram: Vec<ComplexMatrix>,
}

/// `[F; G] = F G' - F' G`.
pub fn wronskian(
    f: &ComplexMatrix,
    fp: &ComplexMatrix,
    g: &ComplexMatrix,
    gp: &ComplexMatrix,
) -> ComplexMatrix {
    f * gp - fp * g
}

/// Potential data flattened row-major, for use inside the right-hand sides.
struct Flat {
    n: usize,
    breakpoints: Vec<f64>,
    left: Vec<Vec<Complex64>>,
    slope: Vec<Option<Vec<Complex64>>>,
    start: Vec<f64>,
}

impl Flat {
    fn new(p: &PotentialModel) -> Self {
        let n = p.n();
        let flatten = |m: &ComplexMatrix| {
            let mut v = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    v.push(m[(i, j)]);
                }
            }
            v
        };
        let mut left = Vec::new();
        let mut slope = Vec::new();
        let mut start = Vec::new();
        for s in p.segments() {
            left.push(flatten(&s.left));
            start.push(s.start);
            slope.push(if s.is_constant() {
                None
            } else {
                Some(flatten(&((&s.right - &s.left) * c(1.0 / s.width(), 0.0))))
            });
        }
        Self {
            n,
            breakpoints: p.breakpoints().to_vec(),
            left,
            slope,
            start,
        }
    }

    fn support_end(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    fn segment_of(&self, a: f64, b: f64) -> Option<usize> {
        let mid = 0.5 * (a + b);
        if self.left.is_empty() || mid >= self.support_end() {
            return None;
        }
        Some(self.breakpoints.partition_point(|&x| x <= mid) - 1)
    }

    /// `out += V(x) * y` for `n x n` row-major blocks, `V` taken from segment `j`.
    fn apply(&self, j: Option<usize>, x: f64, y: &[Complex64], out: &mut [Complex64]) {
        let Some(j) = j else { return };
        let n = self.n;
        let left = &self.left[j];
        let t = x - self.start[j];
        for i in 0..n {
            for l in 0..n {
                let mut v = left[i * n + l];
                if let Some(s) = &self.slope[j] {
                    v += s[i * n + l] * t;
                }
                if v == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for col in 0..n {
                    out[i * n + col] += v * y[l * n + col];
                }
            }
        }
    }
}

fn to_matrix(n: usize, v: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_row_slice(n, n, v)
}

fn knot_list(flat: &Flat, from: f64, to: f64, outputs: &[f64]) -> Vec<f64> {
    let (lo, hi) = if from < to { (from, to) } else { (to, from) };
    let mut knots: Vec<f64> = flat
        .breakpoints
        .iter()
        .chain(outputs.iter())
        .copied()
        .filter(|&x| x > lo && x < hi)
        .collect();
    knots.push(from);
    knots.push(to);
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    if from > to {
        knots.reverse();
    }
    knots
}

fn lookup(knots: &[f64], states: &[Vec<Complex64>], x: f64) -> Vec<Complex64> {
    let idx = knots
        .iter()
        .position(|&k| k == x)
        .expect("output point is a knot");
    states[idx].clone()
}

/// Integrates `(m, m')` backward from the end of the support and returns it
/// at each of the `xs` (all within `[0, support_end]`).
fn integrate_m(
    flat: &Flat,
    k: Complex64,
    xs: &[f64],
    cfg: OdeConfig,
) -> Result<Vec<(ComplexMatrix, ComplexMatrix)>> {
    let n = flat.n;
    let nn = n * n;
    let end = flat.support_end();
    let lowest = xs.iter().copied().fold(end, f64::min);
    let knots = knot_list(flat, end, lowest, xs);
    let mut y = vec![c(0.0, 0.0); 2 * nn];
    for i in 0..n {
        y[i * n + i] = c(1.0, 0.0);
    }
    let seg = Cell::new(None);
    let two_ik = 2.0 * I * k;
    let rhs = |x: f64, y: &[Complex64], dy: &mut [Complex64]| {
        let (m, mp) = y.split_at(nn);
        let (dm, dmp) = dy.split_at_mut(nn);
        dm.copy_from_slice(mp);
        for (d, v) in dmp.iter_mut().zip(mp) {
            *d = -two_ik * v;
        }
        flat.apply(seg.get(), x, m, dmp);
    };
    let mut solver = Dop853::new(rhs, 2 * nn, cfg);
    let mut states = vec![y.clone()];
    for w in knots.windows(2) {
        seg.set(flat.segment_of(w[0], w[1]));
        solver.advance(w[0], w[1], &mut y)?;
        if y.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::IntegratorFailure {
                x: w[1],
                reason: "solution overflow".into(),
            });
        }
        states.push(y.clone());
    }
    Ok(xs
        .iter()
        .map(|&x| {
            let s = lookup(&knots, &states, x);
            (to_matrix(n, &s[..nn]), to_matrix(n, &s[nn..]))
        })
        .collect())
}

fn origin_once(flat: &Flat, k: Complex64, cfg: OdeConfig) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let n = flat.n;
    if flat.left.is_empty() {
        return Ok((matkernel::identity(n), matkernel::identity(n) * (I * k)));
    }
    let (m, mp) = integrate_m(flat, k, &[0.0], cfg)?.remove(0);
    let fp = &m * (I * k) + mp;
    Ok((m, fp))
}

fn noise_floor(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    64.0 * f64::EPSILON * (paper_norm(a) + paper_norm(b))
}

/// `f(k, 0)` and `f'(k, 0)`.
pub fn jost_at_origin(p: &PotentialModel, k: SpectralPoint, opts: &JostOptions) -> Result<JostOrigin> {
    let (coarse, fine) = opts.configs()?;
    let flat = Flat::new(p);
    let kv = k.value();
    if !opts.estimate_error {
        let (f0, fp0) = origin_once(&flat, kv, coarse)?;
        let err_est = noise_floor(&f0, &fp0);
        return Ok(JostOrigin { k, f0, fp0, err_est });
    }
    let (f_c, fp_c) = origin_once(&flat, kv, coarse)?;
    let (f0, fp0) = origin_once(&flat, kv, fine)?;
    let diff = paper_norm(&(&f_c - &f0)).max(paper_norm(&(&fp_c - &fp0)));
    let err_est = diff.max(noise_floor(&f0, &fp0));
    Ok(JostOrigin { k, f0, fp0, err_est })
}

/// `f(k, x)` and `f'(k, x)` at arbitrary `x >= 0`.
pub fn jost_solution(
    p: &PotentialModel,
    k: SpectralPoint,
    xs: &[f64],
    opts: &JostOptions,
) -> Result<Vec<(ComplexMatrix, ComplexMatrix)>> {
    if let Some(&x) = xs.iter().find(|x| !(**x >= 0.0)) {
        return Err(Error::NegativeCoordinate(x));
    }
    let (coarse, _) = opts.configs()?;
    let flat = Flat::new(p);
    let n = p.n();
    let kv = k.value();
    let end = flat.support_end();
    let inside: Vec<f64> = xs.iter().copied().filter(|&x| x <= end).collect();
    let ms = if flat.left.is_empty() || inside.is_empty() {
        Vec::new()
    } else {
        integrate_m(&flat, kv, &inside, coarse)?
    };
    let mut it = ms.into_iter();
    Ok(xs
        .iter()
        .map(|&x| {
            let e = (I * kv * x).exp();
            let (m, mp) = if x <= end && !flat.left.is_empty() {
                it.next().unwrap()
            } else {
                (matkernel::identity(n), matkernel::zeros(n))
            };
            let f = &m * e;
            let fp = (&m * (I * kv) + mp) * e;
            (f, fp)
        })
        .collect())
}

/// The Jost matrix at `k`.
pub fn jost_matrix(
    p: &PotentialModel,
    bp: &BoundaryPair,
    k: SpectralPoint,
    opts: &JostOptions,
) -> Result<JostEvaluation> {
    if p.n() != bp.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            actual: bp.n(),
        });
    }
    let o = jost_at_origin(p, k.reflected(), opts)?;
    let j = o.f0.adjoint() * bp.b() - o.fp0.adjoint() * bp.a();
    let err_est = o.err_est * (paper_norm(bp.a()) + paper_norm(bp.b()));
    Ok(JostEvaluation {
        k,
        f0: o.f0,
        fp0: o.fp0,
        j,
        err_est,
    })
}

/// Forward integration of `phi'' = (V - k^2) phi`, `phi(0) = A`, `phi'(0) = B`,
/// reported on the increasing grid `xs` starting at 0.
pub fn regular_solution(
    p: &PotentialModel,
    bp: &BoundaryPair,
    k: Complex64,
    xs: &[f64],
    tol: f64,
) -> Result<RegularSolutionTrace> {
    if xs.first() != Some(&0.0) {
        return Err(Error::BadGrid("regular-solution grid must start at 0".into()));
    }
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::BadGrid("regular-solution grid must increase".into()));
    }
    if p.n() != bp.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            actual: bp.n(),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let flat = Flat::new(p);
    let n = p.n();
    let nn = n * n;
    let x_max = *xs.last().unwrap();
    let knots = knot_list(&flat, 0.0, x_max, xs);

    let mut y = vec![c(0.0, 0.0); 3 * nn];
    for i in 0..n {
        for j in 0..n {
            y[i * n + j] = bp.a()[(i, j)];
            y[nn + i * n + j] = bp.b()[(i, j)];
        }
    }
    let k2 = k * k;
    let seg = Cell::new(None);
    let rhs = |x: f64, y: &[Complex64], dy: &mut [Complex64]| {
        let phi = &y[..nn];
        let (dphi, rest) = dy.split_at_mut(nn);
        let (dphip, dgram) = rest.split_at_mut(nn);
        dphi.copy_from_slice(&y[nn..2 * nn]);
        for (d, v) in dphip.iter_mut().zip(phi) {
            *d = -k2 * v;
        }
        flat.apply(seg.get(), x, phi, dphip);
        for i in 0..n {
            for j in 0..n {
                let mut acc = c(0.0, 0.0);
                for l in 0..n {
                    acc += phi[l * n + i].conj() * phi[l * n + j];
                }
                dgram[i * n + j] = acc;
            }
        }
    };
    let mut solver = Dop853::new(rhs, 3 * nn, OdeConfig::with_rtol(tol));
    let mut states = vec![y.clone()];
    for w in knots.windows(2) {
        seg.set(flat.segment_of(w[0], w[1]));
        solver.advance(w[0], w[1], &mut y)?;
        states.push(y.clone());
    }
    let mut trace = RegularSolutionTrace {
        k,
        xs: xs.to_vec(),
        phi: Vec::with_capacity(xs.len()),
        phip: Vec::with_capacity(xs.len()),
        gram: Vec::with_capacity(xs.len()),
    };
    for &x in xs {
        let s = lookup(&knots, &states, x);
        trace.phi.push(to_matrix(n, &s[..nn]));
        trace.phip.push(to_matrix(n, &s[nn..2 * nn]));
        trace.gram.push(to_matrix(n, &s[2 * nn..]));
    }
    // initial data are exact by construction
    trace.phi[0] = bp.a().clone();
    trace.phip[0] = bp.b().clone();
    Ok(trace)
}

/// `Psi(k, x) = f(-k, x) + f(k, x) S(k)` for real `k != 0`.
pub fn physical_solution(
    p: &PotentialModel,
    bp: &BoundaryPair,
    k: f64,
    x: f64,
    opts: &JostOptions,
) -> Result<ComplexMatrix> {
    if k == 0.0 {
        return Err(Error::InvalidArgument("physical solution needs k != 0".into()));
    }
    let kp = SpectralPoint::real(k)?;
    let km = SpectralPoint::real(-k)?;
    let jk = jost_matrix(p, bp, kp, opts)?.j;
    let jmk = jost_matrix(p, bp, km, opts)?.j;
    let s = -jmk * checked_inverse(&jk, k)?;
    let fp = jost_solution(p, kp, &[x], opts)?.remove(0).0;
    let fm = jost_solution(p, km, &[x], opts)?.remove(0).0;
    Ok(fm + fp * s)
}

/// `Psi(k, x) = -2ik phi(k, x) J(k)^{-1}`.
pub fn physical_solution_regular(
    p: &PotentialModel,
    bp: &BoundaryPair,
    k: f64,
    x: f64,
    opts: &JostOptions,
) -> Result<ComplexMatrix> {
    if k == 0.0 {
        return Err(Error::SingularJost { k, condition: f64::INFINITY });
    }
    if !(x >= 0.0) {
        return Err(Error::NegativeCoordinate(x));
    }
    let jk = jost_matrix(p, bp, SpectralPoint::real(k)?, opts)?.j;
    let xs: Vec<f64> = if x == 0.0 { vec![0.0] } else { vec![0.0, x] };
    let phi = regular_solution(p, bp, c(k, 0.0), &xs, opts.tol)?
        .phi
        .pop()
        .unwrap();
    Ok(phi * (-2.0 * I * k) * checked_inverse(&jk, k)?)
}

pub const CONDITION_LIMIT: f64 = 1e12;

/// Inverse of a Jost matrix with the condition-number guard.
pub fn checked_inverse(j: &ComplexMatrix, k: f64) -> Result<ComplexMatrix> {
    let condition = matkernel::condition_number(j);
    if !(condition <= CONDITION_LIMIT) {
        return Err(Error::SingularJost { k, condition });
    }
    inverse(j).map_err(|_| Error::SingularJost { k, condition })
}
