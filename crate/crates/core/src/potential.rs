//! Compactly supported selfadjoint matrix potentials and their high-energy
//! moment matrices.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matkernel::{
    self, c, check_square, hermitian_residual, paper_norm, unitarity_defect, ComplexMatrix,
};
use crate::quadrature::{integrate, QuadratureConfig};

const SELFADJOINT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    Zero,
    PiecewiseConstant,
    SampledGrid,
}

/// One interval of the support on which `V` is affine:
/// `V(x) = left + (right - left) (x - start) / (end - start)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub left: ComplexMatrix,
    pub right: ComplexMatrix,
}

impl Segment {
    pub fn width(&self) -> f64 {
        self.end - self.start
    }

    pub fn is_constant(&self) -> bool {
        self.left == self.right
    }

    pub fn eval(&self, x: f64) -> ComplexMatrix {
        if self.is_constant() {
            return self.left.clone();
        }
        let t = (x - self.start) / self.width();
        &self.left + (&self.right - &self.left) * c(t, 0.0)
    }

    fn slope(&self) -> ComplexMatrix {
        (&self.right - &self.left) * c(1.0 / self.width(), 0.0)
    }
}

/// A validated potential; immutable after construction.
#[derive(Debug, Clone)]
pub struct PotentialModel {
    n: usize,
    kind: PotentialKind,
    breakpoints: Vec<f64>,
    values: Vec<ComplexMatrix>,
    segments: Arc<Vec<Segment>>,
    l1_norm: f64,
    first_moment: f64,
}

/// Diagnostics reported by validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialDiagnostics {
    pub max_selfadjoint_residual: f64,
    pub l1_norm: f64,
    pub first_moment: f64,
}

pub fn validate_potential(p: PotentialModel) -> Result<PotentialModel> {
    PotentialModel::build(p.n, p.kind, p.breakpoints, p.values)
}

impl PotentialModel {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            kind: PotentialKind::Zero,
            breakpoints: vec![0.0],
            values: Vec::new(),
            segments: Arc::new(Vec::new()),
            l1_norm: 0.0,
            first_moment: 0.0,
        }
    }

    /// `V = values[j]` on `[breakpoints[j], breakpoints[j+1])`.
    pub fn piecewise_constant(breakpoints: Vec<f64>, values: Vec<ComplexMatrix>) -> Result<Self> {
        let n = values.first().map(|v| v.nrows()).unwrap_or(0);
        Self::build(n, PotentialKind::PiecewiseConstant, breakpoints, values)
    }

    /// Linear interpolation between `values[j]` at the nodes `xs[j]`.
    pub fn sampled_grid(xs: Vec<f64>, values: Vec<ComplexMatrix>) -> Result<Self> {
        let n = values.first().map(|v| v.nrows()).unwrap_or(0);
        Self::build(n, PotentialKind::SampledGrid, xs, values)
    }

    /// Scalar constant `depth` on `[0, width)`.
    pub fn scalar_well(depth: f64, width: f64) -> Result<Self> {
        Self::piecewise_constant(vec![0.0, width], vec![matkernel::real_diag(&[depth])])
    }

    fn build(
        n: usize,
        kind: PotentialKind,
        breakpoints: Vec<f64>,
        values: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        if kind == PotentialKind::Zero {
            return Ok(Self::zero(n));
        }
        if breakpoints.first() != Some(&0.0) {
            return Err(Error::BadGrid("grid must start at x = 0".into()));
        }
        if breakpoints.iter().any(|x| !x.is_finite()) {
            return Err(Error::BadGrid("non-finite grid node".into()));
        }
        if let Some(j) = breakpoints.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::BadGrid(format!(
                "nodes not strictly increasing at index {}",
                j + 1
            )));
        }
        let expected = match kind {
            PotentialKind::PiecewiseConstant => breakpoints.len() - 1,
            _ => breakpoints.len(),
        };
        if breakpoints.len() < 2 || values.len() != expected {
            return Err(Error::BadGrid(format!(
                "{} nodes need {} values, got {}",
                breakpoints.len(),
                expected,
                values.len()
            )));
        }
        if n == 0 {
            return Err(Error::BadGrid("empty matrix dimension".into()));
        }
        for (index, v) in values.iter().enumerate() {
            let dim = check_square(v).map_err(|_| Error::BadGrid(format!("bad matrix at {index}")))?;
            if dim != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: dim,
                });
            }
            let residual = hermitian_residual(v);
            if residual > SELFADJOINT_TOL * paper_norm(v).max(1.0) {
                return Err(Error::NotSelfadjoint { index, residual });
            }
        }

        let segments: Vec<Segment> = breakpoints
            .windows(2)
            .enumerate()
            .map(|(j, w)| {
                let (left, right) = match kind {
                    PotentialKind::PiecewiseConstant => (values[j].clone(), values[j].clone()),
                    _ => (values[j].clone(), values[j + 1].clone()),
                };
                Segment {
                    start: w[0],
                    end: w[1],
                    left,
                    right,
                }
            })
            .collect();

        let (l1_norm, first_moment) = norm_integrals(&segments)?;
        Ok(Self {
            n,
            kind,
            breakpoints,
            values,
            segments: Arc::new(segments),
            l1_norm,
            first_moment,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[ComplexMatrix] {
        &self.values
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// `V = 0` beyond this point.
    pub fn support_end(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    /// `int ||V(x)|| dx`.
    pub fn l1_norm(&self) -> f64 {
        self.l1_norm
    }

    /// `int x ||V(x)|| dx`.
    pub fn first_moment(&self) -> f64 {
        self.first_moment
    }

    pub fn diagnostics(&self) -> PotentialDiagnostics {
        PotentialDiagnostics {
            max_selfadjoint_residual: self
                .values
                .iter()
                .map(hermitian_residual)
                .fold(0.0, f64::max),
            l1_norm: self.l1_norm,
            first_moment: self.first_moment,
        }
    }

    pub fn eval(&self, x: f64) -> Result<ComplexMatrix> {
        if x < 0.0 || x.is_nan() {
            return Err(Error::NegativeCoordinate(x));
        }
        let zero = matkernel::zeros(self.n);
        match self.kind {
            PotentialKind::Zero => Ok(zero),
            PotentialKind::PiecewiseConstant => {
                if x >= self.support_end() {
                    return Ok(zero);
                }
                let j = self.breakpoints.partition_point(|&b| b <= x) - 1;
                Ok(self.values[j].clone())
            }
            PotentialKind::SampledGrid => {
                if x > self.support_end() {
                    return Ok(zero);
                }
                let j = (self.breakpoints.partition_point(|&b| b <= x) - 1)
                    .min(self.segments.len() - 1);
                Ok(self.segments[j].eval(x))
            }
        }
    }

    /// `V -> M^dagger V M` for a unitary `M`.
    pub fn conjugate(&self, m: &ComplexMatrix) -> Result<Self> {
        let residual = unitarity_defect(m);
        if residual > 1e-10 {
            return Err(Error::NotUnitary { residual });
        }
        let md = m.adjoint();
        let values = self.values.iter().map(|v| &md * v * m).collect();
        match self.kind {
            PotentialKind::Zero => Ok(Self::zero(self.n)),
            kind => Self::build(self.n, kind, self.breakpoints.clone(), values),
        }
    }

    /// Block-diagonal potential `diag(self, other)`.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        use PotentialKind::*;
        let n = self.n + other.n;
        match (self.kind, other.kind) {
            (Zero, Zero) => Ok(Self::zero(n)),
            (SampledGrid, SampledGrid) | (SampledGrid, Zero) | (Zero, SampledGrid) => {
                let xs = if self.kind == SampledGrid {
                    self.breakpoints.clone()
                } else {
                    other.breakpoints.clone()
                };
                if (self.kind == SampledGrid && self.breakpoints != xs)
                    || (other.kind == SampledGrid && other.breakpoints != xs)
                {
                    return Err(Error::InvalidArgument(
                        "sampled grids must share nodes for a direct sum".into(),
                    ));
                }
                let values = (0..xs.len())
                    .map(|j| {
                        let a = self.values.get(j).cloned().unwrap_or_else(|| matkernel::zeros(self.n));
                        let b = other.values.get(j).cloned().unwrap_or_else(|| matkernel::zeros(other.n));
                        matkernel::direct_sum(&a, &b)
                    })
                    .collect();
                Self::build(n, SampledGrid, xs, values)
            }
            (SampledGrid, _) | (_, SampledGrid) => Err(Error::InvalidArgument(
                "cannot mix sampled and piecewise-constant potentials".into(),
            )),
            _ => {
                let mut nodes: Vec<f64> = self
                    .breakpoints
                    .iter()
                    .chain(other.breakpoints.iter())
                    .copied()
                    .collect();
                nodes.sort_by(f64::total_cmp);
                nodes.dedup();
                let values = nodes
                    .windows(2)
                    .map(|w| {
                        let x = w[0];
                        Ok(matkernel::direct_sum(&self.eval(x)?, &other.eval(x)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::build(n, PiecewiseConstant, nodes, values)
            }
        }
    }

    /// Moment matrices computed with exact per-interval integrals where the
    /// potential is piecewise constant, by quadrature otherwise.
    pub fn moments(&self) -> Result<MomentSet> {
        let method = match self.kind {
            PotentialKind::SampledGrid => MomentMethod::Quadrature,
            _ => MomentMethod::ClosedForm,
        };
        MomentSet::new(self, method)
    }

    pub fn moments_with(&self, method: MomentMethod) -> Result<MomentSet> {
        MomentSet::new(self, method)
    }
}

fn norm_integrals(segments: &[Segment]) -> Result<(f64, f64)> {
    let cfg = QuadratureConfig::default();
    let mut l1 = 0.0;
    let mut first = 0.0;
    for s in segments {
        if s.is_constant() {
            let nv = paper_norm(&s.left);
            l1 += nv * s.width();
            first += nv * 0.5 * (s.end * s.end - s.start * s.start);
        } else {
            l1 += integrate(|x| paper_norm(&s.eval(x)), s.start, s.end, &cfg)?.0;
            first += integrate(|x| x * paper_norm(&s.eval(x)), s.start, s.end, &cfg)?.0;
        }
    }
    Ok((l1, first))
}

/// `int_0^1 exp(z u) du`.
pub fn phi1(z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        let mut term = c(1.0, 0.0);
        let mut sum = term;
        for j in 1..30 {
            term *= z / (j as f64 + 1.0);
            sum += term;
        }
        sum
    } else {
        (z.exp() - 1.0) / z
    }
}

/// `int_0^1 u exp(z u) du`.
pub fn psi(z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        // sum_j z^j / (j! (j + 2))
        let mut fact = c(1.0, 0.0);
        let mut sum = c(0.5, 0.0);
        for j in 1..30 {
            fact *= z / j as f64;
            sum += fact / (j as f64 + 2.0);
        }
        sum
    } else {
        (z.exp() * (z - 1.0) + 1.0) / (z * z)
    }
}

/// `int_0^1 (1 - u) exp(z u) du`.
pub fn chi(z: Complex64) -> Complex64 {
    phi1(z) - psi(z)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentMethod {
    /// Exact antiderivatives; requires piecewise-constant data.
    ClosedForm,
    /// Outer adaptive quadrature with exact inner prefix integrals.
    Quadrature,
}

/// The k-dependent moments at one spectral point.
#[derive(Debug, Clone)]
pub struct KMoments {
    pub q2: ComplexMatrix,
    pub q4: ComplexMatrix,
    pub q5: ComplexMatrix,
    pub q6: ComplexMatrix,
}

/// `Q1 = 1/2 int V`, `Q3 = 1/4 int_0^inf dz int_0^z dy V(z) V(y)` and the
/// oscillatory moments `Q2, Q4, Q5, Q6` as functions of `k` in the closed
/// upper half plane.
#[derive(Debug, Clone)]
pub struct MomentSet {
    pub q1: ComplexMatrix,
    pub q3: ComplexMatrix,
    n: usize,
    segments: Arc<Vec<Segment>>,
    method: MomentMethod,
    quad: QuadratureConfig,
}

impl MomentSet {
    fn new(p: &PotentialModel, method: MomentMethod) -> Result<Self> {
        if method == MomentMethod::ClosedForm && p.segments.iter().any(|s| !s.is_constant()) {
            return Err(Error::InvalidArgument(
                "closed-form moments need a piecewise-constant potential".into(),
            ));
        }
        let mut set = Self {
            q1: matkernel::zeros(p.n),
            q3: matkernel::zeros(p.n),
            n: p.n,
            segments: p.segments.clone(),
            method,
            quad: QuadratureConfig::default(),
        };
        let at_zero = set.at(c(0.0, 0.0))?;
        // at k = 0: Q2 = Q1 and Q4 = Q5 = Q6 = Q3
        set.q1 = at_zero.q2;
        set.q3 = at_zero.q4;
        Ok(set)
    }

    pub fn method(&self) -> MomentMethod {
        self.method
    }

    pub fn at(&self, k: Complex64) -> Result<KMoments> {
        if k.im < -1e-14 {
            return Err(Error::LowerHalfPlane { re: k.re, im: k.im });
        }
        match self.method {
            MomentMethod::ClosedForm => Ok(self.closed_form(k)),
            MomentMethod::Quadrature => self.quadrature(k),
        }
    }

    pub fn q2(&self, k: Complex64) -> Result<ComplexMatrix> {
        Ok(self.at(k)?.q2)
    }

    fn closed_form(&self, k: Complex64) -> KMoments {
        let n = self.n;
        let s = 2.0 * matkernel::I * k;
        let mut q2 = matkernel::zeros(n);
        let mut q4 = matkernel::zeros(n);
        let mut q5 = matkernel::zeros(n);
        let mut q6 = matkernel::zeros(n);
        // prefix integrals int_0^a V, int_0^a e^{sy} V, int_0^a e^{s(a-y)} V
        let mut w = matkernel::zeros(n);
        let mut w2 = matkernel::zeros(n);
        let mut f = matkernel::zeros(n);
        for seg in self.segments.iter() {
            let h = seg.width();
            let v = &seg.left;
            let e_a = (s * seg.start).exp();
            let sh = s * h;
            let (p1, ps, ch) = (phi1(sh), psi(sh), chi(sh));
            let vv = v * v;

            q2 += v * (e_a * h * p1);
            q4 += v * &w * (e_a * h * p1) + &vv * (e_a * h * h * ps);
            q5 += v * &w2 * c(h, 0.0) + &vv * (e_a * h * h * ch);
            q6 += v * &f * (h * p1) + &vv * c(h * h, 0.0) * ch;

            w += v * c(h, 0.0);
            w2 += v * (e_a * h * p1);
            f = &f * sh.exp() + v * (h * p1);
        }
        KMoments {
            q2: q2 * c(0.5, 0.0),
            q4: q4 * c(0.25, 0.0),
            q5: q5 * c(0.25, 0.0),
            q6: q6 * c(0.25, 0.0),
        }
    }

    fn quadrature(&self, k: Complex64) -> Result<KMoments> {
        let n = self.n;
        let s = 2.0 * matkernel::I * k;
        let mut q2 = matkernel::zeros(n);
        let mut q4 = matkernel::zeros(n);
        let mut q5 = matkernel::zeros(n);
        let mut q6 = matkernel::zeros(n);
        let mut w = matkernel::zeros(n);
        let mut w2 = matkernel::zeros(n);
        let mut f = matkernel::zeros(n);
        for seg in self.segments.iter() {
            let dv = seg.slope();
            let va = &seg.left;
            let e_a = (s * seg.start).exp();
            // prefix integrals continued into the segment, t = z - start
            let inner = |t: f64| {
                let st = s * t;
                let (p1, ps) = (phi1(st), psi(st));
                let wz = &w + va * c(t, 0.0) + &dv * c(0.5 * t * t, 0.0);
                let w2z = &w2 + (va * (t * p1) + &dv * (t * t * ps)) * e_a;
                let fz = &f * st.exp() + va * (t * p1) + &dv * (t * t * (p1 - ps));
                (wz, w2z, fz)
            };
            let (i2, _) = integrate(
                |z| seg.eval(z) * (s * z).exp(),
                seg.start,
                seg.end,
                &self.quad,
            )?;
            let (i4, _) = integrate(
                |z| {
                    let (wz, _, _) = inner(z - seg.start);
                    seg.eval(z) * wz * (s * z).exp()
                },
                seg.start,
                seg.end,
                &self.quad,
            )?;
            let (i5, _) = integrate(
                |z| {
                    let (_, w2z, _) = inner(z - seg.start);
                    seg.eval(z) * w2z
                },
                seg.start,
                seg.end,
                &self.quad,
            )?;
            let (i6, _) = integrate(
                |z| {
                    let (_, _, fz) = inner(z - seg.start);
                    seg.eval(z) * fz
                },
                seg.start,
                seg.end,
                &self.quad,
            )?;
            q2 += i2;
            q4 += i4;
            q5 += i5;
            q6 += i6;
            let (wb, w2b, fb) = inner(seg.width());
            w = wb;
            w2 = w2b;
            f = fb;
        }
        Ok(KMoments {
            q2: q2 * c(0.5, 0.0),
            q4: q4 * c(0.25, 0.0),
            q5: q5 * c(0.25, 0.0),
            q6: q6 * c(0.25, 0.0),
        })
    }
}
