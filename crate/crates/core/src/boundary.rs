//! Selfadjoint vertex conditions `-B^dagger psi(0) + A^dagger psi'(0) = 0`
//! and their reduction to the diagonal theta-form
//! `A~ = -diag(sin theta_j)`, `B~ = diag(cos theta_j)`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matkernel::{
    self, c, check_square, condition_number, hermitian_eigen, identity, inverse, paper_norm,
    unitarity_defect, unitary_eig, ComplexMatrix, I,
};

/// Relative tolerance on `||A^dagger B - B^dagger A||`.
pub const SELFADJOINT_TOL: f64 = 1e-10;
/// Minimum eigenvalue ratio of `A^dagger A + B^dagger B`.
pub const RANK_TOL: f64 = 1e-10;
/// Default tolerance for snapping a channel to Dirichlet or Neumann.
pub const DEFAULT_CLASS_TOL: f64 = 1e-9;
const TRANSFORM_COND_LIMIT: f64 = 1e12;
const TRANSFORM_UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPair {
    a: ComplexMatrix,
    b: ComplexMatrix,
}

/// Residuals of the two defining conditions of a selfadjoint pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairDiagnostics {
    pub selfadjointness_residual: f64,
    pub selfadjointness_bound: f64,
    /// `lambda_min / lambda_max` of `A^dagger A + B^dagger B`.
    pub rank_ratio: f64,
}

impl PairDiagnostics {
    pub fn compute(a: &ComplexMatrix, b: &ComplexMatrix) -> Self {
        let ad = a.adjoint();
        let bd = b.adjoint();
        let residual = paper_norm(&(&ad * b - &bd * a));
        let scale = paper_norm(a) + paper_norm(b);
        let (values, _) = hermitian_eigen(&(&ad * a + &bd * b));
        let max = *values.last().unwrap();
        let ratio = if max > 0.0 { values[0] / max } else { 0.0 };
        Self {
            selfadjointness_residual: residual,
            selfadjointness_bound: SELFADJOINT_TOL * scale * scale,
            rank_ratio: ratio,
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.selfadjointness_residual > self.selfadjointness_bound {
            return Err(Error::SelfadjointnessViolated {
                residual: self.selfadjointness_residual,
            });
        }
        if self.rank_ratio < RANK_TOL {
            return Err(Error::RankDeficient {
                ratio: self.rank_ratio,
            });
        }
        Ok(())
    }
}

pub fn validate_pair(a: ComplexMatrix, b: ComplexMatrix) -> Result<BoundaryPair> {
    BoundaryPair::new(a, b)
}

impl BoundaryPair {
    pub fn new(a: ComplexMatrix, b: ComplexMatrix) -> Result<Self> {
        let n = check_square(&a)?;
        let nb = check_square(&b)?;
        if n != nb {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: nb,
            });
        }
        PairDiagnostics::compute(&a, &b).check()?;
        Ok(Self { a, b })
    }

    /// The canonical pair of the theta-form. `theta = pi` and `theta = pi/2`
    /// are mapped to exact Dirichlet and Neumann entries.
    pub fn from_theta(theta: &[f64]) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::InvalidArgument("empty theta list".into()));
        }
        if let Some(t) = theta.iter().find(|t| !(**t > 0.0 && **t <= PI)) {
            return Err(Error::InvalidArgument(format!(
                "theta = {t} outside (0, pi]"
            )));
        }
        let (a, b) = theta_pair(theta);
        Self::new(a, b)
    }

    pub fn dirichlet(n: usize) -> Self {
        Self {
            a: matkernel::zeros(n),
            b: identity(n),
        }
    }

    pub fn neumann(n: usize) -> Self {
        Self {
            a: -identity(n),
            b: matkernel::zeros(n),
        }
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }

    pub fn diagnostics(&self) -> PairDiagnostics {
        PairDiagnostics::compute(&self.a, &self.b)
    }

    /// `E = (A^dagger A + B^dagger B)^(1/2)`.
    pub fn compute_e(&self) -> Result<ComplexMatrix> {
        let p = self.a.adjoint() * &self.a + self.b.adjoint() * &self.b;
        matkernel::hermitian_sqrt(&p)
    }

    /// `U = (B - iA)(B + iA)^(-1)`.
    pub fn compute_u(&self) -> Result<ComplexMatrix> {
        let plus = &self.b + &self.a * I;
        let minus = &self.b - &self.a * I;
        Ok(minus * inverse(&plus)?)
    }

    pub fn canonicalize(&self) -> Result<CanonicalBoundary> {
        self.canonicalize_with_tol(DEFAULT_CLASS_TOL)
    }

    pub fn canonicalize_with_tol(&self, class_tol: f64) -> Result<CanonicalBoundary> {
        canonicalize(self, class_tol)
    }

    pub fn transform(&self, t: &Transform) -> Result<Self> {
        transform_pair(self, t)
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Self {
            a: matkernel::direct_sum(&self.a, &other.a),
            b: matkernel::direct_sum(&self.b, &other.b),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| {
            (0..n).all(|j| i == j || (self.a[(i, j)] == c(0.0, 0.0) && self.b[(i, j)] == c(0.0, 0.0)))
        })
    }
}

fn snapped_sin_cos(theta: f64) -> (f64, f64) {
    if theta == PI {
        (0.0, -1.0)
    } else if theta == FRAC_PI_2 {
        (1.0, 0.0)
    } else {
        theta.sin_cos()
    }
}

/// `(A~, B~) = (-diag(sin theta), diag(cos theta))`.
pub fn theta_pair(theta: &[f64]) -> (ComplexMatrix, ComplexMatrix) {
    let (sins, coss): (Vec<f64>, Vec<f64>) = theta.iter().map(|&t| snapped_sin_cos(t)).unzip();
    let neg_sins: Vec<f64> = sins.iter().map(|s| -s).collect();
    (matkernel::real_diag(&neg_sins), matkernel::real_diag(&coss))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    Mixed,
    Dirichlet,
    Neumann,
}

/// The theta-form of a boundary pair together with the data of
/// `A~ = M^dagger A T1 M T2`, `B~ = M^dagger B T1 M T2`.
#[derive(Debug, Clone)]
pub struct CanonicalBoundary {
    /// Mixed channels first, then Dirichlet (`pi`), then Neumann (`pi/2`).
    pub theta: Vec<f64>,
    pub m: ComplexMatrix,
    pub t1: ComplexMatrix,
    pub t2: ComplexMatrix,
    pub n_mixed: usize,
    pub n_dirichlet: usize,
    pub n_neumann: usize,
}

impl CanonicalBoundary {
    pub fn n(&self) -> usize {
        self.theta.len()
    }

    pub fn kind(&self, j: usize) -> ChannelKind {
        if j < self.n_mixed {
            ChannelKind::Mixed
        } else if j < self.n_mixed + self.n_dirichlet {
            ChannelKind::Dirichlet
        } else {
            ChannelKind::Neumann
        }
    }

    pub fn tilde_pair(&self) -> (ComplexMatrix, ComplexMatrix) {
        theta_pair(&self.theta)
    }

    /// `Z0 = diag(I_M, -I_D, I_N)`.
    pub fn z0(&self) -> ComplexMatrix {
        let d: Vec<f64> = (0..self.n())
            .map(|j| match self.kind(j) {
                ChannelKind::Dirichlet => -1.0,
                _ => 1.0,
            })
            .collect();
        matkernel::real_diag(&d)
    }

    /// `Z1 = diag(cot theta_1 .. cot theta_M, 0_D, 0_N)`.
    pub fn z1(&self) -> ComplexMatrix {
        let d: Vec<f64> = (0..self.n())
            .map(|j| match self.kind(j) {
                ChannelKind::Mixed => 1.0 / self.theta[j].tan(),
                _ => 0.0,
            })
            .collect();
        matkernel::real_diag(&d)
    }

    /// High-energy limit `S(inf) = M Z0 M^dagger`.
    pub fn s_infinity(&self) -> ComplexMatrix {
        &self.m * self.z0() * self.m.adjoint()
    }

    /// Residual of `A~ = M^dagger A T1 M T2` and `B~ = M^dagger B T1 M T2`.
    pub fn reconstruction_residual(&self, bp: &BoundaryPair) -> f64 {
        let (at, bt) = self.tilde_pair();
        let right = &self.t1 * &self.m * &self.t2;
        let ma = self.m.adjoint() * bp.a() * &right;
        let mb = self.m.adjoint() * bp.b() * &right;
        paper_norm(&(ma - at)).max(paper_norm(&(mb - bt)))
    }

    pub fn mixed_cot_max(&self) -> f64 {
        (0..self.n_mixed)
            .map(|j| (1.0 / self.theta[j].tan()).abs())
            .fold(0.0, f64::max)
    }
}

pub fn canonicalize(bp: &BoundaryPair, class_tol: f64) -> Result<CanonicalBoundary> {
    if !(class_tol > 0.0) {
        return Err(Error::InvalidArgument("class_tol must be positive".into()));
    }
    let n = bp.n();
    let u = bp.compute_u()?;
    let eig = unitary_eig(&u)?;

    let mut channels: Vec<(ChannelKind, f64, usize)> = eig
        .phases
        .iter()
        .enumerate()
        .map(|(j, &zeta)| {
            // zeta just above 0 is the same eigenvalue 1 as zeta = pi
            if (zeta - PI).abs() <= class_tol || zeta <= class_tol {
                (ChannelKind::Dirichlet, PI, j)
            } else if (zeta - FRAC_PI_2).abs() <= class_tol {
                (ChannelKind::Neumann, FRAC_PI_2, j)
            } else {
                (ChannelKind::Mixed, zeta, j)
            }
        })
        .collect();
    let rank = |k: ChannelKind| match k {
        ChannelKind::Mixed => 0,
        ChannelKind::Dirichlet => 1,
        ChannelKind::Neumann => 2,
    };
    channels.sort_by_key(|&(kind, _, j)| (rank(kind), j));

    let mut m = matkernel::zeros(n);
    for (dst, &(_, _, src)) in channels.iter().enumerate() {
        m.set_column(dst, &eig.vectors.column(src));
    }
    let theta: Vec<f64> = channels.iter().map(|&(_, t, _)| t).collect();
    let count = |k: ChannelKind| channels.iter().filter(|ch| ch.0 == k).count();

    let t1 = inverse(&(bp.b() + bp.a() * I))?;
    let (at, bt) = theta_pair(&theta);
    let t2 = bt + at * I;

    Ok(CanonicalBoundary {
        theta,
        m,
        t1,
        t2,
        n_mixed: count(ChannelKind::Mixed),
        n_dirichlet: count(ChannelKind::Dirichlet),
        n_neumann: count(ChannelKind::Neumann),
    })
}

/// Reparametrizations and changes of representation of a boundary pair.
#[derive(Debug, Clone)]
pub enum Transform {
    /// `(A, B) -> (A T, B T)`; the boundary condition itself is unchanged.
    RightMultiply(ComplexMatrix),
    /// `(A, B) -> (M^dagger A M, M^dagger B M)`.
    Unitary(ComplexMatrix),
    /// `(A, B) -> (M^dagger A T1 M T2, M^dagger B T1 M T2)`.
    Composite {
        t1: ComplexMatrix,
        m: ComplexMatrix,
        t2: ComplexMatrix,
    },
}

fn check_invertible(t: &ComplexMatrix, n: usize) -> Result<()> {
    if check_square(t)? != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: t.nrows(),
        });
    }
    if condition_number(t) > TRANSFORM_COND_LIMIT {
        return Err(Error::SingularTransform);
    }
    Ok(())
}

fn check_unitary(m: &ComplexMatrix, n: usize) -> Result<()> {
    if check_square(m)? != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: m.nrows(),
        });
    }
    let residual = unitarity_defect(m);
    if residual > TRANSFORM_UNITARY_TOL {
        return Err(Error::NotUnitary { residual });
    }
    Ok(())
}

pub fn transform_pair(bp: &BoundaryPair, t: &Transform) -> Result<BoundaryPair> {
    let n = bp.n();
    let (a, b) = match t {
        Transform::RightMultiply(t) => {
            check_invertible(t, n)?;
            (bp.a() * t, bp.b() * t)
        }
        Transform::Unitary(m) => {
            check_unitary(m, n)?;
            let md = m.adjoint();
            (&md * bp.a() * m, &md * bp.b() * m)
        }
        Transform::Composite { t1, m, t2 } => {
            check_invertible(t1, n)?;
            check_unitary(m, n)?;
            check_invertible(t2, n)?;
            let md = m.adjoint();
            let right = t1 * m * t2;
            (&md * bp.a() * &right, &md * bp.b() * &right)
        }
    };
    BoundaryPair::new(a, b)
}

/// Unit-modulus helper used by tests and reference models.
pub fn expi(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, x)
}
