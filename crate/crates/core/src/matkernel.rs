//! Dense complex linear algebra for the small (n <= 32) matrices that carry
//! potentials, boundary pairs, Jost matrices and scattering matrices.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Default relative threshold for [`kernel`].
pub const DEFAULT_KERNEL_TOL: f64 = 1e-8;
/// Eigenvalues of `(U + U^dagger)/2` closer than this are treated as one cluster.
pub const CLUSTER_GAP: f64 = 1e-8;
/// Default tolerance on `||U U^dagger - I||` accepted by [`unitary_eig`].
pub const DEFAULT_UNITARY_TOL: f64 = 1e-8;
const HERMITIAN_TOL: f64 = 1e-10;
const POSITIVITY_TOL: f64 = 1e-13;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Max row sum of absolute values.
pub fn paper_norm(m: &ComplexMatrix) -> f64 {
    m.row_iter()
        .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(n: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(n, n)
}

pub fn diag(entries: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&ComplexVector::from_column_slice(entries))
}

pub fn real_diag(entries: &[f64]) -> ComplexMatrix {
    let v: Vec<Complex64> = entries.iter().map(|&x| c(x, 0.0)).collect();
    diag(&v)
}

/// Block-diagonal direct sum `a (+) b`.
pub fn direct_sum(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.nrows(), b.nrows());
    let mut out = zeros(na + nb);
    out.view_mut((0, 0), (na, na)).copy_from(a);
    out.view_mut((na, na), (nb, nb)).copy_from(b);
    out
}

pub fn check_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(m.nrows())
}

pub fn hermitian_residual(m: &ComplexMatrix) -> f64 {
    paper_norm(&(m - m.adjoint()))
}

pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    let n = u.nrows();
    paper_norm(&(u * u.adjoint() - identity(n)))
}

pub fn det(m: &ComplexMatrix) -> Complex64 {
    m.clone().lu().determinant()
}

pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_square(m)?;
    let inv = m.clone().lu().try_inverse().ok_or(Error::Singular)?;
    if inv.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Singular);
    }
    Ok(inv)
}

/// Singular values in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// 2-norm condition number; infinite for exactly singular input.
pub fn condition_number(m: &ComplexMatrix) -> f64 {
    let s = singular_values(m);
    let (max, min) = (s[0], s[s.len() - 1]);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(h: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = h.nrows();
    // symmetrize so round-off in the input does not leak into the solver
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&j| eig.eigenvalues[j]).collect();
    let mut vectors = zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// The unique positive Hermitian square root of a positive definite matrix.
pub fn hermitian_sqrt(p: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_square(p)?;
    let residual = hermitian_residual(p);
    if residual > HERMITIAN_TOL * paper_norm(p).max(1.0) {
        return Err(Error::NotHermitian { residual });
    }
    let (values, vectors) = hermitian_eigen(p);
    let max = values.last().copied().unwrap_or(0.0);
    let min = values[0];
    if max <= 0.0 || min <= POSITIVITY_TOL * max {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: min,
        });
    }
    let roots: Vec<Complex64> = values.iter().map(|&v| c(v.sqrt(), 0.0)).collect();
    let e = &vectors * diag(&roots) * vectors.adjoint();
    Ok((&e + e.adjoint()).scale(0.5))
}

/// Orthonormal basis of a numerical kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelBasis {
    pub dim: usize,
    pub basis: Vec<ComplexVector>,
    /// All singular values, descending.
    pub singular_values: Vec<f64>,
}

/// Right null space: singular directions with `sigma <= tol * sigma_max`.
pub fn kernel(m: &ComplexMatrix, tol: f64) -> KernelBasis {
    let n = m.ncols();
    let svd = SVD::new(m.clone(), false, true);
    let v_t = svd.v_t.expect("SVD requested with V");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigma: Vec<f64> = order.iter().map(|&j| svd.singular_values[j]).collect();
    let sigma_max = sigma.first().copied().unwrap_or(0.0);

    if sigma_max == 0.0 {
        let basis = (0..n)
            .map(|j| {
                let mut e = ComplexVector::zeros(n);
                e[j] = c(1.0, 0.0);
                e
            })
            .collect();
        return KernelBasis {
            dim: n,
            basis,
            singular_values: sigma,
        };
    }

    let basis: Vec<ComplexVector> = order
        .iter()
        .zip(&sigma)
        .filter(|(_, &s)| s <= tol * sigma_max)
        .map(|(&j, _)| v_t.row(j).adjoint())
        .collect();
    KernelBasis {
        dim: basis.len(),
        basis,
        singular_values: sigma,
    }
}

/// Spectral data of a unitary matrix: `M^dagger U M = diag(exp(2 i zeta_j))`.
#[derive(Debug, Clone)]
pub struct UnitaryEigen {
    /// Half-phases in `(0, pi]`.
    pub phases: Vec<f64>,
    /// Eigenvalues `exp(2 i zeta_j)` as measured (unit modulus).
    pub eigenvalues: Vec<Complex64>,
    pub vectors: ComplexMatrix,
}

impl UnitaryEigen {
    pub fn reconstruct(&self) -> ComplexMatrix {
        &self.vectors * diag(&self.eigenvalues) * self.vectors.adjoint()
    }
}

/// Maps an eigenvalue on the unit circle to its half-phase in `(0, pi]`.
/// The eigenvalue 1 goes to `pi`.
pub fn half_phase(z: Complex64) -> f64 {
    let mut zeta = 0.5 * z.arg();
    if zeta <= 0.0 {
        zeta += PI;
    }
    zeta
}

pub fn unitary_eig(u: &ComplexMatrix) -> Result<UnitaryEigen> {
    unitary_eig_with_tol(u, DEFAULT_UNITARY_TOL)
}

/// Diagonalizes a numerically unitary matrix with a genuinely unitary
/// eigenvector matrix, using the commuting Hermitian parts
/// `(U + U^dagger)/2` and `(U - U^dagger)/(2i)`.
pub fn unitary_eig_with_tol(u: &ComplexMatrix, tol: f64) -> Result<UnitaryEigen> {
    let n = check_square(u)?;
    let residual = unitarity_defect(u);
    if residual > tol {
        return Err(Error::NotUnitary { residual });
    }
    let ud = u.adjoint();
    let h_cos = (u + &ud).scale(0.5);
    let h_sin = (u - &ud) * c(0.0, -0.5);

    let (cos_values, mut vectors) = hermitian_eigen(&h_cos);

    // cos(phi) alone cannot separate phi from -phi; split each cluster with h_sin
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && cos_values[end] - cos_values[end - 1] < CLUSTER_GAP {
            end += 1;
        }
        let width = end - start;
        if width > 1 {
            let block = vectors.columns(start, width).into_owned();
            let projected = block.adjoint() * &h_sin * &block;
            let (_, rotation) = hermitian_eigen(&projected);
            let rotated = orthonormalize(&(block * rotation));
            vectors.columns_mut(start, width).copy_from(&rotated);
        }
        start = end;
    }

    let mut phases = Vec::with_capacity(n);
    let mut eigenvalues = Vec::with_capacity(n);
    for j in 0..n {
        let v = vectors.column(j);
        let lambda = (v.adjoint() * u * v)[(0, 0)];
        let lambda = lambda / lambda.norm();
        eigenvalues.push(lambda);
        phases.push(half_phase(lambda));
    }
    Ok(UnitaryEigen {
        phases,
        eigenvalues,
        vectors,
    })
}

/// Modified Gram-Schmidt applied twice on the columns.
pub fn orthonormalize(m: &ComplexMatrix) -> ComplexMatrix {
    let mut q = m.clone();
    for _ in 0..2 {
        for j in 0..q.ncols() {
            for i in 0..j {
                let qi = q.column(i).into_owned();
                let proj = qi.dotc(&q.column(j));
                let updated = q.column(j) - qi * proj;
                q.set_column(j, &updated);
            }
            let norm = q.column(j).norm();
            if norm > 0.0 {
                let normalized = q.column(j) / c(norm, 0.0);
                q.set_column(j, &normalized);
            }
        }
    }
    q
}

/// Least-squares slope of `ys` against `xs`.
pub fn lsq_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
