//! Scattering matrix, zero-potential reference quantities and the
//! high-energy asymptotic models.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::boundary::{BoundaryPair, CanonicalBoundary, ChannelKind, DEFAULT_CLASS_TOL};
use crate::error::{Error, Result};
use crate::jost::{checked_inverse, jost_matrix, JostOptions, SpectralPoint, CONDITION_LIMIT};
use crate::matkernel::{self, c, condition_number, inverse, paper_norm, unitarity_defect, ComplexMatrix, I};
use crate::potential::{MomentSet, PotentialModel};

#[derive(Debug, Clone)]
pub struct ScatteringSample {
    pub k: f64,
    pub s: ComplexMatrix,
    pub unitarity_defect: f64,
    pub err_est: f64,
}

/// `S(k) = -J(-k) J(k)^{-1}` for real `k != 0`.
pub fn s_matrix(
    p: &PotentialModel,
    bp: &BoundaryPair,
    k: f64,
    opts: &JostOptions,
) -> Result<ScatteringSample> {
    if k == 0.0 || !k.is_finite() {
        return Err(Error::InvalidArgument(format!("S(k) needs real k != 0, got {k}")));
    }
    let jp = jost_matrix(p, bp, SpectralPoint::real(k)?, opts)?;
    let jm = jost_matrix(p, bp, SpectralPoint::real(-k)?, opts)?;
    let jinv = checked_inverse(&jp.j, k)?;
    let s = -&jm.j * &jinv;
    let err_est = paper_norm(&jinv) * (jm.err_est + paper_norm(&s) * jp.err_est);
    Ok(ScatteringSample {
        k,
        unitarity_defect: unitarity_defect(&s),
        s,
        err_est,
    })
}

/// `S(k)` at every `k`, evaluated in parallel; order of results follows `ks`.
pub fn s_matrix_sweep(
    p: &PotentialModel,
    bp: &BoundaryPair,
    ks: &[f64],
    opts: &JostOptions,
) -> Vec<Result<ScatteringSample>> {
    ks.par_iter().map(|&k| s_matrix(p, bp, k, opts)).collect()
}

pub const ZERO_LIMIT_STEPS: [f64; 3] = [1e-3, 5e-4, 2.5e-4];
const ZERO_LIMIT_TOL: f64 = 1e-6;
const ZERO_LIMIT_MAX_LEVELS: usize = 8;

/// `S(0)` by Richardson extrapolation of `S(h)` over `h = 1e-3 2^{-j}`.
pub fn s_at_zero(p: &PotentialModel, bp: &BoundaryPair, opts: &JostOptions) -> Result<ComplexMatrix> {
    let inner = JostOptions::fast(opts.tol.min(1e-12));
    let mut table: Vec<Vec<ComplexMatrix>> = Vec::new();
    let mut last_diff = f64::INFINITY;
    let mut previous: Option<ComplexMatrix> = None;
    for level in 0..ZERO_LIMIT_MAX_LEVELS {
        let h = ZERO_LIMIT_STEPS[0] * 0.5f64.powi(level as i32);
        let mut row = vec![s_matrix(p, bp, h, &inner)?.s];
        for m in 1..=level {
            let factor = 2f64.powi(m as i32) - 1.0;
            let prev = &table[level - 1][m - 1];
            let next = &row[m - 1] + (&row[m - 1] - prev) * c(1.0 / factor, 0.0);
            row.push(next);
        }
        let estimate = row[level].clone();
        table.push(row);
        if let Some(prev) = previous {
            let diff = paper_norm(&(&estimate - &prev));
            if diff < ZERO_LIMIT_TOL && level >= 2 {
                return Ok(estimate);
            }
            if level >= 3 && diff > 4.0 * last_diff && diff > ZERO_LIMIT_TOL {
                return Err(Error::ExtrapolationDivergence);
            }
            last_diff = diff;
        }
        previous = Some(estimate);
    }
    Err(Error::ExtrapolationDivergence)
}

/// Zero-potential Jost matrix, its inverse and scattering matrix.
#[derive(Debug, Clone)]
pub struct FreeReference {
    pub j0: ComplexMatrix,
    pub j0_inv: ComplexMatrix,
    pub s0: ComplexMatrix,
}

/// Diagonal entries of the canonical `J~0(k)` and `S~0(k)`.
fn canonical_entries(cb: &CanonicalBoundary, k: Complex64) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut j = Vec::with_capacity(cb.n());
    let mut s = Vec::with_capacity(cb.n());
    for (idx, &theta) in cb.theta.iter().enumerate() {
        match cb.kind(idx) {
            ChannelKind::Dirichlet => {
                j.push(c(-1.0, 0.0));
                s.push(c(-1.0, 0.0));
            }
            ChannelKind::Neumann => {
                j.push(I * k);
                s.push(c(1.0, 0.0));
            }
            ChannelKind::Mixed => {
                let (sn, cs) = theta.sin_cos();
                let jk = cs + I * k * sn;
                j.push(jk);
                s.push((-cs + I * k * sn) / jk);
            }
        }
    }
    (j, s)
}

/// Closed-form quantities for `V = 0`.
pub fn s0_reference(bp: &BoundaryPair, k: Complex64) -> Result<FreeReference> {
    let a = bp.a();
    let b = bp.b();
    if bp.is_diagonal() {
        let j0 = b - a * (I * k);
        if condition_number(&j0) > CONDITION_LIMIT {
            return Err(Error::SingularJ0);
        }
        let j0_inv = inverse(&j0).map_err(|_| Error::SingularJ0)?;
        let s0 = -(b + a * (I * k)) * &j0_inv;
        return Ok(FreeReference { j0, j0_inv, s0 });
    }
    let cb = bp.canonicalize()?;
    let (jt, st) = canonical_entries(&cb, k);
    if jt.iter().any(|z| z.norm() < 1e-12) {
        return Err(Error::SingularJ0);
    }
    let md = cb.m.adjoint();
    let t1_inv = inverse(&cb.t1)?;
    let t2_inv = inverse(&cb.t2)?;
    let jt_inv: Vec<Complex64> = jt.iter().map(|z| 1.0 / z).collect();
    let j0 = &cb.m * matkernel::diag(&jt) * t2_inv * &md * t1_inv;
    let j0_inv = &cb.t1 * &cb.m * &cb.t2 * matkernel::diag(&jt_inv) * &md;
    let s0 = &cb.m * matkernel::diag(&st) * &md;
    Ok(FreeReference { j0, j0_inv, s0 })
}

/// `S(inf) + G(k)/(ik)` and its ingredients.
#[derive(Debug, Clone)]
pub struct AsymptoticModel {
    pub canonical: CanonicalBoundary,
    pub s_inf: ComplexMatrix,
    pub z0: ComplexMatrix,
    pub z1: ComplexMatrix,
    pub moments: MomentSet,
}

impl AsymptoticModel {
    pub fn new(p: &PotentialModel, bp: &BoundaryPair) -> Result<Self> {
        if p.n() != bp.n() {
            return Err(Error::DimensionMismatch {
                expected: p.n(),
                actual: bp.n(),
            });
        }
        let canonical = bp.canonicalize_with_tol(DEFAULT_CLASS_TOL)?;
        Ok(Self {
            s_inf: canonical.s_infinity(),
            z0: canonical.z0(),
            z1: canonical.z1(),
            canonical,
            moments: p.moments()?,
        })
    }

    /// `G(k) = -2 M Z1 M^dagger + Q1 S + S Q1 + S Q2(k) S + Q2(-k)`, `S = S(inf)`.
    pub fn g(&self, k: f64) -> Result<ComplexMatrix> {
        let m = &self.canonical.m;
        let si = &self.s_inf;
        let q1 = &self.moments.q1;
        let q2p = self.moments.q2(c(k, 0.0))?;
        let q2m = self.moments.q2(c(-k, 0.0))?;
        Ok(m * &self.z1 * m.adjoint() * c(-2.0, 0.0) + q1 * si + si * q1 + si * q2p * si + q2m)
    }

    /// First-order model of `S(k)` for real `k`.
    pub fn s_model(&self, k: f64) -> Result<ComplexMatrix> {
        Ok(&self.s_inf + self.g(k)? / (I * k))
    }
}

pub fn asymptotic_model(p: &PotentialModel, bp: &BoundaryPair) -> Result<AsymptoticModel> {
    AsymptoticModel::new(p, bp)
}

/// Truncated expansions of `f(-k*, 0)^dagger` and `f'(-k*, 0)^dagger`.
pub fn model_f_origin(moments: &MomentSet, k: Complex64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let q = moments.at(k)?;
    let n = moments.q1.nrows();
    let id = matkernel::identity(n);
    let ik = I * k;
    let f = &id + (&q.q2 - &moments.q1) / ik
        + (-&moments.q3 - &q.q4 + &q.q5 + &q.q6) / (k * k);
    let fp = &id * ik - &moments.q1 - &q.q2 + (&moments.q3 - &q.q4 + &q.q5 - &q.q6) / ik;
    Ok((f, fp))
}

/// `J(k) = -ikA + B + [Q1 + Q2(k)] A + P(k)/(ik)`.
pub fn model_j(moments: &MomentSet, bp: &BoundaryPair, k: Complex64) -> Result<ComplexMatrix> {
    let q = moments.at(k)?;
    let a = bp.a();
    let b = bp.b();
    let ik = I * k;
    let p = (&q.q2 - &moments.q1) * b + (-&moments.q3 + &q.q4 - &q.q5 + &q.q6) * a;
    Ok(-a * ik + b + (&moments.q1 + &q.q2) * a + p / ik)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::Transform;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn opts() -> JostOptions {
        JostOptions::default()
    }

    #[test]
    fn free_examples() {
        let p = PotentialModel::zero(2);
        let s = s_matrix(&p, &BoundaryPair::dirichlet(2), 1.0, &opts()).unwrap();
        assert!(paper_norm(&(s.s + matkernel::identity(2))) < 1e-14);

        let p1 = PotentialModel::zero(1);
        let bp = BoundaryPair::from_theta(&[FRAC_PI_4]).unwrap();
        let s = s_matrix(&p1, &bp, 1.0, &opts()).unwrap();
        assert!((s.s[(0, 0)] - I).norm() < 1e-14);
    }

    #[test]
    fn zero_limits() {
        let p = PotentialModel::zero(1);
        let n = s_at_zero(&p, &BoundaryPair::neumann(1), &opts()).unwrap();
        assert!((n[(0, 0)] - 1.0).norm() < 1e-9);
        let d = s_at_zero(&p, &BoundaryPair::dirichlet(1), &opts()).unwrap();
        assert!((d[(0, 0)] + 1.0).norm() < 1e-9);
        let bp = BoundaryPair::from_theta(&[FRAC_PI_4]).unwrap();
        let m = s_at_zero(&p, &bp, &opts()).unwrap();
        assert!((m[(0, 0)] + 1.0).norm() < 1e-6);
    }

    #[test]
    fn reference_forms() {
        let theta = 1.1;
        let bp = BoundaryPair::from_theta(&[theta, PI, PI / 2.0]).unwrap();
        let k = c(0.7, 0.0);
        let r = s0_reference(&bp, k).unwrap();
        let (sn, cs) = theta.sin_cos();
        assert!((r.j0[(0, 0)] - (cs + I * k * sn)).norm() < 1e-15);
        assert!((r.s0[(2, 2)] - 1.0).norm() < 1e-15);
        assert!((r.s0[(1, 1)] + 1.0).norm() < 1e-15);

        // the canonical route agrees with the direct formula for a rotated pair
        let m0 = {
            let (s, co) = 0.3f64.sin_cos();
            ComplexMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(0.0, s), c(0.0, s), c(co, 0.0)])
        };
        let bp2 = BoundaryPair::from_theta(&[theta, PI / 2.0])
            .unwrap()
            .transform(&Transform::Unitary(m0))
            .unwrap();
        assert!(!bp2.is_diagonal());
        let r2 = s0_reference(&bp2, k).unwrap();
        let direct_j0 = bp2.b() - bp2.a() * (I * k);
        let direct_s0 = -(bp2.b() + bp2.a() * (I * k)) * inverse(&direct_j0).unwrap();
        assert!(paper_norm(&(&r2.j0 - &direct_j0)) < 1e-12);
        assert!(paper_norm(&(&r2.s0 - &direct_s0)) < 1e-12);
        assert!(paper_norm(&(&r2.j0 * &r2.j0_inv - matkernel::identity(2))) < 1e-12);

        assert!(matches!(
            s0_reference(&BoundaryPair::neumann(1), c(0.0, 0.0)),
            Err(Error::SingularJ0)
        ));
    }

    #[test]
    fn zero_potential_model_is_exact() {
        let theta = 0.9;
        let p = PotentialModel::zero(1);
        let bp = BoundaryPair::from_theta(&[theta]).unwrap();
        let model = asymptotic_model(&p, &bp).unwrap();
        let g = model.g(3.0).unwrap();
        assert!((g[(0, 0)] + 2.0 / theta.tan()).norm() < 1e-14);
        let (f, fp) = model_f_origin(&model.moments, c(5.0, 0.0)).unwrap();
        assert_eq!(f, matkernel::identity(1));
        assert_eq!(fp[(0, 0)], c(0.0, 5.0));
        let j = model_j(&model.moments, &bp, c(5.0, 0.0)).unwrap();
        assert!((j - (bp.b() - bp.a() * c(0.0, 5.0))).norm() < 1e-15);
    }

    #[test]
    fn well_is_unitary() {
        let p = PotentialModel::scalar_well(-4.0, PI).unwrap();
        let bp = BoundaryPair::dirichlet(1);
        for r in s_matrix_sweep(&p, &bp, &[0.1, 1.0, 7.0], &opts()) {
            let s = r.unwrap();
            assert!(s.unitarity_defect < 1e-9);
        }
    }
}
