#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};

use halfline_core::boundary::Transform;
use halfline_core::matkernel::{c, real_diag, ComplexMatrix};
use halfline_core::{BoundaryPair, PotentialModel};

pub struct Problem {
    pub name: &'static str,
    pub potential: PotentialModel,
    pub boundary: BoundaryPair,
    /// Only Dirichlet channels.
    pub dirichlet: bool,
}

fn problem(name: &'static str, potential: PotentialModel, boundary: BoundaryPair) -> Problem {
    let cb = boundary.canonicalize().unwrap();
    Problem {
        name,
        dirichlet: cb.n_mixed + cb.n_neumann == 0,
        potential,
        boundary,
    }
}

pub fn well(depth: f64, width: f64) -> PotentialModel {
    PotentialModel::scalar_well(depth, width).unwrap()
}

pub fn robin(theta: f64) -> BoundaryPair {
    BoundaryPair::from_theta(&[theta]).unwrap()
}

pub fn free_robin_family() -> Vec<Problem> {
    [
        ("free robin pi/6", FRAC_PI_6),
        ("free robin pi/4", FRAC_PI_4),
        ("free robin pi/3", FRAC_PI_3),
        ("free robin 2pi/3", 2.0 * FRAC_PI_3),
        ("free robin 3pi/4", 3.0 * FRAC_PI_4),
    ]
    .into_iter()
    .map(|(name, t)| problem(name, PotentialModel::zero(1), robin(t)))
    .collect()
}

pub fn dirichlet_well() -> Problem {
    problem("dirichlet well", well(-4.0, PI), BoundaryPair::dirichlet(1))
}

/// `V = -9/4` on `[0, pi]`: `q = 3/2` puts a zero-energy resonance at the
/// Dirichlet threshold.
pub fn resonance_well() -> Problem {
    problem("resonance well", well(-2.25, PI), BoundaryPair::dirichlet(1))
}

pub fn neumann_dirichlet() -> Problem {
    problem(
        "free neumann+dirichlet",
        PotentialModel::zero(2),
        BoundaryPair::neumann(1).direct_sum(&BoundaryPair::dirichlet(1)),
    )
}

pub fn block_well_robin() -> Problem {
    let v = well(-4.0, PI).direct_sum(&well(-1.0, FRAC_PI_2)).unwrap();
    problem(
        "block dirichlet well + robin well",
        v,
        BoundaryPair::dirichlet(1).direct_sum(&robin(FRAC_PI_3)),
    )
}

pub fn block_neumann_robin() -> Problem {
    let v = PotentialModel::piecewise_constant(
        vec![0.0, FRAC_PI_4, PI],
        vec![real_diag(&[1.5, -0.5]), real_diag(&[-2.0, 0.75])],
    )
    .unwrap();
    problem(
        "block neumann + robin",
        v,
        BoundaryPair::neumann(1).direct_sum(&robin(2.0 * FRAC_PI_3)),
    )
}

pub fn dense_potential() -> PotentialModel {
    let m = |a: f64, d: f64, re: f64, im: f64| {
        ComplexMatrix::from_row_slice(2, 2, &[c(a, 0.0), c(re, im), c(re, -im), c(d, 0.0)])
    };
    PotentialModel::piecewise_constant(
        vec![0.0, PI / 8.0, FRAC_PI_2, 3.0 * PI / 4.0],
        vec![
            m(-3.0, -1.0, 0.8, 0.6),
            m(-1.5, -2.5, -0.4, 1.1),
            m(0.5, -1.0, 0.3, -0.2),
        ],
    )
    .unwrap()
}

pub fn rotation() -> ComplexMatrix {
    let (s, co) = 0.7f64.sin_cos();
    let e = c(0.0, 0.4).exp();
    ComplexMatrix::from_row_slice(2, 2, &[c(co, 0.0), -e.conj() * s, e * s, c(co, 0.0)])
}

pub fn messy_t() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c(1.3, 0.2), c(-0.4, 0.5), c(0.1, -0.3), c(0.9, 0.0)])
}

/// Dense `V` with a non-diagonal boundary pair (one mixed, one Dirichlet
/// channel, rotated and reparametrized).
pub fn dense_mixed() -> Problem {
    let bp = BoundaryPair::from_theta(&[2.0 * PI / 5.0, PI])
        .unwrap()
        .transform(&Transform::Unitary(rotation()))
        .unwrap()
        .transform(&Transform::RightMultiply(messy_t()))
        .unwrap();
    problem("dense n=2 non-diagonal", dense_potential(), bp)
}

pub fn dense_dirichlet() -> Problem {
    problem("dense n=2 dirichlet", dense_potential(), BoundaryPair::dirichlet(2))
}

pub fn regression_set() -> Vec<Problem> {
    let mut v = free_robin_family();
    v.extend([
        dirichlet_well(),
        resonance_well(),
        neumann_dirichlet(),
        block_well_robin(),
        block_neumann_robin(),
        dense_mixed(),
        dense_dirichlet(),
    ]);
    v
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| (lo.ln() + (hi / lo).ln() * j as f64 / (n - 1) as f64).exp())
        .collect()
}
