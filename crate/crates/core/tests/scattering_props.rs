mod common;

use std::f64::consts::PI;

use halfline_core::boundary::Transform;
use halfline_core::jost::{jost_matrix, JostOptions, SpectralPoint};
use halfline_core::matkernel::{self, c, lsq_slope, paper_norm, ComplexMatrix, I};
use halfline_core::scattering::{asymptotic_model, s0_reference, s_at_zero, s_matrix};
use halfline_core::{BoundaryPair, PotentialModel};
use proptest::prelude::*;

fn opts() -> JostOptions {
    JostOptions::default()
}

fn matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
        .prop_map(move |v| ComplexMatrix::from_fn(n, n, |i, j| c(v[i * n + j].0, v[i * n + j].1)))
}

fn pair() -> impl Strategy<Value = BoundaryPair> {
    (1usize..=4)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(prop_oneof![Just(PI), Just(PI / 2.0), 0.1f64..3.0], n),
                matrix(n),
                matrix(n),
            )
        })
        .prop_map(|(theta, u, t)| {
            let n = theta.len();
            let u = (u + matkernel::identity(n) * c(2.0, 0.0)).qr().q();
            let t = t + matkernel::identity(n) * c(2.5, 0.0);
            BoundaryPair::from_theta(&theta)
                .unwrap()
                .transform(&Transform::Unitary(u))
                .unwrap()
                .transform(&Transform::RightMultiply(t))
                .unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn zero_potential_matches_closed_form(bp in pair(), k in 0.05f64..40.0) {
        let p = PotentialModel::zero(bp.n());
        for k in [k, -k] {
            let s = s_matrix(&p, &bp, k, &opts()).unwrap().s;
            let s0 = s0_reference(&bp, c(k, 0.0)).unwrap().s0;
            prop_assert!(paper_norm(&(s - s0)) <= 1e-10);
        }
    }

    #[test]
    fn right_multiplication_leaves_s_unchanged(t in matrix(2), k in 0.1f64..30.0) {
        let pr = common::dense_mixed();
        let t = t + matkernel::identity(2) * c(2.0, 0.0);
        let moved = pr.boundary.transform(&Transform::RightMultiply(t)).unwrap();
        let s1 = s_matrix(&pr.potential, &pr.boundary, k, &opts()).unwrap().s;
        let s2 = s_matrix(&pr.potential, &moved, k, &opts()).unwrap().s;
        prop_assert!(paper_norm(&(s1 - s2)) <= 1e-9);
    }
}

fn dyadic(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|j| 2f64.powi(j)).collect()
}

fn decay(ks: &[f64], rs: &[f64]) -> f64 {
    let xs: Vec<f64> = ks.iter().map(|k| k.ln()).collect();
    let ys: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
    -lsq_slope(&xs, &ys)
}

/// `(J J0^{-1} - I, J0^{-1} J - I, J J0^{-1} - I + [Q1 + Q2 S(inf)]/(ik))` at real `k`.
fn j_residuals(pr: &common::Problem, k: f64) -> (f64, f64, f64) {
    let model = asymptotic_model(&pr.potential, &pr.boundary).unwrap();
    let kc = c(k, 0.0);
    let j = jost_matrix(&pr.potential, &pr.boundary, SpectralPoint::real(k).unwrap(), &JostOptions::with_tol(1e-12))
        .unwrap()
        .j;
    let j0_inv = s0_reference(&pr.boundary, kc).unwrap().j0_inv;
    let id = matkernel::identity(pr.potential.n());
    let left = &j * &j0_inv - &id;
    let right = &j0_inv * &j - &id;
    let corr = (&model.moments.q1 + model.moments.q2(kc).unwrap() * &model.s_inf) / (I * k);
    (paper_norm(&left), paper_norm(&right), paper_norm(&(left + corr)))
}

#[test]
fn jost_matrix_second_order_expansion() {
    let ks = dyadic(4, 8);
    for pr in common::regression_set() {
        if pr.potential.l1_norm() == 0.0 {
            continue;
        }
        let r: Vec<(f64, f64, f64)> = ks.iter().map(|&k| j_residuals(&pr, k)).collect();
        let first: Vec<f64> = r.iter().map(|x| x.0).collect();
        let second: Vec<f64> = r.iter().map(|x| x.2).collect();
        assert!(decay(&ks, &second) >= 1.9, "{}: {second:?}", pr.name);
        // J J0^{-1} = I + O(1/k): k |J J0^{-1} - I| stays bounded
        let scaled: Vec<f64> = ks.iter().zip(&first).map(|(k, r)| k * r).collect();
        let (lo, hi) = scaled.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        assert!(hi <= 2.0 * lo, "{}: {scaled:?}", pr.name);
    }
}

#[test]
fn right_factor_form_holds_for_decoupled_channels() {
    let ks = dyadic(4, 8);
    for pr in [common::dirichlet_well(), common::block_well_robin(), common::block_neumann_robin()] {
        let right: Vec<f64> = ks.iter().map(|&k| j_residuals(&pr, k).1).collect();
        assert!(decay(&ks, &right) >= 0.9, "{}: {right:?}", pr.name);
    }
}

/// A dense potential coupling a mixed and a Dirichlet channel: `J0^{-1} J - I`
/// does not decay even though `J J0^{-1} - I` does.
#[test]
fn right_factor_form_fails_under_mixed_dirichlet_coupling() {
    let pr = common::Problem {
        name: "dense mixed+dirichlet",
        potential: common::dense_potential(),
        boundary: BoundaryPair::from_theta(&[1.0, PI]).unwrap(),
        dirichlet: false,
    };
    let ks = dyadic(4, 8);
    let r: Vec<(f64, f64, f64)> = ks.iter().map(|&k| j_residuals(&pr, k)).collect();
    let left: Vec<f64> = r.iter().map(|x| x.0).collect();
    let right: Vec<f64> = r.iter().map(|x| x.1).collect();
    assert!(decay(&ks, &left) >= 0.9, "{left:?}");
    assert!(decay(&ks, &right) < 0.3, "{right:?}");
}

#[test]
fn det_j_large_k_order_counts_mixed_and_neumann() {
    let ks = dyadic(6, 9);
    for pr in common::regression_set() {
        let cb = pr.boundary.canonicalize().unwrap();
        let slope = halfline_core::spectrum::detj_order(&pr.potential, &pr.boundary, &ks, &opts()).unwrap();
        let expect = (cb.n_mixed + cb.n_neumann) as f64;
        assert!((slope - expect).abs() <= 0.05, "{}: {slope}", pr.name);
    }
}

#[test]
fn s_at_zero_for_free_channels() {
    // mixed and Dirichlet channels reflect with -1, Neumann with +1
    let p = PotentialModel::zero(3);
    let bp = BoundaryPair::from_theta(&[1.0, PI, PI / 2.0]).unwrap();
    let s0 = s_at_zero(&p, &bp, &opts()).unwrap();
    let expect = matkernel::real_diag(&[-1.0, -1.0, 1.0]);
    assert!(paper_norm(&(s0 - expect)) <= 1e-8);
}

#[test]
fn s_approaches_its_high_energy_limit() {
    for pr in common::regression_set() {
        let model = asymptotic_model(&pr.potential, &pr.boundary).unwrap();
        let s = s_matrix(&pr.potential, &pr.boundary, 4096.0, &opts()).unwrap().s;
        assert!(paper_norm(&(s - &model.s_inf)) <= 5e-3, "{}", pr.name);
    }
}
