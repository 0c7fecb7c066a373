mod common;

use halfline_core::boundary::Transform;
use halfline_core::jost::{jost_matrix, JostOptions, SpectralPoint};
use halfline_core::matkernel::{self, inverse, paper_norm};
use halfline_core::spectrum::{
    detj_smallk_order, find_bound_states, mu_from_s_zero, BoundState, BoundStateSearch, DEFAULT_MU_TOL,
};
use halfline_core::{BoundaryPair, PotentialModel};
use proptest::prelude::*;

fn opts() -> JostOptions {
    JostOptions::default()
}

fn bound_states(p: &PotentialModel, bp: &BoundaryPair) -> Vec<BoundState> {
    find_bound_states(p, bp, &BoundStateSearch::default(), &opts()).unwrap()
}

#[test]
fn kernel_dimensions_equal_winding() {
    for pr in common::regression_set() {
        for b in bound_states(&pr.potential, &pr.boundary) {
            assert!(!b.mismatch, "{} at {}", pr.name, b.kappa);
            assert_eq!(b.kernel_j.dim, b.multiplicity, "{}", pr.name);
            assert_eq!(b.kernel_jdag.dim, b.multiplicity, "{}", pr.name);
            assert_eq!(b.winding, b.multiplicity as i64, "{}", pr.name);
        }
    }
}

#[test]
fn inverse_jost_matrix_has_simple_poles() {
    for pr in common::regression_set() {
        for b in bound_states(&pr.potential, &pr.boundary) {
            let mut scaled = Vec::new();
            for j in 0..=8 {
                let d = 1e-4 * 10f64.powf(j as f64 / 4.0);
                for kp in [b.kappa - d, b.kappa + d] {
                    if kp <= 0.0 {
                        continue;
                    }
                    let jm = jost_matrix(&pr.potential, &pr.boundary, SpectralPoint::imag(kp).unwrap(), &opts()).unwrap().j;
                    scaled.push(d * paper_norm(&inverse(&jm).unwrap()));
                }
            }
            let lo = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = scaled.iter().cloned().fold(0.0, f64::max);
            assert!(hi < 4.0 * lo, "{} at {}: {lo} .. {hi}", pr.name, b.kappa);
        }
    }
}

#[test]
fn bound_state_count_is_additive_over_direct_sums() {
    let pairs = [
        (common::dirichlet_well(), common::block_neumann_robin()),
        (common::block_well_robin(), common::free_robin_family().remove(1)),
        (common::resonance_well(), common::dense_mixed()),
    ];
    let count = |p: &PotentialModel, bp: &BoundaryPair| -> usize {
        bound_states(p, bp).iter().map(|b| b.multiplicity).sum()
    };
    for (a, b) in pairs {
        let p = a.potential.direct_sum(&b.potential).unwrap();
        let bp = a.boundary.direct_sum(&b.boundary);
        let (na, nb) = (count(&a.potential, &a.boundary), count(&b.potential, &b.boundary));
        assert_eq!(count(&p, &bp), na + nb, "{} + {}", a.name, b.name);
    }
}

#[test]
fn right_multiplication_keeps_bound_states() {
    for pr in [common::dense_mixed(), common::block_well_robin()] {
        let n = pr.potential.n();
        let t = common::messy_t();
        let t = if t.nrows() == n { t } else { matkernel::identity(n) };
        let moved = pr.boundary.transform(&Transform::RightMultiply(t)).unwrap();
        let (a, b) = (bound_states(&pr.potential, &pr.boundary), bound_states(&pr.potential, &moved));
        assert_eq!(a.len(), b.len(), "{}", pr.name);
        for (x, y) in a.iter().zip(&b) {
            assert!((x.kappa - y.kappa).abs() <= 1e-9, "{}", pr.name);
            assert_eq!(x.multiplicity, y.multiplicity);
        }
    }
}

#[test]
fn small_k_order_agrees_with_s_zero() {
    for pr in common::regression_set() {
        let order = detj_smallk_order(&pr.potential, &pr.boundary, &opts()).unwrap();
        let mu = mu_from_s_zero(&pr.potential, &pr.boundary, DEFAULT_MU_TOL, &opts()).unwrap();
        assert!((order - mu as f64).abs() <= 0.05, "{}: order {order}, mu {mu}", pr.name);
    }
}

/// Roots of `q cot q = -kappa` with `q = sqrt(depth - kappa^2)` (unit width).
fn well_roots(depth: f64) -> Vec<f64> {
    let g = |kappa: f64| {
        let q = (depth - kappa * kappa).sqrt();
        q * q.cos() + kappa * q.sin()
    };
    let top = depth.sqrt();
    let m = 20000;
    let mut roots = Vec::new();
    for j in 1..m {
        let (mut a, mut b) = (top * j as f64 / m as f64, top * (j + 1) as f64 / m as f64);
        if j + 1 == m || g(a) * g(b) > 0.0 {
            continue;
        }
        for _ in 0..100 {
            let mid = 0.5 * (a + b);
            if g(a) * g(mid) <= 0.0 {
                b = mid;
            } else {
                a = mid;
            }
        }
        roots.push(0.5 * (a + b));
    }
    roots
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn dirichlet_well_matches_shooting(depth in 1.0f64..120.0) {
        // stay away from thresholds, where a state sits at kappa -> 0
        let q = depth.sqrt() / std::f64::consts::PI - 0.5;
        prop_assume!((q - q.round()).abs() > 0.05);
        let p = PotentialModel::scalar_well(-depth, 1.0).unwrap();
        let found = bound_states(&p, &BoundaryPair::dirichlet(1));
        let oracle = well_roots(depth);
        prop_assert_eq!(found.len(), oracle.len());
        let mut kappas: Vec<f64> = found.iter().map(|b| b.kappa).collect();
        kappas.sort_by(f64::total_cmp);
        for (k, r) in kappas.iter().zip(&oracle) {
            prop_assert!((k - r).abs() <= 1e-7, "{} vs {}", k, r);
        }
    }
}
