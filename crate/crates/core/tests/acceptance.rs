//! End-to-end acceptance checks. Each test prints one PASS/FAIL line.

mod common;

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};

use halfline_core::boundary::Transform;
use halfline_core::jost::{
    jost_matrix, jost_solution, physical_solution, physical_solution_regular, regular_solution,
    wronskian, JostOptions, SpectralPoint,
};
use halfline_core::matkernel::{self, c, lsq_slope, paper_norm, ComplexMatrix, I};
use halfline_core::scattering::{asymptotic_model, s_matrix};
use halfline_core::spectrum::{
    derivative_identity_check, detj_order, detj_smallk_order, find_bound_states, levinson_dirichlet_convention,
    levinson_verify, mu_from_s_zero, BoundStateSearch, LevinsonReport, PhaseGrid, DEFAULT_MU_TOL,
};
use halfline_core::{BoundaryPair, PotentialModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::Problem;

fn report(id: u32, name: &str, ok: bool, detail: String) {
    println!("criterion {id:>2} [{}] {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} failed: {detail}");
}

fn opts() -> JostOptions {
    JostOptions::default()
}

fn levinson(pr: &Problem) -> LevinsonReport {
    levinson_verify(
        &pr.potential,
        &pr.boundary,
        &PhaseGrid::default(),
        &BoundStateSearch::default(),
        DEFAULT_MU_TOL,
        &opts(),
    )
    .unwrap_or_else(|e| panic!("{}: {e}", pr.name))
}

fn random_complex(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    random_complex(rng, n).qr().q()
}

/// A valid pair built from random channel angles, a random unitary and a
/// random reparametrization.
fn random_pair(rng: &mut ChaCha8Rng, n: usize) -> BoundaryPair {
    let theta: Vec<f64> = (0..n)
        .map(|_| match rng.gen_range(0..4) {
            0 => PI,
            1 => PI / 2.0,
            _ => rng.gen_range(0.1..3.0),
        })
        .collect();
    let t = random_complex(rng, n) + matkernel::identity(n) * c(2.0, 0.0);
    BoundaryPair::from_theta(&theta)
        .unwrap()
        .transform(&Transform::Unitary(random_unitary(rng, n)))
        .unwrap()
        .transform(&Transform::RightMultiply(t))
        .unwrap()
}

#[test]
fn criterion_01_zero_potential_jost_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let ks = [c(0.1, 0.0), c(1.0, 0.0), c(10.0, 0.0), c(0.0, 1.0), c(0.0, 2.0)];
    let mut worst: f64 = 0.0;
    for trial in 0..20 {
        let n = 1 + trial % 4;
        let bp = random_pair(&mut rng, n);
        let p = PotentialModel::zero(n);
        for &k in &ks {
            let j = jost_matrix(&p, &bp, SpectralPoint::new(k).unwrap(), &opts()).unwrap().j;
            let free = bp.b() - bp.a() * (I * k);
            worst = worst.max(paper_norm(&(j - free)));
        }
    }
    report(1, "zero-potential Jost matrix", worst <= 1e-9, format!("max ||J - (B - ikA)|| = {worst:.2e}"));
}

#[test]
fn criterion_02_unitarity_and_symmetry() {
    let ks = common::log_grid(0.05, 50.0, 50);
    let mut worst_u: f64 = 0.0;
    let mut worst_s: f64 = 0.0;
    for pr in common::regression_set() {
        for &k in &ks {
            let sp = s_matrix(&pr.potential, &pr.boundary, k, &opts()).unwrap();
            let sm = s_matrix(&pr.potential, &pr.boundary, -k, &opts()).unwrap();
            worst_u = worst_u.max(sp.unitarity_defect);
            worst_s = worst_s.max(paper_norm(&(&sm.s - sp.s.adjoint())));
        }
    }
    report(
        2,
        "unitarity and symmetry of S",
        worst_u <= 1e-8 && worst_s <= 1e-8,
        format!("max ||SS* - I|| = {worst_u:.2e}, max ||S(-k) - S(k)*|| = {worst_s:.2e}"),
    );
}

#[test]
fn criterion_03_free_robin_bound_state() {
    let p = PotentialModel::zero(1);
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for theta in [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3] {
        let bp = common::robin(theta);
        let found = find_bound_states(&p, &bp, &BoundStateSearch::default(), &opts()).unwrap();
        ok &= found.len() == 1 && found[0].multiplicity == 1 && found[0].winding == 1;
        if let Some(b) = found.first() {
            worst = worst.max((b.kappa - 1.0 / theta.tan()).abs());
        }
    }
    for theta in [2.0 * FRAC_PI_3, 3.0 * FRAC_PI_4] {
        let bp = common::robin(theta);
        ok &= find_bound_states(&p, &bp, &BoundStateSearch::default(), &opts())
            .unwrap()
            .is_empty();
    }
    ok &= worst <= 1e-8;
    report(3, "free Robin bound state", ok, format!("max |kappa - cot theta| = {worst:.2e}"));
}

/// Roots of `q cot(q pi) = -kappa`, `q = sqrt(4 - kappa^2)`, by bisection on
/// `q cos(q pi) + kappa sin(q pi)`.
fn shooting_roots() -> Vec<f64> {
    let g = |kappa: f64| {
        let q = (4.0 - kappa * kappa).sqrt();
        q * (q * PI).cos() + kappa * (q * PI).sin()
    };
    let grid: Vec<f64> = (1..4000).map(|j| 2.0 * j as f64 / 4000.0).collect();
    let mut roots = Vec::new();
    for w in grid.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        if g(a) * g(b) > 0.0 {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if g(a) * g(m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        roots.push(0.5 * (a + b));
    }
    roots
}

#[test]
fn criterion_04_square_well_count() {
    let pr = common::dirichlet_well();
    let oracle = shooting_roots();
    let found = find_bound_states(&pr.potential, &pr.boundary, &BoundStateSearch::default(), &opts()).unwrap();
    let mut ok = oracle.len() == 2 && found.len() == 2;
    let mut worst: f64 = 0.0;
    for (b, r) in found.iter().zip(&oracle) {
        worst = worst.max((b.kappa - r).abs());
    }
    ok &= worst <= 1e-6;
    report(
        4,
        "square-well Dirichlet count",
        ok,
        format!("found {} (oracle {}), max |dkappa| = {worst:.2e}", found.len(), oracle.len()),
    );
}

#[test]
fn criterion_05_levinson_identity() {
    let mut worst: f64 = 0.0;
    let mut worst_dirichlet: f64 = 0.0;
    let mut lines = Vec::new();
    for pr in common::regression_set() {
        let r = levinson(&pr);
        let res = r.identity_residual / PI;
        worst = worst.max(res.abs());
        if pr.dirichlet {
            let delta = levinson_dirichlet_convention(&r).unwrap();
            let expect = PI * (r.n_total as f64 + 0.5 * r.mu as f64);
            worst_dirichlet = worst_dirichlet.max(((delta - expect) / PI).abs());
        }
        lines.push(format!("{}: N={} mu={} res/pi={res:.1e}", pr.name, r.n_total, r.mu));
    }
    for l in &lines {
        println!("    {l}");
    }
    report(
        5,
        "Levinson integer identity",
        worst <= 1e-3 && worst_dirichlet <= 1e-3,
        format!("max |residual|/pi = {worst:.2e}, Dirichlet convention max = {worst_dirichlet:.2e}"),
    );
}

fn decay_order(ks: &[f64], values: &[f64]) -> f64 {
    let xs: Vec<f64> = ks.iter().map(|k| k.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    -lsq_slope(&xs, &ys)
}

#[test]
fn criterion_06_high_energy_order() {
    let ks: Vec<f64> = (4..=8).map(|j| 2f64.powi(j)).collect();
    let tight = JostOptions::with_tol(1e-12);
    let mut min_second = f64::INFINITY;
    let mut min_first = f64::INFINITY;
    for pr in common::regression_set() {
        let model = asymptotic_model(&pr.potential, &pr.boundary).unwrap();
        let mut second = Vec::new();
        let mut first = Vec::new();
        for &k in &ks {
            let s = s_matrix(&pr.potential, &pr.boundary, k, &tight).unwrap().s;
            first.push(paper_norm(&(&s - &model.s_inf)));
            second.push(paper_norm(&(&s - model.s_model(k).unwrap())));
        }
        // S = S(inf) exactly (e.g. pure Dirichlet, V = 0) carries no order information
        if first.iter().all(|v| *v < 1e-12) {
            continue;
        }
        let o2 = decay_order(&ks, &second);
        let o1 = decay_order(&ks, &first);
        println!("    {}: first-order slope {o1:.3}, residual slope {o2:.3}", pr.name);
        if second.iter().all(|v| *v > 1e-13) {
            min_second = min_second.min(o2);
        }
        min_first = min_first.min(o1);
    }
    report(
        6,
        "high-energy order",
        min_second >= 1.9 && min_first >= 0.9,
        format!("min residual slope {min_second:.3}, min first-order slope {min_first:.3}"),
    );
}

#[test]
fn criterion_07_det_j_orders() {
    let large: Vec<f64> = (6..=9).map(|j| 2f64.powi(j)).collect();
    let mut worst_large: f64 = 0.0;
    let mut worst_small: f64 = 0.0;
    let mut mus = Vec::new();
    let mut ok = true;
    for pr in common::regression_set() {
        let cb = pr.boundary.canonicalize().unwrap();
        let order = detj_order(&pr.potential, &pr.boundary, &large, &opts()).unwrap();
        worst_large = worst_large.max((order - (cb.n_mixed + cb.n_neumann) as f64).abs());
        let small = detj_smallk_order(&pr.potential, &pr.boundary, &opts()).unwrap();
        let mu = mu_from_s_zero(&pr.potential, &pr.boundary, DEFAULT_MU_TOL, &opts()).unwrap();
        worst_small = worst_small.max((small - mu as f64).abs());
        mus.push(mu);
    }
    // problems engineered to have mu = 1
    for pr in [common::resonance_well(), common::neumann_dirichlet()] {
        ok &= mu_from_s_zero(&pr.potential, &pr.boundary, DEFAULT_MU_TOL, &opts()).unwrap() == 1;
    }
    ok &= mus.contains(&0) && mus.contains(&1);
    ok &= worst_large <= 0.05 && worst_small <= 0.05;
    report(
        7,
        "det J orders",
        ok,
        format!("max large-k deviation {worst_large:.3}, max small-k deviation {worst_small:.3}"),
    );
}

#[test]
fn criterion_08_derivative_identity() {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for pr in common::regression_set() {
        let found = find_bound_states(&pr.potential, &pr.boundary, &BoundStateSearch::default(), &opts()).unwrap();
        for b in &found {
            let d = derivative_identity_check(&pr.potential, &pr.boundary, b, 1e-5, &opts()).unwrap();
            worst = worst.max(d.discrepancy);
            count += 1;
        }
    }
    report(
        8,
        "derivative identity at bound states",
        count > 0 && worst <= 1e-4,
        format!("{count} bound states, max relative discrepancy {worst:.2e}"),
    );
}

fn s_at(p: &PotentialModel, bp: &BoundaryPair, k: f64, o: &JostOptions) -> ComplexMatrix {
    s_matrix(p, bp, k, o).unwrap().s
}

#[test]
fn criterion_09_covariance() {
    let ks = [0.3, 1.0, 2.5, 9.0];
    let tight = JostOptions::with_tol(1e-12);
    let mut worst_right: f64 = 0.0;
    let mut worst_report: f64 = 0.0;
    let mut worst_unitary: f64 = 0.0;
    let mut worst_sum: f64 = 0.0;

    for pr in [common::dense_mixed(), common::block_well_robin(), common::dirichlet_well()] {
        let n = pr.boundary.n();
        let t = if n == 2 {
            common::messy_t()
        } else {
            matkernel::real_diag(&[-2.5])
        };
        let moved = pr.boundary.transform(&Transform::RightMultiply(t)).unwrap();
        for &k in &ks {
            let a = s_at(&pr.potential, &pr.boundary, k, &opts());
            let b = s_at(&pr.potential, &moved, k, &opts());
            worst_right = worst_right.max(paper_norm(&(a - b)));
        }
        let r0 = levinson(&pr);
        let r1 = levinson(&Problem {
            name: pr.name,
            potential: pr.potential.clone(),
            boundary: moved,
            dirichlet: pr.dirichlet,
        });
        let mut d = (r0.phase_at_zero - r1.phase_at_zero).abs();
        d = d.max((r0.identity_residual - r1.identity_residual).abs());
        if r0.bound_states.len() != r1.bound_states.len() || r0.mu != r1.mu {
            d = f64::INFINITY;
        }
        for (x, y) in r0.bound_states.iter().zip(&r1.bound_states) {
            d = d.max((x.kappa - y.kappa).abs());
            if x.multiplicity != y.multiplicity {
                d = f64::INFINITY;
            }
        }
        worst_report = worst_report.max(d);

        if n == 2 {
            let m0 = common::rotation();
            let p2 = pr.potential.conjugate(&m0).unwrap();
            let bp2 = pr.boundary.transform(&Transform::Unitary(m0.clone())).unwrap();
            for &k in &ks {
                let s = s_at(&pr.potential, &pr.boundary, k, &tight);
                let s2 = s_at(&p2, &bp2, k, &tight);
                worst_unitary = worst_unitary.max(paper_norm(&(m0.adjoint() * s * &m0 - s2)));
            }
        }
    }

    let (a, b) = (common::dirichlet_well(), common::block_neumann_robin());
    let p = a.potential.direct_sum(&b.potential).unwrap();
    let bp = a.boundary.direct_sum(&b.boundary);
    for &k in &ks {
        let whole = s_at(&p, &bp, k, &tight);
        let sa = s_at(&a.potential, &a.boundary, k, &tight);
        let sb = s_at(&b.potential, &b.boundary, k, &tight);
        worst_sum = worst_sum.max(paper_norm(&(whole - matkernel::direct_sum(&sa, &sb))));
    }

    report(
        9,
        "covariance and decoupling",
        worst_right <= 1e-9 && worst_report <= 1e-9 && worst_unitary <= 1e-9 && worst_sum <= 1e-9,
        format!(
            "right-multiply S {worst_right:.1e}, report {worst_report:.1e}, unitary {worst_unitary:.1e}, direct sum {worst_sum:.1e}"
        ),
    );
}

#[test]
fn criterion_10_internal_consistency() {
    let xs = [0.0, 0.4, 1.3, 2.2, 3.5];
    let mut worst_rep: f64 = 0.0;
    let mut worst_phys: f64 = 0.0;
    let mut worst_wr: f64 = 0.0;
    for pr in common::regression_set() {
        let (p, bp) = (&pr.potential, &pr.boundary);
        let n = p.n();
        for k in [0.5, 1.0, 2.0, 8.0] {
            let kp = SpectralPoint::real(k).unwrap();
            let km = SpectralPoint::real(-k).unwrap();
            let jk = jost_matrix(p, bp, kp, &opts()).unwrap();
            let jmk = jost_matrix(p, bp, km, &opts()).unwrap();
            let fp = jost_solution(p, kp, &xs, &opts()).unwrap();
            let fm = jost_solution(p, km, &xs, &opts()).unwrap();
            let phi = regular_solution(p, bp, c(k, 0.0), &xs, 1e-11).unwrap();
            for (j, _) in xs.iter().enumerate() {
                let rebuilt = (&fp[j].0 * &jmk.j - &fm[j].0 * &jk.j) / (2.0 * I * k);
                worst_rep = worst_rep.max(paper_norm(&(rebuilt - &phi.phi[j])));
            }
            for &x in &[0.7, 2.9] {
                let a = physical_solution(p, bp, k, x, &opts()).unwrap();
                let b = physical_solution_regular(p, bp, k, x, &opts()).unwrap();
                worst_phys = worst_phys.max(paper_norm(&(a - b)));
            }

            // Wronskians, relative to the integrator error estimate
            let err = (jk.err_est + jmk.err_est).max(1e-14);
            let two_ik = matkernel::identity(n) * (2.0 * I * k);
            for j in [0, 2] {
                let w = wronskian(&fp[j].0.adjoint(), &fp[j].1.adjoint(), &fp[j].0, &fp[j].1);
                worst_wr = worst_wr.max(paper_norm(&(w - &two_ik)) / (100.0 * err));
                let w0 = wronskian(&fm[j].0.adjoint(), &fm[j].1.adjoint(), &fp[j].0, &fp[j].1);
                worst_wr = worst_wr.max(paper_norm(&w0) / (100.0 * err));
            }
        }
        for kappa in [0.3, 1.7] {
            let k = SpectralPoint::imag(kappa).unwrap();
            let e = jost_matrix(p, bp, k, &opts()).unwrap();
            let f = jost_solution(p, k, &[0.0, 1.1], &opts()).unwrap();
            for (g, gp) in &f {
                // -k* = k on the imaginary axis
                let w0 = wronskian(&g.adjoint(), &gp.adjoint(), g, gp);
                let scale = paper_norm(g) * paper_norm(gp);
                worst_wr = worst_wr.max(paper_norm(&w0) / (100.0 * e.err_est.max(1e-14) * scale.max(1.0)));
            }
        }
    }
    report(
        10,
        "internal consistency",
        worst_rep <= 1e-7 && worst_phys <= 1e-7 && worst_wr <= 1.0,
        format!(
            "representation {worst_rep:.1e}, physical paths {worst_phys:.1e}, Wronskian/(100 err) {worst_wr:.2}"
        ),
    );
}
