mod common;

use common::{example1, random_joint, rng};
use mibound::dist::mutual_information;
use mibound::oracle::{brute_force_inner, random_feasible, OracleConfig};
use mibound::{
    inner_minimize, linear_oracle, marginal_x, mi_gradient, qx_of_gamma, variational_distance, InnerProblem, JointDist,
    MarginalX, Mat2, SolveStatus, SolverConfig, ValidationPolicy,
};
use rand::Rng;

/// Floating-point allowance when comparing objective values of (near-)equal
/// points computed along different paths.
const ROUNDOFF: f64 = 1e-12;

fn random_problem<R: Rng>(rng: &mut R, my: usize) -> InnerProblem {
    let p = random_joint(rng, my);
    let eps = rng.random_range(0.02..0.8);
    let gamma = rng.random_range(-0.5..=0.5) * eps;
    InnerProblem::new(p.clone(), qx_of_gamma(&marginal_x(&p), gamma), eps).unwrap()
}

#[test]
fn example_one_matches_brute_force_at_zero_offset() {
    let p = example1();
    let prob = InnerProblem::new(p.clone(), marginal_x(&p), 0.3).unwrap();
    let fw = inner_minimize(&prob, &SolverConfig::default()).unwrap();
    let brute = brute_force_inner(&prob, &OracleConfig::for_columns(2)).unwrap();
    assert_eq!(fw.status, SolveStatus::Converged);
    assert!((fw.value.bits() - brute.value.bits()).abs() <= 1e-3, "{:?} vs {:?}", fw.value, brute.value);
    // The grid point is feasible, so it can never beat the certified minimum
    // (up to round-off between the two evaluation formulas).
    assert!(brute.value.nats() >= fw.value.nats() - fw.gap - ROUNDOFF);
}

#[test]
fn certificate_is_sound() {
    let mut rng = rng(11);
    let cfg = SolverConfig::default();
    for my in [2, 3, 5] {
        for trial in 0..6 {
            let prob = random_problem(&mut rng, my);
            let r = inner_minimize(&prob, &cfg).unwrap();
            assert_eq!(r.status, SolveStatus::Converged);
            assert!(prob.is_feasible(&r.argmin, 1e-10, 1e-9));
            for q in random_feasible(&prob, 1000, 100 + trial) {
                assert!(mutual_information(&q).nats() >= r.value.nats() - r.gap - ROUNDOFF);
            }
        }
    }
}

#[test]
fn feasible_set_is_convex() {
    let mut rng = rng(12);
    for my in [2, 4] {
        let prob = random_problem(&mut rng, my);
        let pts = random_feasible(&prob, 200, 5);
        for pair in pts.chunks(2) {
            let lambda: f64 = rng.random();
            let mix: Vec<f64> = pair[0]
                .as_slice()
                .iter()
                .zip(pair[1].as_slice())
                .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
                .collect();
            let v = mibound::dist::l1_distance(&mix, prob.p().as_slice()).unwrap();
            assert!(v <= prob.eps() + 1e-12);
        }
    }
}

#[test]
fn value_is_monotone_in_radius() {
    let mut rng = rng(13);
    let cfg = SolverConfig::default();
    for my in [2, 3, 6] {
        let p = random_joint(&mut rng, my);
        let qx = qx_of_gamma(&marginal_x(&p), 0.01);
        let mut last = f64::INFINITY;
        for eps in [0.02, 0.05, 0.1, 0.2, 0.4, 0.8, 1.2, 2.0] {
            let r = inner_minimize(&InnerProblem::new(p.clone(), qx, eps).unwrap(), &cfg).unwrap();
            assert!(r.value.nats() <= last + cfg.gap_tol, "eps {eps}: {} > {last}", r.value.nats());
            last = r.value.nats();
        }
    }
}

#[test]
fn column_permutation_equivariance() {
    let mut rng = rng(14);
    let cfg = SolverConfig::default();
    for my in [3, 5] {
        let prob = random_problem(&mut rng, my);
        let base = inner_minimize(&prob, &cfg).unwrap();
        let perm: Vec<usize> = (0..my).rev().collect();
        let permuted = InnerProblem::new(prob.p().permute_cols(&perm), prob.qx(), prob.eps()).unwrap();
        let r = inner_minimize(&permuted, &cfg).unwrap();
        assert!((r.value.nats() - base.value.nats()).abs() <= r.gap.max(base.gap) + 1e-9);
        let back = base.argmin.permute_cols(&perm);
        assert!(variational_distance(&back, &r.argmin).unwrap() < 1e-3);
    }
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = rng(15);
    let h = 1e-6;
    for _ in 0..100 {
        let my = rng.random_range(2..=6);
        let q = random_joint(&mut rng, my);
        let g = mi_gradient(&q, 1e-12);
        // Random direction with zero row sums.
        let mut d = Mat2::zeros(my);
        for i in 0..2 {
            let row: Vec<f64> = (0..my).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mean = row.iter().sum::<f64>() / my as f64;
            for (j, v) in row.iter().enumerate() {
                d.set(i, j, v - mean);
            }
        }
        let shifted = |t: f64| {
            let data: Vec<f64> = q.as_slice().iter().zip(d.as_slice()).map(|(a, b)| a + t * b).collect();
            let m = Mat2::from_flat(data, my).unwrap();
            mutual_information(&JointDist::new(&m.to_rows(), ValidationPolicy::Strict).unwrap()).nats()
        };
        let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
        let analytic = g.dot(&d);
        assert!((fd - analytic).abs() <= 1e-5 * analytic.abs().max(1e-3), "fd {fd} vs {analytic}");
    }
}

#[test]
fn oracle_never_beaten_by_feasible_points() {
    let mut rng = rng(16);
    for my in [3, 4] {
        let prob = random_problem(&mut rng, my);
        for _ in 0..20 {
            let g = Mat2::from_flat((0..2 * my).map(|_| rng.random_range(-3.0..3.0)).collect(), my).unwrap();
            let s = linear_oracle(&g, &prob).unwrap();
            assert!(prob.is_feasible(&s, 1e-12, 1e-12));
            let best = g.dot(s.values());
            for q in random_feasible(&prob, 300, 9) {
                assert!(g.dot(q.values()) >= best - 1e-12);
            }
        }
    }
}

#[test]
fn zero_radius_and_empty_row() {
    let p = JointDist::new(&[[0.6, 0.4, 0.0], [0.0, 0.0, 0.0]], ValidationPolicy::Strict).unwrap();
    let prob = InnerProblem::new(p, MarginalX::new([0.7, 0.3]).unwrap(), 0.6).unwrap();
    let r = inner_minimize(&prob, &SolverConfig::default()).unwrap();
    assert_eq!(r.status, SolveStatus::Converged);
    assert!(prob.is_feasible(&r.argmin, 1e-10, 1e-9));
    assert!(r.value.nats() <= 1e-7);
}
