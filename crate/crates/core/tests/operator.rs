mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ttbc_core::linalg::{
    eig_sym, j_weighted_sqrt, solve_sylvester_general, solve_sylvester_sym, spd_inv_sqrt, spd_sqrt,
    sylvester_residual,
};
use ttbc_core::operator::tangential_derivative_of_root;
use ttbc_core::{
    build_biot, build_ortho_cyl, build_scalar_wave, closed_form_ortho_operator, derive_operator,
    reduce_degenerate, validate_hyperbolicity, BiotCartesian, Geometry, Matrix64, OrthoCylElastic,
    ScalarWave, SystemCoefficients64, ToleranceConfig64, TtbcOperator64,
};

#[test]
fn spd_roots_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let n = rng.gen_range(1..=8);
        let scale = rng.gen_range(0.1..10.0);
        let m = random_spd(&mut rng, n, 1e6, scale);
        let s = spd_sqrt(&m).unwrap();
        assert!(rel(&(&s * &s), &m) <= 1e-10);
        assert!(s.asymmetry() == 0.0 || s.check_symmetric(1e-12).is_ok());
        assert!(eig_sym(&s.symmetric_part()).unwrap().min() > 0.0);
        let inv = spd_inv_sqrt(&m).unwrap();
        assert!(rel(&inv, &s.inverse().unwrap()) <= 1e-9);
        let weighted = j_weighted_sqrt(&Matrix64::identity(n), &m).unwrap();
        assert!(rel(&weighted, &s) <= 1e-10);
    }
}

#[test]
fn sylvester_solvers_on_random_problems() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let n = rng.gen_range(1..=8);
        let l = random_spd(&mut rng, n, 1e3, 1.0);
        let r = random_matrix(&mut rng, n, 1.0);
        let x = solve_sylvester_sym(&l, &r).unwrap();
        assert!(sylvester_residual(&l, &l, &r, &x) <= 1e-10);
        assert!(rel(&x, &kron_sylvester(&l, &l, &r)) <= 1e-9);
        let g = solve_sylvester_general(&l, &l, &r).unwrap();
        assert!(rel(&g, &x) <= 1e-9);
    }
}

fn random_system(rng: &mut ChaCha8Rng, n: usize, dims: usize) -> SystemCoefficients64 {
    let a = random_spd(rng, n, 1e3, 1.0);
    let b = (0..dims).map(|_| random_matrix(rng, n, 1.0)).collect();
    let d = (0..dims).map(|_| random_symmetric(rng, n, 0.3)).collect();
    let c0 = random_matrix(rng, n, 1.0);
    SystemCoefficients64::with_parts(a, b, c0, None, Some(d), &ToleranceConfig64::default())
        .unwrap()
}

/// Residuals of the two Sylvester equations defining `q` and `p`, with
/// `L = -P1`, `A^{-1}` supplied by the caller.
fn pipeline_residuals(c: &SystemCoefficients64, op: &TtbcOperator64, a_inv: &Matrix64) -> f64 {
    let l = -op.p1();
    let mut worst: f64 = 0.0;
    for (bi, qi) in c.b().iter().zip(op.q()) {
        let rhs = -&(&(a_inv * bi) * &l);
        worst = worst.max(sylvester_residual(&l, &l, &rhs, qi));
    }
    let mut rhs = -&(&(a_inv * c.c0()) * &l);
    for ((bi, di), qi) in c.b().iter().zip(c.d_tau()).zip(op.q()) {
        rhs = &rhs - &(a_inv * &(bi * di));
        rhs = &rhs - &(qi * di);
    }
    worst.max(sylvester_residual(&l, &l, &rhs, op.p_alg()))
}

#[test]
fn derived_operators_satisfy_their_equations() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let n = rng.gen_range(1..=6);
        let dims = rng.gen_range(1..=2);
        let c = random_system(&mut rng, n, dims);
        let op = derive_operator(&c).unwrap();
        let a_inv = c.a().inverse().unwrap();
        assert!(rel(&(op.p1() * op.p1()), &a_inv) <= 1e-9);
        assert!(eig_sym(&op.p1().symmetric_part()).unwrap().max() < 0.0);
        assert!(pipeline_residuals(&c, &op, &a_inv) <= 1e-9);
        assert!(rel(&(op.resolved_p1() * op.p1()), &Matrix64::identity(n)) <= 1e-9);
    }
}

#[test]
fn resolved_form_matches_its_own_sylvester_equations() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let n = rng.gen_range(1..=6);
        let c = random_system(&mut rng, n, 2);
        let op = derive_operator(&c).unwrap();
        let l = -op.p1();
        let mut rq = Vec::new();
        for (bi, got) in c.b().iter().zip(op.resolved_q()) {
            let expect = kron_sylvester(&l, &l, &(&(&l * bi) * &l));
            assert!(rel(got, &expect) <= 1e-8);
            rq.push(expect);
        }
        let mut inner = c.c0() * &l;
        for (bi, di) in c.b().iter().zip(c.d_tau()) {
            inner = &inner + &(bi * di);
        }
        let mut rhs = &l * &inner;
        for (r, di) in rq.iter().zip(c.d_tau()) {
            rhs = &rhs - &(r * di);
        }
        let expect = kron_sylvester(&l, &l, &rhs);
        assert!(rel(op.resolved_p_alg(), &expect) <= 1e-8);
    }
}

#[test]
fn scalar_pipeline_reduces_to_closed_formulas() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let a: f64 = rng.gen_range(0.01..100.0);
        let b: [f64; 2] = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
        let c0: f64 = rng.gen_range(-5.0..5.0);
        let d: [f64; 2] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let one = |x: f64| Matrix64::from_diag(&[x]);
        let c = SystemCoefficients64::with_parts(
            one(a),
            b.iter().map(|&x| one(x)).collect(),
            one(c0),
            None,
            Some(d.iter().map(|&x| one(x)).collect()),
            &ToleranceConfig64::default(),
        )
        .unwrap();
        let op = derive_operator(&c).unwrap();
        let l = 1.0 / a.sqrt();
        let q: Vec<f64> = b.iter().map(|bi| -bi / (2.0 * a)).collect();
        let deriv: f64 = (0..2).map(|i| (b[i] / a + q[i]) * d[i]).sum::<f64>();
        let p = -c0 / (2.0 * a) - deriv / (2.0 * l);
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * y.abs().max(1.0);
        assert!(close(op.p1()[(0, 0)], -l));
        assert!(close(op.q()[0][(0, 0)], q[0]) && close(op.q()[1][(0, 0)], q[1]));
        assert!(
            close(op.p_alg()[(0, 0)], p),
            "{} vs {p}",
            op.p_alg()[(0, 0)]
        );
    }
}

#[test]
fn mass_matrix_case_matches_congruence_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let tol = ToleranceConfig64::default();
    for _ in 0..30 {
        let n = rng.gen_range(1..=6);
        let j = random_spd(&mut rng, n, 1e2, 1.0);
        let a = random_spd(&mut rng, n, 1e2, 1.0);
        let b = vec![
            random_matrix(&mut rng, n, 1.0),
            random_matrix(&mut rng, n, 1.0),
        ];
        let c0 = random_matrix(&mut rng, n, 1.0);
        let sys = SystemCoefficients64::with_parts(
            a.clone(),
            b.clone(),
            c0.clone(),
            Some(j.clone()),
            None,
            &tol,
        )
        .unwrap();
        let op = derive_operator(&sys).unwrap();

        // J = G G^T: the weighted problem is similar to a standard one.
        let g = j.cholesky().unwrap();
        let gi = g.inverse().unwrap();
        let cong = |m: &Matrix64| &(&gi * m) * &gi.transpose();
        let std_sys = SystemCoefficients64::new(
            cong(&a).symmetric_part(),
            b.iter().map(cong).collect(),
            cong(&c0),
        )
        .unwrap();
        let std_op = derive_operator(&std_sys).unwrap();
        let back = |m: &Matrix64| &(&gi.transpose() * m) * &g.transpose();
        assert!(rel(op.p1(), &back(std_op.p1())) <= 1e-9);
        assert!(rel(op.p_alg(), &back(std_op.p_alg())) <= 1e-9);
        for (q, qs) in op.q().iter().zip(std_op.q()) {
            assert!(rel(q, &back(qs)) <= 1e-9);
        }
        let target = &j.inverse().unwrap() * &a;
        assert!(rel(&(&(op.p1() * op.p1()) * &target), &Matrix64::identity(n)) <= 1e-9);
        assert!(pipeline_residuals(&sys, &op, &a.inverse().unwrap()) <= 1e-9);
    }
}

#[test]
fn biot_reduced_operator_is_valid() {
    let spec = BiotCartesian {
        lambda: 1.0,
        mu: 1.0,
        alpha: 1.0,
        m_biot: 1.0,
        rho: 1.0,
        rho_f: 0.5,
        m_eff: 2.0,
        normal_axis: 1,
    };
    let full = build_biot(&spec).unwrap();
    let (reduced, excluded) = reduce_degenerate(&full);
    assert_eq!(excluded, vec![4, 5]);
    let report = validate_hyperbolicity(&reduced);
    assert!(report.ok && report.eigenvalues.iter().all(|&e| e > 0.0));
    let op = derive_operator(&reduced).unwrap();
    let target = &reduced.mass().unwrap().inverse().unwrap() * reduced.a();
    assert!(rel(&(&(op.p1() * op.p1()) * &target), &Matrix64::identity(4)) <= 1e-9);
    assert!(pipeline_residuals(&reduced, &op, &reduced.a().inverse().unwrap()) <= 1e-9);
    // the square root really is non-symmetric here
    assert!(op.p1().asymmetry() > 1e-3);
}

fn ortho(
    a11: f64,
    a12: f64,
    a13: f64,
    a55: f64,
    a66: f64,
    rho: f64,
    r: f64,
    vti: bool,
) -> OrthoCylElastic<f64> {
    OrthoCylElastic {
        rho,
        a11,
        a12,
        a13,
        a22: a11,
        a23: a13,
        a33: 0.8 * a11,
        a44: a55,
        a55,
        a66,
        r,
        vti,
    }
}

#[test]
fn orthotropic_pipeline_matches_closed_form() {
    let sets = [
        ortho(4.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, false),
        ortho(10.0, 4.0, 2.5, 2.0, 3.0, 2.7, 0.35, true),
        ortho(25.0e9, 9.0e9, 7.0e9, 6.0e9, 4.0e9, 2400.0, 0.1, false),
        ortho(3.0, -0.5, 0.2, 0.4, 2.5, 0.9, 5.0, false),
    ];
    for spec in &sets {
        let derived = derive_operator(&build_ortho_cyl(spec).unwrap()).unwrap();
        let closed = closed_form_ortho_operator(spec).unwrap();
        assert!(derived.max_abs_difference(&closed) <= 1e-10, "{spec:?}");
    }
}

#[test]
fn curved_scalar_waves_reproduce_the_local_condition() {
    for c in [1.0, 2.0, 340.0] {
        for r in [0.5, 1.0, 10.0] {
            for (geometry, dim) in [(Geometry::Circle, 2usize), (Geometry::Sphere, 3)] {
                let op = derive_operator(
                    &build_scalar_wave(&ScalarWave {
                        c,
                        dim,
                        geometry,
                        r: Some(r),
                    })
                    .unwrap(),
                )
                .unwrap();
                let speed = -op.resolved_p1()[(0, 0)];
                let damping = op.resolved_p_alg()[(0, 0)];
                let expect = (dim as f64 - 1.0) / 2.0 * c / r;
                assert!((speed - c).abs() <= 1e-12 * c);
                assert!((damping - expect).abs() <= 1e-12 * expect);
            }
        }
    }
}

#[test]
fn finite_difference_derivative_feeds_the_pipeline() {
    // a(tau) = 4 + tau: D = d/dtau a^{-1/2} = -1/16 at tau = 0.
    let tol = ToleranceConfig64::default();
    let delta = 1e-4;
    let d = tangential_derivative_of_root(
        &Matrix64::from_diag(&[4.0 - delta]),
        &Matrix64::from_diag(&[4.0 + delta]),
        delta,
        None,
        &tol,
    )
    .unwrap();
    let c = SystemCoefficients64::with_parts(
        Matrix64::from_diag(&[4.0]),
        vec![Matrix64::from_diag(&[2.0])],
        Matrix64::zeros(1),
        None,
        Some(vec![d]),
        &tol,
    )
    .unwrap();
    let op = derive_operator(&c).unwrap();
    // p = -(b/a + q) D / (2 L) with q = -b/(2a) = -1/4, L = 1/2
    let expect = -(0.5 - 0.25) * (-1.0 / 16.0) / 1.0;
    assert!((op.p_alg()[(0, 0)] - expect).abs() < 1e-8);
}

#[test]
fn operator_json_round_trip_is_bit_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let op = derive_operator(&random_system(&mut rng, 4, 2)).unwrap();
    let text = serde_json::to_string(&op).unwrap();
    let back: TtbcOperator64 = serde_json::from_str(&text).unwrap();
    assert_eq!(back, op);
}

#[test]
fn single_precision_pipeline() {
    let c = ttbc_core::SystemCoefficients32::new(
        ttbc_core::Matrix32::from_diag(&[4.0, 1.0]),
        vec![ttbc_core::Matrix32::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap()],
        ttbc_core::Matrix32::from_diag(&[0.4, 0.1]),
    )
    .unwrap();
    let op = derive_operator(&c).unwrap();
    assert!((op.p1()[(0, 0)] + 0.5).abs() < 1e-6);
    assert!((op.q()[0][(0, 1)] + 1.0 / 6.0).abs() < 1e-6);
}

proptest! {
    #[test]
    fn zero_lower_order_terms_give_zero_p0(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_spd(&mut rng, n, 1e4, 1.0);
        let c = SystemCoefficients64::new(a, vec![Matrix64::zeros(n); 2], Matrix64::zeros(n)).unwrap();
        let op = derive_operator(&c).unwrap();
        prop_assert!(op.p_alg().is_zero());
        prop_assert!(op.q().iter().all(Matrix64::is_zero));
        prop_assert!(op.resolved_q().iter().all(Matrix64::is_zero));
    }

    #[test]
    fn derivation_is_deterministic(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_system(&mut rng, n, 2);
        prop_assert_eq!(derive_operator(&c).unwrap(), derive_operator(&c.clone()).unwrap());
    }

    #[test]
    fn solution_scaling_leaves_operator_unchanged(seed in any::<u64>(), n in 1usize..5, s in 0.01f64..100.0) {
        // Multiplying the whole equation by s changes nothing but A, B, C
        // together; the operator is a function of their ratios only through A^-1.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_system(&mut rng, n, 1);
        let j = Matrix64::identity(n).scale(s);
        let scaled = SystemCoefficients64::with_parts(
            c.a().scale(s), c.b().iter().map(|b| b.scale(s)).collect(), c.c0().scale(s), Some(j), None,
            &ToleranceConfig64::default(),
        ).unwrap();
        let plain = SystemCoefficients64::new(c.a().clone(), c.b().to_vec(), c.c0().clone()).unwrap();
        let a = derive_operator(&plain).unwrap();
        let b = derive_operator(&scaled).unwrap();
        prop_assert!(a.max_abs_difference(&b) <= 1e-8 * (1.0 + a.p1().max_abs() + a.p_alg().max_abs()));
    }
}
