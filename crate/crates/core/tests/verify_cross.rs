mod common;

use pdcontact::cones::friction_block_in_cone;
use pdcontact::fem::{generate, ContactGeometry, ExampleParams};
use pdcontact::pdsolver::pd_accelerated;
use pdcontact::verify::{
    build_soclcp, export_matrix_market, oracle_enumerate, read_soclcp_export, residual_report, residual_values,
    verify_soclcp, SoclcpManifest,
};
use pdcontact::{Error, ProblemInstance, SolverConfig, SparseMatrix};
use proptest::prelude::*;
use rand::Rng;

use common::{dense, random_planar, rng, single_node};

/// The three residuals evaluated with dense matrices, node by node.
fn dense_residuals(prob: &ProblemInstance, du: &[f64], r: &[f64]) -> (f64, f64, f64) {
    let k = dense(prob.k());
    let tn = dense(prob.contact().tn());
    let tt = dense(prob.contact().tt());
    let (c, m) = (prob.c(), prob.m());
    let u = nalgebra::DVector::from_column_slice(du);
    let rn = nalgebra::DVector::from_iterator(c, (0..c).map(|j| r[(1 + m) * j]));
    let rt = nalgebra::DVector::from_iterator(m * c, (0..c).flat_map(|j| (1..=m).map(move |a| r[(1 + m) * j + a])));
    let eq = (&k * &u - nalgebra::DVector::from_column_slice(prob.p()) - &tn * &rn - &tt * &rt).norm();
    let mut compl = 0.0;
    let mut pen = 0.0;
    for j in 0..c {
        let wn = tn.column(j).dot(&u);
        let wt: Vec<f64> = (0..m).map(|a| tt.column(m * j + a).dot(&u)).collect();
        let nwt = wt.iter().map(|x| x * x).sum::<f64>().sqrt();
        let g = prob.contact().g()[j];
        compl += (-g - prob.mu() * nwt + wn) * rn[j] + (0..m).map(|a| wt[a] * rt[m * j + a]).sum::<f64>();
        pen += (g - wn).min(0.0).powi(2);
    }
    (eq, compl.abs(), pen.sqrt())
}

#[test]
fn residuals_match_dense_evaluation() {
    let mut g = rng(61);
    let problems = [
        random_planar(62, 3, 0.5),
        generate(&ExampleParams::example2(1)).unwrap().problem,
    ];
    for prob in &problems {
        for _ in 0..20 {
            let du: Vec<f64> = (0..prob.d()).map(|_| g.random_range(-0.1..0.1)).collect();
            let r: Vec<f64> = (0..(1 + prob.m()) * prob.c())
                .map(|_| g.random_range(-1.0..1.0))
                .collect();
            let got = residual_values(prob, &du, &r).unwrap();
            let (eq, compl, pen) = dense_residuals(prob, &du, &r);
            assert!((got.eq - eq).abs() <= 1e-13 * eq.max(1.0));
            assert!((got.compl - compl).abs() <= 1e-13 * compl.max(1.0));
            assert!((got.pen - pen).abs() <= 1e-13 * pen.max(1.0));
        }
    }
}

#[test]
fn zero_point_residuals() {
    let prob = random_planar(63, 2, 0.5);
    let rep = residual_report(&prob, &vec![0.0; prob.d()], &vec![0.0; 2 * prob.c()]).unwrap();
    let pn = prob.p().iter().map(|x| x * x).sum::<f64>().sqrt();
    assert!((rep.resid_eq - pn).abs() <= 1e-15 * pn);
    assert_eq!((rep.resid_compl, rep.resid_pen), (0.0, 0.0));
    let f = rep.fractions;
    assert!((f.free + f.slip + f.stick - 1.0).abs() <= 1e-12);
}

#[test]
fn oracle_solutions_have_small_residuals() {
    let tol = 1e-9;
    for seed in 0..30u64 {
        let prob = random_planar(seed, 1 + seed as usize % 4, 0.6);
        for sol in oracle_enumerate(&prob, tol).unwrap() {
            let res = residual_values(&prob, &sol.du, &sol.r).unwrap();
            assert!(
                res.eq <= 10.0 * tol && res.compl <= 10.0 * tol && res.pen <= 10.0 * tol,
                "{seed}: {res:?}"
            );
        }
    }
}

#[test]
fn oracle_slip_example_matches_solver() {
    let prob = single_node([1.0, -1.0], 0.0, 0.5);
    let sols = oracle_enumerate(&prob, 1e-10).unwrap();
    assert_eq!(sols.len(), 1);
    let pd = pd_accelerated(&prob, &SolverConfig::default()).unwrap();
    assert!(common::max_abs_diff(&pd.du, &sols[0].du) <= 1e-6);
}

#[test]
fn oracle_refuses_large_or_spatial_problems() {
    let spatial = generate(&ExampleParams::example2(1)).unwrap().problem;
    assert!(matches!(
        oracle_enumerate(&spatial, 1e-9),
        Err(Error::OracleIneligible(_))
    ));
    let wide = random_planar(64, 7, 0.5);
    assert!(matches!(oracle_enumerate(&wide, 1e-9), Err(Error::OracleIneligible(_))));
}

#[test]
fn soclcp_dimensions_for_spatial_contact() {
    let prob = generate(&ExampleParams::example2(1)).unwrap().problem;
    let (d, c) = (prob.d(), prob.c());
    let form = build_soclcp(&prob).unwrap();
    assert_eq!((form.nx(), form.nv()), (4 * c, d + 4 * c));
    assert_eq!((form.m12.nrows(), form.m12.ncols()), (4 * c, d + 4 * c));
    assert_eq!(form.m11.nnz(), 0);
    assert!(form.w1.iter().all(|&v| v == 0.0));
    let m21 = dense(&form.m21);
    assert_eq!(m21.nrows(), 4 * c + d);
    for i in 0..4 * c + d {
        for j in 0..4 * c {
            assert_eq!(m21[(i, j)], if i == j { 1.0 } else { 0.0 });
        }
    }
    assert_eq!(form.cone.describe(), format!("R+^{c}, (SOC^3)^{c}"));
}

#[test]
fn soclcp_accepts_oracle_solutions_and_rejects_perturbations() {
    for seed in 0..15u64 {
        let prob = random_planar(700 + seed, 1 + seed as usize % 3, 0.5);
        let form = build_soclcp(&prob).unwrap();
        for sol in oracle_enumerate(&prob, 1e-10).unwrap() {
            let rep = verify_soclcp(&form, &prob, &sol.du, &sol.r, None, 1e-8).unwrap();
            assert!(rep.passed(), "{seed}: {rep:?}");
            let mut r = sol.r.clone();
            r[0] -= 1e-3;
            let bad = verify_soclcp(&form, &prob, &sol.du, &r, None, 1e-8).unwrap();
            assert!(!bad.passed());
            // ‖t_n‖ = 1, so the equilibrium violation is exactly the shift
            assert!((bad.linear_equation - 1e-3).abs() <= 1e-9, "{bad:?}");
        }
    }
}

#[test]
fn soclcp_zero_problem_passes() {
    let prob = single_node([0.0, 0.0], 0.2, 0.5);
    let form = build_soclcp(&prob).unwrap();
    assert!(verify_soclcp(&form, &prob, &[0.0, 0.0], &[0.0, 0.0], None, 1e-12)
        .unwrap()
        .passed());
}

fn residual_accepts(prob: &ProblemInstance, du: &[f64], r: &[f64], tol: f64) -> bool {
    let res = residual_values(prob, du, r).unwrap();
    let in_f = r
        .chunks(1 + prob.m())
        .all(|b| friction_block_in_cone(b, prob.mu(), tol));
    let dual = {
        let w = prob.contact().t().spmv_transpose(du).unwrap();
        prob.contact().g().iter().enumerate().all(|(j, g)| g - w[2 * j] >= -tol)
    };
    res.eq <= tol && res.compl <= tol && res.pen <= tol && in_f && dual
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Both certificates agree on exact solutions and on points displaced
    /// from them.
    #[test]
    fn formulations_accept_the_same_points(seed in 0u64..5000, c in 1usize..=3, kick in prop_oneof![Just(0.0), 1e-5f64..1e-2], which in 0usize..2) {
        let prob = random_planar(seed, c, 0.5);
        let sols = oracle_enumerate(&prob, 1e-10).unwrap();
        let form = build_soclcp(&prob).unwrap();
        let (mut du, mut r) = (sols[0].du.clone(), sols[0].r.clone());
        if which == 0 { du[0] += kick } else { r[0] -= kick }
        let a = residual_accepts(&prob, &du, &r, 1e-7);
        let b = verify_soclcp(&form, &prob, &du, &r, None, 1e-7).unwrap().passed();
        prop_assert_eq!(a, b);
        prop_assert_eq!(a, kick == 0.0);
    }

    /// Scaling the load and gaps together scales the solution and leaves the
    /// state fractions unchanged.
    #[test]
    fn fractions_are_scale_invariant(seed in 0u64..5000, c in 1usize..=3, lam in 0.2f64..5.0) {
        let prob = random_planar(seed, c, 0.5);
        let scaled = prob
            .with_load(prob.p().iter().map(|x| lam * x).collect()).unwrap()
            .with_gap(prob.contact().g().iter().map(|x| lam * x).collect()).unwrap();
        let a = oracle_enumerate(&prob, 1e-10).unwrap();
        let b = oracle_enumerate(&scaled, 1e-10).unwrap();
        prop_assume!(a.len() == 1 && b.len() == 1);
        let fa = residual_report(&prob, &a[0].du, &a[0].r).unwrap().fractions;
        let fb = residual_report(&scaled, &b[0].du, &b[0].r).unwrap().fractions;
        prop_assert_eq!(fa, fb);
    }
}

#[test]
fn export_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    for prob in [
        random_planar(71, 3, 0.7),
        generate(&ExampleParams::example2(1)).unwrap().problem,
    ] {
        let form = build_soclcp(&prob).unwrap();
        export_matrix_market(&form, dir.path()).unwrap();
        let back = read_soclcp_export(dir.path()).unwrap();
        assert_eq!(back, form);
        let manifest = SoclcpManifest::parse(&std::fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
        assert_eq!(
            manifest.cones,
            format!("R+^{}, (SOC^{})^{}", prob.c(), 1 + prob.m(), prob.c())
        );
    }
}

#[test]
fn export_without_contact() {
    let prob = ProblemInstance::new(
        SparseMatrix::identity(3),
        vec![1.0, 2.0, 3.0],
        ContactGeometry::empty(3, 2).unwrap(),
        0.5,
    )
    .unwrap();
    let form = build_soclcp(&prob).unwrap();
    assert_eq!((form.nx(), form.nv()), (0, 3));
    let dir = tempfile::tempdir().unwrap();
    export_matrix_market(&form, dir.path()).unwrap();
    assert_eq!(read_soclcp_export(dir.path()).unwrap(), form);
    let sol = pd_accelerated(&prob, &SolverConfig::default()).unwrap();
    assert!(verify_soclcp(&form, &prob, &sol.du, &sol.r, None, 1e-8)
        .unwrap()
        .passed());
}

#[test]
fn spatial_solution_passes_soclcp() {
    let prob = generate(&ExampleParams::example2(2)).unwrap().problem;
    let sol = pd_accelerated(&prob, &SolverConfig::default()).unwrap();
    assert!(sol.converged);
    let form = build_soclcp(&prob).unwrap();
    let rep = verify_soclcp(&form, &prob, &sol.du, &sol.r, None, 1e-8).unwrap();
    assert!(rep.passed(), "{rep:?}");
}
