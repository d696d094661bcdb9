//! Property tests over random settings, parameters and relations.

use ibclab::framework::Setting;
use ibclab::kernel::{self, ComplexMatrix, Subspace, WeightedSpace};
use ibclab::models::point::point_scalar_suite;
use ibclab::models::polaron::{build_polaron, polaron_sector_dtn, PolaronConfig};
use ibclab::random::{self, random_setting, SettingShape};
use ibclab::relations::{assemble_h01, assemble_hr, classify_selfadjoint, field};
use ibclab::robin::{self, BoundaryParams};
use ibclab::{Setting64, C};
use num_complex::Complex64;
use proptest::prelude::*;

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn setting(seed: u64, n: usize, nb: usize) -> Setting64 {
    random_setting::<f64>(seed, SettingShape::new(n, nb)).expect("random setting")
}

/// Seeds and shapes `(seed, n, n_boundary)` with `n_boundary < n`.
fn shapes() -> impl Strategy<Value = (u64, usize, usize)> {
    (any::<u64>(), 2usize..=9).prop_flat_map(|(seed, n)| (Just(seed), Just(n), 1..n))
}

/// Non-real point at distance at least 0.3 from the real axis.
fn off_axis() -> impl Strategy<Value = Complex64> {
    (-4.0..4.0f64, 0.3..3.0f64, any::<bool>()).prop_map(|(re, im, up)| cx(re, if up { im } else { -im }))
}

fn rel(a: &ComplexMatrix<f64>, b: &ComplexMatrix<f64>) -> f64 {
    a.sub(b).unwrap().norm_fro() / b.norm_fro().max(1.0)
}

fn symmetric(seed: u64) -> BoundaryParams<f64> {
    random::symmetric_params(&mut random::rng(seed))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn adjoint_is_an_involution(seed in any::<u64>(), n in 1usize..8, m in 1usize..8) {
        let mut g = random::rng(seed);
        let (dom, cod) = (random::weights::<f64>(&mut g, n), random::weights::<f64>(&mut g, m));
        let a = random::matrix(&mut g, &dom, &cod);
        let back = a.adjoint().adjoint();
        let worst = a.data().iter().zip(back.data().iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(worst <= 1e-13, "{worst}");
    }

    #[test]
    fn adjoint_pairs_inner_products(seed in any::<u64>(), n in 1usize..8, m in 1usize..8) {
        let mut g = random::rng(seed);
        let (dom, cod) = (random::weights::<f64>(&mut g, n), random::weights::<f64>(&mut g, m));
        let a = random::matrix(&mut g, &dom, &cod);
        let (x, y) = (random::vector::<f64>(&mut g, n), random::vector::<f64>(&mut g, m));
        let lhs = cod.inner(a.apply(&x).unwrap().view(), y.view());
        let rhs = dom.inner(x.view(), a.adjoint().apply(&y).unwrap().view());
        prop_assert!((lhs - rhs).norm() <= 1e-11 * (1.0 + lhs.norm()));
    }

    #[test]
    fn psd_square_root_squares_back(seed in any::<u64>(), n in 1usize..8) {
        let mut g = random::rng(seed);
        let space = random::weights::<f64>(&mut g, n);
        let x = random::matrix(&mut g, &space, &space);
        let m = x.adjoint().matmul(&x).unwrap();
        let r = kernel::sqrt_psd(&m, 1e-10, 1e-10).unwrap();
        let dev = r.matmul(&r).unwrap().sub(&m).unwrap().norm();
        prop_assert!(dev <= 1e-10 * m.norm().max(1.0), "{dev}");
    }

    #[test]
    fn pseudo_inverse_satisfies_penrose_identities(seed in any::<u64>(), n in 1usize..7, m in 1usize..7, r in 0usize..7) {
        let mut g = random::rng(seed);
        let (dom, cod) = (random::weights::<f64>(&mut g, n), random::weights::<f64>(&mut g, m));
        let r = r.min(n.min(m));
        let a = if r == 0 {
            ComplexMatrix::zeros(&dom, &cod)
        } else {
            let inner = WeightedSpace::unit(r);
            random::matrix(&mut g, &inner, &cod).matmul(&random::matrix(&mut g, &dom, &inner)).unwrap()
        };
        let p = kernel::pinv(&a, 1e-9).unwrap();
        let scale = a.norm().max(1.0) * p.norm().max(1.0);
        let ap = a.matmul(&p).unwrap();
        let pa = p.matmul(&a).unwrap();
        prop_assert!(ap.matmul(&a).unwrap().sub(&a).unwrap().norm() <= 1e-10 * scale * a.norm().max(1.0));
        prop_assert!(pa.matmul(&p).unwrap().sub(&p).unwrap().norm() <= 1e-10 * scale * p.norm().max(1.0));
        prop_assert!(ap.hermiticity_deviation().unwrap() <= 1e-10 * scale);
        prop_assert!(pa.hermiticity_deviation().unwrap() <= 1e-10 * scale);
        prop_assert_eq!(kernel::rank(&a, 1e-9).unwrap(), r);
    }

    #[test]
    fn complement_is_an_involution(seed in any::<u64>(), n in 1usize..8, d in 0usize..8) {
        let mut g = random::rng(seed);
        let space = random::weights::<f64>(&mut g, n);
        let u = Subspace::span(&space, random::array::<f64>(&mut g, n, d.min(n)).view()).unwrap();
        let cc = u.complement().unwrap().complement().unwrap();
        prop_assert!(u.distance(&cc).unwrap() <= 1e-10);
        prop_assert_eq!(u.dim() + u.complement().unwrap().dim(), n);
    }

    #[test]
    fn subspace_distance_is_symmetric(seed in any::<u64>(), n in 1usize..8, d1 in 0usize..8, d2 in 0usize..8) {
        let mut g = random::rng(seed);
        let space = random::weights::<f64>(&mut g, n);
        let u = Subspace::span(&space, random::array::<f64>(&mut g, n, d1.min(n)).view()).unwrap();
        let v = Subspace::span(&space, random::array::<f64>(&mut g, n, d2.min(n)).view()).unwrap();
        prop_assert!((u.distance(&v).unwrap() - v.distance(&u).unwrap()).abs() <= 1e-12);
        prop_assert!(u.distance(&u).unwrap() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn trace_of_dirichlet_solution_is_identity((seed, n, nb) in shapes(), lambda in off_axis()) {
        let s = setting(seed, n, nb);
        let lift = s.dirichlet_lift(lambda).unwrap();
        let b = s.b_map().apply_block(&lift);
        let id = ComplexMatrix::identity(s.dh());
        prop_assert!(rel(&ComplexMatrix::on(b, s.dh()).unwrap(), &id) <= 1e-10);
    }

    #[test]
    fn dirichlet_adjoint_identity((seed, n, nb) in shapes(), lambda in off_axis()) {
        let s = setting(seed, n, nb);
        let g = s.dirichlet(lambda).unwrap();
        let shifted = ComplexMatrix::identity(s.h()).scale(lambda.conj()).sub(s.l()).unwrap();
        let lhs = g.adjoint().matmul(&shifted).unwrap();
        prop_assert!(rel(&lhs, s.a()) <= 1e-10);
    }

    #[test]
    fn dtn_difference_formula((seed, n, nb) in shapes(), lambda in off_axis(), mu in off_axis()) {
        let s = setting(seed, n, nb);
        let lhs = s.dtn(lambda).unwrap().sub(&s.dtn(mu).unwrap()).unwrap();
        let rhs = s.a().matmul(&s.resolvent_l(mu).unwrap()).unwrap().matmul(&s.dirichlet(lambda).unwrap()).unwrap().scale(mu - lambda);
        prop_assert!(lhs.sub(&rhs).unwrap().norm_fro() <= 1e-9 * (1.0 + rhs.norm_fro()));
    }

    #[test]
    fn green_identity_and_rebase((seed, n, nb) in shapes(), mu in off_axis()) {
        let s = setting(seed, n, nb);
        let mut g = random::rng(seed ^ 0x5eed);
        let (v, w) = (random::domain_vector(&mut g, &s), random::domain_vector(&mut g, &s));
        let scale = (1.0 + s.pair_norm(&v)) * (1.0 + s.pair_norm(&w)) * (1.0 + s.l().norm() + s.t().norm());
        prop_assert!(s.green_residual(&v, &w).unwrap().norm() <= 1e-10 * scale);
        let rv = s.rebase(&v, mu).unwrap();
        let (e0, e1) = (s.embed(&v).unwrap(), s.embed_rebased(&rv).unwrap());
        let (l0, l1) = (s.apply_lm(&v).unwrap(), s.apply_lm_rebased(&rv).unwrap());
        let d = (&e0 - &e1).iter().chain((&l0 - &l1).iter()).map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(d <= 1e-9 * scale, "{d}");
    }

    #[test]
    fn symmetric_params_give_hermitian_ibc((seed, n, nb) in shapes(), p in any::<u64>()) {
        let s = setting(seed, n, nb);
        let p = symmetric(p);
        prop_assert!(robin::check_symmetry_params(&p, 1e-12));
        match robin::assemble_ibc(&s, &p) {
            Ok(h) => prop_assert!(h.hermiticity_deviation().unwrap() <= 1e-9, "{:e}", h.hermiticity_deviation().unwrap()),
            Err(_) => prop_assume!(false),
        }
        match robin::delta_elimination_residual(&s, &p) {
            Ok(r) => prop_assert!(r <= 1e-10, "{r:e}"),
            Err(_) => prop_assume!(false),
        }
    }

    #[test]
    fn robin_resolvent_matches_direct_inverse((seed, n, nb) in shapes(), p in any::<u64>(), lambda in off_axis()) {
        let s = setting(seed, n, nb);
        let p = random::generic_params::<f64>(&mut random::rng(p));
        let (Ok(krein), Ok(op)) = (robin::robin_resolvent(&s, p.alpha, p.beta, lambda), robin::assemble_robin(&s, p.alpha, p.beta)) else {
            return Err(TestCaseError::reject("singular"));
        };
        let Ok(direct) = op.resolvent(lambda) else { return Err(TestCaseError::reject("singular")) };
        prop_assert!(rel(&krein, &direct) <= 1e-8, "{:e}", rel(&krein, &direct));
    }

    #[test]
    fn ibc_resolvent_and_split((seed, n, nb) in shapes(), p in any::<u64>(), lambda in off_axis()) {
        let s = setting(seed, n, nb);
        let p = symmetric(p);
        let (Ok(formula), Ok(op)) = (robin::ibc_resolvent(&s, &p, lambda), robin::assemble_ibc(&s, &p)) else {
            return Err(TestCaseError::reject("singular"));
        };
        let direct = op.resolvent(lambda).unwrap();
        prop_assert!(rel(&formula, &direct) <= 1e-8, "{:e}", rel(&formula, &direct));
        let split = robin::perturbation_split(&s, &p, lambda).unwrap();
        prop_assert!(split.sum_residual().unwrap() <= 1e-9);
    }

    #[test]
    fn correction_is_hermitian_on_the_real_axis((seed, n, nb) in shapes(), p in any::<u64>(), gap in 0.5..3.0f64) {
        let s = setting(seed, n, nb);
        let p = symmetric(p);
        let lambda = cx(s.spectrum().min() - gap, 0.0);
        prop_assume!(!s.is_lambda0(lambda));
        let Ok(split) = robin::perturbation_split(&s, &p, lambda) else { return Err(TestCaseError::reject("singular")) };
        let c = &split.correction;
        prop_assert!(c.hermiticity_deviation().unwrap() <= 1e-9 * c.norm().max(1.0));
    }

    #[test]
    fn relation_adjoint_is_an_involution(seed in any::<u64>(), n in 1usize..6, d in 0usize..12) {
        let mut g = random::rng(seed);
        let space = random::weights::<f64>(&mut g, n);
        let r = random::relation(&mut g, &space, d.min(2 * n));
        let back = r.adjoint().unwrap().adjoint().unwrap();
        prop_assert!(r.distance(&back).unwrap() <= 1e-10);
        prop_assert_eq!(r.adjoint().unwrap().dim(), 2 * n - r.dim());
    }

    #[test]
    fn symmetric_relation_gives_hermitian_extension((seed, n, nb) in shapes(), drop in 0usize..3) {
        let s = setting(seed, n, nb);
        let mut g = random::rng(seed ^ 0xabc);
        let r = random::symmetric_relation(&mut g, s.dh(), drop.min(nb));
        prop_assert!(r.is_symmetric().unwrap());
        let Ok(h) = assemble_hr(&s, &r) else { return Err(TestCaseError::reject("not a graph")) };
        prop_assert!(h.hermiticity_deviation().unwrap() <= 1e-8);
        if drop == 0 {
            let Ok(v) = classify_selfadjoint(&s, &r, None) else { return Err(TestCaseError::reject("no lambda")) };
            prop_assert!(v.agree());
        }
    }

    #[test]
    fn field_is_an_eigenfamily_and_right_inverse((seed, n, nb) in shapes(), lambda in off_axis()) {
        let s = setting(seed, n, nb);
        let hm = ibclab::relations::assemble_hm(&s).unwrap();
        let Ok(f) = field(&s, lambda) else { return Err(TestCaseError::reject("singular")) };
        prop_assert!(f.eigen_defect(&s, &hm) <= 1e-9, "{:e}", f.eigen_defect(&s, &hm));
        prop_assert!(f.left_inverse_defect(&s, &hm) <= 1e-9, "{:e}", f.left_inverse_defect(&s, &hm));
    }

    #[test]
    fn zero_identification_reduces_to_dtn((seed, n, nb) in shapes(), lambda in off_axis()) {
        let s = setting(seed, n, nb);
        let s0 = s.with_identification(ComplexMatrix::zeros(s.dh(), s.h())).unwrap();
        let Ok(bo) = ibclab::relations::boundary_operator(&s0, lambda) else { return Err(TestCaseError::reject("singular")) };
        prop_assert!(rel(&bo, &s0.dtn(lambda).unwrap()) <= 1e-10);
        let h01 = assemble_h01(&s0).unwrap();
        let l: &ComplexMatrix<f64> = s0.l();
        prop_assert!(rel(h01.matrix(), l) <= 1e-10);
    }

    #[test]
    fn point_interaction_quadruples(p in any::<u64>(), lambda in -400.0..-0.01f64) {
        let q = symmetric(p);
        let rep = point_scalar_suite(&q, cx(lambda, 0.0));
        prop_assert!(rep.pass(), "{:?}", rep.failures().map(|c| c.name.clone()).collect::<Vec<_>>());
    }
}

fn small_polaron(n_x: usize, n_max: usize) -> ibclab::models::polaron::PolaronSetting<f64> {
    build_polaron::<f64>(&PolaronConfig::new(n_x, n_max)).expect("polaron")
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn small_polaron_models_satisfy_assumptions(n_x in 4usize..=9, n_max in 1usize..=2) {
        let ps = small_polaron(n_x, n_max);
        let rep = ibclab::framework::check_assumptions(&ps.setting, None).unwrap();
        prop_assert!(rep.pass());
    }

    #[test]
    fn polaron_dtn_blocks_are_nonpositive(n_x in 4usize..=9, lambda in -3.0..-0.2f64) {
        let ps = small_polaron(n_x, 2);
        for n in 0..ps.n_max() {
            let b = polaron_sector_dtn(&ps, cx(lambda, 0.0), n).unwrap();
            prop_assert!(b.max_eigenvalue <= 1e-10, "sector {n}: {}", b.max_eigenvalue);
        }
    }
}

#[test]
fn single_precision_setting_builds() {
    let s: Setting<f32> = random_setting(3, SettingShape::new(4, 2)).unwrap();
    let lambda = C::<f32>::new(0.3, 1.0);
    let lift = s.dirichlet_lift(lambda).unwrap();
    let b = s.b_map().apply_block(&lift);
    let id = ComplexMatrix::identity(s.dh());
    let dev = ComplexMatrix::on(b, s.dh()).unwrap().sub(&id).unwrap().norm_fro();
    assert!(dev < 1e-3, "{dev}");
}
