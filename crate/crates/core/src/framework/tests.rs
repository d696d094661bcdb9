use ndarray::{arr1, arr2, Array2};
use num_complex::Complex64;

use super::*;
use crate::random::{self, SettingShape};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn one_dim(lambda0: f64) -> crate::Result<Setting<f64>> {
    let sp = WeightedSpace::unit(1);
    let m = |x: f64| ComplexMatrix::on(arr2(&[[c(x, 0.0)]]), &sp).unwrap();
    Setting::new(m(2.0), m(1.0), m(0.0), m(-0.5), lambda0)
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

#[test]
fn one_dimensional_setting_values() {
    let s = one_dim(0.0).unwrap();
    assert!(close(s.g0().data()[(0, 0)], c(-0.5, 0.0), 1e-15));
    assert!(close(s.dirichlet(c(0.0, 0.0)).unwrap().data()[(0, 0)], c(-0.5, 0.0), 1e-15));
    // T_{-2} = -0.5 + 2 * (-0.5) * (-0.25)
    assert!(close(s.dtn(c(-2.0, 0.0)).unwrap().data()[(0, 0)], c(-0.25, 0.0), 1e-15));
    assert_eq!(s.dtn(c(0.0, 0.0)).unwrap().data(), s.t().data());
    let rep = check_assumptions(&s, None).unwrap();
    assert!(rep.pass(), "{:?}", rep.checks);
    for ch in rep.checks.iter().filter(|c| c.kind == crate::report::CheckKind::AtMost) {
        assert!(ch.residual <= 1e-14, "{} = {}", ch.name, ch.residual);
    }
}

#[test]
fn lambda0_in_spectrum_is_rejected() {
    assert!(matches!(one_dim(2.0), Err(Error::LambdaInSpectrumL { .. })));
}

#[test]
fn non_hermitian_l_is_rejected() {
    let sp = WeightedSpace::unit(2);
    let l = ComplexMatrix::on(arr2(&[[c(1.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]), &sp).unwrap();
    let dh = WeightedSpace::unit(1);
    let a = ComplexMatrix::new(arr2(&[[c(1.0, 0.0), c(0.0, 0.0)]]), sp.clone(), dh.clone()).unwrap();
    let i = a.adjoint();
    let t = ComplexMatrix::identity(&dh);
    assert!(matches!(Setting::new(l, a, i, t, -5.0), Err(Error::NotHermitian { operator: "L", .. })));
}

#[test]
fn rank_deficient_a_is_rejected() {
    let h = WeightedSpace::unit(3);
    let dh = WeightedSpace::unit(2);
    let l = ComplexMatrix::identity(&h);
    let a = ComplexMatrix::new(Array2::from_elem((2, 3), c(1.0, 0.0)), h.clone(), dh.clone()).unwrap();
    let i = ComplexMatrix::zeros(&dh, &h);
    let t = ComplexMatrix::identity(&dh);
    assert!(matches!(Setting::new(l, a, i, t, 0.0), Err(Error::RankDeficientA { rank: 1, expected: 2 })));
}

#[test]
fn random_setting_passes_assumptions() {
    for seed in 0..5 {
        let s: Setting<f64> = random::random_setting(seed, SettingShape::new(8, 3)).unwrap();
        let rep = check_assumptions(&s, None).unwrap();
        assert!(rep.pass(), "seed {seed}: {:?}", rep.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());
    }
}

#[test]
fn injected_non_hermitian_t_is_flagged() {
    let s: Setting<f64> = random::random_setting(3, SettingShape::new(6, 2)).unwrap();
    let mut t = s.t().data().clone();
    t[(0, 1)] += c(0.3, 0.1);
    let t = ComplexMatrix::on(t, s.dh()).unwrap();
    let opts = BuildOptions { require_hermitian_t: false, require_full_rank_a: true };
    assert!(matches!(
        Setting::new(s.l().clone(), s.a().clone(), s.i().clone(), t.clone(), s.lambda0()),
        Err(Error::NotHermitian { operator: "T", .. })
    ));
    let bad = Setting::with_options(s.l().clone(), s.a().clone(), s.i().clone(), t, s.lambda0(), opts).unwrap();
    let rep = check_assumptions(&bad, None).unwrap();
    assert!(!rep.clause("T_hermitian").unwrap().pass);
    assert!(rep.clause("L_hermitian").unwrap().pass);
}

#[test]
fn dirichlet_matches_literal_definition() {
    let s: Setting<f64> = random::random_setting(11, SettingShape::new(7, 3)).unwrap();
    let lam = c(0.4, -0.9);
    let r = s.resolvent_l(lam.conj()).unwrap();
    let literal = s.a().matmul(&r).unwrap().adjoint();
    assert!(s.dirichlet(lam).unwrap().relative_distance(&literal).unwrap() < 1e-12);
}

#[test]
fn dtn_is_hermitian_for_real_lambda() {
    let s: Setting<f64> = random::random_setting(12, SettingShape::new(9, 4)).unwrap();
    let lam = c(s.spectrum().min() - 0.7, 0.0);
    assert!(s.dtn(lam).unwrap().hermiticity_deviation().unwrap() < 1e-10);
}

#[test]
fn trivial_pair_actions() {
    let s: Setting<f64> = random::random_setting(4, SettingShape::new(5, 2)).unwrap();
    let mut g = random::rng(1);
    let f0 = random::vector::<f64>(&mut g, 5);
    let v = s.vector(f0.clone(), arr1(&[c(0.0, 0.0), c(0.0, 0.0)])).unwrap();
    assert_eq!(s.embed(&v).unwrap(), f0);
    assert_eq!(s.apply_lm(&v).unwrap(), s.l().data().dot(&f0));
    assert_eq!(s.apply_am(&v).unwrap(), s.a().data().dot(&f0));
    assert!(s.apply_b(&v).unwrap().iter().all(|z| z.norm() == 0.0));
    let phi = random::vector::<f64>(&mut g, 2);
    let w = s.vector(Array1::zeros(5), phi).unwrap();
    let lw = s.apply_lm(&w).unwrap();
    let ew = s.embed(&w).unwrap().mapv(|z| z * s.lambda0());
    assert!((&lw - &ew).iter().all(|z| z.norm() < 1e-12));
}

#[test]
fn foreign_vectors_are_rejected() {
    let s: Setting<f64> = random::random_setting(4, SettingShape::new(5, 2)).unwrap();
    let v = DomainVector { f0: Array1::zeros(5), phi: Array1::zeros(2), base_lambda: s.lambda0() + 1.0 };
    assert!(matches!(s.embed(&v), Err(Error::ForeignVector(_))));
    assert!(s.vector(Array1::zeros(4), Array1::zeros(2)).is_err());
}

#[test]
fn rebase_preserves_embedding_and_action() {
    let s: Setting<f64> = random::random_setting(5, SettingShape::new(8, 3)).unwrap();
    let mut g = random::rng(9);
    for _ in 0..10 {
        let v = random::domain_vector(&mut g, &s);
        let mu = random::complex::<f64>(&mut g) * 3.0;
        let rv = s.rebase(&v, mu).unwrap();
        let e0 = s.embed(&v).unwrap();
        let e1 = s.embed_rebased(&rv).unwrap();
        assert!((&e0 - &e1).iter().map(|z| z.norm()).sum::<f64>() < 1e-10);
        let l0 = s.apply_lm(&v).unwrap();
        let l1 = s.apply_lm_rebased(&rv).unwrap();
        assert!((&l0 - &l1).iter().map(|z| z.norm()).sum::<f64>() < 1e-9);
    }
    let v = random::domain_vector(&mut g, &s);
    let same = s.rebase(&v, c(s.lambda0(), 0.0)).unwrap();
    assert_eq!(same.f0, v.f0);
    let no_phi = s.vector(v.f0.clone(), Array1::zeros(3)).unwrap();
    assert_eq!(s.rebase(&no_phi, c(0.3, 0.3)).unwrap().f0, v.f0);
}

#[test]
fn green_identity_vanishes() {
    let s: Setting<f64> = random::random_setting(6, SettingShape::new(10, 4)).unwrap();
    let mut g = random::rng(2);
    for _ in 0..100 {
        let v = random::domain_vector(&mut g, &s);
        let w = random::domain_vector(&mut g, &s);
        let r = s.green_residual(&v, &w).unwrap();
        let scale = (1.0 + s.pair_norm(&v)) * (1.0 + s.pair_norm(&w));
        assert!(r.norm() <= 1e-10 * scale, "{r}");
    }
    let zero = s.vector(Array1::zeros(10), Array1::zeros(4)).unwrap();
    assert_eq!(s.green_residual(&zero, &zero).unwrap(), c(0.0, 0.0));
}

#[test]
fn document_round_trip_is_bit_exact() {
    let s: Setting<f64> = random::random_setting(7, SettingShape::new(6, 2)).unwrap();
    let json = s.to_document().to_json().unwrap();
    let back: Setting<f64> = SettingDocument::from_json(&json).unwrap().to_setting().unwrap();
    assert_eq!(back.l().data(), s.l().data());
    assert_eq!(back.a().data(), s.a().data());
    assert_eq!(back.i().data(), s.i().data());
    assert_eq!(back.t().data(), s.t().data());
    assert_eq!(back.lambda0(), s.lambda0());
    assert_eq!(back.h(), s.h());
    assert_eq!(back.dh(), s.dh());
    assert_eq!(back.to_document().to_json().unwrap(), json);
}

#[test]
fn deficiency_indices_equal_boundary_dimension() {
    let s: Setting<f64> = random::random_setting(8, SettingShape::new(7, 3)).unwrap();
    assert_eq!(s.deficiency_indices().unwrap(), (3, 3));
    assert_eq!(s.minimal_domain().unwrap().dim(), 4);
}

#[test]
fn single_precision_setting_passes_at_scaled_tolerance() {
    let s: Setting<f32> = random::random_setting(1, SettingShape::new(6, 2)).unwrap();
    let rep = check_assumptions(&s, Some(1e-4)).unwrap();
    assert!(rep.pass(), "{:?}", rep.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());
}

#[test]
fn boundary_map_inverts_dirichlet() {
    let s: Setting<f64> = random::random_setting(13, SettingShape::new(8, 3)).unwrap();
    let mut g = random::rng(4);
    for lam in [c(0.3, 1.1), c(s.lambda0(), 0.0), c(-2.5, -0.4)] {
        let gl = s.dirichlet(lam).unwrap();
        for _ in 0..10 {
            let phi = random::vector::<f64>(&mut g, 3);
            let x = phi.clone().insert_axis(ndarray::Axis(1));
            let lifted = s.lift_dirichlet_columns(&gl, x);
            let v = lifted.column(0, s.lambda0());
            assert!((&s.apply_b(&v).unwrap() - &phi).iter().all(|z| z.norm() < 1e-12));
            let emb = s.embed(&v).unwrap();
            let direct = gl.data().dot(&phi);
            assert!((&emb - &direct).iter().all(|z| z.norm() < 1e-10));
        }
    }
}

#[test]
fn dirichlet_and_dtn_differences() {
    let s: Setting<f64> = random::random_setting(14, SettingShape::new(9, 3)).unwrap();
    let (lam, mu) = (c(0.2, 0.9), c(-1.7, -0.3));
    let (gl, gm) = (s.dirichlet(lam).unwrap(), s.dirichlet(mu).unwrap());
    let rhs = s.resolvent_l(mu).unwrap().matmul(&gl).unwrap().scale(mu - lam);
    assert!(rel_residual(&gl.sub(&gm).unwrap(), &rhs).unwrap() < 1e-10);
    let (tl, tm) = (s.dtn(lam).unwrap(), s.dtn(mu).unwrap());
    let rhs = s.a().matmul(&s.resolvent_l(mu).unwrap()).unwrap().matmul(&gl).unwrap().scale(mu - lam);
    assert!(rel_residual(&tl.sub(&tm).unwrap(), &rhs).unwrap() < 1e-10);
}

#[test]
fn dirichlet_adjoint_recovers_a_on_dl() {
    let s: Setting<f64> = random::random_setting(15, SettingShape::new(7, 2)).unwrap();
    let lam = c(0.5, -1.3);
    let lhs = s.dirichlet(lam).unwrap().adjoint().matmul(&s.l().scale(c(-1.0, 0.0)).shift(lam.conj()).unwrap()).unwrap();
    assert!(rel_residual(&lhs, s.a()).unwrap() < 1e-10);
}
