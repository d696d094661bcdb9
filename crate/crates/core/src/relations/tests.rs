use ndarray::{s, Array2};
use num_complex::Complex64;

use super::*;
use crate::framework::{rel_residual, BuildOptions, PairBlock, Setting};
use crate::kernel::{dense, hermitian_eigvals, ComplexMatrix, WeightedSpace};
use crate::random::{self, SettingShape};
use crate::robin::{assemble_ibc, BoundaryParams};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn setting(seed: u64, n: usize, nb: usize) -> Setting<f64> {
    random::random_setting(seed, SettingShape::new(n, nb)).unwrap()
}

fn without_i(s: &Setting<f64>) -> Setting<f64> {
    s.with_identification(ComplexMatrix::zeros(s.dh(), s.h())).unwrap()
}

fn space(k: usize, seed: u64) -> WeightedSpace<f64> {
    random::weights::<f64>(&mut random::rng(seed), k)
}

/// Null space by Gauss-Jordan elimination with partial pivoting.
fn rref_null(a: &Array2<Complex64>, tol: f64) -> Array2<Complex64> {
    let (m, n) = a.dim();
    let mut a = a.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row == m {
            break;
        }
        let (p, best) = (row..m).map(|i| (i, a[(i, col)].norm())).fold((row, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= tol {
            continue;
        }
        for j in 0..n {
            a.swap((row, j), (p, j));
        }
        let piv = a[(row, col)];
        for j in 0..n {
            a[(row, j)] /= piv;
        }
        for i in 0..m {
            if i != row {
                let f = a[(i, col)];
                for j in 0..n {
                    let v = a[(row, j)];
                    a[(i, j)] -= f * v;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..n).filter(|j| !pivots.contains(j)).collect();
    let mut null = Array2::zeros((n, free.len()));
    for (k, &fj) in free.iter().enumerate() {
        null[(fj, k)] = c(1.0, 0.0);
        for (r, &pc) in pivots.iter().enumerate() {
            null[(pc, k)] = -a[(r, fj)];
        }
    }
    null
}

/// `R*` from the defining conditions `<u_j, y> - <v_j, x> = 0`.
fn brute_adjoint(r: &LinearRelation<f64>) -> LinearRelation<f64> {
    let k = r.space().dim();
    let w = r.space().weights();
    let b = r.graph().basis();
    let mut cond = Array2::zeros((b.ncols(), 2 * k));
    for j in 0..b.ncols() {
        for i in 0..k {
            cond[(j, i)] = -(b[(k + i, j)].conj() * w[i]);
            cond[(j, k + i)] = b[(i, j)].conj() * w[i];
        }
    }
    LinearRelation::from_basis(r.space(), &rref_null(&cond, 1e-12)).unwrap()
}

#[test]
fn coefficient_relations() {
    let k = space(3, 1);
    let zero = ComplexMatrix::<f64>::zeros(&k, &k);
    let id = ComplexMatrix::<f64>::identity(&k);
    let dir = LinearRelation::from_coefficients(&zero, &id).unwrap();
    assert_eq!(dir.dim(), 3);
    assert_eq!(dir.domain().unwrap().dim(), 0);
    assert_eq!(dir.multivalued_part().unwrap().dim(), 3);
    let neu = LinearRelation::from_coefficients(&id, &zero).unwrap();
    assert_eq!(neu.range().unwrap().dim(), 0);
    assert_eq!(neu.kernel().unwrap().dim(), 3);
    assert!(matches!(LinearRelation::from_coefficients(&zero, &zero), Err(crate::Error::EmptyRelation)));
    let h = random::hermitian::<f64>(&mut random::rng(2), &k);
    let g = LinearRelation::from_operator(&h).unwrap();
    assert!(g.is_selfadjoint().unwrap());
    assert!(g.is_operator().unwrap());
}

#[test]
fn algebra_matches_matrix_operations() {
    let k = space(4, 3);
    let mut g = random::rng(4);
    for _ in 0..10 {
        let m = random::matrix::<f64>(&mut g, &k, &k);
        let n = random::matrix::<f64>(&mut g, &k, &k);
        let (gm, gn) = (LinearRelation::from_operator(&m).unwrap(), LinearRelation::from_operator(&n).unwrap());
        let sum = LinearRelation::from_operator(&m.add(&n).unwrap()).unwrap();
        assert!(gm.add(&gn).unwrap().distance(&sum).unwrap() <= 1e-11);
        let prod = LinearRelation::from_operator(&m.matmul(&n).unwrap()).unwrap();
        assert!(gm.compose(&gn).unwrap().distance(&prod).unwrap() <= 1e-11);
        let r = random::relation::<f64>(&mut g, &k, 3);
        assert!(r.inverse().unwrap().inverse().unwrap().distance(&r).unwrap() <= 1e-12);
        assert!(r.neg().unwrap().neg().unwrap().distance(&r).unwrap() <= 1e-12);
    }
}

#[test]
fn adjoint_matches_defining_conditions() {
    let mut g = random::rng(5);
    for case in 0..50 {
        let kdim = 1 + case % 5;
        let k = space(kdim, 100 + case as u64);
        let dim = (case * 7) % (2 * kdim + 1);
        let r = random::relation::<f64>(&mut g, &k, dim);
        let adj = r.adjoint().unwrap();
        assert_eq!(adj.dim(), 2 * kdim - r.dim());
        assert!(r.adjoint_pairing_defect(&adj).unwrap() <= 1e-11, "case {case}");
        assert!(adj.distance(&brute_adjoint(&r)).unwrap() <= 1e-10, "case {case}");
        assert!(adj.adjoint().unwrap().distance(&r).unwrap() <= 1e-10, "case {case}");
    }
}

#[test]
fn adjoint_examples() {
    let k = space(3, 6);
    let h = random::hermitian::<f64>(&mut random::rng(7), &k);
    let g = LinearRelation::from_operator(&h).unwrap();
    assert!(g.adjoint().unwrap().distance(&g).unwrap() <= 1e-12);
    let dir = LinearRelation::from_coefficients(&ComplexMatrix::zeros(&k, &k), &ComplexMatrix::identity(&k)).unwrap();
    assert!(dir.adjoint().unwrap().distance(&dir).unwrap() <= 1e-12);
    assert_eq!(LinearRelation::<f64>::zero(&k).adjoint().unwrap().dim(), 6);
}

#[test]
fn symmetry_tests() {
    let k = WeightedSpace::unit(3);
    let upper = ComplexMatrix::on(
        ndarray::arr2(&[[c(1.0, 1.0), c(2.0, 0.0), c(0.0, 0.5)], [c(0.0, 0.0), c(-1.0, 0.3), c(1.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0), c(2.0, -1.0)]]),
        &k,
    )
    .unwrap();
    assert!(!LinearRelation::from_operator(&upper).unwrap().is_symmetric().unwrap());
    // pointwise alpha conj(beta) real
    let ph = [0.3, 1.2, -2.0];
    let a = [0.5, 0.0, 1.5];
    let b = [1.0, 2.0, 0.0];
    let diag = |v: &[Complex64]| {
        let mut m = Array2::zeros((3, 3));
        for i in 0..3 {
            m[(i, i)] = v[i];
        }
        ComplexMatrix::on(m, &k).unwrap()
    };
    let alpha: Vec<Complex64> = (0..3).map(|i| Complex64::from_polar(a[i], ph[i])).collect();
    let beta: Vec<Complex64> = (0..3).map(|i| Complex64::from_polar(b[i], ph[i])).collect();
    let r = LinearRelation::from_coefficients(&diag(&alpha), &diag(&beta)).unwrap();
    assert!(r.is_symmetric().unwrap());
    assert!(r.is_selfadjoint().unwrap());
    let mut g = random::rng(8);
    let ks = space(4, 9);
    assert!(random::selfadjoint_relation::<f64>(&mut g, &ks).is_selfadjoint().unwrap());
    let sym = random::symmetric_relation::<f64>(&mut g, &ks, 1);
    assert!(sym.is_symmetric().unwrap());
    assert!(!sym.is_selfadjoint().unwrap());
}

#[test]
fn preimage_solves_and_reports_failures() {
    let k = space(3, 10);
    let mut g = random::rng(11);
    let m = random::matrix::<f64>(&mut g, &k, &k);
    let r = LinearRelation::from_operator(&m).unwrap();
    let x = random::array::<f64>(&mut g, 3, 2);
    let y = m.data().dot(&x);
    let back = r.solve_preimage(&y).unwrap();
    assert!(dense::fro((&back - &x).view()) <= 1e-10);
    let neu = LinearRelation::from_coefficients(&ComplexMatrix::identity(&k), &ComplexMatrix::zeros(&k, &k)).unwrap();
    assert!(matches!(neu.solve_preimage(&y), Err(crate::Error::MultiValued(3))));
    let small = LinearRelation::from_basis(&k, &random::array::<f64>(&mut g, 6, 2)).unwrap();
    assert!(matches!(small.solve_preimage(&y), Err(crate::Error::RangeDeficient(_))));
}

#[test]
fn maximal_operator_without_coupling_is_lm() {
    let s = without_i(&setting(12, 7, 3));
    let hm = assemble_hm(&s).unwrap();
    assert!(rel_residual(&hm.action.on_f0, &s.lm_map().on_f0).unwrap() == 0.0);
    assert!(rel_residual(&hm.action.on_phi, &s.lm_map().on_phi).unwrap() == 0.0);
}

#[test]
fn maximal_operator_green_identity_and_minimal_symmetry() {
    for seed in 0..4 {
        let s = setting(20 + seed, 9, 3);
        let hm = assemble_hm(&s).unwrap();
        assert!(hm.green_defect(&s).unwrap() <= 1e-10);
        assert_eq!(hm.minimal_domain(&s).unwrap().dim(), 6);
        assert!(hm.minimal_symmetry_defect(&s).unwrap() <= 1e-10);
        hm.require_embedded_minimal_domain(&s).unwrap();
        // vector form of the identity
        let mut g = random::rng(seed);
        for _ in 0..10 {
            let v = random::domain_vector(&mut g, &s);
            let w = random::domain_vector(&mut g, &s);
            let (h, d) = (s.h(), s.dh());
            let inner = |m: &crate::framework::PairMap<f64>, x: &crate::framework::DomainVector<f64>| m.apply(x);
            let lhs = h.inner(inner(&hm.action, &v).view(), s.embed(&w).unwrap().view())
                - h.inner(s.embed(&v).unwrap().view(), inner(&hm.action, &w).view());
            let rhs = d.inner(inner(&hm.trace_b, &v).view(), inner(&hm.trace_a, &w).view())
                - d.inner(inner(&hm.trace_a, &v).view(), inner(&hm.trace_b, &w).view());
            let scale = (1.0 + s.pair_norm(&v)) * (1.0 + s.pair_norm(&w));
            assert!((lhs - rhs).norm() <= 1e-10 * scale);
        }
    }
}

#[test]
fn field_without_coupling_is_the_dirichlet_lift() {
    let s = without_i(&setting(13, 7, 3));
    let lam = c(0.3, 0.8);
    let f = field(&s, lam).unwrap();
    let lift = s.dirichlet_lift(lam).unwrap();
    assert!(dense::fro((&f.pairs.stacked() - &lift.stacked()).view()) <= 1e-12);
    let hm = assemble_hm(&s).unwrap();
    assert!(rel_residual(&f.boundary_operator(&s, &hm), &s.dtn(lam).unwrap()).unwrap() <= 1e-12);
}

#[test]
fn boundary_shift_identity() {
    let s = setting(14, 8, 3);
    let lam = c(-0.4, 1.1);
    let g = s.dirichlet(lam).unwrap();
    let id_h = ComplexMatrix::identity(s.h());
    let id_b = ComplexMatrix::identity(s.dh());
    let left = crate::kernel::solve(&id_h.sub(&g.matmul(s.i_adj()).unwrap()).unwrap(), &g).unwrap();
    let core = id_b.sub(&s.i_adj().matmul(&g).unwrap()).unwrap();
    let right = g.matmul(&crate::kernel::solve(&core, &id_b).unwrap()).unwrap();
    assert!(rel_residual(&left, &right).unwrap() <= 1e-10);
}

/// `F_lambda` from `[lambda embed - H_m; B - I*] P = [0; Id]` on the pair space.
fn field_by_direct_solve(s: &Setting<f64>, lam: Complex64) -> PairBlock<f64> {
    let hm = assemble_hm(s).unwrap();
    let pair = s.pair_space();
    let e = s.embed_map().stacked(pair).unwrap().scale(lam);
    let top = e.data() - hm.action.stacked(pair).unwrap().data();
    let bottom = hm.trace_b.stacked(pair).unwrap().into_data();
    let sys = dense::vstack(top.view(), bottom.view());
    let (n, k) = (s.n(), s.n_boundary());
    let mut rhs = Array2::zeros((n + k, k));
    rhs.slice_mut(s![n.., ..]).assign(&dense::eye::<f64>(k));
    let lu = crate::kernel::LuFactor::new(sys.view()).unwrap();
    PairBlock::from_stacked(&lu.solve(rhs.view()), n)
}

#[test]
fn field_agrees_with_adjoint_and_direct_routes() {
    for seed in 0..4 {
        let s = setting(30 + seed, 8, 3);
        let hm = assemble_hm(&s).unwrap();
        for lam in [c(0.2, 1.3), c(-0.7, -0.4)] {
            let f = field(&s, lam).unwrap();
            assert!(f.eigen_defect(&s, &hm) <= 1e-9);
            assert!(f.left_inverse_defect(&s, &hm) <= 1e-10);
            // adj((A_m - I*) R(conj(lambda), H01))
            let h01 = assemble_h01(&s).unwrap();
            let r = h01.resolvent(lam.conj()).unwrap();
            let tr = hm.trace_a.apply_block(&h01.lift(r.data()));
            let adj = ComplexMatrix::new(tr, s.h().clone(), s.dh().clone()).unwrap().adjoint();
            assert!(rel_residual(&f.embedded, &adj).unwrap() <= 1e-9, "seed {seed}");
            let direct = field_by_direct_solve(&s, lam);
            assert!(dense::fro((&direct.stacked() - &f.pairs.stacked()).view()) <= 1e-9 * f.embedded.norm_fro().max(1.0));
        }
    }
}

#[test]
fn boundary_operator_is_hermitian_below_the_spectrum() {
    let s = setting(15, 8, 3);
    let h01 = assemble_h01(&s).unwrap();
    let lam = default_lambda(&h01).unwrap();
    let sl = boundary_operator(&s, c(lam, 0.0)).unwrap();
    assert!(sl.hermiticity_deviation().unwrap() <= 1e-10);
}

#[test]
fn relation_extensions_match_known_operators() {
    let s = setting(16, 8, 3);
    let k = s.dh();
    let dir = LinearRelation::from_coefficients(&ComplexMatrix::zeros(k, k), &ComplexMatrix::identity(k)).unwrap();
    let hr = assemble_hr(&s, &dir).unwrap();
    let h01 = assemble_ibc(&s, &BoundaryParams::standard()).unwrap();
    assert!(hr.domain().distance(h01.domain()).unwrap() <= 1e-10);
    assert!(rel_residual(hr.matrix(), h01.matrix()).unwrap() <= 1e-10);
    let zero_op = LinearRelation::from_operator(&ComplexMatrix::zeros(k, k)).unwrap();
    let hz = assemble_hr(&s, &zero_op).unwrap();
    let hm = assemble_hm(&s).unwrap();
    assert!(dense::fro(hm.trace_a.apply_block(&hz.domain_basis()).view()) <= 1e-10);
    let mut g = random::rng(17);
    for _ in 0..5 {
        let r = random::selfadjoint_relation::<f64>(&mut g, k);
        let op = assemble_hr(&s, &r).unwrap();
        assert!(op.hermiticity_deviation().unwrap() <= 1e-10);
    }
}

#[test]
fn classical_krein_formula_without_coupling() {
    let s = without_i(&setting(18, 8, 3));
    let theta = random::hermitian::<f64>(&mut random::rng(19), s.dh());
    let r = LinearRelation::from_operator(&theta).unwrap();
    let lam = c(s.spectrum().min() - 1.3, 0.0);
    let formula = hr_resolvent(&s, &r, lam).unwrap();
    let direct = assemble_hr(&s, &r).unwrap().resolvent(lam).unwrap();
    assert!(rel_residual(&formula, &direct).unwrap() <= 1e-8);
}

#[test]
fn relation_resolvent_matches_direct_inversion() {
    let mut g = random::rng(21);
    for seed in 0..8 {
        let s = setting(40 + seed, 8, 3);
        let r = random::selfadjoint_relation::<f64>(&mut g, s.dh());
        let h01 = assemble_h01(&s).unwrap();
        let lam = c(default_lambda(&h01).unwrap(), 0.0);
        let formula = hr_resolvent(&s, &r, lam).unwrap();
        let direct = assemble_hr(&s, &r).unwrap().resolvent(lam).unwrap();
        assert!(rel_residual(&formula, &direct).unwrap() <= 1e-8, "seed {seed}");
        let lam = c(0.3, 2.0);
        let formula = hr_resolvent(&s, &r, lam).unwrap();
        let direct = assemble_hr(&s, &r).unwrap().resolvent(lam).unwrap();
        assert!(rel_residual(&formula, &direct).unwrap() <= 1e-8, "seed {seed}");
    }
}

#[test]
fn relation_resolvent_fails_at_an_eigenvalue() {
    let s = setting(22, 8, 3);
    let r = random::selfadjoint_relation::<f64>(&mut random::rng(23), s.dh());
    let hr = assemble_hr(&s, &r).unwrap();
    let h01 = assemble_h01(&s).unwrap();
    let avoid: Vec<f64> = s
        .spectrum()
        .eigenvalues()
        .iter()
        .copied()
        .chain(hermitian_eigvals(h01.matrix(), 1e-10).unwrap().iter().copied())
        .collect();
    let ev = hermitian_eigvals(hr.matrix(), 1e-10).unwrap();
    let lam = ev.iter().copied().find(|e| avoid.iter().all(|a| (a - e).abs() > 0.05)).expect("isolated eigenvalue");
    assert!(matches!(hr_resolvent(&s, &r, c(lam, 0.0)), Err(crate::Error::MultiValued(_))));
}

#[test]
fn classification_examples() {
    let s = setting(24, 8, 3);
    let k = s.dh();
    let dir = LinearRelation::from_coefficients(&ComplexMatrix::zeros(k, k), &ComplexMatrix::identity(k)).unwrap();
    let v = classify_selfadjoint(&s, &dir, None).unwrap();
    assert!(v.is_selfadjoint_by_theorem && v.is_selfadjoint_direct && v.is_symmetric);
    assert_eq!(v.lambda_in_resolvent_set, Some(true));
    let n = random::matrix::<f64>(&mut random::rng(25), k, k);
    let v = classify_selfadjoint(&s, &LinearRelation::from_operator(&n).unwrap(), None).unwrap();
    assert!(!v.is_selfadjoint_by_theorem && !v.is_selfadjoint_direct && !v.is_symmetric);
}

#[test]
fn classification_verdicts_agree() {
    let mut g = random::rng(26);
    let s = setting(27, 8, 3);
    let mut counts = (0, 0);
    for case in 0..30 {
        let r = if case % 3 == 2 {
            random::symmetric_relation::<f64>(&mut g, s.dh(), 1)
        } else {
            random::selfadjoint_relation::<f64>(&mut g, s.dh())
        };
        let v = classify_selfadjoint(&s, &r, None).unwrap();
        assert!(v.is_symmetric, "case {case}");
        assert!(v.agree(), "case {case}: {v:?}");
        if v.is_selfadjoint_direct {
            counts.0 += 1;
        } else {
            counts.1 += 1;
        }
    }
    assert_eq!(counts, (20, 10));
}

#[test]
fn triples_on_random_settings() {
    for seed in 0..3 {
        let s = setting(50 + seed, 8, 3);
        let r = qbt_verify_robin(&s).unwrap();
        assert!(r.pass(), "{:?}", r.failures().collect::<Vec<_>>());
        let r = qbt_verify_ibc(&s).unwrap();
        assert!(r.pass(), "{:?}", r.failures().collect::<Vec<_>>());
    }
}

#[test]
fn rank_deficient_boundary_map_fails_the_joint_rank() {
    let base = setting(55, 8, 3);
    let mut a = base.a().data().clone();
    let row0 = a.row(0).to_owned();
    a.row_mut(2).assign(&row0);
    let a = ComplexMatrix::new(a, base.h().clone(), base.dh().clone()).unwrap();
    let opts = BuildOptions { require_hermitian_t: true, require_full_rank_a: false };
    let s = Setting::with_options(base.l().clone(), a, base.i().clone(), base.t().clone(), base.lambda0(), opts).unwrap();
    let r = qbt_verify_robin(&s).unwrap();
    assert!(!r.check("joint_trace_rank").unwrap().pass);
}

#[test]
fn relation_documents_round_trip() {
    let k = space(3, 60);
    let r = random::relation::<f64>(&mut random::rng(61), &k, 2);
    let back = LinearRelation::from_doc(&k, &r.to_doc("demo")).unwrap();
    assert!(back.distance(&r).unwrap() <= 1e-15);
}
