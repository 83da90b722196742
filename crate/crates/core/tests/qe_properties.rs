mod common;

use common::*;
use proptest::prelude::*;
use qelie_core::algebra::{derivation_residual, series, SeriesKind, SeriesVerdict};
use qelie_core::catalog::{make_heisenberg, make_heisenberg_extension, make_n6a, CatalogEntry};
use qelie_core::qe::{bakry_emery, nontrivial, qe_solve, verify_two_eigenvalue_structure, QEOperator};
use qelie_core::{MetricLieAlgebra, Scalar, StructureTensor};

fn sc(x: f64) -> Scalar {
    Scalar::Float(x)
}

fn z_index(l: &MetricLieAlgebra) -> usize {
    l.label_index("z").unwrap()
}

#[test]
fn heisenberg_closed_form() {
    for s in 1..=3 {
        for c in [1.0, 2.5] {
            let e = make_heisenberg(s, sc(c)).unwrap();
            let l = &e.algebra;
            for m in [1.0, 2.0, 5.0] {
                let sols = qe_solve(l, m, TOL).unwrap();
                assert_eq!(sols.len(), 2, "h{} c={c} m={m}", 2 * s + 1);
                let len = c * (m * (s as f64 + 1.0) / 2.0).sqrt();
                for sol in &sols {
                    assert!((sol.lambda + c * c / 2.0).abs() < 1e-12);
                    let xz = sol.x[z_index(l)];
                    assert!((xz.abs() - len).abs() < 1e-10, "{xz} vs {len}");
                    assert!((sol.x.norm() - len).abs() < 1e-10);
                    assert!(sol.flags.x_killing && sol.flags.x_central && !sol.flags.einstein);
                    assert!(sol.residual <= TOL);
                }
                assert!((&sols[0].x + &sols[1].x).norm() < 1e-12);
            }
            for m in [-1.0, -2.0] {
                assert!(qe_solve(l, m, TOL).unwrap().is_empty(), "m={m}");
            }
        }
    }
}

#[test]
fn zero_m_is_rejected() {
    let l = make_heisenberg(1, 1).unwrap().algebra;
    assert!(matches!(qe_solve(&l, 0.0, TOL), Err(qelie_core::Error::ZeroM)));
}

#[test]
fn abelian_is_einstein_for_every_m() {
    let l = MetricLieAlgebra::with_identity(MetricLieAlgebra::default_labels(4), StructureTensor::zeros(4)).unwrap();
    for m in [1.0, -1.0, 2.0, -2.0, 5.0] {
        let sols = qe_solve(&l, m, TOL).unwrap();
        assert_eq!(sols.len(), 1);
        assert!(sols[0].flags.einstein && sols[0].lambda.abs() < 1e-15);
        assert!(nontrivial(&sols).is_empty());
    }
}

#[test]
fn qe_operator_is_not_a_derivation() {
    for s in 1..=3 {
        let l = make_heisenberg(s, 1).unwrap().algebra;
        let sols = qe_solve(&l, 1.0, TOL).unwrap();
        let f = QEOperator::new(&l, &sols[0]);
        assert_eq!(f.rank(TOL), 1);
        assert!(f.image(TOL).contains_vector(&l.basis_vector(z_index(&l)), TOL));
        // F = c² on z and 0 elsewhere, so F[x,y] = c² z while [Fx,y] + [x,Fy] = 0
        assert!(derivation_residual(&l, &f.f) > 0.5);
    }
}

fn solvable_catalog() -> Vec<CatalogEntry> {
    vec![
        make_heisenberg_extension(1, sc(1.0), &[vec![sc(1.0)]]).unwrap(),
        make_heisenberg_extension(1, sc(2.0), &[vec![sc(0.3)]]).unwrap(),
        make_heisenberg_extension(2, sc(1.0), &[vec![sc(1.0), sc(1.0)]]).unwrap(),
        make_heisenberg_extension(2, sc(1.5), &[vec![sc(1.0), sc(-0.4)]]).unwrap(),
        make_heisenberg_extension(2, sc(1.0), &[vec![sc(1.0), sc(0.0)], vec![sc(0.0), sc(1.0)]]).unwrap(),
    ]
}

#[test]
fn solvable_extensions_have_central_negative_solutions() {
    for e in solvable_catalog() {
        let l = &e.algebra;
        assert!(matches!(series(l, SeriesKind::Derived, TOL).verdict, SeriesVerdict::Solvable { .. }));
        for m in [1.0, 2.0, 5.0] {
            let sols = qe_solve(l, m, TOL).unwrap();
            let nt = nontrivial(&sols);
            assert_eq!(nt.len(), 2, "{} m={m}", e.name);
            for sol in nt {
                assert!(sol.lambda < 0.0);
                assert!(sol.flags.x_central && sol.flags.x_killing);
                let rep = verify_two_eigenvalue_structure(l, sol, TOL).unwrap();
                assert!(rep.all_passed(), "{}: {:?}", e.name, rep.failed());
            }
        }
        assert!(nontrivial(&qe_solve(l, -1.0, TOL).unwrap()).is_empty());
    }
}

#[test]
fn returned_solutions_satisfy_the_equation() {
    let mut r = rng(77);
    let mut seen = 0;
    for _ in 0..60 {
        let e = if r.random_bool(0.5) { random_nilpotent_entry(&mut r) } else { random_solvable_entry(&mut r) };
        for l in [e.algebra.clone(), with_random_gram(&mut r, &e.algebra)] {
            for m in [1.0, -1.0, 2.0] {
                for sol in qe_solve(&l, m, TOL).unwrap() {
                    let be = bakry_emery(&l, &sol.x, m, TOL).unwrap();
                    let res = (be - l.gram() * sol.lambda).norm();
                    assert!(res <= TOL, "{}: {res:e}", e.name);
                    seen += 1;
                }
            }
        }
    }
    assert!(seen > 0);
}

use rand::Rng;

#[test]
fn n6a_has_no_left_invariant_solution() {
    let l = make_n6a(sc(1.0), sc(2.0)).unwrap().algebra;
    for m in [1.0, 2.0, -1.0] {
        assert!(qe_solve(&l, m, TOL).unwrap().is_empty());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn scaling_the_metric(s in 1usize..=3, c in 0.3f64..3.0, t in 0.2f64..5.0, m in prop::sample::select(vec![1.0, 2.0, 5.0])) {
        let l = make_heisenberg(s, sc(c)).unwrap().algebra;
        let scaled = l.with_gram(l.gram() * (t * t)).unwrap();
        let a = qe_solve(&l, m, TOL).unwrap();
        let b = qe_solve(&scaled, m, TOL).unwrap();
        prop_assert_eq!(a.len(), b.len());
        let lam_a = a[0].lambda;
        for sol in &b {
            prop_assert!((sol.lambda * t * t - lam_a).abs() <= 1e-9 * lam_a.abs().max(1.0));
            // coordinates of X scale like 1/t²
            prop_assert!((sol.x.norm() * t * t - a[0].x.norm()).abs() <= 1e-9 * a[0].x.norm());
        }
    }

    #[test]
    fn rotating_the_basis(seed in any::<u64>(), s in 1usize..=2, m in prop::sample::select(vec![1.0, 2.0, 5.0])) {
        let mut r = rng(seed);
        let e = make_heisenberg(s, 1).unwrap();
        let l = &e.algebra;
        let p = random_orthogonal(&mut r, l.dim());
        let moved = l.change_basis(&p, l.labels().to_vec()).unwrap();
        let a = qe_solve(l, m, TOL).unwrap();
        let b = qe_solve(&moved, m, TOL).unwrap();
        prop_assert_eq!(b.len(), 2);
        for sol in &b {
            prop_assert!((sol.lambda - a[0].lambda).abs() < 1e-9);
            // X transforms back to a multiple of z
            let back = &p * &sol.x;
            prop_assert!((back[l.dim() - 1].abs() - a[0].x.norm()).abs() < 1e-8);
        }
    }
}
