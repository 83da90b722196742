mod common;

use common::*;
use qelie_core::algebra::{center, Subspace};
use qelie_core::catalog::{make_heisenberg, make_heisenberg_extension, make_n6a};
use qelie_core::curvature::default_split;
use qelie_core::qe::{
    kirillov_frame, nontrivial, qe_solve, verify_heisenberg_extension_form, verify_nilpotent_structure_theorem,
    verify_solvable_conditions, verify_two_eigenvalue_structure,
};
use qelie_core::{Error, MetricLieAlgebra, Scalar, StructureTensor};

fn sc(x: f64) -> Scalar {
    Scalar::Float(x)
}

#[test]
fn two_eigenvalue_structure_on_h7() {
    let h7 = make_heisenberg(3, 1).unwrap().algebra;
    let sols = qe_solve(&h7, 1.0, TOL).unwrap();
    let rep = verify_two_eigenvalue_structure(&h7, &sols[0], TOL).unwrap();
    assert!(rep.applicable && rep.all_passed(), "{rep:#?}");
}

#[test]
fn two_eigenvalue_structure_is_vacuous_for_abelian() {
    let l = MetricLieAlgebra::with_identity(MetricLieAlgebra::default_labels(3), StructureTensor::zeros(3)).unwrap();
    let sols = qe_solve(&l, 1.0, TOL).unwrap();
    let rep = verify_two_eigenvalue_structure(&l, &sols[0], TOL).unwrap();
    assert!(!rep.applicable && rep.checks.is_empty());
}

#[test]
fn nilpotent_structure_theorem_on_h5() {
    let h5 = make_heisenberg(2, 1).unwrap().algebra;
    // (x1, y1, z, x2, y2)
    let order = [0, 1, 4, 2, 3];
    let basis = Mat::from_fn(5, 5, |r, c| if r == order[c] { 1.0 } else { 0.0 });
    let rep = verify_nilpotent_structure_theorem(&h5, &basis, TOL).unwrap();
    assert!(rep.all_passed(), "{rep:#?}");
    let k = kirillov_frame(&h5, TOL).unwrap();
    assert!(verify_nilpotent_structure_theorem(&h5, &k, TOL).unwrap().all_passed());
}

#[test]
fn nilpotent_structure_theorem_catches_perturbation() {
    // h5 plus [x1, x2] = z, so w1 = x2 no longer commutes with x
    let e = [(0, 1, 4, 1), (2, 3, 4, 1), (0, 2, 4, 1)];
    let e: Vec<_> = e.iter().map(|&(i, j, k, v)| (i, j, k, Scalar::from(v))).collect();
    let st = StructureTensor::from_entries(5, &e).unwrap();
    let l = MetricLieAlgebra::with_identity(MetricLieAlgebra::default_labels(5), st).unwrap();
    let order = [0, 1, 4, 2, 3];
    let basis = Mat::from_fn(5, 5, |r, c| if r == order[c] { 1.0 } else { 0.0 });
    let rep = verify_nilpotent_structure_theorem(&l, &basis, TOL).unwrap();
    assert!(rep.failed().contains(&"xw-bracket"), "{rep:#?}");
}

#[test]
fn nilpotent_structure_theorem_rejects_non_orthonormal_frame() {
    let h5 = make_heisenberg(2, 1).unwrap().algebra;
    let basis = Mat::identity(5, 5) * 2.0;
    assert!(matches!(verify_nilpotent_structure_theorem(&h5, &basis, TOL), Err(Error::BadPartition(_))));
}

#[test]
fn n6a_table_basis_brackets_have_the_theorem_shape() {
    // Bracket shape holds in the table basis; the last check needs a QE
    // solution, which this family does not have (see the curvature tests).
    let n6 = make_n6a(1, 2).unwrap().algebra;
    let rep = verify_nilpotent_structure_theorem(&n6, &Mat::identity(6, 6), TOL).unwrap();
    for name in ["xy-bracket", "xw-bracket", "yw-bracket", "ww-bracket", "z-center"] {
        assert!(rep.get(name).unwrap().passed, "{name}");
    }
    assert!(!rep.get("lambda-kirillov").unwrap().passed);
}

fn solvable_report(entry: &qelie_core::catalog::CatalogEntry) -> qelie_core::VerdictReport {
    let (a, n) = default_split(&entry.algebra, TOL).unwrap();
    verify_solvable_conditions(&entry.algebra, &a, &n, 1.0, TOL).unwrap()
}

#[test]
fn solvable_conditions_on_extensions() {
    for (alpha, c) in [(1.0, 1.0), (0.7, 1.5), (2.0, 0.5)] {
        let e = make_heisenberg_extension(1, sc(c), &[vec![sc(alpha)]]).unwrap();
        assert!((e.algebra.gram()[(0, 0)] - (2.0 * alpha / c).powi(2)).abs() < 1e-12);
        let rep = solvable_report(&e);
        assert!(rep.all_passed(), "{rep:#?}");
    }
    let bi = make_heisenberg_extension(2, sc(1.3), &[vec![sc(0.7), sc(0.0)], vec![sc(0.0), sc(1.1)]]).unwrap();
    assert!(solvable_report(&bi).all_passed());
}

#[test]
fn perturbed_metric_breaks_only_condition_iv() {
    let e = make_heisenberg_extension(2, sc(1.0), &[vec![sc(1.0), sc(1.0)]]).unwrap();
    let mut g = e.algebra.gram().clone();
    g[(0, 0)] *= 1.1;
    let l = e.algebra.with_gram(g).unwrap();
    let (a, n) = default_split(&l, TOL).unwrap();
    let rep = verify_solvable_conditions(&l, &a, &n, 1.0, TOL).unwrap();
    assert_eq!(rep.failed(), vec!["iv-metric-on-a"], "{rep:#?}");
}

#[test]
fn non_normal_action_is_reported() {
    // a acts on (x, y) by a Jordan block plus trace-free diagonal: not normal
    let e = [(0, 1, 1, 1.0), (0, 2, 2, -1.0), (0, 2, 1, 1.0)];
    let e: Vec<_> = e.iter().map(|&(i, j, k, v)| (i, j, k, Scalar::Float(v))).collect();
    let st = StructureTensor::from_entries(3, &e).unwrap();
    let l = MetricLieAlgebra::with_identity(MetricLieAlgebra::default_labels(3), st).unwrap();
    let (a, n) = default_split(&l, TOL).unwrap();
    assert!(matches!(verify_solvable_conditions(&l, &a, &n, 1.0, TOL), Err(Error::AdANotNormal)));
}

fn heis_frame(k: usize, s: usize) -> Mat {
    // columns (x1, y1, ..., xs, ys, z) inside the extension basis (a.., x1, y1, .., z)
    let n = k + 2 * s + 1;
    Mat::from_fn(n, 2 * s + 1, |r, c| if r == k + c { 1.0 } else { 0.0 })
}

#[test]
fn heisenberg_extension_form() {
    let e = make_heisenberg_extension(2, sc(1.0), &[vec![sc(1.0), sc(0.5)]]).unwrap();
    let (a, n) = default_split(&e.algebra, TOL).unwrap();
    let rep = verify_heisenberg_extension_form(&e.algebra, &a, &n, &heis_frame(1, 2), TOL).unwrap();
    assert!(rep.all_passed(), "{rep:#?}");
}

#[test]
fn heisenberg_extension_form_catches_z_column() {
    // extra [a, z] = x/2; the verifier only reads ad_a, so Jacobi is not needed here
    let entries = [(0, 1, 1, 1.0), (0, 2, 2, -1.0), (1, 2, 3, 1.0), (0, 3, 1, 0.5)];
    let e: Vec<_> = entries.iter().map(|&(i, j, k, v)| (i, j, k, Scalar::Float(v))).collect();
    let st = StructureTensor::from_entries(4, &e).unwrap();
    let l = MetricLieAlgebra::with_identity(vec!["a".into(), "x".into(), "y".into(), "z".into()], st).unwrap();
    let a = Subspace::coordinate(4, &[0]);
    let n = Subspace::coordinate(4, &[1, 2, 3]);
    match verify_heisenberg_extension_form(&l, &a, &n, &heis_frame(1, 1), TOL) {
        Ok(rep) => assert!(rep.failed().contains(&"z-column"), "{rep:#?}"),
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn heisenberg_extension_dimension_bound() {
    // dim a = 2 over h3; the second generator acts by (1, 1, 2)
    let entries = [
        (0, 2, 2, 1.0),
        (0, 3, 3, -1.0),
        (1, 2, 2, 1.0),
        (1, 3, 3, 1.0),
        (1, 4, 4, 2.0),
        (2, 3, 4, 1.0),
    ];
    let e: Vec<_> = entries.iter().map(|&(i, j, k, v)| (i, j, k, Scalar::Float(v))).collect();
    let st = StructureTensor::from_entries(5, &e).unwrap();
    let l = MetricLieAlgebra::with_identity(MetricLieAlgebra::default_labels(5), st).unwrap();
    let a = Subspace::coordinate(5, &[0, 1]);
    let n = Subspace::coordinate(5, &[2, 3, 4]);
    let rep = verify_heisenberg_extension_form(&l, &a, &n, &heis_frame(2, 1), TOL).unwrap();
    assert!(rep.failed().contains(&"dim-bound"));
    assert!(rep.failed().contains(&"pattern"));
}

#[test]
fn heisenberg_extension_form_rejects_bad_frame() {
    let e = make_heisenberg_extension(1, sc(1.0), &[vec![sc(1.0)]]).unwrap();
    let (a, n) = default_split(&e.algebra, TOL).unwrap();
    // (x, z, y): [x, z] = 0, not a Heisenberg frame
    let mut frame = heis_frame(1, 1);
    frame.swap_columns(1, 2);
    assert!(matches!(
        verify_heisenberg_extension_form(&e.algebra, &a, &n, &frame, TOL),
        Err(Error::BasisNotHeisenberg(_))
    ));
}

#[test]
fn kirillov_frame_on_table_family() {
    let n6 = make_n6a(1, 2).unwrap().algebra;
    let k = kirillov_frame(&n6, TOL).unwrap();
    assert!(max_abs(&(k.transpose() * &k - Mat::identity(6, 6))) < 1e-12);
    let z = k.column(2).into_owned();
    assert!(center(&n6, TOL).contains_vector(&z, 1e-12));
    let c = n6.inner(&n6.bracket(&k.column(0).into_owned(), &k.column(1).into_owned()), &z);
    assert!(c > 0.0);
}

#[test]
fn heisenberg_solutions_pass_every_verifier() {
    for s in 1..=3 {
        let h = make_heisenberg(s, 2).unwrap().algebra;
        let sols = qe_solve(&h, 2.0, TOL).unwrap();
        for sol in nontrivial(&sols) {
            assert!(verify_two_eigenvalue_structure(&h, sol, TOL).unwrap().all_passed());
        }
        let k = kirillov_frame(&h, TOL).unwrap();
        assert!(verify_nilpotent_structure_theorem(&h, &k, TOL).unwrap().all_passed());
    }
}
