#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use qelie_core::catalog::{make_almost_abelian, make_heisenberg, make_heisenberg_extension, make_n6a, make_n7a, CatalogEntry};
use qelie_core::{MetricLieAlgebra, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;

pub const TOL: f64 = 1e-9;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_orthogonal(rng: &mut impl Rng, n: usize) -> Mat {
    let m = Mat::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    m.qr().q()
}

/// SPD matrix with eigenvalues log-uniform in [1, 1000].
pub fn random_spd(rng: &mut impl Rng, n: usize) -> Mat {
    let q = random_orthogonal(rng, n);
    let d = Vector::from_fn(n, |_, _| 10f64.powf(rng.random_range(0.0..3.0)));
    let g = &q * Mat::from_diagonal(&d) * q.transpose();
    (&g + g.transpose()) * 0.5
}

pub fn random_vector(rng: &mut impl Rng, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
}

fn f(x: f64) -> Scalar {
    Scalar::Float(x)
}

pub fn random_nilpotent_entry(rng: &mut impl Rng) -> CatalogEntry {
    match rng.random_range(0..4) {
        0 => make_heisenberg(rng.random_range(1..=3), f(rng.random_range(0.5..2.0))).unwrap(),
        1 => {
            let a: f64 = rng.random_range(0.3..1.2);
            let c = a * 3f64.sqrt() * rng.random_range(1.0..2.0);
            make_n6a(f(a), f(c)).unwrap()
        }
        2 => {
            let a: f64 = rng.random_range(0.3..1.2);
            let c = a * 3f64.sqrt() * rng.random_range(1.0..2.0);
            make_n7a(f(a), f(c)).unwrap()
        }
        _ => {
            // strictly upper triangular action: nilpotent almost-abelian
            let n = rng.random_range(2..=4);
            let a: Vec<Vec<Scalar>> =
                (0..n).map(|i| (0..n).map(|j| f(if j > i { rng.random_range(-1.5..1.5) } else { 0.0 })).collect()).collect();
            make_almost_abelian(&a).unwrap()
        }
    }
}

pub fn random_solvable_entry(rng: &mut impl Rng) -> CatalogEntry {
    match rng.random_range(0..2) {
        0 => {
            let s = rng.random_range(1..=3);
            let k = rng.random_range(1..=s);
            let rows: Vec<Vec<Scalar>> = (0..k).map(|_| (0..s).map(|_| f(rng.random_range(-2.0..2.0))).collect()).collect();
            make_heisenberg_extension(s, f(rng.random_range(0.5..2.0)), &rows).unwrap()
        }
        _ => {
            // trace-free diagonalizable action, possibly with a rotation block
            let n = rng.random_range(2..=4);
            let mut a = Mat::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
            let tr = a.trace() / n as f64;
            for i in 0..n {
                a[(i, i)] -= tr;
            }
            let rows = (0..n).map(|i| (0..n).map(|j| f(a[(i, j)])).collect()).collect::<Vec<_>>();
            make_almost_abelian(&rows).unwrap()
        }
    }
}

pub fn with_random_gram(rng: &mut impl Rng, l: &MetricLieAlgebra) -> MetricLieAlgebra {
    let g = random_spd(rng, l.dim());
    l.with_gram(g).unwrap()
}

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.abs()))
}
