#![allow(dead_code)]

use nalgebra::DMatrix;
use pdcontact::fem::ContactGeometry;
use pdcontact::{ProblemInstance, SparseMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dense(a: &SparseMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(a.nrows(), a.ncols(), &a.to_dense().concat())
}

pub fn sparse(a: &DMatrix<f64>) -> SparseMatrix {
    let rows: Vec<Vec<f64>> = (0..a.nrows()).map(|i| a.row(i).iter().copied().collect()).collect();
    SparseMatrix::from_dense(&rows).unwrap()
}

/// `AᵀA + shift·I` with `A` uniform in [−1, 1], symmetrised exactly.
pub fn random_spd(rng: &mut impl Rng, n: usize, shift: f64) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let mut k = a.transpose() * a + DMatrix::identity(n, n) * shift;
    for i in 0..n {
        for j in 0..i {
            k[(i, j)] = k[(j, i)];
        }
    }
    k
}

/// Planar frames: node `j` owns DOFs `(2j, 2j+1)` with `t_n = −e_{2j+1}`
/// and `T_t = e_{2j}`.
pub fn planar_geometry(d: usize, g: Vec<f64>) -> ContactGeometry {
    let c = g.len();
    let tn: Vec<_> = (0..c).map(|j| (2 * j + 1, j, -1.0)).collect();
    let tt: Vec<_> = (0..c).map(|j| (2 * j, j, 1.0)).collect();
    ContactGeometry::new(
        1,
        SparseMatrix::from_triplets(d, c, &tn).unwrap(),
        SparseMatrix::from_triplets(d, c, &tt).unwrap(),
        g,
    )
    .unwrap()
}

/// Random planar instance with `c` nodes and two extra DOFs. The load on
/// each node is drawn so that lift-off, sticking and sliding all occur
/// across seeds.
pub fn random_planar(seed: u64, c: usize, mu: f64) -> ProblemInstance {
    let mut rng = rng(seed);
    let d = 2 * c + 2;
    let k = random_spd(&mut rng, d, 0.5);
    let g: Vec<f64> = (0..c).map(|_| rng.random_range(0.0..0.1)).collect();
    let mut p: Vec<f64> = (0..d).map(|_| rng.random_range(-0.2..0.2)).collect();
    for j in 0..c {
        p[2 * j] = rng.random_range(-1.5..1.5);
        p[2 * j + 1] = rng.random_range(-2.0..0.5);
    }
    ProblemInstance::new(sparse(&k), p, planar_geometry(d, g), mu).unwrap()
}

/// Single node, `K = I(2)`, DOFs `(x, y)`, obstacle below.
pub fn single_node(p: [f64; 2], g: f64, mu: f64) -> ProblemInstance {
    ProblemInstance::new(SparseMatrix::identity(2), p.to_vec(), planar_geometry(2, vec![g]), mu).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
