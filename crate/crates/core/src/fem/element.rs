//! Isoparametric Q4 (plane stress) and H8 elements with full Gauss
//! quadrature, and assembly over a [`StructuredMesh`].

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;

use super::mesh::{Material, StructuredMesh};

const GAUSS: [f64; 2] = [-0.577_350_269_189_625_8, 0.577_350_269_189_625_8];

/// Natural coordinates of the element nodes, in [`StructuredMesh::element_nodes`] order.
fn natural_nodes(dim: usize) -> Vec<[f64; 3]> {
    let quad = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];
    if dim == 2 {
        quad.iter().map(|q| [q[0], q[1], 0.0]).collect()
    } else {
        [-1.0, 1.0]
            .iter()
            .flat_map(|&z| quad.iter().map(move |q| [q[0], q[1], z]))
            .collect()
    }
}

fn gauss_points(dim: usize) -> Vec<[f64; 3]> {
    let mut pts = Vec::new();
    let zs: &[f64] = if dim == 2 { &[0.0] } else { &GAUSS };
    for &z in zs {
        for &y in &GAUSS {
            for &x in &GAUSS {
                pts.push([x, y, z]);
            }
        }
    }
    pts
}

/// Stress–strain matrix: plane stress in 2D (xx, yy, xy), isotropic in 3D
/// (xx, yy, zz, xy, yz, zx), engineering shear strains.
pub fn elasticity_matrix(dim: usize, mat: &Material) -> DMatrix<f64> {
    let (e, nu) = (mat.young, mat.poisson);
    if dim == 2 {
        let c = e / (1.0 - nu * nu);
        DMatrix::from_row_slice(3, 3, &[c, c * nu, 0.0, c * nu, c, 0.0, 0.0, 0.0, c * (1.0 - nu) / 2.0])
    } else {
        let c = e / ((1.0 + nu) * (1.0 - 2.0 * nu));
        let mut d = DMatrix::zeros(6, 6);
        for i in 0..3 {
            for j in 0..3 {
                d[(i, j)] = if i == j { c * (1.0 - nu) } else { c * nu };
            }
            d[(3 + i, 3 + i)] = c * (1.0 - 2.0 * nu) / 2.0;
        }
        d
    }
}

/// Strain–displacement matrix and Jacobian determinant at natural point `xi`.
fn strain_matrix(dim: usize, coords: &[[f64; 3]], xi: [f64; 3]) -> Result<(DMatrix<f64>, f64)> {
    let nat = natural_nodes(dim);
    let nn = nat.len();
    // dN/dξ, one row per natural direction
    let mut dn = DMatrix::zeros(dim, nn);
    for (a, na) in nat.iter().enumerate() {
        let f: Vec<f64> = (0..dim).map(|i| (1.0 + xi[i] * na[i]) / 2.0).collect();
        for i in 0..dim {
            let mut v = na[i] / 2.0;
            for (k, fk) in f.iter().enumerate() {
                if k != i {
                    v *= fk;
                }
            }
            dn[(i, a)] = v;
        }
    }
    let mut jac = DMatrix::zeros(dim, dim);
    for a in 0..nn {
        for i in 0..dim {
            for k in 0..dim {
                jac[(i, k)] += dn[(i, a)] * coords[a][k];
            }
        }
    }
    let det = jac.determinant();
    if !(det > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "element Jacobian determinant {det} is not positive"
        )));
    }
    let inv = jac
        .try_inverse()
        .ok_or_else(|| Error::InvalidArgument("singular element Jacobian".into()))?;
    let dx: DMatrix<f64> = inv * dn;

    let nstrain = if dim == 2 { 3 } else { 6 };
    let mut b = DMatrix::zeros(nstrain, dim * nn);
    for a in 0..nn {
        let c = dim * a;
        if dim == 2 {
            let (x, y) = (dx[(0, a)], dx[(1, a)]);
            b[(0, c)] = x;
            b[(1, c + 1)] = y;
            b[(2, c)] = y;
            b[(2, c + 1)] = x;
        } else {
            let (x, y, z) = (dx[(0, a)], dx[(1, a)], dx[(2, a)]);
            b[(0, c)] = x;
            b[(1, c + 1)] = y;
            b[(2, c + 2)] = z;
            b[(3, c)] = y;
            b[(3, c + 1)] = x;
            b[(4, c + 1)] = z;
            b[(4, c + 2)] = y;
            b[(5, c)] = z;
            b[(5, c + 2)] = x;
        }
    }
    Ok((b, det))
}

fn check_coords(dim: usize, coords: &[[f64; 3]]) -> Result<()> {
    if !(dim == 2 || dim == 3) || coords.len() != 1 << dim {
        return Err(Error::InvalidArgument(format!(
            "a {dim}D element needs {} nodes, got {}",
            1usize << dim.min(3),
            coords.len()
        )));
    }
    Ok(())
}

/// Element stiffness matrix (unit thickness in 2D). DOFs are ordered node by
/// node, components x, y (, z).
pub fn element_stiffness(dim: usize, coords: &[[f64; 3]], mat: &Material) -> Result<DMatrix<f64>> {
    check_coords(dim, coords)?;
    let d = elasticity_matrix(dim, mat);
    let n = dim * coords.len();
    let mut ke = DMatrix::zeros(n, n);
    for xi in gauss_points(dim) {
        let (b, det) = strain_matrix(dim, coords, xi)?;
        // unit Gauss weights
        ke += b.transpose() * &d * b * det;
    }
    Ok(ke)
}

/// Stresses at the Gauss points for element displacements `ue`.
pub fn element_stresses(dim: usize, coords: &[[f64; 3]], mat: &Material, ue: &[f64]) -> Result<Vec<Vec<f64>>> {
    check_coords(dim, coords)?;
    if ue.len() != dim * coords.len() {
        return Err(Error::dims("element displacement length"));
    }
    let d = elasticity_matrix(dim, mat);
    let u = DVector::from_column_slice(ue);
    gauss_points(dim)
        .into_iter()
        .map(|xi| {
            let (b, _) = strain_matrix(dim, coords, xi)?;
            Ok((&d * (b * &u)).iter().copied().collect())
        })
        .collect()
}

fn element_coords(mesh: &StructuredMesh, nodes: &[usize]) -> Vec<[f64; 3]> {
    nodes.iter().map(|&n| mesh.node_coords(n)).collect()
}

/// Global stiffness of a 2D mesh of plane-stress Q4 elements, no supports.
pub fn assemble_q4_plane_stress(mesh: &StructuredMesh, mat: &Material) -> Result<SparseMatrix> {
    if mesh.dim() != 2 {
        return Err(Error::InvalidArgument("Q4 assembly needs a 2D mesh".into()));
    }
    assemble(mesh, mat)
}

/// Global stiffness of a 3D mesh of H8 elements, no supports.
pub fn assemble_h8(mesh: &StructuredMesh, mat: &Material) -> Result<SparseMatrix> {
    if mesh.dim() != 3 {
        return Err(Error::InvalidArgument("H8 assembly needs a 3D mesh".into()));
    }
    assemble(mesh, mat)
}

/// The grid is uniform, so every element has the same stiffness; it is
/// computed once and scattered into a CSR pattern built from the nodal
/// 3×3(×3) neighbourhood.
fn assemble(mesh: &StructuredMesh, mat: &Material) -> Result<SparseMatrix> {
    let dim = mesh.dim();
    let first = mesh.element_nodes(0, 0, 0);
    let ke = element_stiffness(dim, &element_coords(mesh, &first), mat)?;

    let p = mesh.nodes_per_axis();
    let n_dofs = mesh.n_dofs();
    let mut row_offsets = Vec::with_capacity(n_dofs + 1);
    row_offsets.push(0);
    let mut col_indices = Vec::new();
    let range = |c: usize, len: usize| c.saturating_sub(1)..(c + 2).min(len);
    for node in 0..mesh.n_nodes() {
        let g = mesh.node_grid(node);
        let mut neighbours = Vec::with_capacity(27);
        for k in range(g[2], p[2]) {
            for j in range(g[1], p[1]) {
                for i in range(g[0], p[0]) {
                    neighbours.push(mesh.node_index(i, j, k));
                }
            }
        }
        for _ in 0..dim {
            for &nb in &neighbours {
                col_indices.extend((0..dim).map(|c| dim * nb + c));
            }
            row_offsets.push(col_indices.len());
        }
    }
    let mut values = vec![0.0; col_indices.len()];

    for [i, j, k] in mesh.elements() {
        let nodes = mesh.element_nodes(i, j, k);
        let dofs: Vec<usize> = nodes.iter().flat_map(|&n| (0..dim).map(move |c| dim * n + c)).collect();
        for (a, &ra) in dofs.iter().enumerate() {
            let (lo, hi) = (row_offsets[ra], row_offsets[ra + 1]);
            let cols = &col_indices[lo..hi];
            for (b, &cb) in dofs.iter().enumerate() {
                let pos = cols.binary_search(&cb).expect("element coupling lies in the stencil");
                values[lo + pos] += ke[(a, b)];
            }
        }
    }
    SparseMatrix::new(n_dofs, n_dofs, row_offsets, col_indices, values)
}
