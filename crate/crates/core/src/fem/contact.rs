use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;

use super::mesh::{DofMap, StructuredMesh};

/// A rigid flat obstacle `{x : x[axis] = level}` lying on the low side of the
/// body along `axis`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    pub axis: usize,
    pub level: f64,
}

/// Contact kinematics of the candidate nodes.
///
/// Column `j` of `tn` is `t_nj`; columns `m·j .. m·j+m` of `tt` are `T_tj`.
/// The gap of node `j` after an increment `Δu` is `g_j − t_njᵀΔu`, and its
/// tangential displacement is `T_tjᵀΔu`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactGeometry {
    m: usize,
    tn: SparseMatrix,
    tt: SparseMatrix,
    g: Vec<f64>,
    /// `[t_n1 T_t1 … t_nc T_tc]`, matching the node-blockwise reaction layout.
    t: SparseMatrix,
}

const FRAME_TOL: f64 = 1e-12;

impl ContactGeometry {
    /// Checks shapes, `g ≥ 0`, and orthonormality of every node frame.
    pub fn new(m: usize, tn: SparseMatrix, tt: SparseMatrix, g: Vec<f64>) -> Result<Self> {
        if m != 1 && m != 2 {
            return Err(Error::InvalidProblem(format!(
                "tangential dimension must be 1 or 2, got {m}"
            )));
        }
        let d = tn.nrows();
        let c = tn.ncols();
        if tt.nrows() != d || tt.ncols() != m * c || g.len() != c {
            return Err(Error::dims(format!(
                "contact data: Tn {}x{}, Tt {}x{}, g of length {} (m = {m})",
                d,
                c,
                tt.nrows(),
                tt.ncols(),
                g.len()
            )));
        }
        for (j, &gj) in g.iter().enumerate() {
            if !gj.is_finite() || gj < 0.0 {
                return Err(Error::Penetration { node: j, gap: gj });
            }
        }
        let t = combine(m, &tn, &tt)?;
        // Gram matrix of each node's (1+m) columns must be the identity.
        let tcols = t.transpose();
        for j in 0..c {
            for a in 0..=m {
                for b in a..=m {
                    let ip = sparse_row_dot(&tcols, (1 + m) * j + a, (1 + m) * j + b);
                    let want = if a == b { 1.0 } else { 0.0 };
                    if (ip - want).abs() > FRAME_TOL {
                        return Err(Error::InvalidProblem(format!(
                            "contact frame of node {j} is not orthonormal (columns {a},{b}: {ip})"
                        )));
                    }
                }
            }
        }
        Ok(ContactGeometry { m, tn, tt, g, t })
    }

    /// Geometry with no candidate nodes.
    pub fn empty(d: usize, m: usize) -> Result<Self> {
        Self::new(m, SparseMatrix::zeros(d, 0), SparseMatrix::zeros(d, 0), Vec::new())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn c(&self) -> usize {
        self.g.len()
    }

    pub fn d(&self) -> usize {
        self.tn.nrows()
    }

    pub fn tn(&self) -> &SparseMatrix {
        &self.tn
    }

    pub fn tt(&self) -> &SparseMatrix {
        &self.tt
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    /// Combined `d × (1+m)c` matrix `T`.
    pub fn t(&self) -> &SparseMatrix {
        &self.t
    }

    pub fn with_gap(&self, g: Vec<f64>) -> Result<Self> {
        Self::new(self.m, self.tn.clone(), self.tt.clone(), g)
    }
}

fn sparse_row_dot(a: &SparseMatrix, i: usize, j: usize) -> f64 {
    let (ci, vi) = a.row(i);
    let (cj, vj) = a.row(j);
    let (mut p, mut q, mut s) = (0, 0, 0.0);
    while p < ci.len() && q < cj.len() {
        match ci[p].cmp(&cj[q]) {
            std::cmp::Ordering::Less => p += 1,
            std::cmp::Ordering::Greater => q += 1,
            std::cmp::Ordering::Equal => {
                s += vi[p] * vj[q];
                p += 1;
                q += 1;
            }
        }
    }
    s
}

fn combine(m: usize, tn: &SparseMatrix, tt: &SparseMatrix) -> Result<SparseMatrix> {
    let mut triplets: Vec<(usize, usize, f64)> = tn.triplets().map(|(i, j, v)| (i, (1 + m) * j, v)).collect();
    triplets.extend(tt.triplets().map(|(i, k, v)| (i, (1 + m) * (k / m) + 1 + k % m, v)));
    SparseMatrix::from_triplets(tn.nrows(), (1 + m) * tn.ncols(), &triplets)
}

/// Contact frames of `candidates` against `obstacle`, in the reduced DOF
/// numbering of `dofs`.
///
/// `t_n` is minus the unit vector along the obstacle axis (pointing from the
/// body into the obstacle), so that `g − t_nᵀΔu` grows when a node moves
/// away. The tangential columns are the remaining coordinate axes in order.
pub fn contact_frames(
    mesh: &StructuredMesh,
    dofs: &DofMap,
    candidates: &[usize],
    obstacle: Plane,
) -> Result<ContactGeometry> {
    let dim = mesh.dim();
    if obstacle.axis >= dim {
        return Err(Error::InvalidArgument(format!(
            "obstacle axis {} in a {dim}D mesh",
            obstacle.axis
        )));
    }
    if dofs.n_full() != mesh.n_dofs() {
        return Err(Error::dims("DOF map does not match the mesh"));
    }
    let m = dim - 1;
    let tangents: Vec<usize> = (0..dim).filter(|&a| a != obstacle.axis).collect();
    let mut tn = Vec::new();
    let mut tt = Vec::new();
    let mut g = Vec::with_capacity(candidates.len());
    for (j, &node) in candidates.iter().enumerate() {
        let reduced = |axis: usize| {
            dofs.get(dim * node + axis)
                .ok_or_else(|| Error::InvalidProblem(format!("candidate node {node} has a constrained DOF")))
        };
        tn.push((reduced(obstacle.axis)?, j, -1.0));
        for (k, &a) in tangents.iter().enumerate() {
            tt.push((reduced(a)?, m * j + k, 1.0));
        }
        let gap = mesh.node_coords(node)[obstacle.axis] - obstacle.level;
        if gap < 0.0 {
            return Err(Error::Penetration { node: j, gap });
        }
        g.push(gap);
    }
    let d = dofs.n_free();
    let c = candidates.len();
    ContactGeometry::new(
        m,
        SparseMatrix::from_triplets(d, c, &tn)?,
        SparseMatrix::from_triplets(d, m * c, &tt)?,
        g,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_of_node_above_flat_obstacle() {
        let mesh = StructuredMesh::new_3d(1, 1, 1, [1.0; 3]).unwrap();
        let dofs = DofMap::identity(mesh.n_dofs());
        let geo = contact_frames(&mesh, &dofs, &[0], Plane { axis: 2, level: -0.01 }).unwrap();
        assert_eq!(geo.m(), 2);
        assert_eq!(geo.g(), &[0.01]);
        assert_eq!(geo.tn().get(2, 0), Some(-1.0));
        assert_eq!(geo.tt().get(0, 0), Some(1.0));
        assert_eq!(geo.tt().get(1, 1), Some(1.0));
        // combined layout [t_n, T_t]
        assert_eq!(geo.t().get(2, 0), Some(-1.0));
        assert_eq!(geo.t().get(0, 1), Some(1.0));
        assert_eq!(geo.t().get(1, 2), Some(1.0));
    }

    #[test]
    fn penetrating_candidate_is_rejected() {
        let mesh = StructuredMesh::new_2d(1, 1, 1.0, 1.0).unwrap();
        let dofs = DofMap::identity(mesh.n_dofs());
        let err = contact_frames(&mesh, &dofs, &[0], Plane { axis: 1, level: 0.5 }).unwrap_err();
        assert!(matches!(err, Error::Penetration { .. }));
    }

    #[test]
    fn constrained_candidate_is_rejected() {
        let mesh = StructuredMesh::new_2d(1, 1, 1.0, 1.0).unwrap();
        let mut fixed = vec![false; mesh.n_dofs()];
        fixed[1] = true;
        let dofs = DofMap::from_fixed(&fixed);
        assert!(contact_frames(&mesh, &dofs, &[0], Plane { axis: 1, level: 0.0 }).is_err());
    }

    #[test]
    fn non_orthonormal_frame_is_rejected() {
        let tn = SparseMatrix::from_dense(&[vec![0.0], vec![-2.0]]).unwrap();
        let tt = SparseMatrix::from_dense(&[vec![1.0], vec![0.0]]).unwrap();
        assert!(ContactGeometry::new(1, tn, tt, vec![0.0]).is_err());
        let tn = SparseMatrix::from_dense(&[vec![1.0], vec![0.0]]).unwrap();
        let tt = SparseMatrix::from_dense(&[vec![1.0], vec![0.0]]).unwrap();
        assert!(ContactGeometry::new(1, tn, tt, vec![0.0]).is_err());
    }

    #[test]
    fn negative_gap_is_rejected() {
        let tn = SparseMatrix::from_dense(&[vec![0.0], vec![-1.0]]).unwrap();
        let tt = SparseMatrix::from_dense(&[vec![1.0], vec![0.0]]).unwrap();
        assert!(ContactGeometry::new(1, tn, tt, vec![-0.1]).is_err());
    }
}
