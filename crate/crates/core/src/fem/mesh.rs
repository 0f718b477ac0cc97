use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid of Q4 (2D) or H8 (3D) elements on a box with one corner at
/// the origin.
///
/// Nodes are numbered `i + (n_x+1)·(j + (n_y+1)·k)` with `i` along x, `j`
/// along y and `k` along z. The vertical axis is y in 2D and z in 3D.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuredMesh {
    dim: usize,
    n: [usize; 3],
    h: [f64; 3],
}

impl StructuredMesh {
    pub fn new_2d(n_x: usize, n_y: usize, h_x: f64, h_y: f64) -> Result<Self> {
        Self::build(2, [n_x, n_y, 0], [h_x, h_y, 0.0])
    }

    pub fn new_3d(n_x: usize, n_y: usize, n_z: usize, h: [f64; 3]) -> Result<Self> {
        Self::build(3, [n_x, n_y, n_z], h)
    }

    fn build(dim: usize, n: [usize; 3], h: [f64; 3]) -> Result<Self> {
        for a in 0..dim {
            if n[a] == 0 {
                return Err(Error::InvalidArgument(format!(
                    "element count along axis {a} must be at least 1"
                )));
            }
            if !(h[a] > 0.0 && h[a].is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "element size along axis {a} must be positive, got {}",
                    h[a]
                )));
            }
        }
        Ok(StructuredMesh { dim, n, h })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Element counts per axis (`n_z` is 0 in 2D).
    pub fn counts(&self) -> [usize; 3] {
        self.n
    }

    pub fn element_size(&self) -> [f64; 3] {
        self.h
    }

    pub fn vertical_axis(&self) -> usize {
        self.dim - 1
    }

    /// Nodes per axis; 1 for the absent z axis in 2D.
    pub fn nodes_per_axis(&self) -> [usize; 3] {
        let mut p = [1; 3];
        for (pa, na) in p.iter_mut().zip(&self.n).take(self.dim) {
            *pa = na + 1;
        }
        p
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes_per_axis().iter().product()
    }

    pub fn n_elements(&self) -> usize {
        self.n[..self.dim].iter().product()
    }

    pub fn n_dofs(&self) -> usize {
        self.dim * self.n_nodes()
    }

    pub fn node_index(&self, i: usize, j: usize, k: usize) -> usize {
        let p = self.nodes_per_axis();
        i + p[0] * (j + p[1] * k)
    }

    pub fn node_grid(&self, node: usize) -> [usize; 3] {
        let p = self.nodes_per_axis();
        [node % p[0], (node / p[0]) % p[1], node / (p[0] * p[1])]
    }

    pub fn node_coords(&self, node: usize) -> [f64; 3] {
        let g = self.node_grid(node);
        [
            g[0] as f64 * self.h[0],
            g[1] as f64 * self.h[1],
            g[2] as f64 * self.h[2],
        ]
    }

    /// Global node indices of element `(i, j, k)` in the usual
    /// counter-clockwise order (bottom face first for H8).
    pub fn element_nodes(&self, i: usize, j: usize, k: usize) -> Vec<usize> {
        let quad = |k| {
            [
                self.node_index(i, j, k),
                self.node_index(i + 1, j, k),
                self.node_index(i + 1, j + 1, k),
                self.node_index(i, j + 1, k),
            ]
        };
        if self.dim == 2 {
            quad(0).to_vec()
        } else {
            let mut v = quad(k).to_vec();
            v.extend(quad(k + 1));
            v
        }
    }

    /// Element grid positions in numbering order.
    pub fn elements(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        let nz = if self.dim == 2 { 1 } else { self.n[2] };
        (0..nz).flat_map(move |k| (0..self.n[1]).flat_map(move |j| (0..self.n[0]).map(move |i| [i, j, k])))
    }

    /// Nodes on the face `axis = 0` (`high == false`) or `axis = max`,
    /// ascending.
    pub fn face_nodes(&self, axis: usize, high: bool) -> Vec<usize> {
        let p = self.nodes_per_axis();
        let fixed = if high { p[axis] - 1 } else { 0 };
        (0..self.n_nodes())
            .filter(|&nd| self.node_grid(nd)[axis] == fixed)
            .collect()
    }
}

/// Isotropic linear elastic material.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub young: f64,
    pub poisson: f64,
}

impl Material {
    pub fn new(young: f64, poisson: f64) -> Result<Self> {
        if !(young > 0.0 && young.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "Young's modulus must be positive, got {young}"
            )));
        }
        if !(poisson > -1.0 && poisson < 0.5) {
            return Err(Error::InvalidArgument(format!(
                "Poisson's ratio must lie in (-1, 0.5), got {poisson}"
            )));
        }
        Ok(Material { young, poisson })
    }
}

impl Default for Material {
    fn default() -> Self {
        Material {
            young: 1.0,
            poisson: 0.3,
        }
    }
}

/// Map from full nodal DOFs to the reduced (unconstrained) numbering.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    map: Vec<Option<usize>>,
    n_free: usize,
}

impl DofMap {
    /// `fixed[i]` marks DOF `i` as constrained to zero.
    pub fn from_fixed(fixed: &[bool]) -> Self {
        let mut n_free = 0;
        let map = fixed
            .iter()
            .map(|&f| {
                if f {
                    None
                } else {
                    n_free += 1;
                    Some(n_free - 1)
                }
            })
            .collect();
        DofMap { map, n_free }
    }

    pub fn identity(n: usize) -> Self {
        DofMap {
            map: (0..n).map(Some).collect(),
            n_free: n,
        }
    }

    pub fn n_full(&self) -> usize {
        self.map.len()
    }

    pub fn n_free(&self) -> usize {
        self.n_free
    }

    pub fn get(&self, full: usize) -> Option<usize> {
        self.map[full]
    }

    pub fn as_slice(&self) -> &[Option<usize>] {
        &self.map
    }

    pub fn reduce_vector(&self, full: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_free];
        for (v, m) in full.iter().zip(&self.map) {
            if let Some(i) = m {
                out[*i] = *v;
            }
        }
        out
    }

    pub fn expand_vector(&self, reduced: &[f64]) -> Vec<f64> {
        self.map.iter().map(|m| m.map_or(0.0, |i| reduced[i])).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_2d() {
        let m = StructuredMesh::new_2d(10, 4, 0.25, 0.25).unwrap();
        assert_eq!(m.n_nodes(), 55);
        assert_eq!(m.n_dofs(), 110);
        assert_eq!(m.n_elements(), 40);
        assert_eq!(m.elements().count(), 40);
        assert_eq!(m.face_nodes(1, false).len(), 11);
        assert_eq!(m.node_coords(m.node_index(10, 4, 0)), [2.5, 1.0, 0.0]);
    }

    #[test]
    fn counts_3d() {
        let m = StructuredMesh::new_3d(4, 2, 2, [0.5; 3]).unwrap();
        assert_eq!(m.n_nodes(), 45);
        assert_eq!(m.face_nodes(2, false).len(), 15);
        assert_eq!(m.element_nodes(0, 0, 0), vec![0, 1, 6, 5, 15, 16, 21, 20]);
        let last = m.node_index(4, 2, 2);
        assert_eq!(m.node_grid(last), [4, 2, 2]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(StructuredMesh::new_2d(0, 1, 1.0, 1.0).is_err());
        assert!(StructuredMesh::new_2d(1, 1, -1.0, 1.0).is_err());
        assert!(Material::new(0.0, 0.3).is_err());
        assert!(Material::new(1.0, 0.5).is_err());
        assert!(Material::new(1.0, -1.0).is_err());
        assert!(Material::new(1.0, 0.3).is_ok());
    }

    #[test]
    fn dof_map_round_trip() {
        let map = DofMap::from_fixed(&[true, false, false, true]);
        assert_eq!(map.n_free(), 2);
        assert_eq!(map.reduce_vector(&[1.0, 2.0, 3.0, 4.0]), vec![2.0, 3.0]);
        assert_eq!(map.expand_vector(&[2.0, 3.0]), vec![0.0, 2.0, 3.0, 0.0]);
    }
}
