//! Generators for the two benchmark families: a 2.5×1 plane-stress strip of
//! Q4 elements and a 2×1×1 block of H8 elements, each pressed by a uniform
//! vertical traction on its top face onto a flat rigid obstacle below.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::contact::{contact_frames, Plane};
use super::element::{assemble_h8, assemble_q4_plane_stress};
use super::mesh::{DofMap, Material, StructuredMesh};
use super::problem::ProblemInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExampleKind {
    /// Planar strip, `N_X = 2.5 N_Y`.
    Example1,
    /// Block, `N_X = 2 N_Y = 2 N_Z`.
    Example2,
}

/// Displacement supports besides contact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Support {
    /// Every DOF on the face `x = 0` fixed; `K` is positive definite.
    Clamped,
    /// No supports; `K` is only semidefinite.
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExampleParams {
    pub kind: ExampleKind,
    pub n_y: usize,
    pub traction: f64,
    pub gap: f64,
    pub mu: f64,
    pub support: Support,
    pub material: Material,
}

impl ExampleParams {
    pub fn example1(n_y: usize) -> Self {
        ExampleParams {
            kind: ExampleKind::Example1,
            n_y,
            traction: 0.01,
            gap: 0.01,
            mu: 0.5,
            support: Support::Clamped,
            material: Material::default(),
        }
    }

    pub fn example2(n_y: usize) -> Self {
        ExampleParams {
            kind: ExampleKind::Example2,
            n_y,
            traction: 5e-3,
            gap: 5e-3,
            mu: 0.5,
            support: Support::Clamped,
            material: Material::default(),
        }
    }

    pub fn mesh(&self) -> Result<StructuredMesh> {
        if self.n_y == 0 {
            return Err(Error::InvalidArgument("N_Y must be at least 1".into()));
        }
        let h = 1.0 / self.n_y as f64;
        match self.kind {
            ExampleKind::Example1 => {
                if !(5 * self.n_y).is_multiple_of(2) {
                    return Err(Error::InvalidArgument(format!(
                        "N_X = 2.5·{} is not an integer",
                        self.n_y
                    )));
                }
                StructuredMesh::new_2d(5 * self.n_y / 2, self.n_y, h, h)
            }
            ExampleKind::Example2 => StructuredMesh::new_3d(2 * self.n_y, self.n_y, self.n_y, [h; 3]),
        }
    }
}

/// A generated benchmark together with the mesh bookkeeping needed to map
/// reduced vectors back to nodes.
#[derive(Debug, Clone)]
pub struct GeneratedExample {
    pub params: ExampleParams,
    pub mesh: StructuredMesh,
    pub dofs: DofMap,
    /// Mesh node of each contact candidate, in contact order.
    pub candidates: Vec<usize>,
    /// Consistent nodal load on every mesh DOF, supports included.
    pub full_load: Vec<f64>,
    pub problem: ProblemInstance,
}

pub fn generate(params: &ExampleParams) -> Result<GeneratedExample> {
    Material::new(params.material.young, params.material.poisson)?;
    for (name, v) in [("traction", params.traction), ("gap", params.gap)] {
        if !v.is_finite() {
            return Err(Error::InvalidArgument(format!("{name} must be finite")));
        }
    }
    if params.gap < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "initial gap must be nonnegative, got {}",
            params.gap
        )));
    }
    let mesh = params.mesh()?;
    let dim = mesh.dim();
    let vertical = mesh.vertical_axis();

    let k_full = match params.kind {
        ExampleKind::Example1 => assemble_q4_plane_stress(&mesh, &params.material)?,
        ExampleKind::Example2 => assemble_h8(&mesh, &params.material)?,
    };

    let mut fixed = vec![false; mesh.n_dofs()];
    if params.support == Support::Clamped {
        for node in mesh.face_nodes(0, false) {
            fixed[dim * node..dim * node + dim].iter_mut().for_each(|f| *f = true);
        }
    }
    let dofs = DofMap::from_fixed(&fixed);

    let full_load = top_traction_load(&mesh, params.traction);
    let k = k_full.restrict(dofs.as_slice(), dofs.n_free(), dofs.as_slice(), dofs.n_free())?;
    let p = dofs.reduce_vector(&full_load);

    let candidates: Vec<usize> = mesh
        .face_nodes(vertical, false)
        .into_iter()
        .filter(|&n| !fixed[dim * n])
        .collect();
    let obstacle = Plane {
        axis: vertical,
        level: -params.gap,
    };
    let contact = contact_frames(&mesh, &dofs, &candidates, obstacle)?;
    let problem = ProblemInstance::new(k, p, contact, params.mu)?;
    Ok(GeneratedExample {
        params: *params,
        mesh,
        dofs,
        candidates,
        full_load,
        problem,
    })
}

/// Consistent nodal forces of a uniform downward traction on the top face:
/// each element edge (2D) or face (3D) passes `traction · area / nodes` to
/// each of its nodes.
fn top_traction_load(mesh: &StructuredMesh, traction: f64) -> Vec<f64> {
    let dim = mesh.dim();
    let vertical = mesh.vertical_axis();
    let h = mesh.element_size();
    let n = mesh.counts();
    let top = mesh.nodes_per_axis()[vertical] - 1;
    let mut f = vec![0.0; mesh.n_dofs()];
    if dim == 2 {
        let share = traction * h[0] / 2.0;
        for i in 0..n[0] {
            for node in [mesh.node_index(i, top, 0), mesh.node_index(i + 1, top, 0)] {
                f[dim * node + vertical] -= share;
            }
        }
    } else {
        let share = traction * h[0] * h[1] / 4.0;
        for j in 0..n[1] {
            for i in 0..n[0] {
                for (a, b) in [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)] {
                    f[dim * mesh.node_index(a, b, top) + vertical] -= share;
                }
            }
        }
    }
    f
}

/// Planar benchmark with clamped `x = 0` face.
pub fn build_example1(n_y: usize, traction: f64, gap: f64, mu: f64) -> Result<ProblemInstance> {
    let params = ExampleParams {
        traction,
        gap,
        mu,
        ..ExampleParams::example1(n_y)
    };
    Ok(generate(&params)?.problem)
}

/// Three-dimensional benchmark with clamped `x = 0` face.
pub fn build_example2(n_y: usize, traction: f64, gap: f64, mu: f64) -> Result<ProblemInstance> {
    let params = ExampleParams {
        traction,
        gap,
        mu,
        ..ExampleParams::example2(n_y)
    };
    Ok(generate(&params)?.problem)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example1_counts() {
        let ex = generate(&ExampleParams::example1(4)).unwrap();
        assert_eq!(ex.mesh.counts()[..2], [10, 4]);
        assert_eq!(ex.problem.c(), 10);
        assert_eq!(ex.problem.d(), 2 * 11 * 5 - 2 * 5);
        assert_eq!(ex.problem.m(), 1);
        assert!(ex.problem.contact().g().iter().all(|&g| g == 0.01));
    }

    #[test]
    fn example1_needs_integral_nx() {
        assert!(build_example1(3, 0.01, 0.01, 0.5).is_err());
        assert!(build_example1(0, 0.01, 0.01, 0.5).is_err());
    }

    #[test]
    fn example2_counts() {
        let ex = generate(&ExampleParams::example2(2)).unwrap();
        assert_eq!(ex.problem.c(), 4 * 3);
        assert_eq!(ex.problem.d(), 3 * (5 * 3 * 3 - 3 * 3));
        assert_eq!(ex.problem.m(), 2);
    }

    #[test]
    fn free_support_keeps_every_bottom_node() {
        let params = ExampleParams {
            support: Support::Free,
            ..ExampleParams::example1(2)
        };
        let ex = generate(&params).unwrap();
        assert_eq!(ex.problem.c(), 6);
        assert_eq!(ex.problem.d(), 2 * 6 * 3);
    }

    #[test]
    fn load_totals() {
        for (params, area) in [(ExampleParams::example1(4), 2.5), (ExampleParams::example2(2), 2.0)] {
            let ex = generate(&params).unwrap();
            let v = ex.mesh.vertical_axis();
            let dim = ex.mesh.dim();
            let total: f64 = ex.full_load.iter().skip(v).step_by(dim).sum();
            assert!((total + params.traction * area).abs() <= 1e-12, "{total}");
            let horizontal: f64 = ex
                .full_load
                .iter()
                .enumerate()
                .filter(|(i, _)| i % dim != v)
                .map(|(_, f)| f.abs())
                .sum();
            assert_eq!(horizontal, 0.0);
        }
    }

    #[test]
    fn rejects_negative_gap() {
        assert!(build_example1(2, 0.01, -0.01, 0.5).is_err());
    }
}
