//! The contact problem as a second-order cone linear complementarity
//! problem
//!
//! ```text
//! K ∋ x ⊥ y ∈ K,   y = M11 x + M12 v + w1,   M21 x + M22 v + w2 = 0
//! ```
//!
//! with `x = (g − T_nᵀΔu; λ_j, T_tjᵀΔu …)`, `y = (−r_n; −μ r_nj, r_tj …)`,
//! `v = (Δu, λ, r_n, r_t)` and `K = R₊^c × (L^{1+m})^c`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cones::tangential_norm;
use crate::error::{Error, Result};
use crate::fem::ProblemInstance;
use crate::linalg::{column_matrix, column_vector, dot, norm2, read_matrix_market, write_matrix_market, SparseMatrix};
use crate::numfmt;

/// `R₊^nonneg × L^{soc_size} × … (soc_count times)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeDescriptor {
    pub nonneg: usize,
    pub soc_count: usize,
    pub soc_size: usize,
}

impl ConeDescriptor {
    pub fn dim(&self) -> usize {
        self.nonneg + self.soc_count * self.soc_size
    }

    /// `"R+^c, (SOC^{1+m})^c"` with the numbers filled in.
    pub fn describe(&self) -> String {
        format!("R+^{}, (SOC^{})^{}", self.nonneg, self.soc_size, self.soc_count)
    }

    /// Largest violation of membership: `max(−x_i)` on the orthant,
    /// `max(‖x1‖ − x0)` on each cone, clipped at 0.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for &xi in &x[..self.nonneg] {
            worst = worst.max(-xi);
        }
        for blk in x[self.nonneg..].chunks(self.soc_size.max(1)) {
            worst = worst.max(tangential_norm(&blk[1..]) - blk[0]);
        }
        worst
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SoclcpForm {
    pub d: usize,
    pub c: usize,
    pub m: usize,
    pub m11: SparseMatrix,
    pub m12: SparseMatrix,
    pub m21: SparseMatrix,
    pub m22: SparseMatrix,
    pub w1: Vec<f64>,
    pub w2: Vec<f64>,
    pub cone: ConeDescriptor,
}

impl SoclcpForm {
    /// Length of `x` and `y`: `(2+m)c`.
    pub fn nx(&self) -> usize {
        (2 + self.m) * self.c
    }

    /// Length of `v`: `d + (2+m)c`.
    pub fn nv(&self) -> usize {
        self.d + (2 + self.m) * self.c
    }

    fn check_shapes(&self) -> Result<()> {
        let (nx, nv) = (self.nx(), self.nv());
        let shapes = [
            ("M11", &self.m11, nx, nx),
            ("M12", &self.m12, nx, nv),
            ("M21", &self.m21, nx + self.d, nx),
            ("M22", &self.m22, nx + self.d, nv),
        ];
        for (name, a, r, c) in shapes {
            if a.nrows() != r || a.ncols() != c {
                return Err(Error::dims(format!(
                    "{name} is {}x{}, expected {r}x{c}",
                    a.nrows(),
                    a.ncols()
                )));
            }
        }
        if self.w1.len() != nx || self.w2.len() != nx + self.d {
            return Err(Error::dims("w1/w2 lengths"));
        }
        let want = ConeDescriptor {
            nonneg: self.c,
            soc_count: self.c,
            soc_size: 1 + self.m,
        };
        if self.cone != want {
            return Err(Error::InvalidProblem(format!(
                "cone {:?} does not match c = {}, m = {}",
                self.cone, self.c, self.m
            )));
        }
        Ok(())
    }
}

/// Builds the embedding of `problem`. For `m = 1` the second-order cones are
/// two-dimensional and `E₂ = (0, 1)ᵀ`.
pub fn build_soclcp(problem: &ProblemInstance) -> Result<SoclcpForm> {
    let d = problem.d();
    let c = problem.c();
    let m = problem.m();
    let bs = 1 + m;
    let nx = (2 + m) * c;
    let nv = d + nx;
    let mu = problem.mu();
    let contact = problem.contact();
    // column offsets inside v
    let (col_lambda, col_rn, col_rt) = (d, d + c, d + 2 * c);
    let soc_row = |j: usize| c + bs * j;

    let mut m12 = Vec::new();
    for j in 0..c {
        m12.push((j, col_rn + j, -1.0));
        m12.push((soc_row(j), col_rn + j, -mu));
        for a in 0..m {
            m12.push((soc_row(j) + 1 + a, col_rt + m * j + a, 1.0));
        }
    }

    let mut m22 = Vec::new();
    for (i, j, v) in contact.tn().triplets() {
        m22.push((j, i, v));
    }
    for j in 0..c {
        m22.push((soc_row(j), col_lambda + j, -1.0));
    }
    for (i, k, v) in contact.tt().triplets() {
        let (j, a) = (k / m, k % m);
        m22.push((soc_row(j) + 1 + a, i, -v));
    }
    for (i, j, v) in problem.k().triplets() {
        m22.push((nx + i, j, v));
    }
    for (i, j, v) in contact.tn().triplets() {
        m22.push((nx + i, col_rn + j, -v));
    }
    for (i, k, v) in contact.tt().triplets() {
        m22.push((nx + i, col_rt + k, -v));
    }

    let m21: Vec<_> = (0..nx).map(|i| (i, i, 1.0)).collect();
    let mut w2 = vec![0.0; nx + d];
    for (j, g) in contact.g().iter().enumerate() {
        w2[j] = -g;
    }
    for (i, p) in problem.p().iter().enumerate() {
        w2[nx + i] = -p;
    }
    Ok(SoclcpForm {
        d,
        c,
        m,
        m11: SparseMatrix::zeros(nx, nx),
        m12: SparseMatrix::from_triplets(nx, nv, &m12)?,
        m21: SparseMatrix::from_triplets(nx + d, nx, &m21)?,
        m22: SparseMatrix::from_triplets(nx + d, nv, &m22)?,
        w1: vec![0.0; nx],
        w2,
        cone: ConeDescriptor {
            nonneg: c,
            soc_count: c,
            soc_size: bs,
        },
    })
}

/// `(x, y, v)` assembled from the problem data and `(Δu, r, λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SoclcpPoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub v: Vec<f64>,
}

/// Default certificate `λ_j = ‖T_tjᵀΔu‖`.
pub fn natural_lambdas(problem: &ProblemInstance, du: &[f64]) -> Result<Vec<f64>> {
    let m = problem.m();
    let ut = problem.contact().tt().spmv_transpose(du)?;
    Ok(ut.chunks(m.max(1)).take(problem.c()).map(tangential_norm).collect())
}

pub fn soclcp_point(problem: &ProblemInstance, du: &[f64], r: &[f64], lambdas: &[f64]) -> Result<SoclcpPoint> {
    let (d, c, m) = (problem.d(), problem.c(), problem.m());
    let bs = 1 + m;
    if du.len() != d || r.len() != bs * c || lambdas.len() != c {
        return Err(Error::dims("SOCLCP point operands"));
    }
    let contact = problem.contact();
    let un = contact.tn().spmv_transpose(du)?;
    let ut = contact.tt().spmv_transpose(du)?;
    let mut x: Vec<f64> = contact.g().iter().zip(&un).map(|(g, u)| g - u).collect();
    let mut y: Vec<f64> = r.chunks(bs).map(|b| -b[0]).collect();
    for j in 0..c {
        x.push(lambdas[j]);
        x.extend_from_slice(&ut[m * j..m * j + m]);
        y.push(-problem.mu() * r[bs * j]);
        y.extend_from_slice(&r[bs * j + 1..bs * j + bs]);
    }
    let mut v = du.to_vec();
    v.extend_from_slice(lambdas);
    v.extend(r.chunks(bs).map(|b| b[0]));
    v.extend(r.chunks(bs).flat_map(|b| b[1..].to_vec()));
    Ok(SoclcpPoint { x, y, v })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoclcpReport {
    pub tol: f64,
    /// Largest violation of `x ∈ K`.
    pub x_cone: f64,
    /// Largest violation of `y ∈ K`.
    pub y_cone: f64,
    /// `|⟨x, y⟩|`
    pub complementarity: f64,
    /// `‖y − M11 x − M12 v − w1‖`
    pub y_equation: f64,
    /// `‖M21 x + M22 v + w2‖`
    pub linear_equation: f64,
}

impl SoclcpReport {
    /// `(name, value, passed)` for each check.
    pub fn checks(&self) -> [(&'static str, f64, bool); 5] {
        let t = self.tol;
        [
            ("x in cone", self.x_cone, self.x_cone <= t),
            ("y in cone", self.y_cone, self.y_cone <= t),
            ("complementarity", self.complementarity, self.complementarity <= t),
            ("y equation", self.y_equation, self.y_equation <= t),
            ("linear equation", self.linear_equation, self.linear_equation <= t),
        ]
    }

    pub fn passed(&self) -> bool {
        self.checks().iter().all(|c| c.2)
    }
}

/// Checks `(Δu, r, λ)` against `form`; `λ` defaults to the natural
/// certificate. `(x, y, v)` are built from `problem` by their definitions,
/// so the equations test the form as well as the point.
pub fn verify_soclcp(
    form: &SoclcpForm,
    problem: &ProblemInstance,
    du: &[f64],
    r: &[f64],
    lambdas: Option<&[f64]>,
    tol: f64,
) -> Result<SoclcpReport> {
    form.check_shapes()?;
    if (form.d, form.c, form.m) != (problem.d(), problem.c(), problem.m()) {
        return Err(Error::dims("SOCLCP form and problem disagree"));
    }
    let lam = match lambdas {
        Some(l) => l.to_vec(),
        None => natural_lambdas(problem, du)?,
    };
    let pt = soclcp_point(problem, du, r, &lam)?;
    let m11x = form.m11.spmv(&pt.x)?;
    let m12v = form.m12.spmv(&pt.v)?;
    let ye: Vec<f64> = (0..form.nx())
        .map(|i| pt.y[i] - m11x[i] - m12v[i] - form.w1[i])
        .collect();
    let m21x = form.m21.spmv(&pt.x)?;
    let m22v = form.m22.spmv(&pt.v)?;
    let le: Vec<f64> = (0..m21x.len()).map(|i| m21x[i] + m22v[i] + form.w2[i]).collect();
    Ok(SoclcpReport {
        tol,
        x_cone: form.cone.violation(&pt.x),
        y_cone: form.cone.violation(&pt.y),
        complementarity: dot(&pt.x, &pt.y).abs(),
        y_equation: norm2(&ye),
        linear_equation: norm2(&le),
    })
}

pub const MANIFEST_FORMAT: &str = "pdcontact-soclcp";
pub const MANIFEST_VERSION: u32 = 1;
const BLOCK_FILES: [&str; 6] = ["M11.mtx", "M12.mtx", "M21.mtx", "M22.mtx", "w1.mtx", "w2.mtx"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SoclcpManifest {
    pub format: String,
    pub version: u32,
    pub d: usize,
    pub c: usize,
    pub m: usize,
    pub nx: usize,
    pub nv: usize,
    /// Human-readable cone product, e.g. `R+^3, (SOC^3)^3`.
    pub cones: String,
    pub cone: ConeDescriptor,
    pub files: Vec<String>,
}

impl SoclcpManifest {
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let man: SoclcpManifest = serde_json::from_slice(bytes)?;
        if man.format != MANIFEST_FORMAT || man.version != MANIFEST_VERSION {
            return Err(Error::InvalidArgument(format!(
                "not a version {MANIFEST_VERSION} SOCLCP manifest (format `{}`, version {})",
                man.format, man.version
            )));
        }
        if man.m != 1 && man.m != 2 {
            return Err(Error::InvalidArgument(format!(
                "tangential dimension {} in manifest",
                man.m
            )));
        }
        let nx = (2 + man.m).checked_mul(man.c);
        let nv = nx.and_then(|nx| nx.checked_add(man.d));
        if Some(man.nx) != nx || Some(man.nv) != nv {
            return Err(Error::InvalidArgument("manifest sizes are inconsistent".into()));
        }
        if man.files != BLOCK_FILES {
            return Err(Error::InvalidArgument(format!("unexpected block list {:?}", man.files)));
        }
        Ok(man)
    }
}

/// Writes every block as Matrix Market (vectors as one-column matrices) and
/// a `manifest.json` into `dir`, creating it if needed.
pub fn export_matrix_market(form: &SoclcpForm, dir: impl AsRef<Path>) -> Result<()> {
    form.check_shapes()?;
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let w1 = column_matrix(&form.w1)?;
    let w2 = column_matrix(&form.w2)?;
    let blocks = [&form.m11, &form.m12, &form.m21, &form.m22, &w1, &w2];
    for (name, a) in BLOCK_FILES.iter().zip(blocks) {
        write_matrix_market(a, dir.join(name))?;
    }
    let manifest = SoclcpManifest {
        format: MANIFEST_FORMAT.into(),
        version: MANIFEST_VERSION,
        d: form.d,
        c: form.c,
        m: form.m,
        nx: form.nx(),
        nv: form.nv(),
        cones: form.cone.describe(),
        cone: form.cone,
        files: BLOCK_FILES.iter().map(|s| s.to_string()).collect(),
    };
    fs::write(dir.join("manifest.json"), numfmt::to_vec(&manifest)?)?;
    Ok(())
}

/// Reads an export written by [`export_matrix_market`].
pub fn read_soclcp_export(dir: impl AsRef<Path>) -> Result<SoclcpForm> {
    let dir = dir.as_ref();
    let man = SoclcpManifest::parse(&fs::read(dir.join("manifest.json"))?)?;
    let mut blocks = Vec::with_capacity(BLOCK_FILES.len());
    for name in BLOCK_FILES {
        blocks.push(read_matrix_market(dir.join(name))?);
    }
    let w2 = column_vector(&blocks.pop().expect("six blocks"))?;
    let w1 = column_vector(&blocks.pop().expect("six blocks"))?;
    let m22 = blocks.pop().expect("six blocks");
    let m21 = blocks.pop().expect("six blocks");
    let m12 = blocks.pop().expect("six blocks");
    let m11 = blocks.pop().expect("six blocks");
    let form = SoclcpForm {
        d: man.d,
        c: man.c,
        m: man.m,
        m11,
        m12,
        m21,
        m22,
        w1,
        w2,
        cone: man.cone,
    };
    form.check_shapes()?;
    Ok(form)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::ContactGeometry;

    fn single_node(p: [f64; 2], mu: f64) -> ProblemInstance {
        let tn = SparseMatrix::from_dense(&[vec![0.0], vec![-1.0]]).unwrap();
        let tt = SparseMatrix::from_dense(&[vec![1.0], vec![0.0]]).unwrap();
        let geo = ContactGeometry::new(1, tn, tt, vec![0.0]).unwrap();
        ProblemInstance::new(SparseMatrix::identity(2), p.to_vec(), geo, mu).unwrap()
    }

    #[test]
    fn shapes_for_planar_node() {
        let form = build_soclcp(&single_node([1.0, -1.0], 0.5)).unwrap();
        assert_eq!((form.nx(), form.nv()), (3, 5));
        assert_eq!(form.m12.get(1, 3), Some(-0.5));
        assert_eq!(form.m12.get(0, 3), Some(-1.0));
        assert_eq!(form.m12.get(2, 4), Some(1.0));
        assert_eq!(form.cone.describe(), "R+^1, (SOC^2)^1");
    }

    #[test]
    fn slip_solution_passes() {
        let prob = single_node([1.0, -1.0], 0.5);
        let form = build_soclcp(&prob).unwrap();
        let rep = verify_soclcp(&form, &prob, &[0.5, 0.0], &[-1.0, -0.5], None, 1e-12).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn perturbed_reaction_fails_equilibrium() {
        let prob = single_node([1.0, -1.0], 0.5);
        let form = build_soclcp(&prob).unwrap();
        let rep = verify_soclcp(&form, &prob, &[0.5, 0.0], &[-1.0 - 1e-3, -0.5], None, 1e-8).unwrap();
        assert!(!rep.passed());
        assert!((rep.linear_equation - 1e-3).abs() < 1e-12, "{rep:?}");
    }

    #[test]
    fn cone_violation_measure() {
        let cone = ConeDescriptor {
            nonneg: 1,
            soc_count: 1,
            soc_size: 3,
        };
        assert_eq!(cone.violation(&[1.0, 5.0, 3.0, 4.0]), 0.0);
        assert_eq!(cone.violation(&[-2.0, 1.0, 3.0, 4.0]), 4.0);
    }

    #[test]
    fn manifest_rejects_inconsistent_sizes() {
        let text = br#"{"format":"pdcontact-soclcp","version":1,"d":2,"c":1,"m":1,"nx":4,"nv":5,"cones":"","cone":{"nonneg":1,"soc_count":1,"soc_size":2},"files":["M11.mtx","M12.mtx","M21.mtx","M22.mtx","w1.mtx","w2.mtx"]}"#;
        assert!(SoclcpManifest::parse(text).is_err());
        let ok = String::from_utf8(text.to_vec())
            .unwrap()
            .replace("\"nx\":4", "\"nx\":3");
        assert!(SoclcpManifest::parse(ok.as_bytes()).is_ok());
    }
}
