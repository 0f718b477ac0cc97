use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{max_singular_value, min_eigenvalue, SparseMatrix, SpectralEstimates, SpectralOptions};

use super::contact::ContactGeometry;

/// One incremental contact problem: find `Δu` and reactions `r` with
/// `K Δu − p = T_n r_n + T_t r_t` and the Coulomb conditions at every
/// candidate node.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    k: SparseMatrix,
    p: Vec<f64>,
    contact: ContactGeometry,
    mu: f64,
    spectral: OnceLock<SpectralEstimates>,
}

const SYMMETRY_TOL: f64 = 1e-14;

impl ProblemInstance {
    /// Validates shapes, finiteness, `μ > 0` and symmetry of `K` (exact
    /// structure, values to 1e-14 relative to the largest entry).
    pub fn new(k: SparseMatrix, p: Vec<f64>, contact: ContactGeometry, mu: f64) -> Result<Self> {
        let d = k.nrows();
        if k.ncols() != d {
            return Err(Error::dims(format!("K is {}x{}, not square", d, k.ncols())));
        }
        if p.len() != d || contact.d() != d {
            return Err(Error::dims(format!(
                "K has {d} rows, p has {} entries, contact matrices have {} rows",
                p.len(),
                contact.d()
            )));
        }
        if let Some(i) = p.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidProblem(format!("load entry {i} is not finite")));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidProblem(format!(
                "friction coefficient must be positive, got {mu}"
            )));
        }
        match k.max_asymmetry() {
            None => return Err(Error::InvalidProblem("K is not structurally symmetric".into())),
            Some(a) if a > SYMMETRY_TOL * k.max_abs() => {
                return Err(Error::InvalidProblem(format!(
                    "K is not symmetric (max |K_ij − K_ji| = {a:e})"
                )))
            }
            Some(_) => {}
        }
        Ok(ProblemInstance {
            k,
            p,
            contact,
            mu,
            spectral: OnceLock::new(),
        })
    }

    pub fn k(&self) -> &SparseMatrix {
        &self.k
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn contact(&self) -> &ContactGeometry {
        &self.contact
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn d(&self) -> usize {
        self.k.nrows()
    }

    pub fn c(&self) -> usize {
        self.contact.c()
    }

    pub fn m(&self) -> usize {
        self.contact.m()
    }

    /// Same stiffness and contact data with a new load; cached spectral
    /// estimates carry over.
    pub fn with_load(&self, p: Vec<f64>) -> Result<Self> {
        if p.len() != self.d() {
            return Err(Error::dims("load length"));
        }
        if let Some(i) = p.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidProblem(format!("load entry {i} is not finite")));
        }
        Ok(ProblemInstance { p, ..self.clone() })
    }

    pub fn with_gap(&self, g: Vec<f64>) -> Result<Self> {
        Ok(ProblemInstance {
            contact: self.contact.with_gap(g)?,
            ..self.clone()
        })
    }

    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidProblem(format!(
                "friction coefficient must be positive, got {mu}"
            )));
        }
        Ok(ProblemInstance { mu, ..self.clone() })
    }

    /// `σ_T` and `μ_π`, computed on first use and cached. Neither depends on
    /// `p`, `g` or `μ`.
    ///
    /// With no candidate nodes `σ_T = 0`. A singular `K` (no supports) makes
    /// inverse iteration fail; `μ_π` is then taken as 0, which switches the
    /// acceleration off.
    pub fn spectral(&self) -> Result<SpectralEstimates> {
        if let Some(s) = self.spectral.get() {
            return Ok(*s);
        }
        let opts = SpectralOptions::default();
        let t = self.contact.t();
        let sigma_t = if t.values().iter().all(|&v| v == 0.0) {
            0.0
        } else {
            max_singular_value(t, opts.tol, opts.maxit)?
        };
        let mu_pi = match min_eigenvalue(&self.k, opts.tol, opts.maxit) {
            Ok(l) if l > 0.0 => l,
            Ok(l) => {
                log::warn!("smallest eigenvalue estimate of K is {l:e}; using mu_pi = 0");
                0.0
            }
            Err(e @ (Error::NotConverged { .. } | Error::Breakdown { .. } | Error::InvalidArgument(_))) => {
                log::warn!("K looks singular ({e}); using mu_pi = 0");
                0.0
            }
            Err(e) => return Err(e),
        };
        let s = SpectralEstimates { sigma_t, mu_pi };
        let _ = self.spectral.set(s);
        Ok(s)
    }

    /// Installs externally known spectral estimates.
    pub fn set_spectral(&self, s: SpectralEstimates) -> Result<()> {
        if !(s.sigma_t >= 0.0 && s.mu_pi >= 0.0 && s.sigma_t.is_finite() && s.mu_pi.is_finite()) {
            return Err(Error::InvalidArgument(format!("invalid spectral estimates {s:?}")));
        }
        self.spectral
            .set(s)
            .map_err(|_| Error::InvalidArgument("spectral estimates already set".into()))
    }
}

/// State at the start of a load step and the external load at its end.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadStep {
    pub u_prev: Vec<f64>,
    pub p_next: Vec<f64>,
}

impl LoadStep {
    /// The incremental problem of this step: `p = p_next − K u_prev`, gaps
    /// measured from the displaced configuration and clipped at zero.
    pub fn problem(&self, template: &ProblemInstance) -> Result<ProblemInstance> {
        let d = template.d();
        if self.u_prev.len() != d || self.p_next.len() != d {
            return Err(Error::dims("load step vectors do not match the problem"));
        }
        if self.u_prev.iter().chain(&self.p_next).any(|v| !v.is_finite()) {
            return Err(Error::InvalidProblem("load step holds non-finite entries".into()));
        }
        let ku = template.k().spmv(&self.u_prev)?;
        let p: Vec<f64> = self.p_next.iter().zip(&ku).map(|(a, b)| a - b).collect();
        let closing = template.contact().tn().spmv_transpose(&self.u_prev)?;
        let g: Vec<f64> = template
            .contact()
            .g()
            .iter()
            .zip(&closing)
            .map(|(g, s)| (g - s).max(0.0))
            .collect();
        template.with_load(p)?.with_gap(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_node(mu: f64) -> ProblemInstance {
        let tn = SparseMatrix::from_dense(&[vec![0.0], vec![-1.0]]).unwrap();
        let tt = SparseMatrix::from_dense(&[vec![1.0], vec![0.0]]).unwrap();
        let geo = ContactGeometry::new(1, tn, tt, vec![0.0]).unwrap();
        ProblemInstance::new(SparseMatrix::identity(2), vec![1.0, -1.0], geo, mu).unwrap()
    }

    #[test]
    fn accessors() {
        let p = single_node(0.5);
        assert_eq!((p.d(), p.c(), p.m()), (2, 1, 1));
        assert_eq!(p.mu(), 0.5);
        let s = p.spectral().unwrap();
        assert!((s.sigma_t - 1.0).abs() < 1e-12);
        assert!((s.mu_pi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_data() {
        let p = single_node(0.5);
        let geo = p.contact().clone();
        assert!(ProblemInstance::new(SparseMatrix::identity(2), vec![0.0, 0.0], geo.clone(), 0.0).is_err());
        assert!(ProblemInstance::new(SparseMatrix::identity(3), vec![0.0; 3], geo.clone(), 0.5).is_err());
        assert!(ProblemInstance::new(SparseMatrix::identity(2), vec![0.0], geo.clone(), 0.5).is_err());
        assert!(ProblemInstance::new(SparseMatrix::identity(2), vec![f64::NAN, 0.0], geo.clone(), 0.5).is_err());
        let asym = SparseMatrix::from_dense(&[vec![1.0, 0.5], vec![0.0, 1.0]]).unwrap();
        assert!(ProblemInstance::new(asym, vec![0.0; 2], geo.clone(), 0.5).is_err());
        let asym = SparseMatrix::from_dense(&[vec![1.0, 0.5], vec![0.4, 1.0]]).unwrap();
        assert!(ProblemInstance::new(asym, vec![0.0; 2], geo, 0.5).is_err());
        assert!(p.with_mu(-1.0).is_err());
        assert!(p.with_gap(vec![-1.0]).is_err());
    }

    #[test]
    fn load_step_forms_incremental_load_and_gap() {
        let template = single_node(0.5).with_gap(vec![0.3]).unwrap();
        let step = LoadStep {
            u_prev: vec![0.0, -0.1],
            p_next: vec![1.0, 1.0],
        };
        let prob = step.problem(&template).unwrap();
        assert_eq!(prob.p(), &[1.0, 1.1]);
        assert!((prob.contact().g()[0] - 0.2).abs() < 1e-15);
    }
}
