//! Coulomb friction cone `F = {(r_n, r_t) : −μ r_n ≥ ‖r_t‖}`, its dual
//! `F* = {(v_n, v_t) : −v_n ≥ μ‖v_t‖}` and the standard second-order cone
//! `L = {(x0, x1) : x0 ≥ ‖x1‖}`.
//!
//! Points are stored as `[normal, tangential...]` with one or two
//! tangential components.

/// A contact reaction `(r_n, r_t)` with `r_t` of length 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReactionPoint {
    pub normal: f64,
    tangential: [f64; 2],
    m: usize,
}

impl ReactionPoint {
    /// # Panics
    /// If `tangential` does not have one or two components.
    pub fn new(normal: f64, tangential: &[f64]) -> Self {
        let m = tangential.len();
        assert!(m == 1 || m == 2, "tangential dimension must be 1 or 2, got {m}");
        let mut t = [0.0; 2];
        t[..m].copy_from_slice(tangential);
        ReactionPoint {
            normal,
            tangential: t,
            m,
        }
    }

    /// Splits a `[normal, tangential...]` block.
    pub fn from_block(block: &[f64]) -> Self {
        Self::new(block[0], &block[1..])
    }

    pub fn tangential(&self) -> &[f64] {
        &self.tangential[..self.m]
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn to_block(&self) -> Vec<f64> {
        let mut b = Vec::with_capacity(1 + self.m);
        b.push(self.normal);
        b.extend_from_slice(self.tangential());
        b
    }
}

/// Euclidean norm of a tangential part. Every cone routine goes through
/// this one function so membership tests agree with the projections.
#[inline]
pub fn tangential_norm(t: &[f64]) -> f64 {
    match t {
        [a] => a.abs(),
        _ => t.iter().map(|x| x * x).sum::<f64>().sqrt(),
    }
}

/// Projects `[s_n, s_t...]` onto `F` in place.
///
/// Branches: `λ₁ = −μ s_n − ‖s_t‖ ≥ 0` keeps the point; otherwise
/// `λ₂ = −s_n + μ‖s_t‖ ≤ 0` maps to the apex; otherwise the result is
/// `λ₂/(1+μ²) · (−1, μ s_t/‖s_t‖)`.
#[inline]
pub fn project_friction_block(block: &mut [f64], mu: f64) {
    let (head, t) = block.split_at_mut(1);
    let s_n = head[0];
    let nt = tangential_norm(t);
    let lambda1 = -mu * s_n - nt;
    if lambda1 >= 0.0 {
        return;
    }
    let lambda2 = -s_n + mu * nt;
    if lambda2 <= 0.0 {
        head[0] = 0.0;
        t.iter_mut().for_each(|x| *x = 0.0);
        return;
    }
    // s_t = 0 never gets here: then λ₁ < 0 forces s_n > 0 and λ₂ < 0.
    debug_assert!(nt != 0.0, "zero tangential part reached the boundary branch");
    let factor = lambda2 / (1.0 + mu * mu);
    head[0] = -factor;
    let scale = factor * mu / nt;
    t.iter_mut().for_each(|x| *x *= scale);
    // Round inward so that −μ r_n ≥ ‖r_t‖ holds exactly in floating point.
    while tangential_norm(t) > -mu * head[0] {
        t.iter_mut().for_each(|x| *x *= 1.0 - f64::EPSILON);
    }
}

/// Nearest point of `F` to `(s_n, s_t)`.
pub fn project_friction_cone(s_n: f64, s_t: &[f64], mu: f64) -> ReactionPoint {
    let mut p = ReactionPoint::new(s_n, s_t);
    let m = p.m;
    let mut block = [p.normal, p.tangential[0], p.tangential[1]];
    project_friction_block(&mut block[..1 + m], mu);
    p.normal = block[0];
    p.tangential[..m].copy_from_slice(&block[1..1 + m]);
    p
}

/// Nearest point of the second-order cone `L` to `(x0, x1)`, from the
/// spectral decomposition `x = λ₁u₁ + λ₂u₂` with `λ = x0 ∓ ‖x1‖`.
pub fn project_soc(x0: f64, x1: &[f64]) -> (f64, Vec<f64>) {
    let mut block = Vec::with_capacity(1 + x1.len());
    block.push(x0);
    block.extend_from_slice(x1);
    project_soc_block(&mut block);
    let tail = block.split_off(1);
    (block[0], tail)
}

/// In-place [`project_soc`] on `[x0, x1...]`.
pub fn project_soc_block(block: &mut [f64]) {
    let (head, x1) = block.split_at_mut(1);
    let x0 = head[0];
    let n1 = tangential_norm(x1);
    if n1 <= x0 {
        return;
    }
    if n1 <= -x0 {
        head[0] = 0.0;
        x1.iter_mut().for_each(|v| *v = 0.0);
        return;
    }
    let half = (x0 + n1) / 2.0;
    head[0] = half;
    x1.iter_mut().for_each(|v| *v *= half / n1);
}

/// `−μ r_n + tol ≥ ‖r_t‖`
pub fn in_friction_cone(r: &ReactionPoint, mu: f64, tol: f64) -> bool {
    -mu * r.normal + tol >= tangential_norm(r.tangential())
}

/// Block form of [`in_friction_cone`].
#[inline]
pub fn friction_block_in_cone(block: &[f64], mu: f64, tol: f64) -> bool {
    -mu * block[0] + tol >= tangential_norm(&block[1..])
}

/// `−v_n + tol ≥ μ‖v_t‖`
pub fn in_dual_cone(v_n: f64, v_t: &[f64], mu: f64, tol: f64) -> bool {
    -v_n + tol >= mu * tangential_norm(v_t)
}

/// `x0 + tol ≥ ‖x1‖`
pub fn in_soc(x0: f64, x1: &[f64], tol: f64) -> bool {
    x0 + tol >= tangential_norm(x1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &ReactionPoint, n: f64, t: &[f64]) -> bool {
        (a.normal - n).abs() < 1e-14 && a.tangential().iter().zip(t).all(|(x, y)| (x - y).abs() < 1e-14)
    }

    #[test]
    fn point_inside_is_unchanged() {
        let p = project_friction_cone(-2.0, &[0.5, 0.0], 0.5);
        assert_eq!(p.normal, -2.0);
        assert_eq!(p.tangential(), &[0.5, 0.0]);
    }

    #[test]
    fn point_in_polar_cone_goes_to_apex() {
        let p = project_friction_cone(1.0, &[0.3, 0.4], 0.5);
        assert_eq!(p.normal, 0.0);
        assert_eq!(p.tangential(), &[0.0, 0.0]);
    }

    #[test]
    fn boundary_projection() {
        // λ₂ = 0.5, factor 0.5 / 1.25
        let p = project_friction_cone(0.0, &[1.0, 0.0], 0.5);
        assert!(close(&p, -0.4, &[0.2, 0.0]), "{p:?}");
    }

    #[test]
    fn planar_projection() {
        let p = project_friction_cone(0.0, &[-1.0], 0.5);
        assert!(close(&p, -0.4, &[-0.2]), "{p:?}");
    }

    #[test]
    fn soc_examples() {
        assert_eq!(project_soc(2.0, &[1.0, 0.0]), (2.0, vec![1.0, 0.0]));
        assert_eq!(project_soc(-2.0, &[1.0, 0.0]), (0.0, vec![0.0, 0.0]));
        assert_eq!(project_soc(0.0, &[2.0, 0.0]), (1.0, vec![1.0, 0.0]));
    }

    #[test]
    fn membership_examples() {
        assert!(in_friction_cone(&ReactionPoint::new(-1.0, &[0.4, 0.0]), 0.5, 0.0));
        assert!(in_friction_cone(&ReactionPoint::new(-1.0, &[0.5, 0.0]), 0.5, 0.0));
        assert!(!in_friction_cone(&ReactionPoint::new(-1.0, &[0.6, 0.0]), 0.5, 0.0));
        assert!(in_dual_cone(-1.0, &[1.0, 0.0], 0.5, 0.0));
        assert!(in_dual_cone(0.0, &[0.0, 0.0], 0.5, 0.0));
        assert!(!in_dual_cone(-1.0, &[1.0, 0.0], 2.0, 0.0));
    }

    #[test]
    #[should_panic]
    fn rejects_three_tangential_components() {
        ReactionPoint::new(0.0, &[1.0, 2.0, 3.0]);
    }
}
