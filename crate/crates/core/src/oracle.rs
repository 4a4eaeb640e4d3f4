//! Reference computations that share no code with the jet machinery.
//!
//! The projectors come from Gram-Schmidt on the derivatives f, f', f'', …
//! of the curve at a point, and Wirtinger derivatives of any pointwise map
//! come from Richardson-extrapolated central differences in Re ξ and Im ξ.

use crate::chain::HolomorphicCurve;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, I};

/// Base step of the extrapolated central differences.
pub const FD_STEP: f64 = 1e-3;

fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// P₀..P_{N−1} at ξ by orthonormalising the curve's derivatives.
pub fn pointwise_chain(curve: &HolomorphicCurve, xi: C64) -> Result<Vec<CMatrix>> {
    let n = curve.dim();
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(n);
    for m in 0..n {
        let mut v = curve.derivative_at(xi, m);
        let scale = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for e in &basis {
                let c = inner(e, &v);
                v.iter_mut().zip(e).for_each(|(x, y)| *x -= c * y);
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 1e-12 * scale.max(1.0) {
            return Err(if m == 0 { Error::SingularNormalization(norm * norm) } else { Error::NotFullRank(m) });
        }
        v.iter_mut().for_each(|x| *x /= norm);
        basis.push(v);
    }
    Ok(basis.iter().map(|e| CMatrix::outer(e, e)).collect())
}

/// First and second derivatives of a field in two real variables (x, y).
#[derive(Clone, Debug)]
pub struct RealFdDerivatives {
    pub dx: CMatrix,
    pub dy: CMatrix,
    pub dxx: CMatrix,
    pub dxy: CMatrix,
    pub dyy: CMatrix,
}

impl RealFdDerivatives {
    /// The derivative ∂ₓ^a ∂ᵧ^b for a + b ∈ {1, 2}.
    pub fn get(&self, a: usize, b: usize) -> Option<&CMatrix> {
        match (a, b) {
            (1, 0) => Some(&self.dx),
            (0, 1) => Some(&self.dy),
            (2, 0) => Some(&self.dxx),
            (1, 1) => Some(&self.dxy),
            (0, 2) => Some(&self.dyy),
            _ => None,
        }
    }

    fn combine(&self, other: &Self, a: f64, b: f64) -> Self {
        let mix = |x: &CMatrix, y: &CMatrix| &x.scale_re(a) + &y.scale_re(b);
        Self {
            dx: mix(&self.dx, &other.dx),
            dy: mix(&self.dy, &other.dy),
            dxx: mix(&self.dxx, &other.dxx),
            dxy: mix(&self.dxy, &other.dxy),
            dyy: mix(&self.dyy, &other.dyy),
        }
    }
}

/// Plain second-order central differences with step h.
fn central<F>(f: &F, x: f64, y: f64, h: f64) -> Result<RealFdDerivatives>
where
    F: Fn(f64, f64) -> Result<CMatrix>,
{
    let f0 = f(x, y)?;
    let (xp, xm) = (f(x + h, y)?, f(x - h, y)?);
    let (yp, ym) = (f(x, y + h)?, f(x, y - h)?);
    let two_f0 = f0.scale_re(2.0);
    let corners = &(&f(x + h, y + h)? - &f(x + h, y - h)?) - &(&f(x - h, y + h)? - &f(x - h, y - h)?);
    Ok(RealFdDerivatives {
        dx: (&xp - &xm).scale_re(0.5 / h),
        dy: (&yp - &ym).scale_re(0.5 / h),
        dxx: (&(&xp + &xm) - &two_f0).scale_re(1.0 / (h * h)),
        dyy: (&(&yp + &ym) - &two_f0).scale_re(1.0 / (h * h)),
        dxy: corners.scale_re(0.25 / (h * h)),
    })
}

/// Central differences at steps h and 2h combined by one Richardson step,
/// which cancels the h² error term of every stencil.
pub fn real_fd<F>(f: F, x: f64, y: f64) -> Result<RealFdDerivatives>
where
    F: Fn(f64, f64) -> Result<CMatrix>,
{
    let fine = central(&f, x, y, FD_STEP)?;
    let coarse = central(&f, x, y, 2.0 * FD_STEP)?;
    Ok(fine.combine(&coarse, 4.0 / 3.0, -1.0 / 3.0))
}

/// Wirtinger derivatives of a pointwise matrix field.
#[derive(Clone, Debug)]
pub struct FdDerivatives {
    pub d: CMatrix,
    pub db: CMatrix,
    pub dd: CMatrix,
    pub ddb: CMatrix,
    pub dbdb: CMatrix,
}

impl FdDerivatives {
    /// The derivative ∂^a ∂̄^b for a + b ∈ {1, 2}.
    pub fn get(&self, a: usize, b: usize) -> Option<&CMatrix> {
        match (a, b) {
            (1, 0) => Some(&self.d),
            (0, 1) => Some(&self.db),
            (2, 0) => Some(&self.dd),
            (1, 1) => Some(&self.ddb),
            (0, 2) => Some(&self.dbdb),
            _ => None,
        }
    }
}

/// ∂ = ½(∂ₓ − i∂ᵧ), ∂̄ = ½(∂ₓ + i∂ᵧ) from the real-variable differences.
pub fn wirtinger_fd<F>(f: F, xi: C64) -> Result<FdDerivatives>
where
    F: Fn(C64) -> Result<CMatrix>,
{
    let r = real_fd(|x, y| f(C64::new(x, y)), xi.re, xi.im)?;
    let d = (&r.dx - &r.dy.scale(I)).scale_re(0.5);
    let db = (&r.dx + &r.dy.scale(I)).scale_re(0.5);
    let lap_minus = &r.dxx - &r.dyy;
    let dd = (&lap_minus - &r.dxy.scale(2.0 * I)).scale_re(0.25);
    let dbdb = (&lap_minus + &r.dxy.scale(2.0 * I)).scale_re(0.25);
    let ddb = (&r.dxx + &r.dyy).scale_re(0.25);
    Ok(FdDerivatives { d, db, dd, ddb, dbdb })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::ProjectorChain;
    use crate::linalg::rel_residual;

    #[test]
    fn pointwise_chain_matches_jets() {
        for n in 2..=5 {
            let curve = HolomorphicCurve::veronese(n).unwrap();
            let xi = C64::new(0.6, -1.1);
            let ch = ProjectorChain::build(&curve, xi, 1).unwrap();
            for (k, p) in pointwise_chain(&curve, xi).unwrap().iter().enumerate() {
                assert!(rel_residual(p, ch.projector(k).value()) < 1e-12);
            }
        }
    }

    #[test]
    fn fd_on_polynomial_field() {
        // F = ξ²ξ̄ E + ξ̄² E', known Wirtinger derivatives.
        let e = CMatrix::unit(2, 0, 1);
        let e2 = CMatrix::unit(2, 1, 0);
        let f = |z: C64| Ok(&e.scale(z * z * z.conj()) + &e2.scale(z.conj() * z.conj()));
        let z = C64::new(0.4, 0.3);
        let fd = wirtinger_fd(f, z).unwrap();
        assert!(fd.d.max_abs_diff(&e.scale(2.0 * z * z.conj())) < 1e-8);
        assert!(fd.db.max_abs_diff(&(&e.scale(z * z) + &e2.scale(2.0 * z.conj()))) < 1e-8);
        assert!(fd.dd.max_abs_diff(&e.scale(2.0 * z.conj())) < 1e-6);
        assert!(fd.ddb.max_abs_diff(&e.scale(2.0 * z)) < 1e-6);
        assert!(fd.dbdb.max_abs_diff(&e2.scale_re(2.0)) < 1e-6);
    }

    #[test]
    fn rank_deficient_curve() {
        let one = C64::new(1.0, 0.0);
        let curve = HolomorphicCurve::new(vec![vec![one], vec![one], vec![C64::new(0.0, 0.0), one]]).unwrap();
        assert!(matches!(pointwise_chain(&curve, C64::new(0.3, 0.2)), Err(Error::NotFullRank(2))));
    }
}
