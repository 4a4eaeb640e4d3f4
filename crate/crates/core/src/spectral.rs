//! Lax pair, wave functions and the Sym-Tafel immersion.

use serde::{Deserialize, Serialize};

use crate::chain::{c_k, ProjectorChain};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::jet::Jet2Matrix;
use crate::linalg::{check_dim, comm, matrix_poly_residual, rel_residual, CMatrix, SuElement, C64, I, ONE};
use crate::surface::{minimal_poly_roots, weierstrass_jet};

/// Spectral parameters closer than this to ±1 are rejected as poles.
pub const POLE_EPS: f64 = 1e-9;

/// Distance to ±1 below which scan grid points are flagged and skipped.
pub const SCAN_POLE_GAP: f64 = 0.05;

fn check_lambda(lambda: C64) -> Result<()> {
    if !lambda.re.is_finite() || !lambda.im.is_finite() {
        return Err(Error::NonFinite);
    }
    if (lambda - ONE).norm() < POLE_EPS || (lambda + ONE).norm() < POLE_EPS {
        return Err(Error::Pole(lambda));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct SpectralParams {
    lambda: C64,
    tau: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    lambda: C64,
    tau: f64,
}

impl TryFrom<RawParams> for SpectralParams {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        Self::new(r.lambda, r.tau)
    }
}

impl From<SpectralParams> for RawParams {
    fn from(p: SpectralParams) -> Self {
        Self { lambda: p.lambda, tau: p.tau }
    }
}

impl SpectralParams {
    pub fn new(lambda: C64, tau: f64) -> Result<Self> {
        check_lambda(lambda)?;
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
        }
        Ok(Self { lambda, tau })
    }

    /// λ = ±√(1 − 2τ), where the Sym-Tafel and Weierstrass surfaces coincide.
    pub fn coincidence(tau: f64, sign: f64) -> Result<Self> {
        let lambda = C64::new(1.0 - 2.0 * tau, 0.0).sqrt() * sign.signum();
        Self::new(lambda, tau)
    }

    pub fn lambda(&self) -> C64 {
        self.lambda
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Whether λ is purely imaginary up to `tol`.
    pub fn is_euclidean(&self, tol: f64) -> bool {
        self.lambda.re.abs() <= tol
    }

    /// 2τ/(1 − λ²), the factor relating X^ST to X_k.
    pub fn st_factor(&self) -> C64 {
        2.0 * self.tau / (ONE - self.lambda * self.lambda)
    }
}

/// U1 = 2/(1+λ)[∂P, P] and U2 = 2/(1−λ)[∂̄P, P] as jets of one order less than P.
pub fn u_matrices_for(p: &Jet2Matrix, lambda: C64) -> Result<(Jet2Matrix, Jet2Matrix)> {
    check_lambda(lambda)?;
    if p.order() < 1 {
        return Err(Error::DerivativeOrder { requested: 1, order: p.order() });
    }
    let p1 = p.truncate(p.order() - 1);
    let a = p.d_xi()?.commutator(&p1)?;
    let b = p.d_xibar()?.commutator(&p1)?;
    Ok((a.scale(2.0 / (ONE + lambda)), b.scale(2.0 / (ONE - lambda))))
}

pub fn u_matrices(chain: &ProjectorChain, k: usize, lambda: C64) -> Result<(Jet2Matrix, Jet2Matrix)> {
    chain.check_sheet(k)?;
    u_matrices_for(chain.projector(k), lambda)
}

/// ‖U1† + U2‖ at the base point.
pub fn u_reality_residual(chain: &ProjectorChain, k: usize, lambda: C64) -> Result<f64> {
    let (u1, u2) = u_matrices(chain, k, lambda)?;
    Ok((&u1.value().dagger() + u2.value()).norm_fro())
}

/// ‖∂̄U1 − ∂U2 + [U1, U2]‖_F at the base point.
pub fn zero_curvature_residual_for(p: &Jet2Matrix, lambda: C64) -> Result<f64> {
    if p.order() < 2 {
        return Err(Error::DerivativeOrder { requested: 2, order: p.order() });
    }
    let (u1, u2) = u_matrices_for(p, lambda)?;
    let z = &(&u1.derivative(0, 1)? - &u2.derivative(1, 0)?) + &comm(u1.value(), u2.value());
    Ok(z.norm_fro())
}

pub fn zero_curvature_residual(chain: &ProjectorChain, k: usize, lambda: C64) -> Result<f64> {
    chain.check_sheet(k)?;
    zero_curvature_residual_for(chain.projector(k), lambda)
}

/// Φ_k = I + 4λ/(1−λ)² Σ_{j<k} P_j − 2/(1−λ) P_k.
pub fn wavefunction(chain: &ProjectorChain, k: usize, lambda: C64) -> Result<Jet2Matrix> {
    chain.check_sheet(k)?;
    check_lambda(lambda)?;
    let m = ONE - lambda;
    Ok(combine(chain, k, 4.0 * lambda / (m * m), -2.0 / m, ONE))
}

/// Φ_k⁻¹ = I − 4λ/(1+λ)² Σ_{j<k} P_j − 2/(1+λ) P_k.
pub fn wavefunction_inverse(chain: &ProjectorChain, k: usize, lambda: C64) -> Result<Jet2Matrix> {
    chain.check_sheet(k)?;
    check_lambda(lambda)?;
    let p = ONE + lambda;
    Ok(combine(chain, k, -4.0 * lambda / (p * p), -2.0 / p, ONE))
}

/// ∂_λΦ_k = 4(1+λ)/(1−λ)³ Σ_{j<k} P_j − 2/(1−λ)² P_k.
pub fn wavefunction_dlambda(chain: &ProjectorChain, k: usize, lambda: C64) -> Result<Jet2Matrix> {
    chain.check_sheet(k)?;
    check_lambda(lambda)?;
    let m = ONE - lambda;
    Ok(combine(chain, k, 4.0 * (ONE + lambda) / (m * m * m), -2.0 / (m * m), C64::new(0.0, 0.0)))
}

/// `id·I + low·Σ_{j<k} P_j + own·P_k`
fn combine(chain: &ProjectorChain, k: usize, low: C64, own: C64, id: C64) -> Jet2Matrix {
    let n = chain.dim();
    let base = Jet2Matrix::constant(&CMatrix::scalar(n, id), chain.order());
    &(&base + &chain.lower_sum(k).scale(low)) + &chain.projector(k).scale(own)
}

/// The anti-holomorphic wave function in its factored form
/// ((1+λ)/(1−λ))²(I − 2/(1+λ) P_{N−1}).
pub fn factored_antiholomorphic_wavefunction(chain: &ProjectorChain, lambda: C64) -> Result<CMatrix> {
    check_lambda(lambda)?;
    let n = chain.dim();
    let r = (ONE + lambda) / (ONE - lambda);
    let p = chain.projector(n - 1).value();
    Ok((&CMatrix::identity(n) - &p.scale(2.0 / (ONE + lambda))).scale(r * r))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LaxResiduals {
    /// ‖∂Φ − U1Φ‖ relative to ‖U1Φ‖.
    pub holomorphic: f64,
    /// ‖∂̄Φ − U2Φ‖ relative to ‖U2Φ‖.
    pub antiholomorphic: f64,
}

impl LaxResiduals {
    pub fn max(&self) -> f64 {
        self.holomorphic.max(self.antiholomorphic)
    }
}

pub fn lax_residuals(chain: &ProjectorChain, k: usize, lambda: C64) -> Result<LaxResiduals> {
    let phi = wavefunction(chain, k, lambda)?;
    let (u1, u2) = u_matrices(chain, k, lambda)?;
    Ok(LaxResiduals {
        holomorphic: rel_residual(&phi.derivative(1, 0)?, &(u1.value() * phi.value())),
        antiholomorphic: rel_residual(&phi.derivative(0, 1)?, &(u2.value() * phi.value())),
    })
}

/// max(‖ΦΦ⁻¹ − I‖, ‖Φ⁻¹Φ − I‖) at the base point.
pub fn inverse_residual(chain: &ProjectorChain, k: usize, lambda: C64) -> Result<f64> {
    let phi = wavefunction(chain, k, lambda)?;
    let inv = wavefunction_inverse(chain, k, lambda)?;
    let id = CMatrix::identity(chain.dim());
    let (a, b) = (phi.value(), inv.value());
    Ok(rel_residual(&(a * b), &id).max(rel_residual(&(b * a), &id)))
}

/// X^ST = −2iτ/(1−λ²)(P_k + 2Σ_{j<k} P_j − c_k I), without the su(N) check.
pub fn sym_tafel_matrix(chain: &ProjectorChain, k: usize, params: &SpectralParams) -> Result<CMatrix> {
    chain.check_sheet(k)?;
    let bracket = combine(chain, k, C64::new(2.0, 0.0), ONE, C64::new(-chain.c(k), 0.0));
    Ok(bracket.value().scale(-I * params.st_factor()))
}

/// −iτ(Φ⁻¹∂_λΦ − 2c_k/(1−λ²) I), the defining expression of X^ST.
pub fn sym_tafel_from_wavefunction(chain: &ProjectorChain, k: usize, params: &SpectralParams) -> Result<CMatrix> {
    let lambda = params.lambda();
    let inv = wavefunction_inverse(chain, k, lambda)?;
    let dphi = wavefunction_dlambda(chain, k, lambda)?;
    let shift = 2.0 * chain.c(k) / (ONE - lambda * lambda);
    Ok((inv.value() * dphi.value()).shift(shift).scale(-I * params.tau()))
}

/// X^ST as an su(N) element.
pub fn sym_tafel_surface(chain: &ProjectorChain, k: usize, params: &SpectralParams) -> Result<SuElement> {
    SuElement::with_tolerance(sym_tafel_matrix(chain, k, params)?, 1e-9)
}

/// ‖X^ST − X_k‖ relative to ‖X_k‖.
pub fn st_weierstrass_distance(chain: &ProjectorChain, k: usize, params: &SpectralParams) -> Result<f64> {
    let st = sym_tafel_matrix(chain, k, params)?;
    let x = weierstrass_jet(chain, k)?;
    Ok(rel_residual(&st, x.value()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintKind {
    Holomorphic,
    Antiholomorphic,
}

fn check_constraint_args(n: usize, tau: f64) -> Result<()> {
    check_dim(n)?;
    if tau.is_finite() && tau > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")))
    }
}

/// Closed-form roots λ(τ, N) of the holomorphic or anti-holomorphic
/// Sym-Tafel constraint, in ± pairs.
pub fn st_constraint_roots(kind: ConstraintKind, n: usize, tau: f64) -> Result<Vec<C64>> {
    check_constraint_args(n, tau)?;
    let nf = n as f64;
    let squares: Vec<C64> = match kind {
        ConstraintKind::Holomorphic => {
            let c0 = c_k(0, n);
            vec![
                C64::new(1.0 - 2.0 * tau * nf * (c0 - 1.0), 0.0),
                C64::new((nf - 1.0 + 2.0 * tau * nf * (c0 - 1.0)) / (nf - 1.0), 0.0),
            ]
        }
        ConstraintKind::Antiholomorphic => {
            let c = c_k(n - 1, n);
            let disc = tau * tau * nf * nf * (4.0 * (nf - 1.0) * (c + 1.0).powi(2) + nf * nf * (c - 1.0).powi(2));
            let root = C64::new(disc, 0.0).sqrt();
            let head = C64::new(nf - 1.0 + tau * nf * nf * (c - 1.0), 0.0);
            vec![(head + root) / (nf - 1.0), (head - root) / (nf - 1.0)]
        }
    };
    Ok(squares.into_iter().flat_map(|u| [u.sqrt(), -u.sqrt()]).collect())
}

/// Cross-multiplied scalar condition |num − den| / max(1, |den|) whose
/// ratio form must equal 1 at a constraint root.
pub fn st_scalar_condition(kind: ConstraintKind, n: usize, tau: f64, lambda: C64) -> Result<f64> {
    check_constraint_args(n, tau)?;
    let nf = n as f64;
    let u = lambda * lambda;
    let (num, den) = match kind {
        ConstraintKind::Holomorphic => {
            let c0 = c_k(0, n);
            let num = (1.0 - 2.0 * c0 * tau * nf - u) * (ONE - u - nf * (1.0 + 2.0 * c0 * tau - u));
            let den = 2.0 * tau * nf * (2.0 - nf) * (u - 1.0) + 4.0 * tau * tau * nf * nf * (2.0 * c0 - 1.0);
            (num, den)
        }
        ConstraintKind::Antiholomorphic => {
            let c = c_k(n - 1, n);
            let w = ONE - u;
            let num = w * w * (1.0 - nf) + 2.0 * tau * nf * nf * ((2.0 - c) * w + 2.0 * tau * (c + 2.0).powi(2));
            let den = 2.0 * tau * nf * nf * (1.0 + tau * (6.0 + 4.0 * c) - u);
            (num, den)
        }
    };
    Ok((num - den).norm() / den.norm().max(1.0))
}

/// The printed sextic i c(c−1)(c−2)λ⁶ + a₄λ⁴ + a₂λ² + a₀ for a mixed sheet.
pub fn printed_sextic(c: f64, lambda: C64) -> C64 {
    let cc = |re: f64, im: f64| C64::new(re, im);
    let a4 = c * (cc(8.0, -6.0) + cc(6.0, 9.0) * c - cc(2.0, 1.0) * 3.0 * c * c) - 4.0;
    let a2 = cc(8.0, -12.0) + c * cc(2.0, 1.0) * (cc(2.0, 20.0) - cc(9.0, 6.0) * c + cc(3.0, -6.0) * c * c);
    let a0 = cc(4.0, 12.0) - cc(16.0, 38.0) * c + cc(38.0, 15.0) * c * c + cc(2.0, 11.0) * c * c * c;
    let u = lambda * lambda;
    let a6 = I * c * (c - 1.0) * (c - 2.0);
    ((a6 * u + a4) * u + a2) * u + a0
}

/// λ = is for s ∈ [−3, 3] in steps of 0.05.
pub fn imaginary_lambda_grid() -> Vec<C64> {
    (-60..=60).map(|i| C64::new(0.0, i as f64 * 0.05)).collect()
}

fn near_pole(lambda: C64) -> bool {
    (lambda - ONE).norm() < SCAN_POLE_GAP || (lambda + ONE).norm() < SCAN_POLE_GAP
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedScanRow {
    pub lambda_im: f64,
    pub residual_matrix: f64,
    pub residual_sextic: f64,
    pub pole: bool,
}

/// Residual of the cubic minimal polynomial applied to X^ST over a λ grid,
/// reported next to the modulus of the printed sextic.
pub fn st_mixed_constraint_scan(
    chain: &ProjectorChain,
    k: usize,
    tau: f64,
    grid: &[C64],
    exec: Execution,
) -> Result<Vec<MixedScanRow>> {
    let n = chain.dim();
    if k == 0 || k + 1 >= n {
        return Err(Error::InvalidParameter(format!("sheet {k} is not mixed for N = {n}")));
    }
    check_constraint_args(n, tau)?;
    let roots = minimal_poly_roots(k, n)?;
    let c = chain.c(k);
    exec.map(grid, |&lambda| {
        if near_pole(lambda) {
            return Ok(MixedScanRow {
                lambda_im: lambda.im,
                residual_matrix: f64::NAN,
                residual_sextic: f64::NAN,
                pole: true,
            });
        }
        let params = SpectralParams::new(lambda, tau)?;
        let x = sym_tafel_matrix(chain, k, &params)?;
        Ok(MixedScanRow {
            lambda_im: lambda.im,
            residual_matrix: matrix_poly_residual(&x, &roots),
            residual_sextic: printed_sextic(c, lambda).norm(),
            pole: false,
        })
    })
    .into_iter()
    .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaScanRow {
    pub lambda_im: f64,
    pub distance: f64,
    pub pole: bool,
}

/// ‖X^ST − X_k‖ over a λ grid.
pub fn st_lambda_scan(
    chain: &ProjectorChain,
    k: usize,
    tau: f64,
    grid: &[C64],
    exec: Execution,
) -> Result<Vec<LambdaScanRow>> {
    chain.check_sheet(k)?;
    check_constraint_args(chain.dim(), tau)?;
    exec.map(grid, |&lambda| {
        if near_pole(lambda) {
            return Ok(LambdaScanRow { lambda_im: lambda.im, distance: f64::NAN, pole: true });
        }
        let params = SpectralParams::new(lambda, tau)?;
        Ok(LambdaScanRow { lambda_im: lambda.im, distance: st_weierstrass_distance(chain, k, &params)?, pole: false })
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{HolomorphicCurve, PolyField};
    use crate::jet::projector_from_vector;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn veronese(n: usize, xi: C64) -> ProjectorChain {
        ProjectorChain::build(&HolomorphicCurve::veronese(n).unwrap(), xi, 3).unwrap()
    }

    const POINTS: [(f64, f64); 4] = [(0.3, -0.2), (1.1, 0.4), (-0.7, 0.9), (0.05, 1.6)];

    #[test]
    fn params_validation() {
        assert!(matches!(SpectralParams::new(ONE, 1.0), Err(Error::Pole(_))));
        assert!(matches!(SpectralParams::new(-ONE, 1.0), Err(Error::Pole(_))));
        assert!(SpectralParams::new(c(0.0, 0.5), 0.0).is_err());
        assert!(SpectralParams::new(c(0.0, 0.5), 1.0).unwrap().is_euclidean(0.0));
        let json = serde_json::to_string(&SpectralParams::new(c(0.0, 2.0), 0.5).unwrap()).unwrap();
        let back: SpectralParams = serde_json::from_str(&json).unwrap();
        assert_eq!(back.lambda(), c(0.0, 2.0));
        assert!(serde_json::from_str::<SpectralParams>(r#"{"lambda":[1.0,0.0],"tau":1.0}"#).is_err());
    }

    #[test]
    fn constant_chain_is_trivial() {
        let ch = ProjectorChain::constant(3, 3).unwrap();
        let (u1, u2) = u_matrices(&ch, 1, c(0.0, 0.7)).unwrap();
        assert_eq!(u1.value().norm_fro(), 0.0);
        assert_eq!(u2.value().norm_fro(), 0.0);
        assert_eq!(zero_curvature_residual(&ch, 1, c(0.0, 0.7)).unwrap(), 0.0);
    }

    #[test]
    fn u_reality_and_lambda_zero() {
        let ch = veronese(2, c(0.4, -0.3));
        assert!(u_reality_residual(&ch, 0, c(0.0, 0.7)).unwrap() <= 1e-10);
        let (u1, _) = u_matrices(&ch, 0, C64::new(0.0, 0.0)).unwrap();
        let dx = weierstrass_jet(&ch, 0).unwrap().derivative(1, 0).unwrap();
        assert!(rel_residual(u1.value(), &dx.scale(2.0 * I)) < 1e-12);
        assert!(matches!(u_matrices(&ch, 0, ONE), Err(Error::Pole(_))));
    }

    #[test]
    fn zero_curvature_on_solutions() {
        for n in [2, 3] {
            for &(re, im) in &POINTS {
                let ch = veronese(n, c(re, im));
                for k in 0..n {
                    for lam in [c(0.0, 0.3), I, c(0.0, 2.0)] {
                        let r = zero_curvature_residual(&ch, k, lam).unwrap();
                        assert!(r <= 1e-8, "n={n} k={k} {lam}: {r}");
                    }
                }
            }
        }
    }

    #[test]
    fn zero_curvature_negative_control() {
        let field = PolyField::new(vec![vec![((0, 0), ONE)], vec![((1, 0), ONE)], vec![((0, 1), ONE)]]).unwrap();
        let p = projector_from_vector(&field.jet_at(c(0.6, 0.3), 3)).unwrap();
        assert!(zero_curvature_residual_for(&p, c(0.0, 0.7)).unwrap() > 1e-3);
    }

    #[test]
    fn wavefunction_identities() {
        for n in [2, 3, 4] {
            let ch = veronese(n, c(0.7, 0.2));
            for k in 0..n {
                for lam in [c(0.0, 0.3), c(0.0, -1.7), c(0.2, 0.5)] {
                    assert!(inverse_residual(&ch, k, lam).unwrap() <= 1e-10);
                    let lax = lax_residuals(&ch, k, lam).unwrap();
                    assert!(lax.max() <= 1e-8, "n={n} k={k} {lam}: {lax:?}");
                }
            }
        }
    }

    #[test]
    fn wavefunction_k0_and_lambda_zero() {
        let ch = veronese(3, c(-0.4, 0.8));
        let lam = c(0.0, 0.9);
        let p0 = ch.projector(0).value();
        let phi0 = wavefunction(&ch, 0, lam).unwrap();
        let expect = &CMatrix::identity(3) - &p0.scale(2.0 / (ONE - lam));
        assert!(rel_residual(phi0.value(), &expect) < 1e-14);
        for k in 0..3 {
            let phi = wavefunction(&ch, k, C64::new(0.0, 0.0)).unwrap();
            let pk = ch.projector(k).value();
            assert!(rel_residual(phi.value(), &(&CMatrix::identity(3) - &pk.scale_re(2.0))) < 1e-14);
            assert!(rel_residual(&(phi.value() * phi.value()), &CMatrix::identity(3)) < 1e-12);
        }
    }

    #[test]
    fn antiholomorphic_wavefunction_factors() {
        for n in [2, 3, 4] {
            let ch = veronese(n, c(0.3, 0.3));
            let lam = c(0.0, 1.3);
            let phi = wavefunction(&ch, n - 1, lam).unwrap();
            let fact = factored_antiholomorphic_wavefunction(&ch, lam).unwrap();
            assert!(rel_residual(phi.value(), &fact) < 1e-12);
        }
    }

    #[test]
    fn sym_tafel_two_paths_and_coincidence() {
        for n in [2, 3] {
            for &(re, im) in &POINTS[..2] {
                let ch = veronese(n, c(re, im));
                for k in 0..n {
                    for tau in [0.3, 0.5, 1.0, 2.0] {
                        for sign in [1.0, -1.0] {
                            let params = SpectralParams::coincidence(tau, sign).unwrap();
                            assert!(st_weierstrass_distance(&ch, k, &params).unwrap() <= 1e-10);
                        }
                    }
                    let params = SpectralParams::new(c(0.0, 0.8), 0.7).unwrap();
                    let a = sym_tafel_matrix(&ch, k, &params).unwrap();
                    let b = sym_tafel_from_wavefunction(&ch, k, &params).unwrap();
                    assert!(rel_residual(&a, &b) <= 1e-9);
                    assert!(sym_tafel_surface(&ch, k, &params).is_ok());
                }
            }
        }
    }

    #[test]
    fn sym_tafel_tau_one_lambda_i() {
        let ch = veronese(2, c(0.5, -1.2));
        let params = SpectralParams::new(I, 1.0).unwrap();
        for k in 0..2 {
            let st = sym_tafel_matrix(&ch, k, &params).unwrap();
            let x = weierstrass_jet(&ch, k).unwrap();
            assert!(st.max_abs_diff(x.value()) <= 1e-12);
        }
    }

    #[test]
    fn off_axis_lambda_breaks_anti_hermiticity() {
        let ch = veronese(3, c(0.2, 0.6));
        let params = SpectralParams::new(c(0.5, 0.5), 1.0).unwrap();
        let st = sym_tafel_matrix(&ch, 1, &params).unwrap();
        assert!((&st + &st.dagger()).norm_fro() > 1e-3);
        assert!(sym_tafel_surface(&ch, 1, &params).is_err());
        let real = SpectralParams::new(c(0.5, 0.0), 1.0).unwrap();
        let st = sym_tafel_matrix(&ch, 1, &real).unwrap();
        assert!((&st + &st.dagger()).norm_fro() < 1e-12);
    }

    #[test]
    fn constraint_roots_satisfy_conditions() {
        for kind in [ConstraintKind::Holomorphic, ConstraintKind::Antiholomorphic] {
            for n in 2..=6 {
                for tau in [0.3, 0.5, 1.0, 2.0, 3.7] {
                    let roots = st_constraint_roots(kind, n, tau).unwrap();
                    assert_eq!(roots.len(), 4);
                    for pair in roots.chunks(2) {
                        assert_eq!(pair[0], -pair[1]);
                    }
                    for &r in &roots {
                        let res = st_scalar_condition(kind, n, tau, r).unwrap();
                        assert!(res <= 1e-9, "{kind:?} n={n} tau={tau} {r}: {res}");
                    }
                }
            }
        }
    }

    #[test]
    fn holomorphic_n2_half_tau() {
        // c_0 = 1/2, so the first pair is ±√(1 + 2τ) = ±√2.
        let roots = st_constraint_roots(ConstraintKind::Holomorphic, 2, 0.5).unwrap();
        assert!((roots[0] - c(2f64.sqrt(), 0.0)).norm() < 1e-15);
        assert!((roots[2] - C64::new(0.0, 0.0)).norm() < 1e-15);
        assert!(st_scalar_condition(ConstraintKind::Holomorphic, 2, 0.5, c(0.0, 0.4)).unwrap() > 1e-3);
    }

    #[test]
    fn mixed_scan() {
        let ch = veronese(3, c(0.4, 0.1));
        let tau = 2.0;
        let root = SpectralParams::coincidence(tau, 1.0).unwrap().lambda();
        let rows = st_mixed_constraint_scan(&ch, 1, tau, &[root, -root], Execution::Sequential).unwrap();
        assert!(rows.iter().all(|r| r.residual_matrix <= 1e-9));
        let grid = imaginary_lambda_grid();
        assert_eq!(grid.len(), 121);
        let rows = st_mixed_constraint_scan(&ch, 1, 0.8, &grid, Execution::Parallel).unwrap();
        assert!(rows.iter().all(|r| !r.pole && r.residual_matrix.is_finite() && r.residual_sextic.is_finite()));
        assert!(st_mixed_constraint_scan(&ch, 0, 0.8, &grid, Execution::Sequential).is_err());
    }

    #[test]
    fn lambda_scan_minimum_at_i() {
        let ch = veronese(2, c(0.3, 0.2));
        let rows = st_lambda_scan(&ch, 0, 1.0, &imaginary_lambda_grid(), Execution::Parallel).unwrap();
        let best = rows.iter().min_by(|a, b| a.distance.total_cmp(&b.distance)).unwrap();
        assert!((best.lambda_im.abs() - 1.0).abs() <= 0.05 + 1e-12);
        assert!(best.distance < 1e-12);
    }

    proptest! {
        #[test]
        fn inverse_and_trace(re in -2.0..2.0f64, im in -3.0..3.0f64, tau in 0.1..4.0f64) {
            prop_assume!((c(re, im) - ONE).norm() > 0.05 && (c(re, im) + ONE).norm() > 0.05);
            let ch = veronese(3, c(0.25, -0.5));
            for k in 0..3 {
                prop_assert!(inverse_residual(&ch, k, c(re, im)).unwrap() <= 1e-10);
                let p = SpectralParams::new(c(re, im), tau).unwrap();
                prop_assert!(sym_tafel_matrix(&ch, k, &p).unwrap().trace().norm() <= 1e-10 * p.st_factor().norm().max(1.0));
            }
        }
    }
}
