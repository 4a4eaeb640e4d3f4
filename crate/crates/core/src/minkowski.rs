//! Light-cone sector: θ fields, traveling waves and the Fokas-Gel'fand immersion.
//!
//! Jets here use the real light-cone coordinates (x⁺, x⁻) as their two
//! variables. A traveling wave depends on s = x⁺ + κx⁻ only, so a
//! one-variable Taylor series of the profile is lifted to a two-variable jet.

use serde::{Deserialize, Serialize};

use crate::chain::{HolomorphicCurve, ProjectorChain};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::jet::{Jet2Matrix, Jet2Scalar, DEFAULT_ORDER};
use crate::linalg::{anticomm, comm, matrix_exp, rel_residual, CMatrix, C64, I, ONE, ZERO};
use crate::spectral::POLE_EPS;

/// One-parameter families s ↦ P(s) of rank-1 projectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// N = 2, P(s) from f(s) = (cos ωs, sin ωs).
    RotatingWave { omega: f64 },
    /// P_k of a holomorphic curve along ξ = origin + s·direction.
    Line { curve: HolomorphicCurve, sheet: usize, origin: C64, direction: C64 },
}

impl Profile {
    pub fn validate(&self) -> Result<()> {
        match self {
            Profile::RotatingWave { omega } if !(omega.is_finite() && *omega != 0.0) => {
                Err(Error::InvalidParameter(format!("rotating wave needs a finite nonzero omega, got {omega}")))
            }
            Profile::Line { curve, sheet, direction, .. } => {
                if *sheet >= curve.dim() {
                    return Err(Error::InvalidParameter(format!("sheet {sheet} out of range 0..{}", curve.dim())));
                }
                if direction.norm() == 0.0 {
                    return Err(Error::InvalidParameter("line direction must be nonzero".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Profile::RotatingWave { .. } => 2,
            Profile::Line { curve, .. } => curve.dim(),
        }
    }

    /// Taylor coefficients p_m of P(s₀ + t) = Σ p_m t^m for m ≤ order.
    pub fn taylor(&self, s0: f64, order: usize) -> Result<Vec<CMatrix>> {
        match self {
            Profile::RotatingWave { omega } => {
                // P = I/2 + R(2ωs)/2 with R(φ) the reflection [[cos φ, sin φ], [sin φ, −cos φ]].
                let w = 2.0 * omega;
                let mut fact = 1.0;
                Ok((0..=order)
                    .map(|m| {
                        if m > 0 {
                            fact *= m as f64;
                        }
                        let phi = w * s0 + m as f64 * std::f64::consts::FRAC_PI_2;
                        let amp = 0.5 * w.powi(m as i32) / fact;
                        let (sn, cs) = phi.sin_cos();
                        let mut r = CMatrix::real_diag(&[amp * cs, -amp * cs]);
                        r[(0, 1)] = C64::new(amp * sn, 0.0);
                        r[(1, 0)] = C64::new(amp * sn, 0.0);
                        if m == 0 {
                            r = &r + &CMatrix::scalar(2, C64::new(0.5, 0.0));
                        }
                        r
                    })
                    .collect())
            }
            Profile::Line { curve, sheet, origin, direction } => {
                let chain = ProjectorChain::build(curve, origin + direction * s0, order)?;
                let p = chain.projector(*sheet);
                let (e, eb) = (*direction, direction.conj());
                Ok((0..=order)
                    .map(|m| {
                        (0..=m).fold(CMatrix::zeros(curve.dim()), |acc, a| {
                            &acc + &p.coeff(a, m - a).scale(e.powu(a as u32) * eb.powu((m - a) as u32))
                        })
                    })
                    .collect())
            }
        }
    }
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Lift Σ p_m t^m to a jet in (x⁺, x⁻) through t = δx⁺ + κ·δx⁻.
pub fn lift_traveling(coeffs: &[CMatrix], kappa: f64) -> Jet2Matrix {
    let n = coeffs[0].dim();
    let order = coeffs.len() - 1;
    Jet2Matrix::from_coeff_fn(n, order, |a, b| coeffs[a + b].scale_re(binom(a + b, a) * kappa.powi(b as i32)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TravelingWaveModel {
    pub profile: Profile,
    pub kappa: f64,
    pub lambda: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl TravelingWaveModel {
    pub fn new(profile: Profile, kappa: f64, lambda: f64) -> Result<Self> {
        let m = Self { profile, kappa, lambda, c1: 1.0, c2: 0.0, c3: 0.0 };
        m.validate()?;
        Ok(m)
    }

    pub fn rotating_wave(omega: f64, kappa: f64, lambda: f64) -> Result<Self> {
        Self::new(Profile::RotatingWave { omega }, kappa, lambda)
    }

    pub fn with_constants(mut self, c1: f64, c2: f64, c3: f64) -> Self {
        (self.c1, self.c2, self.c3) = (c1, c2, c3);
        self
    }

    pub fn with_kappa(&self, kappa: f64) -> Self {
        Self { kappa, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        self.profile.validate()?;
        if ![self.kappa, self.lambda, self.c1, self.c2, self.c3].iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if (self.lambda - 1.0).abs() < POLE_EPS || (self.lambda + 1.0).abs() < POLE_EPS {
            return Err(Error::Pole(C64::new(self.lambda, 0.0)));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.profile.dim()
    }

    /// P as a jet in (x⁺, x⁻) at the given point.
    pub fn projector_jet(&self, xp: f64, xm: f64, order: usize) -> Result<Jet2Matrix> {
        let coeffs = self.profile.taylor(xp + self.kappa * xm, order)?;
        Ok(lift_traveling(&coeffs, self.kappa))
    }

    pub fn theta(&self, xp: f64, xm: f64) -> Result<ThetaField> {
        ThetaField::from_projector(&self.projector_jet(xp, xm, DEFAULT_ORDER)?)
    }

    /// χ = λ(x⁺/(1+λ) − κx⁻/(1−λ)) as a jet.
    fn chi(&self, xp: f64, xm: f64, order: usize) -> Jet2Scalar {
        let (a, b) = (self.lambda / (1.0 + self.lambda), -self.lambda * self.kappa / (1.0 - self.lambda));
        Jet2Scalar::from_fn(order, |i, j| match (i, j) {
            (0, 0) => C64::new(a * xp + b * xm, 0.0),
            (1, 0) => C64::new(a, 0.0),
            (0, 1) => C64::new(b, 0.0),
            _ => ZERO,
        })
    }
}

/// θ = i(P − I/N).
#[derive(Clone, Debug)]
pub struct ThetaField {
    theta: Jet2Matrix,
}

impl ThetaField {
    pub fn from_projector(p: &Jet2Matrix) -> Result<Self> {
        let n = p.dim();
        let v = p.value();
        let res = rel_residual(&(v * v), v).max(rel_residual(&v.dagger(), v)).max((v.trace() - ONE).norm());
        if res > 1e-8 {
            return Err(Error::InvalidParameter(format!("not a rank-1 projector (residual {res:e})")));
        }
        let shift = Jet2Matrix::constant(&CMatrix::scalar(n, C64::new(1.0 / n as f64, 0.0)), p.order());
        Ok(Self { theta: (p - &shift).scale(I) })
    }

    pub fn jet(&self) -> &Jet2Matrix {
        &self.theta
    }

    pub fn dim(&self) -> usize {
        self.theta.dim()
    }

    pub fn value(&self) -> &CMatrix {
        self.theta.value()
    }

    /// [∂₊θ, θ] as a jet one order below θ.
    pub fn generator_jet(&self) -> Result<Jet2Matrix> {
        let t = self.theta.truncate(self.theta.order() - 1);
        self.theta.d_xi()?.commutator(&t)
    }

    /// ‖[∂₋∂₊θ, θ]‖
    pub fn el_residual(&self) -> Result<f64> {
        Ok(comm(&self.theta.derivative(1, 1)?, self.value()).norm_fro())
    }

    /// ‖∂₋θ − κ∂₊θ‖
    pub fn traveling_residual(&self, kappa: f64) -> Result<f64> {
        let d = &self.theta.derivative(0, 1)? - &self.theta.derivative(1, 0)?.scale_re(kappa);
        Ok(d.norm_fro())
    }
}

/// Residuals of the algebraic θ identities, each maximised over ∂₊ and ∂₋.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ThetaIdentities {
    /// θ² = ((1−N)/N²)I + i((N−2)/N)θ
    pub square: f64,
    /// {∂θ, θ} = i((N−2)/N)∂θ
    pub anticommutator: f64,
    /// θ·∂θ·θ = ((N−1)/N²)∂θ
    pub sandwich: f64,
    /// [∂θ, θ](I + 2iθ − 2I/N) = i∂θ as printed.
    pub product_printed: f64,
    /// [∂θ, θ](I + 2iθ − 2I/N) = −i∂θ.
    pub product_corrected: f64,
    /// i(I + 2iθ − 2I/N)∂θ = [∂θ, θ]
    pub left_product: f64,
    /// {[∂θ, θ], ∂θ} = 0
    pub nilpotent: f64,
}

impl ThetaIdentities {
    /// Largest residual over the identities as printed.
    pub fn max_printed(&self) -> f64 {
        [self.square, self.anticommutator, self.sandwich, self.product_printed, self.left_product, self.nilpotent]
            .into_iter()
            .fold(0.0, f64::max)
    }

    /// Largest residual with the product identity sign-corrected.
    pub fn max_corrected(&self) -> f64 {
        [self.square, self.anticommutator, self.sandwich, self.product_corrected, self.left_product, self.nilpotent]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// I + 2iθ − (2/N)I, which equals I − 2P.
fn reflector(theta: &CMatrix) -> CMatrix {
    let n = theta.dim();
    (&CMatrix::identity(n) + &theta.scale(2.0 * I)).shift(C64::new(2.0 / n as f64, 0.0))
}

pub fn theta_identities(field: &ThetaField) -> Result<ThetaIdentities> {
    let n = field.dim();
    let nf = n as f64;
    let t = field.value();
    let refl = reflector(t);
    let mut r = ThetaIdentities {
        square: rel_residual(
            &(t * t),
            &(&CMatrix::scalar(n, C64::new((1.0 - nf) / (nf * nf), 0.0)) + &t.scale(I * ((nf - 2.0) / nf))),
        ),
        ..Default::default()
    };
    for (a, b) in [(1, 0), (0, 1)] {
        let dt = field.jet().derivative(a, b)?;
        let g = comm(&dt, t);
        let upd = |slot: &mut f64, v: f64| *slot = slot.max(v);
        upd(&mut r.anticommutator, rel_residual(&anticomm(&dt, t), &dt.scale(I * ((nf - 2.0) / nf))));
        upd(&mut r.sandwich, rel_residual(&(&(t * &dt) * t), &dt.scale_re((nf - 1.0) / (nf * nf))));
        let prod = &g * &refl;
        upd(&mut r.product_printed, rel_residual(&prod, &dt.scale(I)));
        upd(&mut r.product_corrected, rel_residual(&prod, &dt.scale(-I)));
        upd(&mut r.left_product, rel_residual(&(&refl * &dt).scale(I), &g));
        upd(&mut r.nilpotent, anticomm(&g, &dt).norm_fro());
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiTangents {
    /// −[∂₊θ, θ]
    pub plus: CMatrix,
    /// κ[∂₊θ, θ]
    pub minus: CMatrix,
    /// Distance to the projector integrand ([∂₊P, P], −[∂₋P, P]).
    pub integrand_residual: f64,
}

pub fn minkowski_weierstrass_tangents(model: &TravelingWaveModel, xp: f64, xm: f64) -> Result<MinkowskiTangents> {
    let p = model.projector_jet(xp, xm, DEFAULT_ORDER)?;
    let field = ThetaField::from_projector(&p)?;
    let g = field.generator_jet()?;
    let plus = g.value().scale_re(-1.0);
    let minus = g.value().scale_re(model.kappa);
    let via_p_plus = comm(&p.derivative(1, 0)?, p.value());
    let via_p_minus = comm(&p.derivative(0, 1)?, p.value()).scale_re(-1.0);
    let integrand_residual = rel_residual(&plus, &via_p_plus).max(rel_residual(&minus, &via_p_minus));
    Ok(MinkowskiTangents { plus, minus, integrand_residual })
}

/// U1 = −2/(1+λ)[∂₊θ, θ], U2 = −2/(1−λ)[∂₋θ, θ].
pub fn theta_u_matrices(field: &ThetaField, lambda: f64) -> Result<(Jet2Matrix, Jet2Matrix)> {
    let t = field.jet().truncate(field.jet().order() - 1);
    let a = field.jet().d_xi()?.commutator(&t)?;
    let b = field.jet().d_xibar()?.commutator(&t)?;
    Ok((a.scale_re(-2.0 / (1.0 + lambda)), b.scale_re(-2.0 / (1.0 - lambda))))
}

/// ‖∂₊U2 − ∂₋U1 − [U1, U2]‖
pub fn theta_zero_curvature_residual(field: &ThetaField, lambda: f64) -> Result<f64> {
    let (u1, u2) = theta_u_matrices(field, lambda)?;
    let z = &(&u2.derivative(1, 0)? - &u1.derivative(0, 1)?) - &comm(u1.value(), u2.value());
    Ok(z.norm_fro())
}

/// Sign of the exponent in the traveling wave function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveSign {
    /// e^{+2χ[∂₊θ, θ]}
    Printed,
    /// e^{−2χ[∂₊θ, θ]}
    Flipped,
}

impl WaveSign {
    fn factor(self) -> f64 {
        match self {
            WaveSign::Printed => 2.0,
            WaveSign::Flipped => -2.0,
        }
    }
}

/// φ = (I + 2iθ − (2/N)I)·exp(±2χ[∂₊θ, θ]) as a jet.
pub fn traveling_wavefunction_jet(model: &TravelingWaveModel, xp: f64, xm: f64, sign: WaveSign) -> Result<Jet2Matrix> {
    model.validate()?;
    let field = model.theta(xp, xm)?;
    let g = field.generator_jet()?;
    let d = g.order();
    let chi = model.chi(xp, xm, d);
    let e = g.scale_jet(&chi)?.scale_re(sign.factor()).exp()?;
    let n = model.dim();
    let refl = &(&Jet2Matrix::identity(n, d) + &field.jet().truncate(d).scale(2.0 * I))
        - &Jet2Matrix::constant(&CMatrix::scalar(n, C64::new(2.0 / n as f64, 0.0)), d);
    refl.try_mul(&e)
}

/// The traveling wave function with the printed exponent sign.
pub fn traveling_wavefunction(model: &TravelingWaveModel, xp: f64, xm: f64) -> Result<CMatrix> {
    Ok(traveling_wavefunction_jet(model, xp, xm, WaveSign::Printed)?.value().clone())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LightConeResiduals {
    /// ‖∂₊φ − U1φ‖ relative
    pub plus: f64,
    /// ‖∂₋φ − U2φ‖ relative
    pub minus: f64,
}

impl LightConeResiduals {
    pub fn max(&self) -> f64 {
        self.plus.max(self.minus)
    }
}

pub fn wave_lax_residuals(model: &TravelingWaveModel, xp: f64, xm: f64, sign: WaveSign) -> Result<LightConeResiduals> {
    let phi = traveling_wavefunction_jet(model, xp, xm, sign)?;
    let (u1, u2) = theta_u_matrices(&model.theta(xp, xm)?, model.lambda)?;
    Ok(LightConeResiduals {
        plus: rel_residual(&phi.derivative(1, 0)?, &(u1.value() * phi.value())),
        minus: rel_residual(&phi.derivative(0, 1)?, &(u2.value() * phi.value())),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conjugation {
    pub generator: CMatrix,
    /// φ†[∂₊θ, θ]φ from the wave function.
    pub lhs: CMatrix,
    /// [∂₊θ, θ]·exp(4χ[∂₊θ, θ])
    pub rhs_printed: CMatrix,
    /// ‖lhs‖ / ‖[∂₊θ, θ]‖
    pub norm_ratio: f64,
}

impl Conjugation {
    pub fn printed_residual(&self) -> f64 {
        rel_residual(&self.lhs, &self.rhs_printed)
    }

    /// Distance of the left side from −[∂₊θ, θ].
    pub fn negation_residual(&self) -> f64 {
        rel_residual(&self.lhs, &self.generator.scale_re(-1.0))
    }
}

pub fn conjugated_generator(model: &TravelingWaveModel, xp: f64, xm: f64, sign: WaveSign) -> Result<Conjugation> {
    let phi = traveling_wavefunction_jet(model, xp, xm, sign)?;
    let generator = model.theta(xp, xm)?.generator_jet()?.value().clone();
    let phi = phi.value();
    let lhs = &(&phi.dagger() * &generator) * phi;
    let chi = model.chi(xp, xm, 0).value();
    let rhs_printed = &generator * &matrix_exp(&generator.scale(4.0 * chi))?;
    let norm_ratio = lhs.norm_fro() / generator.norm_fro().max(f64::MIN_POSITIVE);
    Ok(Conjugation { generator, lhs, rhs_printed, norm_ratio })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FgSample {
    pub x: CMatrix,
    /// −2c₁/(1+λ)·φ†[∂₊θ, θ]φ
    pub dplus: CMatrix,
    /// −2c₁(1 + κλ/(1−λ))·φ†[∂₊θ, θ]φ
    pub dminus: CMatrix,
}

/// X^FG = −2(c₁x⁺ + κc₁x⁻ − c₁ + c₂ + κc₃)·φ†[∂₊θ, θ]φ and its stated tangents.
pub fn fg_surface_and_tangents(model: &TravelingWaveModel, xp: f64, xm: f64) -> Result<FgSample> {
    let m = conjugated_generator(model, xp, xm, WaveSign::Printed)?.lhs;
    let TravelingWaveModel { kappa, lambda, c1, c2, c3, .. } = *model;
    let amp = -2.0 * (c1 * xp + kappa * c1 * xm - c1 + c2 + kappa * c3);
    Ok(FgSample {
        x: m.scale_re(amp),
        dplus: m.scale_re(-2.0 * c1 / (1.0 + lambda)),
        dminus: m.scale_re(-2.0 * c1 * (1.0 + kappa * lambda / (1.0 - lambda))),
    })
}

/// Central differences of X^FG in x⁺ and x⁻.
pub fn fg_finite_difference(model: &TravelingWaveModel, xp: f64, xm: f64, h: f64) -> Result<(CMatrix, CMatrix)> {
    let x = |a: f64, b: f64| fg_surface_and_tangents(model, a, b).map(|s| s.x);
    let dp = (&x(xp + h, xm)? - &x(xp - h, xm)?).scale_re(0.5 / h);
    let dm = (&x(xp, xm + h)? - &x(xp, xm - h)?).scale_re(0.5 / h);
    Ok((dp, dm))
}

/// max relative distance between the stated FG tangents and finite differences.
pub fn fg_tangent_fd_residual(model: &TravelingWaveModel, xp: f64, xm: f64, h: f64) -> Result<f64> {
    let s = fg_surface_and_tangents(model, xp, xm)?;
    let (dp, dm) = fg_finite_difference(model, xp, xm, h)?;
    Ok(rel_residual(&s.dplus, &dp).max(rel_residual(&s.dminus, &dm)))
}

/// κ* = (λ² − 1)/(λ² + 1)
pub fn kappa_star(lambda: f64) -> f64 {
    (lambda * lambda - 1.0) / (lambda * lambda + 1.0)
}

/// (1+λ)(1 + κλ/(1−λ)) + κ: the FG tangent ratio minus the Weierstrass one.
pub fn tangent_ratio_residual(kappa: f64, lambda: f64) -> f64 {
    (1.0 + lambda) * (1.0 + kappa * lambda / (1.0 - lambda)) + kappa
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KappaScanRow {
    pub kappa: f64,
    pub lambda: f64,
    pub ratio_residual: f64,
    pub direction_residual: f64,
    pub fitted_c1: f64,
}

/// Compare FG and Weierstrass tangent pairs at one κ, fitting c₁ by least squares.
pub fn kappa_row(model: &TravelingWaveModel, xp: f64, xm: f64) -> Result<KappaScanRow> {
    let unit = model.clone().with_constants(1.0, model.c2, model.c3);
    let fg = fg_surface_and_tangents(&unit, xp, xm)?;
    let w = minkowski_weierstrass_tangents(model, xp, xm)?;
    let dot =
        |a: &CMatrix, b: &CMatrix| -> C64 { a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x.conj() * y).sum() };
    let num = dot(&fg.dplus, &w.plus) + dot(&fg.dminus, &w.minus);
    let den = dot(&fg.dplus, &fg.dplus) + dot(&fg.dminus, &fg.dminus);
    let alpha = if den.norm() > 0.0 { num / den } else { ZERO };
    let rp = &w.plus - &fg.dplus.scale(alpha);
    let rm = &w.minus - &fg.dminus.scale(alpha);
    let scale = (w.plus.norm_fro().powi(2) + w.minus.norm_fro().powi(2)).sqrt().max(f64::MIN_POSITIVE);
    let direction_residual = (rp.norm_fro().powi(2) + rm.norm_fro().powi(2)).sqrt() / scale;
    Ok(KappaScanRow {
        kappa: model.kappa,
        lambda: model.lambda,
        ratio_residual: tangent_ratio_residual(model.kappa, model.lambda).abs(),
        direction_residual,
        fitted_c1: alpha.re,
    })
}

pub fn kappa_coincidence_scan(
    model: &TravelingWaveModel,
    kappas: &[f64],
    xp: f64,
    xm: f64,
    exec: Execution,
) -> Result<Vec<KappaScanRow>> {
    model.validate()?;
    exec.map(kappas, |&k| kappa_row(&model.with_kappa(k), xp, xm)).into_iter().collect()
}

/// κ grid on [lo, hi] with the given step, inclusive of both ends.
pub fn kappa_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as i64;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::projector_from_vector;

    fn wave(kappa: f64, lambda: f64) -> TravelingWaveModel {
        TravelingWaveModel::rotating_wave(1.0, kappa, lambda).unwrap()
    }

    const PTS: [(f64, f64); 3] = [(0.3, -0.4), (-1.2, 0.7), (2.1, 1.5)];

    #[test]
    fn rotating_wave_basics() {
        let m = wave(0.4, 0.5);
        let p = m.projector_jet(0.0, 0.0, 3).unwrap();
        assert!(p.value().max_abs_diff(&CMatrix::real_diag(&[1.0, 0.0])) < 1e-15);
        for &(xp, xm) in &PTS {
            let f = m.theta(xp, xm).unwrap();
            assert!(f.el_residual().unwrap() <= 1e-12);
            assert_eq!(f.traveling_residual(0.4).unwrap(), 0.0);
        }
        assert!(TravelingWaveModel::rotating_wave(0.0, 0.4, 0.5).is_err());
        assert!(matches!(TravelingWaveModel::rotating_wave(1.0, 0.4, 1.0), Err(Error::Pole(_))));
    }

    #[test]
    fn profile_taylor_matches_closed_form() {
        let prof = Profile::RotatingWave { omega: 0.7 };
        let coeffs = prof.taylor(0.3, 6).unwrap();
        let t: f64 = 0.05;
        let sum = coeffs.iter().enumerate().fold(CMatrix::zeros(2), |acc, (m, c)| &acc + &c.scale_re(t.powi(m as i32)));
        let s: f64 = 0.35 * 0.7;
        let (sn, cs) = s.sin_cos();
        let f = [C64::new(cs, 0.0), C64::new(sn, 0.0)];
        assert!(sum.max_abs_diff(&CMatrix::outer(&f, &f)) < 1e-10);
    }

    #[test]
    fn theta_from_diag() {
        let p = Jet2Matrix::constant(&CMatrix::real_diag(&[1.0, 0.0]), 2);
        let f = ThetaField::from_projector(&p).unwrap();
        assert!(f.value().max_abs_diff(&CMatrix::diag(&[I * 0.5, -I * 0.5])) < 1e-16);
        let bad = Jet2Matrix::constant(&CMatrix::identity(2), 2);
        assert!(ThetaField::from_projector(&bad).is_err());
        let r = theta_identities(&f).unwrap();
        assert_eq!(r.max_printed(), 0.0);
    }

    #[test]
    fn theta_identities_hold_except_printed_product_sign() {
        let line = Profile::Line {
            curve: HolomorphicCurve::veronese(3).unwrap(),
            sheet: 1,
            origin: C64::new(0.2, -0.3),
            direction: C64::new(0.6, 0.8),
        };
        let models = [wave(0.4, 0.5), TravelingWaveModel::new(line, -0.3, 0.5).unwrap()];
        for m in &models {
            for &(xp, xm) in &PTS {
                let r = theta_identities(&m.theta(xp, xm).unwrap()).unwrap();
                assert!(r.max_corrected() <= 1e-10, "{r:?}");
                assert!(r.product_printed > 0.5, "{r:?}");
            }
        }
    }

    #[test]
    fn generic_projector_identities() {
        // θ identities are algebraic: any projector jet works, solution or not.
        let f = crate::chain::PolyField::new(vec![
            vec![((0, 0), ONE)],
            vec![((1, 0), C64::new(0.5, 0.2))],
            vec![((0, 1), ONE), ((2, 0), C64::new(0.0, 0.3))],
        ])
        .unwrap();
        let p = projector_from_vector(&f.jet_at(C64::new(0.4, 0.1), 3)).unwrap();
        let r = theta_identities(&ThetaField::from_projector(&p).unwrap()).unwrap();
        assert!(r.max_corrected() <= 1e-10);
    }

    #[test]
    fn weierstrass_tangents() {
        for kappa in [0.0, 0.4, -1.3] {
            let m = wave(kappa, 0.5);
            let t = minkowski_weierstrass_tangents(&m, 0.3, 0.2).unwrap();
            assert!(rel_residual(&t.minus, &t.plus.scale_re(-kappa)) <= 1e-15);
            assert!(t.integrand_residual <= 1e-12);
            assert!((&t.plus + &t.plus.dagger()).norm_fro() <= 1e-12);
        }
        let t = minkowski_weierstrass_tangents(&wave(0.0, 0.5), 0.0, 0.0).unwrap();
        assert_eq!(t.minus.norm_fro(), 0.0);
    }

    #[test]
    fn zero_curvature_in_theta_form() {
        let m = wave(0.4, 0.5);
        for &(xp, xm) in &PTS {
            assert!(theta_zero_curvature_residual(&m.theta(xp, xm).unwrap(), 0.5).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn wavefunction_at_origin_and_involution() {
        let m = wave(0.4, 0.5);
        let phi = traveling_wavefunction(&m, 0.0, 0.0).unwrap();
        let refl = reflector(m.theta(0.0, 0.0).unwrap().value());
        assert!(phi.max_abs_diff(&refl) < 1e-15);
        assert!(rel_residual(&(&refl * &refl), &CMatrix::identity(2)) <= 1e-12);
    }

    #[test]
    fn lax_exponent_sign() {
        for lambda in [0.5, -0.5, 2.0] {
            let m = wave(0.4, lambda);
            for &(xp, xm) in &PTS {
                let flipped = wave_lax_residuals(&m, xp, xm, WaveSign::Flipped).unwrap();
                assert!(flipped.max() <= 1e-8, "{flipped:?}");
                let printed = wave_lax_residuals(&m, xp, xm, WaveSign::Printed).unwrap();
                assert!(printed.max() > 1e-3, "{printed:?}");
            }
        }
        let m = wave(0.4, 0.0);
        assert!(wave_lax_residuals(&m, 0.3, 0.2, WaveSign::Printed).unwrap().max() <= 1e-8);
    }

    #[test]
    fn conjugated_generator_is_negated() {
        let m = wave(0.4, 0.5);
        for sign in [WaveSign::Printed, WaveSign::Flipped] {
            for &(xp, xm) in &PTS {
                let c = conjugated_generator(&m, xp, xm, sign).unwrap();
                assert!(c.negation_residual() <= 1e-12);
                assert!((c.norm_ratio - 1.0).abs() <= 1e-12);
                assert!(c.printed_residual() > 1e-3);
            }
        }
    }

    #[test]
    fn fg_prefactors() {
        let m = wave(0.4, 0.5).with_constants(0.0, 0.3, -0.2);
        let s = fg_surface_and_tangents(&m, 0.3, 0.2).unwrap();
        assert_eq!(s.dplus.norm_fro(), 0.0);
        assert_eq!(s.dminus.norm_fro(), 0.0);
        let m = wave(0.4, 0.5).with_constants(1.3, 0.3, -0.2);
        let s = fg_surface_and_tangents(&m, 0.3, 0.2).unwrap();
        let ratio = (1.0 + 0.5) * (1.0 + 0.4 * 0.5 / 0.5);
        assert!(rel_residual(&s.dminus, &s.dplus.scale_re(ratio)) <= 1e-14);
        assert!((&s.x + &s.x.dagger()).norm_fro() <= 1e-10);
    }

    #[test]
    fn fg_tangents_disagree_with_finite_differences() {
        let m = wave(0.4, 0.5).with_constants(1.0, 0.2, 0.1);
        assert!(fg_tangent_fd_residual(&m, 0.3, 0.2, 1e-4).unwrap() > 1e-3);
        // With φ†[∂₊θ, θ]φ constant the true tangents are −2c₁M and −2κc₁M.
        let (dp, dm) = fg_finite_difference(&m, 0.3, 0.2, 1e-4).unwrap();
        let mm = conjugated_generator(&m, 0.3, 0.2, WaveSign::Printed).unwrap().lhs;
        assert!(rel_residual(&dp, &mm.scale_re(-2.0)) <= 1e-8);
        assert!(rel_residual(&dm, &mm.scale_re(-0.8)) <= 1e-8);
    }

    #[test]
    fn kappa_star_root() {
        for lambda in [0.0, 0.5, -0.5, 2.0, -2.0] {
            let ks = kappa_star(lambda);
            assert!(tangent_ratio_residual(ks, lambda).abs() <= 1e-12);
            let row = kappa_row(&wave(ks, lambda), 0.3, 0.2).unwrap();
            assert!(row.ratio_residual <= 1e-10);
            assert!(row.direction_residual <= 1e-10, "{row:?}");
        }
        assert_eq!(kappa_star(0.0), -1.0);
    }

    #[test]
    fn kappa_scan_minimum() {
        let grid = kappa_grid(-1.0, 1.0, 0.01);
        assert_eq!(grid.len(), 201);
        let rows = kappa_coincidence_scan(&wave(0.0, 0.5), &grid, 0.3, 0.2, Execution::Parallel).unwrap();
        let best = rows.iter().min_by(|a, b| a.ratio_residual.total_cmp(&b.ratio_residual)).unwrap();
        assert!((best.kappa + 0.6).abs() < 1e-9);
        assert!(rows.iter().filter(|r| (r.kappa + 0.6).abs() > 0.005).all(|r| r.ratio_residual > 0.0));
    }
}
