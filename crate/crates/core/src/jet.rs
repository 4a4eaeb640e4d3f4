//! Truncated bivariate Taylor series ("jets") in two independent variables.
//!
//! For Euclidean models the variables are ξ and ξ̄ treated as independent
//! (Wirtinger calculus), so `d_xi` / `d_xibar` are the exact ∂ and ∂̄ at the
//! base point. The Minkowski module reuses the same containers with the real
//! light-cone coordinates (x⁺, x⁻) as the two variables.
//!
//! Coefficient `c[a][b]` multiplies `(ξ−ξ₀)^a (ξ̄−ξ̄₀)^b`, so the mixed
//! derivative ∂^a ∂̄^b at the base point is `a!·b!·c[a][b]`.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ONE, ZERO};

/// Default jet order: enough for ∂², ∂∂̄ and ∂̄² plus one spare order.
pub const DEFAULT_ORDER: usize = 3;

/// Smallest |c₀₀| accepted by [`Jet2Scalar::reciprocal`].
pub const RECIP_EPS: f64 = 1e-12;

#[inline]
fn idx(a: usize, b: usize) -> usize {
    let t = a + b;
    t * (t + 1) / 2 + b
}

#[inline]
fn len_for(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

/// Iterate the `(a, b)` exponents of a jet of the given order in storage order.
pub fn exponents(order: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=order).flat_map(|t| (0..=t).map(move |b| (t - b, b)))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    Xi,
    XiBar,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Jet2Scalar {
    order: usize,
    coeffs: Vec<C64>,
}

impl Jet2Scalar {
    pub fn zero(order: usize) -> Self {
        Self { order, coeffs: vec![ZERO; len_for(order)] }
    }

    pub fn constant(value: C64, order: usize) -> Self {
        let mut j = Self::zero(order);
        j.coeffs[0] = value;
        j
    }

    /// The coordinate function ξ (or ξ̄) expanded at `base`.
    pub fn seed(base: C64, which: Var, order: usize) -> Self {
        let mut j = Self::constant(base, order);
        if order >= 1 {
            match which {
                Var::Xi => j.coeffs[idx(1, 0)] = ONE,
                Var::XiBar => j.coeffs[idx(0, 1)] = ONE,
            }
        }
        j
    }

    /// Build from a coefficient function `(a, b) ↦ c_ab`.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        Self { order, coeffs: exponents(order).map(|(a, b)| f(a, b)).collect() }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> C64 {
        self.coeffs[0]
    }

    /// Taylor coefficient `c_ab`; zero beyond the truncation order.
    pub fn coeff(&self, a: usize, b: usize) -> C64 {
        if a + b <= self.order {
            self.coeffs[idx(a, b)]
        } else {
            ZERO
        }
    }

    pub fn set_coeff(&mut self, a: usize, b: usize, v: C64) {
        assert!(a + b <= self.order, "coefficient beyond jet order");
        self.coeffs[idx(a, b)] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// ∂^a ∂̄^b at the base point.
    pub fn derivative(&self, a: usize, b: usize) -> Result<C64> {
        if a + b > self.order {
            return Err(Error::DerivativeOrder { requested: a + b, order: self.order });
        }
        Ok(self.coeffs[idx(a, b)] * factorial(a) * factorial(b))
    }

    /// Complex conjugate of a Wirtinger jet: `c'_ab = conj(c_ba)`.
    pub fn conj(&self) -> Self {
        Self::from_fn(self.order, |a, b| self.coeff(b, a).conj())
    }

    /// Complex conjugate when both jet variables are real coordinates.
    pub fn conj_real_vars(&self) -> Self {
        Self { order: self.order, coeffs: self.coeffs.iter().map(|z| z.conj()).collect() }
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order, "cannot raise jet order by truncation");
        Self { order, coeffs: self.coeffs[..len_for(order)].to_vec() }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { order: self.order, coeffs: self.coeffs.iter().map(|&z| z * s).collect() }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.order == other.order {
            Ok(())
        } else {
            Err(Error::OrderMismatch(self.order, other.order))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self { order: self.order, coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self { order: self.order, coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect() })
    }

    /// Truncated Cauchy product.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let d = self.order;
        let mut out = Self::zero(d);
        for (a1, b1) in exponents(d) {
            let x = self.coeffs[idx(a1, b1)];
            if x == ZERO {
                continue;
            }
            for (a2, b2) in exponents(d - a1 - b1) {
                out.coeffs[idx(a1 + a2, b1 + b2)] += x * other.coeffs[idx(a2, b2)];
            }
        }
        Ok(out)
    }

    /// Multiplicative inverse, by Newton-free recursive solve of `a·b = 1`.
    pub fn reciprocal(&self) -> Result<Self> {
        let a0 = self.coeffs[0];
        if a0.norm() <= RECIP_EPS {
            return Err(Error::SingularNormalization(a0.norm()));
        }
        let inv0 = ONE / a0;
        let d = self.order;
        let mut out = Self::zero(d);
        out.coeffs[0] = inv0;
        for (a, b) in exponents(d).skip(1) {
            // Σ_{(i,j) ≤ (a,b)} self_ij · out_{a−i,b−j} = 0
            let mut s = ZERO;
            for i in 0..=a {
                for j in 0..=b {
                    if i == 0 && j == 0 {
                        continue;
                    }
                    s += self.coeffs[idx(i, j)] * out.coeffs[idx(a - i, b - j)];
                }
            }
            out.coeffs[idx(a, b)] = -s * inv0;
        }
        Ok(out)
    }

    /// Compose with an analytic function given its derivatives `f^{(m)}(c₀₀)`.
    ///
    /// Only the first `order + 1` entries of `derivs` are used.
    pub fn compose(&self, derivs: &[C64]) -> Self {
        let d = self.order;
        assert!(derivs.len() > d, "need {} derivatives", d + 1);
        let mut h = self.clone();
        h.coeffs[0] = ZERO;
        let mut out = Self::constant(derivs[0], d);
        let mut pow = Self::constant(ONE, d);
        for (m, dm) in derivs.iter().enumerate().take(d + 1).skip(1) {
            pow = &pow * &h;
            out = &out + &pow.scale(dm / factorial(m));
        }
        out
    }

    /// ∂: lowers the order by one.
    pub fn d_xi(&self) -> Result<Self> {
        if self.order == 0 {
            return Err(Error::DerivativeOrder { requested: 1, order: 0 });
        }
        Ok(Self::from_fn(self.order - 1, |a, b| self.coeff(a + 1, b) * (a + 1) as f64))
    }

    /// ∂̄: lowers the order by one.
    pub fn d_xibar(&self) -> Result<Self> {
        if self.order == 0 {
            return Err(Error::DerivativeOrder { requested: 1, order: 0 });
        }
        Ok(Self::from_fn(self.order - 1, |a, b| self.coeff(a, b + 1) * (b + 1) as f64))
    }

    /// Evaluate the truncated polynomial at the displacement `(δξ, δξ̄)`.
    pub fn eval_offset(&self, dxi: C64, dxibar: C64) -> C64 {
        exponents(self.order).map(|(a, b)| self.coeffs[idx(a, b)] * dxi.powu(a as u32) * dxibar.powu(b as u32)).sum()
    }
}

impl Add for &Jet2Scalar {
    type Output = Jet2Scalar;
    fn add(self, rhs: &Jet2Scalar) -> Jet2Scalar {
        self.try_add(rhs).expect("jet order mismatch")
    }
}

impl Sub for &Jet2Scalar {
    type Output = Jet2Scalar;
    fn sub(self, rhs: &Jet2Scalar) -> Jet2Scalar {
        self.try_sub(rhs).expect("jet order mismatch")
    }
}

impl Mul for &Jet2Scalar {
    type Output = Jet2Scalar;
    fn mul(self, rhs: &Jet2Scalar) -> Jet2Scalar {
        self.try_mul(rhs).expect("jet order mismatch")
    }
}

impl Neg for &Jet2Scalar {
    type Output = Jet2Scalar;
    fn neg(self) -> Jet2Scalar {
        self.scale(-ONE)
    }
}

/// An N-vector of scalar jets, used for the curve vectors f_k.
#[derive(Clone, Debug, PartialEq)]
pub struct JetVector {
    comps: Vec<Jet2Scalar>,
}

impl JetVector {
    pub fn new(comps: Vec<Jet2Scalar>) -> Result<Self> {
        let order = comps.first().map(|c| c.order).unwrap_or(0);
        if let Some(bad) = comps.iter().find(|c| c.order != order) {
            return Err(Error::OrderMismatch(order, bad.order));
        }
        Ok(Self { comps })
    }

    pub fn constant(v: &[C64], order: usize) -> Self {
        Self { comps: v.iter().map(|&z| Jet2Scalar::constant(z, order)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn order(&self) -> usize {
        self.comps[0].order
    }

    pub fn components(&self) -> &[Jet2Scalar] {
        &self.comps
    }

    pub fn value(&self) -> Vec<C64> {
        self.comps.iter().map(Jet2Scalar::value).collect()
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self { comps: self.comps.iter().map(|c| c.truncate(order)).collect() }
    }

    pub fn d_xi(&self) -> Result<Self> {
        Ok(Self { comps: self.comps.iter().map(Jet2Scalar::d_xi).collect::<Result<_>>()? })
    }

    pub fn d_xibar(&self) -> Result<Self> {
        Ok(Self { comps: self.comps.iter().map(Jet2Scalar::d_xibar).collect::<Result<_>>()? })
    }

    /// `self† · other` (conjugate-linear in `self`).
    pub fn inner(&self, other: &Self) -> Result<Jet2Scalar> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        let mut acc = Jet2Scalar::zero(self.order());
        for (u, v) in self.comps.iter().zip(&other.comps) {
            acc = acc.try_add(&u.conj().try_mul(v)?)?;
        }
        Ok(acc)
    }

    /// `self ⊗ other†`
    pub fn outer(&self, other: &Self) -> Result<Jet2Matrix> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        let n = self.dim();
        let conj: Vec<Jet2Scalar> = other.comps.iter().map(Jet2Scalar::conj).collect();
        let mut entries = Vec::with_capacity(n * n);
        for u in &self.comps {
            for v in &conj {
                entries.push(u.try_mul(v)?);
            }
        }
        Jet2Matrix::from_entries(n, &entries)
    }

    pub fn scale_jet(&self, s: &Jet2Scalar) -> Result<Self> {
        Ok(Self { comps: self.comps.iter().map(|c| c.try_mul(s)).collect::<Result<_>>()? })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(Self { comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.try_sub(b)).collect::<Result<_>>()? })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { comps: self.comps.iter().map(|c| c.scale(s)).collect() }
    }

    /// Euclidean norm of the base-point value.
    pub fn value_norm(&self) -> f64 {
        self.comps.iter().map(|c| c.value().norm_sqr()).sum::<f64>().sqrt()
    }
}

/// A jet of N×N matrices, stored as one coefficient matrix per monomial.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2Matrix {
    n: usize,
    order: usize,
    coeffs: Vec<CMatrix>,
}

impl Jet2Matrix {
    pub fn zero(n: usize, order: usize) -> Self {
        Self { n, order, coeffs: vec![CMatrix::zeros(n); len_for(order)] }
    }

    pub fn constant(m: &CMatrix, order: usize) -> Self {
        let mut j = Self::zero(m.dim(), order);
        j.coeffs[0] = m.clone();
        j
    }

    pub fn identity(n: usize, order: usize) -> Self {
        Self::constant(&CMatrix::identity(n), order)
    }

    pub fn from_coeff_fn(n: usize, order: usize, f: impl Fn(usize, usize) -> CMatrix) -> Self {
        Self { n, order, coeffs: exponents(order).map(|(a, b)| f(a, b)).collect() }
    }

    /// Assemble from a row-major grid of scalar jets of equal order.
    pub fn from_entries(n: usize, entries: &[Jet2Scalar]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch(n * n, entries.len()));
        }
        let order = entries[0].order;
        if let Some(bad) = entries.iter().find(|e| e.order != order) {
            return Err(Error::OrderMismatch(order, bad.order));
        }
        Ok(Self::from_coeff_fn(n, order, |a, b| CMatrix::from_fn(n, |i, j| entries[i * n + j].coeff(a, b))))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> &CMatrix {
        &self.coeffs[0]
    }

    pub fn coeff(&self, a: usize, b: usize) -> &CMatrix {
        &self.coeffs[idx(a, b)]
    }

    pub fn entry(&self, i: usize, j: usize) -> Jet2Scalar {
        Jet2Scalar::from_fn(self.order, |a, b| self.coeffs[idx(a, b)][(i, j)])
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(CMatrix::is_finite)
    }

    /// ∂^a ∂̄^b of every entry at the base point.
    pub fn derivative(&self, a: usize, b: usize) -> Result<CMatrix> {
        if a + b > self.order {
            return Err(Error::DerivativeOrder { requested: a + b, order: self.order });
        }
        Ok(self.coeffs[idx(a, b)].scale_re(factorial(a) * factorial(b)))
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order, "cannot raise jet order by truncation");
        Self { n: self.n, order, coeffs: self.coeffs[..len_for(order)].to_vec() }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        if self.order != other.order {
            return Err(Error::OrderMismatch(self.order, other.order));
        }
        Ok(())
    }

    /// Truncate both operands to the lower of their orders.
    pub fn common_order(a: &Self, b: &Self) -> (Self, Self) {
        let d = a.order.min(b.order);
        (a.truncate(d), b.truncate(d))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self {
            n: self.n,
            order: self.order,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self {
            n: self.n,
            order: self.order,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let d = self.order;
        let mut out = Self::zero(self.n, d);
        for (a1, b1) in exponents(d) {
            let x = &self.coeffs[idx(a1, b1)];
            if x.norm_fro() == 0.0 {
                continue;
            }
            for (a2, b2) in exponents(d - a1 - b1) {
                let y = &other.coeffs[idx(a2, b2)];
                out.coeffs[idx(a1 + a2, b1 + b2)] += &(x * y);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { n: self.n, order: self.order, coeffs: self.coeffs.iter().map(|m| m.scale(s)).collect() }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Multiply by a scalar jet.
    pub fn scale_jet(&self, s: &Jet2Scalar) -> Result<Self> {
        if s.order != self.order {
            return Err(Error::OrderMismatch(self.order, s.order));
        }
        let d = self.order;
        let mut out = Self::zero(self.n, d);
        for (a1, b1) in exponents(d) {
            let x = s.coeffs[idx(a1, b1)];
            if x == ZERO {
                continue;
            }
            for (a2, b2) in exponents(d - a1 - b1) {
                out.coeffs[idx(a1 + a2, b1 + b2)] += &self.coeffs[idx(a2, b2)].scale(x);
            }
        }
        Ok(out)
    }

    /// Conjugate transpose of a Wirtinger jet (swaps the roles of ∂ and ∂̄).
    pub fn dagger(&self) -> Self {
        Self::from_coeff_fn(self.n, self.order, |a, b| self.coeffs[idx(b, a)].dagger())
    }

    /// Conjugate transpose when both jet variables are real coordinates.
    pub fn dagger_real_vars(&self) -> Self {
        Self { n: self.n, order: self.order, coeffs: self.coeffs.iter().map(CMatrix::dagger).collect() }
    }

    pub fn trace(&self) -> Jet2Scalar {
        Jet2Scalar { order: self.order, coeffs: self.coeffs.iter().map(CMatrix::trace).collect() }
    }

    pub fn d_xi(&self) -> Result<Self> {
        if self.order == 0 {
            return Err(Error::DerivativeOrder { requested: 1, order: 0 });
        }
        Ok(Self::from_coeff_fn(self.n, self.order - 1, |a, b| self.coeffs[idx(a + 1, b)].scale_re((a + 1) as f64)))
    }

    pub fn d_xibar(&self) -> Result<Self> {
        if self.order == 0 {
            return Err(Error::DerivativeOrder { requested: 1, order: 0 });
        }
        Ok(Self::from_coeff_fn(self.n, self.order - 1, |a, b| self.coeffs[idx(a, b + 1)].scale_re((b + 1) as f64)))
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.try_mul(other)?.try_sub(&other.try_mul(self)?)
    }

    pub fn apply(&self, v: &JetVector) -> Result<JetVector> {
        if v.dim() != self.n {
            return Err(Error::DimensionMismatch(self.n, v.dim()));
        }
        let comps = (0..self.n)
            .map(|i| {
                let mut acc = Jet2Scalar::zero(self.order);
                for (j, vj) in v.components().iter().enumerate() {
                    acc = acc.try_add(&self.entry(i, j).try_mul(vj)?)?;
                }
                Ok(acc)
            })
            .collect::<Result<_>>()?;
        JetVector::new(comps)
    }

    /// Matrix exponential of a jet, by scaling and squaring in jet arithmetic.
    ///
    /// The base-point value goes through the same Padé path as
    /// [`crate::linalg::matrix_exp`]; higher coefficients follow from the
    /// truncated series of the scaled argument.
    pub fn exp(&self) -> Result<Self> {
        let norm = self.value().norm_one();
        if norm > crate::linalg::EXP_NORM_BOUND {
            return Err(Error::ExpOverflow { norm, bound: crate::linalg::EXP_NORM_BOUND });
        }
        let whole: f64 = self.coeffs.iter().map(CMatrix::norm_one).sum();
        let s = if whole > 0.5 { (whole / 0.5).log2().ceil() as i32 } else { 0 };
        let a = self.scale_re(0.5_f64.powi(s));
        let mut term = Self::identity(self.n, self.order);
        let mut sum = term.clone();
        for k in 1..=30 {
            term = term.try_mul(&a)?.scale_re(1.0 / k as f64);
            sum = sum.try_add(&term)?;
            if term.coeffs.iter().map(CMatrix::norm_fro).sum::<f64>() < 1e-18 {
                break;
            }
        }
        for _ in 0..s {
            sum = sum.try_mul(&sum)?;
        }
        Ok(sum)
    }
}

impl Add for &Jet2Matrix {
    type Output = Jet2Matrix;
    fn add(self, rhs: &Jet2Matrix) -> Jet2Matrix {
        self.try_add(rhs).expect("jet shape mismatch")
    }
}

impl Sub for &Jet2Matrix {
    type Output = Jet2Matrix;
    fn sub(self, rhs: &Jet2Matrix) -> Jet2Matrix {
        self.try_sub(rhs).expect("jet shape mismatch")
    }
}

impl Mul for &Jet2Matrix {
    type Output = Jet2Matrix;
    fn mul(self, rhs: &Jet2Matrix) -> Jet2Matrix {
        self.try_mul(rhs).expect("jet shape mismatch")
    }
}

/// Rank-one projector jet `f ⊗ f† / (f† f)`.
pub fn projector_from_vector(f: &JetVector) -> Result<Jet2Matrix> {
    let norm2 = f.inner(f)?;
    let recip = norm2.reciprocal()?;
    f.outer(f)?.scale_jet(&recip)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn poly_jet(order: usize, seed: u64) -> Jet2Scalar {
        // cheap deterministic pseudo-random coefficients
        let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        Jet2Scalar::from_fn(order, |_, _| {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let re = ((x >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0;
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let im = ((x >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0;
            c(re, im)
        })
    }

    fn max_diff(a: &Jet2Scalar, b: &Jet2Scalar) -> f64 {
        exponents(a.order()).map(|(i, j)| (a.coeff(i, j) - b.coeff(i, j)).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn seed_examples() {
        let s = Jet2Scalar::seed(c(2.0, 1.0), Var::Xi, 3);
        assert_eq!(s.coeff(0, 0), c(2.0, 1.0));
        assert_eq!(s.coeff(1, 0), ONE);
        assert_eq!(s.coeff(0, 1), ZERO);
        let s = Jet2Scalar::seed(c(2.0, -1.0), Var::XiBar, 3);
        assert_eq!(s.coeff(0, 0), c(2.0, -1.0));
        assert_eq!(s.coeff(0, 1), ONE);

        let z = c(0.3, -1.2);
        let xi = Jet2Scalar::seed(z, Var::Xi, 3);
        let xib = Jet2Scalar::seed(z.conj(), Var::XiBar, 3);
        let prod = &xi * &xib;
        assert_eq!(prod.d_xi().unwrap().value(), z.conj());
        assert_eq!(xi.derivative(2, 0).unwrap(), ZERO);
        assert!(matches!(xi.derivative(2, 2), Err(Error::DerivativeOrder { requested: 4, order: 3 })));
    }

    #[test]
    fn conj_examples() {
        let z = c(0.7, 0.4);
        let xi = Jet2Scalar::seed(z, Var::Xi, 3);
        assert_eq!(xi.conj(), Jet2Scalar::seed(z.conj(), Var::XiBar, 3));
        let a = poly_jet(4, 1);
        assert_eq!(a.conj().conj(), a);
        let b = poly_jet(4, 2);
        assert!(max_diff(&(&a * &b).conj(), &(&a.conj() * &b.conj())) < 1e-14);
    }

    #[test]
    fn multiply_examples() {
        let xi = Jet2Scalar::seed(ZERO, Var::Xi, 3);
        let sq = &xi * &xi;
        for (a, b) in exponents(3) {
            let expect = if (a, b) == (2, 0) { ONE } else { ZERO };
            assert_eq!(sq.coeff(a, b), expect);
        }
        let a = poly_jet(3, 5);
        assert_eq!(&a * &Jet2Scalar::constant(ONE, 3), a);
        assert_eq!(Jet2Scalar::zero(2).try_mul(&Jet2Scalar::zero(3)).unwrap_err(), Error::OrderMismatch(2, 3));
    }

    #[test]
    fn reciprocal_examples() {
        let r = Jet2Scalar::constant(c(2.0, 0.0), 3).reciprocal().unwrap();
        assert_eq!(r, Jet2Scalar::constant(c(0.5, 0.0), 3));

        let xi = Jet2Scalar::seed(ZERO, Var::Xi, 4);
        let one_plus = &Jet2Scalar::constant(ONE, 4) + &(&xi * &xi.conj());
        let r = one_plus.reciprocal().unwrap();
        assert_eq!(r.coeff(0, 0), ONE);
        assert_eq!(r.coeff(1, 1), -ONE);
        assert_eq!(r.coeff(2, 2), ONE);
        assert_eq!(r.coeff(1, 0), ZERO);
    }

    #[test]
    fn reciprocal_singular() {
        let xi = Jet2Scalar::seed(ZERO, Var::Xi, 3);
        assert!(matches!(xi.reciprocal(), Err(Error::SingularNormalization(_))));
    }

    #[test]
    fn projector_from_vector_examples() {
        let f = JetVector::constant(&[ONE, ZERO], 2);
        let p = projector_from_vector(&f).unwrap();
        assert_eq!(p.value(), &CMatrix::real_diag(&[1.0, 0.0]));

        let xi = Jet2Scalar::seed(ONE, Var::Xi, 0);
        let f = JetVector::new(vec![Jet2Scalar::constant(ONE, 0), xi]).unwrap();
        let p = projector_from_vector(&f).unwrap();
        let half = CMatrix::from_fn(2, |_, _| c(0.5, 0.0));
        assert!(p.value().max_abs_diff(&half) < 1e-15);

        let z = c(0.4, -0.3);
        let f = JetVector::new(vec![
            Jet2Scalar::constant(ONE, 3),
            Jet2Scalar::seed(z, Var::Xi, 3),
            &Jet2Scalar::seed(z, Var::Xi, 3) * &Jet2Scalar::seed(z, Var::Xi, 3),
        ])
        .unwrap();
        let p1 = projector_from_vector(&f).unwrap();
        let p2 = projector_from_vector(&f.scale(c(2.0, 3.0))).unwrap();
        for (a, b) in exponents(3) {
            assert!(p1.coeff(a, b).max_abs_diff(p2.coeff(a, b)) < 1e-14);
        }
    }

    #[test]
    fn matrix_exp_jet_matches_pointwise() {
        let n = 3;
        let a = Jet2Matrix::from_coeff_fn(n, 2, |p, q| {
            CMatrix::from_fn(n, |i, j| c(0.3 * (i + 2 * j + p) as f64 - 0.5, 0.2 * (q + i) as f64 - 0.1 * j as f64))
        });
        let e = a.exp().unwrap();
        let direct = crate::linalg::matrix_exp(a.value()).unwrap();
        assert!(e.value().max_abs_diff(&direct) < 1e-12);
        // first derivative against central differences of the pointwise exponential
        let h = 1e-5;
        let at = |t: f64| {
            let m = a.value() + &a.coeff(1, 0).scale_re(t);
            let m = &m + &a.coeff(2, 0).scale_re(t * t);
            crate::linalg::matrix_exp(&m).unwrap()
        };
        let fd = (&at(h) - &at(-h)).scale_re(0.5 / h);
        assert!(fd.max_abs_diff(&e.derivative(1, 0).unwrap()) < 1e-8);
    }

    proptest! {
        #[test]
        fn ring_laws(s1 in 0u64..1000, s2 in 0u64..1000, s3 in 0u64..1000) {
            let (a, b, c3) = (poly_jet(4, s1), poly_jet(4, s2), poly_jet(4, s3));
            prop_assert!(max_diff(&(&(&a * &b) * &c3), &(&a * &(&b * &c3))) < 1e-13);
            prop_assert!(max_diff(&(&a * &(&b + &c3)), &(&(&a * &b) + &(&a * &c3))) < 1e-13);
            prop_assert!(max_diff(&(&a * &b), &(&b * &a)) < 1e-13);
        }

        #[test]
        fn reciprocal_inverts(s in 0u64..1000) {
            let mut a = poly_jet(4, s);
            a.set_coeff(0, 0, C64::new(1.5, 0.2));
            let prod = &a * &a.reciprocal().unwrap();
            prop_assert!(max_diff(&prod, &Jet2Scalar::constant(ONE, 4)) < 1e-12);
        }

        #[test]
        fn conj_is_involutive_homomorphism(s1 in 0u64..1000, s2 in 0u64..1000) {
            let (a, b) = (poly_jet(3, s1), poly_jet(3, s2));
            prop_assert_eq!(a.conj().conj(), a.clone());
            prop_assert!(max_diff(&(&a * &b).conj(), &(&a.conj() * &b.conj())) < 1e-14);
        }
    }
}
