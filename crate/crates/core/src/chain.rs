//! Holomorphic curves and the projector chains they generate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{Jet2Matrix, Jet2Scalar, JetVector, Var, RECIP_EPS};
use crate::linalg::{check_dim, comm, rel_residual, CMatrix, C64, ONE, ZERO};

/// Relative size of ‖f_N‖ accepted as "the chain terminated".
pub const TERMINATION_TOL: f64 = 1e-8;

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `c_k = (1 + 2k) / N`
pub fn c_k(k: usize, n: usize) -> f64 {
    (1 + 2 * k) as f64 / n as f64
}

/// A polynomial vector f₀(ξ) ∈ ℂ^N; `components[i][m]` is the coefficient of ξ^m.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolomorphicCurve {
    components: Vec<Vec<C64>>,
}

impl HolomorphicCurve {
    pub fn new(components: Vec<Vec<C64>>) -> Result<Self> {
        check_dim(components.len())?;
        let all = components.iter().flatten();
        if all.clone().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        if all.clone().all(|z| *z == ZERO) {
            return Err(Error::InvalidParameter("curve is identically zero".into()));
        }
        Ok(Self { components })
    }

    /// Components √binom(N−1, j)·ξ^j.
    pub fn veronese(n: usize) -> Result<Self> {
        check_dim(n)?;
        let components = (0..n)
            .map(|j| {
                let mut poly = vec![ZERO; j + 1];
                poly[j] = C64::new(binom(n - 1, j).sqrt(), 0.0);
                poly
            })
            .collect();
        Ok(Self { components })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Vec<C64>] {
        &self.components
    }

    pub fn max_degree(&self) -> usize {
        self.components.iter().map(|c| c.len().saturating_sub(1)).max().unwrap_or(0)
    }

    /// m-th derivative of every component at ξ.
    pub fn derivative_at(&self, xi: C64, m: usize) -> Vec<C64> {
        self.components
            .iter()
            .map(|poly| {
                poly.iter().enumerate().skip(m).map(|(p, &coef)| coef * falling(p, m) * xi.powu((p - m) as u32)).sum()
            })
            .collect()
    }

    pub fn eval(&self, xi: C64) -> Vec<C64> {
        self.derivative_at(xi, 0)
    }

    /// Wirtinger jet of f₀ at ξ₀; holomorphic, so only `c_{a0}` are populated.
    pub fn jet_at(&self, xi0: C64, order: usize) -> JetVector {
        let comps = self
            .components
            .iter()
            .map(|poly| {
                let mut j = Jet2Scalar::zero(order);
                for a in 0..=order.min(poly.len().saturating_sub(1)) {
                    let c: C64 = poly
                        .iter()
                        .enumerate()
                        .skip(a)
                        .map(|(m, &coef)| coef * binom(m, a) * xi0.powu((m - a) as u32))
                        .sum();
                    j.set_coeff(a, 0, c);
                }
                j
            })
            .collect();
        JetVector::new(comps).expect("uniform order")
    }

    /// The curve ξ ↦ f₀(ξ + shift).
    pub fn translate(&self, shift: C64) -> Self {
        let components = self
            .components
            .iter()
            .map(|poly| {
                (0..poly.len())
                    .map(|a| {
                        poly.iter()
                            .enumerate()
                            .skip(a)
                            .map(|(m, &coef)| coef * binom(m, a) * shift.powu((m - a) as u32))
                            .sum()
                    })
                    .collect()
            })
            .collect();
        Self { components }
    }
}

fn falling(p: usize, m: usize) -> f64 {
    (0..m).map(|i| (p - i) as f64).product()
}

/// A vector of polynomials in both ξ and ξ̄, used for non-holomorphic seeds.
///
/// Each component is a list of `((a, b), c)` terms meaning `c·ξ^a ξ̄^b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyField {
    components: Vec<Vec<((usize, usize), C64)>>,
}

impl PolyField {
    pub fn new(components: Vec<Vec<((usize, usize), C64)>>) -> Result<Self> {
        check_dim(components.len())?;
        Ok(Self { components })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn eval(&self, xi: C64) -> Vec<C64> {
        self.components
            .iter()
            .map(|terms| terms.iter().map(|&((a, b), c)| c * xi.powu(a as u32) * xi.conj().powu(b as u32)).sum())
            .collect()
    }

    pub fn jet_at(&self, xi0: C64, order: usize) -> JetVector {
        let xi = Jet2Scalar::seed(xi0, Var::Xi, order);
        let xib = Jet2Scalar::seed(xi0.conj(), Var::XiBar, order);
        let pow = |base: &Jet2Scalar, e: usize| (0..e).fold(Jet2Scalar::constant(ONE, order), |acc, _| &acc * base);
        let comps = self
            .components
            .iter()
            .map(|terms| {
                terms
                    .iter()
                    .fold(Jet2Scalar::zero(order), |acc, &((a, b), c)| &acc + &(&pow(&xi, a) * &pow(&xib, b)).scale(c))
            })
            .collect();
        JetVector::new(comps).expect("uniform order")
    }
}

impl From<&HolomorphicCurve> for PolyField {
    fn from(curve: &HolomorphicCurve) -> Self {
        let components =
            curve.components.iter().map(|poly| poly.iter().enumerate().map(|(m, &c)| ((m, 0), c)).collect()).collect();
        Self { components }
    }
}

/// `(I − P)·∂f`
pub fn raise(f: &JetVector, p: &Jet2Matrix) -> Result<JetVector> {
    let df = f.d_xi()?;
    orth_complement(&df, p)
}

/// `(I − P)·∂̄f`
pub fn lower(f: &JetVector, p: &Jet2Matrix) -> Result<JetVector> {
    let df = f.d_xibar()?;
    orth_complement(&df, p)
}

fn orth_complement(g: &JetVector, p: &Jet2Matrix) -> Result<JetVector> {
    let p = p.truncate(g.order().min(p.order()));
    let g = g.truncate(p.order());
    g.try_sub(&p.apply(&g)?)
}

/// One step of the recurrence without forming P: `g − f·(f†g)/(f†f)`.
fn raise_fast(f: &JetVector, recip_norm2: &Jet2Scalar) -> Result<JetVector> {
    let g = f.d_xi()?;
    let d = g.order();
    let f = f.truncate(d);
    let coef = f.inner(&g)?.try_mul(&recip_norm2.truncate(d))?;
    g.try_sub(&f.scale_jet(&coef)?)
}

/// The jets of P₀..P_{N−1} at one base point.
#[derive(Clone, Debug)]
pub struct ProjectorChain {
    base_point: C64,
    projs: Vec<Jet2Matrix>,
    c: Vec<f64>,
}

/// Residuals of the five projector axioms, maximised over the chain.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AxiomResiduals {
    pub idempotent: f64,
    pub hermitian: f64,
    pub trace: f64,
    pub orthogonal: f64,
    pub complete: f64,
}

impl AxiomResiduals {
    pub fn max(&self) -> f64 {
        [self.idempotent, self.hermitian, self.trace, self.orthogonal, self.complete].into_iter().fold(0.0, f64::max)
    }
}

impl ProjectorChain {
    /// Build the chain by iterating `f_{k+1} = (I − P_k)∂f_k` from the curve.
    pub fn build(curve: &HolomorphicCurve, xi0: C64, order: usize) -> Result<Self> {
        if order < 1 {
            return Err(Error::InvalidParameter("chain jet order must be at least 1".into()));
        }
        if !xi0.re.is_finite() || !xi0.im.is_finite() {
            return Err(Error::NonFinite);
        }
        let n = curve.dim();
        let (projs, tail) = walk(curve, xi0, order, n)?;
        if projs.len() < n {
            return Err(Error::NotFullRank(projs.len()));
        }
        let (f_n, scale) = tail.expect("full chain has a tail");
        let rel = f_n / scale.max(1.0);
        if rel > TERMINATION_TOL {
            return Err(Error::NonTerminating(rel));
        }
        Ok(Self { base_point: xi0, projs, c: (0..n).map(|k| c_k(k, n)).collect() })
    }

    /// Chain of constant coordinate projectors `P_k = E_kk`.
    pub fn constant(n: usize, order: usize) -> Result<Self> {
        check_dim(n)?;
        let projs = (0..n).map(|k| Jet2Matrix::constant(&CMatrix::unit(n, k, k), order)).collect();
        Ok(Self { base_point: ZERO, projs, c: (0..n).map(|k| c_k(k, n)).collect() })
    }

    /// Wrap externally built projector jets (no solution check).
    pub fn from_projectors(base_point: C64, projs: Vec<Jet2Matrix>) -> Result<Self> {
        let n = projs.len();
        check_dim(n)?;
        let order = projs.iter().map(Jet2Matrix::order).min().unwrap_or(0);
        if let Some(p) = projs.iter().find(|p| p.dim() != n) {
            return Err(Error::DimensionMismatch(n, p.dim()));
        }
        let projs = projs.iter().map(|p| p.truncate(order)).collect();
        Ok(Self { base_point, projs, c: (0..n).map(|k| c_k(k, n)).collect() })
    }

    pub fn dim(&self) -> usize {
        self.projs.len()
    }

    pub fn base_point(&self) -> C64 {
        self.base_point
    }

    pub fn order(&self) -> usize {
        self.projs[0].order()
    }

    pub fn c(&self, k: usize) -> f64 {
        self.c[k]
    }

    pub fn projector(&self, k: usize) -> &Jet2Matrix {
        &self.projs[k]
    }

    pub fn projectors(&self) -> &[Jet2Matrix] {
        &self.projs
    }

    pub fn check_sheet(&self, k: usize) -> Result<()> {
        if k < self.dim() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("sheet {k} out of range 0..{}", self.dim())))
        }
    }

    /// Σ_{j<k} P_j as a jet.
    pub fn lower_sum(&self, k: usize) -> Jet2Matrix {
        self.projs[..k].iter().fold(Jet2Matrix::zero(self.dim(), self.order()), |acc, p| &acc + p)
    }

    pub fn axiom_residuals(&self) -> AxiomResiduals {
        let n = self.dim();
        let vals: Vec<&CMatrix> = self.projs.iter().map(Jet2Matrix::value).collect();
        let mut r = AxiomResiduals::default();
        let mut sum = CMatrix::zeros(n);
        for (k, p) in vals.iter().enumerate() {
            r.idempotent = r.idempotent.max(rel_residual(&(*p * *p), p));
            r.hermitian = r.hermitian.max(rel_residual(&p.dagger(), p));
            r.trace = r.trace.max((p.trace() - ONE).norm());
            for (l, q) in vals.iter().enumerate() {
                let expect = if l == k { (*p).clone() } else { CMatrix::zeros(n) };
                r.orthogonal = r.orthogonal.max(rel_residual(&(*q * *p), &expect));
            }
            sum += p;
        }
        r.complete = rel_residual(&sum, &CMatrix::identity(n));
        r
    }

    pub fn el_residual(&self, k: usize) -> Result<f64> {
        self.check_sheet(k)?;
        el_residual(&self.projs[k])
    }

    pub fn conservation_residual(&self, k: usize) -> Result<f64> {
        self.check_sheet(k)?;
        conservation_residual(&self.projs[k])
    }

    pub fn lagrangian_density(&self, k: usize) -> Result<f64> {
        self.check_sheet(k)?;
        lagrangian_density(&self.projs[k])
    }
}

type Walk = (Vec<Jet2Matrix>, Option<(f64, f64)>);

/// Run the recurrence, stopping early at the first vanishing f_k.
///
/// Returns the projector jets built so far and, when all N were built,
/// `(‖f_N‖, ‖∂f_{N−1}‖)` at the base point.
fn walk(curve: &HolomorphicCurve, xi0: C64, order: usize, n: usize) -> Result<Walk> {
    let mut f = curve.jet_at(xi0, order + n - 1);
    let norm0 = f.value_norm().powi(2);
    let mut projs = Vec::with_capacity(n);
    for k in 0..n {
        let norm2 = f.inner(&f)?;
        let v = norm2.value().norm();
        if k == 0 && v <= RECIP_EPS {
            return Err(Error::SingularNormalization(v));
        }
        if k > 0 && v <= RECIP_EPS * norm0.max(1.0) {
            return Ok((projs, None));
        }
        let recip = norm2.reciprocal()?;
        let p = f.outer(&f)?.scale_jet(&recip)?;
        projs.push(p.truncate(order));
        let next = raise_fast(&f, &recip)?;
        if k + 1 == n {
            let scale = f.d_xi()?.value_norm();
            return Ok((projs, Some((next.value_norm(), scale))));
        }
        f = next;
    }
    unreachable!("loop returns on the last sheet")
}

/// Projector jets up to the first vanishing f_k, for curves that are not full rank.
pub fn partial_chain(curve: &HolomorphicCurve, xi0: C64, order: usize) -> Result<Vec<Jet2Matrix>> {
    walk(curve, xi0, order, curve.dim()).map(|(projs, _)| projs)
}

fn need_order(p: &Jet2Matrix, d: usize) -> Result<()> {
    if p.order() < d {
        Err(Error::DerivativeOrder { requested: d, order: p.order() })
    } else {
        Ok(())
    }
}

/// ‖[∂∂̄P, P]‖_F at the base point.
pub fn el_residual(p: &Jet2Matrix) -> Result<f64> {
    need_order(p, 2)?;
    Ok(comm(&p.derivative(1, 1)?, p.value()).norm_fro())
}

/// ‖∂[∂̄P, P] + ∂̄[∂P, P]‖_F at the base point, with both brackets built as jets.
pub fn conservation_residual(p: &Jet2Matrix) -> Result<f64> {
    need_order(p, 2)?;
    let p1 = p.truncate(p.order() - 1);
    let a = p.d_xibar()?.commutator(&p1)?;
    let b = p.d_xi()?.commutator(&p1)?;
    let s = &a.d_xi()?.derivative(0, 0)? + &b.d_xibar()?.derivative(0, 0)?;
    Ok(s.norm_fro())
}

/// `tr(∂P·∂̄P)`, real and nonnegative for projector fields.
pub fn lagrangian_density(p: &Jet2Matrix) -> Result<f64> {
    need_order(p, 1)?;
    Ok((&p.derivative(1, 0)? * &p.derivative(0, 1)?).trace().re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::projector_from_vector;
    use crate::linalg::I;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn veronese_components() {
        let v2 = HolomorphicCurve::veronese(2).unwrap();
        assert_eq!(v2.components(), &[vec![ONE], vec![ZERO, ONE]]);
        let v3 = HolomorphicCurve::veronese(3).unwrap();
        assert_eq!(v3.eval(c(2.0, 0.0)), vec![ONE, c(2.0 * 2f64.sqrt(), 0.0), c(4.0, 0.0)]);
        assert!(matches!(HolomorphicCurve::veronese(1), Err(Error::UnsupportedDimension(1))));
    }

    #[test]
    fn raise_lower_examples() {
        let curve = HolomorphicCurve::veronese(2).unwrap();
        let f0 = curve.jet_at(ZERO, 3);
        let p0 = projector_from_vector(&f0).unwrap();
        let f1 = raise(&f0, &p0).unwrap();
        assert!((f1.value()[0] - ZERO).norm() < 1e-15);
        assert!((f1.value()[1] - ONE).norm() < 1e-15);

        let down = lower(&f0, &p0).unwrap();
        assert!(down.value_norm() < 1e-15);

        let xi0 = c(0.7, -0.4);
        let f0 = HolomorphicCurve::veronese(4).unwrap().jet_at(xi0, 3);
        let p0 = projector_from_vector(&f0).unwrap();
        let f1 = raise(&f0, &p0).unwrap();
        let dot: C64 = f0.value().iter().zip(f1.value()).map(|(a, b)| a.conj() * b).sum();
        assert!(dot.norm() < 1e-12);
    }

    #[test]
    fn n2_chain_at_one() {
        let chain = ProjectorChain::build(&HolomorphicCurve::veronese(2).unwrap(), ONE, 3).unwrap();
        let p0 = CMatrix::from_fn(2, |_, _| c(0.5, 0.0));
        let p1 = CMatrix::from_fn(2, |i, j| c(if i == j { 0.5 } else { -0.5 }, 0.0));
        assert!(chain.projector(0).value().max_abs_diff(&p0) < 1e-15);
        assert!(chain.projector(1).value().max_abs_diff(&p1) < 1e-15);
    }

    #[test]
    fn chain_axioms_for_several_n() {
        for n in 2..=6 {
            let curve = HolomorphicCurve::veronese(n).unwrap();
            for xi in [ZERO, ONE, I, c(1.0, 1.0), c(-1.3, 0.4)] {
                let chain = ProjectorChain::build(&curve, xi, 3).unwrap();
                assert!(chain.axiom_residuals().max() < 1e-12, "n={n} xi={xi}");
                for k in 0..n {
                    assert!(chain.el_residual(k).unwrap() < 1e-10);
                    assert!(chain.conservation_residual(k).unwrap() < 2e-10);
                }
            }
        }
    }

    #[test]
    fn constant_chain_is_trivial() {
        let chain = ProjectorChain::constant(3, 3).unwrap();
        for k in 0..3 {
            assert_eq!(chain.el_residual(k).unwrap(), 0.0);
            assert_eq!(chain.conservation_residual(k).unwrap(), 0.0);
            assert_eq!(chain.lagrangian_density(k).unwrap(), 0.0);
        }
    }

    #[test]
    fn lagrangian_density_values() {
        let curve = HolomorphicCurve::veronese(2).unwrap();
        let chain = ProjectorChain::build(&curve, ZERO, 3).unwrap();
        assert!((chain.lagrangian_density(0).unwrap() - 1.0).abs() < 1e-14);

        let shift = c(0.3, -0.8);
        let moved = curve.translate(shift);
        let xi = c(-0.2, 0.5);
        let a = ProjectorChain::build(&curve, xi + shift, 3).unwrap();
        let b = ProjectorChain::build(&moved, xi, 3).unwrap();
        for k in 0..2 {
            let (la, lb) = (a.lagrangian_density(k).unwrap(), b.lagrangian_density(k).unwrap());
            assert!((la - lb).abs() < 1e-12);
        }
    }

    #[test]
    fn errors_are_classified() {
        let flat = HolomorphicCurve::new(vec![vec![ZERO, ONE], vec![ZERO, ZERO, ONE]]).unwrap();
        assert!(matches!(ProjectorChain::build(&flat, ZERO, 3), Err(Error::SingularNormalization(_))));

        let deficient = HolomorphicCurve::new(vec![vec![ONE], vec![ZERO, ONE], vec![ZERO]]).unwrap();
        assert_eq!(ProjectorChain::build(&deficient, c(0.2, 0.1), 3).unwrap_err(), Error::NotFullRank(2));
        assert_eq!(partial_chain(&deficient, c(0.2, 0.1), 3).unwrap().len(), 2);

        assert!(HolomorphicCurve::new(vec![vec![ZERO], vec![ZERO]]).is_err());
    }

    #[test]
    fn antiholomorphic_seed_is_still_harmonic() {
        // (1, ξ̄) is the conjugate of an instanton, hence itself a solution.
        let seed = PolyField::new(vec![vec![((0, 0), ONE)], vec![((0, 1), ONE)]]).unwrap();
        let p = projector_from_vector(&seed.jet_at(c(0.4, 0.9), 3)).unwrap();
        assert!(el_residual(&p).unwrap() < 1e-12);

        let mixed = PolyField::new(vec![vec![((0, 0), ONE)], vec![((1, 0), ONE)], vec![((0, 1), ONE)]]).unwrap();
        let p = projector_from_vector(&mixed.jet_at(c(0.4, 0.9), 3)).unwrap();
        assert!(el_residual(&p).unwrap() > 1e-3);
    }
}
