//! The generalized Weierstrass immersion X_k and its algebraic properties.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::chain::{c_k, ProjectorChain};
use crate::error::{Error, Result};
use crate::jet::Jet2Matrix;
use crate::linalg::{check_dim, comm, matrix_poly_residual, rel_residual, CMatrix, SuElement, C64, I, ONE};

/// Longest word accepted by [`property_word_check`].
pub const MAX_WORD_LEN: usize = 8;

/// Structural tolerance used when wrapping computed surfaces as su(N) elements.
const SURFACE_SU_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurfaceSample {
    pub k: usize,
    pub base_point: C64,
    pub x: CMatrix,
    pub dx: CMatrix,
    pub dbx: CMatrix,
    pub d2x: CMatrix,
    pub dbdx: CMatrix,
    pub db2x: CMatrix,
}

impl SurfaceSample {
    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    pub fn c(&self) -> f64 {
        c_k(self.k, self.dim())
    }

    pub fn su(&self) -> Result<SuElement> {
        SuElement::with_tolerance(self.x.clone(), SURFACE_SU_TOL)
    }

    /// ‖(∂X)† + ∂̄X‖, zero for a real immersion.
    pub fn reality_residual(&self) -> f64 {
        (&self.dx.dagger() + &self.dbx).norm_fro()
    }
}

/// X_k = i c_k I − i P_k − 2i Σ_{j<k} P_j as a jet.
pub fn weierstrass_jet(chain: &ProjectorChain, k: usize) -> Result<Jet2Matrix> {
    chain.check_sheet(k)?;
    let n = chain.dim();
    let d = chain.order();
    let inner = &chain.projector(k).scale_re(-1.0) - &chain.lower_sum(k).scale_re(2.0);
    let ic = Jet2Matrix::constant(&CMatrix::scalar(n, I * chain.c(k)), d);
    Ok(&ic + &inner.scale(I))
}

pub fn weierstrass_surface(chain: &ProjectorChain, k: usize) -> Result<SurfaceSample> {
    let x = weierstrass_jet(chain, k)?;
    if x.order() < 2 {
        return Err(Error::DerivativeOrder { requested: 2, order: x.order() });
    }
    let sample = SurfaceSample {
        k,
        base_point: chain.base_point(),
        x: x.value().clone(),
        dx: x.derivative(1, 0)?,
        dbx: x.derivative(0, 1)?,
        d2x: x.derivative(2, 0)?,
        dbdx: x.derivative(1, 1)?,
        db2x: x.derivative(0, 2)?,
    };
    sample.su()?;
    Ok(sample)
}

fn check_sheet(k: usize, n: usize) -> Result<()> {
    check_dim(n)?;
    if k < n {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("sheet {k} out of range 0..{n}")))
    }
}

/// Roots of the minimal polynomial of X_k.
///
/// Mixed sheets get the cubic {ic, i(c−1), i(c−2)}; the holomorphic sheet
/// the first two and the anti-holomorphic sheet the last two.
pub fn minimal_poly_roots(k: usize, n: usize) -> Result<Vec<C64>> {
    check_sheet(k, n)?;
    let c = c_k(k, n);
    let all = [I * c, I * (c - 1.0), I * (c - 2.0)];
    Ok(if k == 0 {
        all[..2].to_vec()
    } else if k == n - 1 {
        all[1..].to_vec()
    } else {
        all.to_vec()
    })
}

/// The anti-holomorphic constraint roots with the printed sign convention,
/// {−i c_{N−1}, −i(c_{N−1} − 1)}. These do not annihilate X_{N−1}; kept for
/// side-by-side reporting.
pub fn printed_antiholomorphic_roots(n: usize) -> Result<Vec<C64>> {
    check_dim(n)?;
    let c = c_k(n - 1, n);
    Ok(vec![-I * c, -I * (c - 1.0)])
}

/// P_k = X_k² − 2i(c_k − 1)X_k − c_k(c_k − 2)I.
pub fn projector_from_surface(x: &SuElement, k: usize, n: usize) -> Result<CMatrix> {
    check_sheet(k, n)?;
    let m = x.matrix();
    if m.dim() != n {
        return Err(Error::DimensionMismatch(n, m.dim()));
    }
    let res = matrix_poly_residual(m, &minimal_poly_roots(k, n)?);
    if res > 1e-8 {
        return Err(Error::NotSurfacePoint(res));
    }
    let c = c_k(k, n);
    let p = &(m * m) - &m.scale(I * (2.0 * (c - 1.0)));
    Ok(p.shift(C64::new(c * (c - 2.0), 0.0)))
}

#[derive(Clone, Debug)]
pub struct TangentPair {
    /// From derivatives of the closed form: −i∂P_k − 2iΣ_{j<k}∂P_j.
    pub via_sum: (CMatrix, CMatrix),
    /// From the conservation-law one-form: −i[∂P_k, P_k], i[∂̄P_k, P_k].
    pub via_commutator: (CMatrix, CMatrix),
}

impl TangentPair {
    pub fn residual(&self) -> f64 {
        rel_residual(&self.via_sum.0, &self.via_commutator.0).max(rel_residual(&self.via_sum.1, &self.via_commutator.1))
    }
}

pub fn tangents_two_ways(chain: &ProjectorChain, k: usize) -> Result<TangentPair> {
    chain.check_sheet(k)?;
    let p = chain.projector(k);
    let low = chain.lower_sum(k);
    let (dp, dbp) = (p.derivative(1, 0)?, p.derivative(0, 1)?);
    let sum = |dp: &CMatrix, dlow: &CMatrix| (dp + &dlow.scale_re(2.0)).scale(-I);
    let via_sum = (sum(&dp, &low.derivative(1, 0)?), sum(&dbp, &low.derivative(0, 1)?));
    let via_commutator = (comm(&dp, p.value()).scale(-I), comm(&dbp, p.value()).scale(I));
    Ok(TangentPair { via_sum, via_commutator })
}

/// ‖Σ(−1)^k X_k‖ and ‖Σ X_k − 2i Σ (k − (N−1)/2) P_k‖.
pub fn linear_dependence_check(samples: &[SurfaceSample], chain: &ProjectorChain) -> Result<(f64, f64)> {
    let n = chain.dim();
    if samples.len() != n {
        return Err(Error::DimensionMismatch(n, samples.len()));
    }
    let mut alt = CMatrix::zeros(n);
    let mut sum = CMatrix::zeros(n);
    let mut rhs = CMatrix::zeros(n);
    for (k, s) in samples.iter().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        alt += &s.x.scale_re(sign);
        sum += &s.x;
        let w = k as f64 - (n as f64 - 1.0) / 2.0;
        rhs += &chain.projector(k).value().scale(I * (2.0 * w));
    }
    Ok((alt.norm_fro(), rel_residual(&sum, &rhs)))
}

/// (X_k, X_m) from the closed forms; symmetric in k and m.
pub fn killing_closed_form(k: usize, m: usize, n: usize) -> Result<f64> {
    check_sheet(k, n)?;
    check_sheet(m, n)?;
    let (k, m) = if m < k { (m, k) } else { (k, m) };
    let nf = n as f64;
    let (ck, cm) = (c_k(k, n), c_k(m, n));
    Ok(if m > k { nf * ck * (2.0 - cm) / 2.0 } else { nf * ck * (2.0 - ck) / 2.0 - 0.5 })
}

/// ‖[∂∂̄X_k, X_k]‖
pub fn surface_el_residual(s: &SurfaceSample) -> f64 {
    comm(&s.dbdx, &s.x).norm_fro()
}

/// ‖∂X − i[∂X, X]‖ and ‖∂̄X + i[∂̄X, X]‖
pub fn tangent_self_identity(s: &SurfaceSample) -> (f64, f64) {
    let a = &s.dx - &comm(&s.dx, &s.x).scale(I);
    let b = &s.dbx + &comm(&s.dbx, &s.x).scale(I);
    (a.norm_fro(), b.norm_fro())
}

/// Letters for words in X_k and its derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum XLetter {
    X,
    D,
    Db,
    DD,
    DDb,
    DbDb,
}

impl XLetter {
    fn matrix<'a>(&self, s: &'a SurfaceSample) -> &'a CMatrix {
        match self {
            XLetter::X => &s.x,
            XLetter::D => &s.dx,
            XLetter::Db => &s.dbx,
            XLetter::DD => &s.d2x,
            XLetter::DDb => &s.dbdx,
            XLetter::DbDb => &s.db2x,
        }
    }

    fn token(&self) -> &'static str {
        match self {
            XLetter::X => "X",
            XLetter::D => "D",
            XLetter::Db => "Db",
            XLetter::DD => "DD",
            XLetter::DDb => "DDb",
            XLetter::DbDb => "DbDb",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct XWord(pub Vec<XLetter>);

impl XWord {
    pub fn eval(&self, s: &SurfaceSample) -> CMatrix {
        self.0.iter().fold(CMatrix::identity(s.dim()), |acc, l| &acc * l.matrix(s))
    }

    /// Number of ∂X and ∂̄X letters.
    pub fn counts(&self) -> (usize, usize) {
        let d = self.0.iter().filter(|&&l| l == XLetter::D).count();
        let db = self.0.iter().filter(|&&l| l == XLetter::Db).count();
        (d, db)
    }

    fn first_order_only(&self) -> bool {
        self.0.iter().all(|l| matches!(l, XLetter::X | XLetter::D | XLetter::Db))
    }
}

impl fmt::Display for XWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.0.iter().map(XLetter::token).collect();
        write!(f, "{}", parts.join("."))
    }
}

impl FromStr for XWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .split(['.', ',', ' '])
            .filter(|t| !t.is_empty())
            .map(|t| match t {
                "X" => Ok(XLetter::X),
                "D" => Ok(XLetter::D),
                "Db" => Ok(XLetter::Db),
                "DD" => Ok(XLetter::DD),
                "DDb" => Ok(XLetter::DDb),
                "DbDb" => Ok(XLetter::DbDb),
                other => Err(Error::MalformedWord(format!("unknown letter {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(Error::MalformedWord("empty word".into()));
        }
        Ok(XWord(letters))
    }
}

/// First-derivative letter used by the closed-form power identities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Deriv {
    D,
    Db,
}

/// What a word is claimed to satisfy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum PropertyWord {
    /// The product vanishes.
    Product(XWord),
    /// The trace vanishes.
    Trace(XWord),
    /// `tr(lhs) = factor·tr(rhs)`.
    TraceEq(XWord, C64, XWord),
    /// `X·W = W·(X + i(M − M̄)I)`, M and M̄ counting ∂X and ∂̄X letters.
    Shift(XWord),
    /// `d·d·X^n = (x_d)^n d·d`, with x_∂ = i(c−2) and x_∂̄ = ic.
    IdenticalPower { letter: Deriv, n: u32 },
    /// Closed form of `(∂X·∂̄X)^m X^n` (letter D) or `(∂̄X·∂X)^m X^n` (letter Db).
    Mixed { first: Deriv, m: u32, n: u32 },
}

fn check_len(w: &XWord) -> Result<()> {
    if w.0.len() > MAX_WORD_LEN {
        Err(Error::MalformedWord(format!("word longer than {MAX_WORD_LEN}: {w}")))
    } else {
        Ok(())
    }
}

/// Residual of one property statement at a sample.
pub fn property_word_check(s: &SurfaceSample, spec: &PropertyWord) -> Result<f64> {
    let c = s.c();
    let x = &s.x;
    let (alpha, beta, gamma) = (I * (c - 1.0), I * c, I * (c - 2.0));
    match spec {
        PropertyWord::Product(w) => {
            check_len(w)?;
            Ok(w.eval(s).norm_fro())
        }
        PropertyWord::Trace(w) => {
            check_len(w)?;
            Ok(w.eval(s).trace().norm())
        }
        PropertyWord::TraceEq(a, f, b) => {
            check_len(a)?;
            check_len(b)?;
            let rhs = b.eval(s).trace() * f;
            Ok((a.eval(s).trace() - rhs).norm() / rhs.norm().max(1.0))
        }
        PropertyWord::Shift(w) => {
            check_len(w)?;
            if !w.first_order_only() {
                return Err(Error::MalformedWord(format!("shift identity takes X, D, Db only: {w}")));
            }
            let (m, mb) = w.counts();
            let wm = w.eval(s);
            let shifted = x.shift(-I * (m as f64 - mb as f64));
            Ok(rel_residual(&(x * &wm), &(&wm * &shifted)))
        }
        PropertyWord::IdenticalPower { letter, n } => {
            if *n == 0 {
                return Err(Error::MalformedWord("power must be positive".into()));
            }
            let (dm, eig) = match letter {
                Deriv::D => (&s.dx, gamma),
                Deriv::Db => (&s.dbx, beta),
            };
            let dd = dm * dm;
            Ok(rel_residual(&(&dd * &x.pow(*n)), &dd.scale(eig.powu(*n))))
        }
        PropertyWord::Mixed { first, m, n } => {
            if *m == 0 {
                return Err(Error::MalformedWord("mixed identity needs m ≥ 1".into()));
            }
            let (pair, other) = match first {
                Deriv::D => (&s.dx * &s.dbx, beta),
                Deriv::Db => (&s.dbx * &s.dx, gamma),
            };
            let w = pair.pow(*m);
            let an = alpha.powu(*n);
            let on = other.powu(*n);
            let lhs = &w * &x.pow(*n);
            let bracket = &(&w * &x.pow(2)) - &(&w * x).scale(alpha * 2.0);
            let rhs = &bracket.scale(an - on) + &w.scale(on + I * c * gamma * (an - on));
            Ok(rel_residual(&lhs, &rhs))
        }
    }
}

/// Every X_k has spectrum inside the minimal-polynomial root set.
pub fn spectrum_containment(s: &SurfaceSample) -> Result<f64> {
    let roots = minimal_poly_roots(s.k, s.dim())?;
    let herm = s.x.scale(I);
    let eig = crate::linalg::hermitian_eigenvalues(&herm)?;
    // eigenvalue μ of iX ⇔ eigenvalue −iμ of X
    Ok(eig
        .iter()
        .map(|&mu| {
            let lam = -I * mu;
            roots.iter().map(|r| (lam - r).norm()).fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max))
}

/// `tr(X_k²) − (1 + N c_k(c_k − 2))`
pub fn trace_square_residual(s: &SurfaceSample) -> f64 {
    let n = s.dim() as f64;
    let c = s.c();
    ((&s.x * &s.x).trace() - ONE * (1.0 + n * c * (c - 2.0))).norm()
}
