//! Dense complex matrices and the su(N) predicates used by every other module.
//!
//! Matrices are small (N ≤ 12 for models, up to 2N for block constructions)
//! so everything is stored row-major in a flat `Vec` and multiplied naively.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const I: C64 = C64::new(0.0, 1.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);

/// Smallest and largest model dimension accepted by checked constructors.
pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 12;

/// Default tolerance for structural su(N) predicates (Frobenius norm).
pub const TOL_SU: f64 = 1e-10;

/// Default bound on the 1-norm of a matrix-exponential argument.
pub const EXP_NORM_BOUND: f64 = 700.0;

pub fn check_dim(n: usize) -> Result<()> {
    if (MIN_DIM..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(n))
    }
}

#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix")]
pub struct CMatrix {
    n: usize,
    data: Vec<C64>,
}

#[derive(Deserialize)]
struct RawMatrix {
    n: usize,
    data: Vec<C64>,
}

impl TryFrom<RawMatrix> for CMatrix {
    type Error = Error;
    fn try_from(raw: RawMatrix) -> Result<Self> {
        if raw.data.len() != raw.n * raw.n {
            return Err(Error::DimensionMismatch(raw.n * raw.n, raw.data.len()));
        }
        let m = CMatrix { n: raw.n, data: raw.data };
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(m)
    }
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, ONE)
    }

    pub fn scalar(n: usize, s: C64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = s;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, |i, j| if i == j { entries[i] } else { ZERO })
    }

    pub fn real_diag(entries: &[f64]) -> Self {
        let c: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diag(&c)
    }

    /// Checked constructor: square, finite, dimension in `2..=12`.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        check_dim(n)?;
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch(n, row.len()));
            }
            data.extend_from_slice(row);
        }
        let m = Self { n, data };
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(m)
    }

    /// Rank-one matrix `u ⊗ v†`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        assert_eq!(u.len(), v.len());
        Self::from_fn(u.len(), |i, j| u[i] * v[j].conj())
    }

    /// `e_i e_j†`
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n);
        m[(i, j)] = ONE;
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.n).map(|j| (0..self.n).map(|i| self[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.n);
        (0..self.n).map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum()).collect()
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::identity(self.n);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `self - s·I`
    pub fn shift(&self, s: C64) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m[(i, i)] -= s;
        }
        m
    }

    /// Embed `[[a, b], [0, a]]`, used for Fréchet derivatives of matrix functions.
    pub fn block_upper(a: &Self, b: &Self) -> Self {
        let n = a.n;
        Self::from_fn(2 * n, |i, j| match (i < n, j < n) {
            (true, true) => a[(i, j)],
            (true, false) => b[(i, j - n)],
            (false, false) => a[(i - n, j - n)],
            (false, true) => ZERO,
        })
    }

    /// Extract the `n×n` block at (`row`, `col`) block offset.
    pub fn block(&self, n: usize, row: usize, col: usize) -> Self {
        Self::from_fn(n, |i, j| self[(row * n + i, col * n + j)])
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{}) [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for j in 0..self.n {
                let z = self[(i, j)];
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<'a> Add<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        CMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl<'a> Sub<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        CMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl<'a> Mul<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl Add for CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: CMatrix) -> CMatrix {
        &self + &rhs
    }
}

impl Sub for CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: CMatrix) -> CMatrix {
        &self - &rhs
    }
}

impl Mul for CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: CMatrix) -> CMatrix {
        &self * &rhs
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale_re(-1.0)
    }
}

impl Neg for CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale_re(-1.0)
    }
}

impl AddAssign<&CMatrix> for CMatrix {
    fn add_assign(&mut self, rhs: &CMatrix) {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&CMatrix> for CMatrix {
    fn sub_assign(&mut self, rhs: &CMatrix) {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

impl Mul<C64> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, s: C64) -> CMatrix {
        self.scale(s)
    }
}

impl Mul<f64> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, s: f64) -> CMatrix {
        self.scale_re(s)
    }
}

pub fn dagger(a: &CMatrix) -> CMatrix {
    a.dagger()
}

fn same_dim(a: &CMatrix, b: &CMatrix) -> Result<()> {
    if a.dim() == b.dim() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(a.dim(), b.dim()))
    }
}

/// `ab − ba`
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    same_dim(a, b)?;
    Ok(comm(a, b))
}

/// `ab + ba`
pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    same_dim(a, b)?;
    Ok(anticomm(a, b))
}

/// Unchecked commutator for internal use where dimensions are known to agree.
pub(crate) fn comm(a: &CMatrix, b: &CMatrix) -> CMatrix {
    &(a * b) - &(b * a)
}

pub(crate) fn anticomm(a: &CMatrix, b: &CMatrix) -> CMatrix {
    &(a * b) + &(b * a)
}

/// Product of a sequence of matrices, left to right.
pub fn product<'a>(n: usize, factors: impl IntoIterator<Item = &'a CMatrix>) -> CMatrix {
    factors.into_iter().fold(CMatrix::identity(n), |acc, m| &acc * m)
}

/// `‖lhs − rhs‖_F / max(1, ‖rhs‖_F)`
pub fn rel_residual(lhs: &CMatrix, rhs: &CMatrix) -> f64 {
    (lhs - rhs).norm_fro() / rhs.norm_fro().max(1.0)
}

/// An element of su(N): anti-Hermitian and traceless within a tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct SuElement {
    m: CMatrix,
}

impl SuElement {
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_tolerance(m, TOL_SU)
    }

    pub fn with_tolerance(m: CMatrix, tol: f64) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        let herm = (&m + &m.dagger()).norm_fro();
        if herm > tol * m.norm_fro().max(1.0) {
            return Err(Error::NotSu(format!("‖m + m†‖ = {herm:e}")));
        }
        let tr = m.trace().norm();
        if tr > tol * m.norm_fro().max(1.0) {
            return Err(Error::NotSu(format!("|tr m| = {tr:e}")));
        }
        Ok(Self { m })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }
}

/// Killing inner product `(a, b) = −½ Re tr(ab)` on su(N).
pub fn killing_inner(a: &SuElement, b: &SuElement) -> Result<f64> {
    same_dim(&a.m, &b.m)?;
    let t = (&a.m * &b.m).trace();
    let scale = a.m.norm_fro() * b.m.norm_fro();
    if t.im.abs() > TOL_SU * scale.max(1.0) {
        return Err(Error::NotSu(format!("Im tr(ab) = {:e}", t.im)));
    }
    Ok(-0.5 * t.re)
}

/// Frobenius norm of `∏_j (x − r_j I)`.
pub fn matrix_poly_residual(x: &CMatrix, roots: &[C64]) -> f64 {
    roots.iter().fold(CMatrix::identity(x.dim()), |acc, &r| &acc * &x.shift(r)).norm_fro()
}

/// Solve `A X = B` by LU with partial pivoting.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    same_dim(a, b)?;
    let n = a.dim();
    let mut lu = a.clone();
    let mut x = b.clone();
    let scale = a.norm_one().max(f64::MIN_POSITIVE);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| lu[(i, col)].norm().total_cmp(&lu[(j, col)].norm())).unwrap();
        if lu[(pivot, col)].norm() <= 1e-300_f64.max(scale * f64::EPSILON * 1e-3) {
            return Err(Error::Singular);
        }
        if pivot != col {
            for j in 0..n {
                let t = lu[(col, j)];
                lu[(col, j)] = lu[(pivot, j)];
                lu[(pivot, j)] = t;
                let t = x[(col, j)];
                x[(col, j)] = x[(pivot, j)];
                x[(pivot, j)] = t;
            }
        }
        let inv = ONE / lu[(col, col)];
        for row in col + 1..n {
            let f = lu[(row, col)] * inv;
            if f == ZERO {
                continue;
            }
            lu[(row, col)] = f;
            for j in col + 1..n {
                let v = lu[(col, j)];
                lu[(row, j)] -= f * v;
            }
            for j in 0..n {
                let v = x[(col, j)];
                x[(row, j)] -= f * v;
            }
        }
    }
    for col in (0..n).rev() {
        let inv = ONE / lu[(col, col)];
        for j in 0..n {
            let mut s = x[(col, j)];
            for k in col + 1..n {
                s -= lu[(col, k)] * x[(k, j)];
            }
            x[(col, j)] = s * inv;
        }
    }
    Ok(x)
}

pub fn inverse(a: &CMatrix) -> Result<CMatrix> {
    solve(a, &CMatrix::identity(a.dim()))
}

// Padé [13/13] coefficients for exp (Higham 2005).
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with a degree-13 Padé approximant.
pub fn matrix_exp(a: &CMatrix) -> Result<CMatrix> {
    matrix_exp_bounded(a, EXP_NORM_BOUND)
}

pub fn matrix_exp_bounded(a: &CMatrix, bound: f64) -> Result<CMatrix> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let norm = a.norm_one();
    if norm > bound {
        return Err(Error::ExpOverflow { norm, bound });
    }
    let n = a.dim();
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a.scale_re(0.5_f64.powi(s));
    let b = &PADE13;
    let id = CMatrix::identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let lin = |c6: f64, c4: f64, c2: f64, c0: f64| {
        let mut m = a6.scale_re(c6);
        m += &a4.scale_re(c4);
        m += &a2.scale_re(c2);
        m += &id.scale_re(c0);
        m
    };
    let u_inner = &a6 * &lin(b[13], b[11], b[9], 0.0);
    let u = &a * &(&u_inner + &lin(b[7], b[5], b[3], b[1]));
    let v_inner = &a6 * &lin(b[12], b[10], b[8], 0.0);
    let v = &v_inner + &lin(b[6], b[4], b[2], b[0]);

    let mut r = solve(&(&v - &u), &(&v + &u))?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

/// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching eigenvectors as
/// the columns of a unitary matrix.
pub fn hermitian_eigen(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let herm = (a - &a.dagger()).norm_fro();
    if herm > TOL_SU * a.norm_fro().max(1.0) {
        return Err(Error::NotHermitian(herm));
    }
    let n = a.dim();
    // Symmetrize so roundoff in the input does not leak into the rotations.
    let mut m = (a + &a.dagger()).scale_re(0.5);
    let mut v = CMatrix::identity(n);
    let total = m.norm_fro().max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * total {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let g = m[(p, q)];
                let gabs = g.norm();
                if gabs <= 1e-300 {
                    continue;
                }
                let phase = g / gabs;
                let alpha = m[(p, p)].re;
                let beta = m[(q, q)].re;
                let zeta = (beta - alpha) / (2.0 * gabs);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // G on the (p,q) plane: [[c, s], [-s·e^{-iφ}, c·e^{-iφ}]].
                let gpp = C64::new(c, 0.0);
                let gpq = C64::new(s, 0.0);
                let gqp = -phase.conj() * s;
                let gqq = phase.conj() * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp * gpp + mkq * gqp;
                    m[(k, q)] = mkp * gpq + mkq * gqq;
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * gpp + vkq * gqp;
                    v[(k, q)] = vkp * gpq + vkq * gqq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = gpp.conj() * mpk + gqp.conj() * mqk;
                    m[(q, k)] = gpq.conj() * mpk + gqq.conj() * mqk;
                }
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok((values, vectors))
}

pub fn hermitian_eigenvalues(a: &CMatrix) -> Result<Vec<f64>> {
    hermitian_eigen(a).map(|(vals, _)| vals)
}
