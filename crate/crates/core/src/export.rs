//! su(N) coordinates and surface grids for export.
//!
//! Coordinates are taken against iλ_a, where λ_a are the generalized
//! Gell-Mann matrices with tr(λ_a λ_b) = 2δ_ab, so the basis is orthonormal
//! under (A, B) = −½ tr(AB). Ordering: for each column c = 1..N−1 (0-based)
//! the symmetric and antisymmetric pairs (r, c) for r = 0..c−1, then the
//! diagonal generator with c + 1 leading ones. For N = 2 this is (σx, σy, σz)
//! and for N = 3 the usual λ₁..λ₈.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::chain::{HolomorphicCurve, ProjectorChain};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{check_dim, CMatrix, SuElement, C64, I};
use crate::surface::weierstrass_jet;

/// The generalized Gell-Mann matrices in export order.
pub fn gell_mann(n: usize) -> Result<Vec<CMatrix>> {
    check_dim(n)?;
    let mut out = Vec::with_capacity(n * n - 1);
    for c in 1..n {
        for r in 0..c {
            out.push(&CMatrix::unit(n, r, c) + &CMatrix::unit(n, c, r));
            out.push(&CMatrix::unit(n, r, c).scale(-I) + &CMatrix::unit(n, c, r).scale(I));
        }
        let l = c as f64;
        let norm = (2.0 / (l * (l + 1.0))).sqrt();
        let mut d = vec![0.0; n];
        d[..c].iter_mut().for_each(|x| *x = norm);
        d[c] = -l * norm;
        out.push(CMatrix::real_diag(&d));
    }
    Ok(out)
}

/// Coordinates x_a = (X, iλ_a) = −½ tr(X·iλ_a).
pub fn su_coordinates(x: &SuElement, basis: &[CMatrix]) -> Vec<f64> {
    basis.iter().map(|g| -0.5 * (x.matrix() * &g.scale(I)).trace().re).collect()
}

/// Square grid centred on `center` with side 2·radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub center: C64,
    pub radius: f64,
    pub resolution: usize,
}

impl Grid {
    pub fn validate(&self) -> Result<()> {
        if self.resolution < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid resolution must be at least 2, got {}",
                self.resolution
            )));
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::InvalidParameter(format!("grid radius must be positive, got {}", self.radius)));
        }
        Ok(())
    }

    /// Points in row-major order, real part varying fastest.
    pub fn points(&self) -> Vec<C64> {
        let r = self.resolution;
        let step = 2.0 * self.radius / (r - 1) as f64;
        (0..r)
            .flat_map(|j| (0..r).map(move |i| (i, j)))
            .map(|(i, j)| self.center + C64::new(-self.radius + i as f64 * step, -self.radius + j as f64 * step))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSample {
    pub xi: C64,
    pub coords: Vec<f64>,
}

impl GridSample {
    /// (X, X), the squared Euclidean length of the coordinate vector.
    pub fn killing_norm2(&self) -> f64 {
        self.coords.iter().map(|x| x * x).sum()
    }
}

/// X_k on every grid point; `tol` bounds the su(N) membership check.
pub fn surface_grid(
    curve: &HolomorphicCurve,
    k: usize,
    grid: &Grid,
    tol: f64,
    exec: Execution,
) -> Result<Vec<GridSample>> {
    grid.validate()?;
    let n = curve.dim();
    if k >= n {
        return Err(Error::InvalidParameter(format!("sheet {k} out of range 0..{n}")));
    }
    let basis = gell_mann(n)?;
    exec.map(&grid.points(), |&xi| {
        let chain = ProjectorChain::build(curve, xi, 1)?;
        let x = SuElement::with_tolerance(weierstrass_jet(&chain, k)?.value().clone(), tol)?;
        Ok(GridSample { xi, coords: su_coordinates(&x, &basis) })
    })
    .into_iter()
    .collect()
}

pub fn grid_csv(samples: &[GridSample]) -> String {
    let dim = samples.first().map_or(0, |s| s.coords.len());
    let mut out = String::from("re_xi,im_xi");
    for a in 1..=dim {
        write!(out, ",x{a}").unwrap();
    }
    out.push('\n');
    for s in samples {
        write!(out, "{:.17e},{:.17e}", s.xi.re, s.xi.im).unwrap();
        for x in &s.coords {
            write!(out, ",{x:.17e}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Triangulated mesh of an N = 2 grid, two triangles per cell.
pub fn grid_obj(samples: &[GridSample], resolution: usize) -> Result<String> {
    if samples.len() != resolution * resolution {
        return Err(Error::DimensionMismatch(resolution * resolution, samples.len()));
    }
    if samples.iter().any(|s| s.coords.len() != 3) {
        return Err(Error::InvalidParameter("OBJ export needs three coordinates (N = 2)".into()));
    }
    let mut out = String::from("# su(2) Weierstrass surface\n");
    for s in samples {
        writeln!(out, "v {:.12} {:.12} {:.12}", s.coords[0], s.coords[1], s.coords[2]).unwrap();
    }
    let v = |i: usize, j: usize| j * resolution + i + 1;
    for j in 0..resolution - 1 {
        for i in 0..resolution - 1 {
            writeln!(out, "f {} {} {}", v(i, j), v(i + 1, j), v(i + 1, j + 1)).unwrap();
            writeln!(out, "f {} {} {}", v(i, j), v(i + 1, j + 1), v(i, j + 1)).unwrap();
        }
    }
    Ok(out)
}
