use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use cpnsurf_core::chain::ProjectorChain;
use cpnsurf_core::exec::Execution;
use cpnsurf_core::export::{grid_csv, grid_obj, surface_grid, Grid};
use cpnsurf_core::jet::DEFAULT_ORDER;
use cpnsurf_core::minkowski::{kappa_coincidence_scan, kappa_grid};
use cpnsurf_core::spectral::{imaginary_lambda_grid, st_lambda_scan, st_mixed_constraint_scan};
use cpnsurf_core::suite::{reports_json, run_suite, IdentityReport, Space};

use crate::config::{ConfigError, ModelConfig, SheetSpec};

/// Default tolerance for su(N) membership and scan hits.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Write through a temporary file in the target directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn emit(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, contents),
        None => {
            std::io::stdout().write_all(contents.as_bytes())?;
            Ok(())
        }
    }
}

pub struct VerifyOutcome {
    pub reports: Vec<IdentityReport>,
    pub json: String,
}

impl VerifyOutcome {
    pub fn failures(&self) -> impl Iterator<Item = &IdentityReport> {
        self.reports.iter().filter(|r| r.is_blocking())
    }

    pub fn success(&self) -> bool {
        self.failures().next().is_none()
    }
}

pub fn verify(cfg: &ModelConfig, filter: &str, out: Option<&Path>) -> Result<VerifyOutcome> {
    let suite = cfg.suite_config()?;
    let reports = run_suite(filter, &suite).map_err(ConfigError::from)?;
    for r in &reports {
        let status = if r.pass { "pass" } else { "FAIL" };
        log::info!("{:<28} {status}  max {:.3e}  tol {:.0e}", r.id, r.max_residual, r.tolerance);
        if !r.pass && !r.is_blocking() {
            log::warn!("negative control {} did not exceed its threshold", r.id);
        }
    }
    let json = reports_json(&reports);
    emit(out, &json)?;
    Ok(VerifyOutcome { reports, json })
}

pub fn surface(cfg: &ModelConfig, out: Option<&Path>) -> Result<Vec<std::path::PathBuf>> {
    if cfg.space != Space::Euclidean {
        return Err(ConfigError::Invalid("surface export needs space \"euclidean\"".into()).into());
    }
    let dir = out.ok_or_else(|| ConfigError::Invalid("surface export needs --out <directory>".into()))?;
    let curve = cfg.curve()?;
    let grid = Grid::from(cfg.grid);
    let tol = cfg.tolerance.unwrap_or(DEFAULT_TOL);
    let mut written = Vec::new();
    for k in cfg.sheet.sheets(cfg.n) {
        let samples = surface_grid(&curve, k, &grid, tol, Execution::from_env())?;
        let csv = dir.join(format!("surface_k{k}.csv"));
        write_atomic(&csv, &grid_csv(&samples))?;
        written.push(csv);
        if cfg.n == 2 {
            let obj = dir.join(format!("surface_k{k}.obj"));
            write_atomic(&obj, &grid_obj(&samples, grid.resolution)?)?;
            written.push(obj);
        }
    }
    Ok(written)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ScanKind {
    StLambda,
    FgKappa,
    MixedConstraint,
}

fn fmt_f(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x:.12e}")
    }
}

pub fn scan(cfg: &ModelConfig, kind: ScanKind, out: Option<&Path>) -> Result<String> {
    let tol = cfg.tolerance.unwrap_or(DEFAULT_TOL);
    let exec = Execution::from_env();
    let mut csv = String::new();
    match kind {
        ScanKind::StLambda | ScanKind::MixedConstraint => {
            let chain = ProjectorChain::build(&cfg.curve()?, cfg.scan.xi, DEFAULT_ORDER)?;
            let grid = imaginary_lambda_grid();
            let tau = cfg.spectral.tau;
            if kind == ScanKind::StLambda {
                csv.push_str("sheet,lambda_im,distance,hit,pole\n");
                for k in cfg.sheet.sheets(cfg.n) {
                    for r in st_lambda_scan(&chain, k, tau, &grid, exec)? {
                        let hit = !r.pole && r.distance <= tol;
                        writeln!(csv, "{k},{},{},{hit},{}", fmt_f(r.lambda_im), fmt_f(r.distance), r.pole)?;
                    }
                }
            } else {
                let sheets: Vec<usize> = match cfg.sheet {
                    SheetSpec::All => (1..cfg.n.saturating_sub(1)).collect(),
                    SheetSpec::Index(k) => vec![k],
                };
                if sheets.is_empty() {
                    return Err(ConfigError::Invalid("mixed-constraint scan needs n ≥ 3".into()).into());
                }
                csv.push_str("sheet,lambda_im,residual_matrix,residual_sextic,hit,pole\n");
                for k in sheets {
                    let rows = st_mixed_constraint_scan(&chain, k, tau, &grid, exec).map_err(ConfigError::from)?;
                    for r in rows {
                        let hit = !r.pole && r.residual_matrix <= tol;
                        writeln!(
                            csv,
                            "{k},{},{},{},{hit},{}",
                            fmt_f(r.lambda_im),
                            fmt_f(r.residual_matrix),
                            fmt_f(r.residual_sextic),
                            r.pole
                        )?;
                    }
                }
            }
        }
        ScanKind::FgKappa => {
            let model = cfg.traveling_wave()?;
            let [lo, hi, step] = cfg.scan.kappa_range;
            let [xp, xm] = cfg.scan.light_cone;
            csv.push_str("kappa,lambda,ratio_residual,direction_residual,fitted_c1,hit\n");
            for r in kappa_coincidence_scan(&model, &kappa_grid(lo, hi, step), xp, xm, exec)? {
                let hit = r.ratio_residual <= tol;
                writeln!(
                    csv,
                    "{},{},{},{},{},{hit}",
                    fmt_f(r.kappa),
                    fmt_f(r.lambda),
                    fmt_f(r.ratio_residual),
                    fmt_f(r.direction_residual),
                    fmt_f(r.fitted_c1)
                )?;
            }
        }
    }
    emit(out, &csv)?;
    Ok(csv)
}
