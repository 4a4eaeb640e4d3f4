//! Model configuration: one JSON document, complex numbers as `[re, im]`.

use std::path::Path;

use cpnsurf_core::chain::HolomorphicCurve;
use cpnsurf_core::export::Grid;
use cpnsurf_core::linalg::MAX_DIM;
use cpnsurf_core::minkowski::TravelingWaveModel;
use cpnsurf_core::suite::{MinkowskiConfig, Space, SuiteConfig};
use cpnsurf_core::C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] cpnsurf_core::Error),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CurveConfig {
    #[default]
    Veronese,
    /// Polynomial coefficients per component, lowest degree first.
    Polynomial { coefficients: Vec<Vec<C64>> },
}

/// A single sheet or every sheet.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SheetRepr", into = "SheetRepr")]
pub enum SheetSpec {
    #[default]
    All,
    Index(usize),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SheetRepr {
    Index(usize),
    Keyword(String),
}

impl TryFrom<SheetRepr> for SheetSpec {
    type Error = String;

    fn try_from(r: SheetRepr) -> Result<Self, String> {
        match r {
            SheetRepr::Index(k) => Ok(SheetSpec::Index(k)),
            SheetRepr::Keyword(s) if s == "all" => Ok(SheetSpec::All),
            SheetRepr::Keyword(s) => Err(format!("sheet must be an index or \"all\", got {s:?}")),
        }
    }
}

impl From<SheetSpec> for SheetRepr {
    fn from(s: SheetSpec) -> Self {
        match s {
            SheetSpec::All => SheetRepr::Keyword("all".into()),
            SheetSpec::Index(k) => SheetRepr::Index(k),
        }
    }
}

impl std::str::FromStr for SheetSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "all" => Ok(SheetSpec::All),
            _ => s.parse().map(SheetSpec::Index).map_err(|_| format!("expected a sheet index or \"all\", got {s:?}")),
        }
    }
}

impl SheetSpec {
    pub fn sheets(self, n: usize) -> Vec<usize> {
        match self {
            SheetSpec::All => (0..n).collect(),
            SheetSpec::Index(k) => vec![k],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default)]
    pub center: C64,
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

fn default_radius() -> f64 {
    2.0
}

fn default_resolution() -> usize {
    64
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { center: C64::new(0.0, 0.0), radius: default_radius(), resolution: default_resolution() }
    }
}

impl From<GridConfig> for Grid {
    fn from(g: GridConfig) -> Self {
        Grid { center: g.center, radius: g.radius, resolution: g.resolution }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectralConfig {
    /// Imaginary in the Euclidean sector, real in the Minkowski sector.
    pub lambda: C64,
    pub tau: f64,
    pub kappa: f64,
    pub omega: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        let m = MinkowskiConfig::default();
        Self { lambda: C64::new(m.lambda, 0.0), tau: 1.0, kappa: m.kappa, omega: m.omega, c1: m.c1, c2: m.c2, c3: m.c3 }
    }
}

/// Where and over what ranges the scans run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    /// Base point ξ of the chain for the spectral scans.
    pub xi: C64,
    /// (x⁺, x⁻) for the κ scan.
    pub light_cone: [f64; 2],
    /// [lo, hi, step] for κ.
    pub kappa_range: [f64; 3],
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { xi: C64::new(0.3, -0.2), light_cone: [0.3, -0.4], kappa_range: [-2.0, 2.0, 0.05] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub curve: CurveConfig,
    #[serde(default)]
    pub space: Space,
    #[serde(default)]
    pub sheet: SheetSpec,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub spectral: SpectralConfig,
    #[serde(default)]
    pub scan: ScanConfig,
    /// Tolerance applied to every identity expected to hold.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_n() -> usize {
    3
}

fn default_seed() -> u64 {
    42
}

fn default_samples() -> usize {
    20
}

impl Default for ModelConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

/// Command-line overrides, applied on top of the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub n: Option<usize>,
    pub curve: Option<CurveKind>,
    pub sheet: Option<SheetSpec>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub samples: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum CurveKind {
    Veronese,
    Polynomial,
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), ConfigError> {
        if let Some(n) = o.n {
            self.n = n;
        }
        match o.curve {
            Some(CurveKind::Veronese) => self.curve = CurveConfig::Veronese,
            Some(CurveKind::Polynomial) if !matches!(self.curve, CurveConfig::Polynomial { .. }) => {
                return Err(invalid("--curve polynomial needs coefficients in the config file"));
            }
            _ => {}
        }
        if let Some(s) = o.sheet {
            self.sheet = s;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(t) = o.tolerance {
            self.tolerance = Some(t);
        }
        if let Some(s) = o.samples {
            self.samples = s;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n < 2 {
            return Err(invalid("n must be ≥ 2"));
        }
        if self.n > MAX_DIM {
            return Err(invalid(format!("n must be ≤ {MAX_DIM}")));
        }
        if let SheetSpec::Index(k) = self.sheet {
            if k >= self.n {
                return Err(invalid(format!("sheet must lie in 0..={}, got {k}", self.n - 1)));
            }
        }
        if let CurveConfig::Polynomial { coefficients } = &self.curve {
            if coefficients.len() != self.n {
                return Err(invalid(format!("curve has {} components but n = {}", coefficients.len(), self.n)));
            }
        }
        Grid::from(self.grid).validate()?;
        if let Some(t) = self.tolerance {
            if !(t.is_finite() && t > 0.0) {
                return Err(invalid(format!("tolerance must be positive, got {t}")));
            }
        }
        if self.samples == 0 {
            return Err(invalid("samples must be positive"));
        }
        let s = &self.spectral;
        if !(s.tau.is_finite() && s.tau > 0.0) {
            return Err(invalid(format!("tau must be positive, got {}", s.tau)));
        }
        if self.space == Space::Minkowski && s.lambda.im != 0.0 {
            return Err(invalid("lambda must be real in Minkowski space"));
        }
        let [lo, hi, step] = self.scan.kappa_range;
        if !(lo < hi && step > 0.0 && step.is_finite()) {
            return Err(invalid("kappa_range must be [lo, hi, step] with lo < hi and step > 0"));
        }
        self.curve()?;
        self.traveling_wave()?;
        Ok(())
    }

    pub fn curve(&self) -> Result<HolomorphicCurve, ConfigError> {
        Ok(match &self.curve {
            CurveConfig::Veronese => HolomorphicCurve::veronese(self.n)?,
            CurveConfig::Polynomial { coefficients } => HolomorphicCurve::new(coefficients.clone())?,
        })
    }

    pub fn minkowski(&self) -> MinkowskiConfig {
        let s = &self.spectral;
        MinkowskiConfig { omega: s.omega, kappa: s.kappa, lambda: s.lambda.re, c1: s.c1, c2: s.c2, c3: s.c3 }
    }

    pub fn traveling_wave(&self) -> Result<TravelingWaveModel, ConfigError> {
        let m = self.minkowski();
        Ok(TravelingWaveModel::rotating_wave(m.omega, m.kappa, m.lambda)?.with_constants(m.c1, m.c2, m.c3))
    }

    pub fn suite_config(&self) -> Result<SuiteConfig, ConfigError> {
        Ok(SuiteConfig {
            curve: self.curve()?,
            sheet: match self.sheet {
                SheetSpec::All => None,
                SheetSpec::Index(k) => Some(k),
            },
            seed: self.seed,
            samples: self.samples,
            tolerance: self.tolerance,
            minkowski: self.minkowski(),
            exec: cpnsurf_core::exec::Execution::from_env(),
        })
    }
}
