use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("dimension {0} outside the supported range 2..=12")]
    UnsupportedDimension(usize),

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (residual {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not an su(N) element: {0}")]
    NotSu(String),

    #[error("matrix exponential argument has norm {norm:e}, above the bound {bound:e}")]
    ExpOverflow { norm: f64, bound: f64 },

    #[error("singular matrix")]
    Singular,

    #[error("jet order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),

    #[error("derivative of total order {requested} requested from a jet of order {order}")]
    DerivativeOrder { requested: usize, order: usize },

    #[error("singular normalization (|f|^2 = {0:e})")]
    SingularNormalization(f64),

    #[error("curve not full rank: f_{0} vanishes")]
    NotFullRank(usize),

    #[error("projector chain does not terminate (|f_N| = {0:e})")]
    NonTerminating(f64),

    #[error("not a CP^(N-1) surface point (minimal polynomial residual {0:e})")]
    NotSurfacePoint(f64),

    #[error("pole: spectral parameter lambda = {0} is too close to +1 or -1")]
    Pole(num_complex::Complex64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed word descriptor: {0}")]
    MalformedWord(String),
}
