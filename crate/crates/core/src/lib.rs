pub mod combinatorics;
pub mod ddouble;
pub mod error;
pub mod exact;
pub mod gessel;
pub mod laguerre;
pub mod limits;
pub mod linalg;
pub mod ode;
pub mod painleve;
pub mod quadrature;
pub mod series;
pub mod special;
pub mod toeplitz;

pub use combinatorics::{DistributionTable, Partition, Route, Which, Word};
pub use error::{Error, Result};
pub use gessel::{SymbolCoefficients, SymbolMode};
pub use laguerre::LaguerreKernel;
pub use limits::{Estimate, F0Method, GueRoute, MonteCarloOptions};
pub use painleve::{Parameters, SigmaOptions, SigmaState, SigmaTrajectory};
pub use series::{RationalSeries, SymbolKind};
pub use toeplitz::{RecursionQuantities, Residuals, ToeplitzContext};
