//! Elliptic hypergeometric identities built on the metric: the Frenkel-Turaev
//! sum, the elliptic gamma function, and elliptic 6j-symbols.

pub mod gamma;
pub mod series;
pub mod sixj;

pub use gamma::{bdi_integrand_equiv, elliptic_gamma, BdiCheck};
pub use series::{frenkel_turaev, FTParams, FTResult};
pub use sixj::{sixj_duality_residual, sixj_scalar_product_residual, sixj_solve, SixJTable};
