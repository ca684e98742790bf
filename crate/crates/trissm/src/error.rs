//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Mismatched or structurally invalid dimensions.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// A numeric argument outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A constellation order the requested family cannot provide.
    #[error("unsupported constellation order {order} for family {family}")]
    UnsupportedOrder {
        /// The requested order.
        order: usize,
        /// The constellation family name.
        family: &'static str,
    },

    /// A constrained search with an empty feasible set.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Not enough data to estimate the requested quantity.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A numerical routine failed to converge to the requested accuracy.
    #[error("numerical error: {0}")]
    Numerical(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
