//! Neural volatility forecasting with multiple inputs and outputs.
//!
//! The pipeline runs from raw per-instrument close-price CSVs to trained
//! feedforward networks and statistical reports:
//!
//! - [`market_data`]: CSV ingestion, calendar alignment, log returns.
//! - [`features`]: rolling annualized volatility, the 7-input/2-output
//!   dataset, min-max scaling and chronological splits.
//! - [`network`]: MLFF and cascade-forward networks with exact gradients
//!   and per-sample Jacobians.
//! - [`train`]: nine full-batch backprop-family trainers plus the shared
//!   line search and stopping protocol.
//! - [`evaluation`]: MSE / R / MAPE, descriptive statistics, t-tests.
//! - [`harness`]: the architecture × algorithm × hidden-size trial grid,
//!   reports, SVG plots and a synthetic market fixture.

// `!(x > 0.0)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod evaluation;
pub mod features;
pub mod harness;
pub mod market_data;
pub mod matrix;
pub mod network;
pub mod train;

use thiserror::Error;

pub use features::{FeatureDataset, Scaler};
pub use market_data::{AlignedPanel, PriceBar, PriceSeries, Symbol};
pub use matrix::Matrix;
pub use network::{Architecture, Network, Topology};
pub use train::{Algorithm, StopReason, TrainConfig, TrainRecord, TrainerSpec};

/// Crate-level error, grouping every module error by the kind of failure.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    MarketData(#[from] market_data::MarketDataError),
    #[error(transparent)]
    Features(#[from] features::FeatureError),
    #[error(transparent)]
    Network(#[from] network::NetworkError),
    #[error(transparent)]
    Train(#[from] train::TrainError),
    #[error(transparent)]
    Evaluation(#[from] evaluation::EvalError),
    #[error(transparent)]
    Harness(#[from] harness::HarnessError),
}

impl Error {
    /// Broad classification used by the CLI to pick an exit code.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::MarketData(e) => match e {
                market_data::MarketDataError::Io { .. } => ErrorKind::Io,
                _ => ErrorKind::Data,
            },
            Error::Features(_) => ErrorKind::Data,
            Error::Network(network::NetworkError::Parse(_)) => ErrorKind::Data,
            Error::Network(_) => ErrorKind::Numerical,
            Error::Train(_) => ErrorKind::Numerical,
            Error::Evaluation(_) => ErrorKind::Numerical,
            Error::Harness(e) => e.kind(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Numerical,
    Io,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
