//! Bell-test statistics, tensor-product entanglement analysis and Hilbert-space
//! model fitting for four-outcome coincidence experiments.

pub mod hilbert;
pub mod bellstats;
pub mod entanglement;
pub mod modelfit;
pub mod cli;
