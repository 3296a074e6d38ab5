//! Bound states of the two-particle lattice fiber Hamiltonians H(K) = E_K + V on the 2-torus.
//!
//! `lattice`, `quadrature` and `integrals` are generic over the float type; the solver layers work in f64.

pub mod atlas;
pub mod determinant;
pub mod integrals;
pub mod lattice;
pub mod oracle;
pub mod quadrature;
pub mod spectrum;

pub use atlas::{classify, predicted_counts, sweep, PredictedCounts, RegionLabel, SweepRow, SweepSpec};
pub use integrals::{CalibrationTable, ConstantsSource, Side};
pub use oracle::{dense_validate, minimax_values, oracle_counts};
pub use spectrum::{spectrum_general, spectrum_k0, Eigenvalue, SolverOptions, SpectrumReport};

pub type Params = lattice::ModelParams<f64>;
pub type Point = lattice::TorusPoint<f64>;
pub type Band = lattice::Band<f64>;
pub type Integrals = integrals::IntegralSet<f64>;
pub type Params32 = lattice::ModelParams<f32>;
pub type Point32 = lattice::TorusPoint<f32>;
pub type Integrals32 = integrals::IntegralSet<f32>;
