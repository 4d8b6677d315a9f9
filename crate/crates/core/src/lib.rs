//! A simplified climate-economy optimization model: deterministic
//! forward dynamics, hand-derived adjoint sensitivities, an augmented
//! Lagrangian solver over the savings/abatement controls, and marginal
//! carbon cost accounting (SCC via equation duals, SMAC via the marginal
//! abatement cost curve) with a re-optimization oracle to verify the
//! dual-based values.

pub mod diffkernel;
pub mod dynamics;
pub mod error;
pub mod export;
pub mod marginals;
pub mod optimizer;
pub mod params;
pub mod plot;
pub mod scenario;
pub mod testdata;
