//! Analyticity thresholds for the pressure of locally stable hard-core gases.
//!
//! The crate is split along the computation:
//!
//! * [`potentials`] describes radially symmetric hard-core pair potentials.
//! * [`constants`] integrates the Mayer function into the temperedness
//!   constants `C_φ`, `A_φ`, `P_φ` and `Ĉ_φ`.
//! * [`threshold`] solves the self-map / contraction trade-off with the
//!   Lambert W function and reports the resulting activity threshold next to
//!   the Penrose–Ruelle and Procacci–Yuhjtman bounds.
//! * [`connective`] estimates the potential-weighted walk integrals `V_k`
//!   and the connective-constant upper bound `Δ̂_φ`.
//! * [`oracle`] is a brute-force one-dimensional harness that evaluates
//!   finite partition functions exactly (up to quadrature) and checks the
//!   density identities the threshold rests on.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod connective;
pub mod constants;
pub mod error;
pub mod oracle;
pub mod potentials;
pub mod quadrature;
pub mod threshold;

pub use connective::{
    classify_sequence, delta_phi_upper, gamma_c_eval, vk_integrand, vk_monte_carlo,
    vk_quadrature_1d, Convention, DeltaEstimate, McConfig, SequenceClass, VkEstimate,
};
pub use constants::{
    radial_integral, stability_constant, temperedness_constants, RadialQuadratureConfig,
    TemperednessConstants,
};
pub use error::{Error, Result};
pub use potentials::{PairPotential, PotentialConfig, ThermoState};
pub use threshold::{
    analyticity_threshold, lambert_w0, m_max, solve_optimizer, OptimizerSolution,
    ThresholdReport,
};
