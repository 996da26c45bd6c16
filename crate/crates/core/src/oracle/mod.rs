//! Brute-force verification on the line.
//!
//! A hard core makes the grand-canonical series on a bounded region finite,
//! so partition functions, densities and everything derived from them are
//! exact up to quadrature. This module evaluates them directly and checks
//! the density identities, the tree-recursion correspondence, the self-map
//! and contraction inequalities, and zero-freeness against that ground truth.

mod activity;
mod identities;
mod partition;
mod region;
mod tonks;
mod tree;
mod zerofree;

pub use activity::{potential_energy, ActivityField, Base, BaseFn, Factor, Interaction};
pub use identities::{check_log_z_identity, check_recursion_identity, IdentityCheck, OracleConfig};
pub use partition::{
    max_particles, one_point_density, partition_function, partition_function_with_error, series_coefficients, PartitionConfig, ZEstimate, ZERO_GUARD,
};
pub use region::{Interval, Region1D};
pub use tonks::{tonks_reference, tonks_windows, TonksWindow};
pub use tree::{
    check_contraction_bound, check_density_correspondence, check_modulation_bound, check_self_map, tree_recursion_eval, BoundaryConditionFn,
    ContractionReport, ModulationBoundReport, OptimizerSetup, SelfMapReport, MAX_TREE_DEPTH,
};
pub use zerofree::{neighborhood_min_abs_z, polynomial, polynomial_roots, zero_free_scan, ScanGrid, ZeroFreeReport, GRID_ZERO_TOL};
