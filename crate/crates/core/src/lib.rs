//! Capacity bounds, feasibility certificates, maximum-entropy input laws and
//! greedy per-antenna signaling for multiple-input single-output optical
//! intensity channels with per-antenna peak and average intensity limits.
//!
//! The equivalent scalar input `S = h^T X` lives on `[0, 1]` after
//! normalization. Everything in this crate is expressed in terms of `S` and
//! mapped back to antennas by [`decompose`].

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bounds;
pub mod channel;
pub mod config;
pub mod decompose;
pub mod dist;
pub mod error;
pub mod feasibility;
pub mod intervals;
pub mod maxent;
pub mod mi;
pub mod quadrature;
pub mod signals;
pub mod special;

pub use bounds::{
    duality_bound_value, high_snr_offset, low_snr_slope, lower_epi, upper_duality,
    upper_maxvar, v_max, BoundsEvaluator, BoundsReport, DualityParams, SweepConfig,
};
pub use channel::{
    canonicalize, normalize, sort_and_merge, ChannelSpec, Kind, RawChannelSpec, Reduction,
};
pub use config::Tolerances;
pub use decompose::{
    decompose_bc, decompose_iterative, decompose_partition, phi, solve_partition,
    PartitionPlan, Signaler,
};
pub use dist::{maximally_convex, BoundedDist, DiscreteDist, Distribution, PiecewiseExpDist};
pub use error::{Error, Result};
pub use feasibility::{
    bc_allocation, check_bc, check_ec, convex_order_dominates, Allocation, FeasibilityReport,
};
pub use intervals::IntervalSet;
pub use maxent::{dual_objective, solve_gamma, MaxEntSolution};
pub use mi::{mutual_info, output_density, MIResult};
pub use special::zeta;
