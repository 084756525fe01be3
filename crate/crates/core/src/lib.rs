//! Bounded-variation functionals for bivariate functions valued in metric
//! semigroups, sampled on finite grids.
//!
//! The crate is `no_std` (it needs `alloc`). It covers four variation
//! families (Wiener/Jordan, Riesz, Waterman, Korenblum), the joint variation
//! and the induced metric `ρ` between two functions, an exact search for the
//! supremum over grid subpartitions, and the precompactness machinery built
//! on top of it: equivariation witnesses, the partition-evaluation map into
//! product spaces, and constructive ε-nets.
//!
//! File formats, reports and the command-line interface live in the
//! companion `semivar` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod gridfn;
pub mod precompact;
pub mod search;
pub mod semigroup;
pub mod suites;
pub mod tolerance;
pub mod variation;

pub use error::{Error, Result};
pub use gridfn::{synth_function, Generator, Grid1D, GridFunction2D, Partition, PartitionPair};
pub use precompact::{
    build_epsilon_net, equivariation_defect, find_equivariation_witness, pointwise_net,
    product_rho_prime, verify_epsilon_net, EpsilonNet, EquivariationCertificate, FunctionFamily,
    NetCheck, ProductTuple,
};
pub use search::{
    bb_upper_bound, brute_force_sup, enumerate_partitions, solve_sup, Method, PartialSelection,
    SupResult,
};
pub use semigroup::{verify_semigroup_laws, Element, Instance, Interval, LawReport};
pub use suites::{run_suite, run_suite_for, Suite, SuiteReport};
pub use variation::{
    joint_variation_on_partition, rho, rho_on_partition, variation_on_partition, Distortion,
    Family, FamilyConfig, VariationBreakdown, WatermanWeights,
};
