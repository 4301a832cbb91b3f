//! Wavelength and TDM time-slot assignment for passive optical data-center
//! fabrics built from two planes of two-tier cascaded AWGRs.
//!
//! The crate is `no_std` (it needs `alloc`). Enabling the `std` feature only
//! adds wall-clock timing to solver statistics.
//!
//! * [`topology`]: cells, racks, OLT switches and the cyclic wavelength-routing fabric.
//! * [`rwta`]: demands, assignment tables, the constraint system and its validator.
//! * [`solver`]: exact branch-and-bound, a seeded greedy baseline and a minimum-slot sweep.
//! * [`tdmsim`]: slot-level replay of an assignment table under synthetic traffic.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod rwta;
pub mod solver;
pub mod tdmsim;
pub mod topology;

pub use error::Error;
pub use rwta::{
    build_demands, check_table, conflict_groups, feasible_wavelengths, objective, Assignment, AssignmentTable,
    ConflictKey, Demand, DemandFlags, DemandSet, FiberSide, ValidationReport, Verdict, Violation, ViolationCode,
};
pub use solver::{min_slots, solve_exact, solve_greedy, Instance, MinSlots, SearchStats, SolveOutcome, SolveStatus};
pub use tdmsim::{
    collision_audit, simulate, utilization_summary, AuditVerdict, Breach, Direction, Metrics, ReportRow, SimOptions,
    TrafficModel, Transmission,
};
pub use topology::{
    all_to_all_check, build_topology, required_wavelengths, Entity, EntityId, EntityKind, FabricModel, Segment,
    TimeSlot, Topology, TopologyConfig, Wavelength,
};

pub type Result<T, E = Error> = core::result::Result<T, E>;
