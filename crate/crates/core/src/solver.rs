//! Grant maximization: pick, for every demand and plane, at most one time slot
//! on the plane's wavelength so that no attachment fiber carries the same
//! `(λ, τ)` twice. The objective is the number of grants.
//!
//! [`solve_exact`] is a depth-first branch-and-bound over `(demand, plane)`
//! variables taken in demand order, planes ascending. Values are tried as
//! slots ascending, then "no grant", so the first optimum found is the
//! lexicographically least table. The bound sums, per source fiber,
//! `min(unassigned variables, free slots)`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::time::Duration;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::rwta::{Assignment, AssignmentTable, DemandSet};
use crate::topology::{TimeSlot, Topology, Wavelength};
use crate::{Error, Result};

/// A topology, its demands and the `W x T` resource grid.
#[derive(Debug, Clone, Copy)]
pub struct Instance<'a> {
    topology: &'a Topology,
    demands: &'a DemandSet,
}

impl<'a> Instance<'a> {
    pub fn new(topology: &'a Topology, demands: &'a DemandSet) -> Result<Self> {
        let count = topology.entities().len();
        for pair in demands.pairs() {
            if pair.src.0 >= count || pair.dst.0 >= count {
                return Err(Error::config("demands", "reference entities outside the topology"));
            }
            if pair.src == pair.dst {
                return Err(Error::config("demands", "contain a self pair"));
            }
        }
        Ok(Instance { topology, demands })
    }

    pub fn topology(&self) -> &'a Topology {
        self.topology
    }

    pub fn demands(&self) -> &'a DemandSet {
        self.demands
    }

    /// Every demand served on both planes.
    pub fn full_coverage(&self) -> usize {
        self.topology.fabric().planes() * self.demands.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    ProvenOptimal,
    Heuristic,
    /// The exact search hit its node budget; the table is the best found so far.
    BoundReached,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::ProvenOptimal => "proven-optimal",
            SolveStatus::Heuristic => "heuristic",
            SolveStatus::BoundReached => "bound-reached",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SearchStats {
    pub nodes: u64,
    /// Wall-clock time; only measured with the `std` feature.
    pub elapsed: Option<Duration>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOutcome {
    pub table: AssignmentTable,
    pub objective: usize,
    pub status: SolveStatus,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, Copy)]
struct Var {
    demand: usize,
    wavelength: Wavelength,
    src_fiber: usize,
    dst_fiber: usize,
}

/// Per-fiber slot occupancy, one bit per slot.
#[derive(Debug, Clone)]
struct Occupancy {
    words: usize,
    bits: Vec<u64>,
}

impl Occupancy {
    fn new(fibers: usize, slots: usize) -> Self {
        let words = slots.div_ceil(64);
        Occupancy { words, bits: vec![0; fibers * words] }
    }

    fn is_set(&self, fiber: usize, slot: usize) -> bool {
        self.bits[fiber * self.words + slot / 64] & (1 << (slot % 64)) != 0
    }

    fn set(&mut self, fiber: usize, slot: usize) {
        self.bits[fiber * self.words + slot / 64] |= 1 << (slot % 64);
    }

    fn clear(&mut self, fiber: usize, slot: usize) {
        self.bits[fiber * self.words + slot / 64] &= !(1 << (slot % 64));
    }
}

struct Model<'a> {
    instance: Instance<'a>,
    slots: usize,
    vars: Vec<Var>,
    source: Occupancy,
    destination: Occupancy,
}

impl<'a> Model<'a> {
    fn new(instance: Instance<'a>) -> Self {
        let topology = instance.topology;
        let fabric = topology.fabric();
        let wavelengths = fabric.wavelengths();
        let slots = topology.time_slots();
        let mut vars = Vec::with_capacity(instance.full_coverage());
        for (demand, pair) in instance.demands.pairs().iter().enumerate() {
            let (src, dst) = (topology.attachment_of(pair.src), topology.attachment_of(pair.dst));
            for plane in 0..fabric.planes() {
                let wavelength = fabric.wavelength_for(src, dst, plane);
                vars.push(Var {
                    demand,
                    wavelength,
                    src_fiber: src * wavelengths + wavelength.index(),
                    dst_fiber: dst * wavelengths + wavelength.index(),
                });
            }
        }
        let fibers = fabric.n() * wavelengths;
        Model {
            instance,
            slots,
            vars,
            source: Occupancy::new(fibers, slots),
            destination: Occupancy::new(fibers, slots),
        }
    }

    fn is_free(&self, var: &Var, slot: usize) -> bool {
        !self.source.is_set(var.src_fiber, slot) && !self.destination.is_set(var.dst_fiber, slot)
    }

    fn lowest_free(&self, var: &Var) -> Option<usize> {
        (0..self.slots).find(|&slot| self.is_free(var, slot))
    }

    fn occupy(&mut self, var: &Var, slot: usize) {
        self.source.set(var.src_fiber, slot);
        self.destination.set(var.dst_fiber, slot);
    }

    fn release(&mut self, var: &Var, slot: usize) {
        self.source.clear(var.src_fiber, slot);
        self.destination.clear(var.dst_fiber, slot);
    }

    fn table(&self, choice: &[Option<usize>]) -> AssignmentTable {
        let topology = self.instance.topology;
        let pairs = self.instance.demands.pairs();
        let assignments = self
            .vars
            .iter()
            .zip(choice)
            .filter_map(|(var, slot)| {
                let slot = (*slot)?;
                let pair = pairs[var.demand];
                Some(Assignment {
                    src: topology.entity(pair.src).name.clone(),
                    dst: topology.entity(pair.dst).name.clone(),
                    wavelength: var.wavelength,
                    timeslot: TimeSlot::from_index(slot),
                })
            })
            .collect();
        let mut table = AssignmentTable { assignments, fingerprint: Some(topology.fingerprint()) };
        table.sort_canonical(topology);
        table
    }
}

#[cfg(feature = "std")]
struct Stopwatch(std::time::Instant);

#[cfg(feature = "std")]
impl Stopwatch {
    fn start() -> Self {
        Stopwatch(std::time::Instant::now())
    }

    fn elapsed(&self) -> Option<Duration> {
        Some(self.0.elapsed())
    }
}

#[cfg(not(feature = "std"))]
struct Stopwatch;

#[cfg(not(feature = "std"))]
impl Stopwatch {
    fn start() -> Self {
        Stopwatch
    }

    fn elapsed(&self) -> Option<Duration> {
        None
    }
}

struct Search<'m, 'a> {
    model: &'m mut Model<'a>,
    /// Variables of each source-fiber group not yet decided.
    remaining: Vec<usize>,
    /// Slots still free on each source-fiber group.
    free: Vec<usize>,
    group_of: Vec<usize>,
    choice: Vec<Option<usize>>,
    best: Option<(usize, Vec<Option<usize>>)>,
    /// Upper bound on grants still obtainable from undecided variables.
    headroom: usize,
    ceiling: usize,
    nodes: u64,
    budget: Option<u64>,
    aborted: bool,
}

impl Search<'_, '_> {
    fn best_value(&self) -> Option<usize> {
        self.best.as_ref().map(|(v, _)| *v)
    }

    fn done(&self) -> bool {
        self.aborted || self.best_value() == Some(self.ceiling)
    }

    fn visit(&mut self, depth: usize, granted: usize) {
        if self.done() {
            return;
        }
        if let Some(budget) = self.budget {
            if self.nodes >= budget {
                self.aborted = true;
                return;
            }
        }
        self.nodes += 1;

        if depth == self.model.vars.len() {
            if self.best_value().is_none_or(|b| granted > b) {
                self.best = Some((granted, self.choice.clone()));
            }
            return;
        }
        if self.best_value().is_some_and(|b| granted + self.headroom <= b) {
            return;
        }

        let var = self.model.vars[depth];
        let group = self.group_of[depth];
        let before = self.remaining[group].min(self.free[group]);

        self.remaining[group] -= 1;
        for slot in 0..self.model.slots {
            if !self.model.is_free(&var, slot) {
                continue;
            }
            self.model.occupy(&var, slot);
            self.free[group] -= 1;
            let after = self.remaining[group].min(self.free[group]);
            self.headroom = self.headroom - before + after;
            self.choice[depth] = Some(slot);

            self.visit(depth + 1, granted + 1);

            self.choice[depth] = None;
            self.headroom = self.headroom + before - after;
            self.free[group] += 1;
            self.model.release(&var, slot);
            if self.done() {
                self.remaining[group] += 1;
                return;
            }
        }

        let after = self.remaining[group].min(self.free[group]);
        self.headroom = self.headroom - before + after;
        self.visit(depth + 1, granted);
        self.headroom = self.headroom + before - after;
        self.remaining[group] += 1;
    }
}

/// Maximizes the number of grants. `node_budget` caps the number of search
/// nodes; hitting it yields [`SolveStatus::BoundReached`] with the best table
/// found so far (possibly empty).
pub fn solve_exact(instance: Instance<'_>, node_budget: Option<u64>) -> SolveOutcome {
    let clock = Stopwatch::start();
    let mut model = Model::new(instance);

    let mut group_index = alloc::collections::BTreeMap::new();
    let group_of: Vec<usize> = model
        .vars
        .iter()
        .map(|v| {
            let next = group_index.len();
            *group_index.entry(v.src_fiber).or_insert(next)
        })
        .collect();
    let mut remaining = vec![0; group_index.len()];
    for &g in &group_of {
        remaining[g] += 1;
    }
    let free = vec![model.slots; remaining.len()];
    let headroom = remaining.iter().map(|&r| r.min(model.slots)).sum();

    let vars = model.vars.len();
    let mut search = Search {
        model: &mut model,
        remaining,
        free,
        group_of,
        choice: vec![None; vars],
        best: None,
        headroom,
        ceiling: headroom,
        nodes: 0,
        budget: node_budget,
        aborted: false,
    };
    search.visit(0, 0);

    let (nodes, aborted) = (search.nodes, search.aborted);
    let (objective, choice) = search.best.take().unwrap_or_else(|| (0, vec![None; vars]));
    let table = model.table(&choice);
    debug_assert_eq!(table.len(), objective);
    SolveOutcome {
        table,
        objective,
        status: if aborted { SolveStatus::BoundReached } else { SolveStatus::ProvenOptimal },
        stats: SearchStats { nodes, elapsed: clock.elapsed() },
    }
}

/// Visits demands in a seed-shuffled order and gives each plane the lowest
/// slot free at both ends.
pub fn solve_greedy(instance: Instance<'_>, seed: u64) -> SolveOutcome {
    let clock = Stopwatch::start();
    let mut model = Model::new(instance);
    let planes = instance.topology.fabric().planes();

    let mut order: Vec<usize> = (0..instance.demands.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut choice = vec![None; model.vars.len()];
    let mut nodes = 0;
    for demand in order {
        for plane in 0..planes {
            let at = demand * planes + plane;
            let var = model.vars[at];
            nodes += 1;
            if let Some(slot) = model.lowest_free(&var) {
                model.occupy(&var, slot);
                choice[at] = Some(slot);
            }
        }
    }
    let table = model.table(&choice);
    SolveOutcome {
        objective: table.len(),
        table,
        status: SolveStatus::Heuristic,
        stats: SearchStats { nodes, elapsed: clock.elapsed() },
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinSlots {
    pub time_slots: usize,
    /// Full-coverage witness solved at `time_slots`.
    pub outcome: SolveOutcome,
}

/// Smallest frame length at which every demand gets both of its grants,
/// found by sweeping `T = 1, 2, ...` with [`solve_exact`]. The topology's own
/// slot count is ignored.
pub fn min_slots(topology: &Topology, demands: &DemandSet, node_budget: Option<u64>) -> Result<MinSlots> {
    let mut time_slots = 1;
    loop {
        let sized = topology.with_time_slots(time_slots)?;
        let instance = Instance::new(&sized, demands)?;
        let outcome = solve_exact(instance, node_budget);
        if outcome.status == SolveStatus::BoundReached {
            return Err(Error::BudgetExhausted { budget: node_budget.unwrap_or(0), time_slots });
        }
        if outcome.objective == instance.full_coverage() {
            return Ok(MinSlots { time_slots, outcome });
        }
        time_slots += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rwta::{check_table, DemandFlags};
    use crate::topology::{build_topology, TopologyConfig};

    fn setup(config: TopologyConfig, flags: DemandFlags) -> (Topology, DemandSet) {
        let t = build_topology(config).unwrap();
        let d = DemandSet::build(&t, flags);
        (t, d)
    }

    #[test]
    fn tiny_instance_fits_one_slot() {
        let (t, d) = setup(TopologyConfig::new(2, 1, 0).with_time_slots(1), DemandFlags::default());
        let out = solve_exact(Instance::new(&t, &d).unwrap(), None);
        assert_eq!(out.objective, 4);
        assert_eq!(out.status, SolveStatus::ProvenOptimal);
        assert!(check_table(&t, &d, &out.table).is_valid());
        for seed in 0..5 {
            assert_eq!(solve_greedy(Instance::new(&t, &d).unwrap(), seed).objective, 4);
        }
    }

    #[test]
    fn small_instance_full_coverage() {
        let (t, d) = setup(TopologyConfig::new(2, 2, 2), DemandFlags::default());
        let out = solve_exact(Instance::new(&t, &d).unwrap(), None);
        assert_eq!(out.objective, 56);
        assert_eq!(out.status, SolveStatus::ProvenOptimal);
        assert_eq!(out.table.fingerprint, Some(t.fingerprint()));
        let report = check_table(&t, &d, &out.table);
        assert!(report.is_valid(), "{:?}", report.violations);
        assert_eq!(report.coverage, [0, 0, 28]);

        let greedy = solve_greedy(Instance::new(&t, &d).unwrap(), 0);
        assert_eq!(greedy.objective, 56);
        assert_eq!(greedy.status, SolveStatus::Heuristic);
    }

    #[test]
    fn small_instance_objective_per_frame_length() {
        // Per plane the source-fiber groups have sizes 2,4,4,2 (cell to cell)
        // and eight groups of 2 (cell to OLT, OLT to cell).
        let expected = [24, 48, 52, 56, 56];
        for (i, &want) in expected.iter().enumerate() {
            let (t, d) = setup(TopologyConfig::new(2, 2, 2).with_time_slots(i + 1), DemandFlags::default());
            let out = solve_exact(Instance::new(&t, &d).unwrap(), None);
            assert_eq!(out.objective, want, "T={}", i + 1);
            assert_eq!(out.status, SolveStatus::ProvenOptimal);
            assert!(solve_greedy(Instance::new(&t, &d).unwrap(), 0).objective <= want);
        }
    }

    #[test]
    fn budget_of_one_node_is_exhausted() {
        let (t, d) = setup(TopologyConfig::new(2, 2, 2), DemandFlags::default());
        let out = solve_exact(Instance::new(&t, &d).unwrap(), Some(1));
        assert_eq!(out.status, SolveStatus::BoundReached);
        assert_eq!(out.objective, out.table.len());
    }

    #[test]
    fn exact_table_is_lexicographically_least() {
        let (t, d) = setup(TopologyConfig::new(2, 2, 2), DemandFlags::default());
        let out = solve_exact(Instance::new(&t, &d).unwrap(), None);
        let first = &out.table.assignments[..2];
        assert_eq!(first[0], Assignment::new("cell1.rack1", "cell1.rack2", 1, 1));
        assert_eq!(first[1], Assignment::new("cell1.rack1", "cell1.rack2", 5, 1));
        let second = out.table.assignments.iter().find(|a| a.src == "cell1.rack2" && a.dst == "cell1.rack1").unwrap();
        assert_eq!(second.timeslot, TimeSlot(2));
    }

    #[test]
    fn min_slot_sweep() {
        let (t, d) = setup(TopologyConfig::new(2, 1, 0), DemandFlags::default());
        assert_eq!(min_slots(&t, &d, None).unwrap().time_slots, 1);

        let (t, d) = setup(TopologyConfig::new(2, 2, 2), DemandFlags::default());
        let m = min_slots(&t, &d, None).unwrap();
        assert_eq!(m.time_slots, 4);
        assert_eq!(m.outcome.objective, 56);

        let (t, d) =
            setup(TopologyConfig::new(2, 2, 2), DemandFlags { include_intra_cell: false, include_olt_pairs: false });
        assert_eq!(min_slots(&t, &d, None).unwrap().time_slots, 4);

        assert!(matches!(min_slots(&t, &d, Some(1)), Err(Error::BudgetExhausted { time_slots: 1, .. })));
    }

    #[test]
    fn rejects_inconsistent_instance() {
        let (t, _) = setup(TopologyConfig::new(2, 2, 2), DemandFlags::default());
        let (big, bd) = setup(TopologyConfig::new(3, 3, 2), DemandFlags::default());
        assert!(Instance::new(&big, &bd).is_ok());
        assert!(matches!(Instance::new(&t, &bd), Err(Error::Config { field: "demands", .. })));
    }
}
