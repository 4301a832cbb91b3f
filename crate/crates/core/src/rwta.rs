//! Demands, assignment tables and the routing/wavelength/time-slot constraint
//! system.
//!
//! A grant `(src, dst, λ, τ)` is admissible when `λ` routes the source's
//! attachment onto the destination's attachment. Grants collide when they
//! share a wavelength and slot on the same attachment fiber, at either end.
//! Each pair may hold at most one grant per plane, so a fully served pair owns
//! exactly two wavelengths, `N` apart.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::topology::{EntityId, EntityKind, TimeSlot, Topology, Wavelength};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DemandFlags {
    /// Rack pairs inside one cell go through the fabric on loopback wavelengths.
    pub include_intra_cell: bool,
    pub include_olt_pairs: bool,
}

impl Default for DemandFlags {
    fn default() -> Self {
        DemandFlags { include_intra_cell: true, include_olt_pairs: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Demand {
    pub src: EntityId,
    pub dst: EntityId,
}

/// Ordered communication pairs an instance must serve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandSet {
    pairs: Vec<Demand>,
    flags: DemandFlags,
}

impl DemandSet {
    /// Every ordered entity pair except self pairs and those the flags exclude,
    /// in entity order (cells and racks ascending, then OLTs).
    pub fn build(topology: &Topology, flags: DemandFlags) -> Self {
        let entities = topology.entities();
        let mut pairs = Vec::new();
        for (s, src) in entities.iter().enumerate() {
            for (d, dst) in entities.iter().enumerate() {
                if s == d {
                    continue;
                }
                let both_olt = src.kind == EntityKind::Olt && dst.kind == EntityKind::Olt;
                if both_olt && !flags.include_olt_pairs {
                    continue;
                }
                let same_cell = src.kind == EntityKind::Rack && src.cell == dst.cell;
                if same_cell && !flags.include_intra_cell {
                    continue;
                }
                pairs.push(Demand { src: EntityId(s), dst: EntityId(d) });
            }
        }
        DemandSet { pairs, flags }
    }

    /// Arbitrary subset of pairs, e.g. for small oracle instances. Pairs are
    /// sorted and deduplicated; self pairs and unknown entities are rejected.
    pub fn from_pairs(topology: &Topology, pairs: impl IntoIterator<Item = Demand>) -> Result<Self> {
        let mut set = BTreeSet::new();
        let count = topology.entities().len();
        for pair in pairs {
            for id in [pair.src, pair.dst] {
                if id.0 >= count {
                    return Err(Error::UnknownEntity(format!("#{}", id.0)));
                }
            }
            if pair.src == pair.dst {
                return Err(Error::SelfPair(topology.entity(pair.src).name.clone()));
            }
            set.insert(pair);
        }
        let flags = DemandFlags { include_intra_cell: true, include_olt_pairs: true };
        Ok(DemandSet { pairs: set.into_iter().collect(), flags })
    }

    pub fn pairs(&self) -> &[Demand] {
        &self.pairs
    }

    pub fn flags(&self) -> DemandFlags {
        self.flags
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn position(&self, pair: Demand) -> Option<usize> {
        self.pairs.binary_search(&pair).ok()
    }
}

pub fn build_demands(topology: &Topology, flags: DemandFlags) -> DemandSet {
    DemandSet::build(topology, flags)
}

/// One granted `(pair, wavelength, slot)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment {
    pub src: String,
    pub dst: String,
    pub wavelength: Wavelength,
    pub timeslot: TimeSlot,
}

impl Assignment {
    pub fn new(src: impl Into<String>, dst: impl Into<String>, wavelength: u32, timeslot: u32) -> Self {
        Assignment {
            src: src.into(),
            dst: dst.into(),
            wavelength: Wavelength(wavelength),
            timeslot: TimeSlot(timeslot),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AssignmentTable {
    pub assignments: Vec<Assignment>,
    /// [`TopologyConfig::fingerprint`](crate::TopologyConfig::fingerprint) of the instance that produced it.
    pub fingerprint: Option<u64>,
}

impl AssignmentTable {
    pub fn new(assignments: Vec<Assignment>) -> Self {
        AssignmentTable { assignments, fingerprint: None }
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// Sorts rows by (src, dst, wavelength, slot) using the topology's entity
    /// order; names the topology does not know sort last, by name.
    pub fn sort_canonical(&mut self, topology: &Topology) {
        let rank = |name: &str| topology.lookup(name).map_or(usize::MAX, |id| id.0);
        self.assignments.sort_by(|a, b| {
            (rank(&a.src), &a.src, rank(&a.dst), &a.dst, a.wavelength, a.timeslot).cmp(&(
                rank(&b.src),
                &b.src,
                rank(&b.dst),
                &b.dst,
                b.wavelength,
                b.timeslot,
            ))
        });
    }
}

/// Value of the maximized objective: the number of granted records.
pub fn objective(table: &AssignmentTable) -> usize {
    table.assignments.len()
}

/// Wavelengths that route `src`'s attachment onto `dst`'s attachment.
pub fn feasible_wavelengths(topology: &Topology, src: &str, dst: &str) -> Result<Vec<Wavelength>> {
    let s = topology.lookup(src).ok_or_else(|| Error::UnknownEntity(src.into()))?;
    let d = topology.lookup(dst).ok_or_else(|| Error::UnknownEntity(dst.into()))?;
    if s == d {
        return Err(Error::SelfPair(src.into()));
    }
    let (from, to) = (topology.attachment_of(s), topology.attachment_of(d));
    let fabric = topology.fabric();
    Ok(fabric.wavelength_labels().filter(|&w| fabric.route(from, w).map(|(dst, _)| dst) == Ok(to)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationCode {
    /// Unknown entity, self pair, or pair outside the demand set.
    V1,
    /// Wavelength or slot label out of range.
    V2,
    /// Wavelength does not route source to destination.
    V3,
    /// Source-fiber collision on `(attachment, λ, τ)`.
    V4,
    /// Destination-fiber collision on `(attachment, λ, τ)`.
    V5,
    /// Pair holds two grants in one plane.
    V6,
    /// Duplicate record.
    V7,
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub code: ViolationCode,
    /// 0-based row indices into the checked table.
    pub records: Vec<usize>,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Valid => "valid",
            Verdict::Invalid => "invalid",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Number of records not implicated in any violation.
    pub objective: usize,
    /// `coverage[k]` = demands holding exactly `k` clean grants.
    pub coverage: [usize; 3],
}

impl ValidationReport {
    pub fn verdict(&self) -> Verdict {
        if self.violations.is_empty() {
            Verdict::Valid
        } else {
            Verdict::Invalid
        }
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, Copy)]
struct Resolved {
    src: EntityId,
    dst: EntityId,
    src_attachment: usize,
    dst_attachment: usize,
    plane: usize,
    wavelength: Wavelength,
    timeslot: TimeSlot,
}

/// Checks every record of `table` against the topology, the demand set and
/// the collision rules. Findings go in the report; nothing is an error.
pub fn check_table(topology: &Topology, demands: &DemandSet, table: &AssignmentTable) -> ValidationReport {
    let fabric = topology.fabric();
    let mut violations = Vec::new();
    let mut resolved = Vec::with_capacity(table.len());

    for (row, a) in table.assignments.iter().enumerate() {
        let mut flag = |code, message: String| {
            violations.push(Violation { code, records: alloc::vec![row], message });
        };
        let pair = format!("{}->{}", a.src, a.dst);
        let (src, dst) = match (topology.lookup(&a.src), topology.lookup(&a.dst)) {
            (Some(s), Some(d)) => (s, d),
            (None, _) => {
                flag(ViolationCode::V1, format!("record {}: unknown entity `{}`", row + 1, a.src));
                continue;
            }
            (_, None) => {
                flag(ViolationCode::V1, format!("record {}: unknown entity `{}`", row + 1, a.dst));
                continue;
            }
        };
        if src == dst {
            flag(ViolationCode::V1, format!("record {}: self pair {pair}", row + 1));
            continue;
        }
        if demands.position(Demand { src, dst }).is_none() {
            flag(ViolationCode::V1, format!("record {}: {pair} is not a demand", row + 1));
            continue;
        }
        let w_ok = (1..=topology.wavelengths()).contains(&(a.wavelength.0 as usize));
        let t_ok = (1..=topology.time_slots()).contains(&(a.timeslot.0 as usize));
        if !w_ok || !t_ok {
            let what = if !w_ok {
                format!("{} outside λ1..λ{}", a.wavelength, topology.wavelengths())
            } else {
                format!("{} outside τ1..τ{}", a.timeslot, topology.time_slots())
            };
            flag(ViolationCode::V2, format!("record {}: {pair} {what}", row + 1));
            continue;
        }
        let (src_attachment, dst_attachment) = (topology.attachment_of(src), topology.attachment_of(dst));
        let (reached, plane) = fabric.route(src_attachment, a.wavelength).expect("range checked above");
        if reached != dst_attachment {
            flag(
                ViolationCode::V3,
                format!(
                    "record {}: {pair} on {} reaches {}, not {}",
                    row + 1,
                    a.wavelength,
                    topology.attachments()[reached].name,
                    topology.attachments()[dst_attachment].name
                ),
            );
            continue;
        }
        resolved.push((
            row,
            Resolved {
                src,
                dst,
                src_attachment,
                dst_attachment,
                plane,
                wavelength: a.wavelength,
                timeslot: a.timeslot,
            },
        ));
    }

    let mut first_seen = BTreeMap::new();
    let mut unique = Vec::with_capacity(resolved.len());
    for &(row, r) in &resolved {
        match first_seen.entry((r.src, r.dst, r.wavelength, r.timeslot)) {
            alloc::collections::btree_map::Entry::Occupied(e) => violations.push(Violation {
                code: ViolationCode::V7,
                records: alloc::vec![row],
                message: format!("record {} duplicates record {}", row + 1, e.get() + 1),
            }),
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(row);
                unique.push((row, r));
            }
        }
    }

    let mut by_source: BTreeMap<_, Vec<usize>> = BTreeMap::new();
    let mut by_destination: BTreeMap<_, Vec<usize>> = BTreeMap::new();
    let mut by_plane: BTreeMap<_, Vec<usize>> = BTreeMap::new();
    for &(row, r) in &unique {
        by_source.entry((r.src_attachment, r.wavelength, r.timeslot)).or_default().push(row);
        by_destination.entry((r.dst_attachment, r.wavelength, r.timeslot)).or_default().push(row);
        by_plane.entry((r.src, r.dst, r.plane)).or_default().push(row);
    }
    let rows = |rs: &[usize]| rs.iter().map(|r| format!("{}", r + 1)).collect::<Vec<_>>().join(",");
    for ((attachment, w, t), rs) in by_source.iter().filter(|(_, rs)| rs.len() > 1) {
        violations.push(Violation {
            code: ViolationCode::V4,
            records: rs.clone(),
            message: format!(
                "records {} share source fiber {} on {w} {t}",
                rows(rs),
                topology.attachments()[*attachment].name
            ),
        });
    }
    for ((attachment, w, t), rs) in by_destination.iter().filter(|(_, rs)| rs.len() > 1) {
        violations.push(Violation {
            code: ViolationCode::V5,
            records: rs.clone(),
            message: format!(
                "records {} share destination fiber {} on {w} {t}",
                rows(rs),
                topology.attachments()[*attachment].name
            ),
        });
    }
    for ((src, dst, plane), rs) in by_plane.iter().filter(|(_, rs)| rs.len() > 1) {
        violations.push(Violation {
            code: ViolationCode::V6,
            records: rs.clone(),
            message: format!(
                "records {} give {}->{} more than one grant on plane {plane}",
                rows(rs),
                topology.entity(*src).name,
                topology.entity(*dst).name
            ),
        });
    }
    violations.sort_by(|a, b| (a.code, &a.records).cmp(&(b.code, &b.records)));

    let flagged: BTreeSet<usize> = violations.iter().flat_map(|v| v.records.iter().copied()).collect();
    let mut per_demand = alloc::vec![0usize; demands.len()];
    let mut clean = 0;
    for &(row, r) in &unique {
        if flagged.contains(&row) {
            continue;
        }
        clean += 1;
        if let Some(i) = demands.position(Demand { src: r.src, dst: r.dst }) {
            per_demand[i] += 1;
        }
    }
    let mut coverage = [0; 3];
    for count in per_demand {
        coverage[count.min(2)] += 1;
    }
    ValidationReport { violations, objective: clean, coverage }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FiberSide {
    Source,
    Destination,
}

/// An attachment fiber carrying one wavelength, seen from one end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConflictKey {
    pub side: FiberSide,
    pub attachment: usize,
    pub wavelength: Wavelength,
}

/// Demands contending for each `(attachment fiber, λ)`. A group of size `k`
/// needs at least `min(k, T)` slots of that wavelength.
pub fn conflict_groups(topology: &Topology, demands: &DemandSet) -> BTreeMap<ConflictKey, Vec<Demand>> {
    let fabric = topology.fabric();
    let mut groups: BTreeMap<ConflictKey, Vec<Demand>> = BTreeMap::new();
    for &demand in demands.pairs() {
        let (src, dst) = (topology.attachment_of(demand.src), topology.attachment_of(demand.dst));
        for plane in 0..fabric.planes() {
            let wavelength = fabric.wavelength_for(src, dst, plane);
            for (side, attachment) in [(FiberSide::Source, src), (FiberSide::Destination, dst)] {
                groups.entry(ConflictKey { side, attachment, wavelength }).or_default().push(demand);
            }
        }
    }
    groups
}
