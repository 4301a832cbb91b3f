//! Data-center model: cells of racks behind special servers, OLT switches, and
//! the two-plane cascaded-AWGR fabric that connects their attachments.
//!
//! Every cell and every OLT owns one attachment (an AWGR port group). Cells
//! come first, so with `c` cells attachment `c + k - 1` belongs to `olt<k>`.
//! Each plane is an `N x N` cyclic router: wavelength `λ` entering at
//! attachment `a` leaves at `(a + (λ - 1) mod N) mod N` on plane
//! `(λ - 1) div N`. The fabric therefore carries `W = 2N` wavelengths and every
//! ordered attachment pair is reachable on exactly two of them.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::hash::Hasher;

use crate::{Error, Result};

/// Number of parallel cascaded-AWGR planes.
pub const PLANES: usize = 2;

/// Time slots per TDM frame when a config does not say otherwise.
pub const DEFAULT_TIME_SLOTS: usize = 10;

/// A 1-based wavelength label (`λ1..λW`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Wavelength(pub u32);

/// A 1-based time-slot label (`τ1..τT`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimeSlot(pub u32);

impl Wavelength {
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn from_index(index: usize) -> Self {
        Wavelength(index as u32 + 1)
    }
}

impl TimeSlot {
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn from_index(index: usize) -> Self {
        TimeSlot(index as u32 + 1)
    }
}

impl fmt::Display for Wavelength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "λ{}", self.0)
    }
}

impl fmt::Display for TimeSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "τ{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TopologyConfig {
    pub cells: usize,
    pub racks_per_cell: usize,
    pub olts: usize,
    pub time_slots: usize,
    pub planes: usize,
}

impl TopologyConfig {
    pub fn new(cells: usize, racks_per_cell: usize, olts: usize) -> Self {
        TopologyConfig { cells, racks_per_cell, olts, time_slots: DEFAULT_TIME_SLOTS, planes: PLANES }
    }

    pub fn with_time_slots(mut self, time_slots: usize) -> Self {
        self.time_slots = time_slots;
        self
    }

    /// Stable 64-bit FNV-1a digest of the instance parameters.
    pub fn fingerprint(&self) -> u64 {
        let mut hasher = fnv::FnvHasher::default();
        for v in [self.cells, self.racks_per_cell, self.olts, self.time_slots, self.planes] {
            hasher.write_u64(v as u64);
        }
        hasher.finish()
    }

    fn validate(&self) -> Result<()> {
        if self.cells < 1 {
            return Err(Error::config("cells", "must be ≥ 1"));
        }
        if self.racks_per_cell < 1 {
            return Err(Error::config("racks_per_cell", "must be ≥ 1"));
        }
        if self.cells + self.olts < 2 {
            return Err(Error::config("olts", "cells + olts must be ≥ 2"));
        }
        if self.time_slots < 1 {
            return Err(Error::config("time_slots", "must be ≥ 1"));
        }
        if self.planes != PLANES {
            return Err(Error::config("planes", format!("must be {PLANES}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityKind {
    Rack,
    Olt,
}

/// A communicating endpoint: a rack inside a cell, or an OLT switch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entity {
    pub kind: EntityKind,
    /// 1-based cell number; `None` for OLTs.
    pub cell: Option<usize>,
    /// 1-based index within the cell, or among the OLTs.
    pub local: usize,
    pub name: String,
    pub attachment: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attachment {
    pub index: usize,
    /// `cell<i>` or `olt<k>`.
    pub name: String,
    pub hosted: Vec<String>,
}

/// One hop of a lightpath through a plane of the fabric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Segment {
    Uplink { attachment: usize, plane: usize },
    Tier1In { plane: usize, port: usize },
    Tier1Out { plane: usize, port: usize },
    InterTier { plane: usize, port: usize },
    Tier2In { plane: usize, port: usize },
    Tier2Out { plane: usize, port: usize },
    Downlink { attachment: usize, plane: usize },
}

/// Wavelength-routing function of the two cascaded-AWGR planes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FabricModel {
    n: usize,
}

impl FabricModel {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::config("n", "attachment count must be ≥ 2"));
        }
        Ok(FabricModel { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn planes(&self) -> usize {
        PLANES
    }

    pub fn wavelengths(&self) -> usize {
        PLANES * self.n
    }

    pub fn wavelength_labels(&self) -> impl Iterator<Item = Wavelength> {
        (1..=self.wavelengths() as u32).map(Wavelength)
    }

    fn check_wavelength(&self, wavelength: Wavelength) -> Result<()> {
        if wavelength.0 < 1 || wavelength.0 as usize > self.wavelengths() {
            return Err(Error::Range {
                what: "wavelength",
                value: wavelength.0 as u64,
                min: 1,
                max: self.wavelengths() as u64,
            });
        }
        Ok(())
    }

    fn check_attachment(&self, attachment: usize) -> Result<()> {
        if attachment >= self.n {
            return Err(Error::Range { what: "attachment", value: attachment as u64, min: 0, max: self.n as u64 - 1 });
        }
        Ok(())
    }

    /// Cyclic port shift applied by `wavelength`.
    pub fn offset_of(&self, wavelength: Wavelength) -> Result<usize> {
        self.check_wavelength(wavelength)?;
        Ok(wavelength.index() % self.n)
    }

    pub fn plane_of(&self, wavelength: Wavelength) -> Result<usize> {
        self.check_wavelength(wavelength)?;
        Ok(wavelength.index() / self.n)
    }

    /// Destination attachment and plane reached from `src` on `wavelength`.
    pub fn route(&self, src: usize, wavelength: Wavelength) -> Result<(usize, usize)> {
        self.check_attachment(src)?;
        let offset = self.offset_of(wavelength)?;
        Ok(((src + offset) % self.n, self.plane_of(wavelength)?))
    }

    /// The wavelength that carries `src -> dst` on `plane`.
    pub fn wavelength_for(&self, src: usize, dst: usize, plane: usize) -> Wavelength {
        debug_assert!(src < self.n && dst < self.n && plane < PLANES);
        let offset = (dst + self.n - src) % self.n;
        Wavelength::from_index(plane * self.n + offset)
    }

    /// Segments traversed from `src` on `wavelength`. Tier 1 applies the
    /// cyclic shift and tier 2 passes straight through within the plane.
    pub fn port_path(&self, src: usize, wavelength: Wavelength) -> Result<[Segment; 7]> {
        let (dst, plane) = self.route(src, wavelength)?;
        let shifted = (src + self.offset_of(wavelength)?) % self.n;
        Ok([
            Segment::Uplink { attachment: src, plane },
            Segment::Tier1In { plane, port: src },
            Segment::Tier1Out { plane, port: shifted },
            Segment::InterTier { plane, port: shifted },
            Segment::Tier2In { plane, port: shifted },
            Segment::Tier2Out { plane, port: dst },
            Segment::Downlink { attachment: dst, plane },
        ])
    }
}

/// Wavelengths needed for full connectivity across `n` attachments.
/// Without intra-cell traffic the two loopback wavelengths are dropped.
pub fn required_wavelengths(n: usize, include_intra_cell: bool) -> Result<usize> {
    if n < 2 {
        return Err(Error::config("n", "attachment count must be ≥ 2"));
    }
    Ok(if include_intra_cell { PLANES * n } else { PLANES * (n - 1) })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    config: TopologyConfig,
    entities: Vec<Entity>,
    attachments: Vec<Attachment>,
    fabric: FabricModel,
    by_name: BTreeMap<String, EntityId>,
}

pub fn build_topology(config: TopologyConfig) -> Result<Topology> {
    config.validate()?;
    let n = config.cells + config.olts;
    let fabric = FabricModel::new(n)?;

    let mut entities = Vec::with_capacity(config.cells * config.racks_per_cell + config.olts);
    let mut attachments = Vec::with_capacity(n);
    for cell in 1..=config.cells {
        let attachment = cell - 1;
        let mut hosted = Vec::with_capacity(config.racks_per_cell);
        for rack in 1..=config.racks_per_cell {
            let name = format!("cell{cell}.rack{rack}");
            hosted.push(name.clone());
            entities.push(Entity { kind: EntityKind::Rack, cell: Some(cell), local: rack, name, attachment });
        }
        attachments.push(Attachment { index: attachment, name: format!("cell{cell}"), hosted });
    }
    for olt in 1..=config.olts {
        let attachment = config.cells + olt - 1;
        let name = format!("olt{olt}");
        attachments.push(Attachment { index: attachment, name: name.clone(), hosted: alloc::vec![name.clone()] });
        entities.push(Entity { kind: EntityKind::Olt, cell: None, local: olt, name, attachment });
    }

    let by_name = entities.iter().enumerate().map(|(i, e)| (e.name.clone(), EntityId(i))).collect();
    Ok(Topology { config, entities, attachments, fabric, by_name })
}

impl Topology {
    pub fn config(&self) -> &TopologyConfig {
        &self.config
    }

    pub fn fabric(&self) -> &FabricModel {
        &self.fabric
    }

    pub fn n(&self) -> usize {
        self.fabric.n()
    }

    pub fn wavelengths(&self) -> usize {
        self.fabric.wavelengths()
    }

    pub fn time_slots(&self) -> usize {
        self.config.time_slots
    }

    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    pub fn attachments(&self) -> &[Attachment] {
        &self.attachments
    }

    pub fn entity(&self, id: EntityId) -> &Entity {
        &self.entities[id.0]
    }

    pub fn lookup(&self, name: &str) -> Option<EntityId> {
        self.by_name.get(name).copied()
    }

    pub fn attachment_of(&self, id: EntityId) -> usize {
        self.entities[id.0].attachment
    }

    pub fn fingerprint(&self) -> u64 {
        self.config.fingerprint()
    }

    /// Same fabric and entities with a different frame length.
    pub fn with_time_slots(&self, time_slots: usize) -> Result<Topology> {
        build_topology(self.config.with_time_slots(time_slots))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairReach {
    pub src: usize,
    pub dst: usize,
    pub wavelengths: Vec<Wavelength>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachabilityReport {
    pub n: usize,
    /// Row-major over `(src, dst)`, self pairs included.
    pub pairs: Vec<PairReach>,
    pub failures: Vec<(usize, usize)>,
}

impl ReachabilityReport {
    pub fn is_success(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn wavelengths(&self, src: usize, dst: usize) -> &[Wavelength] {
        &self.pairs[src * self.n + dst].wavelengths
    }
}

/// Enumerates the fabric and reports, per ordered attachment pair, which
/// wavelengths connect it. Succeeds when every pair has one wavelength per
/// plane and the two differ by `N`.
pub fn all_to_all_check(topology: &Topology) -> ReachabilityReport {
    let fabric = topology.fabric();
    let n = fabric.n();
    let mut pairs: Vec<PairReach> =
        (0..n * n).map(|i| PairReach { src: i / n, dst: i % n, wavelengths: Vec::new() }).collect();
    for src in 0..n {
        for wavelength in fabric.wavelength_labels() {
            let (dst, _) = fabric.route(src, wavelength).expect("enumerated inputs are in range");
            pairs[src * n + dst].wavelengths.push(wavelength);
        }
    }
    let failures = pairs.iter().filter(|p| !dual_covered(fabric, &p.wavelengths)).map(|p| (p.src, p.dst)).collect();
    ReachabilityReport { n, pairs, failures }
}

fn dual_covered(fabric: &FabricModel, wavelengths: &[Wavelength]) -> bool {
    match wavelengths {
        [a, b] => {
            let planes = (fabric.plane_of(*a), fabric.plane_of(*b));
            matches!(planes, (Ok(0), Ok(1))) && b.0 - a.0 == fabric.n() as u32
        }
        _ => false,
    }
}
