//! Slot-level replay of a static assignment table over repeating TDM frames.
//!
//! Each demand owns a FIFO queue. Arrivals land at slot boundaries; in slot
//! `τ` a pair holding a grant on `τ` sends one packet if its queue is
//! non-empty. Delay is measured in slots from arrival to transmission.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rwta::{check_table, AssignmentTable, Demand, DemandSet};
use crate::topology::{EntityId, Segment, TimeSlot, Topology, Wavelength};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum TrafficModel {
    /// `k` packets per pair at the start of every frame.
    Uniform { packets: u32 },
    /// One packet per pair per slot with probability `p`.
    Bernoulli { probability: f64, seed: u64 },
    /// One packet per pair per frame, `multiplier` packets for pairs destined to `target`.
    Hotspot { target: String, multiplier: u32 },
}

impl TrafficModel {
    fn validate(&self, topology: &Topology) -> Result<Option<EntityId>> {
        match self {
            TrafficModel::Uniform { .. } => Ok(None),
            TrafficModel::Bernoulli { probability, .. } => {
                if !(0.0..=1.0).contains(probability) {
                    return Err(Error::config("probability", "must lie in [0, 1]"));
                }
                Ok(None)
            }
            TrafficModel::Hotspot { target, multiplier } => {
                if *multiplier < 1 {
                    return Err(Error::config("multiplier", "must be ≥ 1"));
                }
                topology.lookup(target).map(Some).ok_or_else(|| Error::UnknownEntity(target.clone()))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SimOptions {
    /// Record every transmission for [`collision_audit`].
    pub trace: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairMetrics {
    pub src: String,
    pub dst: String,
    pub grants: usize,
    pub offered: u64,
    pub delivered: u64,
    pub queued: u64,
    /// Mean over delivered packets; 0 when nothing was delivered.
    pub mean_delay: f64,
    pub max_delay: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiberMetrics {
    pub attachment: usize,
    pub name: String,
    pub direction: Direction,
    /// Occupied `(λ, τ, frame)` cells.
    pub occupied: u64,
    pub utilization: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub frames: usize,
    pub slots_per_frame: usize,
    pub pairs: Vec<PairMetrics>,
    pub fibers: Vec<FiberMetrics>,
    pub offered: u64,
    pub delivered: u64,
    pub queued: u64,
}

/// One packet sent on a granted `(λ, τ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transmission {
    /// Global slot index, counting from 0 across frames.
    pub slot: u64,
    pub timeslot: TimeSlot,
    pub src: String,
    pub dst: String,
    pub wavelength: Wavelength,
}

#[derive(Debug, Clone)]
struct PairState {
    offered: u64,
    delivered: u64,
    delay_sum: u64,
    max_delay: u64,
    /// Arrival slot of every waiting packet.
    queue: VecDeque<u64>,
}

/// Runs `frames` TDM frames. The table must pass [`check_table`]; traffic is
/// offered to every demand, whether or not it holds a grant.
pub fn simulate(
    topology: &Topology,
    demands: &DemandSet,
    table: &AssignmentTable,
    traffic: &TrafficModel,
    frames: usize,
    options: SimOptions,
) -> Result<(Metrics, Option<Vec<Transmission>>)> {
    if frames < 1 {
        return Err(Error::config("frames", "must be ≥ 1"));
    }
    let report = check_table(topology, demands, table);
    if !report.is_valid() {
        return Err(Error::InvalidTable { violations: report.violations.len() });
    }
    let hotspot = traffic.validate(topology)?;

    let slots = topology.time_slots();
    let wavelengths = topology.wavelengths();
    let n = topology.n();

    // grants[slot] = (demand, wavelength) pairs allowed to send in that slot
    let mut grants: Vec<Vec<(usize, Wavelength)>> = vec![Vec::new(); slots];
    let mut grant_count = vec![0usize; demands.len()];
    for a in &table.assignments {
        let pair = Demand {
            src: topology.lookup(&a.src).expect("validated"),
            dst: topology.lookup(&a.dst).expect("validated"),
        };
        let demand = demands.position(pair).expect("validated");
        grants[a.timeslot.index()].push((demand, a.wavelength));
        grant_count[demand] += 1;
    }
    for slot in &mut grants {
        slot.sort();
    }

    let mut state =
        vec![PairState { offered: 0, delivered: 0, delay_sum: 0, max_delay: 0, queue: VecDeque::new() }; demands.len()];
    let mut occupied = vec![[0u64; 2]; n];
    let mut trace = options.trace.then(Vec::new);
    let mut rng = match traffic {
        TrafficModel::Bernoulli { seed, .. } => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    };

    for frame in 0..frames {
        for (slot, granted) in grants.iter().enumerate() {
            let now = (frame * slots + slot) as u64;
            for (demand, pair) in demands.pairs().iter().enumerate() {
                let arrivals = match traffic {
                    TrafficModel::Uniform { packets } if slot == 0 => *packets,
                    TrafficModel::Hotspot { multiplier, .. } if slot == 0 => {
                        if Some(pair.dst) == hotspot {
                            *multiplier
                        } else {
                            1
                        }
                    }
                    TrafficModel::Bernoulli { probability, .. } => {
                        let rng = rng.as_mut().expect("seeded for bernoulli");
                        u32::from(rng.random_bool(*probability))
                    }
                    _ => 0,
                };
                let s = &mut state[demand];
                s.offered += arrivals as u64;
                s.queue.extend(core::iter::repeat_n(now, arrivals as usize));
            }

            for &(demand, wavelength) in granted {
                let s = &mut state[demand];
                let Some(arrival) = s.queue.pop_front() else { continue };
                let delay = now - arrival;
                s.delivered += 1;
                s.delay_sum += delay;
                s.max_delay = s.max_delay.max(delay);

                let pair = demands.pairs()[demand];
                occupied[topology.attachment_of(pair.src)][0] += 1;
                occupied[topology.attachment_of(pair.dst)][1] += 1;
                if let Some(trace) = trace.as_mut() {
                    trace.push(Transmission {
                        slot: now,
                        timeslot: TimeSlot::from_index(slot),
                        src: topology.entity(pair.src).name.clone(),
                        dst: topology.entity(pair.dst).name.clone(),
                        wavelength,
                    });
                }
            }
        }
    }

    let pairs: Vec<PairMetrics> = demands
        .pairs()
        .iter()
        .zip(&state)
        .zip(&grant_count)
        .map(|((pair, s), &grants)| PairMetrics {
            src: topology.entity(pair.src).name.clone(),
            dst: topology.entity(pair.dst).name.clone(),
            grants,
            offered: s.offered,
            delivered: s.delivered,
            queued: s.queue.len() as u64,
            mean_delay: if s.delivered == 0 { 0.0 } else { s.delay_sum as f64 / s.delivered as f64 },
            max_delay: s.max_delay,
        })
        .collect();

    let cells = (wavelengths * slots * frames) as f64;
    let mut fibers = Vec::with_capacity(2 * n);
    for attachment in topology.attachments() {
        for (i, direction) in [Direction::Up, Direction::Down].into_iter().enumerate() {
            let count = occupied[attachment.index][i];
            fibers.push(FiberMetrics {
                attachment: attachment.index,
                name: attachment.name.clone(),
                direction,
                occupied: count,
                utilization: count as f64 / cells,
            });
        }
    }

    let metrics = Metrics {
        frames,
        slots_per_frame: slots,
        offered: pairs.iter().map(|p| p.offered).sum(),
        delivered: pairs.iter().map(|p| p.delivered).sum(),
        queued: pairs.iter().map(|p| p.queued).sum(),
        pairs,
        fibers,
    };
    Ok((metrics, trace))
}

/// Two or more transmissions in one slot sharing fabric segments on one wavelength.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Breach {
    pub slot: u64,
    pub wavelength: Wavelength,
    /// Indices into the audited trace.
    pub transmissions: Vec<usize>,
    pub segments: Vec<Segment>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AuditVerdict {
    pub breaches: Vec<Breach>,
    /// Trace entries whose endpoints or wavelength could not be routed.
    pub unroutable: Vec<usize>,
}

impl AuditVerdict {
    pub fn is_clean(&self) -> bool {
        self.breaches.is_empty() && self.unroutable.is_empty()
    }
}

/// Re-derives every transmission's path and reports each set of transmissions
/// that share a segment on the same `(slot, λ)`.
pub fn collision_audit(topology: &Topology, trace: &[Transmission]) -> AuditVerdict {
    let fabric = topology.fabric();
    let mut verdict = AuditVerdict::default();
    let mut users: BTreeMap<(u64, Wavelength, Segment), Vec<usize>> = BTreeMap::new();
    for (i, tx) in trace.iter().enumerate() {
        let path =
            topology.lookup(&tx.src).and_then(|src| fabric.port_path(topology.attachment_of(src), tx.wavelength).ok());
        let Some(path) = path else {
            verdict.unroutable.push(i);
            continue;
        };
        for segment in path {
            users.entry((tx.slot, tx.wavelength, segment)).or_default().push(i);
        }
    }

    let mut grouped: BTreeMap<(u64, Wavelength, Vec<usize>), Vec<Segment>> = BTreeMap::new();
    for ((slot, wavelength, segment), txs) in users {
        if txs.len() > 1 {
            grouped.entry((slot, wavelength, txs)).or_default().push(segment);
        }
    }
    verdict.breaches = grouped
        .into_iter()
        .map(|((slot, wavelength, transmissions), segments)| Breach { slot, wavelength, transmissions, segments })
        .collect();
    verdict
}

/// A `scope,name,value` row of the metrics report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub scope: String,
    pub name: String,
    pub value: f64,
}

/// Per-fiber utilization rows followed by the aggregate (mean over fibers).
pub fn utilization_summary(metrics: &Metrics) -> Vec<ReportRow> {
    let mut rows: Vec<ReportRow> = metrics
        .fibers
        .iter()
        .map(|f| ReportRow {
            scope: format!("fiber:{}:{}", f.name, f.direction.as_str()),
            name: "utilization".into(),
            value: f.utilization,
        })
        .collect();
    let mean = if rows.is_empty() { 0.0 } else { rows.iter().map(|r| r.value).sum::<f64>() / rows.len() as f64 };
    rows.push(ReportRow { scope: "aggregate".into(), name: "utilization".into(), value: mean });
    rows
}
