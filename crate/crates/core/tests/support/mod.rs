//! Exhaustive grant enumeration used as an independent optimum oracle.

use std::collections::HashSet;

use cawgr_core::{Demand, DemandSet, Topology};

/// Grants available to one pair: every `(λ, plane)` whose cyclic shift lands
/// on the destination, found by scanning all labels.
fn grant_options(topology: &Topology, pair: Demand) -> Vec<(u32, usize)> {
    let n = topology.n();
    let (a, b) = (topology.attachment_of(pair.src), topology.attachment_of(pair.dst));
    (1..=2 * n as u32).filter(|&w| (a + (w as usize - 1)) % n == b).map(|w| (w, (w as usize - 1) / n)).collect()
}

struct Enumerator {
    /// (src attachment, dst attachment, λ) per variable
    vars: Vec<(usize, usize, u32)>,
    slots: u32,
    /// occupancy per (side, attachment, λ, τ), flattened
    used: Vec<bool>,
    wavelengths: usize,
    best: usize,
}

impl Enumerator {
    fn cell(&self, side: usize, attachment: usize, w: u32, t: u32) -> usize {
        let slots = self.slots as usize;
        let per_side = self.used.len() / 2;
        side * per_side + (attachment * self.wavelengths + (w as usize - 1)) * slots + (t as usize - 1)
    }

    /// Visits every conflict-free choice of "no grant" or a slot per variable.
    fn run(&mut self, i: usize, count: usize) {
        if i == self.vars.len() {
            self.best = self.best.max(count);
            return;
        }
        self.run(i + 1, count);
        let (src, dst, w) = self.vars[i];
        for t in 1..=self.slots {
            let up = self.cell(0, src, w, t);
            let down = self.cell(1, dst, w, t);
            if self.used[up] || self.used[down] {
                continue;
            }
            self.used[up] = true;
            self.used[down] = true;
            self.run(i + 1, count + 1);
            self.used[up] = false;
            self.used[down] = false;
        }
    }
}

pub fn brute_force(topology: &Topology, demands: &DemandSet) -> usize {
    let mut vars = Vec::new();
    for &pair in demands.pairs() {
        let options = grant_options(topology, pair);
        // one variable per plane caps each pair at one grant per plane
        let planes: HashSet<usize> = options.iter().map(|o| o.1).collect();
        assert_eq!(planes.len(), options.len());
        for (w, _) in options {
            vars.push((topology.attachment_of(pair.src), topology.attachment_of(pair.dst), w));
        }
    }
    let (n, w, t) = (topology.n(), topology.wavelengths(), topology.time_slots());
    let mut e = Enumerator { vars, slots: t as u32, used: vec![false; 2 * n * w * t], wavelengths: w, best: 0 };
    e.run(0, 0);
    e.best
}

pub fn subsets(pairs: &[Demand], max: usize) -> Vec<Vec<Demand>> {
    let mut out = vec![Vec::new()];
    for &p in pairs {
        let grown: Vec<_> = out
            .iter()
            .filter(|s| s.len() < max)
            .map(|s| {
                let mut s = s.clone();
                s.push(p);
                s
            })
            .collect();
        out.extend(grown);
    }
    out
}
