//! Exact solver against exhaustive enumeration on every small instance.

mod support;

use cawgr_core::{build_topology, solve_exact, Demand, DemandSet, EntityId, Instance, SolveStatus, TopologyConfig};
use support::{brute_force, subsets};

#[test]
fn exact_matches_enumeration_on_small_instances() {
    let configs = [
        TopologyConfig::new(2, 1, 0),
        TopologyConfig::new(2, 2, 0),
        TopologyConfig::new(1, 1, 1),
        TopologyConfig::new(1, 2, 1),
        TopologyConfig::new(1, 3, 1),
    ];
    let mut checked = 0;
    for config in configs {
        for slots in 1..=2 {
            let topology = build_topology(config.with_time_slots(slots)).unwrap();
            assert!(topology.wavelengths() <= 4);
            let count = topology.entities().len();
            let all: Vec<Demand> = (0..count)
                .flat_map(|s| {
                    (0..count).filter(move |&d| d != s).map(move |d| Demand { src: EntityId(s), dst: EntityId(d) })
                })
                .collect();
            for subset in subsets(&all, 4) {
                let demands = DemandSet::from_pairs(&topology, subset).unwrap();
                let outcome = solve_exact(Instance::new(&topology, &demands).unwrap(), None);
                assert_eq!(outcome.status, SolveStatus::ProvenOptimal);
                assert_eq!(
                    outcome.objective,
                    brute_force(&topology, &demands),
                    "config {config:?} pairs {:?}",
                    demands.pairs()
                );
                checked += 1;
            }
        }
    }
    assert!(checked > 1000);
}

#[test]
fn enumeration_reference_values() {
    let tiny = build_topology(TopologyConfig::new(2, 1, 0).with_time_slots(1)).unwrap();
    let d = DemandSet::build(&tiny, Default::default());
    assert_eq!(brute_force(&tiny, &d), 4);

    // four demands out of cell 1 into cell 2 share one source fiber per plane
    let t = build_topology(TopologyConfig::new(2, 2, 0).with_time_slots(1)).unwrap();
    let pairs = [(0, 2), (0, 3), (1, 2), (1, 3)].map(|(s, d)| Demand { src: EntityId(s), dst: EntityId(d) });
    let d = DemandSet::from_pairs(&t, pairs).unwrap();
    assert_eq!(brute_force(&t, &d), 2);
    let t2 = t.with_time_slots(2).unwrap();
    assert_eq!(brute_force(&t2, &d), 4);
}
