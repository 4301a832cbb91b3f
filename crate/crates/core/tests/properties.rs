use std::collections::BTreeMap;

use cawgr_core::{
    all_to_all_check, build_topology, check_table, collision_audit, required_wavelengths, simulate, solve_exact,
    solve_greedy, AssignmentTable, DemandFlags, DemandSet, FabricModel, Instance, SimOptions, TopologyConfig,
    TrafficModel, Wavelength,
};
use proptest::prelude::*;

#[test]
fn every_wavelength_permutes_attachments() {
    for n in 2..=64 {
        let fabric = FabricModel::new(n).unwrap();
        for w in fabric.wavelength_labels() {
            let mut hit = vec![false; n];
            for a in 0..n {
                let (dst, _) = fabric.route(a, w).unwrap();
                assert!(!hit[dst], "N={n} {w} maps two sources onto {dst}");
                hit[dst] = true;
            }
        }
    }
}

#[test]
fn every_pair_is_dual_covered() {
    for n in 2..=64 {
        let t = build_topology(TopologyConfig::new(n, 1, 0)).unwrap();
        let report = all_to_all_check(&t);
        assert!(report.is_success(), "N={n}: {:?}", report.failures);
        for p in &report.pairs {
            let [a, b] = p.wavelengths[..] else { panic!("N={n}") };
            assert_eq!(b.0 - a.0, n as u32);
            assert_ne!(t.fabric().plane_of(a).unwrap(), t.fabric().plane_of(b).unwrap());
        }
    }
}

#[test]
fn intra_cell_adds_two_wavelengths() {
    for n in 2..=256 {
        assert_eq!(required_wavelengths(n, true).unwrap() - required_wavelengths(n, false).unwrap(), 2);
    }
}

fn config() -> impl Strategy<Value = TopologyConfig> {
    (1usize..=3, 1usize..=3, 0usize..=3, 1usize..=4)
        .prop_filter("two attachments", |(c, _, o, _)| c + o >= 2)
        .prop_map(|(c, r, o, t)| TopologyConfig::new(c, r, o).with_time_slots(t))
}

fn flags() -> impl Strategy<Value = DemandFlags> {
    (any::<bool>(), any::<bool>()).prop_map(|(i, o)| DemandFlags { include_intra_cell: i, include_olt_pairs: o })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn topology_is_deterministic(c in config()) {
        prop_assert_eq!(build_topology(c).unwrap(), build_topology(c).unwrap());
    }

    #[test]
    fn inverse_wavelength_agrees_with_route(n in 2usize..40, src in 0usize..40, dst in 0usize..40, plane in 0usize..2) {
        let (src, dst) = (src % n, dst % n);
        let fabric = FabricModel::new(n).unwrap();
        let w = fabric.wavelength_for(src, dst, plane);
        prop_assert_eq!(fabric.route(src, w).unwrap(), (dst, plane));
    }

    #[test]
    fn solver_tables_validate(c in config(), f in flags(), seed in any::<u64>()) {
        let t = build_topology(c).unwrap();
        let d = DemandSet::build(&t, f);
        let instance = Instance::new(&t, &d).unwrap();
        let exact = solve_exact(instance, None);
        let greedy = solve_greedy(instance, seed);
        for out in [&exact, &greedy] {
            let report = check_table(&t, &d, &out.table);
            prop_assert!(report.is_valid(), "{:?}", report.violations);
            prop_assert_eq!(report.objective, out.objective);
            prop_assert!(out.objective <= 2 * d.len());
        }
        prop_assert!(greedy.objective <= exact.objective);

        // fully served pairs own two wavelengths N apart
        let mut per_pair: BTreeMap<(&str, &str), Vec<Wavelength>> = BTreeMap::new();
        for a in &exact.table.assignments {
            per_pair.entry((a.src.as_str(), a.dst.as_str())).or_default().push(a.wavelength);
        }
        for ws in per_pair.values() {
            prop_assert!(ws.len() <= 2);
            if let [a, b] = ws[..] {
                prop_assert_eq!(b.0 - a.0, t.n() as u32);
            }
        }
    }

    #[test]
    fn objective_grows_with_frame_length(c in config(), f in flags()) {
        let t = build_topology(c).unwrap();
        let longer = t.with_time_slots(c.time_slots + 1).unwrap();
        let d = DemandSet::build(&t, f);
        let a = solve_exact(Instance::new(&t, &d).unwrap(), None).objective;
        let b = solve_exact(Instance::new(&longer, &d).unwrap(), None).objective;
        prop_assert!(b >= a);
    }

    #[test]
    fn exact_solver_is_deterministic(c in config(), f in flags()) {
        let t = build_topology(c).unwrap();
        let d = DemandSet::build(&t, f);
        let a = solve_exact(Instance::new(&t, &d).unwrap(), None);
        let b = solve_exact(Instance::new(&t, &d).unwrap(), None);
        prop_assert_eq!(a.table, b.table);
        prop_assert_eq!(a.stats.nodes, b.stats.nodes);
    }

    #[test]
    fn validation_ignores_row_order(
        c in config(),
        rows in prop::collection::vec((0usize..12, 0usize..12, 1u32..=8, 1u32..=5), 0..24),
        shuffle_seed in any::<u64>(),
    ) {
        let t = build_topology(c).unwrap();
        let d = DemandSet::build(&t, DemandFlags::default());
        let names: Vec<_> = t.entities().iter().map(|e| e.name.clone()).collect();
        let assignments: Vec<_> = rows
            .iter()
            .map(|&(s, dd, w, slot)| cawgr_core::Assignment::new(
                names[s % names.len()].clone(),
                names[dd % names.len()].clone(),
                w,
                slot,
            ))
            .collect();
        let mut permuted = assignments.clone();
        // deterministic Fisher-Yates driven by the seed
        let mut state = shuffle_seed | 1;
        for i in (1..permuted.len()).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            permuted.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let a = check_table(&t, &d, &AssignmentTable::new(assignments));
        let b = check_table(&t, &d, &AssignmentTable::new(permuted));
        prop_assert_eq!(a.verdict(), b.verdict());
        prop_assert_eq!(a.objective, b.objective);
        prop_assert_eq!(a.coverage, b.coverage);
        let mut ca: Vec<_> = a.violations.iter().map(|v| v.code).collect();
        let mut cb: Vec<_> = b.violations.iter().map(|v| v.code).collect();
        ca.sort();
        cb.sort();
        prop_assert_eq!(ca, cb);
    }

    #[test]
    fn audit_is_clean_on_valid_subtables(c in config(), keep in any::<u64>(), p in 0.0f64..=1.0, seed in any::<u64>()) {
        let t = build_topology(c).unwrap();
        let d = DemandSet::build(&t, DemandFlags::default());
        let full = solve_greedy(Instance::new(&t, &d).unwrap(), seed).table;
        // any subset of a valid table is valid
        let rows = full.assignments.into_iter().enumerate().filter(|(i, _)| keep >> (i % 64) & 1 == 1).map(|(_, a)| a).collect();
        let table = AssignmentTable::new(rows);
        prop_assert!(check_table(&t, &d, &table).is_valid());
        let traffic = TrafficModel::Bernoulli { probability: p, seed };
        let (_, trace) = simulate(&t, &d, &table, &traffic, 8, SimOptions { trace: true }).unwrap();
        prop_assert!(collision_audit(&t, &trace.unwrap()).is_clean());
    }
}
