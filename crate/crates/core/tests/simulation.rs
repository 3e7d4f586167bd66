use std::collections::{HashMap, VecDeque};

use drr_mdpf::metrics::write_csv;
use drr_mdpf::node::NodeId;
use drr_mdpf::packet::PacketKind;
use drr_mdpf::sim::{
    load_topology, random_topology, Arrivals, BuiltinTopology, LinkDown, LinkParams, Role,
    Routing, Scenario, Simulation, TopologySource, TraceKind,
};
use drr_mdpf::{run_scenario, BaselineKind, Error, StrategyKind};
use proptest::prelude::*;

fn line_scenario() -> Scenario {
    Scenario {
        name: "line".into(),
        topology: TopologySource::Builtin(BuiltinTopology::Line(3)),
        cache_fraction: 0.0,
        arrivals: Arrivals::Constant,
        interest_rate: 10.0,
        max_interests: Some(10),
        duration: 5.0,
        ..Scenario::default()
    }
}

fn grid_scenario(strategy: StrategyKind, rate: f64, duration: f64) -> Scenario {
    Scenario {
        name: "grid".into(),
        topology: TopologySource::Builtin(BuiltinTopology::Grid(3, 3)),
        consumers: vec!["n0".into(), "n2".into()],
        producers: vec!["n7".into()],
        strategy,
        interest_rate: rate,
        duration,
        seed: 42,
        ..Scenario::default()
    }
}

#[test]
fn line_latency_matches_closed_form() {
    let report = run_scenario(&line_scenario()).unwrap();
    let link = LinkParams::default();
    let hop = |bytes: f64| bytes * 8.0 / link.bandwidth_bps + link.delay;
    let want = 2.0 * hop(64.0) + 2.0 * hop(1024.0);
    assert_eq!(report.counters.interests_sent, 10);
    assert_eq!(report.isr, 1.0);
    let got = report.mean_retrieval.unwrap();
    assert!(((got - want) / want).abs() < 1e-6, "{got} vs {want}");
    assert!((want - 0.0417408).abs() < 1e-12);
}

#[test]
fn zero_duration_reports_nothing() {
    let s = Scenario { duration: 0.0, ..line_scenario() };
    let r = run_scenario(&s).unwrap();
    assert_eq!(r.counters.interests_sent, 0);
    assert_eq!((r.throughput, r.isr, r.drop_rate, r.cov_load), (0.0, 0.0, 0.0, 0.0));
    assert_eq!(r.mean_retrieval, None);
}

#[test]
fn identical_seeds_give_identical_csv() {
    for strategy in [StrategyKind::DrrMdpf, StrategyKind::Baseline(BaselineKind::StochasticAdaptive)] {
        let s = grid_scenario(strategy, 2500.0, 3.0);
        let a = write_csv(&[run_scenario(&s).unwrap()]);
        let b = write_csv(&[run_scenario(&s).unwrap()]);
        assert_eq!(a, b);
    }
}

#[test]
fn different_seeds_differ() {
    let s = grid_scenario(StrategyKind::Baseline(BaselineKind::UniformRandom), 2000.0, 2.0);
    let a = run_scenario(&s).unwrap();
    let b = run_scenario(&Scenario { seed: 43, ..s }).unwrap();
    assert_ne!(a.counters, b.counters);
}

/// Name, kind and creation time identify a packet on one link.
type PacketKey = (String, PacketKind, u64);

#[test]
fn trace_is_monotone_and_links_are_fifo() {
    let s = grid_scenario(StrategyKind::DrrMdpf, 3000.0, 2.0);
    let mut sim = Simulation::new(s).unwrap();
    let faces = sim.topology().faces();
    let mut last = 0.0;
    let mut in_flight: HashMap<(NodeId, usize), VecDeque<PacketKey>> = HashMap::new();
    let mut arrivals = 0u64;
    sim.run_observed(|ev| {
        assert!(ev.time >= last, "clock went backwards");
        last = ev.time;
        let key = (ev.packet.name.to_string(), ev.packet.kind, ev.packet.created_at.to_bits());
        match ev.kind {
            TraceKind::Sent => in_flight.entry((ev.node, ev.face)).or_default().push_back(key),
            TraceKind::Arrived => {
                arrivals += 1;
                let spec = &faces[ev.node.0][ev.face];
                let q = in_flight.get_mut(&(spec.peer, spec.peer_face)).expect("arrival without send");
                assert_eq!(q.pop_front(), Some(key), "link reordered packets");
            }
        }
    })
    .unwrap();
    assert!(arrivals > 1000);
    assert!(in_flight.values().all(VecDeque::is_empty));
    assert!(sim.nodes().iter().all(|n| n.pit().is_empty()));
}

#[test]
fn undrained_runs_report_pending_interests() {
    let s = Scenario { drain: false, ..grid_scenario(StrategyKind::DrrMdpf, 3000.0, 1.0) };
    let r = run_scenario(&s).unwrap();
    assert!(r.counters.pending_at_end > 0);
    assert!(r.counters.reconciles());
}

#[test]
fn event_cap_is_a_runtime_error() {
    let s = Scenario { max_events: 1000, ..grid_scenario(StrategyKind::DrrMdpf, 2000.0, 1.0) };
    assert!(matches!(run_scenario(&s), Err(Error::Runtime(_))));
}

#[test]
fn link_failure_loses_the_only_path() {
    let mut s = line_scenario();
    s.max_interests = None;
    s.duration = 2.0;
    s.link_down = Some(LinkDown { a: "n1".into(), b: "n2".into(), at: 1.0 });
    let r = run_scenario(&s).unwrap();
    assert!(r.isr > 0.4 && r.isr < 0.6, "{}", r.isr);
    assert!(r.counters.timed_out > 0 || r.counters.interests_dropped > 0);
    assert!(r.counters.reconciles());
}

#[test]
fn link_failure_with_an_alternative_keeps_serving() {
    let mut s = grid_scenario(StrategyKind::Baseline(BaselineKind::UniformRandom), 500.0, 4.0);
    s.routing = Routing::AllRoutes;
    s.cache_fraction = 0.0;
    let healthy = run_scenario(&s).unwrap();
    s.link_down = Some(LinkDown { a: "n4".into(), b: "n7".into(), at: 2.0 });
    let cut = run_scenario(&s).unwrap();
    assert!(cut.counters.satisfied > 0);
    assert!(cut.isr <= healthy.isr);
}

#[test]
fn unknown_link_down_is_a_config_error() {
    let mut s = line_scenario();
    s.link_down = Some(LinkDown { a: "n0".into(), b: "n2".into(), at: 1.0 });
    assert!(matches!(run_scenario(&s), Err(Error::Config(_))));
}

#[test]
fn scenarios_without_endpoints_are_rejected() {
    let mut topo = drr_mdpf::Topology::new();
    let a = topo.add_node("a", Role::Router).unwrap();
    let b = topo.add_node("b", Role::Producer).unwrap();
    topo.add_link(a, b, 1e6, 0.001).unwrap();
    let s = Scenario { topology: TopologySource::Inline(topo), ..Scenario::default() };
    assert!(matches!(run_scenario(&s), Err(Error::Config(_))));
}

#[test]
fn tree_topology_routes_to_the_root() {
    let s = Scenario {
        topology: TopologySource::Builtin(BuiltinTopology::Tree(2)),
        interest_rate: 200.0,
        duration: 2.0,
        ..Scenario::default()
    };
    let r = run_scenario(&s).unwrap();
    assert_eq!(r.isr, 1.0);
}

#[test]
fn random_topology_has_requested_faces() {
    let topo = random_topology(40, 122, 9, LinkParams::default()).unwrap();
    assert_eq!(topo.node_count(), 40);
    assert_eq!(topo.face_count(), 244);
    assert!(topo.is_connected());
    let again = load_topology(&topo.to_string()).unwrap();
    assert_eq!(again.face_count(), 244);
}

#[test]
fn topology_errors_name_the_line() {
    let text = "node n0 consumer\nnode n1\nlink n0 n1 1e7 5\nlink n1 n9 1e7 5\n";
    match load_topology(text) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
        other => panic!("{other:?}"),
    }
}

#[test]
fn rank_baseline_balances_at_least_as_well_as_best_route() {
    let run = |kind| {
        let mut s = grid_scenario(StrategyKind::Baseline(kind), 2000.0, 3.0);
        s.routing = Routing::AllRoutes;
        // the centre node is equidistant from both producer-side branches
        s.consumers = vec!["n1".into()];
        s.producers = vec!["n7".into()];
        run_scenario(&s).unwrap().cov_load
    };
    assert!(run(BaselineKind::UniformMultipathRank) <= run(BaselineKind::BestRoute));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_run_reconciles(
        seed in 0u64..1000,
        rate in 50.0f64..3000.0,
        cache in 0.0f64..0.5,
        queue in 1usize..20,
        strategy in 0usize..5,
        poisson in any::<bool>(),
        drain in any::<bool>(),
        all_routes in any::<bool>(),
    ) {
        let strategy = if strategy == 0 {
            StrategyKind::DrrMdpf
        } else {
            StrategyKind::Baseline(BaselineKind::ALL[strategy - 1])
        };
        let s = Scenario {
            topology: TopologySource::Builtin(BuiltinTopology::Random { nodes: 8, links: 12 }),
            catalog_size: 200,
            cache_fraction: cache,
            queue_capacity: queue,
            interest_rate: rate,
            arrivals: if poisson { Arrivals::Poisson } else { Arrivals::Constant },
            routing: if all_routes { Routing::AllRoutes } else { Routing::ShortestPaths },
            drain,
            duration: 0.5,
            pit_timeout: 0.2,
            strategy,
            seed,
            ..Scenario::default()
        };
        let r = run_scenario(&s).unwrap();
        let c = &r.counters;
        prop_assert_eq!(c.interests_sent, c.satisfied + c.timed_out + c.interests_dropped + c.pending_at_end);
        prop_assert!(r.isr <= 1.0);
        if drain {
            prop_assert_eq!(c.pending_at_end, 0);
        }
    }
}
