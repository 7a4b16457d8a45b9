use proptest::prelude::*;

use queuegraph::graph::{analyze, assign_service, build_graph, Discipline};
use queuegraph::laws::{
    erlang_denominator, erlang_denominators, gamblers_ruin, max_occupancy_tail, server_search_tail,
    station_search_tail, FairCoin, ServerLoad, StableRate,
};
use queuegraph::numbers::{divisor_power_sum_u128, DivisorSieve};
use queuegraph::simulation::EventTrace;

/// A busy period from arbitrary steps: `true` is an arrival, `false` a
/// departure unless that would empty the system early.
fn busy_period(steps: &[bool]) -> String {
    let mut s = String::from("A");
    let mut level = 1;
    for &up in steps {
        if up {
            s.push('A');
            level += 1;
        } else if level > 1 {
            s.push('D');
            level -= 1;
        }
    }
    s.extend(std::iter::repeat_n('D', level));
    s
}

fn peak(s: &str) -> u64 {
    s.chars()
        .scan(0i64, |l, c| {
            *l += if c == 'A' { 1 } else { -1 };
            Some(*l)
        })
        .max()
        .unwrap() as u64
}

proptest! {
    #[test]
    fn k_tail_is_a_tail(lambda in 0.01f64..0.999, k in 0u64..200) {
        let r = StableRate::new(lambda).unwrap();
        let a = max_occupancy_tail(r, k).unwrap();
        let b = max_occupancy_tail(r, k + 1).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b <= a);
        prop_assert_eq!(max_occupancy_tail(r, 0).unwrap(), 1.0);
    }

    #[test]
    fn station_tail_is_lambda_times_k_tail(lambda in 0.01f64..0.999, i in 0u64..100) {
        let r = StableRate::new(lambda).unwrap();
        let s = station_search_tail(r, i).unwrap();
        let k = max_occupancy_tail(r, i).unwrap();
        prop_assert!((s - lambda * k).abs() <= 1e-15 * k.max(1e-300) + 1e-300);
    }

    #[test]
    fn ruin_is_monotone_in_target(p in 0.01f64..0.99, v in 1u64..10, w in 1u64..40) {
        prop_assume!(p != 0.5);
        let a = gamblers_ruin(p, v, w + v, FairCoin::Reject).unwrap();
        let b = gamblers_ruin(p, v, w + v + 1, FairCoin::Reject).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b <= a + 1e-15);
    }

    #[test]
    fn erlang_recurrence(lambda in 0.1f64..500.0, l in 1u64..300) {
        let load = ServerLoad::new(lambda).unwrap();
        let ds = erlang_denominators(load, l);
        prop_assert_eq!(ds.len() as u64, l + 1);
        prop_assert_eq!(ds[l as usize], erlang_denominator(load, l));
        let next = 1.0 + l as f64 / lambda * ds[l as usize - 1];
        prop_assert_eq!(ds[l as usize], next);
        prop_assert!(server_search_tail(load, l).unwrap() <= server_search_tail(load, l - 1).unwrap());
    }

    #[test]
    fn sieve_matches_trial_division(power in 0u32..4, n in 1u64..3000) {
        let sieve = DivisorSieve::new(power, n as usize);
        let direct = divisor_power_sum_u128(power, n).unwrap();
        prop_assert_eq!(sieve.get(n as usize).unwrap(), direct as f64);
    }

    #[test]
    fn trace_round_trips(steps in prop::collection::vec(any::<bool>(), 0..60)) {
        let s = busy_period(&steps);
        let trace: EventTrace = s.parse().unwrap();
        prop_assert_eq!(trace.to_string(), s.clone());
        prop_assert_eq!(trace.k(), peak(&s));
        prop_assert_eq!(trace.n() as usize * 2, s.len());
    }

    #[test]
    fn graph_invariants(steps in prop::collection::vec(any::<bool>(), 0..60)) {
        let trace: EventTrace = busy_period(&steps).parse().unwrap();
        for d in Discipline::ALL {
            let intervals = assign_service(&trace, d).unwrap();
            let g = build_graph(&intervals);
            let (_, summary) = analyze(&trace, d).unwrap();
            prop_assert_eq!(g.n() as u64, trace.n());
            prop_assert_eq!(summary.clique_number as u64, trace.k());
            prop_assert_eq!(summary.chromatic_number, summary.clique_number);
            // One busy period gives a connected graph.
            prop_assert!(g.edges().len() + 1 >= g.n());
            for &(u, v) in g.edges() {
                prop_assert!(u < v);
                prop_assert!(intervals.intervals()[u - 1].overlaps(&intervals.intervals()[v - 1]));
            }
            let colours = g.greedy_coloring();
            for &(u, v) in g.edges() {
                prop_assert_ne!(colours[u - 1], colours[v - 1]);
            }
        }
    }
}
