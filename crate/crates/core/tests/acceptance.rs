//! Exit criteria. Each test prints one `PASS`/`FAIL` line before asserting.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::f64::consts::PI;
use std::process::Command;

use queuegraph::asymptotics::{t_0_coefficients, t_0_expansion, t_l_expansion, EULER_GAMMA};
use queuegraph::graph::{analyze, Discipline, IntervalGraph};
use queuegraph::laws::{
    busy_size_factorial_moment, busy_size_moment, gamblers_ruin, lambert_t, max_occupancy_moment, max_occupancy_tail,
    q_polygamma, server_search_moment, server_search_tail, station_search_tail, BusySizeDistribution, FairCoin,
    LambertMethod, MomentMethod, ServerLoad, StableRate,
};
use queuegraph::numbers::{rational_to_f64, zeta};
use queuegraph::simulation::{
    default_ranked_warmup, default_station_warmup, estimate_mean, gamblers_ruin_sim, run_ranked_servers,
    run_station_process, z_score, BusyPeriodSampler, RngStream, SampleKind, DEFAULT_BATCHES,
};

const SEED: u64 = 20_240_611;

fn rate(lambda: f64) -> StableRate {
    StableRate::new(lambda).unwrap()
}

fn report(name: &str, failures: &[String], summary: String) {
    if failures.is_empty() {
        println!("PASS {name}: {summary}");
    } else {
        println!("FAIL {name}: {summary}; {}", failures.join("; "));
    }
    assert!(failures.is_empty(), "{name}: {}", failures.join("; "));
}

fn sci(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(", ")
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// z-score for a sample estimate. A tail point the sample never reached has
/// zero sample SE; the binomial SE at the exact probability is used instead.
fn tail_z(estimate: f64, se: f64, exact: f64, n: usize) -> f64 {
    if se == 0.0 {
        z_score(estimate, exact, (exact * (1.0 - exact) / n as f64).sqrt())
    } else {
        z_score(estimate, exact, se)
    }
}

#[test]
fn lambert_series_direct_and_divisor_routes_agree() {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for lambda in [0.3, 0.5, 0.7, 0.9] {
        for l in 0..4 {
            let d = lambert_t(l, rate(lambda), 1e-15, LambertMethod::Direct).unwrap().value;
            let s = lambert_t(l, rate(lambda), 1e-15, LambertMethod::Divisor).unwrap().value;
            let e = rel(d, s);
            worst = worst.max(e);
            if e > 1e-12 {
                failures.push(format!("T_{l}({lambda}): direct {d} divisor {s}"));
            }
        }
    }
    report("lambert-dual-path", &failures, format!("max relative difference {worst:.2e} (limit 1e-12)"));
}

#[test]
fn lambert_series_match_q_polygamma() {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for lambda in [0.3f64, 0.5] {
        let log_l = lambda.ln();
        let t0 = lambert_t(0, rate(lambda), 1e-15, LambertMethod::Direct).unwrap().value;
        let via = (q_polygamma(0, lambda, 1.0, 1e-15).unwrap() + (1.0 - lambda).ln()) / log_l;
        let mut pairs = vec![(0, t0, via)];
        for l in 1..3u32 {
            let t = lambert_t(l, rate(lambda), 1e-15, LambertMethod::Direct).unwrap().value;
            let via = q_polygamma(l, lambda, 1.0, 1e-15).unwrap() / log_l.powi(l as i32 + 1);
            pairs.push((l, t, via));
        }
        for (l, t, via) in pairs {
            worst = worst.max((t - via).abs());
            if (t - via).abs() > 1e-9 {
                failures.push(format!("T_{l}({lambda}) = {t} but q-polygamma gives {via}"));
            }
        }
    }
    report("q-polygamma-identities", &failures, format!("max absolute difference {worst:.2e} (limit 1e-9)"));
}

#[test]
fn max_occupancy_tail_is_gamblers_ruin() {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for lambda in [0.3, 0.5, 0.9] {
        let p = rate(lambda).arrival_prob();
        for k in 1..=20 {
            let tail = max_occupancy_tail(rate(lambda), k).unwrap();
            let ruin = gamblers_ruin(p, 1, k, FairCoin::Reject).unwrap();
            worst = worst.max((tail - ruin).abs());
            if (tail - ruin).abs() > 1e-15 {
                failures.push(format!("Pr[K>{k}] at {lambda}: {tail} vs ruin {ruin}"));
            }
        }
    }
    let exact = gamblers_ruin(1.0 / 3.0, 1, 2, FairCoin::Reject).unwrap();
    let est = gamblers_ruin_sim(&mut RngStream::new(SEED, 0), 1.0 / 3.0, 1, 2, 10_000_000).unwrap();
    let z = z_score(est.probability, exact, est.std_error);
    if z.abs() > 4.0 {
        failures.push(format!("ruin frequency {} vs {exact}, z = {z:.2}", est.probability));
    }
    report(
        "gamblers-ruin",
        &failures,
        format!("identity max difference {worst:.2e} (limit 1e-15); 1e7 walks z = {z:.2}"),
    );
}

#[test]
fn catalan_distribution() {
    let mut failures = Vec::new();
    let mut masses = Vec::new();
    for lambda in [0.5, 0.9] {
        let r = rate(lambda);
        let ratio_bound = 4.0 * r.arrival_prob() * r.departure_prob();
        let mut mass = 0.0;
        for (_, p) in BusySizeDistribution::new(r) {
            mass += p;
            // Later ratios stay below 4pq, so the rest is at most p·4pq/(1-4pq).
            if p * ratio_bound / (1.0 - ratio_bound) < 1e-12 {
                break;
            }
        }
        masses.push(mass);
        if mass < 1.0 - 1e-8 {
            failures.push(format!("mass {mass} at {lambda}"));
        }
        let mean = busy_size_moment(r, 1).unwrap();
        if mean != 1.0 / (1.0 - lambda) {
            failures.push(format!("Ex[N] = {mean} at {lambda}"));
        }
    }
    let r = rate(0.5);
    let stirling = busy_size_moment(r, 2).unwrap();
    let mut direct = 0.0;
    for (n, p) in BusySizeDistribution::new(r) {
        direct += (n * n) as f64 * p;
        if n > 200 && p < 1e-25 {
            break;
        }
    }
    if rel(stirling, direct) > 1e-10 {
        failures.push(format!("Ex[N^2] {stirling} vs direct {direct}"));
    }
    report(
        "catalan-distribution",
        &failures,
        format!("mass {:?}; Ex[N^2] relative difference {:.2e}", masses, rel(stirling, direct)),
    );
}

#[test]
fn mm1_simulation_matches_exact_laws() {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for (gi, lambda) in [0.5, 0.9].into_iter().enumerate() {
        let r = rate(lambda);
        let sampler = BusyPeriodSampler::new(r).unwrap();
        let mut rng = RngStream::new(SEED, gi as u64);
        let (mut ns, mut ks) = (Vec::new(), Vec::new());
        for _ in 0..1_000_000 {
            let s = sampler.sample_summary(&mut rng).unwrap();
            ns.push(s.n as f64);
            ks.push(s.k as f64);
        }
        let mut check = |what: String, xs: &[f64], f: &dyn Fn(f64) -> f64, exact: f64, tail: bool| {
            let e = estimate_mean(xs, f, SampleKind::Independent, 0).unwrap();
            let z =
                if tail { tail_z(e.mean, e.std_error, exact, xs.len()) } else { z_score(e.mean, exact, e.std_error) };
            worst = worst.max(z.abs());
            if z.abs() > 4.0 {
                failures.push(format!("{what} at {lambda}: {} vs {exact}, z = {z:.2}", e.mean));
            }
        };
        check("Ex[N]".into(), &ns, &|x| x, busy_size_moment(r, 1).unwrap(), false);
        check("Ex[K]".into(), &ks, &|x| x, max_occupancy_moment(r, 1, 1e-13, MomentMethod::Lambert).unwrap(), false);
        for k in 0..=10u64 {
            let f = move |x: f64| if x > k as f64 { 1.0 } else { 0.0 };
            check(format!("Pr[K>{k}]"), &ks, &f, max_occupancy_tail(r, k).unwrap(), true);
        }
    }
    report("mm1-simulation", &failures, format!("max |z| = {worst:.2} over 26 estimates (limit 4)"));
}

#[test]
fn station_index_simulation_matches_law() {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for (gi, lambda) in [0.5, 0.8].into_iter().enumerate() {
        let r = rate(lambda);
        let warmup = default_station_warmup(r);
        let mut rng = RngStream::new(SEED, 100 + gi as u64);
        let xs: Vec<f64> =
            run_station_process(&mut rng, r, 1_000_000 + warmup, warmup).unwrap().into_iter().map(f64::from).collect();
        for i in 0..=15u64 {
            let exact = station_search_tail(r, i).unwrap();
            let e =
                estimate_mean(&xs, |x| if x > i as f64 { 1.0 } else { 0.0 }, SampleKind::Equilibrium, DEFAULT_BATCHES)
                    .unwrap();
            let z = tail_z(e.mean, e.std_error, exact, xs.len());
            worst = worst.max(z.abs());
            if z.abs() > 4.0 {
                failures.push(format!("Pr[I>{i}] at {lambda}: {} vs {exact}, z = {z:.2}", e.mean));
            }
        }
        let target = lambda * max_occupancy_moment(r, 1, 1e-13, MomentMethod::Lambert).unwrap();
        let e = estimate_mean(&xs, |x| x, SampleKind::Equilibrium, DEFAULT_BATCHES).unwrap();
        let z = z_score(e.mean, target, e.std_error);
        worst = worst.max(z.abs());
        if z.abs() > 4.0 {
            failures.push(format!("Ex[I] at {lambda}: {} vs λ·Ex[K] = {target}, z = {z:.2}", e.mean));
        }
    }
    report("station-index-law", &failures, format!("max |z| = {worst:.2} over 34 estimates (limit 4)"));
}

#[test]
fn ranked_server_simulation_matches_law() {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    let load = ServerLoad::new(50.0).unwrap();
    let warmup = default_ranked_warmup(load);
    let mut rng = RngStream::new(SEED, 200);
    let xs: Vec<f64> =
        run_ranked_servers(&mut rng, load, 1_000_000 + warmup, warmup).unwrap().into_iter().map(f64::from).collect();
    for l in 1..=70u64 {
        let exact = server_search_tail(load, l).unwrap();
        let e = estimate_mean(&xs, |x| if x > l as f64 { 1.0 } else { 0.0 }, SampleKind::Equilibrium, DEFAULT_BATCHES)
            .unwrap();
        let z = tail_z(e.mean, e.std_error, exact, xs.len());
        worst = worst.max(z.abs());
        if z.abs() > 4.0 {
            failures.push(format!("Pr[L>{l}]: {} vs {exact}, z = {z:.2}", e.mean));
        }
    }
    let exact = server_search_moment(load, 1, 1e-13).unwrap();
    let e = estimate_mean(&xs, |x| x, SampleKind::Equilibrium, DEFAULT_BATCHES).unwrap();
    let z = z_score(e.mean, exact, e.std_error);
    worst = worst.max(z.abs());
    if z.abs() > 4.0 {
        failures.push(format!("Ex[L]: {} vs {exact}, z = {z:.2}", e.mean));
    }
    report("ranked-server-law", &failures, format!("max |z| = {worst:.2} over 71 estimates (limit 4)"));
}

#[test]
fn max_occupancy_heavy_traffic() {
    let mut failures = Vec::new();
    let lambda = 0.999;
    let r = rate(lambda);
    let k1 = max_occupancy_moment(r, 1, 1e-13, MomentMethod::Lambert).unwrap();
    let k2 = max_occupancy_moment(r, 2, 1e-13, MomentMethod::Lambert).unwrap();
    let k3 = max_occupancy_moment(r, 3, 1e-13, MomentMethod::Lambert).unwrap();
    let mean_gap = (k1 - ((1.0 / (1.0 - lambda)).ln() + EULER_GAMMA)).abs();
    if mean_gap >= 0.01 {
        failures.push(format!("|Ex[K] - (log(1/(1-λ)) + γ)| = {mean_gap}"));
    }
    let var_ratio = (k2 - k1 * k1) * (1.0 - lambda) / (PI * PI / 3.0);
    if (var_ratio - 1.0).abs() > 0.02 {
        failures.push(format!("Var[K](1-λ)/(π²/3) = {var_ratio}"));
    }
    let ratio = |km: f64, m: i32, fact: f64| km * (1.0 - lambda).powi(m - 1) / (fact * zeta(m as u32).unwrap());
    let (r2, r3) = (ratio(k2, 2, 2.0), ratio(k3, 3, 6.0));
    for (m, x) in [(2, r2), (3, r3)] {
        if (x - 1.0).abs() > 0.05 {
            failures.push(format!("m = {m}: normalized moment {x}"));
        }
    }
    report(
        "k-heavy-traffic",
        &failures,
        format!("mean gap {mean_gap:.2e}; variance ratio {var_ratio:.5}; moment ratios {r2:.5}, {r3:.5}"),
    );
}

#[test]
fn busy_size_heavy_traffic() {
    let mut failures = Vec::new();
    let r = rate(0.99);
    let mut ratios = Vec::new();
    for m in 1..=3 {
        let exact = busy_size_moment(r, m).unwrap();
        // 2^{m-1} (2m-3)!! λ^{m-1} / (1-λ)^{2m-1}, written out.
        let double_fact = [1.0, 1.0, 3.0][m as usize - 1];
        let leading =
            2f64.powi(m as i32 - 1) * double_fact * 0.99f64.powi(m as i32 - 1) / 0.01f64.powi(2 * m as i32 - 1);
        let x = exact / leading;
        ratios.push(x);
        if (x - 1.0).abs() > 0.05 || (m == 1 && rel(exact, leading) > 1e-12) {
            failures.push(format!("m = {m}: ratio {x}"));
        }
    }
    let leading_lib = busy_size_factorial_moment(r, 3).unwrap();
    if rel(leading_lib, 3.0 * 4.0 * 0.99f64.powi(2) / 0.01f64.powi(5)) > 1e-12 {
        failures.push(format!("leading term for m = 3 is {leading_lib}"));
    }
    report("n-heavy-traffic", &failures, format!("exact/leading ratios {ratios:?} (limit 5%)"));
}

#[test]
fn ranked_server_large_load() {
    let mut failures = Vec::new();
    let big = ServerLoad::new(1000.0).unwrap();
    let mut devs = Vec::new();
    for m in 1..=3u32 {
        let x = server_search_moment(big, m, 1e-13).unwrap() / 1000f64.powi(m as i32);
        let target = 1.0 / (m as f64 + 1.0);
        let dev = rel(x, target);
        devs.push(dev);
        if dev > 0.02 {
            failures.push(format!("m = {m}: Ex[L^m]/λ^m = {x:.6} is {:.2}% from 1/{}", 100.0 * dev, m + 1));
        }
    }
    let mut gaps = Vec::new();
    for lambda in [20.0, 50.0, 100.0, 200.0] {
        let exact = server_search_moment(ServerLoad::new(lambda).unwrap(), 1, 1e-13).unwrap();
        let gap = (exact - (lambda / 2.0 + lambda.ln() / 2.0)).abs();
        gaps.push(gap);
        if gap > 5.0 {
            failures.push(format!("|Ex[L] - (λ/2 + log λ/2)| = {gap} at λ = {lambda}"));
        }
    }
    report(
        "l-large-load",
        &failures,
        format!("relative deviations {devs:.4?} (limit 0.02); O(1) gaps {gaps:.3?} (limit 5)"),
    );
}

#[test]
fn lambert_expansions_converge() {
    let mut failures = Vec::new();
    let mut t1_errors = Vec::new();
    for (lambda, limit) in [(0.9, 1e-6), (0.99, 1e-9)] {
        let h = -f64::ln(lambda);
        let finite = PI * PI / 6.0 / (h * h) - 1.0 / (2.0 * h) + 1.0 / 24.0;
        let e = t_l_expansion(1, rate(lambda), 2).unwrap().value;
        let t = lambert_t(1, rate(lambda), 1e-15, LambertMethod::Direct).unwrap().value;
        let err = (e - t).abs();
        t1_errors.push(err);
        if err > limit || rel(e, finite) > 1e-14 {
            failures.push(format!("T_1({lambda}): expansion {e} vs series {t}, error {err:.2e}"));
        }
    }
    let r = rate(0.99);
    let t0 = lambert_t(0, r, 1e-15, LambertMethod::Direct).unwrap().value;
    let errors: Vec<f64> = (1..=4).map(|o| (t_0_expansion(r, o).unwrap().value - t0).abs()).collect();
    let coefficients = t_0_coefficients(4);
    for o in 1..4 {
        let added = rational_to_f64(&coefficients[o]);
        // A zero coefficient adds nothing; otherwise the error must drop.
        let ok = if added == 0.0 { errors[o] <= errors[o - 1] } else { errors[o] < errors[o - 1] };
        if !ok {
            failures.push(format!(
                "T_0 error rose from order {o} to {}: {:.3e} -> {:.3e}",
                o + 1,
                errors[o - 1],
                errors[o]
            ));
        }
    }
    if errors[3] >= errors[0] {
        failures.push("T_0 error at order 4 not below order 1".into());
    }
    report(
        "expansion-engine",
        &failures,
        format!("T_1 errors {}; T_0 errors by order {}", sci(&t1_errors), sci(&errors)),
    );
}

fn brute_clique(g: &IntervalGraph) -> usize {
    let n = g.n();
    (1u32..1 << n)
        .filter(|mask| {
            let vs: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
            vs.iter().enumerate().all(|(i, &u)| vs[i + 1..].iter().all(|&v| g.adjacent(u, v)))
        })
        .map(|mask| mask.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

/// Smallest `k` admitting a proper colouring, by exhaustive search.
fn brute_chromatic(g: &IntervalGraph) -> usize {
    let n = g.n();
    (1..=n)
        .find(|&k| {
            let total = (k as u64).pow(n as u32);
            (0..total).any(|code| {
                let colour: Vec<u64> = (0..n).map(|i| code / (k as u64).pow(i as u32) % k as u64).collect();
                g.edges().iter().all(|&(u, v)| colour[u - 1] != colour[v - 1])
            })
        })
        .unwrap()
}

#[test]
fn interval_graphs() {
    let mut failures = Vec::new();
    let trace = "AAADADADADDD".parse().unwrap();
    let expected = [
        (Discipline::Fcfs, [12, 13, 23, 24, 34, 35, 45, 46, 56]),
        (Discipline::Lcfs, [12, 23, 34, 45, 16, 26, 36, 46, 56]),
    ];
    for (d, codes) in expected {
        let mut want: Vec<(usize, usize)> = codes.iter().map(|x| (x / 10, x % 10)).collect();
        want.sort_unstable();
        let (g, s) = analyze(&trace, d).unwrap();
        if g.edges() != want.as_slice() || s.n != 6 || s.chromatic_number != 3 {
            failures.push(format!("{d:?} fixture: edges {:?}, n {}, χ {}", g.edges(), s.n, s.chromatic_number));
        }
    }
    let sampler = BusyPeriodSampler::new(rate(0.7)).unwrap();
    let mut rng = RngStream::new(SEED, 300);
    let mut brute_checked = 0;
    for _ in 0..10_000 {
        let t = sampler.sample(&mut rng).unwrap();
        for d in Discipline::ALL {
            let (g, s) = analyze(&t, d).unwrap();
            if s.n as u64 != t.n() || s.clique_number as u64 != t.k() || s.chromatic_number != s.clique_number {
                failures.push(format!("{d:?} on {t}: {s:?}"));
            }
            if g.n() <= 8 {
                brute_checked += 1;
                if brute_clique(&g) != s.clique_number || brute_chromatic(&g) != s.chromatic_number {
                    failures.push(format!("{d:?} on {t}: brute force disagrees"));
                }
            }
        }
        if failures.len() > 5 {
            break;
        }
    }
    report(
        "interval-graphs",
        &failures,
        format!("fixtures and 10000 traces x 3 disciplines; {brute_checked} graphs with n <= 8 brute-forced"),
    );
}

#[test]
fn simulation_commands_reproduce() {
    let bin = env!("CARGO_BIN_EXE_queuegraph");
    let commands: [&[&str]; 4] = [
        &["simulate", "mm1", "--lambda", "0.5,0.9", "--periods", "5e4", "--seed", "7"],
        &["simulate", "stations", "--lambda", "0.8", "--arrivals", "5e4", "--warmup", "1e4", "--seed", "7"],
        &["simulate", "ranked", "--lambda", "50", "--arrivals", "5e4", "--warmup", "1e4", "--seed", "7"],
        &["simulate", "ruin", "--p", "0.3", "--v", "1", "--w", "3", "--walks", "1e5", "--seed", "7"],
    ];
    let mut failures = Vec::new();
    for args in commands {
        let a = Command::new(bin).args(args).output().unwrap();
        let b = Command::new(bin).args(args).output().unwrap();
        if !a.status.success() || a.stdout != b.stdout || a.stdout.is_empty() {
            failures.push(format!("{} {} differs between runs", args[0], args[1]));
        }
    }
    let r = rate(0.7);
    let sampler = BusyPeriodSampler::new(r).unwrap();
    let draw = || {
        let mut rng = RngStream::new(SEED, 9);
        (0..1000).map(|_| sampler.sample(&mut rng).unwrap().to_string()).collect::<Vec<_>>()
    };
    if draw() != draw() {
        failures.push("library sampler differs between runs".into());
    }
    report("reproducibility", &failures, "4 simulate commands and the library sampler rerun identically".into());
}
