//! `selfcheck`: quick versions of the library's invariants, one line each.

use std::io::Write;

use super::sampling::mm1_samples;
use super::{CliError, Outcome, SelfcheckArgs};
use crate::asymptotics::t_l_expansion;
use crate::graph::{analyze, Discipline};
use crate::laws::{
    busy_size_moment, erlang_denominator, gamblers_ruin, lambert_t, max_occupancy_moment, max_occupancy_tail,
    q_polygamma, station_search_tail, BusySizeDistribution, FairCoin, LambertMethod, MomentMethod, ServerLoad,
    StableRate,
};
use crate::simulation::{estimate_mean, BusyPeriodSampler, EventTrace, RngStream, SampleKind};

type Check = std::result::Result<(), String>;

fn rate(lambda: f64) -> StableRate {
    StableRate::new(lambda).expect("fixed rates are valid")
}

fn close(what: &str, a: f64, b: f64, rel: f64) -> Check {
    if (a - b).abs() <= rel * a.abs().max(b.abs()) {
        Ok(())
    } else {
        Err(format!("{what}: {a} vs {b}"))
    }
}

fn err(e: crate::Error) -> String {
    e.to_string()
}

fn lambert_dual_path() -> Check {
    for lambda in [0.3, 0.5, 0.7, 0.9] {
        for l in 0..4 {
            let d = lambert_t(l, rate(lambda), 1e-15, LambertMethod::Direct).map_err(err)?.value;
            let s = lambert_t(l, rate(lambda), 1e-15, LambertMethod::Divisor).map_err(err)?.value;
            close(&format!("T_{l}({lambda})"), d, s, 1e-12)?;
        }
    }
    Ok(())
}

fn q_polygamma_identity() -> Check {
    for lambda in [0.3, 0.5] {
        let log_l: f64 = f64::ln(lambda);
        let t0 = lambert_t(0, rate(lambda), 1e-15, LambertMethod::Direct).map_err(err)?.value;
        let psi = q_polygamma(0, lambda, 1.0, 1e-15).map_err(err)?;
        close(&format!("T_0({lambda})"), t0, (psi + (-lambda).ln_1p()) / log_l, 1e-9)?;
        for l in 1..3 {
            let t = lambert_t(l, rate(lambda), 1e-15, LambertMethod::Direct).map_err(err)?.value;
            let psi = q_polygamma(l, lambda, 1.0, 1e-15).map_err(err)?;
            close(&format!("T_{l}({lambda})"), t, psi / log_l.powi(l as i32 + 1), 1e-9)?;
        }
    }
    Ok(())
}

fn ruin_identity() -> Check {
    for lambda in [0.3, 0.5, 0.9] {
        for k in 1..=20 {
            let tail = max_occupancy_tail(rate(lambda), k).map_err(err)?;
            let ruin = gamblers_ruin(rate(lambda).arrival_prob(), 1, k, FairCoin::Reject).map_err(err)?;
            close(&format!("Pr[K>{k}] at {lambda}"), tail, ruin, 1e-13)?;
        }
    }
    Ok(())
}

fn catalan_mass() -> Check {
    for lambda in [0.5, 0.9] {
        let mut mass = 0.0;
        let mut mean = 0.0;
        for (n, p) in BusySizeDistribution::new(rate(lambda)).take(2_000_000) {
            mass += p;
            mean += n as f64 * p;
            if 1.0 - mass < 1e-10 && p < 1e-16 {
                break;
            }
        }
        if mass < 1.0 - 1e-8 {
            return Err(format!("mass {mass} at {lambda}"));
        }
        let exact = busy_size_moment(rate(lambda), 1).map_err(err)?;
        close(&format!("Ex[N] at {lambda}"), exact, 1.0 / (1.0 - lambda), 1e-15)?;
        close(&format!("Σ n Pr[N=n] at {lambda}"), mean, exact, 1e-6)?;
    }
    Ok(())
}

fn k_moment_routes() -> Check {
    for lambda in [0.5, 0.9] {
        for m in 1..4 {
            let a = max_occupancy_moment(rate(lambda), m, 1e-13, MomentMethod::Lambert).map_err(err)?;
            let b = max_occupancy_moment(rate(lambda), m, 1e-13, MomentMethod::Direct).map_err(err)?;
            close(&format!("Ex[K^{m}] at {lambda}"), a, b, 1e-9)?;
        }
    }
    Ok(())
}

fn station_identity() -> Check {
    for lambda in [0.5, 0.8] {
        for i in 0..16 {
            let s = station_search_tail(rate(lambda), i).map_err(err)?;
            let k = max_occupancy_tail(rate(lambda), i).map_err(err)?;
            close(&format!("Pr[I>{i}] at {lambda}"), s, lambda * k, 1e-14)?;
        }
    }
    Ok(())
}

fn erlang_recurrence() -> Check {
    for lambda in [0.5, 3.0, 50.0] {
        let load = ServerLoad::new(lambda).map_err(err)?;
        for l in 0..20u64 {
            // Σ_{k<=l} l!/((l-k)! λ^k), term by term.
            let mut term = 1.0;
            let mut direct = 1.0;
            for k in 1..=l {
                term *= (l - k + 1) as f64 / lambda;
                direct += term;
            }
            close(&format!("D_{l}({lambda})"), erlang_denominator(load, l), direct, 1e-12)?;
        }
    }
    Ok(())
}

fn t1_finite_form() -> Check {
    for (lambda, tol) in [(0.9, 1e-6), (0.99, 1e-9)] {
        let e = t_l_expansion(1, rate(lambda), 2).map_err(err)?.value;
        let t = lambert_t(1, rate(lambda), 1e-15, LambertMethod::Direct).map_err(err)?.value;
        if (e - t).abs() > tol {
            return Err(format!("T_1({lambda}): expansion {e} vs series {t}"));
        }
    }
    Ok(())
}

fn graph_fixtures() -> Check {
    let trace: EventTrace = "AAADADADADDD".parse().map_err(err)?;
    let expect = [
        (Discipline::Fcfs, vec![(1, 2), (1, 3), (2, 3), (2, 4), (3, 4), (3, 5), (4, 5), (4, 6), (5, 6)]),
        (Discipline::Lcfs, vec![(1, 2), (1, 6), (2, 3), (2, 6), (3, 4), (3, 6), (4, 5), (4, 6), (5, 6)]),
    ];
    for (d, edges) in expect {
        let (g, s) = analyze(&trace, d).map_err(err)?;
        if g.edges() != edges.as_slice() || s.n != 6 || s.chromatic_number != 3 {
            return Err(format!("{d:?}: edges {:?}, n {}, χ {}", g.edges(), s.n, s.chromatic_number));
        }
    }
    Ok(())
}

fn graph_perfection(seed: u64) -> Check {
    let sampler = BusyPeriodSampler::new(rate(0.7)).map_err(err)?;
    let mut rng = RngStream::new(seed, 0);
    for _ in 0..2000 {
        let t = sampler.sample(&mut rng).map_err(err)?;
        for d in Discipline::ALL {
            let (_, s) = analyze(&t, d).map_err(err)?;
            if s.n as u64 != t.n() || s.clique_number as u64 != t.k() || s.chromatic_number != s.clique_number {
                return Err(format!("{d:?} on {t}: {s:?}"));
            }
        }
    }
    Ok(())
}

fn reproducibility(seed: u64) -> Check {
    let a = mm1_samples(seed, 0, rate(0.5), 5000, 4, 1 << 30).map_err(err)?;
    let b = mm1_samples(seed, 0, rate(0.5), 5000, 4, 1 << 30).map_err(err)?;
    if a != b {
        return Err("same seed gave different busy periods".into());
    }
    Ok(())
}

fn mm1_against_exact(seed: u64) -> Check {
    let r = rate(0.5);
    let (n, k) = mm1_samples(seed, 0, r, 100_000, 8, 1 << 30).map_err(err)?;
    for (name, xs, exact) in [
        ("Ex[N]", &n, busy_size_moment(r, 1).map_err(err)?),
        ("Ex[K]", &k, max_occupancy_moment(r, 1, 1e-12, MomentMethod::Lambert).map_err(err)?),
    ] {
        let e = estimate_mean(xs, |x| x, SampleKind::Independent, 0).map_err(err)?;
        let z = (e.mean - exact) / e.std_error;
        if z.abs() > 4.0 {
            return Err(format!("{name}: sample {} vs exact {exact}, z = {z:.2}", e.mean));
        }
    }
    Ok(())
}

pub fn selfcheck(a: &SelfcheckArgs, stdout: &mut dyn Write) -> Result<Outcome, CliError> {
    let checks: Vec<(&str, Box<dyn Fn() -> Check>)> = vec![
        ("lambert-dual-path", Box::new(lambert_dual_path)),
        ("q-polygamma-identity", Box::new(q_polygamma_identity)),
        ("ruin-identity", Box::new(ruin_identity)),
        ("catalan-mass", Box::new(catalan_mass)),
        ("k-moment-routes", Box::new(k_moment_routes)),
        ("station-identity", Box::new(station_identity)),
        ("erlang-recurrence", Box::new(erlang_recurrence)),
        ("t1-finite-form", Box::new(t1_finite_form)),
        ("graph-fixtures", Box::new(graph_fixtures)),
        ("graph-perfection", Box::new(move || graph_perfection(a.seed))),
        ("reproducibility", Box::new(move || reproducibility(a.seed))),
        ("mm1-against-exact", Box::new(move || mm1_against_exact(a.seed))),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        match check() {
            Ok(()) => writeln!(stdout, "PASS {name}")?,
            Err(msg) => {
                failed += 1;
                writeln!(stdout, "FAIL {name}: {msg}")?;
            }
        }
    }
    writeln!(stdout, "{failed} failed")?;
    Ok(if failed == 0 { Outcome::Success } else { Outcome::ChecksFailed })
}
