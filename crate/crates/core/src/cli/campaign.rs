//! `simulate` and `compare`.

use std::fs::File;
use std::io::{BufWriter, Write};

use rayon::prelude::*;

use super::commands::{config, order, value_name};
use super::quantity::{asymptotic_value, exact_value, sample_estimate, Quantity, Variable};
use super::sampling::{mm1_samples, ranked_samples, station_samples, stream_id, PROCESS_RUIN};
use super::table::{Cell, Metadata, Table};
use super::{emit, CliError, CompareArgs, EngineArgs, Outcome, Process, SimulateArgs};
use crate::error::{Error, Result};
use crate::laws::{gamblers_ruin, FairCoin, ServerLoad, StableRate};
use crate::simulation::{
    default_ranked_warmup, default_station_warmup, gamblers_ruin_sim, z_score, RngStream, SampleKind,
};

const SIM_COLUMNS: [&str; 8] =
    ["quantity", "lambda", "estimate", "std_error", "exact", "z_score", "samples", "batches"];

/// `(estimate - exact) / se`. A tail point the sample never reached has a
/// zero sample SE; the binomial SE at the exact probability stands in.
fn z_for(q: Quantity, estimate: f64, se: f64, exact: f64, samples: usize) -> f64 {
    if se == 0.0 {
        if let Quantity::Tail(..) = q {
            let binomial = (exact * (1.0 - exact) / samples as f64).sqrt();
            return z_score(estimate, exact, binomial);
        }
    }
    z_score(estimate, exact, se)
}

fn kind_of(v: Variable) -> SampleKind {
    match v {
        Variable::N | Variable::K => SampleKind::Independent,
        Variable::L | Variable::I => SampleKind::Equilibrium,
    }
}

/// Samples of each variable at one rate, drawn only when asked for.
#[derive(Default)]
struct Samples {
    n: Option<Vec<f64>>,
    k: Option<Vec<f64>>,
    i: Option<Vec<f64>>,
    l: Option<Vec<f64>>,
}

impl Samples {
    fn get(&self, v: Variable) -> Option<&[f64]> {
        match v {
            Variable::N => self.n.as_deref(),
            Variable::K => self.k.as_deref(),
            Variable::I => self.i.as_deref(),
            Variable::L => self.l.as_deref(),
        }
    }
}

struct Budget<'a> {
    seed: u64,
    periods: u64,
    arrivals: u64,
    warmup: Option<u64>,
    engine: &'a EngineArgs,
}

fn draw(budget: &Budget, grid_index: usize, lambda: f64, wanted: &[Variable]) -> Result<Samples> {
    let mut s = Samples::default();
    let e = budget.engine;
    if wanted.iter().any(|v| matches!(v, Variable::N | Variable::K)) {
        let rate = StableRate::subcritical(lambda)?;
        let (n, k) = mm1_samples(budget.seed, grid_index, rate, budget.periods, e.chunks, e.event_cap.0)?;
        s.n = Some(n);
        s.k = Some(k);
    }
    if wanted.contains(&Variable::I) {
        let rate = StableRate::subcritical(lambda)?;
        let warmup = budget.warmup.unwrap_or_else(|| default_station_warmup(rate));
        s.i = Some(station_samples(budget.seed, grid_index, rate, budget.arrivals, warmup, e.event_cap.0)?);
    }
    if wanted.contains(&Variable::L) {
        let load = ServerLoad::new(lambda)?;
        let warmup = budget.warmup.unwrap_or_else(|| default_ranked_warmup(load));
        s.l = Some(ranked_samples(budget.seed, grid_index, load, budget.arrivals, warmup, e.event_cap.0)?);
    }
    Ok(s)
}

fn check_budget(periods: u64, arrivals: u64, e: &EngineArgs) -> Result<()> {
    if periods == 0 || arrivals == 0 {
        return Err(Error::domain("--periods and --arrivals must be positive"));
    }
    if e.chunks == 0 {
        return Err(Error::domain("--chunks must be positive"));
    }
    if !(e.tol > 0.0 && e.tol < 1.0) {
        return Err(Error::domain(format!("--tol must lie in (0, 1), got {}", e.tol)));
    }
    Ok(())
}

pub fn simulate(a: &SimulateArgs, stdout: &mut dyn Write) -> Result<Outcome, CliError> {
    let name = value_name(&a.process);
    let meta = Metadata::new(format!("simulate {name}"), config(a), Some(a.seed));
    let mut table = Table::new(&SIM_COLUMNS);
    if a.process == Process::Ruin {
        let need = |flag: &str| Error::domain(format!("ruin needs {flag}"));
        let p = a.p.ok_or_else(|| need("--p"))?;
        let v = a.v.ok_or_else(|| need("--v"))?.0;
        let w = a.w.ok_or_else(|| need("--w"))?.0;
        let exact = gamblers_ruin(p, v, w, FairCoin::Allow)?;
        let mut rng = RngStream::new(a.seed, stream_id(0, PROCESS_RUIN, 0));
        let est = gamblers_ruin_sim(&mut rng, p, v, w, a.walks.0)?;
        let z = z_for(Quantity::Tail(Variable::K, w), est.probability, est.std_error, exact, est.walks as usize);
        table.push(vec![
            "ruin".into(),
            Cell::Empty,
            est.probability.into(),
            est.std_error.into(),
            exact.into(),
            z.into(),
            est.walks.into(),
            0u64.into(),
        ]);
        if let Some(path) = &a.dump {
            return Err(Error::domain(format!("ruin walks have no per-sample dump ({})", path.display())).into());
        }
        emit(&table, &meta, &a.output, stdout)?;
        return Ok(Outcome::Success);
    }

    let lambdas = &a.lambda.as_ref().ok_or_else(|| Error::domain(format!("{name} needs --lambda")))?.0;
    check_budget(a.periods.0, a.arrivals.0, &a.engine)?;
    if a.dump.is_some() && lambdas.len() != 1 {
        return Err(Error::domain("--dump needs a single --lambda value").into());
    }
    let orders: Vec<u32> = a.m.0.iter().map(|&m| order(m)).collect::<Result<_>>()?;
    if orders.contains(&0) {
        return Err(Error::domain("moment order m must be >= 1").into());
    }
    // Validate every rate before any simulation starts.
    for &lambda in lambdas {
        match a.process {
            Process::Mm1 | Process::Stations => StableRate::subcritical(lambda).map(|_| ())?,
            _ => ServerLoad::new(lambda).map(|_| ())?,
        }
    }
    let variables: &[Variable] = match a.process {
        Process::Mm1 => &[Variable::N, Variable::K],
        Process::Stations => &[Variable::I],
        _ => &[Variable::L],
    };
    let budget = Budget {
        seed: a.seed,
        periods: a.periods.0,
        arrivals: a.arrivals.0,
        warmup: a.warmup.map(|w| w.0),
        engine: &a.engine,
    };
    let results: Vec<Result<(Vec<Vec<Cell>>, Samples)>> = lambdas
        .par_iter()
        .enumerate()
        .map(|(gi, &lambda)| {
            let samples = draw(&budget, gi, lambda, variables)?;
            let mut quantities = Vec::new();
            for &v in variables {
                quantities.extend(orders.iter().map(|&m| Quantity::Moment(v, m)));
            }
            let tails: Vec<u64> = match a.process {
                Process::Mm1 => a.k.0.clone(),
                Process::Stations => a.i.0.clone(),
                _ => match &a.l {
                    Some(g) => g.0.clone(),
                    None => (0..=(lambda + 4.0 * lambda.sqrt()).ceil() as u64).collect(),
                },
            };
            let tail_var = if a.process == Process::Mm1 { Variable::K } else { variables[0] };
            quantities.extend(tails.iter().map(|&k| Quantity::Tail(tail_var, k)));
            let rows =
                quantities.into_iter().map(|q| sim_row(q, lambda, &samples, &a.engine)).collect::<Result<Vec<_>>>()?;
            Ok((rows, samples))
        })
        .collect();
    let mut dump_samples = None;
    for r in results {
        let (rows, samples) = r?;
        rows.into_iter().for_each(|row| table.push(row));
        dump_samples = Some(samples);
    }
    if let (Some(path), Some(samples)) = (&a.dump, dump_samples) {
        let primary = if a.process == Process::Mm1 { Variable::K } else { variables[0] };
        let mut w = BufWriter::new(File::create(path).map_err(CliError::Io)?);
        for x in samples.get(primary).unwrap_or_default() {
            writeln!(w, "{x}").map_err(CliError::Io)?;
        }
        w.flush().map_err(CliError::Io)?;
    }
    emit(&table, &meta, &a.output, stdout)?;
    Ok(Outcome::Success)
}

fn sim_row(q: Quantity, lambda: f64, samples: &Samples, e: &EngineArgs) -> Result<Vec<Cell>> {
    let xs = samples.get(q.variable()).ok_or_else(|| Error::Internal(format!("no samples drawn for {q}")))?;
    let kind = kind_of(q.variable());
    let (mean, se) = sample_estimate(q, xs, kind, e.batches)?;
    let exact = exact_value(q, lambda, e.tol)?;
    let batches = if kind == SampleKind::Equilibrium { e.batches as u64 } else { 0 };
    Ok(vec![
        q.to_string().into(),
        lambda.into(),
        mean.into(),
        se.into(),
        exact.into(),
        z_for(q, mean, se, exact, xs.len()).into(),
        (xs.len() as u64).into(),
        batches.into(),
    ])
}

/// One line of a `compare` report. Fields a method does not supply are
/// `None` and print empty.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ComparisonRow {
    pub quantity: Quantity,
    pub lambda: f64,
    pub exact: f64,
    pub asymptotic: Option<f64>,
    pub sim_mean: Option<f64>,
    pub sim_se: Option<f64>,
    pub z_score: Option<f64>,
    /// exact / asymptotic.
    pub ratio: Option<f64>,
}

impl ComparisonRow {
    fn cells(&self) -> Vec<Cell> {
        vec![
            self.quantity.to_string().into(),
            self.lambda.into(),
            self.exact.into(),
            self.asymptotic.into(),
            self.sim_mean.into(),
            self.sim_se.into(),
            self.z_score.into(),
            self.ratio.into(),
        ]
    }
}

pub fn compare(a: &CompareArgs, stdout: &mut dyn Write) -> Result<Outcome, CliError> {
    let meta = Metadata::new("compare", config(a), Some(a.seed));
    check_budget(a.periods.0, a.arrivals.0, &a.engine)?;
    if !(a.threshold > 0.0) {
        return Err(Error::domain(format!("--threshold must be positive, got {}", a.threshold)).into());
    }
    let mut wanted: Vec<Variable> = a.quantities.iter().map(|q| q.variable()).collect();
    wanted.sort_unstable();
    wanted.dedup();
    if a.no_sim {
        wanted.clear();
    }
    let budget = Budget {
        seed: a.seed,
        periods: a.periods.0,
        arrivals: a.arrivals.0,
        warmup: a.warmup.map(|w| w.0),
        engine: &a.engine,
    };
    let lambdas = &a.lambda.0;
    let per_rate: Vec<Result<Vec<ComparisonRow>>> = lambdas
        .par_iter()
        .enumerate()
        .map(|(gi, &lambda)| {
            let exacts = a
                .quantities
                .iter()
                .map(|&q| exact_value(q, lambda, a.engine.tol).map_err(|e| context(e, q, lambda)))
                .collect::<Result<Vec<_>>>()?;
            let samples = draw(&budget, gi, lambda, &wanted)?;
            a.quantities
                .iter()
                .zip(exacts)
                .map(|(&q, exact)| {
                    let asymptotic = asymptotic_value(q, lambda).map_err(|e| context(e, q, lambda))?;
                    let sim = match samples.get(q.variable()) {
                        Some(xs) => {
                            let (mean, se) = sample_estimate(q, xs, kind_of(q.variable()), a.engine.batches)?;
                            Some((mean, se, z_for(q, mean, se, exact, xs.len())))
                        }
                        None => None,
                    };
                    Ok(ComparisonRow {
                        quantity: q,
                        lambda,
                        exact,
                        asymptotic,
                        sim_mean: sim.map(|s| s.0),
                        sim_se: sim.map(|s| s.1),
                        z_score: sim.map(|s| s.2),
                        ratio: asymptotic.filter(|&x| x != 0.0).map(|x| exact / x),
                    })
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_rate {
        rows.extend(r?);
    }
    // Quantity in the order given, then λ in grid order.
    let position = |q: &Quantity| a.quantities.iter().position(|x| x == q).unwrap_or(usize::MAX);
    let lambda_pos = |l: f64| lambdas.iter().position(|&x| x == l).unwrap_or(usize::MAX);
    rows.sort_by_key(|r: &ComparisonRow| (position(&r.quantity), lambda_pos(r.lambda)));

    let mut table =
        Table::new(&["quantity", "lambda", "exact", "asymptotic", "sim_mean", "sim_se", "z_score", "ratio"]);
    rows.iter().for_each(|r| table.push(r.cells()));
    emit(&table, &meta, &a.output, stdout)?;
    let exceeded = rows.iter().filter_map(|r| r.z_score).any(|z| !(z.abs() <= a.threshold));
    Ok(if exceeded { Outcome::ThresholdExceeded } else { Outcome::Success })
}

fn context(e: Error, q: Quantity, lambda: f64) -> Error {
    match e {
        Error::Domain(msg) => Error::Domain(format!("{q} at λ = {lambda}: {msg}")),
        Error::Internal(msg) => Error::Internal(format!("{q} at λ = {lambda}: {msg}")),
        other => other,
    }
}
