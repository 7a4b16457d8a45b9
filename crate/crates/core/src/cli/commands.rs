//! `exact`, `asym` and `graph`.

use std::io::Write;

use clap::ValueEnum;
use serde_json::json;

use super::sampling::{stream_id, PROCESS_MM1};
use super::table::{Cell, Metadata, Table};
use super::{
    emit, with_sink, AsymArgs, AsymQuantity, CliError, ExactArgs, ExactQuantity, GraphArgs, GraphFormat, IntGrid,
    MomentRoute, Outcome,
};
use crate::asymptotics::{
    inv_h_expansion, k_moment_expansion, k_moment_from_expansions, k_moment_leading, k_variance_expansion,
    l_moment_asym, n_moment_leading, t_0_expansion, t_l_expansion,
};
use crate::error::{Error, Result};
use crate::graph::analyze;
use crate::laws::{
    busy_size_factorial_moment, busy_size_moment, busy_size_pmf, gamblers_ruin, lambert_t, max_occupancy_moment,
    max_occupancy_pmf, max_occupancy_tail, server_search_body_approx, server_search_moment, server_search_tail,
    station_search_moment, station_search_tail, FairCoin, LambertMethod, MomentMethod, ServerLoad, StableRate,
};
use crate::simulation::{BusyPeriodSampler, EventTrace, RngStream};

pub(crate) fn value_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default()
}

pub(crate) fn config<T: serde::Serialize>(args: &T) -> serde_json::Value {
    serde_json::to_value(args).unwrap_or(serde_json::Value::Null)
}

fn need<'a, T>(value: &'a Option<T>, flag: &str, what: &str) -> Result<&'a T> {
    value.as_ref().ok_or_else(|| Error::domain(format!("{what} needs {flag}")))
}

pub(crate) fn order(m: u64) -> Result<u32> {
    u32::try_from(m).map_err(|_| Error::domain(format!("moment order {m} is too large")))
}

fn points<'a>(grid: &'a Option<IntGrid>, flag: &str, what: &str) -> Result<&'a [u64]> {
    Ok(&need(grid, flag, what)?.0)
}

pub fn exact(a: &ExactArgs, stdout: &mut dyn Write) -> Result<Outcome, CliError> {
    let name = value_name(&a.quantity);
    let meta = Metadata::new(format!("exact {name}"), config(a), None);
    if a.quantity == ExactQuantity::Ruin {
        let p = *need(&a.p, "--p", &name)?;
        let v = need(&a.v, "--v", &name)?.0;
        let w = need(&a.w, "--w", &name)?.0;
        let mut table = Table::new(&["quantity", "p", "v", "w", "value"]);
        let value = gamblers_ruin(p, v, w, FairCoin::Allow)?;
        table.push(vec![name.as_str().into(), p.into(), v.into(), w.into(), value.into()]);
        emit(&table, &meta, &a.output, stdout)?;
        return Ok(Outcome::Success);
    }
    let lambdas = &need(&a.lambda, "--lambda", &name)?.0;
    use ExactQuantity as Q;
    let (flag, xs) = match a.quantity {
        Q::NPmf => ("n", points(&a.n, "--n", &name)?),
        Q::KTail | Q::KPmf => ("k", points(&a.k, "--k", &name)?),
        Q::LTail | Q::LambertT => ("l", points(&a.l, "--l", &name)?),
        Q::ITail => ("i", points(&a.i, "--i", &name)?),
        _ => ("m", points(&a.m, "--m", &name)?),
    };
    let method = match a.method {
        MomentRoute::Lambert => MomentMethod::Lambert,
        MomentRoute::Direct => MomentMethod::Direct,
    };
    let mut table = Table::new(&["quantity", "lambda", flag, "value"]);
    for &lambda in lambdas {
        for &x in xs {
            let rate = || StableRate::new(lambda);
            let load = || ServerLoad::new(lambda);
            let value = match a.quantity {
                Q::NPmf => busy_size_pmf(rate()?, x)?,
                Q::NMoment => busy_size_moment(rate()?, order(x)?)?,
                Q::NFactorialMoment => busy_size_factorial_moment(rate()?, order(x)?)?,
                Q::KTail => max_occupancy_tail(rate()?, x)?,
                Q::KPmf => max_occupancy_pmf(rate()?, x)?,
                Q::KMoment => max_occupancy_moment(rate()?, order(x)?, a.tol, method)?,
                Q::LTail => server_search_tail(load()?, x)?,
                Q::LMoment => server_search_moment(load()?, order(x)?, a.tol)?,
                Q::ITail => station_search_tail(rate()?, x)?,
                Q::IMoment => station_search_moment(rate()?, order(x)?, a.tol)?,
                Q::LambertT => lambert_t(order(x)?, rate()?, a.tol, LambertMethod::Direct)?.value,
                Q::Ruin => unreachable!(),
            };
            table.push(vec![name.as_str().into(), lambda.into(), x.into(), value.into()]);
        }
    }
    emit(&table, &meta, &a.output, stdout)?;
    Ok(Outcome::Success)
}

pub fn asym(a: &AsymArgs, stdout: &mut dyn Write) -> Result<Outcome, CliError> {
    let name = value_name(&a.quantity);
    let meta = Metadata::new(format!("asym {name}"), config(a), None);
    use AsymQuantity as Q;
    let (flag, xs): (Option<&str>, Vec<u64>) = match a.quantity {
        Q::KMean | Q::KVar | Q::LMean | Q::InvH => (None, vec![0]),
        Q::LBodyTail | Q::T => (Some("l"), points(&a.l, "--l", &name)?.to_vec()),
        _ => (Some("m"), points(&a.m, "--m", &name)?.to_vec()),
    };
    let mut columns = vec!["quantity", "lambda"];
    columns.extend(flag);
    columns.extend(["value", "error_proxy"]);
    let mut table = Table::new(&columns);
    for &lambda in &a.lambda.0 {
        for &x in &xs {
            let rate = || StableRate::new(lambda);
            let load = || ServerLoad::new(lambda);
            let (value, proxy) = match a.quantity {
                Q::KMean => (k_moment_expansion(rate()?, 1)?, None),
                Q::KMoment => (k_moment_expansion(rate()?, order(x)?)?, None),
                Q::KLeading => (k_moment_leading(rate()?, order(x)?)?, None),
                Q::KVar => (k_variance_expansion(rate()?)?, None),
                Q::KFromT => (k_moment_from_expansions(rate()?, order(x)?, a.order)?, None),
                Q::NMoment => (n_moment_leading(rate()?, order(x)?)?, None),
                Q::LMean => (l_moment_asym(load()?, 1)?, None),
                Q::LMoment => (l_moment_asym(load()?, order(x)?)?, None),
                Q::LBodyTail => (server_search_body_approx(load()?, x)?, None),
                Q::T => {
                    let e = if x == 0 {
                        t_0_expansion(rate()?, a.order)?
                    } else {
                        t_l_expansion(order(x)?, rate()?, a.order)?
                    };
                    (e.value, e.first_omitted)
                }
                Q::InvH => {
                    let e = inv_h_expansion(rate()?, a.order)?;
                    (e.value, e.first_omitted)
                }
            };
            let mut row: Vec<Cell> = vec![name.as_str().into(), lambda.into()];
            if flag.is_some() {
                row.push(x.into());
            }
            row.extend([value.into(), proxy.into()]);
            table.push(row);
        }
    }
    emit(&table, &meta, &a.output, stdout)?;
    Ok(Outcome::Success)
}

fn graph_trace(a: &GraphArgs) -> Result<EventTrace> {
    match (&a.trace, a.lambda, a.seed) {
        (Some(t), _, _) => t.parse(),
        (None, Some(lambda), Some(seed)) => {
            let sampler = BusyPeriodSampler::new(StableRate::new(lambda)?)?;
            sampler.sample(&mut RngStream::new(seed, stream_id(0, PROCESS_MM1, 0)))
        }
        _ => Err(Error::domain("graph needs --trace, or --lambda with --seed")),
    }
}

pub fn graph(a: &GraphArgs, stdout: &mut dyn Write) -> Result<Outcome, CliError> {
    let trace = graph_trace(a)?;
    let (graph, summary) = analyze(&trace, a.discipline)?;
    let meta = Metadata::new("graph", config(a), a.seed);
    let facts = [
        format!("trace: {trace}"),
        format!("discipline: {}", value_name(&a.discipline)),
        format!("n: {}", summary.n),
        format!("edges: {}", summary.edge_count),
        format!("clique: {}", summary.clique_number),
        format!("chromatic: {}", summary.chromatic_number),
    ];
    with_sink(&a.out, stdout, |w| match a.format {
        GraphFormat::Edges | GraphFormat::Dot => {
            let prefix = if a.format == GraphFormat::Dot { "//" } else { "#" };
            for line in meta.comment_lines(prefix) {
                writeln!(w, "{line}")?;
            }
            for fact in &facts {
                writeln!(w, "{prefix} {fact}")?;
            }
            let body = if a.format == GraphFormat::Dot { graph.to_dot() } else { graph.to_edge_list() };
            w.write_all(body.as_bytes())
        }
        GraphFormat::Json => {
            let obj = json!({
                "metadata": meta,
                "trace": trace.to_string(),
                "summary": summary,
                "edges": graph.edges(),
            });
            writeln!(w, "{obj}")
        }
    })?;
    Ok(Outcome::Success)
}
