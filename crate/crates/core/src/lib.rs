pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod graph;
pub mod laws;
pub mod numbers;
pub mod simulation;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/busy-periods.md")]
    mod busy_periods {}
    #[doc = include_str!("../../../book/src/max-occupancy.md")]
    mod max_occupancy {}
    #[doc = include_str!("../../../book/src/asymptotics.md")]
    mod asymptotics {}
    #[doc = include_str!("../../../book/src/search-laws.md")]
    mod search_laws {}
    #[doc = include_str!("../../../book/src/interval-graphs.md")]
    mod interval_graphs {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
