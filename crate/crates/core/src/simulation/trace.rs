use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Event {
    Arrival,
    Departure,
}

/// The event sequence of one busy period, starting with the arrival that
/// opens it and ending with the departure that empties the system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EventTrace {
    events: Vec<Event>,
    n: u64,
    k: u64,
}

impl EventTrace {
    /// Checks the busy-period shape: the customer count stays positive until
    /// the last event and is zero after it.
    pub fn new(events: Vec<Event>) -> Result<Self> {
        if events.is_empty() {
            return Err(Error::MalformedTrace("empty trace".into()));
        }
        let mut level: i64 = 0;
        let mut k: i64 = 0;
        let mut n: u64 = 0;
        let last = events.len() - 1;
        for (i, e) in events.iter().enumerate() {
            match e {
                Event::Arrival => level += 1,
                Event::Departure => {
                    level -= 1;
                    n += 1;
                }
            }
            k = k.max(level);
            if level < 0 || (level == 0 && i != last) {
                return Err(Error::MalformedTrace(format!(
                    "system empties at event {} of {}; a busy period ends exactly once",
                    i + 1,
                    events.len()
                )));
            }
        }
        if level != 0 {
            return Err(Error::MalformedTrace(format!("{level} customers still present at the end")));
        }
        Ok(Self { events, n, k: k as u64 })
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// Customers served.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Largest number of customers present at once.
    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

impl FromStr for EventTrace {
    type Err = Error;

    /// `A`/`D` letters, case-insensitive; whitespace is ignored.
    fn from_str(s: &str) -> Result<Self> {
        let events = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                'A' | 'a' => Ok(Event::Arrival),
                'D' | 'd' => Ok(Event::Departure),
                other => Err(Error::MalformedTrace(format!("unexpected character {other:?}; use A and D"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(events)
    }
}

impl fmt::Display for EventTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.events {
            f.write_str(match e {
                Event::Arrival => "A",
                Event::Departure => "D",
            })?;
        }
        Ok(())
    }
}
