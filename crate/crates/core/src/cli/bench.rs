//! Scalability benchmark on the ATM with extra controllable actions.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::bundled;
use crate::model::{Edge, TimedAutomaton};
use crate::synth::{synthesize, Mode, SynthError, SynthOptions};

/// The ATM plus controllable actions `add1..addN`, each labelling an
/// unguarded self-loop on the initial location.
pub fn scale_atm(n: usize) -> TimedAutomaton {
    let mut ta = bundled::atm();
    for k in 1..=n {
        let action = format!("add{k}");
        ta.controllable.insert(action.clone());
        ta.edges.push(Edge::new(ta.init.clone(), ta.init.clone()).sync(action));
    }
    ta
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchMode {
    All,
    Min,
    Max,
    WitnessMin,
    WitnessMax,
}

impl BenchMode {
    pub fn mode(self) -> Mode {
        match self {
            BenchMode::All => Mode::All,
            BenchMode::Min | BenchMode::WitnessMin => Mode::Min,
            BenchMode::Max | BenchMode::WitnessMax => Mode::Max,
        }
    }

    pub fn witness(self) -> bool {
        matches!(self, BenchMode::WitnessMin | BenchMode::WitnessMax)
    }
}

impl FromStr for BenchMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(BenchMode::All),
            "min" => Ok(BenchMode::Min),
            "max" => Ok(BenchMode::Max),
            "wmin" => Ok(BenchMode::WitnessMin),
            "wmax" => Ok(BenchMode::WitnessMax),
            _ => Err(format!("unknown mode {s} (expected all, min, max, wmin or wmax)")),
        }
    }
}

impl fmt::Display for BenchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BenchMode::All => "all",
            BenchMode::Min => "min",
            BenchMode::Max => "max",
            BenchMode::WitnessMin => "wmin",
            BenchMode::WitnessMax => "wmax",
        })
    }
}

/// Parses `A..B` (inclusive) or a single `N`.
pub fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("invalid range {s}"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => (parse(s)?, parse(s)?),
    };
    if a > b {
        return Err(format!("empty range {s}"));
    }
    Ok((a, b))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub added_actions: usize,
    pub mode: BenchMode,
    /// `None` on timeout.
    pub seconds: Option<f64>,
    pub strategies_found: Option<usize>,
}

pub const CSV_HEADER: &str = "added_actions,mode,seconds,strategies_found";

impl BenchRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{}",
            self.added_actions,
            self.mode,
            self.seconds.map_or("TO".to_string(), |s| format!("{s:.4}")),
            self.strategies_found.map_or(String::new(), |n| n.to_string())
        )
    }
}

/// Runs one synthesis per `(N, mode)` and times it.
pub fn run_bench(
    range: (usize, usize),
    modes: &[BenchMode],
    options: &SynthOptions,
    mut progress: impl FnMut(&BenchRow),
) -> Result<Vec<BenchRow>, SynthError> {
    let mut rows = Vec::new();
    for n in range.0..=range.1 {
        let ta = scale_atm(n);
        for &mode in modes {
            let started = Instant::now();
            let row = match synthesize(&ta, mode.mode(), mode.witness(), options) {
                Ok(r) => BenchRow {
                    added_actions: n,
                    mode,
                    seconds: Some(started.elapsed().as_secs_f64()),
                    strategies_found: Some(r.strategies.len()),
                },
                Err(SynthError::Timeout(_)) => BenchRow {
                    added_actions: n,
                    mode,
                    seconds: None,
                    strategies_found: None,
                },
                Err(e) => return Err(e),
            };
            progress(&row);
            rows.push(row);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling_adds_self_loops() {
        assert_eq!(scale_atm(0), bundled::atm());
        let ta = scale_atm(3);
        assert_eq!(ta.controllable.len(), 10);
        assert_eq!(ta.edges.len(), bundled::atm().edges.len() + 3);
        assert!(ta.edges.iter().rev().take(3).all(|e| e.source == "I" && e.target == "I" && e.guard.is_true()));
        assert!(crate::model::validate(&ta).is_empty());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("1..5"), Ok((1, 5)));
        assert_eq!(parse_range("2"), Ok((2, 2)));
        assert!(parse_range("5..1").is_err());
        assert!(parse_range("a..b").is_err());
    }

    #[test]
    fn csv_rows() {
        let row = BenchRow { added_actions: 4, mode: BenchMode::All, seconds: None, strategies_found: None };
        assert_eq!(row.csv(), "4,all,TO,");
        let row = BenchRow { added_actions: 2, mode: BenchMode::WitnessMin, seconds: Some(0.5), strategies_found: Some(1) };
        assert_eq!(row.csv(), "2,wmin,0.5000,1");
    }
}
