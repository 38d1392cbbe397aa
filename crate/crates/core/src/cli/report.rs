//! Machine- and human-readable run reports.

use std::fmt::Write as _;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::model::{Strategy, TimedAutomaton};
use crate::synth::{Mode, SynthesisResult, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyReport {
    pub keep: Vec<String>,
    pub disable: Vec<String>,
    pub opaque: bool,
    pub effective: bool,
    pub dpriv: String,
    pub dpub: String,
}

impl StrategyReport {
    pub fn new(ta: &TimedAutomaton, strategy: &Strategy, verdict: &Verdict) -> Self {
        StrategyReport {
            keep: strategy.keep().iter().cloned().collect(),
            disable: strategy.disabled(ta).into_iter().collect(),
            opaque: verdict.opaque,
            effective: verdict.effective,
            dpriv: verdict.dpriv.to_string(),
            dpub: verdict.dpub.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub candidates: usize,
    pub states: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub model: String,
    pub algorithm: String,
    pub strategies: Vec<StrategyReport>,
    pub stats: Stats,
}

/// Name of the synthesis variant, as printed in reports.
pub fn algorithm_name(mode: Mode, witness: bool) -> &'static str {
    match (mode, witness) {
        (Mode::All, _) => "synthCtrl",
        (Mode::Min, false) => "synthMinCtrl",
        (Mode::Max, false) => "synthMaxCtrl",
        (Mode::Min, true) => "witnessMinCtrl",
        (Mode::Max, true) => "witnessMaxCtrl",
    }
}

pub fn verdict_label(v: &Verdict) -> &'static str {
    match (v.conclusive, v.opaque, v.effective) {
        (false, _, _) => "inconclusive",
        (true, true, true) => "opaque (effective)",
        (true, true, false) => "opaque (not effective)",
        (true, false, _) => "not opaque",
    }
}

impl RunReport {
    pub fn check(ta: &TimedAutomaton, algorithm: &str, verdict: &Verdict, seconds: f64) -> Self {
        RunReport {
            model: ta.name.clone(),
            algorithm: algorithm.to_string(),
            strategies: vec![StrategyReport::new(ta, &Strategy::full(ta), verdict)],
            stats: Stats {
                candidates: 1,
                states: verdict.states_explored,
                seconds,
            },
        }
    }

    pub fn synthesis(ta: &TimedAutomaton, result: &SynthesisResult) -> Self {
        RunReport {
            model: ta.name.clone(),
            algorithm: algorithm_name(result.mode, result.witness_only).to_string(),
            strategies: result
                .strategies
                .iter()
                .map(|(s, v)| StrategyReport::new(ta, s, v))
                .collect(),
            stats: Stats {
                candidates: result.stats.candidates_examined,
                states: result.stats.states_explored,
                seconds: result.stats.seconds,
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn synthesis_text(&self) -> String {
        let mut out = format!("model {}\nalgorithm {}\n", self.model, self.algorithm);
        if self.strategies.is_empty() {
            out.push_str("no strategy found\n");
        }
        for s in &self.strategies {
            let _ = writeln!(
                out,
                "disable {{{}}}  keep {{{}}}  dpriv {}  dpub {}{}",
                s.disable.iter().join(", "),
                s.keep.iter().join(", "),
                s.dpriv,
                s.dpub,
                if s.effective { "" } else { "  (not effective)" }
            );
        }
        let _ = writeln!(
            out,
            "{} strategies, {} candidates, {} states, {:.3} s",
            self.strategies.len(),
            self.stats.candidates,
            self.stats.states,
            self.stats.seconds
        );
        out
    }
}
