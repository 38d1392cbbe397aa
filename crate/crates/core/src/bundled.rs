//! Models shipped with the crate.

use crate::model::TimedAutomaton;
use crate::parser::parse_model;

pub const RUNNING_TA: &str = include_str!("../models/running.ta");
pub const RUNNING_UAF_TA: &str = include_str!("../models/running_uaf.ta");
pub const RUNNING_UBC_TA: &str = include_str!("../models/running_ubc.ta");
pub const ATM_TA: &str = include_str!("../models/atm.ta");

/// `(file name, contents)` of every bundled model.
pub const ALL: &[(&str, &str)] = &[
    ("running.ta", RUNNING_TA),
    ("running_uaf.ta", RUNNING_UAF_TA),
    ("running_ubc.ta", RUNNING_UBC_TA),
    ("atm.ta", ATM_TA),
];

fn load(text: &str) -> TimedAutomaton {
    parse_model(text).expect("bundled model is valid")
}

/// One clock, private location `l2`, Σc = {a..f}, Σu = {u}.
pub fn running() -> TimedAutomaton {
    load(RUNNING_TA)
}

/// The running example restricted to {u, a, f}.
pub fn running_uaf() -> TimedAutomaton {
    load(RUNNING_UAF_TA)
}

/// The running example restricted to {u, b, c}.
pub fn running_ubc() -> TimedAutomaton {
    load(RUNNING_UBC_TA)
}

/// The ATM case study; the secret is the action `takeCash`.
pub fn atm() -> TimedAutomaton {
    load(ATM_TA)
}
