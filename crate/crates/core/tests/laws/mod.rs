//! Property laws shared by the proptest suites and the acceptance target.
//! Each law runs a fixed number of random cases and reports the first
//! (shrunk) counterexample.

#![allow(dead_code)]

pub mod intervals;
pub mod zones;

use std::fmt::Debug;

use proptest::strategy::Strategy;
use proptest::test_runner::{Config, FileFailurePersistence, TestCaseError, TestRunner};

/// A named law taking the number of cases to run.
pub type Law = (&'static str, fn(u32) -> Result<(), String>);

/// Runs `test` on `cases` random values, replaying and recording failing
/// seeds in the `regressions` file.
pub fn check<S>(
    regressions: &'static str,
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S: Strategy,
    S::Value: Debug,
{
    let config = Config {
        cases,
        failure_persistence: Some(Box::new(FileFailurePersistence::Direct(regressions))),
        ..Config::default()
    };
    TestRunner::new(config).run(&strategy, test).map_err(|e| e.to_string())
}
