//! Experiment harness for the tolerant robust-learning library.
//!
//! The binary exposes seeded, config-driven scenarios (`demo-counterexample`,
//! `compare`, `bounds`, `verify`) plus single-run tools (`tpas-run`,
//! `compress-run`, `decompress`). This library crate holds the scenario
//! implementations so integration tests can drive them directly.

pub mod config;
pub mod report;
pub mod scenarios;
pub mod verify;
