//! Decision-tree analysis of delay patterns across the three Niagara
//! Frontier bridges (Peace Bridge, Rainbow Bridge, Lewiston-Queenston).
//!
//! The crate is a pipeline of small, pure stages:
//!
//! * [`ingest`] parses wait-time and weather CSVs, averages five-minute
//!   samples per hour and joins the weather onto each hour;
//! * [`features`] derives the temporal descriptors (month, season, hour
//!   interval, weekend, holiday flags);
//! * [`patterns`] discretizes waits into delay categories and encodes the
//!   per-bridge categories into a single multi-bridge delay pattern;
//! * [`cart`] grows binary classification trees with Gini impurity and
//!   early stopping;
//! * [`report`] renders trees (JSON, DOT, text) and the summary tables;
//! * [`synth`] generates seeded synthetic inputs with planted rules and
//!   holds the brute-force split oracle;
//! * [`cli`] wires everything into the `delaytree` command.

pub mod cart;
pub mod cli;
pub mod error;
pub mod features;
pub mod ingest;
pub mod patterns;
pub mod report;
pub mod synth;

pub use error::{Error, Result};
