//! Library side of the `propeval` command-line tool: run manifests, report
//! envelopes, and SVG chart emission. The binary in `main.rs` wires these
//! into subcommands.

pub mod commands;
pub mod error;
pub mod manifest;
pub mod plot;
pub mod report;
