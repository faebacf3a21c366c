//! Command-line front end for `mtds-core`: the `grid.json` and
//! `report.json` formats, CSV tables, and the `mtds` subcommands.

pub mod cli;
pub mod eval;
pub mod grid;
pub mod json;
pub mod report;
pub mod table;
pub mod text;
