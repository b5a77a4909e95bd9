//! Roster ingestion, output formats, the `tilerank` command line and the
//! JSON API served to the explorer UI.

pub mod api;
pub mod commands;
pub mod compute;
pub mod render;
pub mod roster;
