//! File formats, command implementations and the embedded demo problem for
//! the `rtk` command-line tool.

pub mod commands;
pub mod documents;
pub mod error;
pub mod fixture;
