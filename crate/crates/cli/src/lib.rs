//! Command-line front end for `mapcone`: load a map from a gallery name or a
//! Choi JSON file, run the analyses and print text or JSON reports.

pub mod args;
pub mod commands;
pub mod report;
