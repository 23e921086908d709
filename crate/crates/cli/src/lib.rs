//! Command-line workbench and annotation service for numeral wordlists.

pub mod cli;
pub mod service;
pub mod session;
