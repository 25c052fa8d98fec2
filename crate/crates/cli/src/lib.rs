//! Command line and HTTP session service for structured acyclic nets.

pub mod commands;
pub mod report;
pub mod service;
