//! Command-line driver and review service for lexforge.

pub mod commands;
pub mod service;
