//! Experiment runner: configs, sweeps, reproductions and their artifacts.

pub mod commands;
pub mod io;
pub mod plot;
pub mod repro;
pub mod seeds;
pub mod spec;
pub mod sweep;
