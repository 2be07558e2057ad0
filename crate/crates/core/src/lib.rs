//! Simulation and analysis of a multilevel quasi-spin Otto engine.
//!
//! The working medium is an `N`-level Zeeman ladder coupled to a polarized
//! bath through spin-exchange collisions. Heating and cooling strokes are
//! unidirectional birth–death rate equations; expansion and compression
//! strokes rescale the level spacing by ramping the magnetic field with
//! frozen populations.
//!
//! Modules:
//! - [`dynamics`] — rate generators and population evolution,
//! - [`thermo`] — energies, heat, work, power, entropy,
//! - [`cycle`] — the four-stroke Otto cycle, sweeps, rate calibration,
//! - [`tempfit`] — dual-Boltzmann effective-temperature fits,
//! - [`levels`] — truncated `N`-level engine comparison,
//! - [`config`], [`table`], [`plot`] — config files, tables, SVG charts.

pub mod config;
pub mod cycle;
pub mod dynamics;
pub mod error;
pub mod levels;
pub mod plot;
pub mod table;
pub mod tempfit;
pub mod thermo;

pub use error::{Error, Result};
