//! Sideband cooling of a mechanical resonator coupled to one cavity of a
//! gain/loss cavity pair.
//!
//! [`spectra`] holds the susceptibilities and force-noise spectrum,
//! [`supermodes`] the coupled-cavity eigenfrequencies and drift stability,
//! [`cooling`] the self-energy, spring effect and steady-state occupancy.
//! [`oracle`] has two independent checks of the occupancy (a Fock-ladder rate
//! equation and the exact covariance of the linear model), and [`sweep`]
//! turns all of it into CSV datasets.

pub mod acceptance;
pub mod config;
pub mod cooling;
pub mod error;
pub mod linearize;
pub mod oracle;
pub mod params;
pub mod spectra;
pub mod supermodes;
pub mod sweep;

pub use error::{Error, Result};
