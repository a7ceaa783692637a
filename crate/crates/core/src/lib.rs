//! Secrecy rate regions of the Gaussian multiple-access wiretap channel.
//!
//! The crate is organised bottom-up:
//!
//! * [`channel`] holds the channel parameters and the scalar capacity formulas.
//! * [`region`] builds the δ-secret rate regions as halfspace systems, tests
//!   membership, enumerates vertices and computes the secrecy sum capacity.
//! * [`tdma`] evaluates and optimizes the time-division achievable region.
//! * [`lp`] is a small dense simplex solver used by [`split`].
//! * [`split`] turns a rate point into a secret/open/randomization rate split.
//! * [`sim`] runs Monte Carlo trials of the superposition scheme over the AWGN
//!   cascade with exhaustive nearest-neighbour decoding.
//! * [`oracle`] computes normalized equivocations exactly on finite-alphabet
//!   toy channels.
//!
//! All rates are in bits per channel use.

pub mod channel;
pub mod error;
pub mod lp;
pub mod oracle;
pub mod region;
pub mod sim;
pub mod split;
pub mod tdma;

pub use channel::{ChannelConfig, SecrecyLevel, SubsetId};
pub use error::{Error, Result};
pub use region::{Family, Halfspace, RatePoint, RateRegion};
