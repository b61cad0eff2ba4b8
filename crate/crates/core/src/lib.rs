//! Outage probability of fixed-gain amplify-and-forward multihop relay links.
//!
//! The crate offers three analytic routes to the same quantity, all working
//! from the Mellin transforms of the per-hop channel powers:
//!
//! * [`integral::outage_contour`] integrates the Mellin-Barnes representation
//!   along a vertical line;
//! * [`integral::outage_residue_series`] sums the residues to the right of
//!   that line;
//! * [`asymptotics`] keeps only the dominant pole and yields the high-SNR
//!   expansion, coding gain and finite-SNR diversity.
//!
//! [`montecarlo`] simulates the end-to-end SNR directly and serves as the
//! reference for all three.

#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod asymptotics;
pub mod error;
pub mod fading;
pub mod integral;
pub mod link;
pub mod montecarlo;
pub mod quadrature;
pub mod special;

pub use asymptotics::{AsymptoticSeries, IndexPartition, LeadingOrder, PoleSpec};
pub use error::{Error, Result};
pub use fading::FadingModel;
pub use integral::{ContourPlacement, ExpansionConfig, IndexTuple, PoleList};
pub use link::{AmplificationPolicy, HopSpec, LinkSpec};
pub use montecarlo::{Method, OutageEstimate};
pub use special::ComplexValue;
