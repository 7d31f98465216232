//! Massive-IoT bearer-request traffic, MME delay model and a processor-sharing
//! simulator of the CIoT control plane.
//!
//! The pipeline runs in four stages:
//!
//! - [`traffic`] generates bearer requests from the two-state regular/alarm
//!   source model whose alarm hazard samples the Beta(3,4) shape;
//! - [`arrival`] characterizes the inter-arrival process (exact discrete CDFs,
//!   the exponential limit, the Erlang mixture, KS tooling);
//! - [`delay`] turns an arrival rate into an M/D/1-PS delay tail for the MME
//!   plus a constant contribution from every other entity;
//! - [`sim`] simulates the full message flow for validation, and
//!   [`autoscale`] uses the model to pick capacity multipliers.

// `!(x > 0.0)` guards are written that way so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arrival;
pub mod autoscale;
pub mod config;
pub mod delay;
pub mod error;
pub mod numeric;
pub mod sim;
pub mod stats;
pub mod stream;
pub mod trace;
pub mod traffic;

pub use error::{Error, Result};
pub use stream::EventStream;
