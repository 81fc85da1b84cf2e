//! Two-user byzantine multiple-access channels: classification, spoofing
//! attacks, adversary-identifying decoders and rate-region bounds.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs; file formats, the command-line frontend and
//! threaded Monte Carlo live in the companion `byzmac-cli` crate.
//!
//! Conventions used throughout:
//!
//! - logarithms are base 2, information is measured in bits;
//! - channel tables are indexed `(x, y, z)` row-major, i.e. `w[(x * ny + y) * nz + z]`;
//! - messages and encoder indices are 0-based;
//! - length-`n` sequences are `&[usize]` slices of symbols.
#![no_std]

extern crate alloc;

pub mod attack;
pub mod classifier;
pub mod codec;
mod error;
pub mod feasibility;
pub mod info;
pub mod kernel;
pub mod lp;
pub mod mac;
pub mod region;
pub mod seq;
pub mod sim;
pub mod types;

pub use error::{Error, Result};
pub use info::Bits;
pub use kernel::{DistributionVector, Kernel};
pub use mac::{AvMac, Mac, User};
pub use types::JointType;

/// Default enumeration budget for exhaustive operations (2^24 cells).
pub const DEFAULT_BUDGET: u128 = 1 << 24;
