//! Reference engines that share no pricing code with the lattices.

pub mod enumeration;
pub mod mc;

pub use enumeration::{enumerate_paths_price, enumerate_paths_price_with, MAX_ENUMERATION_STEPS};
pub use mc::{mc_price, McConfig};
