//! Finite workbench for automorphism groups of multi-sorted structures:
//! splittings of group surjections, skew products, three-sorted encodings and
//! the uniform reconstruction of a structure from its expansions.

#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod encode;
pub mod groups;
pub mod skew;
pub mod structures;
pub mod ucp;
pub mod uniform;
