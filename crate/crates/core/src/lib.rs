//! Overgroup intervals in finite permutation groups, their lattice-theoretic
//! totients, and certificates for linear primitivity.

pub mod lattice;
pub mod perm;
pub mod subgroups;
pub mod catalog;
pub mod totient;
mod modp;
pub mod reptheory;
pub mod certifier;
pub mod reproduce;
