//! PPATS: commitment-consistent encryption over type-3 pairing groups, and a
//! homomorphic-tally election whose public audit trail is perfectly hiding.
//!
//! A ballot cell is encrypted as `(c1, c2, d) = (g1^s, g1^r g2^s, h1^r h2^v)`.
//! The pair `(c1, c2)` is ElGamal encryption of the opening `g1^r` under the
//! trustees' key `g2 = g1^x`; `d` is a perfectly hiding commitment to the
//! vote `v` in G2. Only commitments and 0/1 proofs reach the bulletin board.
//! Trustees multiply ciphertexts, publish the tally together with the opening
//! `a = c2 / c1^x` of the product commitment, and anyone checks
//! `e(a, h1) = e(g1, d / h2^v)`.
//!
//! The crate is `no_std` (with `alloc`); file formats and the command-line
//! tool live in the `ppats-cli` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

#[macro_use]
mod macros;

pub mod challenge;
pub mod commitment;
pub mod dlog;
pub mod election;
pub mod encryption;
pub mod exec;
pub mod group;
pub mod proofs;
pub mod threshold;

pub use crate::{
    challenge::{fiat_shamir_challenge, ProofLabel},
    commitment::{Commitment, Opening},
    dlog::{DlogError, DlogTable},
    encryption::{Ciphertext, PublicKey, SecretKey},
    group::{Backend, BackendId, Bn254, GroupParams, Toy},
};
