//! Non-interactive sigma proofs (Fiat-Shamir over SHA-256).
//!
//! - [`consistency`]: the PPATS ciphertext `(c1, c2, d)` is well formed, i.e.
//!   `(r, s, v)` are shared between its ElGamal and commitment parts.
//! - [`binary`]: a commitment `d` opens to 0 or 1 (OR-composition of two
//!   Schnorr proofs in base `h1`).
//! - [`dleq`]: equality of discrete logs, for partial decryptions.
//!
//! Every prover has a `*_with` variant that takes explicit coins and an
//! explicit [`Challenge`], so that fixed test vectors are reproducible and
//! interactive transcripts can be replayed.

pub mod binary;
pub mod consistency;
pub mod dleq;

use crate::challenge::ProofLabel;

/// Where the verifier's challenge comes from.
#[derive(Debug, Clone, Copy)]
pub enum Challenge<'a, S> {
    /// Hash of the statement, the announcement and the label.
    FiatShamir(&'a ProofLabel),
    /// Interactive mode: the challenge is given.
    Injected(S),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum ProofError {
    #[error("the committed value is neither 0 nor 1")]
    NotBinary,
}

macro_rules! scalar_struct_impls {
    ($name:ident { $($field:ident),+ }) => {
        impl<B: crate::group::Backend> Clone for $name<B> {
            fn clone(&self) -> Self {
                *self
            }
        }

        impl<B: crate::group::Backend> Copy for $name<B> {}

        impl<B: crate::group::Backend> PartialEq for $name<B> {
            fn eq(&self, other: &Self) -> bool {
                true $(&& self.$field == other.$field)+
            }
        }

        impl<B: crate::group::Backend> Eq for $name<B> {}

        impl<B: crate::group::Backend> core::fmt::Debug for $name<B> {
            fn fmt(&self, formatter: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
                formatter
                    .debug_struct(stringify!($name))
                    $(.field(stringify!($field), &self.$field))+
                    .finish()
            }
        }
    };
}

pub(crate) use scalar_struct_impls;
