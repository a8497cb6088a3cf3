//! Perfectly hiding commitments in G2 with group-element openings in G1.
//!
//! `d = h1^r h2^v` commits to `v`; `a = g1^r` opens it, which anyone checks
//! with `e(a, h1) = e(g1, d / h2^v)`. Since `h1^r` is uniform in G2, `d` is
//! independent of `v`. Commitments and openings multiply homomorphically.

use core::fmt;

use crate::group::{Backend, G1Elem, G2Elem, Group, GroupParams};

/// Commitment `d` to a scalar.
pub struct Commitment<B: Backend>(pub G2Elem<B>);

/// Opening `a` of a commitment, verified through the pairing.
pub struct Opening<B: Backend>(pub G1Elem<B>);

macro_rules! element_newtype {
    ($name:ident) => {
        impl<B: Backend> Clone for $name<B> {
            fn clone(&self) -> Self {
                *self
            }
        }

        impl<B: Backend> Copy for $name<B> {}

        impl<B: Backend> PartialEq for $name<B> {
            fn eq(&self, other: &Self) -> bool {
                self.0 == other.0
            }
        }

        impl<B: Backend> Eq for $name<B> {}

        impl<B: Backend> fmt::Debug for $name<B> {
            fn fmt(&self, formatter: &mut fmt::Formatter<'_>) -> fmt::Result {
                formatter.debug_tuple(stringify!($name)).field(&self.0).finish()
            }
        }
    };
}

element_newtype!(Commitment);
element_newtype!(Opening);

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum CommitmentError {
    #[error("cannot combine an empty list")]
    Empty,
}

impl<B: Backend> Commitment<B> {
    pub fn identity(params: &GroupParams<B>) -> Self {
        Self(params.backend().g2().identity())
    }
}

impl<B: Backend> Opening<B> {
    pub fn identity(params: &GroupParams<B>) -> Self {
        Self(params.backend().g1().identity())
    }
}

/// `d = h1^r h2^v`.
pub fn commit<B: Backend>(params: &GroupParams<B>, v: &B::Scalar, r: &B::Scalar) -> Commitment<B> {
    Commitment(params.h1_pow(r) * params.h2_pow(v))
}

/// `a = g1^r`.
pub fn opening_for<B: Backend>(params: &GroupParams<B>, r: &B::Scalar) -> Opening<B> {
    Opening(params.g1_pow(r))
}

/// Checks `e(a, h1) = e(g1, d / h2^v)`.
pub fn verify_opening<B: Backend>(
    params: &GroupParams<B>,
    commitment: &Commitment<B>,
    opening: &Opening<B>,
    v: &B::Scalar,
) -> bool {
    let lhs = params.pair(&opening.0, &params.h1());
    let rhs = params.pair(&params.g1(), &(commitment.0 / params.h2_pow(v)));
    lhs == rhs
}

/// Product of commitments; opens to the sum of the committed values.
pub fn combine<'a, B: Backend>(
    commitments: impl IntoIterator<Item = &'a Commitment<B>>,
) -> Result<Commitment<B>, CommitmentError> {
    commitments
        .into_iter()
        .map(|c| c.0)
        .reduce(|acc, d| acc * d)
        .map(Commitment)
        .ok_or(CommitmentError::Empty)
}

/// Product of openings, matching [`combine`].
pub fn combine_openings<'a, B: Backend>(
    openings: impl IntoIterator<Item = &'a Opening<B>>,
) -> Result<Opening<B>, CommitmentError> {
    openings
        .into_iter()
        .map(|a| a.0)
        .reduce(|acc, a| acc * a)
        .map(Opening)
        .ok_or(CommitmentError::Empty)
}
