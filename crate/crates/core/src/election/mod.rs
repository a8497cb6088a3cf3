//! The election pipeline: ballots, bulletin board, tally and public audit.
//!
//! Each voter encrypts one PPATS ciphertext per response cell (1 if
//! selected, 0 otherwise) with a consistency proof and a 0/1 proof on the
//! commitment. The board keeps only `(d, σ0/1)` per cell; the full
//! ciphertexts go to the trustees' private [`CiphertextStore`]. The tally
//! multiplies the stored ciphertexts per response, computes `C1^x` from key
//! shares, and publishes the result with the opening `a = C2 / C1^x` of the
//! product of the board commitments. [`verify_transcript`] replays every
//! public check.

mod ballot;
mod board;
mod spec;
mod tally;
mod verify;

use alloc::string::String;

pub use self::{
    ballot::{build_ballot, check_choices, verify_ballot, Ballot, BallotCell, ChoiceError},
    board::{
        board_digest, validate_and_post, Board, BoardCell, BoardEntry, BoardEvent, CiphertextStore,
        StoredBallot,
    },
    spec::{ElectionSpec, Question, SelectionRule, SpecError, SpecLabels},
    tally::{tally, tally_with_table, Exclusion, ResponseTally, TallyRecord},
    verify::{verify_transcript, verify_transcript_with, Check, Report, VerifyMode},
};
use crate::{dlog::DlogError, threshold::ThresholdError};

/// Which proof of a cell failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProofKind {
    Consistency,
    Binary,
}

impl core::fmt::Display for ProofKind {
    fn fmt(&self, formatter: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        formatter.write_str(match self {
            Self::Consistency => "consistency proof",
            Self::Binary => "0/1 proof",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ElectionError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("voter {0:?} is not on the roll")]
    UnknownVoter(String),
    #[error(transparent)]
    Choice(#[from] ChoiceError),
    #[error("ballot shape does not match the election")]
    MalformedBallot,
    #[error("question {question}, response {response}: {kind} rejected")]
    InvalidProof {
        question: usize,
        response: usize,
        kind: ProofKind,
    },
    #[error("board entry {position}, question {question}, response {response}: {kind} rejected on re-verification")]
    Reverification {
        position: usize,
        question: usize,
        response: usize,
        kind: ProofKind,
    },
    #[error("ciphertext store does not match board entry {position}")]
    StoreMismatch { position: usize },
    #[error("key share {index} does not match the sharing transcript")]
    InvalidShare { index: u32 },
    #[error(transparent)]
    Threshold(#[from] ThresholdError),
    #[error(transparent)]
    Dlog(#[from] DlogError),
}

/// The public audit trail.
pub struct Transcript<B: crate::group::Backend> {
    pub spec: ElectionSpec<B>,
    pub board: Board<B>,
    pub tally: Option<TallyRecord<B>>,
}

backend_struct_impls!(Transcript { spec, board, tally });
