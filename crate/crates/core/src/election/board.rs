use alloc::{string::String, vec::Vec};

use sha2::{Digest, Sha256};

use super::{verify_ballot, Ballot, ElectionError, ElectionSpec};
use crate::{
    commitment::Commitment,
    encryption::Ciphertext,
    exec::Executor,
    group::{Backend, Group, GroupParams},
    proofs::binary::BinaryProof,
};

/// Public part of a ballot cell: the commitment and its 0/1 proof.
pub struct BoardCell<B: Backend> {
    pub commitment: Commitment<B>,
    pub validity: BinaryProof<B>,
}

backend_struct_impls!(BoardCell { commitment, validity });

/// What the board publishes for a ballot. Holds nothing derived from
/// `(c1, c2, σcc)`.
pub struct BoardEntry<B: Backend> {
    pub voter: String,
    pub cells: Vec<Vec<BoardCell<B>>>,
}

backend_struct_impls!(BoardEntry { voter, cells });

impl<B: Backend> BoardEntry<B> {
    pub fn from_ballot(ballot: &Ballot<B>) -> Self {
        let cells = ballot
            .cells
            .iter()
            .map(|row| {
                row.iter()
                    .map(|cell| BoardCell {
                        commitment: cell.ciphertext.d,
                        validity: cell.validity,
                    })
                    .collect()
            })
            .collect();
        Self {
            voter: ballot.voter.clone(),
            cells,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoardEvent {
    Posted { position: usize, voter: String },
    /// A later ballot from the same voter; only the last one is counted.
    Replaced {
        position: usize,
        previous: usize,
        voter: String,
    },
}

/// Append-only list of accepted entries. A voter may appear more than once;
/// the last entry wins.
pub struct Board<B: Backend> {
    pub entries: Vec<BoardEntry<B>>,
}

backend_struct_impls!(Board { entries });

impl<B: Backend> Default for Board<B> {
    fn default() -> Self {
        Self { entries: Vec::new() }
    }
}

impl<B: Backend> Board<B> {
    /// Positions of the entries that count: the last one of each voter, in
    /// board order.
    pub fn counted_positions(&self) -> Vec<usize> {
        (0..self.entries.len())
            .filter(|&i| {
                let voter = &self.entries[i].voter;
                !self.entries[i + 1..].iter().any(|later| &later.voter == voter)
            })
            .collect()
    }

    pub fn history(&self) -> Vec<BoardEvent> {
        (0..self.entries.len())
            .map(|position| {
                let voter = self.entries[position].voter.clone();
                match self.entries[..position].iter().rposition(|e| e.voter == voter) {
                    Some(previous) => BoardEvent::Replaced {
                        position,
                        previous,
                        voter,
                    },
                    None => BoardEvent::Posted { position, voter },
                }
            })
            .collect()
    }
}

/// Full ciphertexts, aligned with the board entries. Trustee-private.
pub struct StoredBallot<B: Backend> {
    pub voter: String,
    pub cells: Vec<Vec<Ciphertext<B>>>,
}

backend_struct_impls!(StoredBallot { voter, cells });

pub struct CiphertextStore<B: Backend> {
    pub ballots: Vec<StoredBallot<B>>,
}

backend_struct_impls!(CiphertextStore { ballots });

impl<B: Backend> Default for CiphertextStore<B> {
    fn default() -> Self {
        Self { ballots: Vec::new() }
    }
}

/// Verifies `ballot`, then appends its public part to `board` and its
/// ciphertexts to `store`. On error neither is modified.
pub fn validate_and_post<B: Backend, E: Executor>(
    params: &GroupParams<B>,
    spec: &ElectionSpec<B>,
    board: &mut Board<B>,
    store: &mut CiphertextStore<B>,
    ballot: &Ballot<B>,
    exec: &E,
) -> Result<BoardEvent, ElectionError> {
    verify_ballot(params, spec, ballot, exec)?;
    let position = board.entries.len();
    let voter = ballot.voter.clone();
    let event = match board.entries.iter().rposition(|e| e.voter == voter) {
        Some(previous) => BoardEvent::Replaced {
            position,
            previous,
            voter,
        },
        None => BoardEvent::Posted { position, voter },
    };
    board.entries.push(BoardEntry::from_ballot(ballot));
    store.ballots.push(StoredBallot {
        voter: ballot.voter.clone(),
        cells: ballot
            .cells
            .iter()
            .map(|row| row.iter().map(|cell| cell.ciphertext.clone()).collect())
            .collect(),
    });
    Ok(event)
}

/// SHA-256 over the canonical binary encoding of the board entries.
pub fn board_digest<B: Backend>(params: &GroupParams<B>, entries: &[BoardEntry<B>]) -> [u8; 32] {
    let backend = params.backend();
    let mut hasher = Sha256::new();
    hasher.update(b"ppats/v1/board");
    hasher.update((entries.len() as u64).to_be_bytes());
    for entry in entries {
        hasher.update((entry.voter.len() as u32).to_be_bytes());
        hasher.update(entry.voter.as_bytes());
        hasher.update((entry.cells.len() as u32).to_be_bytes());
        for row in &entry.cells {
            hasher.update((row.len() as u32).to_be_bytes());
            for cell in row {
                hasher.update(backend.g2().encode(&cell.commitment.0));
                let proof = &cell.validity;
                for scalar in [proof.e0, proof.e1, proof.f0, proof.f1] {
                    hasher.update(backend.encode_scalar(&scalar));
                }
            }
        }
    }
    hasher.finalize().into()
}
