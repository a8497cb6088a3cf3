use alloc::{string::String, vec::Vec};

use rand_core::{CryptoRng, RngCore};

use super::{ElectionError, ElectionSpec, ProofKind, SpecLabels};
use crate::{
    encryption::{encrypt, Ciphertext, PublicKey},
    exec::Executor,
    group::{Backend, GroupParams},
    proofs::{
        binary::{self, BinaryProof},
        consistency,
    },
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChoiceError {
    #[error("{actual} answers for {expected} questions")]
    QuestionCount { expected: usize, actual: usize },
    #[error("question {question} has no response {response}")]
    OutOfRange { question: usize, response: u32 },
    #[error("question {question}: response {response} selected twice")]
    Duplicate { question: usize, response: u32 },
    #[error("question {question}: {selected} selections violate the selection rule")]
    RuleViolated { question: usize, selected: usize },
}

/// One encrypted 0/1 cell with both proofs.
pub struct BallotCell<B: Backend> {
    /// Carries its consistency proof.
    pub ciphertext: Ciphertext<B>,
    pub validity: BinaryProof<B>,
}

backend_struct_impls!(BallotCell { ciphertext, validity });

/// A voter's submission: `cells[question][response]`.
pub struct Ballot<B: Backend> {
    pub voter: String,
    pub cells: Vec<Vec<BallotCell<B>>>,
}

backend_struct_impls!(Ballot { voter, cells });

/// `choices[q]` lists the selected response indices of question `q`.
pub fn check_choices<B: Backend>(spec: &ElectionSpec<B>, choices: &[Vec<u32>]) -> Result<(), ChoiceError> {
    if choices.len() != spec.questions.len() {
        return Err(ChoiceError::QuestionCount {
            expected: spec.questions.len(),
            actual: choices.len(),
        });
    }
    for (question, (selected, q)) in choices.iter().zip(&spec.questions).enumerate() {
        for (i, &response) in selected.iter().enumerate() {
            if response >= q.responses {
                return Err(ChoiceError::OutOfRange { question, response });
            }
            if selected[..i].contains(&response) {
                return Err(ChoiceError::Duplicate { question, response });
            }
        }
        if !q.rule.allows(selected.len() as u64) {
            return Err(ChoiceError::RuleViolated {
                question,
                selected: selected.len(),
            });
        }
    }
    Ok(())
}

pub fn build_ballot<B: Backend, R: RngCore + CryptoRng + ?Sized>(
    params: &GroupParams<B>,
    spec: &ElectionSpec<B>,
    voter: &str,
    choices: &[Vec<u32>],
    rng: &mut R,
) -> Result<Ballot<B>, ElectionError> {
    if !spec.is_voter(voter) {
        return Err(ElectionError::UnknownVoter(voter.into()));
    }
    check_choices(spec, choices)?;
    let pk = spec.public_key();
    let labels = spec.labels(params);
    let mut cells = Vec::with_capacity(spec.questions.len());
    for (question, (selected, q)) in choices.iter().zip(&spec.questions).enumerate() {
        let mut row = Vec::with_capacity(q.responses as usize);
        for response in 0..q.responses {
            let v = params.scalar(u64::from(selected.contains(&response)));
            let (ciphertext, randomness) = encrypt(
                params,
                &pk,
                &v,
                &labels.consistency(voter, question, response as usize),
                rng,
            );
            let validity = binary::prove(
                params,
                &ciphertext.d,
                &randomness.r,
                &v,
                &labels.binary(voter, question, response as usize),
                rng,
            )
            .expect("cell values are 0 or 1");
            row.push(BallotCell { ciphertext, validity });
        }
        cells.push(row);
    }
    Ok(Ballot {
        voter: voter.into(),
        cells,
    })
}

/// Checks the first failing proof of a single cell.
pub(super) fn check_cell<B: Backend>(
    params: &GroupParams<B>,
    labels: &SpecLabels,
    pk: &PublicKey<B>,
    voter: &str,
    (question, response): (usize, usize),
    ciphertext: &Ciphertext<B>,
    validity: &BinaryProof<B>,
) -> Option<ProofKind> {
    let consistent = ciphertext.proof.as_ref().is_some_and(|proof| {
        consistency::verify(
            params,
            pk,
            ciphertext,
            proof,
            &labels.consistency(voter, question, response),
        )
    });
    if !consistent {
        return Some(ProofKind::Consistency);
    }
    let label = labels.binary(voter, question, response);
    (!binary::verify(params, &ciphertext.d, validity, &label)).then_some(ProofKind::Binary)
}

/// Verifies every proof of `ballot`; cells are checked through `exec`.
pub fn verify_ballot<B: Backend, E: Executor>(
    params: &GroupParams<B>,
    spec: &ElectionSpec<B>,
    ballot: &Ballot<B>,
    exec: &E,
) -> Result<(), ElectionError> {
    if !spec.is_voter(&ballot.voter) {
        return Err(ElectionError::UnknownVoter(ballot.voter.clone()));
    }
    if !spec.matches_shape(&ballot.cells) {
        return Err(ElectionError::MalformedBallot);
    }
    let pk = spec.public_key();
    let labels = spec.labels(params);
    let coordinates: Vec<(usize, usize)> = ballot
        .cells
        .iter()
        .enumerate()
        .flat_map(|(q, row)| (0..row.len()).map(move |r| (q, r)))
        .collect();
    let outcomes = exec.map(&coordinates, |&(q, r)| {
        let cell = &ballot.cells[q][r];
        check_cell(params, &labels, &pk, &ballot.voter, (q, r), &cell.ciphertext, &cell.validity)
    });
    match coordinates.iter().zip(outcomes).find_map(|(&c, kind)| kind.map(|k| (c, k))) {
        Some(((question, response), kind)) => Err(ElectionError::InvalidProof {
            question,
            response,
            kind,
        }),
        None => Ok(()),
    }
}
