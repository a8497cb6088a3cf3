use alloc::{string::String, vec::Vec};

use sha2::{Digest, Sha256};

use crate::{
    challenge::{purpose, ProofLabel},
    encryption::PublicKey,
    group::{Backend, G1Elem, Group, GroupParams},
    threshold::SharingTranscript,
};

/// Per-question constraint on the number of selected responses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionRule {
    ExactlyOne,
    AtMost(u32),
}

impl SelectionRule {
    pub fn allows(&self, selected: u64) -> bool {
        match *self {
            Self::ExactlyOne => selected == 1,
            Self::AtMost(k) => selected <= u64::from(k),
        }
    }

    /// Whether some 0/1 row of `responses` cells violates the rule, i.e.
    /// whether the trustees must check row sums.
    pub fn needs_row_check(&self, responses: u32) -> bool {
        match *self {
            Self::ExactlyOne => true,
            Self::AtMost(k) => k < responses,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Question {
    pub responses: u32,
    pub rule: SelectionRule,
}

impl Question {
    pub fn exactly_one(responses: u32) -> Self {
        Self {
            responses,
            rule: SelectionRule::ExactlyOne,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpecError {
    #[error("the election has no questions")]
    NoQuestions,
    #[error("question {0} has no responses")]
    EmptyQuestion(usize),
    #[error("voter {0:?} appears twice on the roll")]
    DuplicateVoter(String),
    #[error("the election was set up for different group parameters")]
    ParamsMismatch,
    #[error("the public key is not the constant term of the sharing")]
    KeyMismatch,
    #[error("the sharing transcript is malformed")]
    Sharing,
}

/// Public election description posted at the head of the board.
pub struct ElectionSpec<B: Backend> {
    pub election_id: String,
    /// [`GroupParams::description_hash`] of the parameters in use.
    pub params_hash: [u8; 32],
    pub questions: Vec<Question>,
    pub voters: Vec<String>,
    pub public_key: G1Elem<B>,
    pub sharing: SharingTranscript<B>,
}

backend_struct_impls!(ElectionSpec {
    election_id,
    params_hash,
    questions,
    voters,
    public_key,
    sharing
});

impl<B: Backend> ElectionSpec<B> {
    pub fn new(
        params: &GroupParams<B>,
        election_id: String,
        questions: Vec<Question>,
        voters: Vec<String>,
        sharing: SharingTranscript<B>,
    ) -> Result<Self, SpecError> {
        let spec = Self {
            election_id,
            params_hash: *params.description_hash(),
            questions,
            voters,
            public_key: sharing.public_key().elem(),
            sharing,
        };
        spec.validate(params)?;
        Ok(spec)
    }

    pub fn validate(&self, params: &GroupParams<B>) -> Result<(), SpecError> {
        if self.params_hash != *params.description_hash() {
            return Err(SpecError::ParamsMismatch);
        }
        if self.questions.is_empty() {
            return Err(SpecError::NoQuestions);
        }
        if let Some(q) = self.questions.iter().position(|q| q.responses == 0) {
            return Err(SpecError::EmptyQuestion(q));
        }
        for (i, voter) in self.voters.iter().enumerate() {
            if self.voters[..i].contains(voter) {
                return Err(SpecError::DuplicateVoter(voter.clone()));
            }
        }
        if !self.sharing.is_well_formed(params) {
            return Err(SpecError::Sharing);
        }
        if self.sharing.commitments[0] != self.public_key {
            return Err(SpecError::KeyMismatch);
        }
        Ok(())
    }

    pub fn public_key(&self) -> PublicKey<B> {
        PublicKey::from_elem(self.public_key)
    }

    pub fn is_voter(&self, voter: &str) -> bool {
        self.voters.iter().any(|v| v == voter)
    }

    /// Whether a grid of cells has one row per question and one cell per
    /// response.
    pub fn matches_shape<T>(&self, cells: &[Vec<T>]) -> bool {
        cells.len() == self.questions.len()
            && cells
                .iter()
                .zip(&self.questions)
                .all(|(row, q)| row.len() == q.responses as usize)
    }

    /// SHA-256 over every field, so proofs made under one spec do not carry
    /// over to an edited copy.
    pub fn digest(&self, params: &GroupParams<B>) -> [u8; 32] {
        let g1 = params.backend().g1();
        let mut hasher = Sha256::new();
        let mut put = |bytes: &[u8]| {
            hasher.update((bytes.len() as u32).to_be_bytes());
            hasher.update(bytes);
        };
        put(b"ppats/v1/spec");
        put(self.election_id.as_bytes());
        put(&self.params_hash);
        put(&(self.questions.len() as u32).to_be_bytes());
        for q in &self.questions {
            let rule = match q.rule {
                SelectionRule::ExactlyOne => [0, 0, 0, 0, 0],
                SelectionRule::AtMost(k) => {
                    let [a, b, c, d] = k.to_be_bytes();
                    [1, a, b, c, d]
                }
            };
            put(&q.responses.to_be_bytes());
            put(&rule);
        }
        put(&(self.voters.len() as u32).to_be_bytes());
        for voter in &self.voters {
            put(voter.as_bytes());
        }
        put(&g1.encode(&self.public_key));
        put(&self.sharing.threshold.to_be_bytes());
        put(&self.sharing.trustees.to_be_bytes());
        put(&(self.sharing.commitments.len() as u32).to_be_bytes());
        for a in &self.sharing.commitments {
            put(&g1.encode(a));
        }
        hasher.finalize().into()
    }

    pub fn label(&self, params: &GroupParams<B>, purpose: &[u8]) -> ProofLabel {
        ProofLabel::new(params, self.election_id.as_bytes(), purpose).with_context(&self.digest(params))
    }

    /// Base labels for one pass over the board; hashes the spec once.
    pub fn labels(&self, params: &GroupParams<B>) -> SpecLabels {
        let base = self.label(params, purpose::CONSISTENCY);
        SpecLabels {
            binary: base.clone().with_purpose(purpose::BINARY),
            decryption: base.clone().with_purpose(purpose::DECRYPTION_SHARE),
            consistency: base,
        }
    }

    /// Label for the proofs of one ballot cell.
    pub fn cell_label(
        &self,
        params: &GroupParams<B>,
        purpose: &[u8],
        voter: &str,
        question: usize,
        response: usize,
    ) -> ProofLabel {
        cell_context(self.label(params, purpose), voter, question, response)
    }
}

pub struct SpecLabels {
    consistency: ProofLabel,
    binary: ProofLabel,
    decryption: ProofLabel,
}

impl SpecLabels {
    pub fn consistency(&self, voter: &str, question: usize, response: usize) -> ProofLabel {
        cell_context(self.consistency.clone(), voter, question, response)
    }

    pub fn binary(&self, voter: &str, question: usize, response: usize) -> ProofLabel {
        cell_context(self.binary.clone(), voter, question, response)
    }

    pub fn decryption(&self) -> &ProofLabel {
        &self.decryption
    }
}

fn cell_context(label: ProofLabel, voter: &str, question: usize, response: usize) -> ProofLabel {
    label
        .with_context(voter.as_bytes())
        .with_context(&(question as u32).to_be_bytes())
        .with_context(&(response as u32).to_be_bytes())
}

#[cfg(test)]
mod tests {
    use alloc::{borrow::ToOwned, vec};

    use super::*;
    use crate::{group::Toy, threshold::deal_with_coefficients};

    #[test]
    fn every_field_moves_the_digest() {
        let params = GroupParams::<Toy>::setup(&1_000_003, b"spec").unwrap();
        let s = |v| params.scalar(v);
        let (_, sharing) = deal_with_coefficients(&params, &[s(3), s(4)], 3).unwrap();
        let spec = ElectionSpec::new(
            &params,
            "e".into(),
            vec![Question::exactly_one(2), Question::exactly_one(3)],
            vec!["a".into(), "b".into()],
            sharing,
        )
        .unwrap();
        let edits: [fn(&mut ElectionSpec<Toy>); 7] = [
            |t| t.election_id.push('x'),
            |t| t.questions[1].rule = SelectionRule::AtMost(1),
            |t| t.questions[0].responses = 3,
            |t| t.voters[1] = "c".to_owned(),
            |t| t.sharing.threshold = 1,
            |t| t.sharing.trustees = 4,
            |t| t.params_hash[0] ^= 1,
        ];
        let digest = spec.digest(&params);
        for edit in edits {
            let mut edited = spec.clone();
            edit(&mut edited);
            assert_ne!(edited.digest(&params), digest);
        }
        let labels = spec.labels(&params);
        assert_eq!(
            labels.binary("a", 1, 2).to_bytes(),
            spec.cell_label(&params, purpose::BINARY, "a", 1, 2).to_bytes()
        );
        assert_eq!(
            labels.consistency("b", 0, 1).to_bytes(),
            spec.cell_label(&params, purpose::CONSISTENCY, "b", 0, 1).to_bytes()
        );
        assert_eq!(
            labels.decryption().to_bytes(),
            spec.label(&params, purpose::DECRYPTION_SHARE).to_bytes()
        );
    }
}
