//! JSON forms of the protocol objects.

use ppats::{
    election::{
        Ballot, BallotCell, Board, BoardCell, BoardEntry, CiphertextStore, ElectionSpec, Exclusion, Question,
        Report, ResponseTally, SelectionRule, StoredBallot, TallyRecord, Transcript,
    },
    proofs::{binary::BinaryProof, consistency::ConsistencyProof, dleq::DleqProof},
    threshold::{KeyShare, PartialDecryption, SharingTranscript},
    Backend, Ciphertext, Commitment, Opening,
};
use serde_json::{json, Map, Value};

use crate::json::{
    child, digest_value, envelope, list, object, open_envelope, str_value, u32_value, u64_value, Codec,
    FormatError, Result,
};

fn obj(entries: Vec<(&str, Value)>) -> Map<String, Value> {
    entries.into_iter().map(|(k, v)| (k.to_owned(), v)).collect()
}

fn grid<T>(rows: &[Vec<T>], cell: impl Fn(&T) -> Value) -> Value {
    rows.iter().map(|row| row.iter().map(&cell).collect::<Value>()).collect()
}

fn read_grid<T>(value: &Value, path: &str, mut cell: impl FnMut(&Value, &str) -> Result<T>) -> Result<Vec<Vec<T>>> {
    list(value, path, |row, path| list(row, path, &mut cell))
}

impl<B: Backend> Codec<'_, B> {
    pub fn consistency_proof(&self, proof: &ConsistencyProof<B>) -> Value {
        json!({
            "e": self.scalar(&proof.e),
            "f_r": self.scalar(&proof.f_r),
            "f_s": self.scalar(&proof.f_s),
            "f_v": self.scalar(&proof.f_v),
        })
    }

    pub fn read_consistency_proof(&self, value: &Value, path: &str) -> Result<ConsistencyProof<B>> {
        let map = object(value, &["e", "f_r", "f_s", "f_v"], path)?;
        Ok(ConsistencyProof {
            e: self.read_scalar(&map["e"], &child(path, "e"))?,
            f_r: self.read_scalar(&map["f_r"], &child(path, "f_r"))?,
            f_s: self.read_scalar(&map["f_s"], &child(path, "f_s"))?,
            f_v: self.read_scalar(&map["f_v"], &child(path, "f_v"))?,
        })
    }

    pub fn binary_proof(&self, proof: &BinaryProof<B>) -> Value {
        json!({
            "e0": self.scalar(&proof.e0),
            "e1": self.scalar(&proof.e1),
            "f0": self.scalar(&proof.f0),
            "f1": self.scalar(&proof.f1),
        })
    }

    pub fn read_binary_proof(&self, value: &Value, path: &str) -> Result<BinaryProof<B>> {
        let map = object(value, &["e0", "e1", "f0", "f1"], path)?;
        Ok(BinaryProof {
            e0: self.read_scalar(&map["e0"], &child(path, "e0"))?,
            e1: self.read_scalar(&map["e1"], &child(path, "e1"))?,
            f0: self.read_scalar(&map["f0"], &child(path, "f0"))?,
            f1: self.read_scalar(&map["f1"], &child(path, "f1"))?,
        })
    }

    pub fn dleq_proof(&self, proof: &DleqProof<B>) -> Value {
        json!({ "e": self.scalar(&proof.e), "f": self.scalar(&proof.f) })
    }

    pub fn read_dleq_proof(&self, value: &Value, path: &str) -> Result<DleqProof<B>> {
        let map = object(value, &["e", "f"], path)?;
        Ok(DleqProof {
            e: self.read_scalar(&map["e"], &child(path, "e"))?,
            f: self.read_scalar(&map["f"], &child(path, "f"))?,
        })
    }

    /// A ciphertext with its consistency proof (`null` when absent).
    pub fn ciphertext(&self, ct: &Ciphertext<B>) -> Value {
        json!({
            "c1": self.g1(&ct.c1),
            "c2": self.g1(&ct.c2),
            "d": self.g2(&ct.d.0),
            "proof": ct.proof.as_ref().map_or(Value::Null, |p| self.consistency_proof(p)),
        })
    }

    pub fn read_ciphertext(&self, value: &Value, path: &str) -> Result<Ciphertext<B>> {
        let map = object(value, &["c1", "c2", "d", "proof"], path)?;
        let proof = match &map["proof"] {
            Value::Null => None,
            proof => Some(self.read_consistency_proof(proof, &child(path, "proof"))?),
        };
        Ok(Ciphertext {
            c1: self.read_g1(&map["c1"], &child(path, "c1"))?,
            c2: self.read_g1(&map["c2"], &child(path, "c2"))?,
            d: Commitment(self.read_g2(&map["d"], &child(path, "d"))?),
            proof,
        })
    }

    pub fn sharing(&self, sharing: &SharingTranscript<B>) -> Map<String, Value> {
        obj(vec![
            ("threshold", sharing.threshold.into()),
            ("trustees", sharing.trustees.into()),
            ("commitments", sharing.commitments.iter().map(|a| self.g1(a)).collect()),
        ])
    }

    pub fn read_sharing(&self, map: &Map<String, Value>, path: &str) -> Result<SharingTranscript<B>> {
        let sharing = SharingTranscript {
            threshold: u32_value(&map["threshold"], &child(path, "threshold"))?,
            trustees: u32_value(&map["trustees"], &child(path, "trustees"))?,
            commitments: list(&map["commitments"], &child(path, "commitments"), |v, p| self.read_g1(v, p))?,
        };
        if !sharing.is_well_formed(self.params) {
            return Err(FormatError::new(path, "threshold, trustee count and commitments are inconsistent"));
        }
        Ok(sharing)
    }

    pub fn sharing_file(&self, sharing: &SharingTranscript<B>) -> Value {
        let mut body = self.sharing(sharing);
        body.insert("params_hash".into(), hex::encode(self.params.description_hash()).into());
        envelope("sharing", body)
    }

    pub fn read_sharing_file(&self, value: &Value) -> Result<SharingTranscript<B>> {
        let map = open_envelope(value, "sharing", &["params_hash", "threshold", "trustees", "commitments"])?;
        self.check_params_hash(&map["params_hash"], "$.params_hash")?;
        self.read_sharing(map, "$")
    }

    pub fn share_file(&self, share: &KeyShare<B>) -> Value {
        envelope(
            "key-share",
            obj(vec![
                ("params_hash", hex::encode(self.params.description_hash()).into()),
                ("index", share.index.into()),
                ("secret", self.scalar(share.expose_secret())),
                ("public", self.g1(&share.public)),
            ]),
        )
    }

    pub fn read_share_file(&self, value: &Value) -> Result<KeyShare<B>> {
        let map = open_envelope(value, "key-share", &["params_hash", "index", "secret", "public"])?;
        self.check_params_hash(&map["params_hash"], "$.params_hash")?;
        let share = KeyShare::new(
            self.params,
            u32_value(&map["index"], "$.index")?,
            self.read_scalar(&map["secret"], "$.secret")?,
        );
        if self.read_g1(&map["public"], "$.public")? != share.public {
            return Err(FormatError::new("$.public", "does not match the secret share"));
        }
        Ok(share)
    }

    fn check_params_hash(&self, value: &Value, path: &str) -> Result<()> {
        if digest_value(value, path)? != *self.params.description_hash() {
            return Err(FormatError::new(path, "file belongs to different group parameters"));
        }
        Ok(())
    }

    pub fn spec(&self, spec: &ElectionSpec<B>) -> Value {
        let questions: Value = spec
            .questions
            .iter()
            .map(|q| json!({ "responses": q.responses, "rule": rule_name(q.rule) }))
            .collect();
        Value::Object(obj(vec![
            ("election_id", spec.election_id.clone().into()),
            ("params_hash", hex::encode(spec.params_hash).into()),
            ("questions", questions),
            ("voters", spec.voters.clone().into()),
            ("public_key", self.g1(&spec.public_key)),
            ("sharing", Value::Object(self.sharing(&spec.sharing))),
        ]))
    }

    pub fn read_spec(&self, value: &Value, path: &str) -> Result<ElectionSpec<B>> {
        let map = object(
            value,
            &["election_id", "params_hash", "questions", "voters", "public_key", "sharing"],
            path,
        )?;
        let questions = list(&map["questions"], &child(path, "questions"), |q, path| {
            let q = object(q, &["responses", "rule"], path)?;
            Ok(Question {
                responses: u32_value(&q["responses"], &child(path, "responses"))?,
                rule: parse_rule(str_value(&q["rule"], &child(path, "rule"))?)
                    .ok_or_else(|| FormatError::new(&child(path, "rule"), "unknown selection rule"))?,
            })
        })?;
        let sharing_path = child(path, "sharing");
        let sharing = object(&map["sharing"], &["threshold", "trustees", "commitments"], &sharing_path)?;
        Ok(ElectionSpec {
            election_id: str_value(&map["election_id"], &child(path, "election_id"))?.into(),
            params_hash: digest_value(&map["params_hash"], &child(path, "params_hash"))?,
            questions,
            voters: list(&map["voters"], &child(path, "voters"), |v, p| str_value(v, p).map(String::from))?,
            public_key: self.read_g1(&map["public_key"], &child(path, "public_key"))?,
            sharing: self.read_sharing(sharing, &sharing_path)?,
        })
    }

    pub fn board_entry(&self, entry: &BoardEntry<B>) -> Value {
        json!({
            "voter": entry.voter,
            "cells": grid(&entry.cells, |cell| json!({
                "d": self.g2(&cell.commitment.0),
                "validity": self.binary_proof(&cell.validity),
            })),
        })
    }

    pub fn read_board_entry(&self, value: &Value, path: &str) -> Result<BoardEntry<B>> {
        let map = object(value, &["voter", "cells"], path)?;
        Ok(BoardEntry {
            voter: str_value(&map["voter"], &child(path, "voter"))?.into(),
            cells: read_grid(&map["cells"], &child(path, "cells"), |cell, path| {
                let cell = object(cell, &["d", "validity"], path)?;
                Ok(BoardCell {
                    commitment: Commitment(self.read_g2(&cell["d"], &child(path, "d"))?),
                    validity: self.read_binary_proof(&cell["validity"], &child(path, "validity"))?,
                })
            })?,
        })
    }

    pub fn tally(&self, tally: &TallyRecord<B>) -> Value {
        let exclusions: Value = tally
            .exclusions
            .iter()
            .map(|x| {
                json!({
                    "position": x.position,
                    "question": x.question,
                    "selected": x.selected,
                    "opening": self.g1(&x.opening.0),
                })
            })
            .collect();
        json!({
            "board_digest": hex::encode(tally.board_digest),
            "counted": tally.counted,
            "exclusions": exclusions,
            "responses": grid(&tally.responses, |r| json!({
                "commitment": self.g2(&r.commitment.0),
                "result": r.result,
                "opening": self.g1(&r.opening.0),
                "c1": self.g1(&r.c1),
                "partials": r.partials.iter().map(|p| json!({
                    "index": p.index,
                    "value": self.g1(&p.value),
                    "proof": self.dleq_proof(&p.proof),
                })).collect::<Value>(),
            })),
        })
    }

    pub fn read_tally(&self, value: &Value, path: &str) -> Result<TallyRecord<B>> {
        let map = object(value, &["board_digest", "counted", "exclusions", "responses"], path)?;
        let exclusions = list(&map["exclusions"], &child(path, "exclusions"), |x, path| {
            let x = object(x, &["position", "question", "selected", "opening"], path)?;
            Ok(Exclusion {
                position: u64_value(&x["position"], &child(path, "position"))?,
                question: u32_value(&x["question"], &child(path, "question"))?,
                selected: u64_value(&x["selected"], &child(path, "selected"))?,
                opening: Opening(self.read_g1(&x["opening"], &child(path, "opening"))?),
            })
        })?;
        let responses = read_grid(&map["responses"], &child(path, "responses"), |r, path| {
            let r = object(r, &["commitment", "result", "opening", "c1", "partials"], path)?;
            Ok(ResponseTally {
                commitment: Commitment(self.read_g2(&r["commitment"], &child(path, "commitment"))?),
                result: u64_value(&r["result"], &child(path, "result"))?,
                opening: Opening(self.read_g1(&r["opening"], &child(path, "opening"))?),
                c1: self.read_g1(&r["c1"], &child(path, "c1"))?,
                partials: list(&r["partials"], &child(path, "partials"), |p, path| {
                    let p = object(p, &["index", "value", "proof"], path)?;
                    Ok(PartialDecryption {
                        index: u32_value(&p["index"], &child(path, "index"))?,
                        value: self.read_g1(&p["value"], &child(path, "value"))?,
                        proof: self.read_dleq_proof(&p["proof"], &child(path, "proof"))?,
                    })
                })?,
            })
        })?;
        Ok(TallyRecord {
            board_digest: digest_value(&map["board_digest"], &child(path, "board_digest"))?,
            counted: u64_value(&map["counted"], &child(path, "counted"))?,
            exclusions,
            responses,
        })
    }

    pub fn transcript(&self, transcript: &Transcript<B>) -> Value {
        envelope(
            "transcript",
            obj(vec![
                ("spec", self.spec(&transcript.spec)),
                (
                    "board",
                    transcript.board.entries.iter().map(|e| self.board_entry(e)).collect(),
                ),
                (
                    "tally",
                    transcript.tally.as_ref().map_or(Value::Null, |t| self.tally(t)),
                ),
            ]),
        )
    }

    pub fn read_transcript(&self, value: &Value) -> Result<Transcript<B>> {
        let map = open_envelope(value, "transcript", &["spec", "board", "tally"])?;
        let spec = self.read_spec(&map["spec"], "$.spec")?;
        if spec.params_hash != *self.params.description_hash() {
            return Err(FormatError::new("$.spec.params_hash", "transcript belongs to different group parameters"));
        }
        Ok(Transcript {
            spec,
            board: Board {
                entries: list(&map["board"], "$.board", |e, p| self.read_board_entry(e, p))?,
            },
            tally: match &map["tally"] {
                Value::Null => None,
                tally => Some(self.read_tally(tally, "$.tally")?),
            },
        })
    }

    pub fn store(&self, store: &CiphertextStore<B>) -> Value {
        let ballots: Value = store
            .ballots
            .iter()
            .map(|b| json!({ "voter": b.voter, "cells": grid(&b.cells, |ct| self.ciphertext(ct)) }))
            .collect();
        envelope(
            "ciphertext-store",
            obj(vec![
                ("params_hash", hex::encode(self.params.description_hash()).into()),
                ("ballots", ballots),
            ]),
        )
    }

    pub fn read_store(&self, value: &Value) -> Result<CiphertextStore<B>> {
        let map = open_envelope(value, "ciphertext-store", &["params_hash", "ballots"])?;
        self.check_params_hash(&map["params_hash"], "$.params_hash")?;
        Ok(CiphertextStore {
            ballots: list(&map["ballots"], "$.ballots", |b, path| {
                let b = object(b, &["voter", "cells"], path)?;
                Ok(StoredBallot {
                    voter: str_value(&b["voter"], &child(path, "voter"))?.into(),
                    cells: read_grid(&b["cells"], &child(path, "cells"), |ct, p| self.read_ciphertext(ct, p))?,
                })
            })?,
        })
    }

    pub fn ballot(&self, election_id: &str, ballot: &Ballot<B>) -> Value {
        envelope(
            "ballot",
            obj(vec![
                ("election_id", election_id.into()),
                ("voter", ballot.voter.clone().into()),
                (
                    "cells",
                    grid(&ballot.cells, |cell| {
                        json!({
                            "ciphertext": self.ciphertext(&cell.ciphertext),
                            "validity": self.binary_proof(&cell.validity),
                        })
                    }),
                ),
            ]),
        )
    }

    /// Returns the election id the ballot was cast for, and the ballot.
    pub fn read_ballot(&self, value: &Value) -> Result<(String, Ballot<B>)> {
        let map = open_envelope(value, "ballot", &["election_id", "voter", "cells"])?;
        let ballot = Ballot {
            voter: str_value(&map["voter"], "$.voter")?.into(),
            cells: read_grid(&map["cells"], "$.cells", |cell, path| {
                let cell = object(cell, &["ciphertext", "validity"], path)?;
                Ok(BallotCell {
                    ciphertext: self.read_ciphertext(&cell["ciphertext"], &child(path, "ciphertext"))?,
                    validity: self.read_binary_proof(&cell["validity"], &child(path, "validity"))?,
                })
            })?,
        };
        Ok((str_value(&map["election_id"], "$.election_id")?.into(), ballot))
    }
}

pub fn rule_name(rule: SelectionRule) -> String {
    match rule {
        SelectionRule::ExactlyOne => "exactly-one".into(),
        SelectionRule::AtMost(k) => format!("at-most-{k}"),
    }
}

pub fn parse_rule(text: &str) -> Option<SelectionRule> {
    match text {
        "exactly-one" => Some(SelectionRule::ExactlyOne),
        _ => text.strip_prefix("at-most-")?.parse().ok().map(SelectionRule::AtMost),
    }
}

pub fn report(report: &Report) -> Value {
    let checks: Value = report
        .checks
        .iter()
        .map(|c| json!({ "name": c.name, "passed": c.passed(), "failures": c.failures }))
        .collect();
    envelope(
        "verification-report",
        obj(vec![("all_passed", report.all_passed().into()), ("checks", checks)]),
    )
}
