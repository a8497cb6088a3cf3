use std::collections::BTreeMap;

use ppats::{
    challenge::purpose,
    election::{
        board_digest, build_ballot, tally, validate_and_post, verify_transcript, verify_transcript_with, Ballot, BallotCell, Board, BoardEvent,
        CiphertextStore, ElectionError, ElectionSpec, ProofKind, Question, SelectionRule, Transcript, VerifyMode,
    },
    encryption::{encrypt_with, Randomness},
    exec::Sequential,
    proofs::{binary, consistency},
    threshold::{deal, deal_with_coefficients, KeyShare},
    Commitment, GroupParams, Toy,
};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

const Q: u64 = (1 << 61) - 1;

fn voters(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("voter-{i:03}")).collect()
}

/// Cell with fixed encryption randomness and honest proofs.
fn fixed_cell(
    params: &GroupParams<Toy>,
    spec: &ElectionSpec<Toy>,
    voter: &str,
    (v, r, s): (u64, u64, u64),
    rng: &mut ChaCha20Rng,
) -> BallotCell<Toy> {
    let pk = spec.public_key();
    let randomness = Randomness {
        r: params.scalar(r),
        s: params.scalar(s),
    };
    // Values above 1 get a proof run with the wrong branch witness.
    let claimed = params.scalar(v.min(1));
    let v = params.scalar(v);
    let mut ciphertext = encrypt_with(params, &pk, &v, &randomness);
    let label = spec.cell_label(params, purpose::CONSISTENCY, voter, 0, 0);
    ciphertext.proof = Some(consistency::prove(params, &pk, &ciphertext, &randomness, &v, &label, rng));
    let label = spec.cell_label(params, purpose::BINARY, voter, 0, 0);
    let validity = binary::prove(params, &ciphertext.d, &randomness.r, &claimed, &label, rng).unwrap();
    BallotCell { ciphertext, validity }
}

/// One-question ballot with arbitrary 0/1 values, bypassing the rule check.
fn raw_ballot(
    params: &GroupParams<Toy>,
    spec: &ElectionSpec<Toy>,
    voter: &str,
    row: &[u64],
    rng: &mut ChaCha20Rng,
) -> Ballot<Toy> {
    let pk = spec.public_key();
    let labels = spec.labels(params);
    let cells = row
        .iter()
        .enumerate()
        .map(|(response, &v)| {
            let v = params.scalar(v);
            let randomness = Randomness::random(params, rng);
            let mut ciphertext = encrypt_with(params, &pk, &v, &randomness);
            let label = labels.consistency(voter, 0, response);
            ciphertext.proof = Some(consistency::prove(params, &pk, &ciphertext, &randomness, &v, &label, rng));
            let label = labels.binary(voter, 0, response);
            let validity = binary::prove(params, &ciphertext.d, &randomness.r, &v, &label, rng).unwrap();
            BallotCell { ciphertext, validity }
        })
        .collect();
    Ballot {
        voter: voter.into(),
        cells: vec![cells],
    }
}

#[test]
fn toy_fixture_tally() {
    let params = GroupParams::<Toy>::setup(&11, b"T11").unwrap();
    let (shares, sharing) = deal_with_coefficients(&params, &[params.scalar(3), params.scalar(4)], 3).unwrap();
    let questions = vec![Question {
        responses: 1,
        rule: SelectionRule::AtMost(1),
    }];
    let spec = ElectionSpec::new(&params, "T11".into(), questions, voters(2), sharing).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    let mut board = Board::default();
    let mut store = CiphertextStore::default();
    for (voter, witness) in spec.voters.clone().iter().zip([(1, 2, 4), (0, 1, 5)]) {
        let cell = fixed_cell(&params, &spec, voter, witness, &mut rng);
        let ballot = Ballot {
            voter: voter.clone(),
            cells: vec![vec![cell]],
        };
        validate_and_post(&params, &spec, &mut board, &mut store, &ballot, &Sequential).unwrap();
    }
    let c: Vec<_> = store.ballots.iter().map(|b| &b.cells[0][0]).collect();
    assert_eq!((c[0].c1.log(), c[0].c2.log(), c[0].d.0.log()), (4, 3, 7));
    assert_eq!((c[1].c1.log(), c[1].c2.log(), c[1].d.0.log()), (5, 5, 1));

    let record = tally(&params, &spec, &board, &store, shares[..2].to_vec(), &mut rng, &Sequential).unwrap();
    let response = &record.responses[0][0];
    assert_eq!(response.commitment.0.log(), 8);
    assert_eq!(response.result, 1);
    assert_eq!(response.opening.0.log(), 3);
    assert_eq!(record.counted, 2);

    let transcript = Transcript {
        spec,
        board,
        tally: Some(record),
    };
    assert!(verify_transcript(&params, &transcript, &Sequential).all_passed());
}

fn setup(
    questions: Vec<Question>,
    voter_count: usize,
    rng: &mut ChaCha20Rng,
) -> (GroupParams<Toy>, ElectionSpec<Toy>, Vec<KeyShare<Toy>>) {
    let params = GroupParams::<Toy>::setup(&Q, b"election tests").unwrap();
    let x = params.random_scalar(rng);
    let (shares, sharing) = deal(&params, &x, 2, 3, rng).unwrap();
    let spec = ElectionSpec::new(&params, "test".into(), questions, voters(voter_count), sharing).unwrap();
    (params, spec, shares)
}

fn failing(report: &ppats::election::Report) -> Vec<&'static str> {
    report.failed().map(|c| c.name).collect()
}

#[test]
fn empty_election() {
    let mut rng = ChaCha20Rng::seed_from_u64(0);
    let (params, spec, shares) = setup(vec![Question::exactly_one(3)], 4, &mut rng);
    let board = Board::default();
    let store = CiphertextStore::default();
    let record = tally(&params, &spec, &board, &store, shares, &mut rng, &Sequential).unwrap();
    for response in &record.responses[0] {
        assert_eq!(response.result, 0);
        assert_eq!(response.commitment, Commitment::identity(&params));
        assert_eq!(response.opening.0.log(), 0);
    }
    let transcript = Transcript {
        spec,
        board,
        tally: Some(record),
    };
    assert!(verify_transcript(&params, &transcript, &Sequential).all_passed());
}

#[test]
fn random_ballots_match_plaintext_sums() {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let questions = vec![
        Question::exactly_one(3),
        Question {
            responses: 4,
            rule: SelectionRule::AtMost(2),
        },
    ];
    let (params, spec, shares) = setup(questions, 50, &mut rng);
    let mut board = Board::default();
    let mut store = CiphertextStore::default();
    let mut expected = vec![vec![0_u64; 3], vec![0_u64; 4]];
    for (i, voter) in spec.voters.iter().enumerate() {
        let first = (i * 7 % 3) as u32;
        let second: Vec<u32> = (0..4).filter(|r| (i + *r as usize) % 3 == 0).take(2).collect();
        expected[0][first as usize] += 1;
        for &r in &second {
            expected[1][r as usize] += 1;
        }
        let ballot = build_ballot(&params, &spec, voter, &[vec![first], second], &mut rng).unwrap();
        let event = validate_and_post(&params, &spec, &mut board, &mut store, &ballot, &Sequential).unwrap();
        assert_eq!(event, BoardEvent::Posted { position: i, voter: voter.clone() });
    }
    let record = tally(&params, &spec, &board, &store, shares, &mut rng, &Sequential).unwrap();
    let results: Vec<Vec<u64>> = record.responses.iter().map(|row| row.iter().map(|r| r.result).collect()).collect();
    assert_eq!(results, expected);
    assert!(record.exclusions.is_empty());

    let mut transcript = Transcript {
        spec,
        board,
        tally: Some(record),
    };
    assert!(verify_transcript(&params, &transcript, &Sequential).all_passed());

    let tally_record = transcript.tally.as_mut().unwrap();
    tally_record.responses[1][2].result += 1;
    assert_eq!(failing(&verify_transcript(&params, &transcript, &Sequential)), ["opening"]);
    transcript.tally.as_mut().unwrap().responses[1][2].result -= 1;

    transcript.board.entries.remove(17);
    let failed = failing(&verify_transcript(&params, &transcript, &Sequential));
    assert!(failed.contains(&"opening"), "{failed:?}");

    // first-failure mode stops at the earliest check the full run also flags
    let quick = verify_transcript_with(&params, &transcript, &Sequential, VerifyMode::FirstFailure);
    assert_eq!(failing(&quick), ["board-digest"]);
    assert!(quick.checks.iter().all(|c| c.name != "ballot-validity"));
    assert!(failed.contains(&"board-digest"));
}

#[test]
fn first_failure_mode_reaches_the_proofs_when_needed() {
    let mut rng = ChaCha20Rng::seed_from_u64(9);
    let (params, spec, shares) = setup(vec![Question::exactly_one(2)], 3, &mut rng);
    let mut board = Board::default();
    let mut store = CiphertextStore::default();
    for voter in spec.voters.clone() {
        let ballot = build_ballot(&params, &spec, &voter, &[vec![1]], &mut rng).unwrap();
        validate_and_post(&params, &spec, &mut board, &mut store, &ballot, &Sequential).unwrap();
    }
    let record = tally(&params, &spec, &board, &store, shares, &mut rng, &Sequential).unwrap();
    let mut transcript = Transcript {
        spec,
        board,
        tally: Some(record),
    };
    let honest = verify_transcript_with(&params, &transcript, &Sequential, VerifyMode::FirstFailure);
    assert!(honest.all_passed());
    assert_eq!(honest.checks, verify_transcript(&params, &transcript, &Sequential).checks);
    // a forged proof with the digest recomputed is only visible to the proof check
    transcript.board.entries[2].cells[0][1].validity.f0 = transcript.board.entries[2].cells[0][1].validity.f0 + params.scalar(1);
    let tally_record = transcript.tally.as_mut().unwrap();
    tally_record.board_digest = board_digest(&params, &transcript.board.entries);
    let quick = verify_transcript_with(&params, &transcript, &Sequential, VerifyMode::FirstFailure);
    assert_eq!(failing(&quick), ["ballot-validity"]);
    assert_eq!(failing(&verify_transcript(&params, &transcript, &Sequential)), ["ballot-validity"]);
}

#[test]
fn last_ballot_wins() {
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let (params, spec, shares) = setup(vec![Question::exactly_one(2)], 2, &mut rng);
    let mut board = Board::default();
    let mut store = CiphertextStore::default();
    let v0 = spec.voters[0].clone();
    let v1 = spec.voters[1].clone();
    for (voter, choice) in [(&v0, 0), (&v1, 1), (&v0, 1)] {
        let ballot = build_ballot(&params, &spec, voter, &[vec![choice]], &mut rng).unwrap();
        validate_and_post(&params, &spec, &mut board, &mut store, &ballot, &Sequential).unwrap();
    }
    assert_eq!(
        board.history()[2],
        BoardEvent::Replaced {
            position: 2,
            previous: 0,
            voter: v0.clone()
        }
    );
    assert_eq!(board.counted_positions(), [1, 2]);
    let record = tally(&params, &spec, &board, &store, shares, &mut rng, &Sequential).unwrap();
    assert_eq!(record.responses[0].iter().map(|r| r.result).collect::<Vec<_>>(), [0, 2]);
    let transcript = Transcript {
        spec,
        board,
        tally: Some(record),
    };
    assert!(verify_transcript(&params, &transcript, &Sequential).all_passed());
}

#[test]
fn overvote_is_excluded_with_evidence() {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let (params, spec, shares) = setup(vec![Question::exactly_one(3)], 3, &mut rng);

    let mut board = Board::default();
    let mut store = CiphertextStore::default();
    let honest = build_ballot(&params, &spec, &spec.voters[0], &[vec![2]], &mut rng).unwrap();
    let overvote = raw_ballot(&params, &spec, &spec.voters[1], &[1, 1, 0], &mut rng);
    let blank = raw_ballot(&params, &spec, &spec.voters[2], &[0, 0, 0], &mut rng);
    for ballot in [&honest, &overvote, &blank] {
        validate_and_post(&params, &spec, &mut board, &mut store, ballot, &Sequential).unwrap();
    }
    let record = tally(&params, &spec, &board, &store, shares, &mut rng, &Sequential).unwrap();
    let excluded: Vec<(u64, u64)> = record.exclusions.iter().map(|x| (x.position, x.selected)).collect();
    assert_eq!(excluded, [(1, 2), (2, 0)]);
    assert_eq!(record.counted, 1);
    assert_eq!(record.responses[0].iter().map(|r| r.result).collect::<Vec<_>>(), [0, 0, 1]);

    let mut transcript = Transcript {
        spec,
        board,
        tally: Some(record),
    };
    assert!(verify_transcript(&params, &transcript, &Sequential).all_passed());

    // Excluding an honest ballot cannot be justified.
    let tally_record = transcript.tally.as_mut().unwrap();
    tally_record.exclusions[0].position = 0;
    let failed = failing(&verify_transcript(&params, &transcript, &Sequential));
    assert!(failed.contains(&"exclusions"), "{failed:?}");
}

#[test]
fn invalid_ballots_leave_the_board_unchanged() {
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let (params, spec, _) = setup(vec![Question::exactly_one(2)], 2, &mut rng);
    let mut board = Board::default();
    let mut store = CiphertextStore::default();
    let voter = spec.voters[0].clone();

    let mut ballot = build_ballot(&params, &spec, &voter, &[vec![1]], &mut rng).unwrap();
    ballot.cells[0][1].ciphertext.c2 = ballot.cells[0][1].ciphertext.c2 * params.g1();
    let err = validate_and_post(&params, &spec, &mut board, &mut store, &ballot, &Sequential).unwrap_err();
    assert_eq!(
        err,
        ElectionError::InvalidProof {
            question: 0,
            response: 1,
            kind: ProofKind::Consistency
        }
    );

    // A cell encrypting 2: the honest consistency proof verifies, any 0/1
    // proof the prover code can produce does not.
    let mut ballot = build_ballot(&params, &spec, &voter, &[vec![1]], &mut rng).unwrap();
    let forged = fixed_cell(&params, &spec, &voter, (2, 5, 6), &mut rng);
    ballot.cells[0][0].ciphertext = forged.ciphertext;
    let err = validate_and_post(&params, &spec, &mut board, &mut store, &ballot, &Sequential).unwrap_err();
    assert!(matches!(err, ElectionError::InvalidProof { kind: ProofKind::Binary, .. }), "{err:?}");

    let ballot = build_ballot(&params, &spec, &voter, &[vec![1]], &mut rng).unwrap();
    let mut stranger = ballot.clone();
    stranger.voter = "mallory".into();
    assert!(matches!(
        validate_and_post(&params, &spec, &mut board, &mut store, &stranger, &Sequential),
        Err(ElectionError::UnknownVoter(_))
    ));
    assert!(board.entries.is_empty() && store.ballots.is_empty());
    assert!(build_ballot(&params, &spec, &voter, &[vec![0, 1]], &mut rng).is_err());
}

#[test]
fn board_holds_only_hiding_data() {
    // The board of votes (1, 0) and of votes (0, 1) have the same multiset of
    // commitment pairs over all randomness.
    let params = GroupParams::<Toy>::setup(&11, b"T11").unwrap();
    let boards = |votes: [u64; 2]| {
        let mut multiset = BTreeMap::new();
        for r0 in 0..11 {
            for r1 in 0..11 {
                let d = |v, r| ppats::commitment::commit(&params, &params.scalar(v), &params.scalar(r)).0.log();
                *multiset.entry((d(votes[0], r0), d(votes[1], r1))).or_insert(0) += 1;
            }
        }
        multiset
    };
    assert_eq!(boards([1, 0]), boards([0, 1]));
}
