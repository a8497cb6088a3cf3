use alloc::{format, string::String, vec, vec::Vec};

use super::{board_digest, tally::response_label, Board, SpecLabels, Transcript};
use crate::{
    commitment::{combine, verify_opening, Commitment},
    exec::Executor,
    group::{Backend, GroupParams},
    proofs::binary,
    threshold::verify_partial,
};

/// One named check and the locations where it failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub failures: Vec<String>,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            failures: Vec::new(),
        }
    }

    fn fail(&mut self, location: String) {
        self.failures.push(location);
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

/// How far [`verify_transcript_with`] goes once a check fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// Run every check and collect every failure.
    Full,
    /// Return after the first failing check. Cheap checks run first, so
    /// most corrupted transcripts never reach the 0/1 proofs.
    FirstFailure,
}

/// Replays every public check on `transcript`:
///
/// - `parameters`: the election was set up for `params`, is well formed;
/// - `election-key`: the public key is `A_0` of the sharing;
/// - `board-entries`: voters are on the roll and entries have the right shape;
/// - `tally-present`, `board-digest`: the tally refers to this board;
/// - `exclusions`: each excluded ballot provably breaks its selection rule;
/// - `commitment-aggregation`: published products equal the board products;
/// - `opening`: each result opens the recomputed product;
/// - `partial-decryptions`: each trustee's DLEQ proof, at least `t` per response;
/// - `ballot-validity`: every 0/1 proof on the board.
pub fn verify_transcript<B: Backend, E: Executor>(
    params: &GroupParams<B>,
    transcript: &Transcript<B>,
    exec: &E,
) -> Report {
    verify_transcript_with(params, transcript, exec, VerifyMode::Full)
}

pub fn verify_transcript_with<B: Backend, E: Executor>(
    params: &GroupParams<B>,
    transcript: &Transcript<B>,
    exec: &E,
    mode: VerifyMode,
) -> Report {
    let Transcript { spec, board, tally } = transcript;
    let mut report = Report { checks: Vec::new() };
    // Pushes finished checks; true when the caller should return.
    let finish = |report: &mut Report, done: Vec<Check>| {
        report.checks.extend(done);
        mode == VerifyMode::FirstFailure && !report.all_passed()
    };

    let mut parameters = Check::new("parameters");
    let mut election_key = Check::new("election-key");
    match spec.validate(params) {
        Ok(()) => {}
        Err(super::SpecError::KeyMismatch) => election_key.fail("public key differs from A_0".into()),
        Err(err) => parameters.fail(format!("{err}")),
    }
    // Later checks index by spec shape; stop here if it cannot be trusted.
    let spec_usable = parameters.passed();
    let labels = spec.labels(params);
    if finish(&mut report, vec![parameters, election_key]) {
        return report;
    }

    let mut entries = Check::new("board-entries");
    let mut shaped = vec![false; board.entries.len()];
    for (position, entry) in board.entries.iter().enumerate() {
        if !spec.is_voter(&entry.voter) {
            entries.fail(format!("entry {position}: voter {:?} not on the roll", entry.voter));
        }
        if spec_usable && spec.matches_shape(&entry.cells) {
            shaped[position] = true;
        } else {
            entries.fail(format!("entry {position}: cell grid does not match the questions"));
        }
    }
    if finish(&mut report, vec![entries]) {
        return report;
    }

    let mut present = Check::new("tally-present");
    let Some(tally) = tally else {
        present.fail("no tally record".into());
        if !finish(&mut report, vec![present]) {
            report.checks.push(ballot_validity(params, board, &shaped, &labels, exec, mode));
        }
        return report;
    };
    if finish(&mut report, vec![present]) {
        return report;
    }

    let mut digest = Check::new("board-digest");
    if tally.board_digest != board_digest(params, &board.entries) {
        digest.fail("tally was computed over a different board".into());
    }
    if finish(&mut report, vec![digest]) {
        return report;
    }

    let counted = board.counted_positions();
    let mut exclusions = Check::new("exclusions");
    for (i, exclusion) in tally.exclusions.iter().enumerate() {
        let position = exclusion.position as usize;
        let question = exclusion.question as usize;
        let location = format!("exclusion {i} (entry {position}, question {question})");
        if !counted.contains(&position) || !shaped[position] || question >= spec.questions.len() {
            exclusions.fail(format!("{location}: no such counted row"));
            continue;
        }
        if tally.exclusions[..i].iter().any(|x| x.position == exclusion.position) {
            exclusions.fail(format!("{location}: entry excluded twice"));
        }
        if spec.questions[question].rule.allows(exclusion.selected) {
            exclusions.fail(format!("{location}: {} selections are allowed", exclusion.selected));
        }
        let row = combine(board.entries[position].cells[question].iter().map(|c| &c.commitment))
            .expect("questions have responses");
        if !verify_opening(params, &row, &exclusion.opening, &params.scalar(exclusion.selected)) {
            exclusions.fail(format!("{location}: opening does not match the row"));
        }
    }
    let included: Vec<usize> = counted
        .into_iter()
        .filter(|&p| shaped[p] && !tally.exclusions.iter().any(|x| x.position == p as u64))
        .collect();

    let mut aggregation = Check::new("commitment-aggregation");
    let mut opening = Check::new("opening");
    let mut partials = Check::new("partial-decryptions");
    if tally.counted != included.len() as u64 {
        aggregation.fail(format!(
            "{} ballots claimed, {} on the board",
            tally.counted,
            included.len()
        ));
    }
    if !spec_usable || !spec.matches_shape(&tally.responses) {
        aggregation.fail("tally does not have one record per response".into());
        if !finish(&mut report, vec![exclusions, aggregation, opening, partials]) {
            report.checks.push(ballot_validity(params, board, &shaped, &labels, exec, mode));
        }
        return report;
    }

    let responses: Vec<(usize, usize)> = spec
        .questions
        .iter()
        .enumerate()
        .flat_map(|(q, question)| (0..question.responses as usize).map(move |r| (q, r)))
        .collect();
    let outcomes = exec.map(&responses, |&(q, r)| {
        let record = &tally.responses[q][r];
        let product = included
            .iter()
            .fold(Commitment::identity(params), |acc, &p| {
                Commitment(acc.0 * board.entries[p].cells[q][r].commitment.0)
            });
        let aggregated = product == record.commitment;
        let opens = verify_opening(params, &product, &record.opening, &params.scalar(record.result));
        let label = response_label(&labels, q, r);
        let mut bad_partials = Vec::new();
        for (i, partial) in record.partials.iter().enumerate() {
            let duplicate = record.partials[..i].iter().any(|p| p.index == partial.index);
            if duplicate || !verify_partial(params, &spec.sharing, &record.c1, partial, &label) {
                bad_partials.push(partial.index);
            }
        }
        (aggregated, opens, bad_partials)
    });
    for (&(q, r), (aggregated, opens, bad_partials)) in responses.iter().zip(outcomes) {
        let record = &tally.responses[q][r];
        if !aggregated {
            aggregation.fail(format!("question {q} response {r}: published commitment differs from the board product"));
        }
        if !opens {
            opening.fail(format!("question {q} response {r}: opening does not prove result {}", record.result));
        }
        for index in &bad_partials {
            partials.fail(format!("question {q} response {r}: partial decryption of trustee {index} rejected"));
        }
        let valid = record.partials.len() - bad_partials.len();
        if valid < spec.sharing.threshold as usize {
            partials.fail(format!(
                "question {q} response {r}: {valid} valid partial decryptions, {} needed",
                spec.sharing.threshold
            ));
        }
    }
    if !finish(&mut report, vec![exclusions, aggregation, opening, partials]) {
        report.checks.push(ballot_validity(params, board, &shaped, &labels, exec, mode));
    }
    report
}

/// Checks the 0/1 proof of every well-shaped entry. In first-failure mode
/// cells go through `exec` in batches and the scan ends after a bad batch.
fn ballot_validity<B: Backend, E: Executor>(
    params: &GroupParams<B>,
    board: &Board<B>,
    shaped: &[bool],
    labels: &SpecLabels,
    exec: &E,
    mode: VerifyMode,
) -> Check {
    let mut validity = Check::new("ballot-validity");
    let cells: Vec<(usize, usize, usize)> = board
        .entries
        .iter()
        .enumerate()
        .filter(|(p, _)| shaped[*p])
        .flat_map(|(p, entry)| {
            entry
                .cells
                .iter()
                .enumerate()
                .flat_map(move |(q, row)| (0..row.len()).map(move |r| (p, q, r)))
        })
        .collect();
    let batch = match mode {
        VerifyMode::Full => cells.len().max(1),
        VerifyMode::FirstFailure => 64,
    };
    for chunk in cells.chunks(batch) {
        let outcomes = exec.map(chunk, |&(p, q, r)| {
            let entry = &board.entries[p];
            let cell = &entry.cells[q][r];
            let label = labels.binary(&entry.voter, q, r);
            binary::verify(params, &cell.commitment, &cell.validity, &label)
        });
        for (&(p, q, r), ok) in chunk.iter().zip(outcomes) {
            if !ok {
                validity.fail(format!("entry {p} question {q} response {r}: 0/1 proof rejected"));
            }
        }
        if mode == VerifyMode::FirstFailure && !validity.passed() {
            break;
        }
    }
    validity
}
