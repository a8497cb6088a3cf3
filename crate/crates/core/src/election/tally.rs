use alloc::vec::Vec;

use rand_core::{CryptoRng, RngCore};

use super::{ballot::check_cell, board_digest, Board, CiphertextStore, ElectionError, ElectionSpec, SpecLabels};
use crate::{
    challenge::ProofLabel,
    commitment::{Commitment, Opening},
    dlog::DlogTable,
    encryption::{aggregate, decryption_target, opening_from_shared, Ciphertext},
    exec::Executor,
    group::{Backend, G1Elem, GroupParams},
    threshold::{self, verify_share, KeyShare, PartialDecryption},
};

/// Published outcome for one response.
pub struct ResponseTally<B: Backend> {
    /// Product of the counted board commitments.
    pub commitment: Commitment<B>,
    pub result: u64,
    /// `a = C2 / C1^x` for the aggregated ciphertext.
    pub opening: Opening<B>,
    /// Aggregated `C1`, the base of the partial decryptions.
    pub c1: G1Elem<B>,
    pub partials: Vec<PartialDecryption<B>>,
}

backend_struct_impls!(ResponseTally {
    commitment,
    result,
    opening,
    c1,
    partials
});

/// A counted ballot dropped because one of its rows breaks the selection
/// rule. The opening of the row's commitment product proves the row sum.
pub struct Exclusion<B: Backend> {
    pub position: u64,
    pub question: u32,
    pub selected: u64,
    pub opening: Opening<B>,
}

backend_struct_impls!(Exclusion {
    position,
    question,
    selected,
    opening
});

pub struct TallyRecord<B: Backend> {
    /// Digest of the board the trustees tallied.
    pub board_digest: [u8; 32],
    /// Number of ballots in the result.
    pub counted: u64,
    pub exclusions: Vec<Exclusion<B>>,
    /// `responses[question][response]`.
    pub responses: Vec<Vec<ResponseTally<B>>>,
}

backend_struct_impls!(TallyRecord {
    board_digest,
    counted,
    exclusions,
    responses
});

pub(super) fn response_label(labels: &SpecLabels, question: usize, response: usize) -> ProofLabel {
    labels
        .decryption()
        .clone()
        .with_context(b"tally")
        .with_context(&(question as u32).to_be_bytes())
        .with_context(&(response as u32).to_be_bytes())
}

fn row_label(labels: &SpecLabels, position: usize, question: usize) -> ProofLabel {
    labels
        .decryption()
        .clone()
        .with_context(b"row")
        .with_context(&(position as u64).to_be_bytes())
        .with_context(&(question as u32).to_be_bytes())
}

/// `C1^x` from every available share, with the verified partials.
fn shared_power<B: Backend, R: RngCore + CryptoRng + ?Sized>(
    params: &GroupParams<B>,
    spec: &ElectionSpec<B>,
    shares: &[KeyShare<B>],
    c1: &G1Elem<B>,
    label: &ProofLabel,
    rng: &mut R,
) -> Result<(G1Elem<B>, Vec<PartialDecryption<B>>), ElectionError> {
    let partials: Vec<_> = shares
        .iter()
        .map(|share| threshold::partial_decrypt(params, share, c1, label, rng))
        .collect();
    let k = threshold::combine(params, &spec.sharing, c1, &partials, label)?;
    Ok((k, partials))
}

/// Opening and value of an aggregated ciphertext, decrypted with shares.
fn open_aggregate<B: Backend, R: RngCore + CryptoRng + ?Sized>(
    params: &GroupParams<B>,
    spec: &ElectionSpec<B>,
    shares: &[KeyShare<B>],
    ciphertext: &Ciphertext<B>,
    table: &DlogTable<B::Gt>,
    bound: u64,
    label: &ProofLabel,
    rng: &mut R,
) -> Result<(Opening<B>, u64, Vec<PartialDecryption<B>>), ElectionError> {
    let (k, partials) = shared_power(params, spec, shares, &ciphertext.c1, label, rng)?;
    let opening = opening_from_shared(ciphertext, &k);
    let target = decryption_target(params, &ciphertext.d, &opening);
    let value = table.extract(params.backend().gt(), &target, bound)?;
    Ok((opening, value, partials))
}

/// Re-verifies the counted ballots, drops those breaking a selection rule,
/// and decrypts the per-response products. `shares` are consumed and
/// zeroized on return.
pub fn tally<B: Backend, R: RngCore + CryptoRng + ?Sized, E: Executor>(
    params: &GroupParams<B>,
    spec: &ElectionSpec<B>,
    board: &Board<B>,
    store: &CiphertextStore<B>,
    shares: Vec<KeyShare<B>>,
    rng: &mut R,
    exec: &E,
) -> Result<TallyRecord<B>, ElectionError> {
    tally_with_table(params, spec, board, store, shares, None, rng, exec)
}

/// [`tally`] with a prebuilt baby-step table for `e(g1, h2)`, e.g. loaded
/// from a cache. A table for another base is ignored.
#[allow(clippy::too_many_arguments)]
pub fn tally_with_table<B: Backend, R: RngCore + CryptoRng + ?Sized, E: Executor>(
    params: &GroupParams<B>,
    spec: &ElectionSpec<B>,
    board: &Board<B>,
    store: &CiphertextStore<B>,
    shares: Vec<KeyShare<B>>,
    table: Option<&DlogTable<B::Gt>>,
    rng: &mut R,
    exec: &E,
) -> Result<TallyRecord<B>, ElectionError> {
    spec.validate(params)?;
    if store.ballots.len() != board.entries.len() {
        return Err(ElectionError::StoreMismatch {
            position: store.ballots.len().min(board.entries.len()),
        });
    }
    for (position, (stored, entry)) in store.ballots.iter().zip(&board.entries).enumerate() {
        let aligned = stored.voter == entry.voter
            && spec.matches_shape(&stored.cells)
            && spec.matches_shape(&entry.cells)
            && stored
                .cells
                .iter()
                .flatten()
                .zip(entry.cells.iter().flatten())
                .all(|(ct, cell)| ct.d == cell.commitment);
        if !aligned {
            return Err(ElectionError::StoreMismatch { position });
        }
    }
    for share in &shares {
        if !verify_share(params, share, &spec.sharing) {
            return Err(ElectionError::InvalidShare { index: share.index });
        }
    }

    let counted = board.counted_positions();
    let pk = spec.public_key();
    let labels = spec.labels(params);
    let cells: Vec<(usize, usize, usize)> = counted
        .iter()
        .flat_map(|&p| {
            spec.questions
                .iter()
                .enumerate()
                .flat_map(move |(q, question)| (0..question.responses as usize).map(move |r| (p, q, r)))
        })
        .collect();
    let failures = exec.map(&cells, |&(p, q, r)| {
        let entry = &board.entries[p];
        let ciphertext = &store.ballots[p].cells[q][r];
        check_cell(params, &labels, &pk, &entry.voter, (q, r), ciphertext, &entry.cells[q][r].validity)
    });
    if let Some((&(position, question, response), kind)) =
        cells.iter().zip(failures).find_map(|(c, kind)| kind.map(|k| (c, k)))
    {
        return Err(ElectionError::Reverification {
            position,
            question,
            response,
            kind,
        });
    }

    let max_responses = spec.questions.iter().map(|q| u64::from(q.responses)).max().unwrap_or(1);
    let row_table = DlogTable::for_bound(params.backend().gt(), params.gt_h2(), max_responses);
    let mut exclusions = Vec::new();
    for &position in &counted {
        for (question, q) in spec.questions.iter().enumerate() {
            if !q.rule.needs_row_check(q.responses) {
                continue;
            }
            let row = aggregate(params, &store.ballots[position].cells[question]);
            let label = row_label(&labels, position, question);
            let (opening, selected, _) = open_aggregate(
                params,
                spec,
                &shares,
                &row,
                &row_table,
                u64::from(q.responses),
                &label,
                rng,
            )?;
            if !q.rule.allows(selected) {
                exclusions.push(Exclusion {
                    position: position as u64,
                    question: question as u32,
                    selected,
                    opening,
                });
                break;
            }
        }
    }

    let included: Vec<usize> = counted
        .into_iter()
        .filter(|&p| !exclusions.iter().any(|x| x.position == p as u64))
        .collect();
    let bound = included.len() as u64;
    let fresh;
    let table = match table {
        Some(table) if *table.base() == params.gt_h2() => table,
        _ => {
            fresh = DlogTable::for_bound(params.backend().gt(), params.gt_h2(), bound.max(1));
            &fresh
        }
    };
    let mut responses = Vec::with_capacity(spec.questions.len());
    for (question, q) in spec.questions.iter().enumerate() {
        let mut row = Vec::with_capacity(q.responses as usize);
        for response in 0..q.responses as usize {
            let product = aggregate(
                params,
                included.iter().map(|&p| &store.ballots[p].cells[question][response]),
            );
            let label = response_label(&labels, question, response);
            let (opening, result, partials) =
                open_aggregate(params, spec, &shares, &product, table, bound.max(1), &label, rng)?;
            row.push(ResponseTally {
                commitment: product.d,
                result,
                opening,
                c1: product.c1,
                partials,
            });
        }
        responses.push(row);
    }
    drop(shares);

    Ok(TallyRecord {
        board_digest: board_digest(params, &board.entries),
        counted: bound,
        exclusions,
        responses,
    })
}
