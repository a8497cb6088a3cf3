//! Dealer-based `t`-of-`n` sharing of the decryption key with Feldman
//! commitments, and distributed computation of `c1^x`.
//!
//! The dealer samples `f(z) = x + a1 z + ... + a_{t-1} z^{t-1}`, hands share
//! `f(i)` to trustee `i` and publishes `A_j = g1^{a_j}`. Trustee `i` answers a
//! request for `c1` with `m_i = c1^{f(i)}` plus a DLEQ proof against
//! `g1^{f(i)} = ∏ A_j^{i^j}`. Any `t` valid answers combine to `c1^x` by
//! Lagrange interpolation at 0 over the responding indices.

use alloc::vec::Vec;
use core::fmt;

use rand_core::{CryptoRng, RngCore};
use zeroize::Zeroize;

use crate::{
    challenge::{purpose, ProofLabel},
    encryption::PublicKey,
    group::{Backend, G1Elem, Group, GroupParams, Scalar},
    proofs::dleq::{self, DleqProof, DleqStatement},
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum ThresholdError {
    #[error("invalid sharing parameters: threshold {threshold}, trustees {trustees}")]
    InvalidParameters { threshold: u32, trustees: u32 },
    #[error("partial decryption from trustee {index} does not verify")]
    InvalidPartial { index: u32 },
    #[error("trustee index {index} is not part of the sharing")]
    UnknownIndex { index: u32 },
    #[error("trustee {index} answered twice")]
    DuplicateIndex { index: u32 },
    #[error("{got} valid partial decryptions, {needed} needed")]
    Insufficient { needed: u32, got: u32 },
}

/// Trustee `index`'s share `f(index)` and its public image `g1^f(index)`.
pub struct KeyShare<B: Backend> {
    pub index: u32,
    secret: B::Scalar,
    pub public: G1Elem<B>,
}

impl<B: Backend> KeyShare<B> {
    pub fn new(params: &GroupParams<B>, index: u32, secret: B::Scalar) -> Self {
        Self {
            index,
            public: params.g1_pow(&secret),
            secret,
        }
    }

    pub fn expose_secret(&self) -> &B::Scalar {
        &self.secret
    }
}

impl<B: Backend> Clone for KeyShare<B> {
    fn clone(&self) -> Self {
        Self {
            index: self.index,
            secret: self.secret,
            public: self.public,
        }
    }
}

impl<B: Backend> Drop for KeyShare<B> {
    fn drop(&mut self) {
        self.secret.zeroize();
    }
}

impl<B: Backend> fmt::Debug for KeyShare<B> {
    fn fmt(&self, formatter: &mut fmt::Formatter<'_>) -> fmt::Result {
        formatter
            .debug_struct("KeyShare")
            .field("index", &self.index)
            .field("public", &self.public)
            .finish_non_exhaustive()
    }
}

/// Public output of the dealer.
pub struct SharingTranscript<B: Backend> {
    pub threshold: u32,
    pub trustees: u32,
    /// `A_0 .. A_{t-1}`; `A_0` is the election public key.
    pub commitments: Vec<G1Elem<B>>,
}

impl<B: Backend> SharingTranscript<B> {
    pub fn public_key(&self) -> PublicKey<B> {
        PublicKey::from_elem(self.commitments[0])
    }

    /// `g1^f(index) = ∏ A_j^{index^j}`.
    pub fn share_public_key(&self, params: &GroupParams<B>, index: u32) -> G1Elem<B> {
        let i = params.scalar(u64::from(index));
        let mut powers = Vec::with_capacity(self.commitments.len());
        let mut power = params.scalar(1);
        for _ in &self.commitments {
            powers.push(power);
            power = power * i;
        }
        params
            .backend()
            .g1()
            .multiexp(&self.commitments, &powers)
            .expect("one power per commitment")
    }

    /// Structural checks: `1 <= t <= n` and `t` commitments.
    pub fn is_well_formed(&self, params: &GroupParams<B>) -> bool {
        check_parameters(params, self.threshold, self.trustees).is_ok()
            && self.commitments.len() == self.threshold as usize
    }
}

impl<B: Backend> Clone for SharingTranscript<B> {
    fn clone(&self) -> Self {
        Self {
            threshold: self.threshold,
            trustees: self.trustees,
            commitments: self.commitments.clone(),
        }
    }
}

impl<B: Backend> PartialEq for SharingTranscript<B> {
    fn eq(&self, other: &Self) -> bool {
        self.threshold == other.threshold
            && self.trustees == other.trustees
            && self.commitments == other.commitments
    }
}

impl<B: Backend> fmt::Debug for SharingTranscript<B> {
    fn fmt(&self, formatter: &mut fmt::Formatter<'_>) -> fmt::Result {
        formatter
            .debug_struct("SharingTranscript")
            .field("threshold", &self.threshold)
            .field("trustees", &self.trustees)
            .field("commitments", &self.commitments)
            .finish()
    }
}

fn check_parameters<B: Backend>(
    params: &GroupParams<B>,
    threshold: u32,
    trustees: u32,
) -> Result<(), ThresholdError> {
    let invalid = ThresholdError::InvalidParameters { threshold, trustees };
    if threshold == 0 || threshold > trustees {
        return Err(invalid);
    }
    // Indices 1..=n must be distinct and nonzero mod q.
    if (1..=trustees).any(|i| params.scalar(u64::from(i)).is_zero()) {
        return Err(invalid);
    }
    Ok(())
}

/// Shares `x` among `trustees` with reconstruction threshold `threshold`.
pub fn deal<B: Backend, R: RngCore + CryptoRng + ?Sized>(
    params: &GroupParams<B>,
    x: &B::Scalar,
    threshold: u32,
    trustees: u32,
    rng: &mut R,
) -> Result<(Vec<KeyShare<B>>, SharingTranscript<B>), ThresholdError> {
    check_parameters(params, threshold, trustees)?;
    let mut coefficients = Vec::with_capacity(threshold as usize);
    coefficients.push(*x);
    for _ in 1..threshold {
        coefficients.push(params.random_scalar(rng));
    }
    let dealt = deal_with_coefficients(params, &coefficients, trustees);
    coefficients.iter_mut().for_each(Zeroize::zeroize);
    dealt
}

/// Deals with explicit coefficients `a_0 = x, a_1, ..., a_{t-1}`.
pub fn deal_with_coefficients<B: Backend>(
    params: &GroupParams<B>,
    coefficients: &[B::Scalar],
    trustees: u32,
) -> Result<(Vec<KeyShare<B>>, SharingTranscript<B>), ThresholdError> {
    let threshold = u32::try_from(coefficients.len()).unwrap_or(u32::MAX);
    check_parameters(params, threshold, trustees)?;
    let shares = (1..=trustees)
        .map(|index| {
            let i = params.scalar(u64::from(index));
            // Horner evaluation of f(i).
            let secret = coefficients
                .iter()
                .rev()
                .fold(params.scalar(0), |acc, a| acc * i + *a);
            KeyShare::new(params, index, secret)
        })
        .collect();
    let transcript = SharingTranscript {
        threshold,
        trustees,
        commitments: coefficients.iter().map(|a| params.g1_pow(a)).collect(),
    };
    Ok((shares, transcript))
}

/// Feldman check of a share against the dealer's commitments.
pub fn verify_share<B: Backend>(
    params: &GroupParams<B>,
    share: &KeyShare<B>,
    transcript: &SharingTranscript<B>,
) -> bool {
    share.index >= 1
        && share.index <= transcript.trustees
        && params.g1_pow(&share.secret) == share.public
        && transcript.share_public_key(params, share.index) == share.public
}

/// `m_i = c1^{s_i}` from trustee `index`.
pub struct PartialDecryption<B: Backend> {
    pub index: u32,
    pub value: G1Elem<B>,
    pub proof: DleqProof<B>,
}

impl<B: Backend> Clone for PartialDecryption<B> {
    fn clone(&self) -> Self {
        Self {
            index: self.index,
            value: self.value,
            proof: self.proof,
        }
    }
}

impl<B: Backend> PartialEq for PartialDecryption<B> {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index && self.value == other.value && self.proof == other.proof
    }
}

impl<B: Backend> fmt::Debug for PartialDecryption<B> {
    fn fmt(&self, formatter: &mut fmt::Formatter<'_>) -> fmt::Result {
        formatter
            .debug_struct("PartialDecryption")
            .field("index", &self.index)
            .field("value", &self.value)
            .field("proof", &self.proof)
            .finish()
    }
}

/// The label for trustee `index`'s proof: the caller's label with the
/// decryption-share purpose and the index appended to its context.
pub fn partial_label(label: &ProofLabel, index: u32) -> ProofLabel {
    label
        .clone()
        .with_purpose(purpose::DECRYPTION_SHARE)
        .with_context(&index.to_be_bytes())
}

pub fn partial_decrypt<B: Backend, R: RngCore + CryptoRng + ?Sized>(
    params: &GroupParams<B>,
    share: &KeyShare<B>,
    c1: &G1Elem<B>,
    label: &ProofLabel,
    rng: &mut R,
) -> PartialDecryption<B> {
    let value = params.exp_g1(c1, &share.secret);
    let statement = DleqStatement {
        base1: params.g1(),
        y1: share.public,
        base2: *c1,
        y2: value,
    };
    let proof = dleq::prove(params, &statement, &share.secret, &partial_label(label, share.index), rng);
    PartialDecryption {
        index: share.index,
        value,
        proof,
    }
}

pub fn verify_partial<B: Backend>(
    params: &GroupParams<B>,
    transcript: &SharingTranscript<B>,
    c1: &G1Elem<B>,
    partial: &PartialDecryption<B>,
    label: &ProofLabel,
) -> bool {
    if partial.index == 0 || partial.index > transcript.trustees {
        return false;
    }
    let statement = DleqStatement {
        base1: params.g1(),
        y1: transcript.share_public_key(params, partial.index),
        base2: *c1,
        y2: partial.value,
    };
    dleq::verify(params, &statement, &partial.proof, &partial_label(label, partial.index))
}

/// Lagrange coefficients at 0 for the given distinct, nonzero indices.
pub fn lagrange_coefficients<B: Backend>(params: &GroupParams<B>, indices: &[u32]) -> Vec<B::Scalar> {
    indices
        .iter()
        .map(|&i| {
            let xi = params.scalar(u64::from(i));
            let (num, den) = indices
                .iter()
                .filter(|&&j| j != i)
                .fold((params.scalar(1), params.scalar(1)), |(num, den), &j| {
                    let xj = params.scalar(u64::from(j));
                    (num * xj, den * (xj - xi))
                });
            num * den.inverse().expect("indices are distinct mod q")
        })
        .collect()
}

/// Verifies every partial and interpolates `c1^x`. Fails on the first
/// unknown, duplicate or invalid partial, naming its index.
pub fn combine<B: Backend>(
    params: &GroupParams<B>,
    transcript: &SharingTranscript<B>,
    c1: &G1Elem<B>,
    partials: &[PartialDecryption<B>],
    label: &ProofLabel,
) -> Result<G1Elem<B>, ThresholdError> {
    let mut seen = Vec::with_capacity(partials.len());
    for partial in partials {
        if partial.index == 0 || partial.index > transcript.trustees {
            return Err(ThresholdError::UnknownIndex { index: partial.index });
        }
        if seen.contains(&partial.index) {
            return Err(ThresholdError::DuplicateIndex { index: partial.index });
        }
        if !verify_partial(params, transcript, c1, partial, label) {
            return Err(ThresholdError::InvalidPartial { index: partial.index });
        }
        seen.push(partial.index);
    }
    if seen.len() < transcript.threshold as usize {
        return Err(ThresholdError::Insufficient {
            needed: transcript.threshold,
            got: seen.len() as u32,
        });
    }
    let values: Vec<_> = partials.iter().map(|p| (p.index, p.value)).collect();
    Ok(interpolate(params, &values))
}

/// Interpolation in the exponent without any checks.
pub fn interpolate<B: Backend>(params: &GroupParams<B>, values: &[(u32, G1Elem<B>)]) -> G1Elem<B> {
    let indices: Vec<u32> = values.iter().map(|(i, _)| *i).collect();
    let bases: Vec<_> = values.iter().map(|(_, v)| *v).collect();
    let lambdas = lagrange_coefficients(params, &indices);
    params
        .backend()
        .g1()
        .multiexp(&bases, &lambdas)
        .expect("one coefficient per value")
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::vec;

    use super::*;
    use crate::group::Toy;

    fn fixture() -> (GroupParams<Toy>, Vec<KeyShare<Toy>>, SharingTranscript<Toy>) {
        let params = GroupParams::setup(&11, b"T11").unwrap();
        let (shares, transcript) =
            deal_with_coefficients(&params, &[params.scalar(3), params.scalar(4)], 3).unwrap();
        (params, shares, transcript)
    }

    #[test]
    fn toy_shares() {
        let (params, shares, transcript) = fixture();
        let values: Vec<u64> = shares.iter().map(|s| s.secret.value()).collect();
        assert_eq!(values, vec![7, 0, 4]);
        let logs: Vec<u64> = transcript.commitments.iter().map(|a| a.log()).collect();
        assert_eq!(logs, vec![3, 4]);
        assert!(shares.iter().all(|s| verify_share(&params, s, &transcript)));

        let bad = KeyShare::new(&params, 1, params.scalar(8));
        assert!(!verify_share(&params, &bad, &transcript));
    }

    #[test]
    fn constant_polynomial() {
        let params = GroupParams::<Toy>::setup(&11, b"T11").unwrap();
        let (shares, transcript) = deal_with_coefficients(&params, &[params.scalar(3)], 4).unwrap();
        assert!(shares.iter().all(|s| s.secret.value() == 3));
        assert!(shares.iter().all(|s| verify_share(&params, s, &transcript)));
    }

    #[test]
    fn rejects_bad_parameters() {
        let params = GroupParams::<Toy>::setup(&11, b"T11").unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let x = params.scalar(3);
        for (t, n) in [(0, 3), (4, 3), (2, 11), (2, 12)] {
            assert_eq!(
                deal(&params, &x, t, n, &mut rng).unwrap_err(),
                ThresholdError::InvalidParameters { threshold: t, trustees: n }
            );
        }
        assert!(deal(&params, &x, 2, 10, &mut rng).is_ok());
    }

    #[test]
    fn toy_partials_and_combination() {
        let (params, shares, transcript) = fixture();
        let label = ProofLabel::new(&params, b"e", b"tally");
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let c1 = params.backend().g1().elem(4);
        let partials: Vec<_> = shares
            .iter()
            .map(|s| partial_decrypt(&params, s, &c1, &label, &mut rng))
            .collect();
        assert_eq!(partials[0].value.log(), 6);
        assert_eq!(partials[1].value.log(), 0);
        let lambdas: Vec<u64> = lagrange_coefficients(&params, &[1, 2]).iter().map(|l| l.value()).collect();
        assert_eq!(lambdas, vec![2, 10]);

        let k12 = combine(&params, &transcript, &c1, &partials[..2], &label).unwrap();
        let k13 = combine(&params, &transcript, &c1, &[partials[0].clone(), partials[2].clone()], &label).unwrap();
        let all = combine(&params, &transcript, &c1, &partials, &label).unwrap();
        assert_eq!(k12.log(), 1);
        assert_eq!(k12, k13);
        assert_eq!(k12, all);
    }

    #[test]
    fn combine_names_offenders() {
        let (params, shares, transcript) = fixture();
        let label = ProofLabel::new(&params, b"e", b"tally");
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let c1 = params.backend().g1().elem(4);
        let mut partials: Vec<_> = shares
            .iter()
            .map(|s| partial_decrypt(&params, s, &c1, &label, &mut rng))
            .collect();

        assert_eq!(
            combine(&params, &transcript, &c1, &partials[..1], &label).unwrap_err(),
            ThresholdError::Insufficient { needed: 2, got: 1 }
        );
        let dup = [partials[0].clone(), partials[0].clone()];
        assert_eq!(
            combine(&params, &transcript, &c1, &dup, &label).unwrap_err(),
            ThresholdError::DuplicateIndex { index: 1 }
        );
        partials[1].value = params.backend().g1().elem(5);
        assert_eq!(
            combine(&params, &transcript, &c1, &partials, &label).unwrap_err(),
            ThresholdError::InvalidPartial { index: 2 }
        );
    }
}
