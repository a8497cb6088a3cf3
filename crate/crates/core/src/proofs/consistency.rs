//! Consistency proof `σcc = (e, f_r, f_s, f_v)` for a PPATS ciphertext.
//!
//! The prover announces `c' = (g1^s', g1^r' g2^s', h1^r' h2^v')`, derives
//! `e = H(c, c', label)` and answers `f_r = r' + e r`, `f_s = s' + e s`,
//! `f_v = v' + e v`. The verifier rebuilds `c'` from the responses as
//! `(g1^f_s / c1^e, g1^f_r g2^f_s / c2^e, h1^f_r h2^f_v / d^e)` and
//! recomputes the hash. The public key is appended to the label as an extra
//! generator.

use alloc::vec::Vec;

use rand_core::{CryptoRng, RngCore};
use zeroize::Zeroize;

use super::{scalar_struct_impls, Challenge};
use crate::{
    challenge::{fiat_shamir_challenge, ProofLabel},
    encryption::{Ciphertext, PublicKey, Randomness},
    group::{Backend, G1Elem, G2Elem, Group, GroupParams},
};

pub struct ConsistencyProof<B: Backend> {
    pub e: B::Scalar,
    pub f_r: B::Scalar,
    pub f_s: B::Scalar,
    pub f_v: B::Scalar,
}

scalar_struct_impls!(ConsistencyProof { e, f_r, f_s, f_v });

/// Prover coins `(r', s', v')`.
pub struct ConsistencyCoins<B: Backend> {
    pub r: B::Scalar,
    pub s: B::Scalar,
    pub v: B::Scalar,
}

impl<B: Backend> ConsistencyCoins<B> {
    pub fn random<R: RngCore + CryptoRng + ?Sized>(params: &GroupParams<B>, rng: &mut R) -> Self {
        Self {
            r: params.random_scalar(rng),
            s: params.random_scalar(rng),
            v: params.random_scalar(rng),
        }
    }
}

impl<B: Backend> Drop for ConsistencyCoins<B> {
    fn drop(&mut self) {
        self.r.zeroize();
        self.s.zeroize();
        self.v.zeroize();
    }
}

/// Announcement `c' = (c1', c2', d')`.
pub struct Announcement<B: Backend> {
    pub c1: G1Elem<B>,
    pub c2: G1Elem<B>,
    pub d: G2Elem<B>,
}

impl<B: Backend> PartialEq for Announcement<B> {
    fn eq(&self, other: &Self) -> bool {
        self.c1 == other.c1 && self.c2 == other.c2 && self.d == other.d
    }
}

impl<B: Backend> core::fmt::Debug for Announcement<B> {
    fn fmt(&self, formatter: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        formatter
            .debug_struct("Announcement")
            .field("c1", &self.c1)
            .field("c2", &self.c2)
            .field("d", &self.d)
            .finish()
    }
}

fn full_label<B: Backend>(params: &GroupParams<B>, pk: &PublicKey<B>, label: &ProofLabel) -> ProofLabel {
    label
        .clone()
        .with_generator(params.backend().g1().encode(&pk.elem()))
}

fn challenge<B: Backend>(
    params: &GroupParams<B>,
    pk: &PublicKey<B>,
    ciphertext: &Ciphertext<B>,
    announcement: &Announcement<B>,
    label: &ProofLabel,
) -> B::Scalar {
    let g1 = params.backend().g1();
    let g2 = params.backend().g2();
    let parts: [Vec<u8>; 6] = [
        g1.encode(&ciphertext.c1),
        g1.encode(&ciphertext.c2),
        g2.encode(&ciphertext.d.0),
        g1.encode(&announcement.c1),
        g1.encode(&announcement.c2),
        g2.encode(&announcement.d),
    ];
    let parts: Vec<&[u8]> = parts.iter().map(Vec::as_slice).collect();
    fiat_shamir_challenge(params.backend(), &full_label(params, pk, label), &parts)
}

/// Proves that `ciphertext` encrypts `v` with `randomness`.
pub fn prove<B: Backend, R: RngCore + CryptoRng + ?Sized>(
    params: &GroupParams<B>,
    pk: &PublicKey<B>,
    ciphertext: &Ciphertext<B>,
    randomness: &Randomness<B>,
    v: &B::Scalar,
    label: &ProofLabel,
    rng: &mut R,
) -> ConsistencyProof<B> {
    let coins = ConsistencyCoins::random(params, rng);
    prove_with(params, pk, ciphertext, randomness, v, &coins, Challenge::FiatShamir(label)).0
}

/// Deterministic prover: explicit coins and challenge source.
pub fn prove_with<B: Backend>(
    params: &GroupParams<B>,
    pk: &PublicKey<B>,
    ciphertext: &Ciphertext<B>,
    randomness: &Randomness<B>,
    v: &B::Scalar,
    coins: &ConsistencyCoins<B>,
    challenge_source: Challenge<'_, B::Scalar>,
) -> (ConsistencyProof<B>, Announcement<B>) {
    let announcement = Announcement {
        c1: params.g1_pow(&coins.s),
        c2: params.g1_pow(&coins.r) * pk.pow(params, &coins.s),
        d: params.h1_pow(&coins.r) * params.h2_pow(&coins.v),
    };
    let e = match challenge_source {
        Challenge::FiatShamir(label) => challenge(params, pk, ciphertext, &announcement, label),
        Challenge::Injected(e) => e,
    };
    let proof = ConsistencyProof {
        e,
        f_r: coins.r + e * randomness.r,
        f_s: coins.s + e * randomness.s,
        f_v: coins.v + e * *v,
    };
    (proof, announcement)
}

/// Rebuilds the announcement implied by `proof` for `ciphertext`.
pub fn reconstruct<B: Backend>(
    params: &GroupParams<B>,
    pk: &PublicKey<B>,
    ciphertext: &Ciphertext<B>,
    proof: &ConsistencyProof<B>,
) -> Announcement<B> {
    let g1 = params.backend().g1();
    let g2 = params.backend().g2();
    Announcement {
        c1: params.g1_pow(&proof.f_s) / g1.exp(&ciphertext.c1, &proof.e),
        c2: params.g1_pow(&proof.f_r) * pk.pow(params, &proof.f_s) / g1.exp(&ciphertext.c2, &proof.e),
        d: params.h1_pow(&proof.f_r) * params.h2_pow(&proof.f_v) / g2.exp(&ciphertext.d.0, &proof.e),
    }
}

/// Checks `proof` against the triple `(c1, c2, d)` of `ciphertext`; any
/// proof attached to `ciphertext` itself is ignored.
pub fn verify<B: Backend>(
    params: &GroupParams<B>,
    pk: &PublicKey<B>,
    ciphertext: &Ciphertext<B>,
    proof: &ConsistencyProof<B>,
    label: &ProofLabel,
) -> bool {
    let announcement = reconstruct(params, pk, ciphertext, proof);
    challenge(params, pk, ciphertext, &announcement, label) == proof.e
}

/// Interactive-mode check against a known announcement.
pub fn verify_interactive<B: Backend>(
    params: &GroupParams<B>,
    pk: &PublicKey<B>,
    ciphertext: &Ciphertext<B>,
    proof: &ConsistencyProof<B>,
    announcement: &Announcement<B>,
) -> bool {
    reconstruct(params, pk, ciphertext, proof) == *announcement
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{
        encryption::encrypt_with,
        group::{Scalar, Toy},
    };

    #[test]
    fn toy_vector() {
        let params = GroupParams::<Toy>::setup(&11, b"T11").unwrap();
        let s = |v| params.scalar(v);
        let pk = PublicKey::from_elem(params.backend().g1().elem(3));
        let randomness = Randomness { r: s(2), s: s(4) };
        let ct = encrypt_with(&params, &pk, &s(1), &randomness);
        let coins = ConsistencyCoins { r: s(1), s: s(2), v: s(3) };
        let (proof, announcement) =
            prove_with(&params, &pk, &ct, &randomness, &s(1), &coins, Challenge::Injected(s(2)));
        assert_eq!(
            (proof.e.value(), proof.f_r.value(), proof.f_s.value(), proof.f_v.value()),
            (2, 5, 10, 5)
        );
        assert_eq!(
            (announcement.c1.log(), announcement.c2.log(), announcement.d.log()),
            (2, 7, 5)
        );
        assert!(verify_interactive(&params, &pk, &ct, &proof, &announcement));
    }

    #[test]
    fn trivial_witness() {
        let params = GroupParams::<Toy>::setup(&11, b"T11").unwrap();
        let pk = PublicKey::from_elem(params.backend().g1().elem(3));
        let zero = params.scalar(0);
        let randomness = Randomness { r: zero, s: zero };
        let ct = Ciphertext::identity(&params);
        let coins = ConsistencyCoins { r: zero, s: zero, v: zero };
        let (proof, _) =
            prove_with(&params, &pk, &ct, &randomness, &zero, &coins, Challenge::Injected(params.scalar(7)));
        assert!(proof.f_r.is_zero() && proof.f_s.is_zero() && proof.f_v.is_zero());
    }
}
