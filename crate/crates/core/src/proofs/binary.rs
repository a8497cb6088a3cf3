//! Proof that a commitment `d = h1^r h2^v` has `v ∈ {0, 1}`.
//!
//! With `D0 = d` and `D1 = d / h2`, the prover knows `log_h1` of `D_v`. The
//! real branch announces `t_v = h1^w`; the other branch is simulated from a
//! presampled `(e_sim, f_sim)` as `t = h1^f_sim / D^e_sim`. The challenge
//! `e = H(d, t0, t1, label)` is split additively: `e_v = e - e_sim`, and
//! `f_v = w + e_v r`.

use alloc::vec::Vec;

use rand_core::{CryptoRng, RngCore};
use zeroize::Zeroize;

use super::{scalar_struct_impls, Challenge, ProofError};
use crate::{
    challenge::{fiat_shamir_challenge, ProofLabel},
    commitment::Commitment,
    group::{Backend, G2Elem, Group, GroupParams, Scalar},
};

pub struct BinaryProof<B: Backend> {
    pub e0: B::Scalar,
    pub e1: B::Scalar,
    pub f0: B::Scalar,
    pub f1: B::Scalar,
}

scalar_struct_impls!(BinaryProof { e0, e1, f0, f1 });

/// Prover coins: `w` for the real branch, `(e_sim, f_sim)` for the other.
pub struct BinaryCoins<B: Backend> {
    pub w: B::Scalar,
    pub e_sim: B::Scalar,
    pub f_sim: B::Scalar,
}

impl<B: Backend> BinaryCoins<B> {
    pub fn random<R: RngCore + CryptoRng + ?Sized>(params: &GroupParams<B>, rng: &mut R) -> Self {
        Self {
            w: params.random_scalar(rng),
            e_sim: params.random_scalar(rng),
            f_sim: params.random_scalar(rng),
        }
    }
}

impl<B: Backend> Drop for BinaryCoins<B> {
    fn drop(&mut self) {
        self.w.zeroize();
        self.e_sim.zeroize();
        self.f_sim.zeroize();
    }
}

fn branches<B: Backend>(params: &GroupParams<B>, d: &Commitment<B>) -> [G2Elem<B>; 2] {
    [d.0, d.0 / params.h2()]
}

fn challenge<B: Backend>(
    params: &GroupParams<B>,
    d: &Commitment<B>,
    t: &[G2Elem<B>; 2],
    label: &ProofLabel,
) -> B::Scalar {
    let g2 = params.backend().g2();
    let parts: [Vec<u8>; 3] = [g2.encode(&d.0), g2.encode(&t[0]), g2.encode(&t[1])];
    let parts: Vec<&[u8]> = parts.iter().map(Vec::as_slice).collect();
    fiat_shamir_challenge(params.backend(), label, &parts)
}

pub fn prove<B: Backend, R: RngCore + CryptoRng + ?Sized>(
    params: &GroupParams<B>,
    d: &Commitment<B>,
    r: &B::Scalar,
    v: &B::Scalar,
    label: &ProofLabel,
    rng: &mut R,
) -> Result<BinaryProof<B>, ProofError> {
    let coins = BinaryCoins::random(params, rng);
    prove_with(params, d, r, v, &coins, Challenge::FiatShamir(label)).map(|(proof, _)| proof)
}

/// Deterministic prover; also returns the announcements `(t0, t1)`.
pub fn prove_with<B: Backend>(
    params: &GroupParams<B>,
    d: &Commitment<B>,
    r: &B::Scalar,
    v: &B::Scalar,
    coins: &BinaryCoins<B>,
    challenge_source: Challenge<'_, B::Scalar>,
) -> Result<(BinaryProof<B>, [G2Elem<B>; 2]), ProofError> {
    let real = if v.is_zero() {
        0
    } else if v.is_one() {
        1
    } else {
        return Err(ProofError::NotBinary);
    };
    let fake = 1 - real;
    let d_branches = branches(params, d);
    let mut t = [params.h1(); 2];
    t[real] = params.h1_pow(&coins.w);
    t[fake] = params.h1_pow(&coins.f_sim) / params.exp_g2(&d_branches[fake], &coins.e_sim);
    let e = match challenge_source {
        Challenge::FiatShamir(label) => challenge(params, d, &t, label),
        Challenge::Injected(e) => e,
    };
    let e_real = e - coins.e_sim;
    let f_real = coins.w + e_real * *r;
    let (e0, e1, f0, f1) = if real == 0 {
        (e_real, coins.e_sim, f_real, coins.f_sim)
    } else {
        (coins.e_sim, e_real, coins.f_sim, f_real)
    };
    Ok((BinaryProof { e0, e1, f0, f1 }, t))
}

/// `t_i = h1^f_i / D_i^e_i`.
pub fn reconstruct<B: Backend>(
    params: &GroupParams<B>,
    d: &Commitment<B>,
    proof: &BinaryProof<B>,
) -> [G2Elem<B>; 2] {
    let d_branches = branches(params, d);
    [
        params.h1_pow(&proof.f0) / params.exp_g2(&d_branches[0], &proof.e0),
        params.h1_pow(&proof.f1) / params.exp_g2(&d_branches[1], &proof.e1),
    ]
}

pub fn verify<B: Backend>(
    params: &GroupParams<B>,
    d: &Commitment<B>,
    proof: &BinaryProof<B>,
    label: &ProofLabel,
) -> bool {
    let t = reconstruct(params, d, proof);
    challenge(params, d, &t, label) == proof.e0 + proof.e1
}

/// Interactive-mode check against known announcements and total challenge.
pub fn verify_interactive<B: Backend>(
    params: &GroupParams<B>,
    d: &Commitment<B>,
    proof: &BinaryProof<B>,
    announcements: &[G2Elem<B>; 2],
    e: &B::Scalar,
) -> bool {
    proof.e0 + proof.e1 == *e && reconstruct(params, d, proof) == *announcements
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    use super::*;
    use crate::{challenge::purpose, commitment::commit, group::Toy};

    fn t11() -> GroupParams<Toy> {
        GroupParams::setup(&11, b"T11").unwrap()
    }

    #[test]
    fn toy_vector() {
        let params = t11();
        let s = |v| params.scalar(v);
        let d = Commitment(params.backend().g2().elem(7));
        let coins = BinaryCoins {
            w: s(3),
            e_sim: s(2),
            f_sim: s(4),
        };
        let (proof, t) = prove_with(&params, &d, &s(2), &s(1), &coins, Challenge::Injected(s(5))).unwrap();
        assert_eq!(
            (proof.e0.value(), proof.e1.value(), proof.f0.value(), proof.f1.value()),
            (2, 3, 4, 9)
        );
        assert_eq!((t[0].log(), t[1].log()), (1, 3));
        assert!(verify_interactive(&params, &d, &proof, &t, &s(5)));

        let mut bad = proof;
        bad.e0 = bad.e0 + s(1);
        assert!(!verify_interactive(&params, &d, &bad, &t, &s(5)));
    }

    #[test]
    fn identity_commitment_accepted() {
        let params = t11();
        let label = ProofLabel::new(&params, b"e", purpose::BINARY);
        let d = Commitment::identity(&params);
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let proof = prove(&params, &d, &params.scalar(0), &params.scalar(0), &label, &mut rng).unwrap();
        assert!(verify(&params, &d, &proof, &label));
    }

    #[test]
    fn rejects_non_binary_witness() {
        let params = t11();
        let label = ProofLabel::new(&params, b"e", purpose::BINARY);
        let d = commit(&params, &params.scalar(2), &params.scalar(3));
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        assert_eq!(
            prove(&params, &d, &params.scalar(3), &params.scalar(2), &label, &mut rng).unwrap_err(),
            ProofError::NotBinary
        );
    }

    #[test]
    fn exhaustive_toy_completeness() {
        let params = t11();
        let label = ProofLabel::new(&params, b"e", purpose::BINARY);
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for v in 0..2 {
            for r in 0..11 {
                let (r, v) = (params.scalar(r), params.scalar(v));
                let d = commit(&params, &v, &r);
                let proof = prove(&params, &d, &r, &v, &label, &mut rng).unwrap();
                assert!(verify(&params, &d, &proof, &label));
            }
        }
    }
}
