//! Chaum-Pedersen proof that `y1 = base1^k` and `y2 = base2^k` in G1.

use alloc::vec::Vec;

use rand_core::{CryptoRng, RngCore};

use super::{scalar_struct_impls, Challenge};
use crate::{
    challenge::{fiat_shamir_challenge, ProofLabel},
    group::{Backend, G1Elem, Group, GroupParams},
};

pub struct DleqProof<B: Backend> {
    pub e: B::Scalar,
    pub f: B::Scalar,
}

scalar_struct_impls!(DleqProof { e, f });

/// The statement `(base1, y1, base2, y2)`.
pub struct DleqStatement<B: Backend> {
    pub base1: G1Elem<B>,
    pub y1: G1Elem<B>,
    pub base2: G1Elem<B>,
    pub y2: G1Elem<B>,
}

fn challenge<B: Backend>(
    params: &GroupParams<B>,
    statement: &DleqStatement<B>,
    t: &[G1Elem<B>; 2],
    label: &ProofLabel,
) -> B::Scalar {
    let g1 = params.backend().g1();
    let parts: Vec<Vec<u8>> = [
        statement.base1,
        statement.y1,
        statement.base2,
        statement.y2,
        t[0],
        t[1],
    ]
    .iter()
    .map(|elem| g1.encode(elem))
    .collect();
    let parts: Vec<&[u8]> = parts.iter().map(Vec::as_slice).collect();
    fiat_shamir_challenge(params.backend(), label, &parts)
}

pub fn prove<B: Backend, R: RngCore + CryptoRng + ?Sized>(
    params: &GroupParams<B>,
    statement: &DleqStatement<B>,
    k: &B::Scalar,
    label: &ProofLabel,
    rng: &mut R,
) -> DleqProof<B> {
    let w = params.random_scalar(rng);
    prove_with(params, statement, k, &w, Challenge::FiatShamir(label)).0
}

/// Deterministic prover; also returns the announcements `(base1^w, base2^w)`.
pub fn prove_with<B: Backend>(
    params: &GroupParams<B>,
    statement: &DleqStatement<B>,
    k: &B::Scalar,
    w: &B::Scalar,
    challenge_source: Challenge<'_, B::Scalar>,
) -> (DleqProof<B>, [G1Elem<B>; 2]) {
    let t = [
        params.exp_g1(&statement.base1, w),
        params.exp_g1(&statement.base2, w),
    ];
    let e = match challenge_source {
        Challenge::FiatShamir(label) => challenge(params, statement, &t, label),
        Challenge::Injected(e) => e,
    };
    (DleqProof { e, f: *w + e * *k }, t)
}

pub fn reconstruct<B: Backend>(
    params: &GroupParams<B>,
    statement: &DleqStatement<B>,
    proof: &DleqProof<B>,
) -> [G1Elem<B>; 2] {
    [
        params.exp_g1(&statement.base1, &proof.f) / params.exp_g1(&statement.y1, &proof.e),
        params.exp_g1(&statement.base2, &proof.f) / params.exp_g1(&statement.y2, &proof.e),
    ]
}

pub fn verify<B: Backend>(
    params: &GroupParams<B>,
    statement: &DleqStatement<B>,
    proof: &DleqProof<B>,
    label: &ProofLabel,
) -> bool {
    let t = reconstruct(params, statement, proof);
    challenge(params, statement, &t, label) == proof.e
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    use super::*;
    use crate::{challenge::purpose, group::Toy};

    #[test]
    fn toy_examples() {
        let params = GroupParams::<Toy>::setup(&11, b"T11").unwrap();
        let label = ProofLabel::new(&params, b"e", purpose::DECRYPTION_SHARE);
        let g1 = params.backend().g1();
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let mut statement = DleqStatement {
            base1: params.g1(),
            y1: g1.elem(3),
            base2: g1.elem(4),
            y2: g1.elem(1),
        };
        let proof = prove(&params, &statement, &params.scalar(3), &label, &mut rng);
        assert!(verify(&params, &statement, &proof, &label));
        statement.y2 = g1.elem(2);
        assert!(!verify(&params, &statement, &proof, &label));

        let zero = DleqStatement {
            base1: params.g1(),
            y1: g1.identity(),
            base2: g1.elem(4),
            y2: g1.identity(),
        };
        let proof = prove(&params, &zero, &params.scalar(0), &label, &mut rng);
        assert!(verify(&params, &zero, &proof, &label));
    }
}
