//! The PPATS encryption scheme.
//!
//! | step        | computation                                                    |
//! |-------------|----------------------------------------------------------------|
//! | key         | `g2 = g1^x`                                                    |
//! | encrypt `v` | `(c1, c2, d) = (g1^s, g1^r g2^s, h1^r h2^v)` plus `σcc`        |
//! | decrypt     | `log` of `e(c1^x / c2, h1) e(g1, d)` in base `e(g1, h2)`       |
//! | commitment  | `d`                                                            |
//! | opening     | `a = c2 / c1^x`                                                |
//!
//! The decryption target equals `e(g1, d) / e(a, h1) = e(g1, h2)^v`, so the
//! same `c1^x` serves both decryption and opening extraction. `c1^x` can be
//! computed from threshold shares (see [`crate::threshold`]).

use core::fmt;

use rand_core::{CryptoRng, RngCore};
use zeroize::Zeroize;

use crate::{
    challenge::ProofLabel,
    commitment::{commit, Commitment, Opening},
    dlog::{DlogError, DlogTable},
    group::{Backend, FixedBase, G1Elem, Group, GroupParams, GtElem, Scalar},
    proofs::consistency::{self, ConsistencyProof},
};

/// ElGamal public key `g2 = g1^x`.
pub struct PublicKey<B: Backend> {
    g2: FixedBase<B::G1>,
}

impl<B: Backend> PublicKey<B> {
    pub fn from_elem(g2: G1Elem<B>) -> Self {
        Self {
            g2: FixedBase::new(g2),
        }
    }

    pub fn elem(&self) -> G1Elem<B> {
        *self.g2.elem()
    }

    /// Builds a fixed-base table for `g2`.
    pub fn precompute(&mut self, params: &GroupParams<B>) {
        self.g2.enable_precomputation(params.backend().g1());
    }

    pub fn drop_precomputation(&mut self) {
        self.g2.disable_precomputation();
    }

    /// `g2^k`, counted like other fixed-base powers.
    pub fn pow(&self, params: &GroupParams<B>, k: &B::Scalar) -> G1Elem<B> {
        self.g2.pow(params.backend().g1(), k)
    }
}

impl<B: Backend> Clone for PublicKey<B> {
    fn clone(&self) -> Self {
        Self::from_elem(self.elem())
    }
}

impl<B: Backend> PartialEq for PublicKey<B> {
    fn eq(&self, other: &Self) -> bool {
        self.elem() == other.elem()
    }
}

impl<B: Backend> fmt::Debug for PublicKey<B> {
    fn fmt(&self, formatter: &mut fmt::Formatter<'_>) -> fmt::Result {
        formatter.debug_tuple("PublicKey").field(self.g2.elem()).finish()
    }
}

/// Decryption exponent `x`. Zeroized on drop.
pub struct SecretKey<B: Backend> {
    x: B::Scalar,
}

impl<B: Backend> SecretKey<B> {
    pub fn from_scalar(x: B::Scalar) -> Self {
        Self { x }
    }

    pub fn expose_scalar(&self) -> &B::Scalar {
        &self.x
    }

    pub fn public_key(&self, params: &GroupParams<B>) -> PublicKey<B> {
        PublicKey::from_elem(params.g1_pow(&self.x))
    }
}

impl<B: Backend> Zeroize for SecretKey<B> {
    fn zeroize(&mut self) {
        self.x.zeroize();
    }
}

impl<B: Backend> Drop for SecretKey<B> {
    fn drop(&mut self) {
        self.zeroize();
    }
}

impl<B: Backend> fmt::Debug for SecretKey<B> {
    fn fmt(&self, formatter: &mut fmt::Formatter<'_>) -> fmt::Result {
        formatter.write_str("SecretKey(..)")
    }
}

/// `x` uniform in `[1, q)`.
pub fn keygen<B: Backend, R: RngCore + CryptoRng + ?Sized>(
    params: &GroupParams<B>,
    rng: &mut R,
) -> (PublicKey<B>, SecretKey<B>) {
    let x = loop {
        let x = params.random_scalar(rng);
        if !x.is_zero() {
            break x;
        }
    };
    let sk = SecretKey::from_scalar(x);
    (sk.public_key(params), sk)
}

/// Encryption randomness `(r, s)`; `r` is the commitment randomness.
/// Zeroized on drop.
pub struct Randomness<B: Backend> {
    pub r: B::Scalar,
    pub s: B::Scalar,
}

impl<B: Backend> Randomness<B> {
    pub fn random<R: RngCore + CryptoRng + ?Sized>(params: &GroupParams<B>, rng: &mut R) -> Self {
        Self {
            r: params.random_scalar(rng),
            s: params.random_scalar(rng),
        }
    }
}

impl<B: Backend> Drop for Randomness<B> {
    fn drop(&mut self) {
        self.r.zeroize();
        self.s.zeroize();
    }
}

/// PPATS ciphertext `(c1, c2, d)` with an optional consistency proof.
pub struct Ciphertext<B: Backend> {
    pub c1: G1Elem<B>,
    pub c2: G1Elem<B>,
    pub d: Commitment<B>,
    pub proof: Option<ConsistencyProof<B>>,
}

impl<B: Backend> Clone for Ciphertext<B> {
    fn clone(&self) -> Self {
        Self {
            c1: self.c1,
            c2: self.c2,
            d: self.d,
            proof: self.proof.clone(),
        }
    }
}

impl<B: Backend> PartialEq for Ciphertext<B> {
    fn eq(&self, other: &Self) -> bool {
        self.c1 == other.c1 && self.c2 == other.c2 && self.d == other.d && self.proof == other.proof
    }
}

impl<B: Backend> Eq for Ciphertext<B> {}

impl<B: Backend> fmt::Debug for Ciphertext<B> {
    fn fmt(&self, formatter: &mut fmt::Formatter<'_>) -> fmt::Result {
        formatter
            .debug_struct("Ciphertext")
            .field("c1", &self.c1)
            .field("c2", &self.c2)
            .field("d", &self.d.0)
            .field("proof", &self.proof)
            .finish()
    }
}

impl<B: Backend> Ciphertext<B> {
    /// Encryption of `0` with zero randomness: the neutral element of
    /// [`multiply`].
    pub fn identity(params: &GroupParams<B>) -> Self {
        let g1 = params.backend().g1();
        Self {
            c1: g1.identity(),
            c2: g1.identity(),
            d: Commitment::identity(params),
            proof: None,
        }
    }

    #[must_use]
    pub fn without_proof(&self) -> Self {
        Self {
            proof: None,
            ..self.clone()
        }
    }
}

/// The ciphertext triple for explicit randomness, without a proof.
pub fn encrypt_with<B: Backend>(
    params: &GroupParams<B>,
    pk: &PublicKey<B>,
    v: &B::Scalar,
    randomness: &Randomness<B>,
) -> Ciphertext<B> {
    let Randomness { r, s } = randomness;
    Ciphertext {
        c1: params.g1_pow(s),
        c2: params.g1_pow(r) * pk.pow(params, s),
        d: commit(params, v, r),
        proof: None,
    }
}

/// Encrypts `v` with fresh randomness and attaches a consistency proof bound
/// to `label`. The randomness is returned for the 0/1 proof on `d`.
pub fn encrypt<B: Backend, R: RngCore + CryptoRng + ?Sized>(
    params: &GroupParams<B>,
    pk: &PublicKey<B>,
    v: &B::Scalar,
    label: &ProofLabel,
    rng: &mut R,
) -> (Ciphertext<B>, Randomness<B>) {
    let randomness = Randomness::random(params, rng);
    let mut ciphertext = encrypt_with(params, pk, v, &randomness);
    let proof = consistency::prove(params, pk, &ciphertext, &randomness, v, label, rng);
    ciphertext.proof = Some(proof);
    (ciphertext, randomness)
}

/// Componentwise product; decrypts to the sum of plaintexts. Proofs are
/// dropped.
pub fn multiply<B: Backend>(a: &Ciphertext<B>, b: &Ciphertext<B>) -> Ciphertext<B> {
    Ciphertext {
        c1: a.c1 * b.c1,
        c2: a.c2 * b.c2,
        d: Commitment(a.d.0 * b.d.0),
        proof: None,
    }
}

/// Product of any number of ciphertexts.
pub fn aggregate<'a, B: Backend>(
    params: &GroupParams<B>,
    ciphertexts: impl IntoIterator<Item = &'a Ciphertext<B>>,
) -> Ciphertext<B> {
    ciphertexts
        .into_iter()
        .fold(Ciphertext::identity(params), |acc, ct| multiply(&acc, ct))
}

pub fn extract_commitment<B: Backend>(ciphertext: &Ciphertext<B>) -> Commitment<B> {
    ciphertext.d
}

/// `a = c2 / c1^x`.
pub fn extract_opening<B: Backend>(
    params: &GroupParams<B>,
    sk: &SecretKey<B>,
    ciphertext: &Ciphertext<B>,
) -> Opening<B> {
    opening_from_shared(ciphertext, &params.exp_g1(&ciphertext.c1, sk.expose_scalar()))
}

/// `a = c2 / K` given `K = c1^x`, however it was computed.
pub fn opening_from_shared<B: Backend>(
    ciphertext: &Ciphertext<B>,
    c1_to_x: &G1Elem<B>,
) -> Opening<B> {
    Opening(ciphertext.c2 / *c1_to_x)
}

/// `e(g1, d) / e(a, h1)`, equal to `e(g1, h2)^v` for a valid opening of `d`
/// to `v`.
pub fn decryption_target<B: Backend>(
    params: &GroupParams<B>,
    commitment: &Commitment<B>,
    opening: &Opening<B>,
) -> GtElem<B> {
    params.pair(&params.g1(), &commitment.0) / params.pair(&opening.0, &params.h1())
}

/// Recovers `v` in `[0, bound]`.
pub fn decrypt<B: Backend>(
    params: &GroupParams<B>,
    sk: &SecretKey<B>,
    ciphertext: &Ciphertext<B>,
    bound: u64,
) -> Result<u64, DlogError> {
    let opening = extract_opening(params, sk, ciphertext);
    let target = decryption_target(params, &ciphertext.d, &opening);
    if bound == 0 {
        return Err(DlogError::InvalidBound);
    }
    DlogTable::for_bound(params.backend().gt(), params.gt_h2(), bound).extract(
        params.backend().gt(),
        &target,
        bound,
    )
}

/// Like [`decrypt`] with a reusable baby-step table for `e(g1, h2)`.
pub fn decrypt_with_table<B: Backend>(
    params: &GroupParams<B>,
    sk: &SecretKey<B>,
    ciphertext: &Ciphertext<B>,
    table: &DlogTable<B::Gt>,
    bound: u64,
) -> Result<u64, DlogError> {
    let opening = extract_opening(params, sk, ciphertext);
    let target = decryption_target(params, &ciphertext.d, &opening);
    table.extract(params.backend().gt(), &target, bound)
}
