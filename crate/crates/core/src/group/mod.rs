//! Type-3 bilinear groups `(G1, G2, GT)` of prime order `q`.
//!
//! Everything above this module is generic over a [`Backend`]. Two backends
//! are provided:
//!
//! - [`Bn254`]: the BN254 pairing-friendly curve, used for real elections.
//! - [`Toy`]: every element *is* its discrete logarithm modulo a small prime
//!   `q`. Exponentiation is multiplication mod `q` and the pairing multiplies
//!   logarithms. It is bilinear and non-degenerate, so the whole scheme runs
//!   on it, and test oracles can brute-force every value.
//!
//! Exponentiations and pairings are instrumented with atomic counters so the
//! cost of a ballot can be measured exactly. The counting convention:
//!
//! - [`Group::exp`] always counts one exponentiation;
//! - [`FixedBase::pow`] and [`Group::multiexp`] count one per *non-trivial*
//!   base power, i.e. exponents other than `0` and `1` (those are resolved
//!   without exponentiating);
//! - every pairing counts one, including each term of a pairing product.

use alloc::{string::String, vec::Vec};
use core::{
    fmt,
    ops::{Add, Div, Mul, Neg, Sub},
    str::FromStr,
    sync::atomic::{AtomicUsize, Ordering},
};

use rand_core::{CryptoRng, RngCore};
use sha2::{Digest, Sha256};
use zeroize::Zeroize;

pub mod bn254;
pub mod toy;

pub use self::{bn254::Bn254, toy::Toy};

/// Element of the exponent field `Z_q`.
pub trait Scalar:
    Copy
    + Eq
    + fmt::Debug
    + Send
    + Sync
    + Zeroize
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    /// Multiplicative inverse, `None` for zero.
    fn inverse(&self) -> Option<Self>;
}

/// Element of a prime-order group, written multiplicatively.
pub trait Element:
    Copy + Eq + fmt::Debug + Send + Sync + Mul<Output = Self> + Div<Output = Self>
{
}

impl<T> Element for T where
    T: Copy + Eq + fmt::Debug + Send + Sync + Mul<Output = Self> + Div<Output = Self>
{
}

/// Monotonic operation counter shared between threads.
#[derive(Debug, Default)]
pub struct OpCounter(AtomicUsize);

impl OpCounter {
    pub fn get(&self) -> usize {
        self.0.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.0.store(0, Ordering::Relaxed);
    }

    pub(crate) fn add(&self, n: usize) {
        self.0.fetch_add(n, Ordering::Relaxed);
    }
}

/// One of the three groups of a bilinear triple.
pub trait Group: Send + Sync {
    type Elem: Element;
    type Scalar: Scalar;
    /// Precomputed data for fast exponentiation in a fixed base.
    type Table: Send + Sync;

    fn identity(&self) -> Self::Elem;

    /// Canonical generator of the group.
    fn generator(&self) -> Self::Elem;

    fn scalar_from_u64(&self, value: u64) -> Self::Scalar;

    fn inverse(&self, elem: &Self::Elem) -> Self::Elem {
        self.identity() / *elem
    }

    /// `base^k` without touching the instrumentation counter.
    fn pow_raw(&self, base: &Self::Elem, k: &Self::Scalar) -> Self::Elem;

    fn exp_counter(&self) -> &OpCounter;

    /// `base^k`; counts one exponentiation.
    fn exp(&self, base: &Self::Elem, k: &Self::Scalar) -> Self::Elem {
        self.exp_counter().add(1);
        self.pow_raw(base, k)
    }

    /// Product of `bases[i]^exps[i]`.
    fn multiexp(
        &self,
        bases: &[Self::Elem],
        exps: &[Self::Scalar],
    ) -> Result<Self::Elem, GroupError> {
        if bases.len() != exps.len() {
            return Err(GroupError::LengthMismatch {
                bases: bases.len(),
                exponents: exps.len(),
            });
        }
        let nontrivial = exps.iter().filter(|k| !k.is_zero() && !k.is_one()).count();
        self.exp_counter().add(nontrivial);
        Ok(self.multiexp_raw(bases, exps))
    }

    /// Uncounted multi-exponentiation over equal-length slices.
    fn multiexp_raw(&self, bases: &[Self::Elem], exps: &[Self::Scalar]) -> Self::Elem {
        bases
            .iter()
            .zip(exps)
            .fold(self.identity(), |acc, (base, k)| {
                if k.is_zero() {
                    acc
                } else if k.is_one() {
                    acc * *base
                } else {
                    acc * self.pow_raw(base, k)
                }
            })
    }

    fn precompute(&self, base: &Self::Elem) -> Self::Table;

    /// Uncounted exponentiation using a precomputed table.
    fn pow_table_raw(&self, table: &Self::Table, k: &Self::Scalar) -> Self::Elem;

    /// Length in bytes of every canonical encoding.
    fn encoded_len(&self) -> usize;

    fn encode_into(&self, elem: &Self::Elem, out: &mut Vec<u8>);

    fn encode(&self, elem: &Self::Elem) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        self.encode_into(elem, &mut out);
        out
    }

    /// Parses a canonical encoding; rejects anything outside the prime-order
    /// subgroup and any non-canonical byte string.
    fn decode(&self, bytes: &[u8]) -> Result<Self::Elem, DecodeError>;

    /// Short hash of an element, used as a lookup key by discrete-log tables.
    fn fingerprint(&self, elem: &Self::Elem) -> u64 {
        let digest = Sha256::digest(self.encode(elem));
        let mut word = [0_u8; 8];
        word.copy_from_slice(&digest[..8]);
        u64::from_le_bytes(word)
    }
}

/// A public base that is exponentiated many times, optionally backed by a
/// precomputed table.
pub struct FixedBase<G: Group> {
    base: G::Elem,
    table: Option<G::Table>,
}

impl<G: Group> FixedBase<G> {
    pub fn new(base: G::Elem) -> Self {
        Self { base, table: None }
    }

    pub fn precomputed(group: &G, base: G::Elem) -> Self {
        Self {
            base,
            table: Some(group.precompute(&base)),
        }
    }

    pub fn elem(&self) -> &G::Elem {
        &self.base
    }

    pub fn is_precomputed(&self) -> bool {
        self.table.is_some()
    }

    pub fn enable_precomputation(&mut self, group: &G) {
        if self.table.is_none() {
            self.table = Some(group.precompute(&self.base));
        }
    }

    pub fn disable_precomputation(&mut self) {
        self.table = None;
    }

    /// `base^k`; exponents `0` and `1` are resolved without exponentiating
    /// and are not counted.
    pub fn pow(&self, group: &G, k: &G::Scalar) -> G::Elem {
        if k.is_zero() {
            return group.identity();
        }
        if k.is_one() {
            return self.base;
        }
        group.exp_counter().add(1);
        match &self.table {
            Some(table) => group.pow_table_raw(table, k),
            None => group.pow_raw(&self.base, k),
        }
    }
}

impl<G: Group> fmt::Debug for FixedBase<G> {
    fn fmt(&self, formatter: &mut fmt::Formatter<'_>) -> fmt::Result {
        formatter
            .debug_struct("FixedBase")
            .field("base", &self.base)
            .field("precomputed", &self.table.is_some())
            .finish()
    }
}

/// Identifies a backend together with its configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BackendId {
    Toy { q: u64 },
    Bn254,
}

impl BackendId {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Toy { .. } => "toy",
            Self::Bn254 => "bn254",
        }
    }
}

impl fmt::Display for BackendId {
    fn fmt(&self, formatter: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Toy { q } => write!(formatter, "toy(q={q})"),
            Self::Bn254 => formatter.write_str("bn254"),
        }
    }
}

/// Backend family without configuration, as named on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BackendKind {
    Toy,
    Bn254,
}

impl FromStr for BackendKind {
    type Err = GroupError;

    fn from_str(name: &str) -> Result<Self, Self::Err> {
        match name {
            "toy" => Ok(Self::Toy),
            "bn254" | "real" | "real_curve" => Ok(Self::Bn254),
            other => Err(GroupError::UnknownBackend(other.into())),
        }
    }
}

/// A bilinear group triple.
pub trait Backend: Send + Sync + Sized + 'static {
    type Config: Clone + fmt::Debug;
    type Scalar: Scalar;
    type G1: Group<Scalar = Self::Scalar>;
    type G2: Group<Scalar = Self::Scalar>;
    type Gt: Group<Scalar = Self::Scalar>;

    fn instantiate(config: &Self::Config) -> Result<Self, GroupError>;

    fn id(&self) -> BackendId;

    fn g1(&self) -> &Self::G1;
    fn g2(&self) -> &Self::G2;
    fn gt(&self) -> &Self::Gt;

    /// Uncounted pairing.
    fn pair_raw(&self, a: &G1Elem<Self>, b: &G2Elem<Self>) -> GtElem<Self>;

    fn pairing_counter(&self) -> &OpCounter;

    fn pair(&self, a: &G1Elem<Self>, b: &G2Elem<Self>) -> GtElem<Self> {
        self.pairing_counter().add(1);
        self.pair_raw(a, b)
    }

    /// Product of pairings; counts one pairing per term.
    fn pairing_product(&self, pairs: &[(G1Elem<Self>, G2Elem<Self>)]) -> GtElem<Self> {
        self.pairing_counter().add(pairs.len());
        pairs
            .iter()
            .fold(self.gt().identity(), |acc, (a, b)| acc * self.pair_raw(a, b))
    }

    fn scalar_from_u64(&self, value: u64) -> Self::Scalar;

    fn random_scalar<R: RngCore + CryptoRng + ?Sized>(&self, rng: &mut R) -> Self::Scalar;

    /// Interprets `bytes` as a big-endian integer and reduces it mod `q`.
    fn scalar_from_be_bytes_mod_order(&self, bytes: &[u8]) -> Self::Scalar;

    fn scalar_len(&self) -> usize;

    /// Fixed-width big-endian encoding.
    fn encode_scalar(&self, scalar: &Self::Scalar) -> Vec<u8>;

    fn decode_scalar(&self, bytes: &[u8]) -> Result<Self::Scalar, DecodeError>;

    /// Group order, big-endian without leading zeros.
    fn order_be(&self) -> Vec<u8>;

    /// Deterministic hash-to-G2 by rejection sampling. Nobody learns the
    /// discrete log of the output with respect to any other generator.
    fn hash_to_g2(&self, domain: &[u8], seed: &[u8]) -> G2Elem<Self>;
}

pub type G1Elem<B> = <<B as Backend>::G1 as Group>::Elem;
pub type G2Elem<B> = <<B as Backend>::G2 as Group>::Elem;
pub type GtElem<B> = <<B as Backend>::Gt as Group>::Elem;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("unknown backend `{0}`")]
    UnknownBackend(String),
    #[error("toy group order {0} is not a prime in [3, 2^62)")]
    InvalidOrder(u64),
    #[error("the toy backend requires a non-empty seed")]
    EmptySeed,
    #[error("{bases} bases but {exponents} exponents")]
    LengthMismatch { bases: usize, exponents: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("expected {expected} bytes, got {actual}")]
    Length { expected: usize, actual: usize },
    #[error("encoding is not canonical")]
    NonCanonical,
    #[error("value is not in the prime-order subgroup")]
    NotInSubgroup,
    #[error("scalar is not reduced modulo the group order")]
    ScalarOutOfRange,
    #[error("malformed encoding")]
    Malformed,
}

pub(crate) fn check_len(bytes: &[u8], expected: usize) -> Result<(), DecodeError> {
    if bytes.len() == expected {
        Ok(())
    } else {
        Err(DecodeError::Length {
            expected,
            actual: bytes.len(),
        })
    }
}

const H2_DOMAIN_PREFIX: &[u8] = b"ppats/v1/";

/// Public group description: generators `g1` of G1, `h1, h2` of G2, and the
/// derived target-group bases `gT = e(g1, h1)` and `e(g1, h2)`.
///
/// `g1` and `h1` are the backend's canonical generators; `h2` is hashed to
/// the curve from the public seed.
pub struct GroupParams<B: Backend> {
    backend: B,
    seed: Vec<u8>,
    g1: FixedBase<B::G1>,
    h1: FixedBase<B::G2>,
    h2: FixedBase<B::G2>,
    gt: GtElem<B>,
    gt_h2: GtElem<B>,
    description_hash: [u8; 32],
}

impl<B: Backend> GroupParams<B> {
    /// Deterministic in `(config, seed)`.
    pub fn setup(config: &B::Config, seed: &[u8]) -> Result<Self, GroupError> {
        let backend = B::instantiate(config)?;
        if seed.is_empty() && matches!(backend.id(), BackendId::Toy { .. }) {
            return Err(GroupError::EmptySeed);
        }
        let mut domain = Vec::from(H2_DOMAIN_PREFIX);
        domain.extend_from_slice(backend.id().name().as_bytes());
        domain.extend_from_slice(b"/h2");

        let g1 = backend.g1().generator();
        let h1 = backend.g2().generator();
        let h2 = backend.hash_to_g2(&domain, seed);
        let gt = backend.pair_raw(&g1, &h1);
        let gt_h2 = backend.pair_raw(&g1, &h2);

        let mut hasher = Sha256::new();
        hasher.update(b"ppats/v1/group");
        for field in [
            backend.id().name().as_bytes(),
            &backend.order_be(),
            &backend.g1().encode(&g1),
            &backend.g2().encode(&h1),
            &backend.g2().encode(&h2),
            seed,
        ] {
            hasher.update((field.len() as u64).to_be_bytes());
            hasher.update(field);
        }

        Ok(Self {
            seed: seed.into(),
            g1: FixedBase::new(g1),
            h1: FixedBase::new(h1),
            h2: FixedBase::new(h2),
            gt,
            gt_h2,
            description_hash: hasher.finalize().into(),
            backend,
        })
    }

    /// Builds fixed-base tables for `g1`, `h1` and `h2`.
    pub fn precompute(&mut self) {
        self.g1.enable_precomputation(self.backend.g1());
        self.h1.enable_precomputation(self.backend.g2());
        self.h2.enable_precomputation(self.backend.g2());
    }

    pub fn drop_precomputation(&mut self) {
        self.g1.disable_precomputation();
        self.h1.disable_precomputation();
        self.h2.disable_precomputation();
    }

    pub fn is_precomputed(&self) -> bool {
        self.g1.is_precomputed()
    }

    pub fn backend(&self) -> &B {
        &self.backend
    }

    pub fn id(&self) -> BackendId {
        self.backend.id()
    }

    pub fn seed(&self) -> &[u8] {
        &self.seed
    }

    pub fn g1(&self) -> G1Elem<B> {
        *self.g1.elem()
    }

    pub fn h1(&self) -> G2Elem<B> {
        *self.h1.elem()
    }

    pub fn h2(&self) -> G2Elem<B> {
        *self.h2.elem()
    }

    /// `e(g1, h1)`.
    pub fn gt(&self) -> GtElem<B> {
        self.gt
    }

    /// `e(g1, h2)`, the base in which decryption extracts a discrete log.
    pub fn gt_h2(&self) -> GtElem<B> {
        self.gt_h2
    }

    pub fn g1_pow(&self, k: &B::Scalar) -> G1Elem<B> {
        self.g1.pow(self.backend.g1(), k)
    }

    pub fn h1_pow(&self, k: &B::Scalar) -> G2Elem<B> {
        self.h1.pow(self.backend.g2(), k)
    }

    pub fn h2_pow(&self, k: &B::Scalar) -> G2Elem<B> {
        self.h2.pow(self.backend.g2(), k)
    }

    /// SHA-256 over the backend name, group order, generators and seed.
    pub fn description_hash(&self) -> &[u8; 32] {
        &self.description_hash
    }

    pub fn scalar(&self, value: u64) -> B::Scalar {
        self.backend.scalar_from_u64(value)
    }

    pub fn random_scalar<R: RngCore + CryptoRng + ?Sized>(&self, rng: &mut R) -> B::Scalar {
        self.backend.random_scalar(rng)
    }

    pub fn exp_g1(&self, base: &G1Elem<B>, k: &B::Scalar) -> G1Elem<B> {
        self.backend.g1().exp(base, k)
    }

    pub fn exp_g2(&self, base: &G2Elem<B>, k: &B::Scalar) -> G2Elem<B> {
        self.backend.g2().exp(base, k)
    }

    pub fn exp_gt(&self, base: &GtElem<B>, k: &B::Scalar) -> GtElem<B> {
        self.backend.gt().exp(base, k)
    }

    pub fn pair(&self, a: &G1Elem<B>, b: &G2Elem<B>) -> GtElem<B> {
        self.backend.pair(a, b)
    }

    /// Current `(G1, G2, GT, pairing)` operation counts.
    pub fn op_counts(&self) -> OpCounts {
        OpCounts {
            g1: self.backend.g1().exp_counter().get(),
            g2: self.backend.g2().exp_counter().get(),
            gt: self.backend.gt().exp_counter().get(),
            pairings: self.backend.pairing_counter().get(),
        }
    }

    pub fn reset_op_counts(&self) {
        self.backend.g1().exp_counter().reset();
        self.backend.g2().exp_counter().reset();
        self.backend.gt().exp_counter().reset();
        self.backend.pairing_counter().reset();
    }
}

impl<B: Backend> fmt::Debug for GroupParams<B> {
    fn fmt(&self, formatter: &mut fmt::Formatter<'_>) -> fmt::Result {
        formatter
            .debug_struct("GroupParams")
            .field("backend", &self.backend.id())
            .field("g1", self.g1.elem())
            .field("h1", self.h1.elem())
            .field("h2", self.h2.elem())
            .finish()
    }
}

/// Snapshot of instrumentation counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub g1: usize,
    pub g2: usize,
    pub gt: usize,
    pub pairings: usize,
}

impl Sub for OpCounts {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        Self {
            g1: self.g1 - rhs.g1,
            g2: self.g2 - rhs.g2,
            gt: self.gt - rhs.gt,
            pairings: self.pairings - rhs.pairings,
        }
    }
}
