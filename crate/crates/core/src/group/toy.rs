//! Test-scale backend where each element is represented by its discrete log.
//!
//! `G1`, `G2` and `GT` are all `(Z_q, +)` written multiplicatively: the group
//! operation adds logs, exponentiation multiplies the log by the exponent,
//! and the pairing multiplies the two logs. Canonical generators have log 1.
//! This offers no security whatsoever.

use alloc::vec::Vec;
use core::{
    fmt,
    ops::{Add, Div, Mul, Neg, Sub},
};

use rand_core::{CryptoRng, RngCore};
use sha2::{Digest, Sha256};
use zeroize::Zeroize;

use super::{check_len, Backend, BackendId, DecodeError, Group, GroupError, OpCounter, Scalar};

fn add_mod(a: u64, b: u64, q: u64) -> u64 {
    let sum = a + b;
    if sum >= q {
        sum - q
    } else {
        sum
    }
}

fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(q)) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, q: u64) -> u64 {
    let mut acc = 1 % q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, q);
        }
        base = mul_mod(base, base, q);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Residue modulo `q`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ToyScalar {
    value: u64,
    q: u64,
}

impl ToyScalar {
    pub fn value(&self) -> u64 {
        self.value
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.q, other.q, "mixing toy scalars of different groups");
    }
}

impl fmt::Debug for ToyScalar {
    fn fmt(&self, formatter: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(formatter, "{} (mod {})", self.value, self.q)
    }
}

impl Zeroize for ToyScalar {
    fn zeroize(&mut self) {
        self.value.zeroize();
    }
}

impl Add for ToyScalar {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        self.check(&rhs);
        Self {
            value: add_mod(self.value, rhs.value, self.q),
            q: self.q,
        }
    }
}

impl Sub for ToyScalar {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for ToyScalar {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        self.check(&rhs);
        Self {
            value: mul_mod(self.value, rhs.value, self.q),
            q: self.q,
        }
    }
}

impl Neg for ToyScalar {
    type Output = Self;

    fn neg(self) -> Self {
        let value = if self.value == 0 {
            0
        } else {
            self.q - self.value
        };
        Self { value, q: self.q }
    }
}

impl Scalar for ToyScalar {
    fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn is_one(&self) -> bool {
        self.value == 1
    }

    fn inverse(&self) -> Option<Self> {
        if self.value == 0 {
            None
        } else {
            Some(Self {
                value: pow_mod(self.value, self.q - 2, self.q),
                q: self.q,
            })
        }
    }
}

/// Group element represented by its discrete logarithm.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ToyElem {
    log: u64,
    q: u64,
}

impl ToyElem {
    pub fn log(&self) -> u64 {
        self.log
    }
}

impl fmt::Debug for ToyElem {
    fn fmt(&self, formatter: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(formatter, "log {}", self.log)
    }
}

impl Mul for ToyElem {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.q, rhs.q);
        Self {
            log: add_mod(self.log, rhs.log, self.q),
            q: self.q,
        }
    }
}

impl Div for ToyElem {
    type Output = Self;

    fn div(self, rhs: Self) -> Self {
        assert_eq!(self.q, rhs.q);
        let neg = if rhs.log == 0 { 0 } else { self.q - rhs.log };
        Self {
            log: add_mod(self.log, neg, self.q),
            q: self.q,
        }
    }
}

/// One of the three (identical) toy groups.
#[derive(Debug)]
pub struct ToyGroup {
    q: u64,
    width: usize,
    exps: OpCounter,
}

impl ToyGroup {
    fn new(q: u64) -> Self {
        let bits = 64 - q.leading_zeros() as usize;
        Self {
            q,
            width: bits.div_ceil(8),
            exps: OpCounter::default(),
        }
    }

    pub fn elem(&self, log: u64) -> ToyElem {
        ToyElem {
            log: log % self.q,
            q: self.q,
        }
    }
}

impl Group for ToyGroup {
    type Elem = ToyElem;
    type Scalar = ToyScalar;
    type Table = ToyElem;

    fn identity(&self) -> ToyElem {
        self.elem(0)
    }

    fn generator(&self) -> ToyElem {
        self.elem(1)
    }

    fn scalar_from_u64(&self, value: u64) -> ToyScalar {
        ToyScalar {
            value: value % self.q,
            q: self.q,
        }
    }

    fn pow_raw(&self, base: &ToyElem, k: &ToyScalar) -> ToyElem {
        ToyElem {
            log: mul_mod(base.log, k.value, self.q),
            q: self.q,
        }
    }

    fn exp_counter(&self) -> &OpCounter {
        &self.exps
    }

    fn precompute(&self, base: &ToyElem) -> ToyElem {
        *base
    }

    fn pow_table_raw(&self, table: &ToyElem, k: &ToyScalar) -> ToyElem {
        self.pow_raw(table, k)
    }

    fn encoded_len(&self) -> usize {
        self.width
    }

    fn encode_into(&self, elem: &ToyElem, out: &mut Vec<u8>) {
        out.extend_from_slice(&elem.log.to_be_bytes()[8 - self.width..]);
    }

    fn decode(&self, bytes: &[u8]) -> Result<ToyElem, DecodeError> {
        check_len(bytes, self.width)?;
        let log = bytes.iter().fold(0_u64, |acc, &b| (acc << 8) | u64::from(b));
        if log >= self.q {
            return Err(DecodeError::NotInSubgroup);
        }
        Ok(self.elem(log))
    }

    fn fingerprint(&self, elem: &ToyElem) -> u64 {
        elem.log
    }
}

/// Toy bilinear triple over `Z_q`.
#[derive(Debug)]
pub struct Toy {
    q: u64,
    g1: ToyGroup,
    g2: ToyGroup,
    gt: ToyGroup,
    pairings: OpCounter,
}

impl Toy {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn scalar(&self, value: u64) -> ToyScalar {
        ToyScalar {
            value: value % self.q,
            q: self.q,
        }
    }
}

impl Backend for Toy {
    /// The group order `q`.
    type Config = u64;
    type Scalar = ToyScalar;
    type G1 = ToyGroup;
    type G2 = ToyGroup;
    type Gt = ToyGroup;

    fn instantiate(q: &u64) -> Result<Self, GroupError> {
        let q = *q;
        if !(3..1 << 62).contains(&q) || !is_prime(q) {
            return Err(GroupError::InvalidOrder(q));
        }
        Ok(Self {
            q,
            g1: ToyGroup::new(q),
            g2: ToyGroup::new(q),
            gt: ToyGroup::new(q),
            pairings: OpCounter::default(),
        })
    }

    fn id(&self) -> BackendId {
        BackendId::Toy { q: self.q }
    }

    fn g1(&self) -> &ToyGroup {
        &self.g1
    }

    fn g2(&self) -> &ToyGroup {
        &self.g2
    }

    fn gt(&self) -> &ToyGroup {
        &self.gt
    }

    fn pair_raw(&self, a: &ToyElem, b: &ToyElem) -> ToyElem {
        self.gt.elem(mul_mod(a.log, b.log, self.q))
    }

    fn pairing_counter(&self) -> &OpCounter {
        &self.pairings
    }

    fn scalar_from_u64(&self, value: u64) -> ToyScalar {
        self.scalar(value)
    }

    fn random_scalar<R: RngCore + CryptoRng + ?Sized>(&self, rng: &mut R) -> ToyScalar {
        let zone = u64::MAX - u64::MAX % self.q;
        loop {
            let candidate = rng.next_u64();
            if candidate < zone {
                return self.scalar(candidate);
            }
        }
    }

    fn scalar_from_be_bytes_mod_order(&self, bytes: &[u8]) -> ToyScalar {
        let q = u128::from(self.q);
        let value = bytes
            .iter()
            .fold(0_u128, |acc, &b| ((acc << 8) | u128::from(b)) % q);
        self.scalar(value as u64)
    }

    fn scalar_len(&self) -> usize {
        self.g1.width
    }

    fn encode_scalar(&self, scalar: &ToyScalar) -> Vec<u8> {
        scalar.value.to_be_bytes()[8 - self.g1.width..].into()
    }

    fn decode_scalar(&self, bytes: &[u8]) -> Result<ToyScalar, DecodeError> {
        check_len(bytes, self.g1.width)?;
        let value = bytes.iter().fold(0_u64, |acc, &b| (acc << 8) | u64::from(b));
        if value >= self.q {
            return Err(DecodeError::ScalarOutOfRange);
        }
        Ok(self.scalar(value))
    }

    fn order_be(&self) -> Vec<u8> {
        let bytes = self.q.to_be_bytes();
        let skip = bytes.iter().take_while(|&&b| b == 0).count();
        bytes[skip..].into()
    }

    /// First non-identity value of
    /// `SHA-256(domain || len(seed) as u64 || seed || counter as u32) mod q`.
    fn hash_to_g2(&self, domain: &[u8], seed: &[u8]) -> ToyElem {
        (0_u32..)
            .map(|counter| {
                let digest = Sha256::new()
                    .chain_update(domain)
                    .chain_update((seed.len() as u64).to_be_bytes())
                    .chain_update(seed)
                    .chain_update(counter.to_be_bytes())
                    .finalize();
                self.scalar_from_be_bytes_mod_order(&digest).value
            })
            .find(|&log| log != 0)
            .map(|log| self.g2.elem(log))
            .expect("q >= 3 leaves non-zero residues")
    }
}
