//! BN254 backend on top of arkworks.
//!
//! Points use compressed encodings (32 bytes in G1, 64 in G2); target-group
//! elements use the 384-byte `Fq12` encoding. Scalars are 32-byte big-endian.

use alloc::vec::Vec;
use core::{
    fmt,
    marker::PhantomData,
    ops::{Div, Mul},
};

use ark_bn254::{Fq, Fq2, Fr};
use ark_ec::{
    bn::BnConfig,
    pairing::{Pairing, PairingOutput},
    scalar_mul::glv::GLVConfig,
    short_weierstrass::{Affine, Projective, SWCurveConfig},
    AffineRepr, CurveGroup, PrimeGroup, VariableBaseMSM,
};
use ark_ff::{AdditiveGroup, BigInteger, Field, One, PrimeField, Zero};
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize, Compress, Validate};
use rand_core::{CryptoRng, RngCore};
use sha2::{Digest, Sha256};

use super::{check_len, Backend, BackendId, DecodeError, Group, GroupError, OpCounter, Scalar};

type Engine = ark_bn254::Bn254;

impl Scalar for Fr {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn is_one(&self) -> bool {
        One::is_one(self)
    }

    fn inverse(&self) -> Option<Self> {
        Field::inverse(self)
    }
}

/// Point on a short-Weierstrass curve, written multiplicatively.
pub struct CurvePoint<P: SWCurveConfig>(pub Projective<P>);

impl<P: SWCurveConfig> Clone for CurvePoint<P> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<P: SWCurveConfig> Copy for CurvePoint<P> {}

impl<P: SWCurveConfig> PartialEq for CurvePoint<P> {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl<P: SWCurveConfig> Eq for CurvePoint<P> {}

impl<P: SWCurveConfig> fmt::Debug for CurvePoint<P> {
    fn fmt(&self, formatter: &mut fmt::Formatter<'_>) -> fmt::Result {
        let affine = self.0.into_affine();
        if affine.infinity {
            formatter.write_str("CurvePoint(identity)")
        } else {
            write!(formatter, "CurvePoint({}, {})", affine.x, affine.y)
        }
    }
}

impl<P: SWCurveConfig> Mul for CurvePoint<P> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl<P: SWCurveConfig> Div for CurvePoint<P> {
    type Output = Self;

    fn div(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

const WINDOW_BITS: usize = 8;
const WINDOWS: usize = 256 / WINDOW_BITS;

/// Fixed-base comb: `windows[i][j - 1] = j * 2^(8i) * base` for `j` in
/// `1..256`, so an exponentiation costs at most 32 mixed additions.
pub struct FixedBaseTable<P: SWCurveConfig> {
    windows: Vec<Vec<Affine<P>>>,
}

impl<P: SWCurveConfig> FixedBaseTable<P> {
    fn new(base: Projective<P>) -> Self {
        let mut windows = Vec::with_capacity(WINDOWS);
        let mut window_base = base;
        for _ in 0..WINDOWS {
            let mut row = Vec::with_capacity((1 << WINDOW_BITS) - 1);
            let mut acc = window_base;
            for _ in 1..1 << WINDOW_BITS {
                row.push(acc);
                acc += window_base;
            }
            window_base = acc;
            windows.push(Projective::normalize_batch(&row));
        }
        Self { windows }
    }

    fn pow(&self, k: &P::ScalarField) -> Projective<P> {
        let bytes = k.into_bigint().to_bytes_le();
        let mut acc = Projective::<P>::zero();
        for (row, &digit) in self.windows.iter().zip(&bytes) {
            if digit != 0 {
                acc += row[usize::from(digit) - 1];
            }
        }
        acc
    }
}

/// G1 or G2 of BN254.
pub struct PointGroup<P> {
    exps: OpCounter,
    _config: PhantomData<fn() -> P>,
}

impl<P> fmt::Debug for PointGroup<P> {
    fn fmt(&self, formatter: &mut fmt::Formatter<'_>) -> fmt::Result {
        formatter
            .debug_struct("PointGroup")
            .field("exps", &self.exps)
            .finish()
    }
}

impl<P> Default for PointGroup<P> {
    fn default() -> Self {
        Self {
            exps: OpCounter::default(),
            _config: PhantomData,
        }
    }
}

/// Prime-order subgroup membership of an on-curve point.
pub trait SubgroupCheck: SWCurveConfig {
    fn in_subgroup(point: &Affine<Self>) -> bool {
        point.is_in_correct_subgroup_assuming_on_curve()
    }
}

impl SubgroupCheck for ark_bn254::g1::Config {}

impl SubgroupCheck for ark_bn254::g2::Config {
    /// `[x+1]P + psi([x]P) + psi^2([x]P) = psi^3([2x]P)` for the 63-bit curve
    /// parameter `x`; arkworks tests `[6x^2]P = psi(P)`, twice the doublings.
    fn in_subgroup(point: &Affine<Self>) -> bool {
        let xp = point.mul_bigint(ark_bn254::Config::X);
        let psi1 = psi(&xp);
        let psi2 = psi(&psi1);
        psi(&psi2).double() == xp + point + psi1 + psi2
    }
}

/// Untwist-Frobenius-twist on G2, coordinatewise in Jacobian form.
fn psi(p: &Projective<ark_bn254::g2::Config>) -> Projective<ark_bn254::g2::Config> {
    let mut out = *p;
    out.x.frobenius_map_in_place(1);
    out.y.frobenius_map_in_place(1);
    out.z.frobenius_map_in_place(1);
    out.x *= ark_bn254::Config::TWIST_MUL_BY_Q_X;
    out.y *= ark_bn254::Config::TWIST_MUL_BY_Q_Y;
    out
}

impl<P: SWCurveConfig<ScalarField = Fr> + GLVConfig + SubgroupCheck> Group for PointGroup<P> {
    type Elem = CurvePoint<P>;
    type Scalar = Fr;
    type Table = FixedBaseTable<P>;

    fn identity(&self) -> CurvePoint<P> {
        CurvePoint(Projective::zero())
    }

    fn generator(&self) -> CurvePoint<P> {
        CurvePoint(Projective::generator())
    }

    fn scalar_from_u64(&self, value: u64) -> Fr {
        Fr::from(value)
    }

    fn pow_raw(&self, base: &CurvePoint<P>, k: &Fr) -> CurvePoint<P> {
        // arkworks only routes G1 through the endomorphism by default
        CurvePoint(P::glv_mul_projective(base.0, *k))
    }

    fn exp_counter(&self) -> &OpCounter {
        &self.exps
    }

    fn multiexp_raw(&self, bases: &[CurvePoint<P>], exps: &[Fr]) -> CurvePoint<P> {
        let projective: Vec<_> = bases.iter().map(|point| point.0).collect();
        let affine = Projective::normalize_batch(&projective);
        CurvePoint(
            Projective::<P>::msm(&affine, exps).expect("lengths checked by the caller"),
        )
    }

    fn precompute(&self, base: &CurvePoint<P>) -> FixedBaseTable<P> {
        FixedBaseTable::new(base.0)
    }

    fn pow_table_raw(&self, table: &FixedBaseTable<P>, k: &Fr) -> CurvePoint<P> {
        CurvePoint(table.pow(k))
    }

    fn encoded_len(&self) -> usize {
        Affine::<P>::identity().serialized_size(Compress::Yes)
    }

    fn encode_into(&self, elem: &CurvePoint<P>, out: &mut Vec<u8>) {
        elem.0
            .into_affine()
            .serialize_compressed(out)
            .expect("writing to a Vec cannot fail");
    }

    fn decode(&self, bytes: &[u8]) -> Result<CurvePoint<P>, DecodeError> {
        check_len(bytes, self.encoded_len())?;
        let affine = Affine::<P>::deserialize_with_mode(bytes, Compress::Yes, Validate::No)
            .map_err(|_| DecodeError::Malformed)?;
        if !affine.is_on_curve() {
            return Err(DecodeError::Malformed);
        }
        if !P::in_subgroup(&affine) {
            return Err(DecodeError::NotInSubgroup);
        }
        let point = CurvePoint(affine.into_group());
        if self.encode(&point) != bytes {
            return Err(DecodeError::NonCanonical);
        }
        Ok(point)
    }
}

/// Element of the BN254 target group, written multiplicatively.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct TargetElem(pub PairingOutput<Engine>);

impl fmt::Debug for TargetElem {
    fn fmt(&self, formatter: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_zero() {
            formatter.write_str("TargetElem(identity)")
        } else {
            formatter.write_str("TargetElem(..)")
        }
    }
}

impl Mul for TargetElem {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl Div for TargetElem {
    type Output = Self;

    fn div(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

/// The BN254 target group, a subgroup of `Fq12^*`.
#[derive(Debug, Default)]
pub struct TargetGroup {
    exps: OpCounter,
}

const GT_ENCODED_LEN: usize = 384;

impl Group for TargetGroup {
    type Elem = TargetElem;
    type Scalar = Fr;
    type Table = TargetElem;

    fn identity(&self) -> TargetElem {
        TargetElem(PairingOutput::zero())
    }

    fn generator(&self) -> TargetElem {
        TargetElem(PairingOutput::generator())
    }

    fn scalar_from_u64(&self, value: u64) -> Fr {
        Fr::from(value)
    }

    fn pow_raw(&self, base: &TargetElem, k: &Fr) -> TargetElem {
        TargetElem(base.0.mul_bigint(k.into_bigint()))
    }

    fn exp_counter(&self) -> &OpCounter {
        &self.exps
    }

    fn precompute(&self, base: &TargetElem) -> TargetElem {
        *base
    }

    fn pow_table_raw(&self, table: &TargetElem, k: &Fr) -> TargetElem {
        self.pow_raw(table, k)
    }

    fn encoded_len(&self) -> usize {
        GT_ENCODED_LEN
    }

    fn encode_into(&self, elem: &TargetElem, out: &mut Vec<u8>) {
        elem.0
             .0
            .serialize_compressed(out)
            .expect("writing to a Vec cannot fail");
    }

    fn decode(&self, bytes: &[u8]) -> Result<TargetElem, DecodeError> {
        check_len(bytes, GT_ENCODED_LEN)?;
        let value = <Engine as Pairing>::TargetField::deserialize_with_mode(
            bytes,
            Compress::Yes,
            Validate::No,
        )
        .map_err(|_| DecodeError::Malformed)?;
        if !value.pow(Fr::MODULUS).is_one() {
            return Err(DecodeError::NotInSubgroup);
        }
        let elem = TargetElem(PairingOutput(value));
        if self.encode(&elem) != bytes {
            return Err(DecodeError::NonCanonical);
        }
        Ok(elem)
    }

    fn fingerprint(&self, elem: &TargetElem) -> u64 {
        // The low limb of one Fq coefficient is plenty for table lookups;
        // candidates are always confirmed by the caller.
        let coefficient = elem.0 .0.c0.c0.c0.into_bigint();
        coefficient.as_ref()[0] ^ elem.0 .0.c1.c2.c1.into_bigint().as_ref()[1]
    }
}

/// BN254 (a.k.a. alt_bn128): type-3 pairing, 254-bit prime group order.
#[derive(Debug, Default)]
pub struct Bn254 {
    g1: PointGroup<ark_bn254::g1::Config>,
    g2: PointGroup<ark_bn254::g2::Config>,
    gt: TargetGroup,
    pairings: OpCounter,
}

pub type G1Point = CurvePoint<ark_bn254::g1::Config>;
pub type G2Point = CurvePoint<ark_bn254::g2::Config>;

impl Backend for Bn254 {
    type Config = ();
    type Scalar = Fr;
    type G1 = PointGroup<ark_bn254::g1::Config>;
    type G2 = PointGroup<ark_bn254::g2::Config>;
    type Gt = TargetGroup;

    fn instantiate(_config: &()) -> Result<Self, GroupError> {
        Ok(Self::default())
    }

    fn id(&self) -> BackendId {
        BackendId::Bn254
    }

    fn g1(&self) -> &Self::G1 {
        &self.g1
    }

    fn g2(&self) -> &Self::G2 {
        &self.g2
    }

    fn gt(&self) -> &TargetGroup {
        &self.gt
    }

    fn pair_raw(&self, a: &G1Point, b: &G2Point) -> TargetElem {
        TargetElem(Engine::pairing(a.0.into_affine(), b.0.into_affine()))
    }

    fn pairing_counter(&self) -> &OpCounter {
        &self.pairings
    }

    fn pairing_product(&self, pairs: &[(G1Point, G2Point)]) -> TargetElem {
        self.pairings.add(pairs.len());
        let lhs: Vec<_> = pairs.iter().map(|(a, _)| a.0.into_affine()).collect();
        let rhs: Vec<_> = pairs.iter().map(|(_, b)| b.0.into_affine()).collect();
        TargetElem(Engine::multi_pairing(lhs, rhs))
    }

    fn scalar_from_u64(&self, value: u64) -> Fr {
        Fr::from(value)
    }

    fn random_scalar<R: RngCore + CryptoRng + ?Sized>(&self, rng: &mut R) -> Fr {
        // 512 bits reduced mod q: statistically uniform.
        let mut wide = [0_u8; 64];
        rng.fill_bytes(&mut wide);
        Fr::from_be_bytes_mod_order(&wide)
    }

    fn scalar_from_be_bytes_mod_order(&self, bytes: &[u8]) -> Fr {
        Fr::from_be_bytes_mod_order(bytes)
    }

    fn scalar_len(&self) -> usize {
        32
    }

    fn encode_scalar(&self, scalar: &Fr) -> Vec<u8> {
        scalar.into_bigint().to_bytes_be()
    }

    fn decode_scalar(&self, bytes: &[u8]) -> Result<Fr, DecodeError> {
        check_len(bytes, 32)?;
        let mut limbs = [0_u64; 4];
        for (limb, chunk) in limbs.iter_mut().rev().zip(bytes.chunks_exact(8)) {
            let mut word = [0_u8; 8];
            word.copy_from_slice(chunk);
            *limb = u64::from_be_bytes(word);
        }
        Fr::from_bigint(ark_ff::BigInt(limbs)).ok_or(DecodeError::ScalarOutOfRange)
    }

    fn order_be(&self) -> Vec<u8> {
        Fr::MODULUS.to_bytes_be()
    }

    /// Try-and-increment onto the twist, then cofactor clearing.
    fn hash_to_g2(&self, domain: &[u8], seed: &[u8]) -> G2Point {
        for counter in 0_u32.. {
            let coordinate = |part: u8| {
                Sha256::new()
                    .chain_update(domain)
                    .chain_update((seed.len() as u64).to_be_bytes())
                    .chain_update(seed)
                    .chain_update(counter.to_be_bytes())
                    .chain_update([part])
                    .finalize()
            };
            let (c0, c1) = (coordinate(0), coordinate(1));
            let x = Fq2::new(Fq::from_be_bytes_mod_order(&c0), Fq::from_be_bytes_mod_order(&c1));
            let Some(point) = Affine::<ark_bn254::g2::Config>::get_point_from_x_unchecked(
                x,
                c0[31] & 1 == 1,
            ) else {
                continue;
            };
            let point = point.clear_cofactor();
            if !point.is_zero() && point.is_in_correct_subgroup_assuming_on_curve() {
                return CurvePoint(point.into_group());
            }
        }
        unreachable!("about half of all x-coordinates lie on the twist")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupParams;

    #[test]
    fn group_order_is_254_bits() {
        let order = Bn254::default().order_be();
        assert_eq!(order.len(), 32);
        assert_eq!(256 - order[0].leading_zeros() as usize, 254);
    }

    #[test]
    fn encodings_round_trip_and_are_canonical() {
        let params = GroupParams::<Bn254>::setup(&(), b"enc").unwrap();
        let backend = params.backend();
        let k = params.scalar(123_456_789);
        let p = params.exp_g1(&params.g1(), &k);
        let bytes = backend.g1().encode(&p);
        assert_eq!(bytes.len(), 32);
        assert_eq!(backend.g1().decode(&bytes).unwrap(), p);
        let q = params.exp_g2(&params.h2(), &k);
        let bytes = backend.g2().encode(&q);
        assert_eq!(bytes.len(), 64);
        assert_eq!(backend.g2().decode(&bytes).unwrap(), q);
        let t = params.pair(&p, &q);
        let bytes = backend.gt().encode(&t);
        assert_eq!(backend.gt().decode(&bytes).unwrap(), t);
        let s = backend.encode_scalar(&k);
        assert_eq!(backend.decode_scalar(&s).unwrap(), k);
        assert_eq!(backend.decode_scalar(&[0xff; 32]), Err(DecodeError::ScalarOutOfRange));
    }

    #[test]
    fn rejects_points_outside_the_subgroup() {
        let backend = Bn254::default();
        // G2 on the twist has a huge cofactor: a raw lifted x is almost never
        // in the prime-order subgroup.
        let mut found = false;
        for i in 1_u64..50 {
            let x = Fq2::new(Fq::from(i), Fq::from(7_u64));
            if let Some(point) = Affine::<ark_bn254::g2::Config>::get_point_from_x_unchecked(x, true) {
                if point.is_in_correct_subgroup_assuming_on_curve() {
                    continue;
                }
                let mut bytes = Vec::new();
                point.serialize_compressed(&mut bytes).unwrap();
                assert_eq!(backend.g2().decode(&bytes), Err(DecodeError::NotInSubgroup));
                found = true;
                break;
            }
        }
        assert!(found);
        // Garbage GT encodings.
        let mut bytes = Vec::new();
        backend.gt().encode_into(&backend.gt().generator(), &mut bytes);
        bytes[5] ^= 1;
        assert!(backend.gt().decode(&bytes).is_err());
    }

    #[test]
    fn table_exponentiation_matches_plain() {
        let backend = Bn254::default();
        let base = backend.g2().generator();
        let table = backend.g2().precompute(&base);
        let mut rng = rand_chacha_rng();
        for _ in 0..20 {
            let k = backend.random_scalar(&mut rng);
            assert_eq!(backend.g2().pow_table_raw(&table, &k), backend.g2().pow_raw(&base, &k));
        }
        let minus_one = -Fr::one();
        assert_eq!(
            backend.g2().pow_table_raw(&table, &minus_one),
            backend.g2().inverse(&base)
        );
    }

    #[test]
    fn fast_g2_subgroup_check_agrees_with_arkworks() {
        use ark_ff::UniformRand;
        let mut rng = rand_chacha_rng();
        let (mut inside, mut outside) = (0, 0);
        while inside + outside < 400 {
            let x = Fq2::rand(&mut rng);
            let Some(raw) = Affine::<ark_bn254::g2::Config>::get_point_from_x_unchecked(x, inside % 2 == 0) else {
                continue;
            };
            for point in [raw, raw.clear_cofactor()] {
                let expected = point.is_in_correct_subgroup_assuming_on_curve();
                assert_eq!(ark_bn254::g2::Config::in_subgroup(&point), expected);
                if expected {
                    inside += 1;
                } else {
                    outside += 1;
                }
            }
        }
        assert!(inside >= 100 && outside >= 100);
        assert!(ark_bn254::g2::Config::in_subgroup(&Affine::zero()));
        // [r]P for a raw point P is pure cofactor torsion
        let generator = Affine::<ark_bn254::g2::Config>::generator();
        let torsion = (1..100_u64)
            .find_map(|i| {
                let x = Fq2::new(Fq::from(i), Fq::from(1_u64));
                Affine::<ark_bn254::g2::Config>::get_point_from_x_unchecked(x, false).map(|p| p.mul_bigint(Fr::MODULUS))
            })
            .unwrap();
        assert!(!torsion.is_zero());
        let mixed = (torsion + generator).into_affine();
        assert!(!ark_bn254::g2::Config::in_subgroup(&mixed));
        assert!(!mixed.is_in_correct_subgroup_assuming_on_curve());
    }

    fn rand_chacha_rng() -> impl RngCore + CryptoRng {
        use rand::SeedableRng;
        rand_chacha::ChaCha20Rng::seed_from_u64(7)
    }
}
