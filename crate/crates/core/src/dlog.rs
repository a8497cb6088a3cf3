//! Baby-step giant-step discrete logarithms over a bounded range.
//!
//! Decryption ends with `gT2^v = target` for a small `v` (at most the number
//! of ballots). A [`DlogTable`] stores `m` baby steps `base^j` keyed by
//! [`Group::fingerprint`]; a lookup then walks at most `bound / m + 1` giant
//! steps. Tables are reusable across lookups with the same base.

use alloc::collections::BTreeMap;

use crate::group::{Group, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum DlogError {
    #[error("no discrete logarithm in [0, {bound}]")]
    NotFound { bound: u64 },
    #[error("search bound must be at least 1")]
    InvalidBound,
}

/// Precomputed baby steps for one base.
pub struct DlogTable<G: Group> {
    base: G::Elem,
    giant_step: G::Elem,
    baby_steps: u64,
    baby: BTreeMap<u64, u32>,
}

impl<G: Group> DlogTable<G> {
    /// Table with `baby_steps` entries `base^0 .. base^(baby_steps - 1)`.
    pub fn new(group: &G, base: G::Elem, baby_steps: u32) -> Self {
        let baby_steps = baby_steps.max(1);
        let mut baby = BTreeMap::new();
        let mut acc = group.identity();
        for j in 0..baby_steps {
            baby.entry(group.fingerprint(&acc)).or_insert(j);
            acc = acc * base;
        }
        Self::from_parts(group, base, baby_steps, baby)
    }

    /// Table sized `ceil(sqrt(bound + 1))`, the optimum for a single lookup.
    pub fn for_bound(group: &G, base: G::Elem, bound: u64) -> Self {
        let size = isqrt_ceil(bound.saturating_add(1)).min(u64::from(u32::MAX));
        Self::new(group, base, size as u32)
    }

    /// Rebuilds a table from stored `(fingerprint, exponent)` entries.
    pub fn from_entries(
        group: &G,
        base: G::Elem,
        baby_steps: u32,
        entries: impl IntoIterator<Item = (u64, u32)>,
    ) -> Self {
        Self::from_parts(group, base, baby_steps.max(1), entries.into_iter().collect())
    }

    fn from_parts(group: &G, base: G::Elem, baby_steps: u32, baby: BTreeMap<u64, u32>) -> Self {
        let giant_step = group.inverse(&group.pow_raw(&base, &group.scalar_from_u64(baby_steps.into())));
        Self {
            base,
            giant_step,
            baby_steps: baby_steps.into(),
            baby,
        }
    }

    pub fn base(&self) -> &G::Elem {
        &self.base
    }

    pub fn baby_steps(&self) -> u64 {
        self.baby_steps
    }

    pub fn entries(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.baby.iter().map(|(&key, &j)| (key, j))
    }

    /// Smallest `m` in `[0, bound]` with `base^m = target`.
    pub fn extract(&self, group: &G, target: &G::Elem, bound: u64) -> Result<u64, DlogError> {
        if bound == 0 {
            return Err(DlogError::InvalidBound);
        }
        let mut acc = *target;
        for giant in 0..=bound / self.baby_steps {
            if let Some(&j) = self.baby.get(&group.fingerprint(&acc)) {
                let candidate = giant * self.baby_steps + u64::from(j);
                if candidate <= bound && self.confirm(group, target, candidate) {
                    return Ok(candidate);
                }
            }
            acc = acc * self.giant_step;
        }
        Err(DlogError::NotFound { bound })
    }

    fn confirm(&self, group: &G, target: &G::Elem, candidate: u64) -> bool {
        let k = group.scalar_from_u64(candidate);
        if k.is_zero() {
            return *target == group.identity();
        }
        group.pow_raw(&self.base, &k) == *target
    }
}

fn isqrt_ceil(n: u64) -> u64 {
    let root = n.isqrt();
    if root * root < n {
        root + 1
    } else {
        root
    }
}

/// One-shot extraction of `log_base(target)` within `[0, bound]`.
pub fn dl_extract<G: Group>(
    group: &G,
    base: &G::Elem,
    target: &G::Elem,
    bound: u64,
) -> Result<u64, DlogError> {
    if bound == 0 {
        return Err(DlogError::InvalidBound);
    }
    DlogTable::for_bound(group, *base, bound).extract(group, target, bound)
}
