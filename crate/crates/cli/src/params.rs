//! Parameter files and backend dispatch.

use std::path::Path;

use anyhow::{bail, Context};
use ppats::{
    group::{BackendKind, GroupParams},
    Backend, Bn254, Toy,
};
use serde_json::{Map, Value};

use crate::json::{self, bytes_value, digest_value, open_envelope, str_value, u64_value, Codec};

/// Parameters of either backend.
pub enum AnyParams {
    Toy(GroupParams<Toy>),
    Bn254(GroupParams<Bn254>),
}

/// Runs `$body` with `$p` bound to the concrete `GroupParams`.
#[macro_export]
macro_rules! with_params {
    ($params:expr, $p:ident => $body:expr) => {
        match $params {
            $crate::params::AnyParams::Toy($p) => $body,
            $crate::params::AnyParams::Bn254($p) => $body,
        }
    };
}

impl AnyParams {
    /// `order` is required for the toy backend and rejected otherwise.
    pub fn setup(kind: BackendKind, order: Option<u64>, seed: &[u8]) -> anyhow::Result<Self> {
        Ok(match (kind, order) {
            (BackendKind::Toy, Some(q)) => Self::Toy(GroupParams::setup(&q, seed)?),
            (BackendKind::Toy, None) => bail!("the toy backend needs a group order"),
            (BackendKind::Bn254, None) => Self::Bn254(GroupParams::setup(&(), seed)?),
            (BackendKind::Bn254, Some(_)) => bail!("the bn254 backend has a fixed group order"),
        })
    }

    pub fn description_hash(&self) -> [u8; 32] {
        with_params!(self, p => *p.description_hash())
    }

    pub fn to_json(&self) -> Value {
        with_params!(self, p => params_to_json(p))
    }

    pub fn from_json(value: &Value) -> anyhow::Result<Self> {
        let map = open_envelope(
            value,
            "params",
            &["backend", "order", "seed", "description_hash", "g1", "h1", "h2"],
        )?;
        let kind: BackendKind = str_value(&map["backend"], "$.backend")?
            .parse()
            .map_err(|_| json::FormatError::new("$.backend", "unknown backend"))?;
        let order = match &map["order"] {
            Value::Null => None,
            other => Some(u64_value(other, "$.order")?),
        };
        let seed = bytes_value(&map["seed"], "$.seed")?;
        let params = Self::setup(kind, order, &seed).context("$: invalid parameters")?;
        // Re-derivation must reproduce every published value.
        if params.to_json() != *value {
            bail!("$: generators or description hash do not match their derivation from the seed");
        }
        digest_value(&map["description_hash"], "$.description_hash")?;
        Ok(params)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        Self::from_json(&json::read_file(path)?).with_context(|| format!("loading {}", path.display()))
    }
}

fn params_to_json<B: Backend>(params: &GroupParams<B>) -> Value {
    let codec = Codec::new(params);
    let mut body = Map::new();
    body.insert("backend".into(), params.id().name().into());
    body.insert(
        "order".into(),
        match params.id() {
            ppats::BackendId::Toy { q } => q.into(),
            ppats::BackendId::Bn254 => Value::Null,
        },
    );
    body.insert("seed".into(), hex::encode(params.seed()).into());
    body.insert("description_hash".into(), hex::encode(params.description_hash()).into());
    body.insert("g1".into(), codec.g1(&params.g1()));
    body.insert("h1".into(), codec.g2(&params.h1()));
    body.insert("h2".into(), codec.g2(&params.h2()));
    json::envelope("params", body)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_tamper_detection() {
        for params in [
            AnyParams::setup(BackendKind::Toy, Some(11), b"T11").unwrap(),
            AnyParams::setup(BackendKind::Bn254, None, b"params").unwrap(),
        ] {
            let value = params.to_json();
            let loaded = AnyParams::from_json(&value).unwrap();
            assert_eq!(loaded.description_hash(), params.description_hash());

            let mut tampered = value.clone();
            tampered["h2"] = tampered["h1"].clone();
            assert!(AnyParams::from_json(&tampered).is_err());
        }
        assert!(AnyParams::setup(BackendKind::Toy, None, b"x").is_err());
        assert!(AnyParams::setup(BackendKind::Toy, Some(12), b"x").is_err());
    }
}
