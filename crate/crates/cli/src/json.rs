//! JSON envelopes: `{"version": 1, "kind": ..., ...}` with sorted keys and
//! lowercase hex for every element and scalar. Hashes and proofs always use
//! the binary encodings; the hex here is only a transport.

use std::{fmt, fs, io::Write, path::Path};

use anyhow::Context;
use ppats::{
    group::{G1Elem, G2Elem, GtElem, Group},
    Backend, GroupParams,
};
use serde_json::{Map, Value};

pub const FORMAT_VERSION: u64 = 1;

/// A located problem in a decoded file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormatError {
    pub path: String,
    pub message: String,
}

impl FormatError {
    pub fn new(path: &str, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for FormatError {
    fn fmt(&self, formatter: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(formatter, "{}: {}", self.path, self.message)
    }
}

impl std::error::Error for FormatError {}

pub type Result<T> = std::result::Result<T, FormatError>;

pub fn child(path: &str, key: &str) -> String {
    format!("{path}.{key}")
}

pub fn index(path: &str, i: usize) -> String {
    format!("{path}[{i}]")
}

/// Object with exactly the listed keys.
pub fn object<'v>(value: &'v Value, keys: &[&str], path: &str) -> Result<&'v Map<String, Value>> {
    let map = value
        .as_object()
        .ok_or_else(|| FormatError::new(path, "expected an object"))?;
    if let Some(extra) = map.keys().find(|k| !keys.contains(&k.as_str())) {
        return Err(FormatError::new(path, format!("unexpected field {extra:?}")));
    }
    if let Some(missing) = keys.iter().find(|k| !map.contains_key(**k)) {
        return Err(FormatError::new(path, format!("missing field {missing:?}")));
    }
    Ok(map)
}

pub fn field<'v>(map: &'v Map<String, Value>, key: &str) -> &'v Value {
    &map[key]
}

pub fn array<'v>(value: &'v Value, path: &str) -> Result<&'v Vec<Value>> {
    value
        .as_array()
        .ok_or_else(|| FormatError::new(path, "expected an array"))
}

pub fn u64_value(value: &Value, path: &str) -> Result<u64> {
    value
        .as_u64()
        .ok_or_else(|| FormatError::new(path, "expected a non-negative integer"))
}

pub fn u32_value(value: &Value, path: &str) -> Result<u32> {
    u32::try_from(u64_value(value, path)?).map_err(|_| FormatError::new(path, "integer out of range"))
}

pub fn str_value<'v>(value: &'v Value, path: &str) -> Result<&'v str> {
    value
        .as_str()
        .ok_or_else(|| FormatError::new(path, "expected a string"))
}

/// Lowercase hex only, so that each byte string has one text form.
pub fn bytes_value(value: &Value, path: &str) -> Result<Vec<u8>> {
    let text = str_value(value, path)?;
    if text.bytes().any(|b| b.is_ascii_uppercase()) {
        return Err(FormatError::new(path, "hex must be lowercase"));
    }
    hex::decode(text).map_err(|err| FormatError::new(path, format!("invalid hex: {err}")))
}

pub fn digest_value(value: &Value, path: &str) -> Result<[u8; 32]> {
    bytes_value(value, path)?
        .try_into()
        .map_err(|_| FormatError::new(path, "expected 32 bytes"))
}

pub fn list<T>(value: &Value, path: &str, mut item: impl FnMut(&Value, &str) -> Result<T>) -> Result<Vec<T>> {
    array(value, path)?
        .iter()
        .enumerate()
        .map(|(i, v)| item(v, &index(path, i)))
        .collect()
}

/// Element and scalar codecs for one parameter set.
pub struct Codec<'a, B: Backend> {
    pub params: &'a GroupParams<B>,
}

impl<'a, B: Backend> Codec<'a, B> {
    pub fn new(params: &'a GroupParams<B>) -> Self {
        Self { params }
    }

    pub fn g1(&self, elem: &G1Elem<B>) -> Value {
        Value::String(hex::encode(self.params.backend().g1().encode(elem)))
    }

    pub fn g2(&self, elem: &G2Elem<B>) -> Value {
        Value::String(hex::encode(self.params.backend().g2().encode(elem)))
    }

    pub fn gt(&self, elem: &GtElem<B>) -> Value {
        Value::String(hex::encode(self.params.backend().gt().encode(elem)))
    }

    pub fn scalar(&self, scalar: &B::Scalar) -> Value {
        Value::String(hex::encode(self.params.backend().encode_scalar(scalar)))
    }

    pub fn read_g1(&self, value: &Value, path: &str) -> Result<G1Elem<B>> {
        let bytes = bytes_value(value, path)?;
        self.params
            .backend()
            .g1()
            .decode(&bytes)
            .map_err(|err| FormatError::new(path, format!("invalid G1 element: {err}")))
    }

    pub fn read_g2(&self, value: &Value, path: &str) -> Result<G2Elem<B>> {
        let bytes = bytes_value(value, path)?;
        self.params
            .backend()
            .g2()
            .decode(&bytes)
            .map_err(|err| FormatError::new(path, format!("invalid G2 element: {err}")))
    }

    pub fn read_gt(&self, value: &Value, path: &str) -> Result<GtElem<B>> {
        let bytes = bytes_value(value, path)?;
        self.params
            .backend()
            .gt()
            .decode(&bytes)
            .map_err(|err| FormatError::new(path, format!("invalid GT element: {err}")))
    }

    pub fn read_scalar(&self, value: &Value, path: &str) -> Result<B::Scalar> {
        let bytes = bytes_value(value, path)?;
        self.params
            .backend()
            .decode_scalar(&bytes)
            .map_err(|err| FormatError::new(path, format!("invalid scalar: {err}")))
    }
}

/// Wraps `body` with the version and kind fields.
pub fn envelope(kind: &str, mut body: Map<String, Value>) -> Value {
    body.insert("version".into(), FORMAT_VERSION.into());
    body.insert("kind".into(), kind.into());
    Value::Object(body)
}

/// Checks version and kind, returning the body keys as an object with
/// exactly `keys` besides `version` and `kind`.
pub fn open_envelope<'v>(value: &'v Value, kind: &str, keys: &[&str]) -> Result<&'v Map<String, Value>> {
    let mut all = vec!["version", "kind"];
    all.extend_from_slice(keys);
    let map = object(value, &all, "$")?;
    if u64_value(&map["version"], "$.version")? != FORMAT_VERSION {
        return Err(FormatError::new("$.version", format!("unsupported version, expected {FORMAT_VERSION}")));
    }
    let found = str_value(&map["kind"], "$.kind")?;
    if found != kind {
        return Err(FormatError::new("$.kind", format!("expected a {kind:?} file, found {found:?}")));
    }
    Ok(map)
}

/// Parses JSON text; syntax errors name the byte offset.
pub fn parse(text: &str) -> anyhow::Result<Value> {
    serde_json::from_str(text).map_err(|err| {
        let offset = if err.is_eof() {
            text.len()
        } else {
            text.split_inclusive('\n')
                .take(err.line().saturating_sub(1))
                .map(str::len)
                .sum::<usize>()
                + err.column().saturating_sub(1)
        };
        anyhow::anyhow!("byte offset {offset} (line {}, column {}): {err}", err.line(), err.column())
    })
}

pub fn to_text(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    text.push('\n');
    text
}

pub fn read_file(path: &Path) -> anyhow::Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_file(path: &Path, value: &Value) -> anyhow::Result<()> {
    write_bytes(path, to_text(value).as_bytes())
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => dir,
        _ => Path::new("."),
    };
    let mut file = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("writing {}", path.display()))?;
    file.write_all(bytes)?;
    file.as_file().sync_all()?;
    file.persist(path)
        .with_context(|| format!("replacing {}", path.display()))?;
    Ok(())
}
