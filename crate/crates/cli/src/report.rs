//! Deterministic report serialisation: sorted keys, floats with 17
//! significant digits, non-finite floats as strings.

use std::io::{self, Write};

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "graphcalc/1";

/// Writes every float as `d.dddddddddddddddde±x` (17 significant digits).
struct Sig17;

impl serde_json::ser::Formatter for Sig17 {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

/// A JSON number, or "inf" / "-inf" / "nan".
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or_else(|| Value::String(format_f64(x)), Value::Number)
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().copied().map(num).collect())
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

pub fn to_string(v: &Value) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17);
    serde::Serialize::serialize(v, &mut ser).expect("serialising a JSON value cannot fail");
    String::from_utf8(out).expect("JSON output is UTF-8")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Builds an object from key/value pairs; keys come out sorted.
pub fn object<const N: usize>(pairs: [(&str, Value); N]) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Adds the schema tag, command name and input hash to a report body.
pub fn envelope(command: &str, input_sha256: Option<&str>, mut body: Map<String, Value>) -> Value {
    body.insert("schema".into(), SCHEMA.into());
    body.insert("command".into(), command.into());
    body.insert("input_sha256".into(), input_sha256.map_or(Value::Null, Value::from));
    Value::Object(body)
}
