//! Canonical JSON output: struct-order keys and fixed 6-decimal floats, so
//! parse/serialize round trips are byte-identical.

use std::io;

use serde::Serialize;

/// serde_json formatter writing every float with exactly six decimals.
#[derive(Clone, Debug, Default)]
pub struct CanonicalFormatter;

impl serde_json::ser::Formatter for CanonicalFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.6}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.6}")
    }
}

/// Serializes to canonical JSON text.
pub fn to_string<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, CanonicalFormatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json output is UTF-8"))
}

/// Serializes to canonical JSON followed by a newline, for JSON-lines output.
pub fn to_json_line<T: Serialize>(value: &T) -> serde_json::Result<String> {
    Ok(format!("{}\n", to_string(value)?))
}
