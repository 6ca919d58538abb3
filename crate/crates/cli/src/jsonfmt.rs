//! JSON serialization with full-precision floats.
//!
//! Every `f64` is printed with 17 significant digits in scientific notation
//! (the same formatter used for CSV cells), which is enough to round-trip any
//! finite double exactly. Map keys inside [`serde_json::Value`] objects are
//! `BTreeMap`-ordered, so serializing the same data twice yields byte-equal
//! output — the property the reproducibility checks rely on.

use std::io;

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter, PrettyFormatter};

use curverewire_core::fmt_f64;

/// Formatter that defers everything to `F` except `f64` values, which are
/// written with 17 significant digits.
pub struct FullPrecision<F> {
    inner: F,
}

impl FullPrecision<CompactFormatter> {
    pub fn compact() -> Self {
        FullPrecision {
            inner: CompactFormatter,
        }
    }
}

impl<'a> FullPrecision<PrettyFormatter<'a>> {
    pub fn pretty() -> Self {
        FullPrecision {
            inner: PrettyFormatter::new(),
        }
    }
}

macro_rules! forward {
    ($name:ident ( $($arg:ident : $ty:ty),* )) => {
        fn $name<W>(&mut self, writer: &mut W $(, $arg: $ty)*) -> io::Result<()>
        where
            W: ?Sized + io::Write,
        {
            self.inner.$name(writer $(, $arg)*)
        }
    };
}

impl<F: Formatter> Formatter for FullPrecision<F> {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        if value.is_finite() {
            writer.write_all(fmt_f64(value).as_bytes())
        } else {
            // serde_json rejects non-finite numbers before reaching the
            // formatter for native f64 fields; keep a defensive fallback for
            // arbitrary-precision paths.
            writer.write_all(b"null")
        }
    }

    forward!(write_f32(value: f32));
    forward!(begin_array());
    forward!(end_array());
    forward!(begin_array_value(first: bool));
    forward!(end_array_value());
    forward!(begin_object());
    forward!(end_object());
    forward!(begin_object_key(first: bool));
    forward!(end_object_key());
    forward!(begin_object_value());
    forward!(end_object_value());
}

/// Serialize `value` as compact JSON with full-precision floats.
pub fn to_string<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FullPrecision::compact());
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out)?)
}

/// Serialize `value` as indented JSON with full-precision floats, with a
/// trailing newline (the format used for all `.json` files the CLI writes).
pub fn to_string_pretty<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FullPrecision::pretty());
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out)?)
}
