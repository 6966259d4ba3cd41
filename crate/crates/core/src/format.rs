//! Bit-stable text output shared by every CSV writer.

use std::io::{self, Write};

/// Decimal rendering with 17 significant digits, enough to round-trip any
/// `f64`.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a one-line header followed by the rows, comma separated.
pub fn write_csv<W, I, R>(mut out: W, header: &[&str], rows: I) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = R>,
    R: AsRef<[String]>,
{
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        writeln!(out, "{}", row.as_ref().join(","))?;
    }
    out.flush()
}
