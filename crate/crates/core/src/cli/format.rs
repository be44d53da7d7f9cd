//! Round-trip float formatting and small CSV helpers.

use std::fmt::Write as _;

/// Shortest representation that parses back to the same `f64`. Plain
/// decimal notation inside `[1e-5, 1e16)`, scientific outside.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Accumulates CSV rows in memory so that every file is written once.
#[derive(Debug, Default)]
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn with_header(header: &str) -> Self {
        let mut buf = String::with_capacity(1 << 16);
        buf.push_str(header);
        buf.push('\n');
        Self { buf }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        for (i, f) in fields.into_iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            self.buf.push_str(f.as_ref());
        }
        self.buf.push('\n');
    }

    pub fn line(&mut self, text: std::fmt::Arguments<'_>) {
        let _ = self.buf.write_fmt(text);
        self.buf.push('\n');
    }

    pub fn into_string(self) -> String {
        self.buf
    }
}
