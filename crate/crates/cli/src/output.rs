//! Output plumbing: 17-significant-digit CSV, the self-describing JSON
//! envelope, and path-or-stdout writing.

use anyhow::{Context, Result};
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Floats in CSV carry 17 significant digits so a re-parse is bit-exact.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Run configuration echoed into every JSON payload; unset fields are
/// omitted so the `meta` block documents exactly what produced the data.
#[derive(Debug, Default, Serialize)]
pub struct Meta {
    pub command: String,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub approach: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asymptotic: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bins: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kmin: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kmax: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth: Option<String>,
}

impl Meta {
    pub fn new(command: &str) -> Self {
        Meta {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION"),
            ..Default::default()
        }
    }
}

/// `{ "meta": …, "data": … }` — the single self-describing JSON object
/// every command emits in JSON mode.
pub fn json_envelope<T: Serialize>(meta: &Meta, data: &T) -> Result<String> {
    #[derive(Serialize)]
    struct Envelope<'a, T> {
        meta: &'a Meta,
        data: &'a T,
    }
    let mut s = serde_json::to_string_pretty(&Envelope { meta, data })?;
    s.push('\n');
    Ok(s)
}

/// Render rows as RFC-4180 CSV with a header.
pub fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().context("csv flush")?;
    Ok(String::from_utf8(bytes)?)
}

/// Write to the path, or stdout when no path is given.
pub fn write_out(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, content)
            .with_context(|| format!("cannot write {}", p.display())),
        None => {
            std::io::stdout()
                .write_all(content.as_bytes())
                .context("cannot write to stdout")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn csv_quoting_is_rfc4180() {
        let text = csv_text(
            &["a", "b"],
            &[vec!["plain".into(), "has,comma \"and\" quotes".into()]],
        )
        .unwrap();
        assert_eq!(text, "a,b\nplain,\"has,comma \"\"and\"\" quotes\"\n");
    }

    #[test]
    fn empty_rows_give_header_only() {
        let text = csv_text(&["x", "y"], &[]).unwrap();
        assert_eq!(text, "x,y\n");
    }

    proptest! {
        #[test]
        fn f64_roundtrip_is_exact(bits in proptest::num::u64::ANY) {
            let v = f64::from_bits(bits);
            prop_assume!(v.is_finite());
            let back: f64 = fmt_f64(v).parse().unwrap();
            prop_assert_eq!(back.to_bits(), v.to_bits());
        }
    }
}
