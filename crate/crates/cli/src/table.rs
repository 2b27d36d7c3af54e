//! Study-table ingestion: CSV with a `z` column, or `effect` and `se`
//! columns, plus an optional `label`/`study` column. Mixed conventions in
//! one file are rejected; parse errors carry the 1-based data row.

use anyhow::{bail, Context, Result};
use failsafe_core::StudySet;
use std::path::Path;

#[derive(Debug)]
pub struct StudyTable {
    pub studies: StudySet,
}

enum Layout {
    Z { z: usize },
    EffectSe { effect: usize, se: usize },
}

pub fn parse_study_csv(path: &Path) -> Result<StudyTable> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot open study table {}", path.display()))?;

    let headers: Vec<String> = reader
        .headers()
        .context("study table has no header row")?
        .iter()
        .map(|h| h.to_ascii_lowercase())
        .collect();
    let find = |name: &str| headers.iter().position(|h| h == name);

    // a `label`/`study` column may be present; it is simply not read
    let layout = match (find("z"), find("effect"), find("se")) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            bail!("study table mixes `z` and `effect`/`se` columns; use one convention")
        }
        (Some(z), None, None) => Layout::Z { z },
        (None, Some(effect), Some(se)) => Layout::EffectSe { effect, se },
        (None, Some(_), None) | (None, None, Some(_)) => {
            bail!("study table needs both `effect` and `se` columns")
        }
        (None, None, None) => {
            bail!("study table header must name `z` or `effect,se` (got: {})", headers.join(","))
        }
    };

    let mut z_scores = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 1;
        let record = record.with_context(|| format!("row {row}: malformed CSV"))?;
        let cell = |col: usize, name: &str| -> Result<f64> {
            let raw = record
                .get(col)
                .with_context(|| format!("row {row}: missing field `{name}`"))?;
            raw.parse::<f64>()
                .with_context(|| format!("row {row}: field `{name}`: not a number (`{raw}`)"))
        };
        match layout {
            Layout::Z { z } => z_scores.push(cell(z, "z")?),
            Layout::EffectSe { effect, se } => {
                let e = cell(effect, "effect")?;
                let s = cell(se, "se")?;
                if !(s > 0.0 && s.is_finite()) {
                    bail!("row {row}: field `se`: must be > 0 (got {s})");
                }
                z_scores.push(e / s);
            }
        }
    }

    let studies = StudySet::from_z_scores(z_scores).context("invalid study table")?;
    Ok(StudyTable { studies })
}
