use clap::Args;

use iterfrac::error::Error;
use iterfrac::scalar::{Mode, DEFAULT_BITS};
use iterfrac::series::{ModeName, Series, SeriesDoc};

use crate::{Failure, ModeArg, Precision};

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct SeriesArgs {
    /// Path to a series JSON document, or the document itself:
    /// {"kind": "ordinary"|"exponential", "values": [...], "mode": "exact"|"numeric"}.
    #[arg(long)]
    pub series: Option<String>,
    /// Named series: geometric, quad, expm1, moebius(q), linear(q).
    #[arg(long)]
    pub preset: Option<String>,
}

impl SeriesArgs {
    fn doc(&self) -> Result<Option<SeriesDoc>, Failure> {
        let Some(src) = &self.series else {
            return Ok(None);
        };
        let text = if src.trim_start().starts_with('{') {
            src.clone()
        } else {
            std::fs::read_to_string(src).map_err(|e| Failure::Io(format!("{src}: {e}")))?
        };
        serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| Failure::Domain(Error::Parse(format!("series document: {e}"))))
    }

    /// Whether the input can only be represented numerically.
    fn numeric_only(&self) -> Result<bool, Failure> {
        if let Some(doc) = self.doc()? {
            return Ok(doc.mode == ModeName::Numeric);
        }
        let preset = self.preset.as_deref().unwrap_or_default();
        Ok(Series::preset(preset, 1, Mode::Exact).is_err()
            && Series::preset(preset, 1, Mode::numeric()).is_ok())
    }

    /// The series through `order` in `mode`; longer documents are truncated.
    pub fn load(&self, order: usize, mode: Mode) -> Result<Series, Failure> {
        let f = match self.doc()? {
            Some(doc) => {
                let bits = match mode {
                    Mode::Numeric(bits) => bits,
                    Mode::Exact => DEFAULT_BITS,
                };
                let f = doc.to_series(bits)?.to_mode(mode)?;
                if f.order() > order {
                    f.truncate(order)
                } else {
                    f
                }
            }
            None => Series::preset(self.preset.as_deref().unwrap_or_default(), order, mode)?,
        };
        Ok(f)
    }
}

/// Explicit `--mode` wins; otherwise numeric when any input is numeric.
pub fn resolve_mode(p: &Precision, series: &SeriesArgs, numeric_input: bool) -> Result<Mode, Failure> {
    Ok(match p.mode {
        Some(ModeArg::Exact) => Mode::Exact,
        Some(ModeArg::Numeric) => Mode::Numeric(p.bits),
        None if numeric_input || series.numeric_only()? => Mode::Numeric(p.bits),
        None => Mode::Exact,
    })
}
