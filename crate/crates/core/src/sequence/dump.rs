use std::fmt::Write;
use std::sync::Arc;

use super::{ControlLabel, Pulse, PulseSequence, PulseTerm};
use crate::error::{Error, Result};
use crate::pauli::Hamiltonian;

pub(super) fn dump(seq: &PulseSequence) -> String {
    let mut out = String::new();
    for p in seq.pulses() {
        let line: Vec<String> = p
            .terms()
            .iter()
            .map(|t| format!("{} {} {}", t.label, t.theta, t.h))
            .collect();
        writeln!(out, "{}", line.join(" | ")).expect("writing to a String");
    }
    out
}

/// Reads the format written by [`PulseSequence::dump`]. Blank lines and
/// lines starting with `#` are skipped. Parse errors report the column
/// within the offending line.
pub fn parse_dump(text: &str) -> Result<PulseSequence> {
    let mut pulses = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let at_line = |column: usize, message: String| Error::Parse {
            column,
            message: format!("line {}: {message}", lineno + 1),
        };
        let mut terms = Vec::new();
        let mut offset = 0usize;
        for part in line.split('|') {
            let base = offset;
            offset += part.len() + 1;
            let mut fields = part.trim_start().splitn(3, char::is_whitespace);
            let lead = part.len() - part.trim_start().len();
            let (Some(label), Some(theta), Some(expr)) =
                (fields.next(), fields.next(), fields.next())
            else {
                return Err(at_line(
                    base + 1,
                    "expected 'label angle expression'".into(),
                ));
            };
            let label =
                ControlLabel::new(label).map_err(|e| at_line(base + lead + 1, e.to_string()))?;
            let theta: f64 = theta.parse().map_err(|_| {
                at_line(
                    base + lead + label.as_str().len() + 2,
                    format!("invalid angle '{theta}'"),
                )
            })?;
            let expr_col = base + part.len() - expr.len();
            let h = Hamiltonian::parse(expr).map_err(|e| match e {
                Error::Parse { column, message } => at_line(expr_col + column, message),
                other => other,
            })?;
            terms.push(PulseTerm::new(label, theta, Arc::new(h)));
        }
        pulses.push(Pulse::new(terms)?);
    }
    PulseSequence::from_pulses(pulses)
}
