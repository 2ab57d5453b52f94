//! Escape witnesses.
//!
//! A scan never turns prefix agreement into a claim of equality: rows are
//! reported `proven_equal` only when both sides carry eventually-periodic
//! certificates with equal normal forms.

use std::fmt;
use std::io;

use super::certify::ep_of_term;
use super::ep::ep_equal;
use crate::sdl::{row, EnumTerm, SeqTerm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WitnessKind {
    Disagreement,
    ProvenEqual,
    Unknown,
}

impl WitnessKind {
    pub fn name(self) -> &'static str {
        match self {
            WitnessKind::Disagreement => "disagreement",
            WitnessKind::ProvenEqual => "proven_equal",
            WitnessKind::Unknown => "unknown",
        }
    }
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Verdict for one row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Witness {
    pub kind: WitnessKind,
    pub row: u64,
    /// present iff `kind` is `Disagreement`
    pub position: Option<u64>,
    pub horizon: u64,
}

impl Witness {
    fn disagreement(row: u64, position: u64, horizon: u64) -> Self {
        Self {
            kind: WitnessKind::Disagreement,
            row,
            position: Some(position),
            horizon,
        }
    }

    fn without_position(kind: WitnessKind, row: u64, horizon: u64) -> Self {
        Self {
            kind,
            row,
            position: None,
            horizon,
        }
    }
}

/// Least `i < horizon` with `s(i) ≠ t(i)`. `None` means unknown, not equal.
pub fn find_disagreement(s: &SeqTerm, t: &SeqTerm, horizon: u64) -> Option<u64> {
    (0..horizon).find(|&i| s.bit(i) != t.bit(i))
}

fn row_disagreement(e: &EnumTerm, y: &SeqTerm, k: u64, horizon: u64) -> Option<u64> {
    (0..horizon).find(|&i| y.bit(i) != e.bit(k, i))
}

/// One witness per row `k < rows`: the least disagreement below `horizon`,
/// or `Unknown`.
pub fn verify_escape(e: &EnumTerm, y: &SeqTerm, rows: u64, horizon: u64) -> Vec<Witness> {
    (0..rows)
        .map(|k| match row_disagreement(e, y, k, horizon) {
            Some(pos) => Witness::disagreement(k, pos, horizon),
            None => Witness::without_position(WitnessKind::Unknown, k, horizon),
        })
        .collect()
}

/// Like [`verify_escape`], but first tries the position where the
/// construction promises to differ from row `k`, reporting it when it
/// lies below `horizon` and the bits really differ there.
pub fn verify_designated_escape(
    e: &EnumTerm,
    y: &SeqTerm,
    rows: u64,
    horizon: u64,
    designated: impl Fn(u64) -> u64,
) -> Vec<Witness> {
    (0..rows)
        .map(|k| {
            let at = designated(k);
            if at < horizon && y.bit(at) != e.bit(k, at) {
                return Witness::disagreement(k, at, horizon);
            }
            match row_disagreement(e, y, k, horizon) {
                Some(pos) => Witness::disagreement(k, pos, horizon),
                None => Witness::without_position(WitnessKind::Unknown, k, horizon),
            }
        })
        .collect()
}

/// Upgrades `Unknown` verdicts to `ProvenEqual` where `y` and the row
/// both carry eventually-periodic certificates with equal normal forms.
pub fn certify_unknowns(e: &EnumTerm, y: &SeqTerm, witnesses: &mut [Witness]) {
    let mut y_form = None;
    for w in witnesses
        .iter_mut()
        .filter(|w| w.kind == WitnessKind::Unknown)
    {
        let yf = y_form.get_or_insert_with(|| ep_of_term(y).ok());
        let Some(yf) = yf.as_ref() else { return };
        if ep_of_term(&row(e, w.row)).is_ok_and(|rf| ep_equal(yf, &rf)) {
            w.kind = WitnessKind::ProvenEqual;
        }
    }
}

/// Searches for a row of `e` equal to `s`: a disagreement below `horizon`,
/// an equality proven by eventually-periodic certificates, or unknown.
pub fn membership_scan(s: &SeqTerm, e: &EnumTerm, rows: u64, horizon: u64) -> Vec<Witness> {
    let mut ws = verify_escape(e, s, rows, horizon);
    certify_unknowns(e, s, &mut ws);
    ws
}

/// Writes `row,kind,position,horizon` records; the position field is
/// empty when absent. With `one_based`, rows and positions shift up by 1.
pub fn write_csv<W: io::Write>(
    witnesses: &[Witness],
    out: W,
    header: bool,
    one_based: bool,
) -> Result<(), csv::Error> {
    let shift = u64::from(one_based);
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    if header {
        w.write_record(["row", "kind", "position", "horizon"])?;
    }
    for wit in witnesses {
        let pos = wit
            .position
            .map(|p| (p + shift).to_string())
            .unwrap_or_default();
        w.write_record([
            (wit.row + shift).to_string(),
            wit.kind.name().to_string(),
            pos,
            wit.horizon.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
