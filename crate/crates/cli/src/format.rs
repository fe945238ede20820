//! Fixed-width text rendering of numbers and tables.

use nsroot::{NumericContext, Real};

pub const PLACES: usize = 10;

/// Iterates: truncated to 10 places, the convention of published tables.
pub fn iterate(x: &Real) -> String {
    x.to_truncated_string(PLACES)
}

/// Errors and residuals: 10 places rounded half-to-even, scientific below
/// `1e-10`, and `0` once the value is flushed.
pub fn small(v: &Real, ctx: &NumericContext) -> String {
    let magnitude = v.abs();
    if magnitude < ctx.flush_threshold() {
        "0".to_string()
    } else if magnitude < ctx.pow10(-(PLACES as i32)) {
        v.to_sci_string(3)
    } else {
        v.to_fixed_string(PLACES)
    }
}

pub fn fixed(v: &Real) -> String {
    v.to_fixed_string(PLACES)
}

/// Left-aligned columns separated by two spaces.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}
