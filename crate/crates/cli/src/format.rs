/// Formats `v` with exactly 12 significant digits.
///
/// Plain decimal notation is used for magnitudes in `[1e-5, 1e12)`,
/// scientific notation elsewhere. Output depends only on the value.
pub fn sig12(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return "0.00000000000".to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.11e}")
    }
}

/// Joins fields with commas and terminates the row with a bare LF.
pub fn csv_row<S: AsRef<str>>(fields: &[S]) -> String {
    let mut row = fields.iter().map(|f| f.as_ref()).collect::<Vec<_>>().join(",");
    row.push('\n');
    row
}
