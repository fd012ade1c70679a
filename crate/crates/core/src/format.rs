//! Number formatting shared by every CSV and JSON writer.

/// Formats a real with 17 significant digits in scientific notation.
///
/// The output round-trips through `f64` parsing and never depends on locale.
pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}
