//! Number formatting and small CSV helpers shared by reports and the CLI.

/// Formats with 9 significant digits; fixed notation for moderate
/// magnitudes, scientific otherwise.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..9).contains(&mag) {
        let decimals = (8 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.8e}")
    }
}

/// Joins already-formatted fields into one CSV row.
pub fn csv_row(fields: &[String]) -> String {
    fields
        .iter()
        .map(|f| if f.contains(',') || f.contains('"') { format!("\"{}\"", f.replace('"', "\"\"")) } else { f.clone() })
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_num(3f64.sqrt()), "1.73205081");
        assert_eq!(fmt_num(0.5), "0.500000000");
        assert_eq!(fmt_num(-123456.789), "-123456.789");
        assert_eq!(fmt_num(1e-7), "1.00000000e-7");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        assert_eq!(fmt_num(0.0), "0");
    }

    #[test]
    fn quoting() {
        assert_eq!(csv_row(&["a".into(), "b,c".into()]), "a,\"b,c\"");
    }
}
