//! Number rendering for the text reports.

/// Six significant digits; scientific notation outside `[1e-4, 1e6)`.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0.00000".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&magnitude) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding can carry into a new digit, e.g. 9.999996 -> 10.00000
    let carried = s
        .trim_start_matches('-')
        .split('.')
        .next()
        .map_or(0, str::len) as i32;
    if decimals > 0 && carried > magnitude.max(0) + 1 {
        format!("{x:.prec$}", prec = decimals - 1)
    } else {
        s
    }
}

/// Test statistics and p-values: three decimals.
pub fn dec3(x: f64) -> String {
    format!("{x:.3}")
}

pub fn percent1(x: f64) -> String {
    format!("{x:.1}")
}

pub fn opt_dec2(x: Option<f64>) -> String {
    x.map_or_else(|| "undefined".to_string(), |v| format!("{v:.2}"))
}

/// Renders an odds ratio: two decimals in the everyday range, six
/// significant digits otherwise.
pub fn ratio(x: f64) -> String {
    if (0.01..1e6).contains(&x) {
        format!("{x:.2}")
    } else {
        sig6(x)
    }
}

/// Pads each column to its widest cell. `align` holds one `l` or `r` per
/// column.
pub fn table(header: &[&str], rows: &[Vec<String>], align: &str) -> String {
    let left: Vec<bool> = align.chars().map(|c| c == 'l').collect();
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut out = String::new();
        for (j, c) in cells.iter().enumerate() {
            let pad = " ".repeat(widths[j] - c.chars().count());
            if j > 0 {
                out.push_str("  ");
            }
            if left.get(j).copied().unwrap_or(false) {
                out.push_str(c);
                out.push_str(&pad);
            } else {
                out.push_str(&pad);
                out.push_str(c);
            }
        }
        out.truncate(out.trim_end().len());
        out.push('\n');
        out
    };
    let mut out = line(header.to_vec());
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.012388), "0.0123880");
        assert_eq!(sig6(-33.9), "-33.9000");
        assert_eq!(sig6(747.4), "747.400");
        assert_eq!(sig6(123456.7), "123457");
        assert_eq!(sig6(9.999996), "10.0000");
        assert_eq!(sig6(2.5e7), "2.50000e7");
        assert_eq!(sig6(-3.2e-6), "-3.20000e-6");
        assert_eq!(sig6(0.0), "0.00000");
    }

    #[test]
    fn three_decimals() {
        assert_eq!(dec3(138.97366), "138.974");
        assert_eq!(dec3(0.00012), "0.000");
    }

    #[test]
    fn odds_ratio_rendering() {
        assert_eq!(ratio(2.91538), "2.92");
        assert_eq!(ratio(8.77e12), "8.77000e12");
        assert_eq!(ratio(f64::INFINITY), "inf");
    }

    #[test]
    fn aligned_table() {
        let t = table(&["a", "value"], &[vec!["long".into(), "1.5".into()]], "lr");
        assert_eq!(t, "a     value\nlong    1.5\n");
    }
}
