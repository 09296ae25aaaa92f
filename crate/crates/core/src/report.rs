//! Number formatting shared by every CSV and JSON report.

/// Significant digits used for every reported number.
pub const SIG_DIGITS: usize = 12;

/// Format like C's `%.12g`: 12 significant digits, trailing zeros trimmed.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIG_DIGITS as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::fmt_sig;

    #[test]
    fn matches_percent_g() {
        assert_eq!(fmt_sig(0.5), "0.5");
        assert_eq!(fmt_sig(-3.518181412043291), "-3.51818141204");
        assert_eq!(fmt_sig(1e-9), "1e-9");
        assert_eq!(fmt_sig(123456789012345.0), "1.23456789012e14");
        assert_eq!(fmt_sig(4096.0), "4096");
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(3.7964055986e-5), "3.7964055986e-5");
        assert_eq!(fmt_sig(0.000123), "0.000123");
    }
}
