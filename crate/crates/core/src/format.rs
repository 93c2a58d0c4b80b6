//! Fixed-precision number formatting for text outputs.

/// `x` with 15 significant digits, plain decimal for moderate exponents and
/// scientific otherwise; trailing zeros trimmed.
pub fn sig15(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{x:.14e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim(mantissa))
    }
}

fn trim(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(sig15(std::f64::consts::PI), "3.14159265358979");
        assert_eq!(sig15(4.5 * std::f64::consts::PI), "14.1371669411541");
        assert_eq!(sig15(2.0), "2");
        assert_eq!(sig15(-0.25), "-0.25");
        assert_eq!(sig15(1.5e-9), "1.5e-9");
        assert_eq!(sig15(123456789012345678.0), "1.23456789012346e17");
    }
}
