/// Formats `v` with `sig` significant digits in the shorter of fixed and
/// scientific notation, trailing zeros removed.
pub fn sig(v: f64, sig: usize) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return "0".into();
    }
    let s = format!("{:.*e}", sig - 1, v);
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let e: i32 = exp.parse().expect("integer exponent");
    if (-5..sig as i32).contains(&e) {
        let decimals = (sig as i32 - 1 - e).max(0) as usize;
        trim(&format!("{:.*}", decimals, v)).to_string()
    } else {
        format!("{}e{}", trim(mant), e)
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::sig;

    #[test]
    fn formats() {
        assert_eq!(sig(1.0, 12), "1");
        assert_eq!(sig(0.4375, 12), "0.4375");
        assert_eq!(sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(sig(-2.5e-9, 12), "-2.5e-9");
        assert_eq!(sig(123456789012345.0, 12), "1.23456789012e14");
        assert_eq!(sig(0.0, 12), "0");
    }
}
