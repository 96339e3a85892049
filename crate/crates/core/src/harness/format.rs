/// Formats `x` with 12 significant digits, switching to scientific notation
/// outside `[1e-4, 1e12)`.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exponent) = sci.split_once('e').expect("scientific format has an exponent");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if !(-4..12).contains(&exponent) {
        return format!("{mantissa}e{exponent}");
    }
    // rounding has already fixed the exponent, so this keeps 12 digits
    format!("{x:.*}", (11 - exponent) as usize)
}

#[cfg(test)]
mod tests {
    use super::sig12;

    #[test]
    fn twelve_digits() {
        assert_eq!(sig12(0.5), "0.500000000000");
        assert_eq!(sig12(0.375f64.sqrt()), "0.612372435696");
        assert_eq!(sig12(-2.0), "-2.00000000000");
        assert_eq!(sig12(123456.0), "123456.000000");
        assert_eq!(sig12(1.5e-13), "1.50000000000e-13");
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(1e-5), "1.00000000000e-5");
        assert_eq!(sig12(2.5e-4), "0.000250000000000");
        assert_eq!(sig12(9.9999999999999), "10.0000000000");
    }
}
