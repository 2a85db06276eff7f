//! Float formatting shared by the text writers.
//!
//! Values are written in the shortest form that parses back to the same
//! bits, so every text format round-trips exactly. Integral values print
//! without a fractional part (`293`, `-1`).

pub(crate) fn fmt_float(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub(crate) fn parse_float(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn readable_forms() {
        assert_eq!(fmt_float(293.0), "293");
        assert_eq!(fmt_float(-1.0), "-1");
        assert_eq!(fmt_float(-0.00088), "-0.00088");
        assert_eq!(fmt_float(1e-7), "1e-7");
        assert_eq!(fmt_float(f64::NAN), "NaN");
        assert_eq!(fmt_float(-0.0), "-0");
    }

    proptest! {
        #[test]
        fn bits_round_trip(bits in any::<u64>()) {
            let v = f64::from_bits(bits);
            let back = parse_float(&fmt_float(v)).unwrap();
            if v.is_nan() {
                prop_assert!(back.is_nan());
            } else {
                prop_assert_eq!(back.to_bits(), v.to_bits());
            }
        }
    }
}
