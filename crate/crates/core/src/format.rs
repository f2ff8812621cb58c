//! Fixed float formatting for machine-readable output: 17 significant digits
//! in C `%.17g` style, so every printed value parses back to the same `f64`.

use serde::ser::{Serialize, Serializer};
use serde_json::value::RawValue;

/// `%.17g`: fixed notation for decimal exponents in `[-4, 17)`, scientific
/// otherwise, trailing zeros removed. Non-finite values print as `nan`,
/// `inf`, `-inf`.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("LowerExp always has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if !(-4..17).contains(&exp) {
        let m = trim_fraction(mantissa);
        let esign = if exp < 0 { '-' } else { '+' };
        return format!("{sign}{m}e{esign}{:02}", exp.abs());
    }
    let body = if exp >= 0 {
        let point = exp as usize + 1;
        format!("{}.{}", &digits[..point], &digits[point..])
    } else {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    };
    format!("{sign}{}", trim_fraction(&body))
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Serialises a float as a bare JSON number in [`g17`] form (`null` when not
/// finite). Only meaningful with `serde_json`.
pub fn ser_g17<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        let raw = RawValue::from_string(g17(*x)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    } else {
        s.serialize_none()
    }
}

pub fn ser_opt_g17<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => ser_g17(v, s),
        None => s.serialize_none(),
    }
}

pub fn ser_vec_g17<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        seq.serialize_element(&G17(*x))?;
    }
    seq.end()
}

/// Wrapper that serialises through [`ser_g17`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct G17(pub f64);

impl Serialize for G17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ser_g17(&self.0, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn matches_c_printf() {
        assert_eq!(g17(2.0 * std::f64::consts::SQRT_2), "2.8284271247461903");
        assert_eq!(g17(4.0), "4");
        assert_eq!(g17(-4.0), "-4");
        assert_eq!(g17(0.1), "0.10000000000000001");
        assert_eq!(g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(g17(1.5e-4), "0.00014999999999999999");
        assert_eq!(g17(1e17), "1e+17");
        assert_eq!(g17(123456789.0), "123456789");
        assert_eq!(g17(0.0), "0");
        assert_eq!(g17(f64::NAN), "nan");
    }

    #[test]
    fn json_numbers_are_raw() {
        let s = serde_json::to_string(&vec![G17(0.1), G17(f64::INFINITY)]).unwrap();
        assert_eq!(s, "[0.10000000000000001,null]");
    }

    proptest! {
        #[test]
        fn round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            prop_assert_eq!(g17(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }
}
