//! Unit-tagged quantities accepted in configuration files.
//!
//! Values are either bare numbers (already in SI/linear units) or strings
//! of the form `"<number> <unit>"`.

use crate::error::{Error, Result};

/// What a quantity measures; decides which suffixes are accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// Watts; accepts `W`, `mW`, `dBm`, `dBW`.
    Power,
    /// Linear power ratio; accepts `dB`, and `dBm` read as watts.
    Gain,
    /// Hertz; accepts `Hz`, `kHz`, `MHz`, `GHz`.
    Frequency,
    /// Metres; accepts `m`, `cm`, `mm`, and `lambda` when a wavelength is
    /// known.
    Length,
    /// Dimensionless; accepts a bare number or `dB`.
    Ratio,
}

fn split(text: &str) -> Option<(f64, &str)> {
    let text = text.trim();
    let end = text
        .find(|c: char| !(c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E')))
        .unwrap_or(text.len());
    // "1e" followed by a unit letter must not swallow the unit.
    let (mut num, mut unit) = text.split_at(end);
    while num.ends_with(['e', 'E']) {
        num = &num[..num.len() - 1];
        unit = &text[num.len()..];
    }
    let value = num.trim().parse::<f64>().ok()?;
    Some((value, unit.trim()))
}

/// Parses `text` as a quantity of `kind`. `wavelength` enables `lambda`.
pub fn parse(key: &str, text: &str, kind: Kind, wavelength: Option<f64>) -> Result<f64> {
    let bad = |msg: String| Error::config(key, msg);
    let (v, unit) = split(text).ok_or_else(|| bad(format!("cannot read a number from {text:?}")))?;
    let db = |x: f64| 10f64.powf(x / 10.0);
    let out = match (kind, unit) {
        (_, "") => v,
        (Kind::Power, "W") => v,
        (Kind::Power, "mW") => v * 1e-3,
        (Kind::Power | Kind::Gain, "dBm") => db(v - 30.0),
        (Kind::Power, "dBW") => db(v),
        (Kind::Gain | Kind::Ratio, "dB") => db(v),
        (Kind::Frequency, "Hz") => v,
        (Kind::Frequency, "kHz") => v * 1e3,
        (Kind::Frequency, "MHz") => v * 1e6,
        (Kind::Frequency, "GHz") => v * 1e9,
        (Kind::Length, "m") => v,
        (Kind::Length, "cm") => v * 1e-2,
        (Kind::Length, "mm") => v * 1e-3,
        (Kind::Length, "lambda" | "λ") => match wavelength {
            Some(l) => v * l,
            None => return Err(bad("wavelength-relative length needs a carrier".into())),
        },
        (_, u) => return Err(bad(format!("unit {u:?} is not valid for a {kind:?} quantity"))),
    };
    if !out.is_finite() {
        return Err(bad(format!("{text:?} is not finite")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powers() {
        assert!((parse("p", "30 dBm", Kind::Power, None).unwrap() - 1.0).abs() < 1e-15);
        assert!((parse("p", "0dBW", Kind::Power, None).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(parse("p", "250 mW", Kind::Power, None).unwrap(), 0.25);
        let s2 = parse("n", "-114 dBm", Kind::Power, None).unwrap();
        assert!((s2 / 3.981_071_705_534_97e-15 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gain_reads_dbm_as_watts() {
        let a = parse("g", "-13.3 dBm", Kind::Gain, None).unwrap();
        let b = parse("g", "-43.3 dB", Kind::Gain, None).unwrap();
        assert!((a / b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lengths_and_frequencies() {
        assert_eq!(parse("f", "3.5 GHz", Kind::Frequency, None).unwrap(), 3.5e9);
        assert_eq!(parse("d", "0.5 lambda", Kind::Length, Some(0.2)).unwrap(), 0.1);
        assert_eq!(parse("d", "1e2 m", Kind::Length, None).unwrap(), 100.0);
        assert_eq!(parse("d", "50", Kind::Length, None).unwrap(), 50.0);
    }

    #[test]
    fn errors_name_the_key() {
        let e = parse("tx_power", "30 furlongs", Kind::Power, None).unwrap_err();
        assert!(e.to_string().contains("tx_power"), "{e}");
        assert!(parse("d", "0.5 lambda", Kind::Length, None).is_err());
        assert!(parse("d", "abc", Kind::Length, None).is_err());
        assert!(parse("f", "3 m", Kind::Frequency, None).is_err());
    }
}
