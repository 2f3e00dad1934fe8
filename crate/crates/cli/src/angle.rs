//! Angle literals: raw radians (`1.047`) or rational multiples of pi
//! (`pi`, `pi/3`, `2pi/3`, `2*pi/3`, `-pi/4`, `π/2`).

use std::f64::consts::PI;

pub fn parse(s: &str) -> Result<f64, String> {
    let t = s.trim().replace('π', "pi").to_ascii_lowercase();
    let Some(at) = t.find("pi") else {
        return t.parse::<f64>().map_err(|_| format!("not a number or pi multiple: {s:?}"));
    };
    let (coef, rest) = (t[..at].trim_end_matches('*'), &t[at + 2..]);
    let coef = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| format!("bad pi coefficient in {s:?}"))?,
    };
    let den = match rest {
        "" => 1.0,
        r => r
            .strip_prefix('/')
            .and_then(|d| d.parse::<f64>().ok())
            .filter(|d| *d != 0.0)
            .ok_or_else(|| format!("bad pi denominator in {s:?}"))?,
    };
    Ok(coef * PI / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        assert_eq!(parse("pi/3").unwrap(), PI / 3.0);
        assert_eq!(parse("2pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(parse("2*pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(parse("π/2").unwrap(), PI / 2.0);
        assert_eq!(parse("PI").unwrap(), PI);
        assert_eq!(parse("-pi/4").unwrap(), -PI / 4.0);
        assert_eq!(parse("0.5").unwrap(), 0.5);
        assert!(parse("pi/0").is_err());
        assert!(parse("x").is_err());
        assert!(parse("pi3").is_err());
    }
}
