//! Number parsing for flags: reals like `11/60`, `pi/2`, `-0.5`, and complex
//! values like `1.75-i`, `0.9i`, `1+0.9i`, `2.25`.

use hirota_core::Complex64 as C;

/// A real literal, `pi`, a multiple `k*pi` / `kpi`, or a quotient of two of those.
pub fn real(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let d = atom(den)?;
        if d == 0.0 {
            return Err(format!("'{s}': division by zero"));
        }
        return Ok(atom(num)? / d);
    }
    atom(s)
}

fn atom(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest.to_string()),
        None => (1.0, t.trim_start_matches('+').to_string()),
    };
    let v = if let Some(k) = body.strip_suffix("pi") {
        let k = k.trim_end_matches('*');
        let k = if k.is_empty() { 1.0 } else { k.parse::<f64>().map_err(|e| format!("'{s}': {e}"))? };
        k * std::f64::consts::PI
    } else {
        body.parse::<f64>().map_err(|e| format!("'{s}': {e}"))?
    };
    if !v.is_finite() {
        return Err(format!("'{s}' is not finite"));
    }
    Ok(sign * v)
}

/// Complex number in a+bi form; `i` or `j` marks the imaginary unit.
pub fn complex(s: &str) -> Result<C, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty complex number".into());
    }
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return Ok(C::new(real(&t)?, 0.0));
    };
    // Split at the last sign that is not a leading sign or an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let im = match im.trim_end_matches('*') {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => real(x).map_err(|e| format!("'{s}': {e}"))?,
    };
    let re = if re.is_empty() { 0.0 } else { real(re).map_err(|e| format!("'{s}': {e}"))? };
    Ok(C::new(re, im))
}

/// Comma-separated complex list.
pub fn complex_list(s: &str) -> Result<Vec<C>, String> {
    s.split(',').filter(|x| !x.trim().is_empty()).map(complex).collect()
}

pub fn real_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("'{s}': expected lo,hi"))?;
    Ok((real(a)?, real(b)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals() {
        assert_eq!(real("11/60").unwrap(), 11.0 / 60.0);
        assert_eq!(real("pi/2").unwrap(), std::f64::consts::FRAC_PI_2);
        assert_eq!(real("-2pi").unwrap(), -2.0 * std::f64::consts::PI);
        assert_eq!(real("1e-3").unwrap(), 1e-3);
        assert!(real("1/0").is_err());
        assert!(real("abc").is_err());
    }

    #[test]
    fn complexes() {
        assert_eq!(complex("1.75-i").unwrap(), C::new(1.75, -1.0));
        assert_eq!(complex("0.9i").unwrap(), C::new(0.0, 0.9));
        assert_eq!(complex("1+0.9i").unwrap(), C::new(1.0, 0.9));
        assert_eq!(complex("-1 - 0.9j").unwrap(), C::new(-1.0, -0.9));
        assert_eq!(complex("2.25").unwrap(), C::new(2.25, 0.0));
        assert_eq!(complex("-i").unwrap(), C::new(0.0, -1.0));
        assert_eq!(complex("1e-3+2e+1i").unwrap(), C::new(1e-3, 20.0));
        assert_eq!(complex_list("1.25,2.25").unwrap().len(), 2);
        assert!(complex("1+xi").is_err());
    }
}
